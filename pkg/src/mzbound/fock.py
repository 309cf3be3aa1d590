"""Two-mode Fock space organised in blocks of fixed total photon number.

Linear optics conserves the total photon number, so every unitary used here is
block diagonal: block ``s`` acts on the ``s + 1`` states ``|j, s - j>`` ordered by
``j`` ascending. Beam-splitter blocks are built from exact integer sums, so they
are unitary to machine precision for any block size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import TYPE_CHECKING

import numpy as np

from .errors import DimensionError

if TYPE_CHECKING:
    from .states import TwoModeState

__all__ = [
    "BlockBasis",
    "BlockUnitary",
    "BS_MATRIX",
    "beam_splitter",
    "phase_shifter",
    "full_mzi",
    "half_mzi",
    "mzi_matrix",
    "apply",
]

# Single-photon action of the balanced splitter. Columns are input modes.
BS_MATRIX = np.array([[1.0, 1.0j], [1.0j, 1.0]]) / math.sqrt(2.0)


@dataclass(frozen=True)
class BlockBasis:
    """Index bookkeeping for the two-mode basis truncated at ``cutoff`` photons."""

    cutoff: int

    def __post_init__(self):
        if self.cutoff < 0:
            raise ValueError(f"cutoff must be non-negative, got {self.cutoff}")

    def block_dim(self, s: int) -> int:
        return s + 1

    @property
    def size(self) -> int:
        return (self.cutoff + 1) * (self.cutoff + 2) // 2

    def position(self, j: int, k: int) -> tuple[int, int]:
        """Return ``(block, index)`` of ``|j, k>``."""
        if j < 0 or k < 0 or j + k > self.cutoff:
            raise DimensionError(f"|{j},{k}> outside basis with cutoff {self.cutoff}")
        return j + k, j

    def label(self, s: int, index: int) -> tuple[int, int]:
        """Inverse of :meth:`position`."""
        if not (0 <= s <= self.cutoff and 0 <= index <= s):
            raise DimensionError(f"no element {index} in block {s}")
        return index, s - index

    def flat_index(self, j: int, k: int) -> int:
        s, idx = self.position(j, k)
        return s * (s + 1) // 2 + idx

    def labels(self) -> list[tuple[int, int]]:
        return [(j, s - j) for s in range(self.cutoff + 1) for j in range(s + 1)]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class BlockUnitary:
    """Block-diagonal operator; ``blocks[s]`` is the ``(s+1, s+1)`` block."""

    blocks: tuple[np.ndarray, ...]

    def __post_init__(self):
        blocks = tuple(_frozen(b) for b in self.blocks)
        for s, b in enumerate(blocks):
            if b.shape != (s + 1, s + 1):
                raise DimensionError(f"block {s} has shape {b.shape}")
        object.__setattr__(self, "blocks", blocks)

    @property
    def cutoff(self) -> int:
        return len(self.blocks) - 1

    def __matmul__(self, other: BlockUnitary) -> BlockUnitary:
        if other.cutoff != self.cutoff:
            raise DimensionError(f"cutoff mismatch: {self.cutoff} vs {other.cutoff}")
        return BlockUnitary(tuple(a @ b for a, b in zip(self.blocks, other.blocks)))

    def dagger(self) -> BlockUnitary:
        return BlockUnitary(tuple(b.conj().T for b in self.blocks))

    def unitarity_error(self) -> float:
        """Largest entry of ``|U^dagger U - I|`` over all blocks."""
        return max(
            float(np.max(np.abs(b.conj().T @ b - np.eye(len(b))))) for b in self.blocks
        )


def _krawtchouk_sum(j: int, k: int, jp: int) -> int:
    lo, hi = max(0, jp - k), min(j, jp)
    return sum((-1) ** p * math.comb(j, p) * math.comb(k, jp - p) for p in range(lo, hi + 1))


@lru_cache(maxsize=None)
def _bs_block(s: int) -> np.ndarray:
    # <jp, s-jp| B |j, s-j> = i^(j+jp) K sqrt(jp!(s-jp)! / (j!(s-j)! 2^s)),
    # with K an exact alternating binomial sum.
    fact = [math.factorial(i) for i in range(s + 1)]
    out = np.empty((s + 1, s + 1), dtype=complex)
    ipow = (1.0, 1.0j, -1.0, -1.0j)
    for j in range(s + 1):
        k = s - j
        for jp in range(s + 1):
            ks = _krawtchouk_sum(j, k, jp)
            if ks == 0:
                out[jp, j] = 0.0
                continue
            mag = math.sqrt(float(Fraction(ks * ks * fact[jp] * fact[s - jp], fact[j] * fact[k] << s)))
            out[jp, j] = math.copysign(mag, ks) * ipow[(j + jp) % 4]
    out.flags.writeable = False
    return out


def beam_splitter(S: int) -> BlockUnitary:
    """Balanced 50:50 beam splitter on all blocks up to ``S`` photons."""
    if S < 0:
        raise ValueError(f"S must be non-negative, got {S}")
    return BlockUnitary(tuple(_bs_block(s) for s in range(S + 1)))


def _phase_diagonals(phi: float, S: int) -> list[np.ndarray]:
    return [np.exp(1j * phi * np.arange(s + 1)) for s in range(S + 1)]


def phase_shifter(phi: float, S: int) -> BlockUnitary:
    """Phase ``phi`` on the first mode: ``|j, s-j>`` picks up ``exp(i j phi)``."""
    if not np.isfinite(phi):
        raise ValueError("phase must be finite")
    return BlockUnitary(tuple(np.diag(d) for d in _phase_diagonals(phi, S)))


def full_mzi(phi: float, S: int) -> BlockUnitary:
    """Splitter, phase, splitter. Port 1 sees ``sin^2(phi/2)`` for ``|1,0>`` input."""
    bs = beam_splitter(S)
    return BlockUnitary(
        tuple(b @ (d[:, None] * b) for b, d in zip(bs.blocks, _phase_diagonals(phi, S)))
    )


def half_mzi(phi: float, S: int) -> BlockUnitary:
    """Phase then the output splitter, for states prepared inside the interferometer."""
    bs = beam_splitter(S)
    return BlockUnitary(
        tuple(b * d[None, :] for b, d in zip(bs.blocks, _phase_diagonals(phi, S)))
    )


def mzi_matrix(phi, injection: str = "full") -> np.ndarray:
    """Single-photon (mode-amplitude) matrix of the interferometer.

    Vectorised over ``phi``: the result has shape ``phi.shape + (2, 2)``.
    Coherent amplitudes transform with the same matrix.
    """
    phi = np.asarray(phi, dtype=float)
    ph = np.zeros(phi.shape + (2, 2), dtype=complex)
    ph[..., 0, 0] = np.exp(1j * phi)
    ph[..., 1, 1] = 1.0
    m = BS_MATRIX @ ph
    if injection == "full":
        m = m @ BS_MATRIX
    elif injection != "half":
        raise ValueError(f"injection must be 'full' or 'half', got {injection!r}")
    return m


def apply(U: BlockUnitary, state: TwoModeState) -> TwoModeState:
    """Blockwise matrix-vector product ``U |state>``."""
    from .states import TwoModeState

    if state.cutoff > U.cutoff:
        raise DimensionError(
            f"state cutoff {state.cutoff} exceeds operator cutoff {U.cutoff}"
        )
    blocks = tuple(U.blocks[s] @ v for s, v in enumerate(state.blocks))
    return TwoModeState(blocks, state.truncation_tail)

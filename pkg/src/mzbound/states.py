"""Input states: truncated coherent products, NOON states, Fock pairs, and
discrete mixtures of coherent products (classical light)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special, stats

from .errors import DegenerateInputError, DimensionError, InputError

__all__ = [
    "TwoModeState",
    "ClassicalMixture",
    "coherent_product",
    "noon_state",
    "fock_pair",
    "random_classical_mixture",
    "default_cutoff",
]

TAIL_TARGET = 1e-12


@dataclass(frozen=True)
class TwoModeState:
    """Pure two-mode state stored block by block.

    ``blocks[s][j]`` is the amplitude of ``|j, s-j>``. ``truncation_tail`` is the
    probability discarded by truncating at ``cutoff`` photons.
    """

    blocks: tuple[np.ndarray, ...]
    truncation_tail: float = 0.0

    def __post_init__(self):
        blocks = []
        for s, b in enumerate(self.blocks):
            b = np.array(b, dtype=complex).reshape(-1)
            if b.shape != (s + 1,):
                raise DimensionError(f"block {s} has {b.size} amplitudes, expected {s + 1}")
            b.flags.writeable = False
            blocks.append(b)
        if not blocks:
            raise DimensionError("a state needs at least the vacuum block")
        if self.truncation_tail < 0:
            raise InputError("truncation_tail must be non-negative")
        object.__setattr__(self, "blocks", tuple(blocks))

    @property
    def cutoff(self) -> int:
        return len(self.blocks) - 1

    def norm(self) -> float:
        return math.sqrt(sum(float(np.vdot(b, b).real) for b in self.blocks))

    def amplitude(self, j: int, k: int) -> complex:
        if j < 0 or k < 0 or j + k > self.cutoff:
            return 0.0j
        return complex(self.blocks[j + k][j])

    def padded(self, S: int) -> TwoModeState:
        """Same state embedded in a basis with a larger cutoff."""
        if S < self.cutoff:
            raise DimensionError(f"cannot pad cutoff {self.cutoff} down to {S}")
        extra = tuple(np.zeros(s + 1, dtype=complex) for s in range(self.cutoff + 1, S + 1))
        return TwoModeState(self.blocks + extra, self.truncation_tail)

    def probabilities(self) -> np.ndarray:
        """Photon-number distribution ``p[j, k]`` on an ``(S+1, S+1)`` grid."""
        S = self.cutoff
        p = np.zeros((S + 1, S + 1))
        for s, b in enumerate(self.blocks):
            j = np.arange(s + 1)
            p[j, s - j] = np.abs(b) ** 2
        return p


@dataclass(frozen=True)
class ClassicalMixture:
    """Convex combination of coherent products ``|alpha_i>|beta_i>``."""

    weights: np.ndarray
    alphas: np.ndarray
    betas: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float).reshape(-1)
        a = np.array(self.alphas, dtype=complex).reshape(-1)
        b = np.array(self.betas, dtype=complex).reshape(-1)
        if not (w.size == a.size == b.size) or w.size == 0:
            raise InputError("weights, alphas and betas must be non-empty and equally long")
        if np.any(w < 0):
            raise InputError("mixture weights must be non-negative")
        if abs(w.sum() - 1.0) > 1e-12:
            raise InputError(f"mixture weights sum to {w.sum()!r}, not 1")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise InputError("coherent amplitudes must be finite")
        for arr in (w, a, b):
            arr.flags.writeable = False
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "alphas", a)
        object.__setattr__(self, "betas", b)

    @classmethod
    def single(cls, alpha: complex, beta: complex = 0.0) -> ClassicalMixture:
        return cls(np.ones(1), [alpha], [beta])

    def __len__(self) -> int:
        return self.weights.size

    @property
    def mean_photons(self) -> np.ndarray:
        return np.abs(self.alphas) ** 2 + np.abs(self.betas) ** 2

    def components(self):
        yield from zip(self.weights, self.alphas, self.betas)


def default_cutoff(mean_photons: float, tail: float = TAIL_TARGET) -> int:
    """Smallest convenient cutoff whose Poisson tail is below ``tail``."""
    mean = float(mean_photons)
    S = int(math.ceil(mean + 10.0 * math.sqrt(mean) + 20))
    while stats.poisson.sf(S, mean) >= tail:
        S += 5
    return S


def _coherent_amplitudes(alpha: complex, S: int) -> np.ndarray:
    # alpha^n / sqrt(n!) evaluated in log space; 0^0 = 1.
    n = np.arange(S + 1)
    out = np.zeros(S + 1, dtype=complex)
    if alpha == 0:
        out[0] = 1.0
        return out
    logmag = n * math.log(abs(alpha)) - 0.5 * special.gammaln(n + 1)
    out[:] = np.exp(logmag + 1j * n * np.angle(alpha))
    return out


def coherent_product(alpha: complex, beta: complex = 0.0, S: int | None = None) -> TwoModeState:
    """Truncated ``|alpha>|beta>`` with the discarded Poisson tail recorded."""
    alpha, beta = complex(alpha), complex(beta)
    mean = abs(alpha) ** 2 + abs(beta) ** 2
    if S is None:
        S = default_cutoff(mean)
    if S < 0:
        raise ValueError(f"S must be non-negative, got {S}")
    ua = _coherent_amplitudes(alpha, S)
    ub = _coherent_amplitudes(beta, S)
    pref = math.exp(-mean / 2.0)
    blocks = []
    for s in range(S + 1):
        j = np.arange(s + 1)
        blocks.append(pref * ua[j] * ub[s - j])
    tail = float(stats.poisson.sf(S, mean)) if mean > 0 else 0.0
    return TwoModeState(tuple(blocks), tail)


def noon_state(N: int) -> TwoModeState:
    """``(|N,0> + |0,N>)/sqrt(2)``."""
    if N < 1:
        raise DegenerateInputError(f"NOON state needs N >= 1, got {N}")
    blocks = [np.zeros(s + 1, dtype=complex) for s in range(N + 1)]
    blocks[N][0] = blocks[N][N] = 1.0 / math.sqrt(2.0)
    return TwoModeState(tuple(blocks))


def fock_pair(m: int, n: int) -> TwoModeState:
    """Basis state ``|m, n>``."""
    if m < 0 or n < 0:
        raise ValueError("photon numbers must be non-negative")
    blocks = [np.zeros(s + 1, dtype=complex) for s in range(m + n + 1)]
    blocks[m + n][m] = 1.0
    return TwoModeState(tuple(blocks))


def _disk(rng: np.random.Generator, k: int, radius: float) -> np.ndarray:
    r = radius * np.sqrt(rng.random(k))
    return r * np.exp(2j * np.pi * rng.random(k))


def random_classical_mixture(k: int, max_amplitude: float, seed: int) -> ClassicalMixture:
    """``k`` coherent products with flat-Dirichlet weights and amplitudes uniform
    in the complex disk of radius ``max_amplitude``."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if not max_amplitude > 0:
        raise ValueError("max_amplitude must be positive")
    rng = np.random.default_rng(seed)
    w = rng.dirichlet(np.ones(k))
    w = w / w.sum()
    return ClassicalMixture(w, _disk(rng, k, max_amplitude), _disk(rng, k, max_amplitude))

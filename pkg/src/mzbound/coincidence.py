"""Coincidence rates C_{m,n}(phi) behind a Mach-Zehnder interferometer.

Two routes are provided. The trace engine propagates a Fock-space state through
the interferometer and reads off photon-number probabilities. The analytic
route uses the fact that coherent states stay coherent under linear optics, so
the output photon numbers are independent Poisson variables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import stats

from . import fock
from .detector import DetectorModel, ideal_detector, joint_response
from .errors import DegenerateInputError, DimensionError, GridError, InputError
from .states import ClassicalMixture, TwoModeState, default_cutoff

__all__ = [
    "CoincidencePattern",
    "PhaseGrid",
    "CoincidenceScan",
    "PROVENANCES",
    "ideal_distribution",
    "coincidence_trace",
    "coherent_vacuum_analytic",
    "coherent_pair_analytic",
    "mixture_rates",
    "mixture_scan",
    "outcome_distribution",
    "scan",
]

Source = Union[TwoModeState, ClassicalMixture]
PROVENANCES = ("analytic", "trace", "montecarlo", "ingested")
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class CoincidencePattern:
    """``m`` clicks at D1 and ``n`` clicks at D2."""

    m: int
    n: int

    def __post_init__(self):
        if int(self.m) != self.m or int(self.n) != self.n or self.m < 0 or self.n < 0:
            raise ValueError(f"pattern counts must be non-negative integers, got ({self.m}, {self.n})")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "n", int(self.n))

    @property
    def N(self) -> int:
        return self.m + self.n

    def require_photons(self) -> None:
        if self.N < 1:
            raise DegenerateInputError("pattern (0, 0) has no N-fold visibility")

    def __str__(self) -> str:
        return f"({self.m},{self.n})"


@dataclass(frozen=True)
class PhaseGrid:
    """Strictly increasing phases in radians."""

    phases: np.ndarray

    def __post_init__(self):
        p = np.array(self.phases, dtype=float).reshape(-1)
        if not np.all(np.isfinite(p)):
            raise GridError("phases must be finite")
        if p.size > 1 and np.any(np.diff(p) <= 0):
            raise GridError("phases must be strictly increasing")
        p.flags.writeable = False
        object.__setattr__(self, "phases", p)

    @classmethod
    def uniform(cls, points: int, offset: float = 0.0) -> PhaseGrid:
        """``points`` equally spaced phases covering one period, endpoint excluded."""
        if points < 0:
            raise GridError("number of points must be non-negative")
        return cls(offset + TWO_PI * np.arange(points) / points if points else np.empty(0))

    def __len__(self) -> int:
        return self.phases.size

    @property
    def is_uniform(self) -> bool:
        M = self.phases.size
        if M < 1:
            return False
        step = TWO_PI / M
        if M == 1:
            return True
        d = np.diff(self.phases)
        return bool(np.max(np.abs(d - step)) < 1e-12)

    @property
    def span(self) -> float:
        if self.phases.size == 0:
            return 0.0
        if self.is_uniform:
            return TWO_PI
        return float(self.phases[-1] - self.phases[0])


@dataclass(frozen=True)
class CoincidenceScan:
    """Coincidence rate sampled over a phase grid.

    ``shots`` and ``errors`` are either both present (finite acquisitions) or
    both absent (exact or ingested rates without counts).
    """

    grid: PhaseGrid
    values: np.ndarray
    pattern: CoincidencePattern
    provenance: str = "analytic"
    shots: np.ndarray | None = None
    errors: np.ndarray | None = None

    def __post_init__(self):
        v = np.array(self.values, dtype=float).reshape(-1)
        if v.size != len(self.grid):
            raise InputError(f"{v.size} values for a grid of {len(self.grid)} points")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise InputError("rates must be finite and non-negative")
        if self.provenance not in PROVENANCES:
            raise InputError(f"unknown provenance {self.provenance!r}")
        if (self.shots is None) != (self.errors is None):
            raise InputError("shots and errors must be given together")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)
        if self.shots is not None:
            shots = np.array(self.shots, dtype=np.int64).reshape(-1)
            err = np.array(self.errors, dtype=float).reshape(-1)
            if shots.size != v.size or err.size != v.size:
                raise InputError("shots and errors must match the grid length")
            if np.any(shots < 1) or np.any(err < 0):
                raise InputError("shots must be positive and errors non-negative")
            shots.flags.writeable = False
            err.flags.writeable = False
            object.__setattr__(self, "shots", shots)
            object.__setattr__(self, "errors", err)

    @property
    def phases(self) -> np.ndarray:
        return self.grid.phases

    def __len__(self) -> int:
        return self.values.size

    def scaled(self, c: float) -> CoincidenceScan:
        """Rates multiplied by ``c``; errors scale along, shots are kept."""
        errors = None if self.errors is None else self.errors * c
        return CoincidenceScan(self.grid, self.values * c, self.pattern, self.provenance, self.shots, errors)


# ---------------------------------------------------------------------------
# trace engine


def _propagator(injection: str):
    if injection == "full":
        return fock.full_mzi
    if injection == "half":
        return fock.half_mzi
    raise ValueError(f"injection must be 'full' or 'half', got {injection!r}")


def ideal_distribution(state: TwoModeState, injection: str, phi: float) -> np.ndarray:
    """Output photon-number distribution ``p[j, k]`` for ideal detectors."""
    U = _propagator(injection)(phi, state.cutoff)
    return fock.apply(U, state).probabilities()


def _detectors_for(S: int, d1, d2) -> tuple[DetectorModel, DetectorModel]:
    d1 = ideal_detector(S) if d1 is None else d1
    d2 = ideal_detector(S) if d2 is None else d2
    if d1.cutoff < S or d2.cutoff < S:
        raise DimensionError(
            f"detector cutoffs ({d1.cutoff}, {d2.cutoff}) smaller than state cutoff {S}"
        )
    return d1, d2


def coincidence_trace(
    state: TwoModeState,
    injection: str,
    phi: float,
    pattern: CoincidencePattern,
    d1: DetectorModel | None = None,
    d2: DetectorModel | None = None,
) -> float:
    """Probability of the click pattern at phase ``phi`` (``None`` means ideal detector)."""
    if pattern.N > state.cutoff:
        raise DimensionError(f"pattern {pattern} needs cutoff >= {pattern.N}, state has {state.cutoff}")
    d1, d2 = _detectors_for(state.cutoff, d1, d2)
    p = ideal_distribution(state, injection, phi)
    return joint_response(d1, d2, pattern.m, pattern.n, p, state.truncation_tail)


# ---------------------------------------------------------------------------
# analytic coherent-state formulas


def coherent_vacuum_analytic(alpha: complex, phi, pattern: CoincidencePattern):
    """Rate for ``|alpha>|0>`` through the full interferometer, ideal detectors."""
    phi = np.asarray(phi, dtype=float)
    m, n = pattern.m, pattern.n
    a2 = abs(complex(alpha)) ** 2
    return (
        math.exp(-a2)
        / (math.factorial(m) * math.factorial(n))
        * a2 ** (m + n)
        * np.sin(phi / 2) ** (2 * m)
        * np.cos(phi / 2) ** (2 * n)
    )


def _port_intensities(alphas, betas, phi, injection: str = "full"):
    """``|mu|^2`` and ``|nu|^2`` with shape ``(len(alphas), len(phi))``."""
    M = fock.mzi_matrix(np.atleast_1d(phi), injection)  # (P, 2, 2)
    a = np.atleast_1d(np.asarray(alphas, dtype=complex))[:, None]
    b = np.atleast_1d(np.asarray(betas, dtype=complex))[:, None]
    mu = M[None, :, 0, 0] * a + M[None, :, 0, 1] * b
    nu = M[None, :, 1, 0] * a + M[None, :, 1, 1] * b
    return np.abs(mu) ** 2, np.abs(nu) ** 2


def _poisson_product(mu2, nu2, m: int, n: int):
    # Total intensity is conserved, so exp(-(|mu|^2+|nu|^2)) equals exp(-(|a|^2+|b|^2)).
    return np.exp(-(mu2 + nu2)) * mu2**m * nu2**n / (math.factorial(m) * math.factorial(n))


def coherent_pair_analytic(alpha: complex, beta: complex, phi, pattern: CoincidencePattern, injection: str = "full"):
    """Rate for ``|alpha>|beta>``: Poisson product of the output coherent amplitudes."""
    scalar = np.ndim(phi) == 0
    mu2, nu2 = _port_intensities([alpha], [beta], phi, injection)
    out = _poisson_product(mu2[0], nu2[0], pattern.m, pattern.n)
    return float(out[0]) if scalar else out


def mixture_rates(mix: ClassicalMixture, phases, patterns, injection: str = "full") -> np.ndarray:
    """Rates of several patterns at once, shape ``(len(patterns), len(phases))``."""
    mu2, nu2 = _port_intensities(mix.alphas, mix.betas, phases, injection)
    w = mix.weights[:, None]
    return np.array([(w * _poisson_product(mu2, nu2, p.m, p.n)).sum(axis=0) for p in patterns])


def mixture_scan(
    mix: ClassicalMixture,
    grid: PhaseGrid,
    pattern: CoincidencePattern,
    injection: str = "full",
) -> CoincidenceScan:
    values = mixture_rates(mix, grid.phases, [pattern], injection)[0] if len(grid) else np.empty(0)
    return CoincidenceScan(grid, values, pattern, "analytic")


def _mixture_distribution(mix: ClassicalMixture, injection: str, phi: float, S1: int, S2: int):
    mu2, nu2 = _port_intensities(mix.alphas, mix.betas, [phi], injection)
    p = np.zeros((S1 + 1, S2 + 1))
    for w, x, y in zip(mix.weights, mu2[:, 0], nu2[:, 0]):
        p += w * np.outer(stats.poisson.pmf(np.arange(S1 + 1), x), stats.poisson.pmf(np.arange(S2 + 1), y))
    return p, max(0.0, 1.0 - float(p.sum()))


# ---------------------------------------------------------------------------
# drivers


def outcome_distribution(
    source: Source,
    injection: str,
    phi: float,
    d1: DetectorModel | None = None,
    d2: DetectorModel | None = None,
) -> tuple[np.ndarray, float]:
    """Joint distribution of *reported* counts and the unassigned probability.

    Returns ``(q, lost)`` where ``q[m, n]`` is the probability that D1 reports
    ``m`` and D2 reports ``n``, and ``lost = 1 - q.sum()`` is the truncated mass.
    """
    if isinstance(source, TwoModeState):
        d1, d2 = _detectors_for(source.cutoff, d1, d2)
        p = ideal_distribution(source, injection, phi)
        tail = source.truncation_tail
    else:
        if d1 is None or d2 is None:
            S = default_cutoff(float(source.mean_photons.max()))
            d1 = ideal_detector(S) if d1 is None else d1
            d2 = ideal_detector(S) if d2 is None else d2
        p, tail = _mixture_distribution(source, injection, phi, d1.cutoff, d2.cutoff)
    r1 = d1.response[:, : p.shape[0]]
    r2 = d2.response[:, : p.shape[1]]
    q = np.clip(r1 @ p @ r2.T, 0.0, 1.0)
    return q, max(0.0, 1.0 - float(q.sum()))


def scan(
    source: Source,
    grid: PhaseGrid,
    pattern: CoincidencePattern,
    injection: str = "full",
    d1: DetectorModel | None = None,
    d2: DetectorModel | None = None,
) -> CoincidenceScan:
    """Evaluate a coincidence rate at every grid point.

    Pure states go through the trace engine. Classical mixtures use the
    analytic Poisson route, with detector responses applied when given.
    """
    phases = grid.phases
    if isinstance(source, ClassicalMixture):
        if d1 is None and d2 is None:
            return mixture_scan(source, grid, pattern, injection)
        if d1 is None or d2 is None:
            raise InputError("give both detectors or neither")
        values = []
        for phi in phases:
            p, tail = _mixture_distribution(source, injection, phi, d1.cutoff, d2.cutoff)
            values.append(joint_response(d1, d2, pattern.m, pattern.n, p, tail))
        return CoincidenceScan(grid, np.array(values), pattern, "analytic")
    if pattern.N > source.cutoff:
        raise DimensionError(f"pattern {pattern} needs cutoff >= {pattern.N}, state has {source.cutoff}")
    values = [coincidence_trace(source, injection, phi, pattern, d1, d2) for phi in phases]
    return CoincidenceScan(grid, np.array(values, dtype=float), pattern, "trace")

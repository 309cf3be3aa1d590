"""The classical N-fold visibility bound and its numerical verification.

For ``m`` clicks at D1 and ``n`` at D2 the largest N-fold visibility any state
with a positive P function can produce is

    Gamma(m, n) = 2 / | sum_{r=0}^{2n} (-1)^r C(2n, r) C(2m, n+m-r) |,

evaluated here with exact integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import ROUND_DOWN, ROUND_HALF_UP, Decimal
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .coincidence import CoincidencePattern, PhaseGrid, coherent_vacuum_analytic, mixture_rates
from .errors import BoundArithmeticError, DegenerateInputError
from .states import ClassicalMixture, random_classical_mixture
from .visibility import VisibilityEstimate, fourier_projector, visibilities

__all__ = [
    "ClassicalBoundValue",
    "Verdict",
    "CONSISTENT",
    "VIOLATION",
    "INCONCLUSIVE",
    "TABLE_DECIMALS",
    "binomial",
    "classical_bound",
    "bound_table",
    "render_percent",
    "classify",
    "BoundCheckReport",
    "all_patterns",
    "verify_bound_random",
]

CONSISTENT = "classical-consistent"
VIOLATION = "nonclassical-violation"
INCONCLUSIVE = "inconclusive"

# Decimal places of the customary N <= 5 table (percent), keyed by (m, n) with m >= n.
TABLE_DECIMALS = {
    (1, 1): 0, (2, 0): 1,
    (2, 1): 0, (3, 0): 0,
    (2, 2): 1, (3, 1): 0, (4, 0): 2,
    (3, 2): 2, (4, 1): 2, (5, 0): 2,
}


def binomial(a: int, b: int) -> int:
    """``C(a, b)``, zero outside ``0 <= b <= a``."""
    if b < 0 or b > a or a < 0:
        return 0
    return math.comb(a, b)


@dataclass(frozen=True)
class ClassicalBoundValue:
    pattern: CoincidencePattern
    exact: Fraction

    @property
    def numerator(self) -> int:
        return self.exact.numerator

    @property
    def denominator(self) -> int:
        return self.exact.denominator

    def __float__(self) -> float:
        return float(self.exact)

    @property
    def percent(self) -> float:
        return float(self.exact * 100)

    def __str__(self) -> str:
        return f"{self.exact} ({self.percent:.6g}%)"


def _alternating_sum(m: int, n: int) -> int:
    return sum((-1) ** r * binomial(2 * n, r) * binomial(2 * m, n + m - r) for r in range(2 * n + 1))


@lru_cache(maxsize=None)
def _bound(m: int, n: int) -> Fraction:
    if m < 0 or n < 0:
        raise ValueError("photon numbers must be non-negative")
    if m + n == 0:
        raise DegenerateInputError("the bound is undefined for zero photons")
    s = _alternating_sum(m, n)
    if s == 0:
        raise BoundArithmeticError(f"alternating sum vanishes for (m, n) = ({m}, {n})")
    return Fraction(2, abs(s))


def classical_bound(m: int, n: int) -> ClassicalBoundValue:
    return ClassicalBoundValue(CoincidencePattern(m, n), _bound(int(m), int(n)))


def bound_table(N_max: int, N_min: int = 2) -> list[ClassicalBoundValue]:
    """Bounds for ``m >= n`` and ``N_min <= m + n <= N_max``, balanced split first.

    ``(n, m)`` has the same bound as ``(m, n)``. ``N_min`` defaults to 2 since a
    single click has no super-resolution; pass 1 to include ``(1, 0)``.
    """
    if N_max < 1:
        raise ValueError("N_max must be positive")
    rows = []
    for N in range(max(1, N_min), N_max + 1):
        for m in range((N + 1) // 2, N + 1):
            rows.append(classical_bound(m, N - m))
    return rows


def _quantize(value: Fraction, decimals: int, rounding: str) -> str:
    q = Decimal(1).scaleb(-decimals)
    d = Decimal(value.numerator) / Decimal(value.denominator)
    return str(d.quantize(q, rounding=rounding))


def render_percent(bound: ClassicalBoundValue, decimals: int | None = None, *, truncate: bool = False) -> str:
    """Percentage at fixed precision, rounding half away from zero by default.

    With ``decimals=None`` the customary precision is used where known
    and four significant digits otherwise.
    """
    pct = bound.exact * 100
    if decimals is None:
        key = (max(bound.pattern.m, bound.pattern.n), min(bound.pattern.m, bound.pattern.n))
        if key not in TABLE_DECIMALS:
            return f"{float(pct):.4g}"
        decimals = TABLE_DECIMALS[key]
    return _quantize(pct, decimals, ROUND_DOWN if truncate else ROUND_HALF_UP)


@dataclass(frozen=True)
class Verdict:
    pattern: CoincidencePattern
    visibility: float
    sigma: float
    bound: ClassicalBoundValue
    margin: float | None
    label: str
    threshold: float = 3.0


def classify(
    v: VisibilityEstimate,
    threshold: float = 3.0,
    pattern: CoincidencePattern | None = None,
    tol: float = 1e-9,
) -> Verdict:
    """Compare a measured visibility with the classical bound.

    * violation: ``value - k sigma > bound + tol``
    * inconclusive: no violation, yet ``value + k sigma`` still reaches a
      perfect (100%) fringe while the bound is below 1, so the data separate
      neither hypothesis
    * classical-consistent: otherwise
    """
    pattern = pattern or v.pattern
    if pattern is None:
        raise ValueError("a pattern is required to look up the bound")
    b = classical_bound(pattern.m, pattern.n)
    bound = float(b)
    sigma = float(v.uncertainty)
    margin = (v.value - bound) / sigma if sigma > 0 else None
    if v.value - threshold * sigma > bound + tol:
        label = VIOLATION
    elif bound < 1.0 and v.value + threshold * sigma >= 1.0:
        label = INCONCLUSIVE
    else:
        label = CONSISTENT
    return Verdict(pattern, float(v.value), sigma, b, margin, label, threshold)


# ---------------------------------------------------------------------------
# numerical verification over random classical states


def all_patterns(N_max: int) -> list[CoincidencePattern]:
    return [CoincidencePattern(m, N - m) for N in range(1, N_max + 1) for m in range(N + 1)]


@dataclass
class BoundCheckReport:
    """Largest observed visibility/bound ratio per pattern and any counterexamples."""

    trials: int
    n_max: int
    seed: int
    tolerance: float
    max_ratio_pairs: dict = field(default_factory=dict)
    max_ratio_mixtures: dict = field(default_factory=dict)
    saturation_ratio: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    @property
    def max_ratio(self) -> float:
        vals = list(self.max_ratio_pairs.values()) + list(self.max_ratio_mixtures.values())
        return max(vals) if vals else float("nan")


def _trial_seed(seed: int, trial: int, stream: int) -> int:
    return int(np.random.SeedSequence([seed, trial, stream]).generate_state(1)[0])


def verify_bound_random(
    trials: int,
    N_max: int = 5,
    seed: int = 0,
    max_components: int = 8,
    max_amplitude: float = 2.0,
    points: int = 64,
    tolerance: float = 1e-9,
) -> BoundCheckReport:
    """Search random coherent pairs and coherent mixtures for bound violations.

    Every trial draws one coherent pair and one mixture of 1..``max_components``
    coherent pairs, evaluates exact scans for every pattern with ``N <= N_max``
    and fits the N-fold visibility. A ratio above ``1 + tolerance`` is recorded
    as a counterexample together with the full mixture parameters.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if points < 2 * N_max + 2:
        raise ValueError(f"need at least {2 * N_max + 2} grid points")
    grid = PhaseGrid.uniform(points)
    patterns = all_patterns(N_max)
    bounds = np.array([float(classical_bound(p.m, p.n)) for p in patterns])
    report = BoundCheckReport(trials, N_max, seed, tolerance)

    # Coherent light in one port saturates the bound.
    for p, b in zip(patterns, bounds):
        vals = coherent_vacuum_analytic(1.0, grid.phases, p)
        report.saturation_ratio[str(p)] = float(visibilities(grid.phases, vals, p.N) / b)

    # One truncated-series projector per N, shared by all patterns with that N.
    proj = {N: fourier_projector(grid.phases, N) for N in range(1, N_max + 1)}
    rows = [(proj[p.N][0], proj[p.N][2 * p.N - 1], proj[p.N][2 * p.N]) for p in patterns]
    P0 = np.array([r[0] for r in rows])
    Pc = np.array([r[1] for r in rows])
    Ps = np.array([r[2] for r in rows])

    def ratios(mix: ClassicalMixture) -> np.ndarray:
        rates = mixture_rates(mix, grid.phases, patterns)
        a0 = np.einsum("ij,ij->i", P0, rates)
        aN = np.einsum("ij,ij->i", Pc, rates)
        bN = np.einsum("ij,ij->i", Ps, rates)
        return np.hypot(aN, bN) / a0 / bounds

    pair_max = np.zeros(len(patterns))
    mix_max = np.zeros(len(patterns))
    for t in range(trials):
        pair = random_classical_mixture(1, max_amplitude, _trial_seed(seed, t, 0))
        k = 1 + t % max_components
        mix = random_classical_mixture(k, max_amplitude, _trial_seed(seed, t, 1))
        for kind, m, acc in (("coherent-pair", pair, pair_max), ("mixture", mix, mix_max)):
            r = ratios(m)
            np.maximum(acc, r, out=acc)
            for i in np.flatnonzero(r > 1.0 + tolerance):
                report.violations.append(
                    {
                        "kind": kind,
                        "trial": t,
                        "pattern": str(patterns[i]),
                        "ratio": float(r[i]),
                        "weights": m.weights.tolist(),
                        "alphas": [[z.real, z.imag] for z in m.alphas],
                        "betas": [[z.real, z.imag] for z in m.betas],
                    }
                )
    report.max_ratio_pairs = {str(p): float(r) for p, r in zip(patterns, pair_max)}
    report.max_ratio_mixtures = {str(p): float(r) for p, r in zip(patterns, mix_max)}
    return report

"""Finite-shot photocount sampling of coincidence scans.

Each phase point owns its own random stream, derived from ``(seed, point index)``,
so results do not depend on evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coincidence import CoincidencePattern, CoincidenceScan, PhaseGrid, Source, outcome_distribution
from .detector import DetectorModel
from .errors import InputError

__all__ = ["ShotConfig", "point_rng", "binomial_errors", "sample_scan", "sample_outcome_counts", "sample_full_experiment"]


@dataclass(frozen=True)
class ShotConfig:
    shots: int
    seed: int = 0

    def __post_init__(self):
        if int(self.shots) != self.shots or self.shots < 1:
            raise InputError(f"shots must be a positive integer, got {self.shots}")
        if self.seed < 0:
            raise InputError("seed must be non-negative")


def point_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, index])


def binomial_errors(rates: np.ndarray, shots: np.ndarray) -> np.ndarray:
    """Standard error of a binomial rate, with the estimate kept half a count
    away from 0 and 1 so empty points still carry an error."""
    shots = np.asarray(shots, dtype=float)
    p = np.clip(rates, 1.0 / (2.0 * shots), 1.0 - 1.0 / (2.0 * shots))
    return np.sqrt(p * (1.0 - p) / shots)


def sample_scan(ideal: CoincidenceScan, cfg: ShotConfig) -> CoincidenceScan:
    """Binomial counts over ``cfg.shots`` gates at each ideal probability."""
    p = ideal.values
    if np.any(p > 1.0 + 1e-9):
        raise InputError("ideal values must be probabilities in [0, 1]")
    p = np.clip(p, 0.0, 1.0)
    counts = np.array([point_rng(cfg.seed, i).binomial(cfg.shots, pi) for i, pi in enumerate(p)], dtype=np.int64)
    shots = np.full(p.size, cfg.shots, dtype=np.int64)
    rates = counts / cfg.shots
    return CoincidenceScan(ideal.grid, rates, ideal.pattern, "montecarlo", shots, binomial_errors(rates, shots))


def sample_outcome_counts(
    source: Source,
    grid: PhaseGrid,
    cfg: ShotConfig,
    injection: str = "full",
    d1: DetectorModel | None = None,
    d2: DetectorModel | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """One multinomial draw per phase point over all reported ``(m, n)`` outcomes.

    Returns ``(counts, lost)``: ``counts[i, m, n]`` and the number of gates at
    point ``i`` that fell into probability mass discarded by truncation.
    """
    tables, lost = [], []
    for i, phi in enumerate(grid.phases):
        q, tail = outcome_distribution(source, injection, phi, d1, d2)
        probs = np.append(q.ravel(), tail)
        probs = probs / probs.sum()
        draw = point_rng(cfg.seed, i).multinomial(cfg.shots, probs)
        tables.append(draw[:-1].reshape(q.shape))
        lost.append(draw[-1])
    return np.array(tables, dtype=np.int64), np.array(lost, dtype=np.int64)


def sample_full_experiment(
    source: Source,
    patterns: list[CoincidencePattern],
    grid: PhaseGrid,
    cfg: ShotConfig,
    injection: str = "full",
    d1: DetectorModel | None = None,
    d2: DetectorModel | None = None,
) -> list[CoincidenceScan]:
    """Per-pattern scans sliced from a single simulated acquisition, so counts
    are correlated across patterns the way they are in a real run."""
    counts, _ = sample_outcome_counts(source, grid, cfg, injection, d1, d2)
    shots = np.full(len(grid), cfg.shots, dtype=np.int64)
    scans = []
    for pat in patterns:
        if pat.m < counts.shape[1] and pat.n < counts.shape[2]:
            c = counts[:, pat.m, pat.n]
        else:
            c = np.zeros(len(grid), dtype=np.int64)
        rates = c / cfg.shots
        scans.append(CoincidenceScan(grid, rates, pat, "montecarlo", shots, binomial_errors(rates, shots)))
    return scans

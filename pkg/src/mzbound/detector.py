"""Photon-number-resolving detector response models.

All measurement operators considered here are diagonal in the Fock basis, so a
detector is fully described by its response matrix
``R[n, k] = P(report n | k photons incident)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import DimensionError, InputError, ParameterError

__all__ = ["DetectorModel", "ideal_detector", "imperfect_detector", "joint_response"]


@dataclass(frozen=True)
class DetectorModel:
    response: np.ndarray
    efficiency: float = 1.0
    dark_counts: float = 0.0
    crosstalk: float = 0.0

    def __post_init__(self):
        r = np.array(self.response, dtype=float)
        if r.ndim != 2:
            raise DimensionError("response must be a matrix")
        r.flags.writeable = False
        object.__setattr__(self, "response", r)

    @property
    def cutoff(self) -> int:
        """Largest incident photon number covered."""
        return self.response.shape[1] - 1

    @property
    def n_max(self) -> int:
        """Largest reported count; the last row collects every count >= n_max."""
        return self.response.shape[0] - 1

    @property
    def is_ideal(self) -> bool:
        return self.efficiency == 1.0 and self.dark_counts == 0.0 and self.crosstalk == 0.0


def ideal_detector(S: int) -> DetectorModel:
    if S < 0:
        raise ValueError(f"S must be non-negative, got {S}")
    return DetectorModel(np.eye(S + 1))


def _check_params(eta, nu, eps, S, n_max):
    if not 0.0 <= eta <= 1.0:
        raise ParameterError(f"efficiency must lie in [0, 1], got {eta}")
    if not (nu >= 0.0 and np.isfinite(nu)):
        raise ParameterError(f"dark counts must be non-negative, got {nu}")
    if not 0.0 <= eps <= 1.0:
        raise ParameterError(f"cross-talk probability must lie in [0, 1], got {eps}")
    if S < 0 or n_max < 0:
        raise ParameterError("S and n_max must be non-negative")


def _binom_pmf(k: int, p: float) -> np.ndarray:
    # Direct product form; scipy's pmf loses ~1e-14 for vanishing p at small k.
    i = np.arange(k + 1)
    if k > 500:
        return stats.binom.pmf(i, k, p)
    comb = np.array([math.comb(k, r) for r in range(k + 1)], dtype=float)
    return comb * p**i * (1.0 - p) ** (k - i)


def _saturate(p: np.ndarray, n_max: int) -> np.ndarray:
    out = np.zeros(n_max + 1)
    head = min(p.size, n_max)
    out[:head] = p[:head]
    out[n_max] = max(0.0, 1.0 - out[:n_max].sum())
    return out


def imperfect_detector(
    eta: float,
    nu: float,
    eps: float,
    S: int,
    n_max: int | None = None,
) -> DetectorModel:
    """Loss, then dark counts, then cross-talk.

    Loss thins the incident photons binomially with efficiency ``eta``. Dark
    counts add a Poisson(``nu``) number of clicks. Every click after that may
    trigger one extra click with probability ``eps``. Counts at or beyond
    ``n_max`` (default ``S + 1``) land in the saturation row.
    """
    if n_max is None:
        n_max = S + 1
    _check_params(eta, nu, eps, S, n_max)

    # Dark-count pmf with its tail folded into index n_max.
    dark = _saturate(stats.poisson.pmf(np.arange(n_max), nu), n_max)

    # Cross-talk transition: c clicks -> c + Binomial(c, eps), saturated.
    xt = np.zeros((n_max + 1, n_max + 1))
    for c in range(n_max):
        xt[:, c] = _saturate(np.concatenate([np.zeros(c), _binom_pmf(c, eps)]), n_max)
    xt[n_max, n_max] = 1.0

    R = np.zeros((n_max + 1, S + 1))
    for k in range(S + 1):
        kept = _binom_pmf(k, eta)
        # Mass pushed to >= n_max (including the dark tail) ends up saturated.
        after_dark = _saturate(np.convolve(kept, dark[:n_max]), n_max)
        R[:, k] = xt @ after_dark
    return DetectorModel(R, efficiency=eta, dark_counts=nu, crosstalk=eps)


def joint_response(
    d1: DetectorModel,
    d2: DetectorModel,
    m: int,
    n: int,
    p_ideal: np.ndarray,
    tail: float = 0.0,
) -> float:
    """Probability that D1 reports ``m`` and D2 reports ``n``.

    ``p_ideal[j, k]`` is the distribution of incident photons; ``tail`` is any
    probability mass it omits because of truncation.
    """
    p = np.asarray(p_ideal, dtype=float)
    if p.ndim != 2:
        raise InputError("p_ideal must be a matrix indexed by (j, k)")
    if np.any(p < -1e-15):
        raise InputError("p_ideal has negative entries")
    if abs(p.sum() + tail - 1.0) > 1e-9:
        raise InputError(f"p_ideal is not normalized: sum={p.sum()!r}, tail={tail!r}")
    if p.shape[0] > d1.cutoff + 1 or p.shape[1] > d2.cutoff + 1:
        raise DimensionError(
            f"distribution of shape {p.shape} exceeds detector cutoffs ({d1.cutoff}, {d2.cutoff})"
        )
    if m > d1.n_max or n > d2.n_max:
        return 0.0
    r1 = d1.response[m, : p.shape[0]]
    r2 = d2.response[n, : p.shape[1]]
    return float(np.clip(r1 @ p @ r2, 0.0, 1.0))

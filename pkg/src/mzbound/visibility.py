"""Fourier analysis of coincidence scans and N-fold visibilities."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coincidence import CoincidencePattern, CoincidenceScan
from .errors import GridError, IdentifiabilityError, InputError, UndefinedVisibilityError

__all__ = [
    "FourierSeries",
    "VisibilityEstimate",
    "design_matrix",
    "fit_fourier",
    "n_fold_visibility",
    "shift_superimpose",
    "bootstrap_uncertainty",
    "visibilities",
    "fourier_projector",
]

TWO_PI = 2.0 * math.pi
ZERO_AMPLITUDE = 1e-12


def design_matrix(phases, k_max: int) -> np.ndarray:
    """Columns ``1, cos(phi), sin(phi), ..., cos(k_max phi), sin(k_max phi)``."""
    phases = np.asarray(phases, dtype=float)
    k = np.arange(1, k_max + 1)
    arg = np.outer(phases, k)
    X = np.empty((phases.size, 2 * k_max + 1))
    X[:, 0] = 1.0
    X[:, 1::2] = np.cos(arg)
    X[:, 2::2] = np.sin(arg)
    return X


def fourier_projector(phases, k_max: int) -> np.ndarray:
    """Least-squares projector mapping scan values to series coefficients."""
    if k_max < 1:
        raise IdentifiabilityError(f"k_max must be positive, got {k_max}")
    if len(phases) < 2 * k_max + 2:
        raise IdentifiabilityError(
            f"{len(phases)} phase points cannot identify a series up to k={k_max}"
            f" (need at least {2 * k_max + 2})"
        )
    X = design_matrix(phases, k_max)
    if np.linalg.matrix_rank(X) < X.shape[1]:
        raise IdentifiabilityError("design matrix is rank deficient (repeated phases modulo 2 pi?)")
    return np.linalg.pinv(X)


@dataclass(frozen=True)
class FourierSeries:
    """Truncated series ``sum_k A_k cos(k phi - delta_k)``.

    Stored as the linear coefficients ``C = a_0 + sum a_k cos(k phi) + b_k sin(k phi)``,
    with ``covariance`` over ``(a_0, a_1, b_1, a_2, b_2, ...)`` when the scan
    carried per-point errors.
    """

    cos_coeffs: np.ndarray
    sin_coeffs: np.ndarray
    residual: float
    covariance: np.ndarray | None = None

    @property
    def k_max(self) -> int:
        return self.cos_coeffs.size - 1

    @property
    def amplitudes(self) -> np.ndarray:
        return np.hypot(self.cos_coeffs, self.sin_coeffs)

    @property
    def phases(self) -> np.ndarray:
        """``delta_k`` in ``[0, 2 pi)``; zero where the amplitude vanishes."""
        d = np.mod(np.arctan2(self.sin_coeffs, self.cos_coeffs), TWO_PI)
        d[d >= TWO_PI - 1e-12] = 0.0
        d[self.amplitudes < ZERO_AMPLITUDE] = 0.0
        d[0] = 0.0
        return d

    def evaluate(self, phi) -> np.ndarray:
        phi = np.asarray(phi, dtype=float)
        k = np.arange(self.k_max + 1)
        arg = np.multiply.outer(phi, k)
        return np.cos(arg) @ self.cos_coeffs + np.sin(arg) @ self.sin_coeffs

    @classmethod
    def from_amplitudes(cls, amplitudes, phases, residual: float = 0.0) -> FourierSeries:
        A = np.asarray(amplitudes, dtype=float)
        d = np.asarray(phases, dtype=float)
        return cls(A * np.cos(d), A * np.sin(d), residual)


@dataclass(frozen=True)
class VisibilityEstimate:
    pattern: CoincidencePattern | None
    value: float
    uncertainty: float = 0.0
    method: str = "direct-fit"


def _split(coef: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a = np.concatenate([coef[..., :1], coef[..., 1::2]], axis=-1)
    b = np.concatenate([np.zeros_like(coef[..., :1]), coef[..., 2::2]], axis=-1)
    return a, b


def fit_fourier(scan: CoincidenceScan, k_max: int) -> FourierSeries:
    """Unweighted linear least squares in the cosine/sine basis.

    On a uniform grid with at least ``2 k_max + 2`` points the columns are
    orthogonal and the coefficients coincide with the discrete Fourier transform.
    """
    P = fourier_projector(scan.phases, k_max)
    coef = P @ scan.values
    fitted = design_matrix(scan.phases, k_max) @ coef
    residual = float(np.sqrt(np.mean((scan.values - fitted) ** 2)))
    cov = None
    if scan.errors is not None:
        cov = (P * scan.errors**2) @ P.T
    a, b = _split(coef)
    return FourierSeries(a, b, residual, cov)


def n_fold_visibility(
    series: FourierSeries,
    N: int,
    pattern: CoincidencePattern | None = None,
    method: str = "direct-fit",
) -> VisibilityEstimate:
    """``|A_N / A_0|`` with first-order error propagation when a covariance exists."""
    if N < 1 or N > series.k_max:
        raise InputError(f"N={N} outside fitted range 1..{series.k_max}")
    a0 = float(series.cos_coeffs[0])
    if not a0 > 0:
        raise UndefinedVisibilityError(f"mean component is {a0!r}; visibility undefined")
    aN, bN = float(series.cos_coeffs[N]), float(series.sin_coeffs[N])
    AN = math.hypot(aN, bN)
    value = AN / a0
    sigma = 0.0
    if series.covariance is not None:
        idx = [0, 2 * N - 1, 2 * N]
        cov = series.covariance[np.ix_(idx, idx)]
        if AN > 0:
            g = np.array([-value / a0, aN / (AN * a0), bN / (AN * a0)])
            sigma = math.sqrt(max(0.0, float(g @ cov @ g)))
        else:
            # Gradient of |A_N| is undefined at zero; use its RMS scale instead.
            sigma = math.sqrt(max(0.0, cov[1, 1] + cov[2, 2]) / 2.0) / a0
    return VisibilityEstimate(pattern, value, sigma, method)


def shift_superimpose(scan: CoincidenceScan, N: int) -> CoincidenceScan:
    """Average ``N`` copies of the scan shifted by multiples of ``2 pi / N``.

    Every Fourier component whose index is not a multiple of ``N`` cancels
    exactly; multiples of ``N`` pass unchanged. Errors become the RMS of the
    contributing errors, which keeps independent-point propagation through a
    later fit exact for the surviving harmonics. Shot counts are carried over.
    """
    if N < 1:
        raise GridError("N must be positive")
    M = len(scan)
    if not scan.grid.is_uniform:
        raise GridError("shift-and-superimpose needs a uniform grid over one period")
    if M % N:
        raise GridError(f"{M} grid points are not divisible by N={N}")
    step = M // N
    idx = (np.arange(M)[:, None] + step * np.arange(N)[None, :]) % M
    values = scan.values[idx].mean(axis=1)
    errors = None
    if scan.errors is not None:
        errors = np.sqrt(np.mean(scan.errors[idx] ** 2, axis=1))
    return CoincidenceScan(scan.grid, values, scan.pattern, scan.provenance, scan.shots, errors)


def visibilities(phases, values: np.ndarray, N: int, k_max: int | None = None) -> np.ndarray:
    """N-fold visibilities of many scans sharing one grid (rows of ``values``)."""
    k_max = N if k_max is None else k_max
    P = fourier_projector(phases, k_max)
    coef = np.asarray(values, dtype=float) @ P.T
    return np.hypot(coef[..., 2 * N - 1], coef[..., 2 * N]) / coef[..., 0]


def bootstrap_uncertainty(
    scan: CoincidenceScan,
    N: int,
    resamples: int = 1000,
    seed: int = 0,
    k_max: int | None = None,
    superimpose: bool = False,
) -> VisibilityEstimate:
    """Parametric Poisson bootstrap of the N-fold visibility.

    Each point's count is redrawn from a Poisson law with the observed mean
    ``rate * shots``; the scan is refitted (after shift-and-superimpose if
    requested) and the spread of the refitted visibilities is the uncertainty.
    """
    if scan.shots is None:
        raise InputError("bootstrap needs shot counts per point")
    if resamples < 2:
        raise InputError("need at least two resamples")
    k_max = N if k_max is None else k_max
    method = "shift-superimpose" if superimpose else "direct-fit"
    base = shift_superimpose(scan, N) if superimpose else scan
    value = n_fold_visibility(fit_fourier(base, k_max), N, scan.pattern, method).value

    rng = np.random.default_rng(seed)
    shots = scan.shots.astype(float)
    counts = rng.poisson(scan.values * shots, size=(resamples, len(scan)))
    rates = counts / shots
    if superimpose:
        M = len(scan)
        idx = (np.arange(M)[:, None] + (M // N) * np.arange(N)[None, :]) % M
        rates = rates[:, idx].mean(axis=2)
    vis = visibilities(scan.phases, rates, N, k_max)
    return VisibilityEstimate(scan.pattern, value, float(np.std(vis, ddof=1)), method)

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mzbound.coincidence import CoincidencePattern, CoincidenceScan, PhaseGrid, scan
from mzbound.errors import GridError, IdentifiabilityError, InputError, UndefinedVisibilityError
from mzbound.montecarlo import ShotConfig, sample_scan
from mzbound.states import ClassicalMixture, noon_state
from mzbound.visibility import (
    FourierSeries,
    bootstrap_uncertainty,
    fit_fourier,
    n_fold_visibility,
    shift_superimpose,
    visibilities,
)

from oracles import dft_amplitudes


def make_scan(values, pattern=(1, 0), grid=None, **kw):
    values = np.asarray(values, dtype=float)
    grid = grid or PhaseGrid.uniform(values.size)
    return CoincidenceScan(grid, values, CoincidencePattern(*pattern), **kw)


class TestFit:
    def test_single_harmonic(self):
        g = PhaseGrid.uniform(32)
        s = make_scan(1 + 0.5 * np.cos(3 * g.phases - 0.7), grid=g)
        f = fit_fourier(s, 4)
        np.testing.assert_allclose(f.amplitudes, [1, 0, 0, 0.5, 0], atol=1e-12)
        assert f.phases[3] == pytest.approx(0.7, abs=1e-12)
        assert f.phases[1] == 0.0
        assert f.residual < 1e-14

    def test_constant_scan(self):
        f = fit_fourier(make_scan(np.full(16, 0.25)), 3)
        assert f.amplitudes[0] == pytest.approx(0.25)
        assert np.all(f.amplitudes[1:] < 1e-15)
        assert n_fold_visibility(f, 3).value < 1e-14

    def test_matches_fft(self):
        rng = np.random.default_rng(2)
        v = rng.random(24)
        A, delta = dft_amplitudes(v, 5)
        f = fit_fourier(make_scan(v), 5)
        np.testing.assert_allclose(f.amplitudes, A, atol=1e-13)
        big = A > 1e-10
        d = np.angle(np.exp(1j * (f.phases[big] - delta[big])))
        np.testing.assert_allclose(d, 0, atol=1e-10)

    def test_nonuniform_grid_recovers_exact_series(self):
        rng = np.random.default_rng(8)
        phis = np.sort(rng.uniform(0, 2 * math.pi, 20))
        truth = FourierSeries.from_amplitudes([2.0, 0.3, 0.1], [0, 1.0, 2.5])
        f = fit_fourier(make_scan(truth.evaluate(phis), grid=PhaseGrid(phis)), 2)
        np.testing.assert_allclose(f.amplitudes, truth.amplitudes, atol=1e-12)

    def test_too_few_points(self):
        with pytest.raises(IdentifiabilityError):
            fit_fourier(make_scan(np.ones(7)), 3)

    def test_rank_deficient(self):
        phis = np.array([0.0, 0.1, 2 * math.pi, 2 * math.pi + 0.1, 4 * math.pi, 4 * math.pi + 0.1])
        with pytest.raises(IdentifiabilityError):
            fit_fourier(make_scan(np.ones(6), grid=PhaseGrid(phis)), 2)

    @settings(max_examples=30)
    @given(st.floats(0.01, 100), st.floats(0, 2 * math.pi), st.integers(1, 4))
    def test_visibility_invariant_to_scale_and_phase(self, c, shift, N):
        g = PhaseGrid.uniform(40)
        base = 1 + 0.4 * np.cos(N * g.phases - 1.0) + 0.2 * np.cos(g.phases)
        moved = c * (1 + 0.4 * np.cos(N * (g.phases - shift) - 1.0) + 0.2 * np.cos(g.phases - shift))
        v1 = n_fold_visibility(fit_fourier(make_scan(base, grid=g), 4), N).value
        v2 = n_fold_visibility(fit_fourier(make_scan(moved, grid=g), 4), N).value
        assert v1 == pytest.approx(v2, abs=1e-12)

    def test_zero_mean_is_undefined(self):
        f = fit_fourier(make_scan(np.zeros(8)), 2)
        with pytest.raises(UndefinedVisibilityError):
            n_fold_visibility(f, 1)

    def test_error_propagation_matches_monte_carlo(self):
        g = PhaseGrid.uniform(24)
        truth = 0.4 + 0.2 * np.cos(2 * g.phases)
        err = np.full(24, 0.01)
        rng = np.random.default_rng(0)
        draws = truth + err * rng.standard_normal((4000, 24))
        vis = visibilities(g.phases, draws, 2)
        est = n_fold_visibility(fit_fourier(make_scan(truth, grid=g, shots=np.ones(24), errors=err), 2), 2)
        assert est.uncertainty == pytest.approx(np.std(vis), rel=0.05)


class TestShiftSuperimpose:
    def test_keeps_multiples_and_removes_the_rest(self):
        g = PhaseGrid.uniform(60)
        v = 1 + 0.3 * np.cos(g.phases) + 0.2 * np.cos(2 * g.phases) + 0.1 * np.cos(3 * g.phases - 0.4)
        out = shift_superimpose(make_scan(v, grid=g), 3)
        f = fit_fourier(out, 4)
        assert f.amplitudes[3] == pytest.approx(0.1, abs=1e-12)
        assert f.amplitudes[0] == pytest.approx(1.0, abs=1e-12)
        assert max(f.amplitudes[1], f.amplitudes[2], f.amplitudes[4]) < 1e-12

    def test_fixed_point(self):
        g = PhaseGrid.uniform(30)
        s = make_scan(2 + np.cos(3 * g.phases), grid=g)
        np.testing.assert_allclose(shift_superimpose(s, 3).values, s.values, atol=1e-15)

    def test_bad_grids(self):
        with pytest.raises(GridError):
            shift_superimpose(make_scan(np.ones(10)), 3)
        with pytest.raises(GridError):
            shift_superimpose(make_scan(np.ones(3), grid=PhaseGrid([0.0, 1.0, 1.5])), 3)

    def test_errors_combine_as_rms(self):
        g = PhaseGrid.uniform(4)
        s = make_scan(np.ones(4), grid=g, shots=np.full(4, 10), errors=[0.1, 0.1, 0.2, 0.2])
        out = shift_superimpose(s, 2)
        np.testing.assert_allclose(out.errors, math.sqrt((0.01 + 0.04) / 2))


class TestBootstrap:
    def scan(self, shots):
        g = PhaseGrid.uniform(16)
        ideal = scan(ClassicalMixture.single(1.0), g, CoincidencePattern(1, 1))
        return sample_scan(ideal, ShotConfig(shots, seed=3))

    def test_deterministic(self):
        s = self.scan(10_000)
        a = bootstrap_uncertainty(s, 2, 200, seed=5)
        b = bootstrap_uncertainty(s, 2, 200, seed=5)
        assert a == b

    def test_sigma_scales_with_shots(self):
        lo = bootstrap_uncertainty(self.scan(10_000), 2, 400, seed=1).uncertainty
        hi = bootstrap_uncertainty(self.scan(1_000_000), 2, 400, seed=1).uncertainty
        assert lo / hi == pytest.approx(10, rel=0.25)

    def test_needs_shots_and_resamples(self):
        with pytest.raises(InputError):
            bootstrap_uncertainty(make_scan(np.ones(8)), 1)
        with pytest.raises(InputError):
            bootstrap_uncertainty(self.scan(100), 2, resamples=1)


class TestWorkedExamples:
    def test_noon_one_full_visibility(self):
        s = scan(noon_state(1), PhaseGrid.uniform(8), CoincidencePattern(1, 0), "half")
        assert n_fold_visibility(fit_fourier(s, 1), 1).value == pytest.approx(1.0, abs=1e-12)

    def test_coherent_five_zero(self):
        s = scan(ClassicalMixture.single(1.0), PhaseGrid.uniform(64), CoincidencePattern(5, 0))
        assert n_fold_visibility(fit_fourier(s, 5), 5).value == pytest.approx(1 / 126, abs=1e-12)


@pytest.mark.parametrize("m,n", [(m, N - m) for N in range(1, 6) for m in range(N + 1)])
def test_coherent_fringe_offset_follows_parity_of_m(m, n):
    s = scan(ClassicalMixture.single(1.0), PhaseGrid.uniform(64), CoincidencePattern(m, n))
    delta = fit_fourier(s, m + n).phases[m + n]
    assert delta == pytest.approx(math.pi * (m % 2), abs=1e-9)

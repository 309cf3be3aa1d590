"""End-to-end acceptance checks, one test per criterion.

Each test records a single PASS/FAIL line that is printed in the terminal
summary, then asserts the same condition.
"""

import math
import time

import numpy as np

from mzbound import fock
from mzbound.bound import CONSISTENT, classical_bound, classify, render_percent, verify_bound_random
from mzbound.coincidence import (
    CoincidencePattern,
    PhaseGrid,
    coherent_pair_analytic,
    coherent_vacuum_analytic,
    coincidence_trace,
    scan,
)
from mzbound.detector import imperfect_detector
from mzbound.montecarlo import ShotConfig, sample_scan
from mzbound.states import ClassicalMixture, coherent_product, default_cutoff, fock_pair, noon_state
from mzbound.visibility import bootstrap_uncertainty, fit_fourier, n_fold_visibility, shift_superimpose

PATTERNS = [CoincidencePattern(m, N - m) for N in range(1, 6) for m in range(N + 1)]

REFERENCE_TABLE = [
    ((1, 1), "100", (1, 1)), ((2, 0), "33.3", (1, 3)),
    ((2, 1), "50", (1, 2)), ((3, 0), "10", (1, 10)),
    ((2, 2), "33.3", (1, 3)), ((3, 1), "20", (1, 5)), ((4, 0), "2.85", (1, 35)),
    ((3, 2), "16.67", (1, 6)), ((4, 1), "7.14", (1, 14)), ((5, 0), "0.79", (1, 126)),
]


def visibility_of(s, N, k_max=None):
    return n_fold_visibility(fit_fourier(s, k_max or N), N).value


def test_criterion_1_bound_table(record):
    t0 = time.perf_counter()
    exact_ok, rules = True, []
    for (m, n), printed, (num, den) in REFERENCE_TABLE:
        b = classical_bound(m, n)
        exact_ok &= (b.numerator, b.denominator) == (num, den)
        if render_percent(b) == printed:
            rules.append("round")
        elif render_percent(b, truncate=True) == printed:
            rules.append(f"truncate@({m},{n})")
        else:
            rules.append(f"MISMATCH@({m},{n}):{render_percent(b)}")
    elapsed = time.perf_counter() - t0
    ok = exact_ok and not any(r.startswith("MISMATCH") for r in rules) and elapsed < 1.0
    odd = [r for r in rules if r != "round"]
    record(1, ok, f"10 exact rationals {'match' if exact_ok else 'DIFFER'}; "
                  f"printed precision by rounding except {odd or 'none'}; {elapsed:.3f}s")
    assert ok


def test_criterion_2_bound_saturation(record):
    t0 = time.perf_counter()
    grid = PhaseGrid.uniform(64)
    source = ClassicalMixture.single(1.0)
    worst = 0.0
    for p in PATTERNS:
        v = visibility_of(scan(source, grid, p), p.N)
        worst = max(worst, abs(v - float(classical_bound(p.m, p.n))))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-6 and elapsed < 5.0
    record(2, ok, f"coherent|0> visibility - bound, max {worst:.1e} over {len(PATTERNS)} patterns; {elapsed:.2f}s")
    assert ok


def test_criterion_3_classical_domination(record):
    t0 = time.perf_counter()
    rep = verify_bound_random(1000, N_max=5, seed=0)
    elapsed = time.perf_counter() - t0
    ok = rep.passed and rep.max_ratio <= 1 + 1e-9 and elapsed < 60.0
    record(3, ok, f"1000 pairs + 1000 mixtures (1-8 components): max visibility/bound "
                  f"{max(rep.max_ratio_pairs.values()):.9f} (pairs), "
                  f"{max(rep.max_ratio_mixtures.values()):.9f} (mixtures); {elapsed:.2f}s")
    assert ok


def test_criterion_4_noon_super_resolution(record):
    t0 = time.perf_counter()
    grid = PhaseGrid.uniform(64)
    worst, dominant_ok = 0.0, True
    for p in PATTERNS:
        s = scan(noon_state(p.N), grid, p, "half")
        f = fit_fourier(s, 2 * p.N + 2)
        worst = max(worst, abs(n_fold_visibility(f, p.N).value - 1.0))
        dominant_ok &= int(np.argmax(f.amplitudes[1:])) + 1 == p.N
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-9 and dominant_ok and elapsed < 5.0
    record(4, ok, f"NOON visibility |V-1| max {worst:.1e}; dominant harmonic "
                  f"{'= N' if dominant_ok else '!= N'} for all; {elapsed:.2f}s")
    assert ok


def test_criterion_5_oracle_equivalence(record):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst = 0.0
    for i in range(100):
        phi = rng.uniform(0, 2 * math.pi)
        p = PATTERNS[int(rng.integers(len(PATTERNS)))]
        if i % 2:
            a = float(rng.uniform(0.2, 1.5))
            ref = coherent_vacuum_analytic(a, phi, p)
            got = coincidence_trace(coherent_product(a, 0), "full", phi, p)
        else:
            a, b = (complex(*rng.uniform(-1, 1, 2)) for _ in range(2))
            inj = "full" if i % 4 else "half"
            ref = coherent_pair_analytic(a, b, phi, p, inj)
            got = coincidence_trace(coherent_product(a, b), inj, phi, p)
        worst = max(worst, abs(float(ref) - got))
    single = 0.0
    for phi in rng.uniform(-10, 10, 50):
        pr = fock.apply(fock.full_mzi(phi, 1), fock_pair(1, 0)).probabilities()
        single = max(single, abs(pr[1, 0] - math.sin(phi / 2) ** 2), abs(pr[0, 1] - math.cos(phi / 2) ** 2))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-9 and single < 1e-10 and elapsed < 10.0
    record(5, ok, f"trace vs closed forms max {worst:.1e} (100 configs); "
                  f"single photon vs sin^2/cos^2 max {single:.1e}; {elapsed:.2f}s")
    assert ok


def test_criterion_6_shift_superimpose(record):
    t0 = time.perf_counter()
    grid = PhaseGrid.uniform(60)
    rng = np.random.default_rng(6)
    kept, leak = 0.0, 0.0
    for p in PATTERNS:
        a, b = (complex(*rng.uniform(-1, 1, 2)) for _ in range(2))
        s = scan(ClassicalMixture.single(a, b), grid, p)
        before = fit_fourier(s, 12).amplitudes
        after = fit_fourier(shift_superimpose(s, p.N), 12).amplitudes
        kept = max(kept, abs(after[p.N] - before[p.N]), abs(after[0] - before[0]))
        others = [k for k in range(1, 13) if k % p.N]
        if others:
            leak = max(leak, float(np.max(after[others])))
    elapsed = time.perf_counter() - t0
    ok = kept < 1e-9 and leak < 1e-9 and elapsed < 2.0
    record(6, ok, f"A_N change max {kept:.1e}; surviving non-multiples max {leak:.1e}; {elapsed:.2f}s")
    assert ok


def test_criterion_7_imperfections(record):
    t0 = time.perf_counter()
    grid = PhaseGrid.uniform(64)
    d = imperfect_detector(0.6, 0.01, 0.02, 3)
    noon = [visibility_of(scan(noon_state(3), grid, CoincidencePattern(m, 3 - m), "half", d, d), 3) for m in range(4)]

    source = ClassicalMixture.single(1.0)
    S = default_cutoff(1.0)
    lossy = imperfect_detector(0.7, 0.0, 0.0, S)
    drift = max(
        abs(visibility_of(scan(source, grid, p, "full", lossy, lossy), p.N) - visibility_of(scan(source, grid, p), p.N))
        for p in PATTERNS
    )
    elapsed = time.perf_counter() - t0
    ok = max(noon) < 1.0 and drift < 1e-6 and elapsed < 5.0
    record(7, ok, f"NOON3 with detector noise: V = {', '.join(f'{v:.4f}' for v in noon)}; "
                  f"coherent under pure loss |dV| max {drift:.1e}; {elapsed:.2f}s")
    assert ok


def test_criterion_8_statistical_pipeline(record):
    t0 = time.perf_counter()
    p = CoincidencePattern(1, 1)
    ideal = scan(ClassicalMixture.single(1.0), PhaseGrid.uniform(64), p)
    data = sample_scan(ideal, ShotConfig(1_000_000, seed=8))
    est = bootstrap_uncertainty(data, 2, resamples=1000, seed=8)
    verdict = classify(est)
    elapsed = time.perf_counter() - t0
    within = abs(est.value - 1.0) <= 3 * est.uncertainty
    ok = within and verdict.label == CONSISTENT and elapsed < 30.0
    record(8, ok, f"(1,1) at 1e6 shots: V = {est.value:.5f} +/- {est.uncertainty:.5f}, "
                  f"verdict {verdict.label}; {elapsed:.2f}s")
    assert ok


def test_criterion_9_not_reproduced(record):
    record(9, None, "measured visibilities need hardware detail that is not available; covered by criteria 2, 3 and 7")

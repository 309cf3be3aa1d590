"""Command-line interface.

Exit codes: 0 success, 1 computation or verification failure, 2 usage or
input error. All phases are in radians.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, bound, fock
from .coincidence import (
    CoincidencePattern,
    PhaseGrid,
    coherent_pair_analytic,
    coherent_vacuum_analytic,
    coincidence_trace,
    scan,
)
from .detector import imperfect_detector
from .errors import DimensionError, InputError, MzboundError
from .files import read_report, read_scan, write_report, write_scan
from .montecarlo import ShotConfig, sample_scan
from .states import ClassicalMixture, coherent_product, default_cutoff, noon_state
from .visibility import FourierSeries, bootstrap_uncertainty, fit_fourier, n_fold_visibility, shift_superimpose


class UsageError(InputError):
    pass


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise UsageError(f"not a complex number: {text!r}") from None


# ---------------------------------------------------------------------------
# bound


def _bound_row(b: bound.ClassicalBoundValue) -> dict:
    return {
        "N": b.pattern.N,
        "m": b.pattern.m,
        "n": b.pattern.n,
        "numerator": b.numerator,
        "denominator": b.denominator,
        "float": float(b),
        "percent": b.percent,
        "table_percent": bound.render_percent(b),
    }


def cmd_bound(args) -> int:
    if args.table is not None:
        if args.mn:
            raise UsageError("give either 'm n' or --table, not both")
        if args.table < 1:
            raise UsageError("--table needs N_max >= 1")
        rows = [_bound_row(b) for b in bound.bound_table(args.table)]
    else:
        if len(args.mn) != 2:
            raise UsageError("expected two photon numbers 'm n' or --table N_max")
        m, n = args.mn
        if m < 0 or n < 0:
            raise UsageError("photon numbers must be non-negative")
        if m + n == 0:
            raise UsageError("the bound is undefined for m = n = 0")
        b = bound.classical_bound(m, n)
        if args.format == "text":
            print(f"{b.exact} ({b.percent:.6g}%)")
            return 0
        rows = [_bound_row(b)]

    if args.format == "json":
        print(json.dumps(rows, indent=2))
    elif args.format == "csv":
        keys = list(rows[0])
        print(",".join(keys))
        for r in rows:
            print(",".join(str(r[k]) for k in keys))
    else:
        print(f"{'N':>3} {'m':>3} {'n':>3}  {'exact':>12}  {'percent':>12}  {'table':>8}")
        for r in rows:
            exact = f"{r['numerator']}/{r['denominator']}"
            print(f"{r['N']:>3} {r['m']:>3} {r['n']:>3}  {exact:>12}  {r['percent']:>12.6g}  {r['table_percent']:>8}")
    return 0


# ---------------------------------------------------------------------------
# simulate


def _amplitude(value) -> complex:
    # [re, im] pairs or plain numbers
    return complex(*value) if isinstance(value, list) else complex(value)


def _load_mixture(path: str) -> ClassicalMixture:
    try:
        data = json.loads(Path(path).read_text())
        comps = data["components"] if isinstance(data, dict) else data
        w = [float(c["weight"]) for c in comps]
        a = [_amplitude(c["alpha"]) for c in comps]
        b = [_amplitude(c.get("beta", 0)) for c in comps]
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read mixture file {path!r}: {exc}") from None
    return ClassicalMixture(w, a, b)


def _build_source(spec: list[str]):
    kind, rest = spec[0], spec[1:]
    if kind == "coherent" and len(rest) == 1:
        return ClassicalMixture.single(_complex(rest[0])), f"coherent alpha={rest[0]}"
    if kind == "coherent-pair" and len(rest) == 2:
        return ClassicalMixture.single(_complex(rest[0]), _complex(rest[1])), f"coherent-pair alpha={rest[0]} beta={rest[1]}"
    if kind == "noon" and len(rest) == 1:
        try:
            N = int(rest[0])
        except ValueError:
            raise UsageError(f"NOON photon number must be an integer, got {rest[0]!r}") from None
        if N < 1:
            raise UsageError("NOON photon number must be >= 1")
        return noon_state(N), f"noon N={N}"
    if kind == "mixture" and len(rest) == 1:
        return _load_mixture(rest[0]), f"mixture file={rest[0]}"
    raise UsageError(
        "--source must be one of: 'coherent A', 'coherent-pair A B', 'noon N', 'mixture FILE'"
    )


def cmd_simulate(args) -> int:
    m, n = args.pattern
    if m < 0 or n < 0:
        raise UsageError("pattern counts must be non-negative")
    pattern = CoincidencePattern(m, n)
    if args.points < 2 * pattern.N + 2:
        raise UsageError(f"--points must be at least {2 * pattern.N + 2} for pattern ({m},{n})")
    if args.shots is not None and args.shots < 1:
        raise UsageError("--shots must be positive")
    if args.seed < 0:
        raise UsageError("--seed must be non-negative")
    if not (0 <= args.eta <= 1 and args.dark >= 0 and 0 <= args.crosstalk <= 1):
        raise UsageError("detector parameters out of range (eta, crosstalk in [0,1]; dark >= 0)")

    source, description = _build_source(args.source)
    ideal_det = args.eta == 1.0 and args.dark == 0.0 and args.crosstalk == 0.0
    if isinstance(source, ClassicalMixture):
        S = args.cutoff if args.cutoff is not None else default_cutoff(float(source.mean_photons.max()))
    else:
        S = source.cutoff if args.cutoff is None else args.cutoff
        if S < source.cutoff:
            raise DimensionError(f"--cutoff {S} is below the state's photon number {source.cutoff}")
        source = source.padded(S)
    d1 = d2 = None
    if not ideal_det:
        d1 = d2 = imperfect_detector(args.eta, args.dark, args.crosstalk, S, args.n_max)

    grid = PhaseGrid.uniform(args.points)
    result = scan(source, grid, pattern, args.injection, d1, d2)
    if args.shots is not None:
        result = sample_scan(result, ShotConfig(args.shots, args.seed))

    meta = {
        "source": description,
        "injection": args.injection,
        "eta": args.eta,
        "dark": args.dark,
        "crosstalk": args.crosstalk,
        "cutoff": S,
        "points": args.points,
        "shots": args.shots if args.shots is not None else "none",
        "seed": args.seed,
        "tool": f"mzbound {__version__}",
    }
    write_scan(args.out, result, meta)
    return 0


# ---------------------------------------------------------------------------
# analyze


def analyze_scan(
    sf,
    n_fold: int | None = None,
    k_max: int | None = None,
    superimpose: bool = False,
    bootstrap: int | None = None,
    seed: int = 0,
    threshold: float = 3.0,
    input_path: str | None = None,
) -> dict:
    """Fit, estimate the visibility and compare it with the bound; returns the report."""
    data = sf.scan
    pattern = data.pattern
    pattern.require_photons()
    N = pattern.N if n_fold is None else n_fold
    k_max = N if k_max is None else k_max
    if k_max < N:
        raise UsageError(f"--k-max {k_max} is below the fold {N}")
    method = "shift-superimpose" if superimpose else "direct-fit"
    fitted_scan = shift_superimpose(data, N) if superimpose else data
    series = fit_fourier(fitted_scan, k_max)
    est = n_fold_visibility(series, N, pattern, method)
    sigma_method = "propagated" if data.errors is not None else "none"
    if bootstrap is not None:
        est = bootstrap_uncertainty(data, N, bootstrap, seed, k_max, superimpose)
        sigma_method = f"poisson-bootstrap({bootstrap})"
    verdict = bound.classify(est, threshold)
    b = verdict.bound
    return {
        "tool": "mzbound",
        "version": __version__,
        "input": input_path,
        "pattern": {"m": pattern.m, "n": pattern.n},
        "fit": {
            "k_max": k_max,
            "A_k": [float(x) for x in series.amplitudes],
            "delta_k": [float(x) for x in series.phases],
            "residual": series.residual,
            "least_squares": "unweighted",
            "superimposed": superimpose,
        },
        "visibility": {
            "value": est.value,
            "sigma": est.uncertainty,
            "method": est.method,
            "sigma_method": sigma_method,
            "n_fold": N,
        },
        "bound": {"numerator": b.numerator, "denominator": b.denominator, "float": float(b)},
        "verdict": {"label": verdict.label, "margin": verdict.margin, "threshold": threshold},
        "provenance": sf.metadata.get("provenance", data.provenance),
    }


def cmd_analyze(args) -> int:
    if args.bootstrap is not None and args.bootstrap < 2:
        raise UsageError("--bootstrap needs at least 2 resamples")
    sf = read_scan(args.scan)
    report = analyze_scan(
        sf, args.n_fold, args.k_max, args.superimpose, args.bootstrap, args.seed, args.threshold, str(args.scan)
    )
    if args.out:
        write_report(args.out, report)
    v, b = report["visibility"], report["bound"]
    p = report["pattern"]
    print(
        f"pattern ({p['m']},{p['n']}): {v['n_fold']}-fold visibility {v['value']:.6f} +/- {v['sigma']:.2g}"
        f" vs classical bound {b['numerator']}/{b['denominator']} ({100 * b['float']:.4g}%)"
        f" -> {report['verdict']['label']}"
    )
    return 0


# ---------------------------------------------------------------------------
# verify


def _check(name: str, ok: bool, detail: str, results: list) -> None:
    results.append((name, ok, detail))
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")


def run_battery(trials: int, n_max: int, seed: int) -> tuple[bool, dict]:
    results: list = []
    rng = np.random.default_rng(seed)

    rep = bound.verify_bound_random(trials, n_max, seed)
    _check(
        "classical domination",
        rep.passed,
        f"{2 * trials} random classical states, max visibility/bound = {rep.max_ratio:.9f}",
        results,
    )
    sat = max(abs(r - 1.0) for r in rep.saturation_ratio.values())
    _check("coherent-vacuum saturation", sat < 1e-6, f"max |ratio - 1| = {sat:.2e}", results)

    st = coherent_product(1.0, 0.0)
    err = 0.0
    for N in range(1, n_max + 1):
        for m in range(N + 1):
            pat = CoincidencePattern(m, N - m)
            for phi in rng.uniform(0, 2 * math.pi, 20):
                err = max(err, abs(coincidence_trace(st, "full", phi, pat) - coherent_vacuum_analytic(1.0, phi, pat)))
    _check("trace vs coherent-vacuum formula", err < 1e-10, f"max deviation {err:.2e}", results)

    err = 0.0
    for _ in range(min(trials, 100)):
        a, b = (rng.uniform(-1, 1, 2) @ [1, 1j] for _ in range(2))
        phi = rng.uniform(0, 2 * math.pi)
        N = int(rng.integers(1, min(n_max, 3) + 1))
        m = int(rng.integers(0, N + 1))
        pat = CoincidencePattern(m, N - m)
        err = max(err, abs(coincidence_trace(coherent_product(a, b), "full", phi, pat) - coherent_pair_analytic(a, b, phi, pat)))
    _check("trace vs coherent-pair formula", err < 1e-9, f"max deviation {err:.2e}", results)

    err = max(fock.full_mzi(phi, 30).unitarity_error() for phi in rng.uniform(0, 2 * math.pi, 5))
    err = max(err, fock.beam_splitter(30).unitarity_error())
    _check("block unitarity", err < 1e-12, f"max |U'U - I| = {err:.2e}", results)

    print()
    print(f"{'pattern':>8} {'bound':>10} {'saturation':>12} {'max pair':>12} {'max mixture':>12}")
    for key, s in rep.saturation_ratio.items():
        m, n = (int(x) for x in key.strip("()").split(","))
        print(
            f"{key:>8} {float(bound.classical_bound(m, n)):>10.6f} {s:>12.6f}"
            f" {rep.max_ratio_pairs[key]:>12.6f} {rep.max_ratio_mixtures[key]:>12.6f}"
        )
    ok = all(r[1] for r in results)
    return ok, {"checks": results, "violations": rep.violations}


def cmd_verify(args) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    if args.n_max < 1:
        raise UsageError("--n-max must be at least 1")
    if args.seed < 0:
        raise UsageError("--seed must be non-negative")
    ok, details = run_battery(args.trials, args.n_max, args.seed)
    if not ok:
        print("counterexamples:")
        print(json.dumps(details["violations"], indent=2))
        return 1
    return 0


# ---------------------------------------------------------------------------
# plotdata


def _write_columns(path: Path, header: list[str], rows) -> None:
    lines = ["\t".join(header)]
    lines += ["\t".join(repr(float(x)) if isinstance(x, float) else str(x) for x in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")
    print(f"wrote {path}")


def cmd_plotdata(args) -> int:
    prefix = args.out
    Path(prefix).parent.mkdir(parents=True, exist_ok=True)

    rows = []
    for N in range(1, args.bound_n_max + 1):
        balanced = float(bound.classical_bound(N - N // 2, N // 2))
        lopsided = float(bound.classical_bound(N, 0))
        rows.append((N, balanced, lopsided))
    _write_columns(Path(f"{prefix}_bound_curve.tsv"), ["N", "gamma_balanced", "gamma_lopsided"], rows)

    scans = [Path(f) for f in args.files if not f.endswith(".json")]
    reports = [(Path(f), read_report(f)) for f in args.files if f.endswith(".json")]
    covered = set()
    bars = []
    for path, rep in reports:
        p, v, b = rep["pattern"], rep["visibility"], rep["bound"]
        bars.append((p["m"], p["n"], float(v["value"]), float(v["sigma"]), float(b["float"])))
        src = rep.get("input")
        if src and Path(src).exists():
            sf = read_scan(src)
            series = FourierSeries.from_amplitudes(rep["fit"]["A_k"], rep["fit"]["delta_k"])
            rows = zip(sf.scan.phases.tolist(), sf.scan.values.tolist(), series.evaluate(sf.scan.phases).tolist())
            _write_columns(Path(f"{prefix}_overlay_{path.stem}.tsv"), ["phi", "measured", "fitted"], rows)
            covered.add(Path(src).resolve())
    for path in scans:
        if path.resolve() in covered:
            continue
        sf = read_scan(path)
        series = fit_fourier(sf.scan, sf.pattern.N)
        rows = zip(sf.scan.phases.tolist(), sf.scan.values.tolist(), series.evaluate(sf.scan.phases).tolist())
        _write_columns(Path(f"{prefix}_overlay_{path.stem}.tsv"), ["phi", "measured", "fitted"], rows)
    if bars:
        _write_columns(Path(f"{prefix}_bars.tsv"), ["m", "n", "visibility", "sigma", "bound"], bars)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mzbound",
        description="Mach-Zehnder coincidence simulator and classical super-resolution bound. Phases in radians.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", help="classical N-fold visibility bound")
    p.add_argument("mn", nargs="*", type=int, metavar="M N", help="clicks at D1 and D2")
    p.add_argument("--table", type=int, metavar="N_MAX", help="all patterns with 2 <= m+n <= N_MAX")
    p.add_argument("--format", choices=("text", "csv", "json"), default="text")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("simulate", help="write a coincidence scan file")
    p.add_argument(
        "--source",
        nargs="+",
        required=True,
        metavar="SPEC",
        help="'coherent A' | 'coherent-pair A B' | 'noon N' | 'mixture FILE' (amplitudes as Python complex literals)",
    )
    p.add_argument("--injection", choices=("full", "half"), default="full",
                   help="full: inject before the first splitter; half: state prepared inside the interferometer")
    p.add_argument("--pattern", nargs=2, type=int, required=True, metavar=("M", "N"))
    p.add_argument("--points", type=int, default=64, help="uniform phase points over [0, 2 pi)")
    p.add_argument("--eta", type=float, default=1.0, help="detector efficiency")
    p.add_argument("--dark", type=float, default=0.0, help="mean dark counts per gate")
    p.add_argument("--crosstalk", type=float, default=0.0, help="cross-talk probability per click")
    p.add_argument("--n-max", type=int, default=None, help="largest resolved count (saturation row)")
    p.add_argument("--cutoff", type=int, default=None, help="photon-number cutoff")
    p.add_argument("--shots", type=int, default=None, help="gates per phase point (Monte Carlo)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="fit a scan file and compare with the bound")
    p.add_argument("scan")
    p.add_argument("--n-fold", type=int, default=None, help="fold N (default m+n)")
    p.add_argument("--k-max", type=int, default=None, help="series truncation (default N)")
    p.add_argument("--superimpose", action="store_true", help="shift-and-superimpose before fitting")
    p.add_argument("--bootstrap", type=int, default=None, metavar="R", help="Poisson bootstrap resamples")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threshold", type=float, default=3.0, help="decision threshold in sigma")
    p.add_argument("--out", default=None, help="JSON report path")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("verify", help="numerical verification battery")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--n-max", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("plotdata", help="columnar data for external plotting")
    p.add_argument("files", nargs="*", help="scan CSV and report JSON files")
    p.add_argument("--out", required=True, help="output prefix")
    p.add_argument("--bound-n-max", type=int, default=10)
    p.set_defaults(func=cmd_plotdata)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"mzbound {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except MzboundError as exc:
        print(f"mzbound {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

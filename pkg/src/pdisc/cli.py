"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 contract violation (bad field, grid
too large, malformed file, ...), 3 rate target not reachable.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import analysis as A
from . import io as pio
from .geometry import Domain
from .grid import GridSizeError
from .radius import FieldContractError, make_field
from .rate import AccelerationSpec, UnreachableRate, rate_search
from .sampler import ALGORITHMS, PatternMeta, SamplePattern, generate_anisotropic

EXIT_OK, EXIT_USAGE, EXIT_CONTRACT, EXIT_UNREACHABLE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def positive(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from None
    if not v > 0 or not np.isfinite(v):
        raise argparse.ArgumentTypeError(f"must be a positive number, got {text}")
    return v


def positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return v


def seed_type(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be in [0, 2**64)")
    return v


def nu_type(text: str) -> tuple[float, ...]:
    try:
        nu = tuple(float(v) for v in text.replace("x", ",").split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad anisotropy {text!r}; expected e.g. 3,1") from None
    if any(not v >= 1 for v in nu):
        raise argparse.ArgumentTypeError(f"anisotropy factors must be >= 1, got {text}")
    return nu


def sizes_type(text: str) -> tuple[int, ...]:
    try:
        return pio.parse_sizes(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _field_args(p):
    p.add_argument("--field", choices=("parametric", "constant"), default="parametric")
    p.add_argument("--offset", type=float, default=0.15, help="parametric offset (default 0.15)")
    p.add_argument("--value", type=positive, help="constant-field radius at gamma=1")
    p.add_argument("--k", type=positive_int, help="candidates per active point (10 in 2-D, else 30)")


def _dims_args(ndim, nu, matrix):
    """Reconcile --dims, --nu and --matrix into consistent tuples."""
    if nu is not None:
        ndim = ndim or len(nu)
    if matrix is not None:
        ndim = ndim or len(matrix)
    ndim = ndim or 2
    nu = nu or (1.0,) * ndim
    matrix = matrix or (256,) * ndim
    if len(matrix) == 1:
        matrix = matrix * ndim
    if len(nu) != ndim or len(matrix) != ndim:
        raise UsageError(f"--dims {ndim}, --nu {nu} and --matrix {matrix} disagree on the dimension")
    return ndim, nu, matrix


def build_parser() -> Parser:
    ap = Parser(prog="pdisc", description="Variable-density Poisson-disc sampling masks.")
    ap.add_argument("--version", action="version", version=f"pdisc {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate one pattern and its mask")
    g.add_argument("--gamma", type=positive, default=150.0)
    _field_args(g)
    g.add_argument("--seed", type=seed_type, default=0)
    g.add_argument("--dims", type=positive_int)
    g.add_argument("--nu", type=nu_type, help="per-axis extra undersampling, e.g. 1,3")
    g.add_argument("--algo", choices=ALGORITHMS, default="fast")
    g.add_argument("--rule", choices=("min", "candidate"), default="min")
    g.add_argument("--matrix", type=sizes_type, help="mask size, e.g. 256x256")
    g.add_argument("--calib", type=sizes_type, help="fully sampled center block, e.g. 24x24")
    g.add_argument("--calib-shape", choices=("rect", "ellipse"), default="rect")
    g.add_argument("--out", default="pattern", help="output path stem")
    g.add_argument("--format", choices=("csv", "pbm", "json"), default="csv")
    g.add_argument("--plot", help="also save a scatter plot here")

    r = sub.add_parser("rate", help="bisect gamma to hit a target acceleration")
    r.add_argument("--alpha", type=positive, required=True)
    r.add_argument("--tol", type=positive, default=0.01, help="stop when the gamma half-interval is <= tol")
    r.add_argument("--rate-tol", type=positive, help="also stop once |rate - alpha| <= this")
    r.add_argument("--matrix", type=sizes_type, default=(256, 256))
    r.add_argument("--nu", type=nu_type)
    r.add_argument("--seed", type=seed_type, default=0)
    r.add_argument("--offset", type=float, default=0.15)
    r.add_argument("--k", type=positive_int)
    r.add_argument("--gamma-min", type=float, default=0.0)
    r.add_argument("--gamma-max", type=positive)
    r.add_argument("--bounds", choices=("r_min", "r_max"), default="r_max",
                   help="rule for the default gamma_max (default r_max)")
    r.add_argument("--fresh-seeds", action="store_true", help="new seed at every step")
    r.add_argument("--best-effort", action="store_true", help="return the closest pattern if unreachable")
    r.add_argument("--spread", type=int, default=0, help="extra seeds to measure rate spread at the end")
    r.add_argument("--calib", type=sizes_type)
    r.add_argument("--calib-shape", choices=("rect", "ellipse"), default="rect")
    r.add_argument("--algo", choices=("fast", "tulleken"), default="fast")
    r.add_argument("--out", default="rate")
    r.add_argument("--format", choices=("csv", "pbm", "json"), default="pbm")
    r.add_argument("--plot")

    a = sub.add_parser("analyze", help="validate and measure a saved pattern")
    a.add_argument("input", help="points CSV or JSON written by generate")
    a.add_argument("--voronoi", action="store_true", help="write voronoi.csv")
    a.add_argument("--coverage", action="store_true", help="write coverage.csv")
    a.add_argument("--res", type=positive_int, default=A.DEFAULT_RES)
    a.add_argument("--bins", type=positive_int, default=A.DEFAULT_BINS)
    a.add_argument("--probes", type=positive_int, default=10_000)
    a.add_argument("--probe-seed", type=seed_type, default=0)
    a.add_argument("--matrix", type=sizes_type)
    a.add_argument("--offset", type=float, help="override the offset from the sidecar")
    a.add_argument("--out-dir", default=None)
    a.add_argument("--plot")

    b = sub.add_parser("bench", help="fast vs. Tulleken timing")
    b.add_argument("--reps", type=int, default=11)
    b.add_argument("--warmups", type=int, default=3)
    b.add_argument("--grid-of-configs", action="store_true",
                   help="all gamma in 50..150 and nu in (3,1),(1,1),(1,3)")
    b.add_argument("--gamma", type=positive, action="append", help="repeatable; default 150")
    b.add_argument("--nu", type=nu_type, action="append", help="repeatable; default 1,1")
    b.add_argument("--k", type=positive_int)
    b.add_argument("--out", default="bench.csv")
    b.add_argument("--plot")

    c = sub.add_parser("compare", help="Voronoi profiles of fast vs. Tulleken (and dart)")
    c.add_argument("--gamma", type=positive, default=150.0)
    c.add_argument("--offset", type=float, default=0.15)
    c.add_argument("--nu", type=nu_type, default=(1.0, 1.0))
    c.add_argument("--k", type=positive_int)
    c.add_argument("--seeds", type=positive_int, default=10)
    c.add_argument("--res", type=positive_int, default=A.DEFAULT_RES)
    c.add_argument("--bins", type=positive_int, default=A.DEFAULT_BINS)
    c.add_argument("--no-dart", action="store_true", help="skip the O(N^2) dart-throwing run (slow at high gamma)")
    c.add_argument("--dart-failures", type=positive_int, default=1000)
    c.add_argument("--out-dir", default=".")
    c.add_argument("--plot")
    return ap


# -- commands -----------------------------------------------------------------

def _field_from(args, gamma):
    if args.field == "constant" and args.value is None:
        raise UsageError("--field constant needs --value")
    return make_field(args.field, gamma, args.offset, args.value)


def _write_pattern(pat, out: str, fmt: str, mask, extra=None):
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt == "csv":
        written.append(pio.write_points_csv(pat, out.with_suffix(".csv")))
    elif fmt == "json":
        written.append(pio.write_points_json(pat, out.with_suffix(".json")))
    elif mask.occupancy.ndim == 2:
        written.append(pio.write_mask_pbm(mask, out.with_suffix(".pbm")))
    else:
        written.append(pio.write_mask_csv(mask, out.with_suffix(".mask.csv")))
    written.append(pio.write_sidecar(pat, out.with_suffix(".meta.json"), mask, extra))
    written.append(pio.write_timing(pat, out.with_suffix(".timing.json")))
    return written


def cmd_generate(args) -> int:
    ndim, nu, matrix = _dims_args(args.dims, args.nu, args.matrix)
    if args.calib is not None and len(args.calib) != ndim:
        raise UsageError(f"--calib needs {ndim} sizes")
    field = _field_from(args, args.gamma)
    pat = generate_anisotropic(field, nu, args.k, Domain.cube(ndim), args.seed, args.algo, args.rule)
    mask = pio.rasterize_mask(pat, matrix, args.calib, args.calib_shape)
    extra = {"calibration": list(args.calib) if args.calib else None, "calibration_shape": args.calib_shape}
    files = _write_pattern(pat, args.out, args.format, mask, extra)
    print(f"{pat.meta.algorithm}: {len(pat)} points, {mask.occupied} cells, "
          f"rate {np.prod(matrix) / mask.occupied:.4f}, {pat.meta.wall_time * 1e3:.1f} ms")
    if args.plot:
        from .plotting import plot_pattern
        files.append(plot_pattern(pat, args.plot))
    for f in files:
        print(f"wrote {f}")
    return EXIT_OK


def cmd_rate(args) -> int:
    ndim, nu, matrix = _dims_args(None, args.nu, args.matrix)
    spec = AccelerationSpec(args.alpha, matrix, args.gamma_min, args.gamma_max, args.tol, args.rate_tol)
    field = make_field("parametric", 1.0, args.offset)
    try:
        res = rate_search(spec, field, nu, args.k, args.seed, args.fresh_seeds, args.best_effort,
                          args.bounds, args.calib, args.algo, args.spread)
    except UnreachableRate as exc:
        print(f"unreachable: {exc}", file=sys.stderr)
        return EXIT_UNREACHABLE
    print(f"{'it':>3} {'gamma_min':>11} {'gamma_max':>11} {'gamma':>11} {'rate':>9} {'points':>7}")
    for s in res.log:
        print(f"{s.iteration:3d} {s.gamma_min:11.5f} {s.gamma_max:11.5f} {s.gamma:11.5f} "
              f"{s.rate:9.4f} {s.points:7d}")
    if not res.reached:
        print(f"target {args.alpha:g} not reachable, returning closest end (rate {res.rate:.4f})")
    print(f"gamma {res.gamma:.6g}: rate {res.rate:.4f} (target {args.alpha:g}, "
          f"error {res.relative_error * 100:.2f}%)" +
          (f", spread {res.rate_std:.4f}" if res.rate_std is not None else ""))
    extra = {"target_rate": args.alpha, "tol": args.tol, "rate_tol": args.rate_tol,
             "fresh_seeds": args.fresh_seeds, "reached": res.reached, "iterations": len(res.log),
             "calibration": list(args.calib) if args.calib else None,
             "calibration_shape": args.calib_shape, "rate_std": res.rate_std}
    files = _write_pattern(res.pattern, args.out, args.format, res.mask, extra)
    trace = Path(args.out).with_suffix(".trace.csv")
    with open(trace, "w") as fh:
        fh.write("iteration,gamma_min,gamma_max,eps,gamma,seed,rate,point_rate,points,occupied\n")
        for s in res.log:
            fh.write(f"{s.iteration},{s.gamma_min!r},{s.gamma_max!r},{s.eps!r},{s.gamma!r},{s.seed},"
                     f"{s.rate!r},{s.point_rate!r},{s.points},{s.occupied}\n")
    files.append(trace)
    if args.plot:
        from .plotting import plot_rate_trace
        files.append(plot_rate_trace(res, args.plot))
    for f in files:
        print(f"wrote {f}")
    return EXIT_OK


def load_pattern(path, offset: float | None = None) -> tuple[SamplePattern, dict]:
    """Rebuild a pattern from a points file plus its sidecar, if present."""
    path = Path(path)
    if path.suffix == ".json":
        pts, head = pio.read_points_json(path)
        side = dict(head)
        gamma, nu, seed = head["gamma"], tuple(head["nu"]), head["seed"]
    else:
        pts, head = pio.read_points_csv(path)
        gamma, nu, seed = head["gamma"], head["nu"], head["seed"]
        sc = path.with_suffix(".meta.json")
        side = json.loads(sc.read_text()) if sc.exists() else {}
    fdesc = side.get("field", {"family": "parametric", "gamma": gamma, "offset": 0.15})
    if offset is not None:
        fdesc = {**fdesc, "offset": offset}
    if gamma is None:
        raise pio.FormatError("file does not record gamma")
    field = make_field(fdesc.get("family", "parametric"), gamma, fdesc.get("offset", 0.15), fdesc.get("value"))
    ndim = pts.shape[1] if pts.size else len(nu)
    dom = Domain.cube(ndim)
    gen = pts / np.asarray(nu)
    radii = field.evaluate_many(gen) if len(gen) else np.empty(0)
    meta = PatternMeta(side.get("algorithm", "file"), seed, side.get("k"), field.describe(), tuple(nu),
                       side.get("rule", "min"))
    return SamplePattern(pts, radii, dom, meta), side


def cmd_analyze(args) -> int:
    pat, side = load_pattern(args.input, args.offset)
    field = make_field(pat.meta.field["family"], pat.meta.field["gamma"], pat.meta.field.get("offset", 0.15),
                       pat.meta.field.get("value"))
    matrix = args.matrix or tuple(side.get("matrix") or (256,) * pat.ndim)
    calib = side.get("calibration") if args.matrix is None else None
    ok, pair = A.audit(pat, field)
    print(f"points: {len(pat)}")
    print(f"valid: {ok}" + ("" if ok else f" (first violating pair {pair})"))
    if len(pat):
        mask = pio.rasterize_mask(pat, matrix, calib, side.get("calibration_shape", "rect"))
        print(f"occupied cells: {mask.occupied} of {np.prod(matrix)}")
        print(f"acceleration rate: {float(np.prod(matrix)) / mask.occupied!r}")
    if len(pat) >= 2:
        nn = A.nn_stats(pat, field)
        print(f"nn ratio: min {nn.min_ratio:.4f}, mean {nn.mean_ratio:.4f}")
    out_dir = Path(args.out_dir) if args.out_dir else Path(args.input).parent
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.voronoi:
        prof = A.voronoi_areas(pat, args.res)
        print(f"voronoi: total area {prof.total_area:.6f} of {prof.domain_area:.6f}")
        print(f"wrote {A.write_voronoi_csv(prof, out_dir / 'voronoi.csv')}")
        if args.plot:
            from .plotting import plot_voronoi_profiles
            print(f"wrote {plot_voronoi_profiles({pat.meta.algorithm: prof}, args.plot)}")
    if args.coverage:
        cov = A.coverage_fraction(pat, field, args.probes, args.probe_seed)
        print(f"coverage: r {cov.fraction_r:.4f}, 2r {cov.fraction_2r:.4f}")
        print(f"wrote {A.write_coverage_csv(cov, out_dir / 'coverage.csv')}")
    return EXIT_OK


def cmd_bench(args) -> int:
    from .bench import TABLE_GAMMAS, TABLE_NUS, run_bench, write_bench_csv

    if args.reps < 5 or args.warmups < 2:
        raise UsageError("bench needs --reps >= 5 and --warmups >= 2")
    if args.grid_of_configs:
        gammas, nus = TABLE_GAMMAS, TABLE_NUS
    else:
        gammas, nus = args.gamma or [150.0], args.nu or [(1.0, 1.0)]

    def show(recs):
        f, t = recs
        print(f"gamma {f.gamma:6g} nu {'x'.join(f'{v:g}' for v in f.nu):>4}: fast {f.median * 1e3:8.2f} ms  "
              f"tulleken {t.median * 1e3:8.2f} ms  speedup {t.median / f.median:.3f}", flush=True)

    rep = run_bench(gammas, nus, args.reps, args.warmups, k=args.k, progress=show)
    print(f"mean speedup {rep.mean_speedup():.3f}")
    print(f"wrote {write_bench_csv(rep, args.out)}")
    if args.plot:
        from .plotting import plot_bench
        print(f"wrote {plot_bench(rep, args.plot)}")
    return EXIT_OK


def cmd_compare(args) -> int:
    from .sampler import dart_throwing

    field = make_field("parametric", args.gamma, args.offset)
    dom = Domain.cube(len(args.nu))
    profs = {"fast": [], "tulleken": []}
    # same seeds would give identical patterns (both conflict tests are exact),
    # so the baseline draws from a disjoint seed range
    for s in range(args.seeds):
        for j, alg in enumerate(profs):
            pat = generate_anisotropic(field, args.nu, args.k, dom, s + j * args.seeds, alg)
            profs[alg].append(A.voronoi_areas(pat, args.res))
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    pairs = [("fast", "tulleken")]
    if not args.no_dart:
        gdom = dom.shrunk(args.nu)
        d = dart_throwing(field, gdom, 0, args.dart_failures)
        d.points = d.points * np.asarray(args.nu)
        d.domain, d.meta.nu = dom, tuple(args.nu)
        profs["dart"] = [A.voronoi_areas(d, args.res)]
        pairs.append(("fast", "dart"))
    for a, b in pairs:
        cmp = A.profile_similarity(profs[a], profs[b], args.bins)
        print(f"{a} vs {b}: max per-bin relative median difference {cmp.max_rel_diff:.4f} "
              f"({int((~cmp.empty).sum())} of {args.bins} bins non-empty)")
        print(f"wrote {A.write_similarity_csv(cmp, out / f'similarity_{a}_{b}.csv', (a, b))}")
    if args.plot:
        from .plotting import plot_voronoi_profiles
        print(f"wrote {plot_voronoi_profiles(profs, args.plot)}")
    return EXIT_OK


COMMANDS = {"generate": cmd_generate, "rate": cmd_rate, "analyze": cmd_analyze,
            "bench": cmd_bench, "compare": cmd_compare}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"pdisc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FieldContractError, GridSizeError, pio.FormatError, OverflowError, ValueError, RuntimeError) as exc:
        print(f"pdisc: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONTRACT


if __name__ == "__main__":
    sys.exit(main())

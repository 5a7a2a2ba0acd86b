"""Command line: ``spheregrf simulate | variogram | benchmark``.

Exit status is 0 on success, 2 on invalid input and 1 on runtime failure.
Angles given on the command line are in degrees.
"""

from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
import time
from pathlib import Path

from . import circulant, fieldio, reference, stcirculant
from . import variogram as vg
from .covmodels import SpaceTimeModel, SpatialModel, model_from_spec, parse_model_spec
from .errors import CapExceeded, FieldFormatError, NotPositiveDefinite, ValidationError
from .grid import SphereGrid, TimeGrid
from .rng import STREAM_NAME

log = logging.getLogger("spheregrf")

PARAM_FLAGS = ("sill", "phi0", "phi1", "alpha", "beta", "phi2", "nu",
               "delta", "tau", "c0", "c1")
TABLE1_GRIDS = "18x6,40x13,60x20,120x40,360x180"
DENSE_JITTER = 1e-8


class Usage(Exception):
    """Invalid command line (exit status 2)."""


def _add_model_flags(p, required=True):
    g = p.add_argument_group("covariance model")
    g.add_argument("--model", help="exp, gcauchy, matern, st-exp, st-cauchy or st")
    g.add_argument("--model-file", type=Path,
                   help="text file of key=value pairs (keys as the flags, plus model, gkind)")
    for name in PARAM_FLAGS:
        g.add_argument(f"--{name}", type=float)
    g.add_argument("--gkind", choices=("exp", "cauchy"),
                   help="temporal correlation of the st model")


def model_from_args(args, required=True):
    spec = {}
    if args.model_file is not None:
        try:
            spec.update(parse_model_spec(args.model_file.read_text()))
        except OSError as exc:
            raise Usage(f"cannot read model file {args.model_file}: {exc}") from None
    for key in ("model", "gkind", *PARAM_FLAGS):
        value = getattr(args, key, None)
        if value is not None:
            spec[key] = value
    if "model" not in spec:
        if required:
            raise Usage("a model is required (--model or --model-file)")
        return None
    return model_from_spec(spec)


def _grid_args(p, spacetime=True):
    p.add_argument("--N", type=int, required=True, help="number of longitudes")
    p.add_argument("--M", type=int, required=True, help="number of colatitudes")
    if spacetime:
        p.add_argument("--T", type=int, help="number of time steps (space-time models)")
        p.add_argument("--H", type=float, help="time horizon (default T, unit step)")
        p.add_argument("--kappa", type=int, default=1, help="time embedding padding factor")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spheregrf", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="sample fields with the circulant method")
    _grid_args(p)
    _add_model_flags(p)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--out", type=Path, default=Path("fields"), help="output directory")
    p.add_argument("--format", choices=("bin", "csv"), default="bin")
    p.add_argument("--clip-tol", type=float, default=1e-12)

    p = sub.add_parser("variogram", help="estimate variograms of field files")
    p.add_argument("files", nargs="+", type=Path)
    _add_model_flags(p)
    p.add_argument("--nbins", type=int, default=vg.DEFAULT_NBINS)
    p.add_argument("--bandwidth-deg", type=float, help="spatial half-width (default 90/nbins)")
    p.add_argument("--H", type=float, help="time horizon of space-time files (default T)")
    p.add_argument("--out", type=Path, required=True, help="CSV of the mean estimate")
    p.add_argument("--per-replicate", type=Path, help="directory for one CSV per input file")
    p.add_argument("--plot", type=Path, help="figure of replicates, mean and model")
    p.add_argument("--point-cap", type=int, default=vg.DEFAULT_POINT_CAP)

    p = sub.add_parser("benchmark", help="time circulant vs dense factor+sample")
    p.add_argument("--grids", default=TABLE1_GRIDS, help="comma list of NxM")
    p.add_argument("--methods", default="circulant,cholesky,eigen")
    _add_model_flags(p)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--count", type=int, default=1, help="fields sampled per timing")
    p.add_argument("--mem-cap-gib", type=float, default=2.0,
                   help="dense methods refuse matrices larger than this")
    p.add_argument("--out", type=Path, help="CSV timing table")
    p.add_argument("--plot", type=Path, help="timing figure")
    return parser


# -- simulate ----------------------------------------------------------------

def cmd_simulate(args) -> int:
    model = model_from_args(args)
    grid = SphereGrid(args.N, args.M)
    if args.count < 1:
        raise Usage("--count must be >= 1")
    start = time.perf_counter()
    tgrid = None
    if isinstance(model, SpaceTimeModel):
        if args.T is None:
            raise Usage("space-time models need --T")
        tgrid = TimeGrid(args.T, args.H if args.H is not None else float(args.T))
        cfg = stcirculant.EmbeddingConfig(args.kappa, tgrid.T)
        spectral = stcirculant.factorize_st(grid, tgrid, cfg, model, args.clip_tol)
        fields = stcirculant.sample_spheretime(spectral, grid, tgrid, cfg, args.seed, args.count)
    else:
        if args.T is not None:
            raise Usage("--T only applies to space-time models")
        spectral = circulant.factorize(grid, model, args.clip_tol)
        fields = circulant.sample_sphere(spectral, args.seed, args.count)
    elapsed = time.perf_counter() - start

    args.out.mkdir(parents=True, exist_ok=True)
    paths = []
    for f in fields:
        if args.format == "bin":
            path = args.out / f"field_{f.index:04d}.sgrf"
            fieldio.write_binary(path, f)
        else:
            path = args.out / f"field_{f.index:04d}.csv"
            fieldio.write_csv(path, f, grid, tgrid)
        paths.append(path)
    print(f"wrote {len(paths)} field(s) of {fields[0].values.size} values to {args.out} "
          f"[stream {STREAM_NAME}, seed {args.seed}]")
    print(spectral.clip_report.summary())
    print(f"wall time {elapsed:.3f} s")
    return 0


# -- variogram ---------------------------------------------------------------

def cmd_variogram(args) -> int:
    model = model_from_args(args, required=False)
    fields = [fieldio.read_binary(path, k) for k, path in enumerate(args.files)]
    first = fields[0]
    if any(f.values.shape != first.values.shape for f in fields):
        raise Usage("all field files must share one grid")
    if args.nbins < 1:
        raise Usage("--nbins must be >= 1")
    half = math.radians(args.bandwidth_deg) if args.bandwidth_deg else math.pi / (2 * args.nbins)
    if first.is_spacetime:
        T, N, M = first.values.shape
        grid = SphereGrid(N, M)
        tgrid = TimeGrid(T, args.H if args.H is not None else float(T))
        centres, _ = vg.default_st_theta_bins(args.nbins)
        est = vg.empirical_st_variogram(fields, grid, tgrid, theta_centers=centres,
                                        bandwidth=half, point_cap=args.point_cap)
        if model is not None and not isinstance(model, SpaceTimeModel):
            raise Usage("space-time fields need a space-time model for the truth column")
    else:
        N, M = first.values.shape
        grid = SphereGrid(N, M)
        centres, _ = vg.default_theta_bins(args.nbins)
        est = vg.empirical_variogram(fields, grid, centres, half, point_cap=args.point_cap)
        if model is not None and not isinstance(model, SpatialModel):
            raise Usage("spatial fields need a spatial model for the truth column")

    truth = None if model is None else vg.truth(model, est)
    vg.write_csv(args.out, est.mean(), truth)
    if args.per_replicate is not None:
        args.per_replicate.mkdir(parents=True, exist_ok=True)
        for k, path in enumerate(args.files):
            vg.write_csv(args.per_replicate / f"{path.stem}_variogram.csv", est.replicate(k),
                         truth)
    if args.plot is not None:
        from .plotting import variogram_figure
        variogram_figure(args.plot, est, model, title=f"{len(fields)} field(s)")
    print(f"wrote {est.theta.size} bins from {len(fields)} field(s) to {args.out}")
    return 0


# -- benchmark ---------------------------------------------------------------

def _parse_grids(text):
    grids = []
    for item in text.split(","):
        try:
            n, m = item.lower().split("x")
            grids.append((int(n), int(m)))
        except ValueError:
            raise Usage(f"bad grid {item!r}; expected NxM") from None
    return grids


def time_circulant(grid, model, seed, count=1):
    """Seconds for DFT + block square roots + sampling (block row assembly excluded)."""
    row = circulant.assemble_block_row(grid, model)
    start = time.perf_counter()
    spectral = circulant.sqrt_blocks(circulant.block_diagonalize(row))
    circulant.sample_sphere(spectral, seed, count)
    return time.perf_counter() - start


def time_dense(grid, model, method, seed, count=1, max_bytes=2 * 2**30):
    """Seconds for dense factor + sampling (covariance assembly excluded).

    The triangular factor gets ``DENSE_JITTER * sill`` on the diagonal: the
    repeated south pole makes the grid covariance singular.
    """
    cov = reference.assemble_dense(grid, model, cap=None, max_bytes=max_bytes)
    jitter = DENSE_JITTER * model.sill if method == "triangular" else 0.0
    start = time.perf_counter()
    factor = reference.dense_factor(cov, method, jitter=jitter)
    reference.dense_sample(factor, seed, count)
    return time.perf_counter() - start


DENSE_METHODS = {"cholesky": "triangular", "eigen": "eigen"}


def run_benchmark(grids, methods, model, seed=1, count=1, max_bytes=2 * 2**30):
    rows = []
    for N, M in grids:
        grid = SphereGrid(N, M)
        row = {"N": N, "M": M, "n": grid.size}
        for method in methods:
            try:
                if method == "circulant":
                    row[method] = time_circulant(grid, model, seed, count)
                else:
                    row[method] = time_dense(grid, model, DENSE_METHODS[method], seed, count,
                                             max_bytes)
            except (CapExceeded, MemoryError, NotPositiveDefinite) as exc:
                log.info("%s refused on %dx%d: %s", method, N, M, exc)
                row[method] = None
        rows.append(row)
    return rows


def format_table(rows, methods):
    head = ["grid"] + list(methods)
    lines = [head]
    for r in rows:
        lines.append([f"N={r['N']}, M={r['M']}"]
                     + ["--" if r[m] is None else f"{r[m]:.3f}" for m in methods])
    widths = [max(len(line[i]) for line in lines) for i in range(len(head))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(line, widths)) for line in lines)


def cmd_benchmark(args) -> int:
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    bad = [m for m in methods if m not in ("circulant", *DENSE_METHODS)]
    if bad:
        raise Usage(f"unknown method(s) {', '.join(bad)}")
    model = model_from_args(args, required=False) or SpatialModel("exp", {"phi0": 0.5243})
    if not isinstance(model, SpatialModel):
        raise Usage("benchmark needs a spatial model")
    grids = _parse_grids(args.grids)
    rows = run_benchmark(grids, methods, model, args.seed, args.count,
                         int(args.mem_cap_gib * 2**30))
    print(format_table(rows, methods))
    if args.out is not None:
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["N", "M", "n", *methods])
            for r in rows:
                writer.writerow([r["N"], r["M"], r["n"],
                                 *["--" if r[m] is None else f"{r[m]:.6f}" for m in methods]])
    if args.plot is not None:
        from .plotting import benchmark_figure
        benchmark_figure(args.plot, rows, methods)
    return 0


COMMANDS = {"simulate": cmd_simulate, "variogram": cmd_variogram, "benchmark": cmd_benchmark}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (Usage, ValidationError, FieldFormatError) as exc:
        print(f"spheregrf {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"spheregrf {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

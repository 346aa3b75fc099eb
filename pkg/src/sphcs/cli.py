"""Command-line front end.

    sphcs tables      Delta matrices / transform blocks for a band limit
    sphcs synth       write coefficients of a preset or a random sparse set
    sphcs measure     sample coefficients on a grid, with optional noise
    sphcs recover     QCBP recovery from a measurement file
    sphcs experiment  run one of the numerical studies

Exit status: 0 on success, 1 on bad arguments or unreadable input, 2 when
the solver does not converge.
"""
import argparse
from dataclasses import replace
import json
import sys

import numpy as np

from . import io
from .experiments import EXPERIMENTS, ExperimentSpec, run_experiment
from .fields import PRESETS, preset, random_sparse_coefficients
from .grid import build_grid, physical_map, select_rows
from .operator import field_peak, noise_std_from_db, simulate
from .recovery import constraint_radius, recover_field
from .solver import SolverConfig
from .transform import a_to_b, build_subspace_transform
from .wigner import delta_matrix

EXIT_OK, EXIT_ARGS, EXIT_SOLVER = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ARGS, f"{self.prog}: error: {message}\n")


def _common(p, rows=False):
    p.add_argument("--nmax", type=int, default=15, help="band limit (default 15)")
    p.add_argument("--oversample", type=int, default=1, help="grid oversampling factor q")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--preset", default="C1a", help=f"one of {', '.join(PRESETS)}")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    if rows:
        p.add_argument("--rows", type=int, help="number of grid rows to sample")
        p.add_argument("--density", type=float, help="fraction of grid rows to sample")
        p.add_argument("--noise-db", type=float, help="noise std in dB relative to field peak")


def build_parser():
    ap = _Parser(prog="sphcs", description="Grid-based compressive sensing of Wigner D / SH series.")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    p = sub.add_parser("tables", help="print Delta matrices or a transform block")
    _common(p)
    p.add_argument("--block", nargs=2, type=int, metavar=("M", "MU"), help="print B^{m mu} instead")

    p = sub.add_parser("synth", help="write Wigner coefficients")
    _common(p)
    p.add_argument("--sparsity", type=int, help="random s_D-sparse set instead of a preset")
    p.add_argument("--dims", type=int, choices=(2, 3), default=2)
    p.add_argument("--fourier-out", help="also write the Fourier coefficients here")

    p = sub.add_parser("measure", help="sample a coefficient set on a grid")
    _common(p, rows=True)
    p.add_argument("--coeffs", help="coefficient file (default: the preset)")
    p.add_argument("--dims", type=int, choices=(2, 3), help="grid dimension (default: 2 for mu = 0 series, else 3)")
    p.add_argument("--independent-noise", action="store_true", help="fresh noise for every torus row")
    p.add_argument("--selection-out", help="write the selected rows and angles here")

    p = sub.add_parser("recover", help="recover coefficients from a measurement file")
    _common(p)
    p.add_argument("measurements")
    p.add_argument("--truth", help="reference coefficient file for error reporting")
    p.add_argument("--radius-rule", choices=("noise-norm", "linf"), default="noise-norm")
    p.add_argument("--report", help="write the recovery report (JSON) here")
    p.add_argument("--max-iters", type=int, default=5000)

    p = sub.add_parser("experiment", help="run a numerical study")
    _common(p, rows=True)
    p.add_argument("id", choices=sorted(EXPERIMENTS))
    p.add_argument("--trials", type=int, default=25)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--sidecar", action="store_true", help="also write <out>.json next to a CSV table")
    return ap


def _write_text(args, text):
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_tables(args):
    lines = []
    if args.block:
        m, mu = args.block
        blk = build_subspace_transform(m, mu, args.nmax)
        lines.append(f"# B^{{m mu}} m={m} mu={mu} n_max={args.nmax} orders={[int(o) for o in blk.orders]}")
        for r, mp in enumerate(blk.mprime):
            lines.append(f"{mp} " + " ".join(f"{v.real:.17g}{v.imag:+.17g}j" for v in blk.matrix[r]))
    else:
        lines.append("# n mp m Delta_n[mp, m]")
        for n in range(args.nmax + 1):
            d = delta_matrix(n)
            for i in range(2 * n + 1):
                for j in range(2 * n + 1):
                    lines.append(f"{n} {i - n} {j - n} {d[i, j]:.17g}")
    _write_text(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_synth(args):
    if args.sparsity:
        a = random_sparse_coefficients(args.nmax, args.sparsity, seed=args.seed, mu_zero_only=args.dims == 2)
    else:
        a = preset(args.preset, args.nmax, probe_seed=args.seed)[2]
    if args.out:
        io.write_coefficients(args.out, a)
    else:
        _stdout_coeffs(a)
    if args.fourier_out:
        io.write_fourier(args.fourier_out, a_to_b(a, dims=args.dims if a.mu_zero_only else 3))
    return EXIT_OK


def _stdout_coeffs(a):
    sys.stdout.write(f"# n_max={a.n_max}\n")
    for (n, m, mu), v in sorted(a.entries().items()):
        sys.stdout.write(f"{n} {m} {mu} {v.real:.17g} {v.imag:.17g}\n")


def cmd_measure(args):
    if not args.out:
        raise ValueError("measure needs --out")
    a = io.read_coefficients(args.coeffs) if args.coeffs else preset(args.preset, args.nmax)[2]
    dims = args.dims or (2 if a.mu_zero_only else 3)
    grid = build_grid(a.n_max, args.oversample, dims)
    pm = physical_map(grid)
    if args.rows and args.density:
        raise ValueError("give --rows or --density, not both")
    m = args.rows or int(round((args.density or 1.0) * grid.size))
    rng = np.random.default_rng(args.seed)
    sel = replace(select_rows(grid, m, seed=rng, pmap=pm), seed=args.seed)
    sd = 0.0 if args.noise_db is None else noise_std_from_db(field_peak(a, grid, pm), args.noise_db)
    ms = simulate(a, sel, sd, seed=rng, shared_noise=not args.independent_noise, pmap=pm)
    ms.seed = args.seed
    if args.selection_out:
        io.write_selection(args.selection_out, sel, pm)
    io.write_measurements(args.out, ms)
    print(f"wrote {ms.m_rows} rows ({sel.m_phys} physical points) to {args.out}", file=sys.stderr)
    return EXIT_OK


def cmd_recover(args):
    ms = io.read_measurements(args.measurements)
    truth = io.read_coefficients(args.truth) if args.truth else None
    r = constraint_radius(ms, args.radius_rule)
    cfg = (SolverConfig.noisy(r) if r > 0 else SolverConfig.noiseless())
    cfg.max_iters = args.max_iters
    a_hat, rep = recover_field(ms, truth, config=cfg)
    if args.out:
        io.write_coefficients(args.out, a_hat)
    else:
        _stdout_coeffs(a_hat)
    text = json.dumps(rep.as_dict(), default=str, indent=1)
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(text + "\n")
    print(text, file=sys.stderr)
    return EXIT_OK if rep.status == "converged" else EXIT_SOLVER


def cmd_experiment(args):
    spec = ExperimentSpec(args.id, preset=args.preset, n_max=args.nmax, oversample=args.oversample,
                          trials=args.trials, seed=args.seed, noise_db=args.noise_db, out=args.out,
                          rows=args.rows, density=args.density, workers=args.workers)
    table = run_experiment(spec)
    if args.out:
        table.save(args.out, args.format, sidecar=args.sidecar)
    elif args.format == "json":
        json.dump(table.to_json(), sys.stdout, indent=1, default=str)
        sys.stdout.write("\n")
    else:
        table.to_csv(sys.stdout)
    conv = [c for c in ("converged_fraction",) if c in table.columns]
    if conv and np.any(table.column(conv[0]) < 1):
        print("warning: some solves did not converge", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


COMMANDS = {"tables": cmd_tables, "synth": cmd_synth, "measure": cmd_measure,
            "recover": cmd_recover, "experiment": cmd_experiment}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.cmd](args)
    except (ValueError, OSError) as exc:
        print(f"sphcs: error: {exc}", file=sys.stderr)
        return EXIT_ARGS


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface: ``causalfc {check,generate,sweep,bench}``.

Exit codes of ``check``: 0 causal within tolerance, 2 violations detected,
3 inconclusive, 1 operational error.
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, generators
from .continuation import (
    COMPLEX_SYSTEM,
    DEFAULT_B,
    DEFAULT_XI,
    REAL_SYSTEM,
    CausalContinuation,
    ContinuationConfig,
    design_matrix,
    evaluate,
)
from .diagnostics import (
    B_CANDIDATES,
    CAUSAL,
    INCONCLUSIVE,
    VIOLATIONS,
    assess,
    select_extension,
)
from .lsq_svd import ABSOLUTE, XI_MODES, solve_min_norm, svd
from .spectrum import prepare
from .touchstone_io import (
    FORMATS,
    network_from_response,
    read_response,
    write_csv,
    write_errors_csv,
    write_report_csv,
    write_touchstone,
)

EXIT_CODES = {CAUSAL: 0, VIOLATIONS: 2, INCONCLUSIVE: 3}
EXIT_ERROR = 1
_FORMULATION = {"real": REAL_SYSTEM, "complex": COMPLEX_SYSTEM}


def _port(text: str) -> tuple[int, int]:
    try:
        i, j = (int(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected i,j got {text!r}") from None
    if i < 1 or j < 1:
        raise argparse.ArgumentTypeError("port indices start at 1")
    return i, j


def _add_fit_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, type=Path, help=".sNp or CSV file")
    p.add_argument("--port", type=_port, default=(1, 1), metavar="i,j",
                   help="matrix element to check (default 1,1)")
    p.add_argument("--modes", type=int, default=None, metavar="M",
                   help="causal modes (default: half the symmetrized point count)")
    p.add_argument("--extension", type=float, default=None, metavar="b",
                   help=f"period b in (1, 4]; without it b is chosen from {list(B_CANDIDATES)}")
    p.add_argument("--b-sweep", action="store_true",
                   help="choose b from the candidate set even if --extension is given")
    p.add_argument("--xi", type=float, default=DEFAULT_XI, help="singular value cut-off")
    p.add_argument("--xi-mode", choices=XI_MODES, default=ABSOLUTE)
    p.add_argument("--formulation", choices=sorted(_FORMULATION), default="real")
    p.add_argument("--levels", type=int, default=4, help="resolution sweep depth")
    p.add_argument("--known-noise", type=float, default=None,
                   help="noise level of the data, if known")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="causalfc",
        description="Causality check of tabulated frequency responses by causal Fourier continuation.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    chk = sub.add_parser("check", help="fit, sweep and classify one response")
    _add_fit_args(chk)
    chk.add_argument("--report", type=Path, default=None, help="key/value CSV report")
    chk.add_argument("--errors-csv", type=Path, default=None, help="per-point error CSV")

    sw = sub.add_parser("sweep", help="print the resolution sweep and decay fit")
    _add_fit_args(sw)

    gen = sub.add_parser("generate", help="write an analytic test response")
    gsub = gen.add_subparsers(dest="model", required=True)
    tp = gsub.add_parser("two-pole")
    tp.add_argument("--n", type=int, default=501, help="samples on [0, w_max]")
    tp.add_argument("--w-max", type=float, default=6.0)
    dg = gsub.add_parser("delayed-gaussian")
    dg.add_argument("--n", type=int, default=251)
    dg.add_argument("--sigma", type=float, default=2.0, help="in ns")
    dg.add_argument("--td-over-sigma", type=float, default=6.0)
    dg.add_argument("--w-max", type=float, default=3.6e8)
    ln = gsub.add_parser("line")
    ln.add_argument("--n", type=int, default=1250, help="samples on (0, w_max]")
    ln.add_argument("--length", type=float, default=10.0, help="cm")
    ln.add_argument("--w-max", type=float, default=5e9)
    for g in (tp, dg, ln):
        g.add_argument("--output", type=Path, default=None,
                       help=".s1p or .csv path (default: Touchstone on stdout)")
        g.add_argument("--format", choices=FORMATS, default="RI", help="Touchstone number format")
        g.add_argument("--gauss-a", type=float, default=0.0, help="Gaussian violation amplitude")
        g.add_argument("--gauss-x0", type=float, default=generators.GAUSS_X0)
        g.add_argument("--gauss-sigma", type=float, default=generators.GAUSS_SIGMA)
        g.add_argument("--cosine-a", type=float, default=0.0, help="cosine violation amplitude")
        g.add_argument("--cosine-cycles", type=float, default=10.0)

    bench = sub.add_parser("bench", help="time SVD, solve and full continuation")
    bench.add_argument("--modes", type=int, nargs="+", default=[50, 100, 250, 500])
    bench.add_argument("--extension", type=float, default=DEFAULT_B)
    bench.add_argument("--repeat", type=int, default=1)
    return parser


def _load(args):
    resp = read_response(args.input, args.port)
    return resp, prepare(resp)


def _config(args, data) -> tuple[ContinuationConfig, dict]:
    base = ContinuationConfig(
        M=args.modes,
        b=args.extension if args.extension is not None else DEFAULT_B,
        xi=args.xi,
        formulation=_FORMULATION[args.formulation],
        xi_mode=args.xi_mode,
    )
    extra = {}
    if args.b_sweep or args.extension is None:
        b, table = select_extension(data, base)
        base = ContinuationConfig(base.M, b, base.xi, base.formulation, base.xi_mode)
        extra["b_sweep"] = ";".join(f"{k:g}:{v:.3e}" for k, v in table.items())
    return base, extra


def _settings(args, cfg, data, extra) -> dict:
    out = {
        "version": __version__,
        "command": args.command,
        "input": str(args.input),
        "port": f"{args.port[0]},{args.port[1]}",
        "N": len(data),
        "M": cfg.modes_for(len(data)),
        "b": f"{cfg.b:g}",
        "xi": f"{cfg.xi:g}",
        "xi_mode": cfg.xi_mode,
        "formulation": cfg.formulation,
        "levels": args.levels,
        "known_noise": "" if args.known_noise is None else f"{args.known_noise:g}",
    }
    out.update(extra)
    return out


def cmd_check(args) -> int:
    resp, data = _load(args)
    cfg, extra = _config(args, data)
    res = assess(data, cfg, args.levels, args.known_noise, with_bounds=True)
    extra["extension_sup_proxy"] = f"{res.extension_sup:.6e}"
    extra["coef_truncation"] = f"{res.bounds.coef_truncation:.6e}"
    extra["coef_amplification"] = f"{res.bounds.coef_amplification:.6e}"
    extra["K"] = res.bounds.K
    settings = _settings(args, cfg, data, extra)
    rep = res.report
    if args.report:
        args.report.write_text(write_report_csv(rep, settings))
    if args.errors_csv:
        args.errors_csv.write_text(write_errors_csv(res.errors))

    print(f"verdict: {rep.verdict}")
    print(f"b={cfg.b:g} M={settings['M']} N={settings['N']} max_error={rep.errors.max_error:.3e}")
    if rep.noise_estimate is not None:
        print(f"noise_estimate: {rep.noise_estimate:.3e}")
    if rep.violation_locations:
        locs = ", ".join(f"{x:+.4f}" for x in rep.violation_locations)
        print(f"violation_locations (x): {locs}")
    return EXIT_CODES[rep.verdict]


def cmd_sweep(args) -> int:
    _, data = _load(args)
    cfg, _ = _config(args, data)
    res = assess(data, cfg, args.levels, args.known_noise)
    print(f"b={cfg.b:g}")
    print(f"{'M':>6} {'N':>6} {'max|E_R|':>11} {'max|E_I|':>11}")
    for lv in sorted(res.sweep, key=lambda s: s.M):
        print(f"{lv.M:6d} {lv.N:6d} {lv.errors.max_real:11.3e} {lv.errors.max_imag:11.3e}")
    s = res.report.smoothness
    if s is not None:
        print(f"fit: error ~ {s.c_tilde:.3g} * M^{s.slope:.2f}  (k={s.k_order:.2f})")
    print(f"verdict: {res.report.verdict}")
    return 0


def _generate_response(args):
    if args.model == "two-pole":
        p = generators.TwoPoleParams(w_max=args.w_max)
        return generators.two_pole(p, n=args.n)
    if args.model == "delayed-gaussian":
        p = generators.DelayedGaussianParams(
            sigma=args.sigma, t_d=args.td_over_sigma * args.sigma, w_max=args.w_max
        )
        return generators.delayed_gaussian(p, n=args.n)
    p = generators.LineParams(length=args.length, w_max=args.w_max)
    return generators.transmission_line_s11(p, n=args.n)


def cmd_generate(args) -> int:
    resp = _generate_response(args)
    if args.gauss_a:
        resp = generators.add_gaussian_violation(resp, args.gauss_a, args.gauss_x0, args.gauss_sigma)
    if args.cosine_a:
        resp = generators.add_cosine_violation(resp, args.cosine_a, args.cosine_cycles)
    if args.output is not None and args.output.suffix.lower() == ".csv":
        text = write_csv(resp)
    else:
        text = write_touchstone(network_from_response(resp), fmt=args.format)
    if args.output is None:
        sys.stdout.write(text)
    else:
        args.output.write_text(text)
    return 0


def bench_rows(modes, b: float = DEFAULT_B, repeat: int = 1) -> list[tuple[int, int, float, float, float]]:
    """``(N, M, t_svd, t_solve, t_total)`` for equispaced grids with ``N = 2M``."""
    rows = []
    rng = np.random.default_rng(0)
    for M in modes:
        N = 2 * M
        x = np.linspace(-0.5, 0.5, N)
        rhs = rng.standard_normal(2 * N)
        best = [np.inf] * 3
        for _ in range(repeat):
            t0 = time.perf_counter()
            A = design_matrix(x, M, b)
            t1 = time.perf_counter()
            fac = svd(A)
            t2 = time.perf_counter()
            sol = solve_min_norm(fac, rhs, DEFAULT_XI, ABSOLUTE)
            t3 = time.perf_counter()
            evaluate(CausalContinuation(sol.coeffs, b), x)
            t4 = time.perf_counter()
            best = [min(best[0], t2 - t1), min(best[1], t3 - t2), min(best[2], t4 - t0)]
        rows.append((N, M, *best))
    return rows


def cmd_bench(args) -> int:
    print(f"{'N':>6} {'M':>6} {'SVD [s]':>10} {'solve [s]':>10} {'total [s]':>10}")
    for N, M, ts, tl, tt in bench_rows(args.modes, args.extension, args.repeat):
        print(f"{N:6d} {M:6d} {ts:10.4f} {tl:10.4f} {tt:10.4f}")
    return 0


COMMANDS = {"check": cmd_check, "sweep": cmd_sweep, "generate": cmd_generate, "bench": cmd_bench}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # usage errors must not collide with the "violations" exit code
        return EXIT_ERROR if exc.code else 0
    try:
        return COMMANDS[args.command](args)
    except (OSError, ValueError, IndexError, RuntimeError) as exc:
        print(f"causalfc: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

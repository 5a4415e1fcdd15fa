"""Command-line batch interface.

Every subcommand reads a JSON group configuration (``--config PATH`` or
standard input), writes a CSV table with a header row to standard output or
``--out``, and sends diagnostics to standard error.  Floats are written with
``%.17g``.  Column layouts are listed in FORMATS.md.

Exit codes: 0 success, 1 validation failure, 2 numerical failure,
3 usage error.
"""
import argparse
import csv
import io
import logging
import os
import sys

import numpy as np
from threadpoolctl import threadpool_limits

from .coding import CodingError
from .config import ConfigError, parse_config
from .flow import FlowError, flat_from_words, simulate, working_dps
from .schottky import SchottkyError, limit_cover, validate_factor
from .spectral import ScanGrid, ComplexWindow, GridTooLarge, bowen_dimension, euler_zeta, product_det_scan, zero_scan
from .transfer import (
    TransferError,
    assemble_factor_operator,
    assemble_product_operator,
    chebyshev_basis,
    fredholm_det,
    leading_eigenvalue,
    periodic_trace,
)

THREADS_ENV = "SCHOTTKY_WEYL_THREADS"

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2, 3

log = logging.getLogger("schottky_weyl")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return "%.17g" % x
    return str(x)


def _table(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def parse_complex(text):
    parts = text.split(",")
    if len(parts) not in (1, 2):
        raise UsageError(f"expected RE or RE,IM, got {text!r}")
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise UsageError(f"bad number in {text!r}") from None
    return complex(vals[0], vals[1] if len(vals) == 2 else 0.0)


def parse_words(text, rank):
    """``"1,2;2,1"`` -> ``((1, 2), (2, 1))``."""
    chunks = text.split(";")
    if len(chunks) != rank:
        raise UsageError(f"need {rank} semicolon-separated words, got {len(chunks)}")
    words = []
    for c in chunks:
        try:
            w = tuple(int(x) for x in c.split(","))
        except ValueError:
            raise UsageError(f"bad word {c!r}") from None
        words.append(w)
    return tuple(words)


def parse_axis(text):
    """``j:start:stop:count`` -> ``(j, ScanGrid)``."""
    parts = text.split(":")
    if len(parts) != 4:
        raise UsageError(f"axis must be j:start:stop:count, got {text!r}")
    try:
        j, count = int(parts[0]), int(parts[3])
        grid = ScanGrid(float(parts[1]), float(parts[2]), count)
    except ValueError as exc:
        raise UsageError(f"bad axis {text!r}: {exc}") from None
    return j, grid


def parse_window(text):
    parts = text.split(":")
    if len(parts) not in (4, 5):
        raise UsageError(f"window must be re0:re1:im0:im1[:resolution], got {text!r}")
    try:
        vals = [float(p) for p in parts[:4]]
        res = int(parts[4]) if len(parts) == 5 else 32
        return ComplexWindow(*vals, res)
    except ValueError as exc:
        raise UsageError(f"bad window {text!r}: {exc}") from None


def _factor(G, j):
    if not 1 <= j <= G.rank:
        raise UsageError(f"--factor must lie in 1..{G.rank}")
    return G.factors[j - 1]


def _basis(f, args, cfg):
    degree = cfg.degree if args.degree is None else args.degree
    return chebyshev_basis(f, degree, cfg.rho)


# ------------------------------------------------------------- subcommands


def cmd_validate(args, cfg):
    G = cfg.build()
    rows, ok = [], True
    for j, f in enumerate(G.factors, 1):
        rep = validate_factor(f)
        ok = ok and rep.passed
        rows.append((j, rep.pairing_defect, rep.min_gap, rep.inverse_defect, rep.passed))
    return _table(["factor", "pairing_defect", "min_gap", "inverse_defect", "passed"], rows), ok


def cmd_limit_cover(args, cfg):
    f = _factor(cfg.build(), args.factor)
    if args.depth < 1:
        raise UsageError("--depth must be >= 1")
    rows = [(" ".join(str(k) for k in w.letters), lo, hi) for w, (lo, hi) in limit_cover(f, args.depth)]
    return _table(["word", "left", "right"], rows), True


def cmd_dimension(args, cfg):
    f = _factor(cfg.build(), args.factor)
    tol = cfg.tolerance if args.tol is None else args.tol
    degree = cfg.degree if args.degree is None else args.degree
    r = bowen_dimension(f, tol, degree)
    header = ["delta", "delta_cover", "agreement", "eigenvalue_at_delta", "det_at_delta", "degree", "cover_depth"]
    row = (r.delta, r.delta_cover, r.agreement, r.eigenvalue_at_delta, r.det_at_delta, r.degree, r.cover_depth)
    return _table(header, [row]), True


def cmd_zeta(args, cfg):
    f = _factor(cfg.build(), args.factor)
    s = parse_complex(args.s)
    sval = s.real if s.imag == 0 else s
    det = fredholm_det(assemble_factor_operator(f, sval, _basis(f, args, cfg))).value
    header = ["s_re", "s_im", "det_re", "det_im"]
    row = [s.real, s.imag, det.real, det.imag]
    if args.euler:
        z = euler_zeta(f, s, args.word_cutoff, args.k_cutoff)
        header += ["euler_re", "euler_im", "difference", "tail_estimate"]
        row += [z.value.real, z.value.imag, abs(z.value - det), z.tail_estimate]
    return _table(header, [row]), True


def cmd_trace_check(args, cfg):
    f = _factor(cfg.build(), args.factor)
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    s = parse_complex(args.s)
    sval = s.real if s.imag == 0 else s
    M = assemble_factor_operator(f, sval, _basis(f, args, cfg)).matrix
    rows, P = [], np.eye(M.shape[0])
    for n in range(1, args.n + 1):
        P = P @ M
        tm = np.trace(P)
        tp = periodic_trace(f, sval, n)
        rows.append((n, s.real, s.imag, tm.real, tm.imag, tp.real, tp.imag, abs(tm - tp)))
    header = ["n", "s_re", "s_im", "matrix_trace_re", "matrix_trace_im",
              "periodic_trace_re", "periodic_trace_im", "difference"]
    return _table(header, rows), True


def cmd_flow_sim(args, cfg):
    G = cfg.build()
    words = parse_words(args.words, G.rank)
    if args.steps < 1:
        raise UsageError("--steps must be >= 1")
    dps = working_dps(G, args.steps)
    state = flat_from_words(G, words, dps)
    recs = simulate(G, state, args.steps)
    r = G.rank
    header = ["step"] + [f"t0_{j}" for j in range(1, r + 1)] + [f"letter_{j}" for j in range(1, r + 1)]
    rows = [(i, *rec.t0, *rec.letter) for i, rec in enumerate(recs, 1)]
    return _table(header, rows), True


def cmd_product_det(args, cfg):
    G = cfg.build()
    try:
        s = tuple(float(x) for x in args.s.split(","))
    except ValueError:
        raise UsageError(f"bad parameter vector {args.s!r}") from None
    if len(s) != G.rank:
        raise UsageError(f"need {G.rank} parameters, got {len(s)}")
    bases = [_basis(f, args, cfg) for f in G.factors]
    d = fredholm_det(assemble_product_operator(G, s, bases))
    lead = float(np.prod([leading_eigenvalue(f, sj, b) for f, sj, b in zip(G.factors, s, bases)]))
    header = [f"s_{j}" for j in range(1, G.rank + 1)] + ["det_re", "det_im", "log_abs_det", "leading_eigenvalue"]
    return _table(header, [(*s, d.value.real, d.value.imag, d.log_abs, lead)]), True


def cmd_scan(args, cfg):
    G = cfg.build()
    if args.window is not None:
        f = _factor(G, args.factor)
        zeros = zero_scan(f, parse_window(args.window), _basis(f, args, cfg))
        return _zero_table(zeros), True
    axes = [parse_axis(a) for a in args.axis or []]
    if not axes:
        raise UsageError("scan needs --axis or --window")
    if len(axes) == 1 and not args.diagonal:
        j, grid = axes[0]
        f = _factor(G, j)
        return _zero_table(zero_scan(f, grid, _basis(f, args, cfg))), True
    if args.diagonal:
        if len(axes) != 1:
            raise UsageError("--diagonal takes a single --axis")
        grids = [axes[0][1]] * G.rank
    else:
        order = sorted(axes)
        if [j for j, _ in order] != list(range(1, G.rank + 1)):
            raise UsageError(f"product scans need exactly one axis per factor 1..{G.rank}")
        grids = [g for _, g in order]
    bases = [_basis(f, args, cfg) for f in G.factors]
    table = product_det_scan(G, grids, bases, diagonal=args.diagonal)
    for s, _, _, rel in table.dense_checks:
        log.info("dense cross-check at %s: relative difference %.3g", s, rel)
    header = [f"s_{j}" for j in range(1, G.rank + 1)] + ["det_re", "det_im", "leading_eigenvalue"]
    rows = [(*row.s, row.det.real, row.det.imag, row.leading_eigenvalue) for row in table.rows]
    return _table(header, rows), True


def _zero_table(zeros):
    rows = [(z.location.real, z.location.imag, z.residual, z.degree, z.iterations) for z in zeros]
    return _table(["re", "im", "residual", "degree", "iterations"], rows)


# ------------------------------------------------------------------ parser


def build_parser():
    p = _Parser(prog="schottky-weyl", description=__doc__.split("\n")[0],
                epilog="CSV column layouts: see FORMATS.md.")
    p.add_argument("--config", help="JSON group configuration (default: standard input)")
    p.add_argument("--out", help="write the table here instead of standard output")
    p.add_argument("--threads", type=int, help=f"cap on numerical threads (default: ${THREADS_ENV})")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_degree(sp):
        sp.add_argument("--degree", type=int, help="Chebyshev degree N (default: config)")

    sp = sub.add_parser("validate", help="columns: factor,pairing_defect,min_gap,inverse_defect,passed")
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("limit-cover", help="columns: word,left,right")
    sp.add_argument("--factor", type=int, default=1)
    sp.add_argument("--depth", type=int, required=True)
    sp.set_defaults(func=cmd_limit_cover)

    sp = sub.add_parser("dimension", help="columns: delta,delta_cover,agreement,eigenvalue_at_delta,"
                                          "det_at_delta,degree,cover_depth")
    sp.add_argument("--factor", type=int, default=1)
    sp.add_argument("--tol", type=float)
    with_degree(sp)
    sp.set_defaults(func=cmd_dimension)

    sp = sub.add_parser("zeta", help="columns: s_re,s_im,det_re,det_im[,euler_re,euler_im,difference,"
                                     "tail_estimate]")
    sp.add_argument("--factor", type=int, default=1)
    sp.add_argument("--s", required=True, help="RE or RE,IM")
    sp.add_argument("--euler", action="store_true", help="also evaluate the Euler product")
    sp.add_argument("--word-cutoff", type=int, default=12)
    sp.add_argument("--k-cutoff", type=int, default=30)
    with_degree(sp)
    sp.set_defaults(func=cmd_zeta)

    sp = sub.add_parser("trace-check", help="columns: n,s_re,s_im,matrix_trace_re,matrix_trace_im,"
                                            "periodic_trace_re,periodic_trace_im,difference")
    sp.add_argument("--factor", type=int, default=1)
    sp.add_argument("--n", type=int, required=True, help="largest orbit length")
    sp.add_argument("--s", default="1.0", help="RE or RE,IM")
    with_degree(sp)
    sp.set_defaults(func=cmd_trace_check)

    sp = sub.add_parser("flow-sim", help="columns: step,t0_1..t0_r,letter_1..letter_r")
    sp.add_argument("--words", required=True, help='one word per factor, e.g. "1,2;2,1"')
    sp.add_argument("--steps", type=int, required=True)
    sp.set_defaults(func=cmd_flow_sim)

    sp = sub.add_parser("product-det", help="columns: s_1..s_r,det_re,det_im,log_abs_det,leading_eigenvalue")
    sp.add_argument("--s", required=True, help="comma-separated real parameters, one per factor")
    with_degree(sp)
    sp.set_defaults(func=cmd_product_det)

    sp = sub.add_parser("scan", help="zeros: re,im,residual,degree,iterations; "
                                     "product: s_1..s_r,det_re,det_im,leading_eigenvalue")
    sp.add_argument("--axis", action="append", help="j:start:stop:count (repeat once per factor)")
    sp.add_argument("--diagonal", action="store_true", help="product scan along s_1 = ... = s_r")
    sp.add_argument("--window", help="complex zero search re0:re1:im0:im1[:resolution]")
    sp.add_argument("--factor", type=int, default=1)
    with_degree(sp)
    sp.set_defaults(func=cmd_scan)
    return p


def _threads(args):
    if args.threads is not None:
        n = args.threads
    elif os.environ.get(THREADS_ENV):
        try:
            n = int(os.environ[THREADS_ENV])
        except ValueError:
            raise UsageError(f"${THREADS_ENV} must be an integer") from None
    else:
        return None
    if n < 1:
        raise UsageError("thread cap must be >= 1")
    return n


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        threads = _threads(args)
        if args.config:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        else:
            text = sys.stdin.read()
        cfg = parse_config(text)
        with threadpool_limits(limits=threads):
            out, ok = args.func(args, cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, SchottkyError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (TransferError, FlowError, CodingError, GridTooLarge, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    if not ok:
        print("validation failed", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

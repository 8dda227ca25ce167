"""Command-line surface.

Evaluates the library quantities as CSV rows, sweeps curve families into CSV
tables (optionally with an SVG line plot), and runs the POVM decomposer on
JSON files.  Output is deterministic: fixed 9-significant-digit formatting
with a period decimal separator, and sweep results are assembled in input
order whatever the worker count (capped by the QDL_THREADS environment
variable).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from . import discrimination, learning, povmdec, programmable, reading


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.9g}"
    return str(x)


def _csv(stream, header, rows) -> int:
    stream.write(",".join(header) + "\n")
    count = 0
    for row in rows:
        stream.write(",".join(_fmt(v) for v in row) + "\n")
        count += 1
    return count


def _thread_count() -> int:
    raw = os.environ.get("QDL_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _sweep(fn, xs):
    """Map fn over grid points with ordered assembly."""
    workers = _thread_count()
    if workers == 1:
        return [fn(x) for x in xs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, xs))


def _grid(xmin: float, xmax: float, step: float):
    if step <= 0 or xmax < xmin:
        return []
    out = []
    k = 0
    while True:
        x = xmin + k * step
        if x > xmax + step * 1e-9:
            return out
        out.append(min(x, xmax))
        k += 1


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _cmd_discriminate(args, out):
    c, eta = args.overlap, args.prior
    if args.mode == "minerr":
        pe = discrimination.pure_overlap_error(c, eta)
        _csv(out, ["overlap", "prior", "Pe"], [[c, eta, pe]])
    elif args.mode == "unambiguous":
        q = discrimination.unambiguous_q(c, eta)
        _csv(out, ["overlap", "prior", "Q"], [[c, eta, q]])
    else:
        if args.margin is None:
            raise ValueError("weak/strong modes require --margin")
        fn = (
            discrimination.weak_margin
            if args.mode == "weak"
            else discrimination.strong_margin
        )
        res = fn(c, args.margin)
        _csv(
            out,
            ["overlap", "margin", "Ps", "Pe", "Q", "phi", "regime"],
            [[
                c,
                args.margin,
                res.p_success,
                res.p_error,
                res.p_inconclusive,
                float("nan") if res.phi is None else res.phi,
                res.regime,
            ]],
        )
    return 0


def _cmd_programmable(args, out):
    if args.margin is not None:
        curve = programmable.margin_success(args.n, args.nprime, args.margin, args.scheme)
        _csv(
            out,
            ["n", "nprime", "R", "scheme", "Ps"],
            [[args.n, args.nprime, args.margin, args.scheme, curve.p_success]],
        )
        return 0
    if args.na is not None:
        load = programmable.PortLoad(args.na, args.nb, args.nc)
        rates = programmable.general_rates(load)
        _csv(
            out,
            ["na", "nb", "nc", "Q", "Pe"],
            [[args.na, args.nb, args.nc, rates.q, rates.pe]],
        )
        return 0
    if args.prior is not None:
        kind = {"hs": "hard-sphere", "bures": "bures", "chernoff": "chernoff"}[args.prior]
        pe = programmable.universal_error(
            programmable.PuritySpec(kind=kind), args.n, args.nprime
        )
        _csv(out, ["n", "nprime", "prior", "Pe"], [[args.n, args.nprime, kind, pe]])
        return 0
    if args.purity is not None:
        pe = programmable.mixed_error(args.n, args.nprime, args.purity)
        _csv(out, ["n", "nprime", "r", "Pe"], [[args.n, args.nprime, args.purity, pe]])
        return 0
    rates = programmable.pure_rates(args.n, args.nprime)
    _csv(out, ["n", "nprime", "Q", "Pe"], [[args.n, args.nprime, rates.q, rates.pe]])
    return 0


def _cmd_learn(args, out):
    n = args.n
    if args.strategy == "lm":
        pe = learning.lm_error(n)
        _csv(
            out,
            ["n", "Pe", "excess_risk"],
            [[n, pe, pe - learning.known_pair_error()]],
        )
    elif args.strategy == "eyd":
        rates = learning.eyd_qubit(n)
        _csv(out, ["n", "Pe", "excess_risk"], [[n, rates.pe, rates.excess_risk]])
    elif args.strategy == "reversed":
        _csv(out, ["n", "Pe"], [[n, learning.reversed_error(n)]])
    else:  # sdp
        r = args.purity if args.purity is not None else 1.0
        opt = learning.lm_mixed_optimize(n, r)
        pe = (1.0 - opt.delta_lm / 2.0) / 2.0
        _csv(
            out,
            ["n", "r", "delta_lm", "Pe", "excess_risk"],
            [[n, r, opt.delta_lm, pe, pe - learning.known_pair_error(r)]],
        )
    return 0


def _cmd_read(args, out):
    a0 = args.alpha0
    if args.oracle:
        cfg = reading.ReadingConfig(alpha0=a0, mu=args.mu, n_aux=args.naux)
        pe = reading.finite_n_oracle(
            cfg,
            strategy=args.strategy,
            quadrature_order=args.quad,
            squeeze=args.squeeze if args.squeeze is not None else 0.0,
        )
        _csv(
            out,
            ["alpha0", "strategy", "naux", "mu", "Pe"],
            [[a0, args.strategy, args.naux, args.mu, pe]],
        )
        return 0
    if args.strategy == "collective":
        risk = reading.collective_excess_risk(a0)
        _csv(out, ["alpha0", "strategy", "excess_risk"], [[a0, "collective", risk]])
        return 0
    squeeze = args.squeeze
    if squeeze is None:
        squeeze = reading.optimal_squeezing(a0)
    risk = reading.eyd_excess_risk(a0, squeeze)
    _csv(
        out,
        ["alpha0", "strategy", "squeeze", "excess_risk"],
        [[a0, "eyd", squeeze, risk]],
    )
    return 0


def _cmd_decompose(args, out):
    with open(args.input, "r", encoding="utf-8") as fh:
        povm = povmdec.povm_from_json(json.load(fh))
    result = (
        povmdec.ordered_decompose(povm) if args.ordered else povmdec.decompose(povm)
    )
    payload = json.dumps(povmdec.decomposition_to_json(result), indent=2, sort_keys=True)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
    else:
        out.write(payload + "\n")
    return 0


# ---------------------------------------------------------------------------
# figure tables
# ---------------------------------------------------------------------------

FIGURE_DEFAULTS = {
    # id: (xmin, xmax, step, x label, y labels)
    "fig3.5": (0.0, 0.25, 0.0025, "r", ["Ps_weak", "Ps_strong"]),
    "fig4.1": (0.0, 1.0, 0.1, "r", ["Pe_n3", "Pe_n11", "Pe_n29"]),
    "fig4.2": (1, 26, 1, "n", ["Pe_r0.2", "Pe_r0.5", "Pe_r0.7", "Pe_r1.0"]),
    "fig4.3": (0.1, 1.0, 0.05, "r", ["Pe_n20", "asym_n20", "Pe_n79", "asym_n79"]),
    "fig4.4": (1, 16, 1, "n", ["Pe_hs", "Pe_bures", "Pe_chernoff"]),
    "fig4.5": (0.0, 0.2, 0.002, "R", ["Ps_weak", "Ps_strong"]),
    "fig5.1": (0.1, 0.9, 0.1, "r", ["R_lm_n1", "R_opt_n1", "R_lm_n2", "R_opt_n2",
                                    "R_lm_n3", "R_opt_n3"]),
    "fig6.2": (0.1, 3.0, 0.05, "alpha0", ["squeeze_opt"]),
    "fig6.3": (0.3, 1.5, 0.05, "alpha0", ["R_collective", "R_eyd"]),
}


def _figure_rows(figure: str, xs, args):
    if figure == "fig3.5":
        c = args.overlap

        def row(r):
            return [
                r,
                discrimination.weak_margin(c, r).p_success,
                discrimination.strong_margin(c, r).p_success,
            ]

    elif figure == "fig4.1":

        def row(r):
            return [r] + [programmable.mixed_error(n, n, r) for n in (3, 11, 29)]

    elif figure == "fig4.2":

        def row(n):
            n = int(round(n))
            return [n] + [
                programmable.mixed_error(n, n, r) for r in (0.2, 0.5, 0.7, 1.0)
            ]

    elif figure == "fig4.3":

        def row(r):
            return [
                r,
                programmable.mixed_error(20, 1, r),
                programmable.mixed_asymptote(20, r),
                programmable.mixed_error(79, 1, r),
                programmable.mixed_asymptote(79, r),
            ]

    elif figure == "fig4.4":

        def row(n):
            n = int(round(n))
            return [n] + [
                programmable.universal_error(programmable.PuritySpec(kind=k), n, n)
                for k in ("hard-sphere", "bures", "chernoff")
            ]

    elif figure == "fig4.5":
        n, nprime = args.n, args.nprime

        def row(big_r):
            return [
                big_r,
                programmable.margin_success(n, nprime, big_r, "weak").p_success,
                programmable.margin_success(n, nprime, big_r, "strong").p_success,
            ]

    elif figure == "fig5.1":

        def row(r):
            cells = [r]
            for n in (1, 2, 3):
                opt = learning.lm_mixed_optimize(n, r)
                pe_lm = (1.0 - opt.delta_lm / 2.0) / 2.0
                pe_opt = programmable.mixed_error(n, 1, r)
                base = learning.known_pair_error(r)
                cells += [pe_lm - base, pe_opt - base]
            return cells

    elif figure == "fig6.2":

        def row(a0):
            return [a0, reading.optimal_squeezing(a0)]

    elif figure == "fig6.3":

        def row(a0):
            return [
                a0,
                reading.collective_excess_risk(a0),
                reading.eyd_excess_risk(a0, reading.optimal_squeezing(a0)),
            ]

    else:
        raise ValueError(f"unknown figure id {figure!r}")
    return _sweep(row, xs)


def _write_svg(path: str, header, rows):
    """One polyline per y column on a fixed 640x440 canvas."""
    width, height, pad = 640, 440, 50
    xs = [row[0] for row in rows]
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" '
        f'y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
    ]
    if rows:
        ys_all = [v for row in rows for v in row[1:] if isinstance(v, (int, float))]
        x_lo, x_hi = min(xs), max(xs)
        y_lo, y_hi = min(ys_all), max(ys_all)
        x_span = (x_hi - x_lo) or 1.0
        y_span = (y_hi - y_lo) or 1.0

        def to_px(x, y):
            px = pad + (x - x_lo) / x_span * (width - 2 * pad)
            py = height - pad - (y - y_lo) / y_span * (height - 2 * pad)
            return f"{px:.2f},{py:.2f}"

        for col in range(1, len(header)):
            pts = " ".join(to_px(row[0], row[col]) for row in rows)
            parts.append(
                f'<polyline fill="none" stroke="{colors[(col - 1) % len(colors)]}" '
                f'stroke-width="1.5" points="{pts}"/>'
            )
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")


def emit_table(figure: str, sink, args, svg_path: str | None = None) -> int:
    xmin, xmax, step, xlabel, ylabels = FIGURE_DEFAULTS[figure]
    if args.xmin is not None:
        xmin = args.xmin
    if args.xmax is not None:
        xmax = args.xmax
    if args.step is not None:
        step = args.step
    xs = _grid(xmin, xmax, step)
    rows = _figure_rows(figure, xs, args)
    count = _csv(sink, [xlabel] + ylabels, rows)
    if svg_path:
        _write_svg(svg_path, [xlabel] + ylabels, rows)
    return count


def _cmd_table(args, out):
    if args.figure not in FIGURE_DEFAULTS:
        raise ValueError(
            f"unknown figure {args.figure!r}; known: {sorted(FIGURE_DEFAULTS)}"
        )
    try:
        sink = open(args.out, "w", encoding="utf-8") if args.out else out
        try:
            emit_table(args.figure, sink, args, svg_path=args.svg)
        finally:
            if args.out:
                sink.close()
    except OSError as exc:
        raise RuntimeError(f"cannot write table: {exc}") from exc
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdl",
        description="quantum state discrimination, learning machines, "
        "coherent-state reading and POVM decomposition",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("discriminate", help="known-state binary discrimination")
    p.add_argument("--overlap", type=float, required=True)
    p.add_argument("--prior", type=float, default=0.5)
    p.add_argument(
        "--mode", choices=["minerr", "unambiguous", "weak", "strong"], default="minerr"
    )
    p.add_argument("--margin", type=float)

    p = sub.add_parser("programmable", help="programmable discrimination machines")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--nprime", type=int, default=1)
    p.add_argument("--na", type=int)
    p.add_argument("--nb", type=int, default=1)
    p.add_argument("--nc", type=int, default=1)
    p.add_argument("--purity", type=float)
    p.add_argument("--prior", choices=["hs", "bures", "chernoff"])
    p.add_argument("--margin", type=float)
    p.add_argument("--scheme", choices=["weak", "strong"], default="weak")

    p = sub.add_parser("learn", help="learning-machine error rates")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--purity", type=float)
    p.add_argument(
        "--strategy", choices=["lm", "eyd", "reversed", "sdp"], default="lm"
    )

    p = sub.add_parser("read", help="coherent-state quantum reading")
    p.add_argument("--alpha0", type=float, required=True)
    p.add_argument("--strategy", choices=["collective", "eyd"], default="collective")
    p.add_argument("--squeeze", type=float)
    p.add_argument("--oracle", action="store_true")
    p.add_argument("--naux", type=int, default=16)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--quad", type=int, default=32)

    p = sub.add_parser("decompose", help="decompose a POVM into extremals")
    p.add_argument("--input", required=True)
    p.add_argument("--ordered", action="store_true")
    p.add_argument("--output")

    p = sub.add_parser("table", help="reproduce a curve family as CSV")
    p.add_argument("--figure", required=True)
    p.add_argument("--out")
    p.add_argument("--svg")
    p.add_argument("--xmin", type=float)
    p.add_argument("--xmax", type=float)
    p.add_argument("--step", type=float)
    p.add_argument("--overlap", type=float, default=0.7)
    p.add_argument("--n", type=int, default=9)
    p.add_argument("--nprime", type=int, default=2)

    return parser


_HANDLERS = {
    "discriminate": _cmd_discriminate,
    "programmable": _cmd_programmable,
    "learn": _cmd_learn,
    "read": _cmd_read,
    "decompose": _cmd_decompose,
    "table": _cmd_table,
}


def run(argv, out=None, err=None) -> int:
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return _HANDLERS[args.command](args, out)
    except (ValueError, RuntimeError, OSError, KeyError) as exc:
        err.write(f"error: {exc}\n")
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))

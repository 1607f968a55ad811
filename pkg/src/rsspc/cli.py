"""Command-line entry point: ``rsspc simulate | genie-sweep | analyze | matrix``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys

import numpy as np

from .analysis import (
    ComplexityModel,
    bm_mult_bound,
    complexity_table,
    normalized_complexity,
    predicted_cn_vn_ops,
    undetected_bound,
)
from .binary_image import expand, write_alist
from .decoder import GENIE_AUDIT, GENIE_GATE, GENIE_OFF, DecoderConfig
from .errors import ConfigurationError
from .galois import build_field
from .harness import SimConfig, genie_sweep, run_sweep, write_csv
from .product import build_product
from .rs import build_rs

log = logging.getLogger("rsspc")


def _int_auto(text: str) -> int:
    return int(text, 0)


def _ebn0_grid(args) -> list[float]:
    if args.ebn0_step <= 0:
        raise ConfigurationError("--ebn0-step must be positive")
    if args.ebn0_stop < args.ebn0_start:
        raise ConfigurationError("--ebn0-stop must not be below --ebn0-start")
    count = int(np.floor((args.ebn0_stop - args.ebn0_start) / args.ebn0_step + 1e-9)) + 1
    return [round(args.ebn0_start + i * args.ebn0_step, 10) for i in range(count)]


def _add_code_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("code")
    g.add_argument("--p", type=int, default=4, help="field extension degree (GF(2^p))")
    g.add_argument("--k", type=int, default=9, help="RS dimension")
    g.add_argument("--w", type=int, default=1, help="SPC tuple width, must divide p")
    g.add_argument("--L", type=int, default=8, help="number of RS rows")
    g.add_argument("--primitive-poly", type=_int_auto, default=None,
                   help="override the field's primitive polynomial (e.g. 0x11d)")


def _add_sim_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("simulation")
    g.add_argument("--ebn0-start", type=float, default=4.0)
    g.add_argument("--ebn0-stop", type=float, default=6.0)
    g.add_argument("--ebn0-step", type=float, default=1.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--max-frames", type=int, default=10_000)
    g.add_argument("--block-size", type=int, default=250)
    g.add_argument("--workers", type=int, default=1)
    g.add_argument("--out", default="-", help="CSV destination ('-' for stdout)")

    d = p.add_argument_group("decoder")
    d.add_argument("--n1", type=int, default=10, help="inner iterations per outer pass")
    d.add_argument("--mode", default="lcs", help="lcs, hcs or n2=<int>")
    d.add_argument("--alpha1", type=float, default=0.32)
    d.add_argument("--alpha2", type=float, default=0.8)
    d.add_argument("--w-theta", type=float, default=0.06)
    d.add_argument("--llr-clamp", type=float, default=128.0)


def _sim_config(args, **extra) -> SimConfig:
    field = build_field(args.p, args.primitive_poly)
    dec = DecoderConfig.for_mode(
        args.mode, field.q - 1, n1=args.n1, alpha1=args.alpha1, alpha2=args.alpha2,
        w_theta=args.w_theta, llr_clamp=args.llr_clamp,
    )
    return SimConfig(
        p=args.p, k=args.k, w=args.w, L=args.L, ebn0_db=_ebn0_grid(args), decoder=dec,
        max_frames=args.max_frames, block_size=args.block_size, seed=args.seed,
        primitive_poly=args.primitive_poly, workers=args.workers, **extra,
    )


def _open_out(path: str):
    return sys.stdout if path == "-" else open(path, "w", newline="")


def cmd_simulate(args) -> int:
    cfg = _sim_config(args, min_frame_errors=args.min_errors, genie=args.genie)
    results = run_sweep(cfg)
    write_csv(results, sys.stdout if args.out == "-" else args.out)
    return 0


def cmd_genie_sweep(args) -> int:
    cfg = _sim_config(args)
    rows = genie_sweep(cfg)
    fh = _open_out(args.out)
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["ebn0_db", "frames", "samples", "avg_soft_weight", "max_soft_weight"])
        for r in rows:
            writer.writerow([repr(r.ebn0_db), r.frames, r.samples, repr(r.avg_soft_weight),
                             repr(r.max_soft_weight)])
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


def cmd_analyze(args) -> int:
    m = ComplexityModel(rho=args.rho, n=args.n, k=args.k, p=args.p, w=args.w, L=args.L,
                        eta=args.eta, tpc_n=args.tpc_n, tpc_k=args.tpc_k, tpc_p=args.tpc_p)
    lam = (args.n - args.k) // 2 if args.lam is None else args.lam
    node = predicted_cn_vn_ops(m)
    norm = normalized_complexity(m, args.i_avg, args.tpc_i_avg)
    report = {
        "undetected_bound": undetected_bound(args.n + 1, (args.n - args.k) // 2, lam),
        "cn_ops_per_iteration": node.n_cn,
        "vn_ops_per_iteration": node.n_vn,
        "node_ops_approx": node.approx,
        "real_ops_per_bit": norm.real_ops,
        "bm_per_bit": norm.bm_per_bit,
        "tpc_real_ops_per_bit": norm.tpc_real_ops,
        "tpc_bm_per_bit": norm.tpc_bm_per_bit,
        "parity_check_mults_per_bit": norm.parity_check_mults,
        "tpc_parity_check_mults_per_bit": norm.tpc_parity_check_mults,
        "bm_mult_bound": bm_mult_bound(args.n, args.k),
        "tpc_bm_mult_bound": bm_mult_bound(args.tpc_n, args.tpc_k),
        "table": complexity_table(m, args.i_avg, args.tpc_i_avg),
    }
    if args.json:
        json.dump(report, sys.stdout, indent=2)
        sys.stdout.write("\n")
        return 0
    for key, value in report.items():
        if key == "table":
            continue
        print(f"{key:32s} {value:.6g}")
    for scheme, row in report["table"].items():
        cells = "  ".join(f"{k}={v:.4g}" for k, v in row.items())
        print(f"table[{scheme}]  {cells}")
    return 0


def cmd_matrix(args) -> int:
    rs = build_rs(build_field(args.p, args.primitive_poly), args.k)
    pc = build_product(rs, args.w, args.L)
    m = expand(rs) if args.which == "expanded" else pc.h_tilde
    if args.out != "-" or not args.summary_only:
        fh = _open_out(args.out)
        try:
            write_alist(m, fh)
        finally:
            if fh is not sys.stdout:
                fh.close()
    upper_ones = pc.L * m.ones
    upper_size = pc.L * m.words.shape[0] * pc.n_p
    lower_size = pc.n_spc * pc.n_p
    summary = (
        f"# H({rs.n},{rs.k},{args.w},{args.L}): {pc.n_checks} x {pc.n_p}, rate {pc.rate:.6f}\n"
        f"# component {args.which}: {m.words.shape[0]} x {m.cols}, density {m.density:.4f}\n"
        f"# upper part: {pc.L * m.words.shape[0]} rows, density {upper_ones / upper_size:.6f}\n"
        f"# lower part: {pc.n_spc} rows of weight {pc.spc_row_weight}, "
        f"density {pc.n_spc * pc.spc_row_weight / lower_size:.6f}\n"
    )
    (sys.stderr if args.out == "-" and not args.summary_only else sys.stdout).write(summary)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rsspc", description="RS-SPC product code simulator")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="BER/FER sweep over Eb/N0")
    _add_code_args(sim)
    _add_sim_args(sim)
    sim.add_argument("--min-errors", type=int, default=100, help="frame errors per point before stopping")
    sim.add_argument("--genie", choices=[GENIE_OFF, GENIE_AUDIT, GENIE_GATE], default=GENIE_OFF,
                     help="audit: count wrong freezes; gate: freeze only correct rows")
    sim.set_defaults(func=cmd_simulate)

    gs = sub.add_parser("genie-sweep", help="soft-weight statistics of correct decodings")
    _add_code_args(gs)
    _add_sim_args(gs)
    gs.set_defaults(func=cmd_genie_sweep)

    an = sub.add_parser("analyze", help="closed-form bounds and complexity")
    an.add_argument("--rho", type=float, default=0.35)
    an.add_argument("--n", type=int, default=255)
    an.add_argument("--k", type=int, default=239)
    an.add_argument("--p", type=int, default=8)
    an.add_argument("--w", type=int, default=4)
    an.add_argument("--L", type=int, default=32)
    an.add_argument("--i-avg", type=float, default=2.0)
    an.add_argument("--tpc-i-avg", type=float, default=None)
    an.add_argument("--eta", type=int, default=4)
    an.add_argument("--tpc-n", type=int, default=63)
    an.add_argument("--tpc-k", type=int, default=61)
    an.add_argument("--tpc-p", type=int, default=6)
    an.add_argument("--lam", type=int, default=None, help="correction radius (defaults to t)")
    an.add_argument("--json", action="store_true")
    an.set_defaults(func=cmd_analyze)

    mx = sub.add_parser("matrix", help="dump a component parity-check matrix (alist)")
    _add_code_args(mx)
    mx.add_argument("--which", choices=["expanded", "sparse"], default="sparse")
    mx.add_argument("--out", default="-")
    mx.add_argument("--summary-only", action="store_true")
    mx.set_defaults(func=cmd_matrix)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

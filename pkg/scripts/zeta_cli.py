"""
Zeta functions of nondegenerate curves on the torus, from the command line.

Usage examples:

  python scripts/zeta_cli.py info curves/diamond_f7.txt
  python scripts/zeta_cli.py zeta curves/diamond_f7.txt --json
  python scripts/zeta_cli.py verify curves/genus2_f5.txt --kmax 3

Exit codes: 0 ok, 1 a pipeline stage failed, 2 usage or curve file error,
3 the zeta function disagrees with brute-force counts.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import random
import sys

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import numpy as np  # noqa: E402

from config import Config  # noqa: E402
from utils.curve_io import Curve, parse_curve  # noqa: E402
from utils.logging_setup import configure_logging  # noqa: E402
from zeta_engine.errors import ParseError, StageError, ZetaError  # noqa: E402
from zeta_engine.nondegen import normalize_input  # noqa: E402
from zeta_engine.oracle import compare_counts  # noqa: E402
from zeta_engine.polytope import constants  # noqa: E402
from zeta_engine.zeta import compute_zeta, determine_precision  # noqa: E402

logger = logging.getLogger("zeta_cli")

EXIT_OK = 0
EXIT_STAGE = 1
EXIT_USAGE = 2
EXIT_MISMATCH = 3


def curve_info(curve: Curve) -> dict:
    g, Q, U = normalize_input(curve.poly)
    consts = constants(Q)
    plan = determine_precision(Q, curve.spec.p, curve.spec.n)
    return {
        "p": curve.spec.p,
        "n": curve.spec.n,
        "q": curve.spec.q,
        "vertices": [list(v) for v in Q.vertices],
        "transform": {"matrix": [list(r) for r in U.matrix], "shift": list(U.shift)},
        "genus": Q.genus,
        "boundary_points": Q.boundary_count,
        "volume_x2": Q.volume_x2,
        "chi": [consts.chi1, consts.chi2],
        "kappa": [consts.kappa1, consts.kappa2],
        "M": consts.M,
        "Delta": consts.Delta,
        "precision_N": plan.N,
    }


def _print_info(info: dict) -> None:
    print(f"F_{info['q']} (p={info['p']}, n={info['n']})")
    print(f"normalized vertices: {info['vertices']}")
    print(f"genus g={info['genus']}  boundary points R={info['boundary_points']}  Vol={info['volume_x2'] / 2:g}")
    print(f"chi={info['chi']}  kappa={info['kappa']}  M={info['M']}  Delta={info['Delta']}")
    print(f"planned precision N={info['precision_N']}")


def _print_result(data: dict) -> None:
    print(f"chi(t) = {data['chi']}")
    print(f"P(t)   = {data['P']}")
    print(f"g={data['genus']} R={data['boundary_points']} N={data['precision_N']}")
    for k, nk in data["point_counts"]:
        print(f"  N_{k} = {nk}")


def main(argv: list[str]) -> int:
    ap = argparse.ArgumentParser(description="Zeta functions of nondegenerate curves over finite fields")
    ap.add_argument("--log-level", default=None, help="Overrides ZETA_LOG_LEVEL")
    ap.add_argument("--seed", type=int, default=0, help="Seed for any randomized helper")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def add_common(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("curve", help="Curve file")
        sp.add_argument("--json", action="store_true", help="Emit JSON")

    add_common(sub.add_parser("info", help="Polytope data and planned precision, no pipeline run"))
    for name, text in (("zeta", "Compute the zeta function"), ("verify", "Compute and compare with brute force")):
        sp = sub.add_parser(name, help=text)
        add_common(sp)
        sp.add_argument("--kmax", type=int, default=Config.DEFAULT_KMAX)
        sp.add_argument("--precision-override", type=int, default=None, help="Expert: skip the precision plan")
        sp.add_argument("--threads", type=int, default=Config.THREADS, help="Worker processes for the Frobenius matrix")

    args = ap.parse_args(argv)
    configure_logging(args.log_level)
    random.seed(args.seed)
    np.random.seed(args.seed)

    if getattr(args, "kmax", 1) < 1:
        ap.error("--kmax must be >= 1")

    try:
        curve = parse_curve(args.curve)
    except (OSError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        if args.cmd == "info":
            info = curve_info(curve)
            print(json.dumps(info)) if args.json else _print_info(info)
            return EXIT_OK

        result = compute_zeta(curve.poly, precision_override=args.precision_override, threads=args.threads)
        data = result.to_dict(args.kmax)
        if args.cmd == "zeta":
            print(json.dumps(data)) if args.json else _print_result(data)
            return EXIT_OK

        report = compare_counts(curve.poly, result, args.kmax)
        if args.json:
            data["verification"] = report.to_dict()
            print(json.dumps(data))
        else:
            _print_result(data)
            for k, oracle, zeta, match in report.rows:
                print(f"  k={k}: brute force {oracle}, zeta {zeta}  {'ok' if match else 'MISMATCH'}")
        return EXIT_OK if report.all_match else EXIT_MISMATCH
    except StageError as exc:
        logger.exception("stage %s failed", exc.stage)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STAGE
    except ZetaError as exc:
        logger.exception("command %s failed", args.cmd)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STAGE


if __name__ == "__main__":
    raise SystemExit(main(sys.argv[1:]))

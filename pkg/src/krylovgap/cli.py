"""Command line entry point: ``krylovgap {spectrum,compat,bound,lowrank,sweep}``.

Matrices come from ``--matrix`` (Matrix Market or CSV) or are generated from
``--spectrum``/``--m``/``--n``; generated problems use the same per-trial
streams as trial 0 of a sweep with the same ``--seed``.  Results are JSON on
stdout.  Exit status: 0 success, 1 soundness violation, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .bounds import GaplessProblem
from .errors import KrylovGapError
from .harness import (
    GUESS_MODES, ExperimentConfig, generate_guess, generate_test_matrix, run_sweep, trial_rng,
)
from .io import dumps, read_matrix, write_matrix_market
from .lowrank import lowrank_certificate
from .matrix_core import thin_svd
from .spectrum import DEFAULT_CLUSTER_TOL, cluster_spectrum, partition_svd


def _add_matrix_args(p, guess=True):
    src = p.add_argument_group("matrix")
    src.add_argument("--matrix", help="Matrix Market (.mtx) or CSV file")
    src.add_argument("--spectrum", help='singular values, e.g. "3,2*3,1"')
    src.add_argument("--m", type=int, help="rows of the generated matrix")
    src.add_argument("--n", type=int, help="columns of the generated matrix")
    p.add_argument("--cluster-tol", type=float, default=DEFAULT_CLUSTER_TOL)
    if guess:
        g = p.add_argument_group("starting guess")
        g.add_argument("--guess", choices=GUESS_MODES, default="random")
        g.add_argument("--guess-file", help="read X from a file instead")
        g.add_argument("--r", type=int, help="columns of X (default h)")
        g.add_argument("--eps", type=float, default=1e-2, help="perturbation size")


def _load_matrix(args):
    if args.matrix:
        return read_matrix(args.matrix)
    if not args.spectrum:
        raise KrylovGapError("give --matrix or --spectrum")
    s = args.spectrum
    m = args.m or len(s.split(","))
    n = args.n or m
    return generate_test_matrix(s, m, n, trial_rng(args.seed, 0, 0))


def _load_problem(args):
    A = _load_matrix(args)
    svd = thin_svd(A)
    if args.guess_file:
        X = read_matrix(args.guess_file)
    else:
        X = generate_guess(svd, args.h, args.guess, trial_rng(args.seed, 0, 1), args.eps,
                           args.r, args.cluster_tol)
    return GaplessProblem(A, X, args.h, svd=svd, cluster_tol=args.cluster_tol)


def cmd_spectrum(args):
    A = _load_matrix(args)
    svd = thin_svd(A)
    out = {"shape": list(A.shape), "sigma": svd.sigma, "rank": svd.rank,
           "clusters": [list(c) for c in cluster_spectrum(svd.sigma, args.cluster_tol, svd.rank)]}
    if args.h is not None:
        out["partition"] = partition_svd(svd, args.h, args.cluster_tol).as_dict()
    print(dumps(out), end="")
    return 0


def cmd_compat(args):
    P = _load_problem(args)
    c = P.compatibility
    print(dumps({"h": args.h, "compatible": c.compatible, "margin_angle": c.margin_angle,
                 "max_angle": c.max_angle, "partition": P.partition.as_dict()}), end="")
    return 0


def cmd_bound(args):
    P = _load_problem(args)
    th = args.theorem
    if th == "t31":
        cert = P.thm31(args.q)
    elif th == "c32":
        cert = P.cor32(args.q)
    elif th == "t33":
        cert = P.thm33(args.q, args.t)
    else:
        cert = P.thm34(args.q, args.t)
    print(dumps(cert.as_dict()), end="")
    return 0 if cert.sound() else 1


def cmd_lowrank(args):
    P = _load_problem(args)
    cert, res = lowrank_certificate(None, P.X, args.h, args.q, args.t, args.theta0, problem=P)
    if args.write_uhat:
        write_matrix_market(args.write_uhat, res.U_hat, comment="approximate left dominant basis")
    print(dumps({"certificate": cert.as_dict(), "result": res.as_dict()}), end="")
    return 0 if cert.sound() else 1


def cmd_sweep(args):
    cfg = ExperimentConfig.from_json(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.json:
        cfg.json_path = args.json
    if args.csv:
        cfg.csv_path = args.csv
    report = run_sweep(cfg, threads=args.threads)
    print(dumps(report["summary"]), end="")
    return 1 if report["summary"]["violations"] else 0


def build_parser():
    p = argparse.ArgumentParser(prog="krylovgap", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", help="cluster structure and enclosing gaps")
    _add_matrix_args(sp, guess=False)
    sp.add_argument("--h", type=int)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_spectrum)

    cp = sub.add_parser("compat", help="h-compatibility of a starting guess")
    _add_matrix_args(cp)
    cp.add_argument("--h", type=int, required=True)
    cp.add_argument("--seed", type=int, default=0)
    cp.set_defaults(func=cmd_compat)

    bp = sub.add_parser("bound", help="one subspace certificate")
    _add_matrix_args(bp)
    bp.add_argument("--theorem", choices=("t31", "c32", "t33", "t34"), required=True)
    bp.add_argument("--h", type=int, required=True)
    bp.add_argument("--q", type=int, default=1)
    bp.add_argument("--t", type=int, default=0)
    bp.add_argument("--seed", type=int, default=0)
    bp.set_defaults(func=cmd_bound)

    lp = sub.add_parser("lowrank", help="block Krylov low-rank approximation with certificate")
    _add_matrix_args(lp)
    lp.add_argument("--h", type=int, required=True)
    lp.add_argument("--q", type=int, default=1)
    lp.add_argument("--t", type=int, default=0)
    lp.add_argument("--theta0", type=float, default=float(np.pi / 4))
    lp.add_argument("--write-uhat", help="Matrix Market path for the computed basis")
    lp.add_argument("--seed", type=int, default=0)
    lp.set_defaults(func=cmd_lowrank)

    wp = sub.add_parser("sweep", help="run an experiment grid from a JSON config")
    wp.add_argument("config")
    wp.add_argument("--json", help="report path (overrides config)")
    wp.add_argument("--csv", help="table path (overrides config)")
    wp.add_argument("--threads", type=int, help="worker threads (default: $KRYLOVGAP_THREADS or 1)")
    wp.add_argument("--seed", type=int)
    wp.set_defaults(func=cmd_sweep)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (KrylovGapError, ValueError, OSError) as exc:
        print(f"krylovgap {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""
Seeded test problems and reproducible certificate sweeps.

Every trial draws from its own stream ``SeedSequence([seed, trial, stream])``
(stream 0: test matrix, stream 1: starting guess), so a trial's numbers do
not depend on which worker ran it or in what order.
"""
from __future__ import annotations

import csv
import io as _io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import GaplessProblem
from .errors import InvalidArgument, KrylovGapError
from .io import dumps
from .lowrank import lowrank_certificate
from .matrix_core import thin_svd

SCHEMA = "krylovgap.sweep/1"
THREADS_ENV = "KRYLOVGAP_THREADS"
GUESS_MODES = ("exact-dominant", "perturbed", "random", "adversarial-orthogonal")
CSV_COLUMNS = (
    "seed", "q", "t", "h", "lhs2", "rhs2", "lhsF", "rhsF", "conditionLHS",
    "errF_h", "optF_h", "delta_h", "violations",
)


def parse_spectrum(spec):
    """Singular values from a list or a cluster string like ``"3,2*3,1"``.

    ``"v*c"`` repeats ``v`` ``c`` times, so ``"3,2*3,1"`` is ``(3, 2, 2, 2, 1)``.
    """
    if isinstance(spec, str):
        out = []
        for tok in spec.replace(" ", "").split(","):
            if not tok:
                raise InvalidArgument(f"empty entry in spectrum {spec!r}")
            val, _, count = tok.partition("*")
            try:
                v, c = float(val), int(count) if count else 1
            except ValueError as exc:
                raise InvalidArgument(f"bad spectrum entry {tok!r}") from exc
            if c < 1:
                raise InvalidArgument(f"repeat count must be positive in {tok!r}")
            out.extend([v] * c)
        s = np.array(out)
    else:
        s = np.asarray(spec, dtype=float).ravel()
    if s.size == 0 or not np.all(np.isfinite(s)):
        raise InvalidArgument("spectrum must be a non-empty finite sequence")
    if np.any(s < 0) or np.any(np.diff(s) > 0):
        raise InvalidArgument("spectrum must be non-negative and non-increasing")
    return s


def trial_rng(seed, trial, stream):
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(trial), int(stream)]))


def trial_seed(seed, trial):
    """Reported per-trial seed (first word of the trial's seed sequence)."""
    return int(np.random.SeedSequence([int(seed), int(trial)]).generate_state(1)[0])


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def haar_orthogonal(n, rng):
    """Haar-distributed orthogonal matrix: QR of a Gaussian with sign-fixed ``diag(R)``."""
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    d = np.sign(np.diag(R))
    d[d == 0] = 1.0
    return Q * d


def generate_test_matrix(spectrum, m, n, seed=0):
    """``A = U diag(sigma) V^T`` with seeded Haar factors.

    Parameters
    ----------
    spectrum : str or sequence of float
        Explicit values or cluster string (see :func:`parse_spectrum`).
    m, n : int
    seed : int or numpy.random.Generator
    """
    s = parse_spectrum(spectrum)
    if len(s) > min(m, n):
        raise InvalidArgument(f"{len(s)} singular values do not fit a {m}x{n} matrix")
    rng = _rng(seed)
    U = haar_orthogonal(m, rng)
    V = haar_orthogonal(n, rng)
    p = len(s)
    return (U[:, :p] * s) @ V[:, :p].T


def generate_guess(svd, h, mode="random", seed=0, eps=1e-2, r=None, cluster_tol=None):
    """Starting guess ``X`` (``n x r``, default ``r = h``).

    Modes
    -----
    exact-dominant
        ``V_h`` padded with further right singular vectors.
    perturbed
        ``V_h + eps * G``, columns normalised.
    random
        Gaussian.
    adversarial-orthogonal
        Columns avoiding ``R(V_k)`` (or ``R(V_j)`` when ``k = n``), so no
        h-dimensional dominant subspace is reachable.
    """
    from .spectrum import DEFAULT_CLUSTER_TOL, partition_svd

    if mode not in GUESS_MODES:
        raise InvalidArgument(f"unknown guess mode {mode!r}; choose from {GUESS_MODES}")
    rng = _rng(seed)
    n = svd.V.shape[0]
    r = h if r is None else int(r)
    if r < 1:
        raise InvalidArgument("r must be positive")
    if mode == "random":
        return rng.standard_normal((n, r))
    if mode == "exact-dominant":
        return np.array(svd.V[:, :r]) if r <= n else np.hstack([svd.V, rng.standard_normal((n, r - n))])
    if mode == "perturbed":
        X = np.array(svd.V[:, :h]) + eps * rng.standard_normal((n, h))
        if r > h:
            X = np.hstack([X, rng.standard_normal((n, r - h))])
        return X / np.linalg.norm(X, axis=0)
    part = partition_svd(svd, h, cluster_tol or DEFAULT_CLUSTER_TOL)
    if n > part.k:
        return svd.V[:, part.k:] @ rng.standard_normal((n - part.k, r))
    if part.j >= 1:
        return svd.V[:, part.j:] @ rng.standard_normal((n - part.j, r))
    if h > 1:
        return np.tile(rng.standard_normal((n, 1)), (1, r))
    return np.zeros((n, r))


@dataclass
class ExperimentConfig:
    """Sweep description; a pure function of its fields and ``seed``."""

    spectrum: str | list
    m: int
    n: int
    h: int
    q_grid: list = field(default_factory=lambda: [0, 1, 2])
    t_grid: list = field(default_factory=lambda: [0, 1])
    guess_mode: str = "random"
    eps: float = 1e-2
    r: int | None = None
    trials: int = 4
    seed: int = 0
    theta0: float = float(np.pi / 4)
    cluster_tol: float = 1e-10
    krylov_tol: float = 1e-10
    slack: float = 1e-8
    monotone_span: int = 5
    json_path: str | None = None
    csv_path: str | None = None

    def validate(self):
        if not self.q_grid or not self.t_grid:
            raise InvalidArgument("q_grid and t_grid must be non-empty")
        if any(int(v) != v or v < 0 for v in list(self.q_grid) + list(self.t_grid)):
            raise InvalidArgument("grid values must be non-negative integers")
        if self.trials < 1:
            raise InvalidArgument("trials must be positive")
        if self.guess_mode not in GUESS_MODES:
            raise InvalidArgument(f"unknown guess mode {self.guess_mode!r}")
        s = parse_spectrum(self.spectrum)
        if len(s) > min(self.m, self.n):
            raise InvalidArgument("spectrum longer than min(m, n)")
        if not 1 <= self.h <= int(np.sum(s > 0)):
            raise InvalidArgument(f"h={self.h} outside [1, rank]")
        if not 0 < self.theta0 < np.pi / 2:
            raise InvalidArgument("theta0 must lie in (0, pi/2)")
        return self

    @classmethod
    def from_dict(cls, d):
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise InvalidArgument(f"unknown config keys: {sorted(unknown)}")
        return cls(**d).validate()

    @classmethod
    def from_json(cls, path):
        try:
            with open(path) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise InvalidArgument(f"{path}: cannot read config ({exc})") from exc
        except json.JSONDecodeError as exc:
            raise InvalidArgument(f"{path}: invalid JSON ({exc})") from exc
        return cls.from_dict(data)


def _cert_summary(c):
    return {
        "theorem": c.theorem, "rhs2": c.rhs2, "rhsF": c.rhsF, "lhs2": c.lhs2, "lhsF": c.lhsF,
        "violations": c.violations(), "omitted": c.omitted, "witness_source": c.witness_source,
    }


def run_trial(config, trial):
    """All certificates of one trial; returns a JSON-ready dict."""
    rng_a, rng_x = trial_rng(config.seed, trial, 0), trial_rng(config.seed, trial, 1)
    A = generate_test_matrix(config.spectrum, config.m, config.n, rng_a)
    svd = thin_svd(A)
    X = generate_guess(svd, config.h, config.guess_mode, rng_x, config.eps, config.r,
                       config.cluster_tol)
    problem = GaplessProblem(A, X, config.h, svd=svd, cluster_tol=config.cluster_tol,
                             krylov_tol=config.krylov_tol, slack=config.slack)
    comp = problem.compatibility
    out = {
        "trial": trial, "seed": trial_seed(config.seed, trial),
        "partition": problem.partition.as_dict(),
        "compatible": comp.compatible, "margin_angle": comp.margin_angle,
        "violations": 0, "points": [],
    }
    if not comp.compatible:
        out["points"] = [{"q": q, "t": t, "skipped": "not compatible"}
                         for q in config.q_grid for t in config.t_grid]
        return out
    mono = problem.thm35(config.monotone_span)
    out["residual_monotonicity"] = mono
    mono_bad = sum(not v for v in mono["monotone"].values())
    per_q = {}
    for q in config.q_grid:
        per_q[q] = [problem.thm31(q), problem.cor32(q)]
    total = mono_bad + sum(len(c.violations()) for cs in per_q.values() for c in cs)
    for q in config.q_grid:
        for t in config.t_grid:
            certs = per_q[q] + [problem.thm33(q, t), problem.thm34(q, t)]
            point = {"q": q, "t": t}
            try:
                t37, res = lowrank_certificate(None, X, config.h, q, t, config.theta0, problem=problem)
                certs_all = certs + [t37]
                point["lowrank"] = {
                    "condition_lhs": t37.hypotheses["condition_lhs"],
                    "applicable": t37.hypotheses["applicable"],
                    "errF_h": float(res.errorsF[-1]), "optF_h": float(res.opt_errorsF[-1]),
                    "delta_h": float(res.deltas[-1]),
                    "errors2": res.errors2, "errorsF": res.errorsF, "deltas": res.deltas,
                }
                total += len(t37.violations())
            except KrylovGapError as exc:
                certs_all = certs
                point["lowrank"] = {"error": type(exc).__name__, "message": str(exc)}
            total += len(certs[2].violations()) + len(certs[3].violations())
            point["violations"] = sum(len(c.violations()) for c in certs_all)
            point["certificates"] = [_cert_summary(c) for c in certs_all]
            out["points"].append(point)
    out["violations"] = total
    return out


def _threads(threads):
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise InvalidArgument(f"{THREADS_ENV}={env!r} is not an integer") from exc
    return 1


def _csv_text(trials, config):
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    fmt = lambda x: "" if x is None else repr(float(x))
    rows = []
    for tr in trials:
        for pt in tr["points"]:
            rows.append((pt["q"], pt["t"], tr["trial"], tr, pt))
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    for q, t, _, tr, pt in rows:
        if "certificates" not in pt:
            w.writerow([tr["seed"], q, t, config.h] + [""] * 8 + [0])
            continue
        t34 = next(c for c in pt["certificates"] if c["theorem"] == "T34")
        lr = pt.get("lowrank", {})
        w.writerow([
            tr["seed"], q, t, config.h, fmt(t34["lhs2"]), fmt(t34["rhs2"]),
            fmt(t34["lhsF"]), fmt(t34["rhsF"]), fmt(lr.get("condition_lhs")),
            fmt(lr.get("errF_h")), fmt(lr.get("optF_h")), fmt(lr.get("delta_h")),
            pt["violations"],
        ])
    return buf.getvalue()


def run_sweep(config, threads=None):
    """Run every trial, write the JSON and CSV reports, return the report dict.

    Output is ordered by grid point then trial regardless of thread count;
    ``report["summary"]["violations"]`` is the exit-status signal.
    """
    config.validate()
    workers = _threads(threads)
    idx = range(config.trials)
    if workers == 1:
        trials = [run_trial(config, i) for i in idx]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            trials = list(pool.map(lambda i: run_trial(config, i), idx))
    report = {
        "schema": SCHEMA,
        "version": __version__,
        "theorems": ["T31", "C32", "T33", "T34", "T35", "T37"],
        "config": asdict(config),
        "trials": trials,
        "summary": {
            "trials": config.trials,
            "rows": config.trials * len(config.q_grid) * len(config.t_grid),
            "incompatible_trials": sum(not t["compatible"] for t in trials),
            "violations": sum(t["violations"] for t in trials),
        },
    }
    text_json = dumps(report)
    text_csv = _csv_text(trials, config)
    for path, text in ((config.json_path, text_json), (config.csv_path, text_csv)):
        if path:
            try:
                Path(path).write_text(text)
            except OSError as exc:
                raise OSError(f"{path}: cannot write report ({exc})") from exc
    report["_json"] = text_json
    report["_csv"] = text_csv
    return report

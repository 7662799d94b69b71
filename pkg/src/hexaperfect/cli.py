"""Command-line interface: ``hexaperfect construct|verify|scan|orbit|export``.

Every command writes deterministic JSON (sorted keys) to ``--out`` or stdout.
Exit codes: 0 pass, 1 verification failed, 2 bad arguments, 3 I/O or parse error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .doubly_perfect import (
    PhaseFunction,
    artisanal,
    classification_scan,
    derive_lambda3,
    fit_sector_pair,
    gf2n_lambda,
    is_doubly_perfect,
    orbit,
    quadratic_lambda,
    u_lambda,
)
from .hadamard import build_hadamard
from .matrix import ExactMatrix
from .phase_space import all_points
from .scalar import DEFAULT_TOL
from .two_unitary import box_product, flip, is_two_unitary, linear_ols, ols_to_unitary

EXIT_OK, EXIT_FAIL, EXIT_ARGS, EXIT_IO = 0, 1, 2, 3

KINDS = (
    "sparse",
    "sym",
    "quadratic",
    "gf2n",
    "ols",
    "product",
    "hadamard-G",
    "hadamard-H",
    "lambda3",
    "identity",
    "flip",
)
CHECKS = ("all", "unitary", "dual", "gamma", "dpf", "hadamard", "algebra")


class UsageError(Exception):
    """Bad command-line parameters (exit code 2)."""


class InputError(Exception):
    """Unreadable or unparsable input file (exit code 3)."""


@dataclass(frozen=True)
class JobConfig:
    backend: str = "exact"
    tol: float = DEFAULT_TOL
    threads: int = 1
    out: Optional[str] = None
    format: str = "json"

    def __post_init__(self):
        if self.backend not in ("exact", "float"):
            raise UsageError(f"unknown backend {self.backend!r}")
        if not self.tol > 0:
            raise UsageError("--tol must be positive")
        if self.threads < 1:
            raise UsageError("--threads must be at least 1")
        if self.format not in ("json", "csv"):
            raise UsageError(f"unknown format {self.format!r}")


# ---------------------------------------------------------------------------
# artifact files


def _phase_doc(lam: PhaseFunction, **extra) -> dict:
    return {"type": "phase_function", "function": lam.to_json(), **extra}


def _matrix_doc(M: ExactMatrix, **extra) -> dict:
    return {"type": "matrix", "matrix": M.to_json(), **extra}


def _dump(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def _emit(text: str, cfg: JobConfig) -> None:
    if cfg.out:
        try:
            with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise InputError(f"cannot write {cfg.out}: {exc}") from exc
    else:
        sys.stdout.write(text)


def load_artifact(path: str):
    """Return ``("phase_function", PhaseFunction)`` or ``("matrix", ExactMatrix)``."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    try:
        if doc["type"] == "phase_function":
            return "phase_function", PhaseFunction.from_json(doc["function"])
        if doc["type"] == "matrix":
            return "matrix", ExactMatrix.from_json(doc["matrix"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed artifact {path}: {exc}") from exc
    raise InputError(f"unknown artifact type {doc.get('type')!r}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from exc


def _seed_function(seed: str) -> PhaseFunction:
    if seed in ("sparse", "sym"):
        return artisanal(seed)
    kind, obj = load_artifact(seed)
    if kind != "phase_function":
        raise UsageError("seed file must hold a phase function")
    return obj


# ---------------------------------------------------------------------------
# commands


def cmd_construct(args, cfg: JobConfig) -> int:
    kind = args.kind
    if kind in ("sparse", "sym"):
        doc = _phase_doc(artisanal(kind), kind=kind)
    elif kind == "quadratic":
        d = args.d or 3
        n = args.n or 1
        entries = _int_list(args.N) if args.N else list(np.eye(2 * n, dtype=int).ravel())
        if len(entries) != (2 * n) ** 2:
            raise UsageError(f"--N needs {(2 * n) ** 2} entries for n = {n}")
        N = np.array(entries, dtype=np.int64).reshape(2 * n, 2 * n)
        if not np.array_equal(N, N.T):
            raise UsageError("--N must be symmetric")
        doc = _phase_doc(quadratic_lambda(N % d, d, n), kind=kind, N=N.tolist())
    elif kind == "gf2n":
        n = args.n or 2
        if n < 1:
            raise UsageError("--n must be positive")
        doc = _phase_doc(gf2n_lambda(n, args.alpha_index), kind=kind)
    elif kind == "ols":
        d = args.d or 3
        alpha = args.alpha if args.alpha is not None else 2
        try:
            K, L = linear_ols(d, alpha)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        doc = _matrix_doc(ols_to_unitary(K, L), kind=kind, latin_squares=[K.table, L.table])
    elif kind == "product":
        if args.left and args.right:
            left, right = (_load_matrix(p) for p in (args.left, args.right))
        else:
            d = args.d or 3
            try:
                left = right = ols_to_unitary(*linear_ols(d, 2))
            except ValueError as exc:
                raise UsageError(str(exc)) from exc
        doc = _matrix_doc(box_product(left, right, check=False), kind=kind)
    elif kind in ("hadamard-G", "hadamard-H"):
        pair = build_hadamard(_seed_function(args.seed))
        doc = _matrix_doc(pair.G if kind == "hadamard-G" else pair.H, kind=kind)
    elif kind == "lambda3":
        rep = derive_lambda3()
        doc = _phase_doc(rep.function, kind=kind, order=rep.order)
    elif kind == "identity":
        doc = _matrix_doc(ExactMatrix.identity((args.d or 3) ** 2), kind=kind)
    elif kind == "flip":
        doc = _matrix_doc(flip(args.d or 3), kind=kind)
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown kind {kind!r}")
    _emit(_dump(doc), cfg)
    return EXIT_OK


def _load_matrix(path: str) -> ExactMatrix:
    kind, obj = load_artifact(path)
    if kind != "matrix":
        raise UsageError(f"{path} does not hold a matrix")
    return obj


def _matrix_checks(M: ExactMatrix, checks: set, cfg: JobConfig) -> dict:
    out: dict = {}
    if checks & {"unitary", "dual", "gamma", "all"}:
        backend = cfg.backend
        flags = is_two_unitary(M, backend=backend, tol=cfg.tol) if backend == "float" else is_two_unitary(M)
        names = {"unitary": "unitary", "dual": "dual", "gamma": "gamma_dual"}
        for c, attr in names.items():
            if c in checks or "all" in checks:
                out[c] = getattr(flags, attr)
    if "hadamard" in checks:
        n = M.shape[0]
        unscaled = ExactMatrix(M.coeffs, M.conductor, 1)
        unimodular = bool(np.all(unscaled.entrywise_abs_sq() == 1))
        out["hadamard"] = unimodular and M.scale == n and is_two_unitary(M).two_unitary
    if "algebra" in checks:
        from .algebra import check_prop_equivalences

        rep = check_prop_equivalences(M, backend=cfg.backend, tol=cfg.tol)
        out["algebra"] = rep.consistent
        out["eta_sq"] = {k: str(v) for k, v in rep.eta_sq.items()}
    return out


def _function_checks(lam: PhaseFunction, checks: set, cfg: JobConfig) -> dict:
    out: dict = {}
    if checks & {"dpf", "all"}:
        fl = is_doubly_perfect(lam)
        out["dpf"] = fl.doubly
        out["dpf_detail"] = fl.to_json()
    if checks & {"unitary", "dual", "gamma", "all", "algebra"}:
        out.update(_matrix_checks(u_lambda(lam), checks - {"hadamard"}, cfg))
    if "hadamard" in checks or "all" in checks:
        pair = build_hadamard(lam)
        g, h = pair.flags()
        out["hadamard"] = g.two_unitary and h.two_unitary and pair.entries_unimodular()
    return out


def cmd_verify(args, cfg: JobConfig) -> int:
    checks = set(args.checks.split(","))
    bad = checks - set(CHECKS)
    if bad:
        raise UsageError(f"unknown checks: {', '.join(sorted(bad))}")
    kind, obj = load_artifact(args.target)
    results = _matrix_checks(obj, checks, cfg) if kind == "matrix" else _function_checks(obj, checks, cfg)
    verdicts = [v for k, v in results.items() if isinstance(v, bool)]
    passed = all(verdicts)
    report = {"target": os.path.basename(args.target), "type": kind, "backend": cfg.backend, "checks": results, "pass": passed}
    _emit(_dump(report), cfg)
    return EXIT_OK if passed else EXIT_FAIL


def cmd_scan(args, cfg: JobConfig) -> int:
    start = time.monotonic()
    report = classification_scan(threads=cfg.threads)
    elapsed = time.monotonic() - start
    doc = report.to_json()
    doc["orbit_sizes"] = [o.size for o in report.orbits]
    _emit(_dump(doc), cfg)
    if args.time_budget is not None and elapsed > args.time_budget:
        print(f"scan took {elapsed:.1f}s, over the {args.time_budget}s budget", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_orbit(args, cfg: JobConfig) -> int:
    lam = _seed_function(args.seed)
    if fit_sector_pair(lam) is None:
        raise UsageError("seed is outside the order-6 quadratic ansatz")
    entries = orbit(lam)
    doc = {
        "seed": args.seed if args.seed in ("sparse", "sym") else os.path.basename(args.seed),
        "size": len(entries),
        "entries": [
            {
                "G": e.group_element.tolist(),
                "PQ": e.pair.to_json() if e.pair is not None else None,
                "function": e.function.to_json(),
            }
            for e in entries
        ],
    }
    _emit(_dump(doc), cfg)
    return EXIT_OK


def _phase_csv(lam: PhaseFunction) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    coords = [f"a{i}" for i in range(2 * lam.n)]
    w.writerow(["index", *coords, "base", "exponent"])
    for i, (pt, e) in enumerate(zip(all_points(lam.d, lam.n), lam.exponent_array())):
        w.writerow([i, *(int(x) for x in pt), lam.base, int(e)])
    return buf.getvalue()


def cmd_export(args, cfg: JobConfig) -> int:
    kind, obj = load_artifact(args.source)
    if cfg.format == "csv":
        if kind != "phase_function" or not obj.is_exponent:
            raise UsageError("CSV export is only available for exponent tables")
        _emit(_phase_csv(obj), cfg)
        return EXIT_OK
    if cfg.backend == "float":
        M = obj if kind == "matrix" else u_lambda(obj)
        _emit(_dump({"type": "float_matrix", **M.to_float_json()}), cfg)
        return EXIT_OK
    doc = _phase_doc(obj) if kind == "phase_function" else _matrix_doc(obj)
    _emit(_dump(doc), cfg)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def _default_threads() -> int:
    raw = os.environ.get("HEXAPERFECT_THREADS")
    if raw is None:
        return 1
    try:
        return int(raw)
    except ValueError:
        return 0  # rejected by JobConfig


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--backend", choices=("exact", "float"), default="exact")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="float backend tolerance")
    common.add_argument("--threads", type=int, default=None, help="worker processes (default $HEXAPERFECT_THREADS or 1)")
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    parser = argparse.ArgumentParser(prog="hexaperfect", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", parents=[common], help="build a phase function or matrix")
    p.add_argument("kind", choices=KINDS)
    p.add_argument("--d", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--N", help="symmetric matrix, comma-separated row-major")
    p.add_argument("--alpha", type=int)
    p.add_argument("--alpha-index", type=int, default=1, dest="alpha_index")
    p.add_argument("--seed", default="sparse", help="sparse, sym or a phase-function file")
    p.add_argument("--left")
    p.add_argument("--right")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", parents=[common], help="check an artifact file")
    p.add_argument("target")
    p.add_argument("--checks", default="all", help=f"comma-separated subset of {', '.join(CHECKS)}")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("scan", parents=[common], help="exhaustive order-6 classification")
    p.add_argument("--time-budget", type=float, default=None, dest="time_budget", help="seconds; exit 1 if exceeded")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("orbit", parents=[common], help="list the orbit of a seed function")
    p.add_argument("seed", help="sparse, sym or a phase-function file")
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("export", parents=[common], help="convert an artifact to JSON or CSV")
    p.add_argument("source")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        threads = args.threads if args.threads is not None else _default_threads()
        cfg = JobConfig(args.backend, args.tol, threads, args.out, args.format)
        return args.func(args, cfg)
    except UsageError as exc:
        print(f"hexaperfect: error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except InputError as exc:
        print(f"hexaperfect: error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

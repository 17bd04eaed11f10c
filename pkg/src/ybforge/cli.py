"""``ybforge`` command line front end.

Exit codes: 0 all checks pass, 1 a check failed (reports written),
2 invalid configuration, 3 internal numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path
from typing import Any, Optional

from pydantic import ValidationError

from . import braiding, calculus, superize
from .config import JobConfig, load_config
from .errors import InvalidInputError, NumericalError
from .grading import DEFAULT_TOL, check_factor_axioms

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


def _finite(obj: Any) -> Any:
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def write_json(path: Path, obj: Any):
    path.write_text(json.dumps(_finite(obj), indent=2, sort_keys=True, allow_nan=False) + "\n")


def resolve_tol(cli_tol: Optional[float], cfg: JobConfig) -> float:
    if cli_tol is not None:
        return cli_tol
    if cfg.tolerance is not None:
        return cfg.tolerance
    env = os.environ.get("YBFORGE_TOL")
    return float(env) if env else DEFAULT_TOL


class Job:
    def __init__(self, cfg: JobConfig, tol: float):
        self.cfg = cfg
        self.tol = tol
        self.factor = cfg.commutation_factor()
        self.basis = cfg.graded_basis()
        if self.basis.group != self.factor.group:
            raise InvalidInputError("basis grades and factor use different groups")
        self.q = cfg.q.value
        if self.q == 0:
            raise InvalidInputError("q must be nonzero")
        tri = cfg.options.triangular
        self.R = braiding.build_color_hecke(
            self.factor, self.basis, self.q, cfg.variant, triangular=tri.value if tri else None
        )


def cmd_build(job: Job, out: Path) -> int:
    write_json(out / "operator.json", job.R.to_json())
    print(f"operator: dim={job.R.dim} nnz={job.R.nnz()} -> {out / 'operator.json'}")
    return EXIT_OK


def cmd_verify(job: Job, out: Path, which: str) -> int:
    ok = True
    if which in ("factor", "all"):
        opts = job.cfg.options
        axioms = check_factor_axioms(job.factor, opts.samples, opts.seed)
        report = axioms.to_json(job.tol)
        report["cocycle"] = superize.check_cocycle(job.factor, opts.samples, opts.seed)
        report["pass"] = report["pass"] and all(v <= job.tol for v in report["cocycle"].values())
        write_json(out / "factor.json", report)
        ok &= report["pass"]
        print(f"factor: pass={report['pass']}")
    if which in ("qybe", "all"):
        rep = braiding.check_qybe(job.R, job.tol)
        write_json(out / "qybe.json", rep.to_json())
        ok &= rep.passed
        print(f"qybe: residual={rep.residual:.3e} pass={rep.passed}")
    if which in ("hecke", "all"):
        rep = braiding.check_hecke(job.R, job.basis, job.q, job.tol)
        write_json(out / "hecke.json", rep.to_json())
        ok &= rep.passed
        print(f"hecke: signs={sorted(set(s.sign for s in rep.subspaces), key=str)} pass={rep.passed}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_reduce(job: Job, out: Path) -> int:
    rep = superize.check_reduction(job.R, job.basis, job.factor, job.q, job.tol, job.cfg.options.reduction_mode)
    write_json(out / "reduction.json", rep.to_json())
    print(f"reduction[{rep.mode}]: residual={rep.residual:.3e} even={rep.even} pass={rep.passed}")
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_calculus(job: Job, out: Path, action: str) -> int:
    triple = calculus.build_bcf(job.R, job.basis, job.factor, job.q)
    if action == "check":
        rep = calculus.check_consistency(triple, job.tol)
        write_json(out / "consistency.json", rep.to_json())
        for c in rep.conditions:
            print(f"{c.name}: residual={c.residual:.3e}")
        return EXIT_OK if rep.passed else EXIT_FAIL
    rs = calculus.emit_relations(triple)
    write_json(out / "relations.json", rs.to_json())
    (out / "relations.txt").write_text(rs.to_text())
    disp = calculus.check_emitted_against_display(rs, job.factor, job.q, job.tol)
    write_json(out / "display.json", disp.to_json())
    print(f"relations: {len(rs.plane)} plane, {len(rs.plane_raw)} raw, nilpotent={rs.nilpotent}")
    for w in rs.warnings:
        print(f"warning: {w}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ybforge", description="Build and verify color Hecke R-matrices.")
    p.add_argument("command", choices=["build", "verify", "reduce", "calculus"])
    p.add_argument("--config", required=True, type=Path)
    p.add_argument("--out", type=Path, default=Path("."))
    p.add_argument("--which", choices=["factor", "qybe", "hecke", "all"], default="all")
    p.add_argument("--action", choices=["check", "emit"], default="check")
    p.add_argument("--tol", type=float, default=None)
    return p


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config.read_text())
        tol = resolve_tol(args.tol, cfg)
        job = Job(cfg, tol)
    except (OSError, ValidationError, InvalidInputError, ValueError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    args.out.mkdir(parents=True, exist_ok=True)
    try:
        if args.command == "build":
            return cmd_build(job, args.out)
        if args.command == "verify":
            return cmd_verify(job, args.out, args.which)
        if args.command == "reduce":
            return cmd_reduce(job, args.out)
        return cmd_calculus(job, args.out, args.action)
    except InvalidInputError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, ArithmeticError) as exc:
        write_json(args.out / "error.json", {"error": str(exc), "kind": "numerical"})
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

"""Experiment orchestration and machine-readable outputs.

Stages: validate hypotheses, first eigenpair, extreme value, branch sweep,
mountain pass; each stage writes one JSON artifact and the sweep emits the
bifurcation table as CSV or JSON lines.  Every output embeds the seed, the
configuration hash, and the configuration itself, so a run is reproducible
from any of its artifacts.  Floats in the table are written with 17
significant digits; special states are flags, never NaN or infinities.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path as FsPath
from typing import Optional

import numpy as np

from .branches import Branch, SweepRow, prepare_context, sweep
from .domain import WeightField, build_domain
from .eigensolve import lambda1, validate_hypotheses
from .errors import ConfigError, InfeasibleConstraint, NehariError
from .functionals import ProblemData
from .presets import weight_from_profile

__all__ = ["RunConfig", "run", "emit_diagram", "main"]

_DEFAULTS = {
    "domain": {"dim": 1, "half_width": 8.0, "n": 241},
    "exponents": {"p": 2.0, "gamma": 3.0},
    "weights": {
        "h": {"profile": "plateau", "params": {"r": 3.5, "taper": 1.0}},
        "f": {"profile": "bump_annulus", "params": {"f_neg": 16.0}},
    },
    "eps_reg": 1e-10,
    "tau_sign": 1e-12,
    "lambda_grid": {"auto": {"count": 6, "extend": 0.02}},
    "tolerances": {"residual": 1e-6},
    "seed": 0,
    "restarts": 8,
    "continuation_steps": 8,
    "knots": 25,
    "mountain_pass": True,
    "format": "csv",
    "output_dir": "nehari-out",
}


_FREE_FORM = {".weights.h", ".weights.f", ".lambda_grid"}


def _merge(defaults: dict, override: dict, where: str = "") -> dict:
    out = {}
    for key, dval in defaults.items():
        if key in override:
            oval = override[key]
            if (isinstance(dval, dict) and isinstance(oval, dict)
                    and f"{where}.{key}" not in _FREE_FORM):
                out[key] = _merge(dval, oval, f"{where}.{key}")
            else:
                out[key] = oval
        else:
            out[key] = dval
    unknown = set(override) - set(defaults)
    if unknown:
        raise ConfigError(f"unknown config keys at '{where or 'top level'}': {sorted(unknown)}")
    return out


def _check_weight_spec(ws: dict, name: str) -> None:
    if not isinstance(ws, dict):
        raise ConfigError(f"weights.{name} must be a mapping")
    kinds = [k for k in ("profile", "file", "values") if k in ws]
    if len(kinds) != 1:
        raise ConfigError(
            f"weights.{name} needs exactly one of 'profile', 'file', 'values'"
        )
    unknown = set(ws) - {"profile", "params", "file", "values"}
    if unknown:
        raise ConfigError(f"unknown keys in weights.{name}: {sorted(unknown)}")


@dataclass(frozen=True, eq=False)
class RunConfig:
    """Fully defaulted run configuration.

    ``spec`` is the normalized key-value tree (defaults applied); it is
    echoed verbatim into every output together with its hash.
    """

    spec: dict
    path: Optional[str] = None

    @classmethod
    def from_dict(cls, d: dict, path: Optional[str] = None) -> "RunConfig":
        if not isinstance(d, dict):
            raise ConfigError("config root must be a key-value mapping")
        merged = _merge(_DEFAULTS, d)
        dom = merged["domain"]
        if dom["dim"] not in (1, 2):
            raise ConfigError("domain.dim must be 1 or 2")
        for name in ("h", "f"):
            _check_weight_spec(merged["weights"][name], name)
        if merged["format"] not in ("csv", "jsonl"):
            raise ConfigError("format must be 'csv' or 'jsonl'")
        lg = merged["lambda_grid"]
        if isinstance(lg, dict):
            if set(lg) != {"auto"} or "count" not in lg["auto"]:
                raise ConfigError("lambda_grid must be a list or {'auto': {'count': ...}}")
        elif not isinstance(lg, list):
            raise ConfigError("lambda_grid must be a list or an auto spec")
        return cls(spec=merged, path=path)

    @classmethod
    def from_file(cls, path: str) -> "RunConfig":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(raw, path=path)

    def to_dict(self) -> dict:
        return json.loads(json.dumps(self.spec))

    def __eq__(self, other) -> bool:
        return isinstance(other, RunConfig) and self.canonical() == other.canonical()

    def canonical(self) -> str:
        return json.dumps(self.spec, sort_keys=True, separators=(",", ":"))

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:16]

    # -- construction of solver inputs ------------------------------------

    def build_problem(self) -> ProblemData:
        dom_spec = self.spec["domain"]
        domain = build_domain(dom_spec["dim"], dom_spec["half_width"], dom_spec["n"])
        tau = self.spec["tau_sign"]

        def build_weight(ws: dict) -> WeightField:
            if "profile" in ws:
                return weight_from_profile(domain, ws["profile"], ws.get("params"), tau)
            if "file" in ws:
                values = np.load(ws["file"])
                return WeightField(domain, values, tau_sign=tau)
            if "values" in ws:
                shape = (domain.n,) * domain.dim
                return WeightField(domain, np.reshape(ws["values"], shape), tau_sign=tau)
            raise ConfigError("weight spec needs 'profile', 'file', or 'values'")

        exps = self.spec["exponents"]
        try:
            return ProblemData(
                p=float(exps["p"]),
                gamma=float(exps["gamma"]),
                h=build_weight(self.spec["weights"]["h"]),
                f=build_weight(self.spec["weights"]["f"]),
                eps_reg=float(self.spec["eps_reg"]),
            )
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"invalid problem definition: {exc}") from exc

    def lambda_values(self, lam1: float, lam_star: float) -> list[float]:
        lg = self.spec["lambda_grid"]
        if isinstance(lg, list):
            return sorted(float(v) for v in lg)
        auto = lg["auto"]
        count = int(auto["count"])
        extend = float(auto.get("extend", 0.02))
        # top point lands at lam*(1 + extend), so the grid straddles the
        # extreme value whenever extend > 0
        hi = lam_star * (1.0 + extend)
        pts = lam1 + (hi - lam1) * (np.arange(1, count + 1) / count)
        return [float(v) for v in pts]


def _seventeen(x: float) -> str:
    return format(float(x), ".17g")


_COLUMNS = ("lambda", "branch", "phi", "H", "F", "residual",
            "tail_fraction", "iterations", "status")


def _row_record(row: SweepRow) -> dict:
    rec: dict = {"lambda": row.lam, "branch": row.branch.value, "status": row.status}
    if row.point is not None:
        rep = row.point.report
        rec.update(
            phi=rep.energy, H=rep.p_part, F=rep.gamma_part,
            residual=rep.residual, tail_fraction=rep.tail_fraction,
            iterations=row.point.iterations,
        )
    else:
        rec.update(phi=None, H=None, F=None, residual=None,
                   tail_fraction=None, iterations=None)
    return rec


def emit_diagram(rows: list[SweepRow], fmt: str, path: FsPath, meta: dict) -> None:
    """Write the bifurcation table; CSV and JSON lines carry the same values."""
    if not rows:
        raise ValueError("no rows to emit")
    if fmt not in ("csv", "jsonl"):
        raise ValueError(f"unknown format {fmt!r}")
    records = [_row_record(r) for r in rows]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if fmt == "csv":
            fh.write("# " + " ".join(f"{k}={v}" for k, v in meta.items()) + "\n")
            fh.write(",".join(_COLUMNS) + "\n")
            for rec in records:
                cells = []
                for col in _COLUMNS:
                    v = rec[col]
                    if v is None:
                        cells.append("")
                    elif isinstance(v, float):
                        cells.append(_seventeen(v))
                    else:
                        cells.append(str(v))
                fh.write(",".join(cells) + "\n")
        else:
            fh.write(json.dumps({"_meta": meta}, sort_keys=True) + "\n")
            for rec in records:
                out = {k: (_seventeen(v) if isinstance(v, float) else v)
                       for k, v in rec.items()}
                fh.write(json.dumps(out, sort_keys=True) + "\n")


def _write_json(path: FsPath, payload: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


def run(config: RunConfig) -> int:
    """Execute the full pipeline; returns the process exit code.

    0 on full success, 2 on partial results (failed hypotheses, infeasible
    extreme value, or errored sweep rows), 1 on configuration errors.
    """
    try:
        data = config.build_problem()
        out_dir = FsPath(config.spec["output_dir"])
        out_dir.mkdir(parents=True, exist_ok=True)
    except (ConfigError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1

    seed = int(config.spec["seed"])
    meta = {"config_hash": config.config_hash(), "seed": seed}
    stamp = {"config": config.to_dict(), **meta}

    eigen = lambda1(data, seed=seed)
    _write_json(out_dir / "eigen.json", {
        **stamp,
        "lambda1": eigen.lam1,
        "residual": eigen.residual,
        "iterations": eigen.iterations,
        "normalization": eigen.normalization,
    })

    report = validate_hypotheses(data, eigen=eigen, seed=seed)
    _write_json(out_dir / "hypotheses.json", {**stamp, **report.to_dict()})
    if not report.all_hold():
        print("hypotheses failed on this weight configuration: "
              + json.dumps(report.to_dict()["details"], default=str)
              + "; stopping after the hypotheses report", file=sys.stderr)
        return 2

    try:
        ctx = prepare_context(
            data, seed=seed,
            restarts=int(config.spec["restarts"]),
            continuation_steps=int(config.spec["continuation_steps"]),
        )
    except InfeasibleConstraint as exc:
        _write_json(out_dir / "extreme.json", {**stamp, "status": "infeasible",
                                               "message": str(exc)})
        print(f"extreme value infeasible: {exc}", file=sys.stderr)
        return 2
    except NehariError as exc:
        _write_json(out_dir / "extreme.json", {**stamp, "status": "failed",
                                               "message": str(exc)})
        print(f"pipeline failed before the sweep: {exc}", file=sys.stderr)
        return 2

    ext = ctx.extreme
    _write_json(out_dir / "extreme.json", {
        **stamp,
        "status": "ok",
        "lambda1": ctx.eigen.lam1,
        "lambda_star": ext.lam_star,
        "constraint_active": ext.constraint_active,
        "f_at_min": ext.f_at_min,
        "t0": ext.t0,
        "constraint_residual": ext.constraint_residual,
        "mu0": ctx.mu0,
        "j_hat_star": ctx.j_hat_star,
        "continuation": [{"lambda": l, "value": v} for l, v in ctx.continuation],
        "at_star": {
            "phi": ctx.at_star.report.energy,
            "H": ctx.at_star.report.p_part,
            "F": ctx.at_star.report.gamma_part,
            "residual": ctx.at_star.report.residual,
            "tail_fraction": ctx.at_star.report.tail_fraction,
        },
    })

    lams = config.lambda_values(ctx.eigen.lam1, ext.lam_star)
    mp_on = bool(config.spec["mountain_pass"])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rows = sweep(lams, data, ctx, mountain_pass=mp_on, seed=seed,
                     knots=int(config.spec["knots"]))

    fmt = config.spec["format"]
    emit_diagram(rows, fmt, out_dir / f"branches.{fmt}", meta)

    mp_rows = [r for r in rows if r.branch is Branch.MOUNTAIN_PASS]
    _write_json(out_dir / "mountainpass.json", {
        **stamp,
        "entries": [
            {
                "lambda": r.lam,
                "status": r.status,
                "message": r.message,
                **({"phi": r.point.report.energy,
                    "residual": r.point.report.residual,
                    "tail_fraction": r.point.report.tail_fraction}
                   if r.point is not None else {}),
            }
            for r in mp_rows
        ],
    })

    errored = [r for r in rows if r.status not in ("ok", "Skipped")]
    if errored:
        print(f"{len(errored)} of {len(rows)} sweep rows errored", file=sys.stderr)
        return 2
    return 0


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="nehari-solve",
        description="Two-branch variational solver for the indefinite-weight "
                    "p-Laplacian on a truncated box.",
    )
    parser.add_argument("config", help="JSON configuration file")
    parser.add_argument("--seed", type=int, default=None, help="override the seed")
    parser.add_argument("--out", default=None, help="override the output directory")
    parser.add_argument("--format", choices=("csv", "jsonl"), default=None,
                        help="branch table format")
    parser.add_argument("--lambda-grid", default=None,
                        help="comma-separated explicit parameter values")
    parser.add_argument("--skip-mountain-pass", action="store_true",
                        help="skip the second-solution stage")
    args = parser.parse_args(argv)

    try:
        config = RunConfig.from_file(args.config)
        spec = config.to_dict()
        if args.seed is not None:
            spec["seed"] = args.seed
        if args.out is not None:
            spec["output_dir"] = args.out
        if args.format is not None:
            spec["format"] = args.format
        if args.lambda_grid is not None:
            spec["lambda_grid"] = [float(v) for v in args.lambda_grid.split(",")]
        if args.skip_mountain_pass:
            spec["mountain_pass"] = False
        config = RunConfig.from_dict(spec, path=args.config)
    except (ConfigError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    return run(config)


if __name__ == "__main__":
    sys.exit(main())

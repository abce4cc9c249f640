"""Command-line front end: constant lookup, operator application, experiment
execution, and sweep orchestration.

Configuration is a single JSON document; command-line flags override config
keys.  Unknown config keys are rejected.  Relative output paths resolve
against FRACGRAD_OUT_DIR when that variable is set.  Exit status: 0 all
verdicts pass, 1 experiment failure (report still written), 2 usage error.
"""

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field as dc_field
from multiprocessing import Pool

from . import field as field_mod
from . import fracops
from .constants import (
    CRITICAL,
    SUBCRITICAL,
    SUPERCRITICAL,
    classify_regime,
    herbst_constant,
    kernel_constants,
    morrey_constant,
    riesz_normalizer,
    sphere_area,
    twin_constants,
)
from .errors import DomainError
from .harness import EXPERIMENTS, Check, ExperimentReport, make_check, run_experiment

USAGE_ERROR = 2
FAILURE = 1

_CONFIG_KEYS = {
    "command",
    "experiment",
    "params",
    "seed",
    "out",
    "format",
    "no_timestamp",
    "jobs",
    "lattice",
    "op",
    "input",
    "tolerances",
}

_PARAM_FLAGS = ("n", "N", "L", "s", "p", "alpha", "kappa", "samples", "trials", "competitors")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    """Validated run description assembled from config file plus flags."""

    command: str
    params: dict = dc_field(default_factory=dict)
    experiment: str | None = None
    seed: int = 0
    out: str | None = None
    format: str = "json"
    no_timestamp: bool = False
    jobs: int | None = None
    lattice: dict = dc_field(default_factory=dict)
    op: str | None = None
    input: str | None = None
    tolerances: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        if self.command not in ("constants", "apply", "verify", "sweep"):
            raise UsageError(f"unknown command {self.command!r}")
        if self.format not in ("csv", "json"):
            raise UsageError(f"format must be csv or json, got {self.format!r}")
        if self.command in ("verify", "sweep"):
            if self.experiment not in EXPERIMENTS:
                raise UsageError(
                    f"experiment must be one of {sorted(EXPERIMENTS)}, got {self.experiment!r}"
                )
        if self.command == "sweep" and not self.lattice:
            raise UsageError("sweep needs a 'lattice' map in the config")
        if self.command == "apply" and (self.op is None or self.input is None):
            raise UsageError("apply needs --op and --input")


def _load_config(path):
    with open(path) as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise UsageError("config must be a JSON object")
    unknown = set(doc) - _CONFIG_KEYS
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    return doc


def _resolve_out(path):
    if path is None:
        return None
    base = os.environ.get("FRACGRAD_OUT_DIR")
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def _build_config(args):
    doc = _load_config(args.config) if args.config else {}
    params = dict(doc.get("params", {}))
    for key in _PARAM_FLAGS:
        value = getattr(args, key, None)
        if value is not None:
            params[key] = value
    merged = {
        "command": args.command,
        "params": params,
        "experiment": getattr(args, "experiment", None) or doc.get("experiment"),
        "seed": args.seed if args.seed is not None else doc.get("seed", 0),
        "out": getattr(args, "out", None) or doc.get("out"),
        "format": getattr(args, "format", None) or doc.get("format", "json"),
        "no_timestamp": bool(getattr(args, "no_timestamp", False) or doc.get("no_timestamp", False)),
        "jobs": getattr(args, "jobs", None) or doc.get("jobs"),
        "lattice": doc.get("lattice", {}),
        "op": getattr(args, "op", None) or doc.get("op"),
        "input": getattr(args, "input", None) or doc.get("input"),
        "tolerances": doc.get("tolerances", {}),
    }
    if doc.get("command") and doc["command"] != args.command:
        raise UsageError(
            f"config command {doc['command']!r} conflicts with CLI command {args.command!r}"
        )
    return RunConfig(**merged)


def _emit(text, out_path):
    if out_path is None:
        sys.stdout.write(text)
    else:
        resolved = _resolve_out(out_path)
        os.makedirs(os.path.dirname(resolved) or ".", exist_ok=True)
        with open(resolved, "w") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# constants command
# ---------------------------------------------------------------------------


def _constant_rows(params):
    if "n" not in params:
        raise UsageError("constants needs n")
    n = int(params["n"])
    p = float(params["p"]) if "p" in params else None
    s = float(params["s"]) if "s" in params else None
    alpha = float(params["alpha"]) if "alpha" in params else None

    rows = [("sphere_area", sphere_area(n))]
    if alpha is not None:
        rows.append(("riesz_normalizer", riesz_normalizer(n, alpha)))
        if p is not None and p > 1:
            regime = classify_regime(alpha, p, n)
            if regime == SUBCRITICAL:
                rows.append(("c_sub(alpha,p)", herbst_constant(n, p, alpha)))
            elif regime == SUPERCRITICAL:
                rows.append(("c_super(alpha,p)", morrey_constant(n, p, alpha)))
            else:
                rows.append(("adams_threshold", n / sphere_area(n)))
    if s is not None:
        kc = kernel_constants(n, s)
        rows += [
            ("c_ns", kc.c_ns),
            ("c_ns_plus", kc.c_ns_plus),
            ("c_ns_minus", kc.c_ns_minus),
            ("kappa_minus_s", kc.kappa_minus_s),
        ]
        if p is not None and p > 1:
            regime = classify_regime(s, p, n)
            tag = {SUBCRITICAL: "sub", CRITICAL: "critical", SUPERCRITICAL: "super"}[regime]
            if regime != SUBCRITICAL or p < n:
                rows.append((f"kappa_{tag}_minus", twin_constants(n, p, s, "-")))
            rows.append((f"kappa_{tag}_plus", twin_constants(n, p, s, "+")))
    return rows


def _cmd_constants(cfg):
    rows = _constant_rows(cfg.params)
    if cfg.format == "json":
        doc = {
            "params": cfg.params,
            "constants": [
                {"name": name, "value": value, "log_value": math.log(value)}
                for name, value in rows
            ],
        }
        _emit(json.dumps(doc, indent=2) + "\n", cfg.out)
    else:
        lines = ["constant,value,log_value"]
        lines += [f"{name},{value!r},{math.log(value)!r}" for name, value in rows]
        _emit("\n".join(lines) + "\n", cfg.out)
    return 0


# ---------------------------------------------------------------------------
# apply command
# ---------------------------------------------------------------------------


def _load_any_field(path):
    if path.endswith(".csv"):
        return field_mod.load_field_csv(path)
    return field_mod.load_field(path)


def _save_any_field(u, path):
    if path.endswith(".csv"):
        field_mod.save_field_csv(u, path)
    else:
        field_mod.save_field(u, path)


def _cmd_apply(cfg):
    u = _load_any_field(cfg.input)
    params = cfg.params
    op = cfg.op
    out = _resolve_out(cfg.out) or "out.fgf"
    if op == "frac_laplacian":
        result = fracops.frac_laplacian(u, float(params.get("s", 0.5)))
    elif op == "frac_laplacian_direct":
        result = fracops.frac_laplacian_direct(u, float(params.get("s", 0.5)))
    elif op == "riesz_potential":
        result = fracops.riesz_potential(u, float(params.get("alpha", 0.5)))
    elif op == "riesz_potential_direct":
        result = fracops.riesz_potential_direct(u, float(params.get("alpha", 0.5)))
    elif op == "riesz_transform":
        result = fracops.riesz_transform(u, int(params.get("axis", 0)))
    elif op in ("frac_gradient", "frac_gradient_direct"):
        fn = fracops.frac_gradient if op == "frac_gradient" else fracops.frac_gradient_direct
        grad = fn(u, float(params.get("s", 0.5)))
        stem, ext = os.path.splitext(out)
        for j, comp in enumerate(grad.components):
            _save_any_field(comp, f"{stem}.c{j}{ext}")
        return 0
    else:
        raise UsageError(f"unknown operator {op!r}")
    _save_any_field(result, out)
    return 0


# ---------------------------------------------------------------------------
# verify and sweep commands
# ---------------------------------------------------------------------------


def _apply_tolerance_overrides(report, overrides):
    if not overrides:
        return report
    checks = []
    for c in report.checks:
        if c.label in overrides and c.mode != "record":
            checks.append(
                make_check(c.label, c.measured, c.reference, float(overrides[c.label]), c.mode, c.provenance)
            )
        else:
            checks.append(c)
    return ExperimentReport(
        name=report.name,
        params=report.params,
        seed=report.seed,
        checks=tuple(checks),
        runtime_seconds=report.runtime_seconds,
        backend=report.backend,
    )


def _cmd_verify(cfg):
    report = run_experiment(cfg.experiment, cfg.params, int(cfg.seed))
    report = _apply_tolerance_overrides(report, cfg.tolerances)
    text = (
        report.to_json(with_timestamp=not cfg.no_timestamp)
        if cfg.format == "json"
        else report.to_csv(with_timestamp=not cfg.no_timestamp)
    )
    _emit(text, cfg.out)
    return 0 if report.verdict else FAILURE


def _lattice_points(lattice, fixed):
    keys = sorted(lattice)
    points = [dict(fixed)]
    for key in keys:
        values = lattice[key]
        points = [dict(pt, **{key: v}) for pt in points for v in values]
    return keys, points


def _sweep_worker(task):
    name, params, seed = task
    try:
        report = run_experiment(name, params, seed)
        return report.verdict, sum(c.passed for c in report.checks), len(report.checks), None
    except Exception as exc:  # surface per-point errors in the CSV
        return False, 0, 0, f"{type(exc).__name__}: {exc}"


def _cmd_sweep(cfg):
    keys, points = _lattice_points(cfg.lattice, cfg.params)
    tasks = [(cfg.experiment, pt, int(cfg.seed)) for pt in points]
    jobs = cfg.jobs or os.cpu_count() or 1
    if jobs > 1 and len(tasks) > 1:
        with Pool(processes=min(jobs, len(tasks))) as pool:
            results = pool.map(_sweep_worker, tasks)
    else:
        results = [_sweep_worker(t) for t in tasks]
    lines = []
    if not cfg.no_timestamp:
        from datetime import datetime, timezone

        lines.append(f"# timestamp={datetime.now(timezone.utc).isoformat()}")
    lines.append(",".join(keys + ["seed", "verdict", "checks_passed", "checks_total", "error"]))
    all_pass = True
    for pt, (verdict, passed, total, err) in zip(points, results):
        all_pass &= verdict
        row = [str(pt[k]) for k in keys]
        row += [str(int(cfg.seed)), "pass" if verdict else "fail", str(passed), str(total), err or ""]
        lines.append(",".join(row))
    _emit("\n".join(lines) + "\n", cfg.out)
    return 0 if all_pass else FAILURE


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _add_common(parser):
    parser.add_argument("--config", help="JSON config file; flags override its keys")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--out", help="output path (relative paths honor FRACGRAD_OUT_DIR)")
    parser.add_argument("--format", choices=("csv", "json"), default=None)
    parser.add_argument("--no-timestamp", dest="no_timestamp", action="store_true")
    parser.add_argument("--jobs", type=int, default=None)


def _add_param_flags(parser):
    parser.add_argument("--n", type=int)
    parser.add_argument("--N", type=int, dest="N")
    parser.add_argument("--L", type=float, dest="L")
    parser.add_argument("--s", type=float)
    parser.add_argument("--p", type=float)
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--kappa", type=float)
    parser.add_argument("--samples", type=int)
    parser.add_argument("--trials", type=int)
    parser.add_argument("--competitors", type=int)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fracgrad",
        description="fractional differential couple toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_const = sub.add_parser("constants", help="print every in-regime constant")
    _add_common(p_const)
    _add_param_flags(p_const)

    p_apply = sub.add_parser("apply", help="apply a named operator to a field file")
    _add_common(p_apply)
    _add_param_flags(p_apply)
    p_apply.add_argument("--op", help="operator name")
    p_apply.add_argument("--input", help="input field file (.csv or binary)")
    p_apply.add_argument("--axis", type=int, default=None)

    p_verify = sub.add_parser("verify", help="run one harness experiment")
    _add_common(p_verify)
    _add_param_flags(p_verify)
    p_verify.add_argument("--experiment", choices=sorted(EXPERIMENTS))

    p_sweep = sub.add_parser("sweep", help="run an experiment over a parameter lattice")
    _add_common(p_sweep)
    _add_param_flags(p_sweep)
    p_sweep.add_argument("--experiment", choices=sorted(EXPERIMENTS))

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _build_config(args)
        if getattr(args, "axis", None) is not None:
            cfg.params["axis"] = args.axis
        handler = {
            "constants": _cmd_constants,
            "apply": _cmd_apply,
            "verify": _cmd_verify,
            "sweep": _cmd_sweep,
        }[cfg.command]
        return handler(cfg)
    except (UsageError, DomainError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"fracgrad: error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())

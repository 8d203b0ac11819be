"""Batch analyses from a JSON run configuration.

Example configuration::

    {
      "family": "pauli",
      "rates": [1.0, 1.0, {"type": "tanh", "a": -1.0, "b": 1.0}],
      "T": 5.0,
      "N": 201
    }

Sweeps substitute ``"$name"`` placeholders in the rate specifications::

    "rates": ["$g", "$gt", "$gt", "$gt"],
    "sweep": {"parameters": {"g": {"min": -2, "max": 2, "steps": 41},
                             "gt": {"min": -2, "max": 2, "steps": 41}},
              "grid": 2}

Run with ``divdyn analyze config.json --out results/``.
"""
from __future__ import annotations

import argparse
import copy
import csv
import io
import itertools
import json
import logging
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from .engine import (ClassifyOptions, ConvergenceError, DivisibilityReport, HierarchyError,
                     NonInvertibleError, classify_timeline)
from .gpc import GpcRates
from .mub import UnsupportedDimensionError, check_dimension
from .phasecov import PhaseCovRates
from .qubit_pauli import PauliRates
from .rates import QuadratureError, rate_from_spec
from .verdict import Verdict

log = logging.getLogger(__name__)

FAMILIES = ("pauli", "gpc", "phasecov")
EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    family: str
    rates: list
    T: float
    N: int = 201
    d: int | None = None
    tol: float = 1e-9
    quad_tol: float = 1e-10
    compare_tol: float = 1e-12
    ode_tol: float = 1e-9
    oracles: bool = True
    seed: int = 0
    sweep: dict | None = None
    output: dict = field(default_factory=lambda: {"dir": ".", "json": "report.json",
                                                   "csv": "timeline.csv",
                                                   "sweep_csv": "sweep.csv"})

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(0.0, self.T, self.N)

    def to_dict(self) -> dict:
        return asdict(self)


def _expected_arity(family: str, d: int | None) -> int:
    return d + 1 if family == "gpc" else 3


def _placeholders(obj) -> set[str]:
    if isinstance(obj, str):
        return {obj[1:]} if obj.startswith("$") else set()
    if isinstance(obj, dict):
        return set().union(*(_placeholders(v) for v in obj.values())) if obj else set()
    if isinstance(obj, list):
        return set().union(*(_placeholders(v) for v in obj)) if obj else set()
    return set()


def substitute(obj, values: dict[str, float]):
    """Replace ``"$name"`` strings by numbers, recursively."""
    if isinstance(obj, str) and obj.startswith("$"):
        return float(values[obj[1:]])
    if isinstance(obj, dict):
        return {k: substitute(v, values) for k, v in obj.items()}
    if isinstance(obj, list):
        return [substitute(v, values) for v in obj]
    return obj


def _validate_sweep(sweep, rates) -> dict:
    if not isinstance(sweep, dict) or not isinstance(sweep.get("parameters"), dict) or not sweep["parameters"]:
        raise ConfigError("sweep needs a non-empty 'parameters' mapping")
    params = {}
    for name, rng in sweep["parameters"].items():
        try:
            lo, hi, steps = float(rng["min"]), float(rng["max"]), int(rng["steps"])
        except (KeyError, TypeError, ValueError):
            raise ConfigError(f"sweep parameter {name!r} needs numeric min, max, steps") from None
        if steps < 1 or hi < lo:
            raise ConfigError(f"sweep parameter {name!r} has an empty range")
        params[name] = {"min": lo, "max": hi, "steps": steps}
    missing = _placeholders(rates) - set(params)
    if missing:
        raise ConfigError(f"rate placeholders without sweep range: {sorted(missing)}")
    out = {"parameters": params, "grid": int(sweep.get("grid", 2)),
           "oracles": bool(sweep.get("oracles", False))}
    if out["grid"] < 2:
        raise ConfigError("sweep grid needs at least 2 points")
    return out


def parse_config(text: str | dict) -> RunConfig:
    try:
        data = json.loads(text) if isinstance(text, str) else copy.deepcopy(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    family = data.get("family")
    if family not in FAMILIES:
        raise ConfigError(f"unknown family {family!r}; expected one of {FAMILIES}")
    d = data.get("d")
    if family == "gpc":
        if not isinstance(d, int) or isinstance(d, bool):
            raise ConfigError("gpc family needs an integer dimension 'd'")
        check_dimension(d)
    elif d not in (None, 2):
        raise ConfigError(f"family {family!r} is a qubit family; 'd' must be omitted or 2")
    else:
        d = None
    rates = data.get("rates")
    if not isinstance(rates, list):
        raise ConfigError("'rates' must be a list of rate specifications")
    if len(rates) != _expected_arity(family, d):
        raise ConfigError(f"family {family!r} needs {_expected_arity(family, d)} rates, got {len(rates)}")
    sweep = data.get("sweep")
    if sweep is not None:
        sweep = _validate_sweep(sweep, rates)
    elif _placeholders(rates):
        raise ConfigError("rate placeholders are only allowed together with a sweep block")
    probe = substitute(rates, {k: v["min"] for k, v in sweep["parameters"].items()}) if sweep else rates
    for spec in probe:
        try:
            rate_from_spec(spec)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    try:
        T = float(data["T"])
    except (KeyError, TypeError, ValueError):
        raise ConfigError("time horizon 'T' is required and must be a number") from None
    if not T > 0:
        raise ConfigError("time horizon T must be positive")
    cfg = RunConfig(family=family, rates=rates, T=T, d=d, sweep=sweep)
    for key in ("N", "seed"):
        if key in data:
            if not isinstance(data[key], int) or isinstance(data[key], bool):
                raise ConfigError(f"{key!r} must be an integer")
            setattr(cfg, key, data[key])
    for key in ("tol", "quad_tol", "compare_tol", "ode_tol"):
        if key in data:
            setattr(cfg, key, float(data[key]))
    if "oracles" in data:
        cfg.oracles = bool(data["oracles"])
    if "output" in data:
        cfg.output = {**cfg.output, **data["output"]}
    if cfg.N < 2:
        raise ConfigError("grid size N must be at least 2")
    if cfg.seed < 0 or cfg.seed >= 2**64:
        raise ConfigError("seed must fit in an unsigned 64-bit integer")
    return cfg


def build_generator(family: str, rate_specs: Sequence, d: int | None = None):
    rates = [rate_from_spec(s) for s in rate_specs]
    if family == "pauli":
        return PauliRates(*rates)
    if family == "gpc":
        return GpcRates(d, tuple(rates))
    return PhaseCovRates(*rates)


def _options(cfg: RunConfig, oracles: bool) -> ClassifyOptions:
    return ClassifyOptions(oracles=oracles, seed=cfg.seed, psd_tol=cfg.tol,
                           compare_tol=cfg.compare_tol, quad_tol=cfg.quad_tol,
                           ode_check=oracles, ode_tol=cfg.ode_tol)


@dataclass
class SweepCell:
    parameters: dict[str, float]
    cp: Verdict
    p: Verdict
    d: Verdict
    fired: tuple[str, ...]


def run_sweep(cfg: RunConfig) -> list[SweepCell]:
    params = cfg.sweep["parameters"]
    names = list(params)
    axes = [np.linspace(p["min"], p["max"], p["steps"]) for p in params.values()]
    grid = np.linspace(0.0, cfg.T, cfg.sweep["grid"])
    opts = _options(cfg, cfg.sweep["oracles"])
    cells = []
    for combo in itertools.product(*axes):
        values = dict(zip(names, (float(x) for x in combo)))
        g = build_generator(cfg.family, substitute(cfg.rates, values), cfg.d)
        report = classify_timeline(g, grid, opts)
        summary = report.summary()
        fired = sorted({name for pt in report.points for name in pt.fired})
        cells.append(SweepCell(values, summary["cp"], summary["p"], summary["d"], tuple(fired)))
    return cells


def run(cfg: RunConfig) -> tuple[DivisibilityReport | None, list[SweepCell] | None]:
    """Classify the configured timeline, or every sweep cell when a sweep is present."""
    if cfg.sweep is not None:
        return None, run_sweep(cfg)
    g = build_generator(cfg.family, cfg.rates, cfg.d)
    return classify_timeline(g, cfg.grid, _options(cfg, cfg.oracles)), None


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def timeline_csv(report: DivisibilityReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "cp", "p", "d", "fired_certificates"])
    for pt in report.points:
        w.writerow([_fmt(pt.t), pt.cp.value, pt.p.value, pt.d.value, ";".join(pt.fired)])
    return buf.getvalue()


def sweep_csv(cells: Sequence[SweepCell]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    names = list(cells[0].parameters) if cells else []
    w.writerow(names + ["cp", "p", "d", "fired_certificates"])
    for c in cells:
        w.writerow([_fmt(c.parameters[n]) for n in names]
                   + [c.cp.value, c.p.value, c.d.value, ";".join(c.fired)])
    return buf.getvalue()


def report_document(report: DivisibilityReport | None, cfg: RunConfig,
                    cells: Sequence[SweepCell] | None = None) -> dict[str, Any]:
    doc: dict[str, Any] = {"version": __version__, "seed": cfg.seed, "config": cfg.to_dict()}
    if report is not None:
        doc.update({
            "family": report.family,
            "d": report.d,
            "summary": {k: v.value for k, v in report.summary().items()},
            "points": [{"t": pt.t, "cp": pt.cp.value, "p": pt.p.value, "d": pt.d.value,
                        "fired": list(pt.fired), "failed": list(pt.failed),
                        "rates": list(pt.rates)} for pt in report.points],
            "oracles": {
                "agree": report.oracles_agree,
                "ode_max_error": report.ode_max_error,
                "ode_agrees": report.ode_agrees,
                "records": [{"kind": o.kind, "s": o.s, "t": o.t,
                             "choi_min_eigenvalue": o.choi_min_eigenvalue,
                             "cp_oracle": o.cp_oracle, "positive_oracle": o.positive_oracle,
                             "rate_cp": o.rate_cp.value, "rate_p": o.rate_p.value,
                             "cp_agrees": o.cp_agrees, "p_agrees": o.p_agrees}
                            for o in report.oracles],
            },
        })
    if cells is not None:
        doc["sweep"] = [{"parameters": c.parameters, "cp": c.cp.value, "p": c.p.value,
                         "d": c.d.value, "fired": list(c.fired)} for c in cells]
    return doc


def emit_report(report: DivisibilityReport | None, cfg: RunConfig, out_dir: str | Path,
                cells: Sequence[SweepCell] | None = None) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"json": out / cfg.output["json"]}
    doc = report_document(report, cfg, cells)
    paths["json"].write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    if report is not None:
        paths["csv"] = out / cfg.output["csv"]
        paths["csv"].write_text(timeline_csv(report), encoding="utf-8", newline="\n")
    if cells is not None:
        paths["sweep_csv"] = out / cfg.output["sweep_csv"]
        paths["sweep_csv"].write_text(sweep_csv(cells), encoding="utf-8", newline="\n")
    return paths


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="divdyn", description="Divisibility analysis of qubit/qudit dynamical maps")
    sub = ap.add_subparsers(dest="command", required=True)
    an = sub.add_parser("analyze", help="classify CP/P/D-divisibility over a time grid")
    an.add_argument("config", help="path to a JSON run configuration")
    an.add_argument("--out", default=None, help="output directory (default: config 'output.dir')")
    an.add_argument("--seed", type=int, default=None, help="RNG seed for oracle sampling")
    an.add_argument("--no-oracles", action="store_true", help="skip numerical oracles")
    an.add_argument("--grid", type=int, default=None, metavar="N", help="number of grid points")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        text = Path(args.config).read_text(encoding="utf-8")
        cfg = parse_config(text)
        if args.seed is not None:
            if not 0 <= args.seed < 2**64:
                raise ConfigError("seed must fit in an unsigned 64-bit integer")
            cfg.seed = args.seed
        if args.no_oracles:
            cfg.oracles = False
        if args.grid is not None:
            if args.grid < 2:
                raise ConfigError("grid size N must be at least 2")
            cfg.N = args.grid
    except (OSError, ConfigError, UnsupportedDimensionError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        report, cells = run(cfg)
    except (QuadratureError, ConvergenceError, HierarchyError, NonInvertibleError,
            OverflowError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    paths = emit_report(report, cfg, args.out or cfg.output["dir"], cells)
    if report is not None:
        summary = ", ".join(f"{k.upper()}={v.value}" for k, v in report.summary().items())
        print(f"{report.family}: {summary}")
    for kind, path in paths.items():
        print(f"wrote {kind}: {path}")
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())

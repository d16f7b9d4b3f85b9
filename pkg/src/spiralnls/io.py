"""Run configuration, solution persistence, and report serialization.

Config files are flat key-value text (``key = value``, ``#`` comments);
unknown keys are rejected so typos cannot silently fall back to defaults.
Solutions persist as CSV with a typed header block carrying the grid and
model parameters; values print with full round-trip precision, so save/load
is bit-exact.  Reports and manifests are plain JSON.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

import numpy as np

from .diagnostics import SymmetryReport, symmetry_report
from .errors import ConfigError
from .grid import Field, ModelParams, PolarGrid, build_grid, sector_from_label
from .minimize import SolveConfig, SolveReport

ENV_OUTDIR = "SPIRALNLS_OUTDIR"
ARTIFACT_VERSION = "spiralnls 0.1.0"
SOLUTION_MAGIC = "# spiralnls-solution v1"

_BOOL = {"true": True, "false": False, "1": True, "0": False,
         "yes": True, "no": False}


def _parse_bool(text: str) -> bool:
    try:
        return _BOOL[text.strip().lower()]
    except KeyError:
        raise ConfigError(f"not a boolean: {text!r}") from None


def _parse_floats(text: str):
    return tuple(float(x) for x in text.replace(",", " ").split())


# key -> (parser, default); None default means "must be set by the command"
_SCHEMA = {
    "p": (float, 4.0),
    "q": (int, 1),
    "lambda": (float, 1.0),
    "sector": (str, "full"),
    "R": (float, 30.0),
    "nr": (int, 512),
    "ntheta": (int, 64),
    "max_iters": (int, 2000),
    "grad_tol": (float, 1e-8),
    "step": (float, 1.0),
    "seed": (str, "radial"),
    "newton": (_parse_bool, True),
    "keep_trace": (_parse_bool, False),
    "lambdas": (_parse_floats, ()),
    "nt": (int, 32),
    "nxy": (int, 48),
    "extent": (float, 0.0),        # 0 means automatic
    "check_tol": (float, 1e-5),
    "out_dir": (str, ""),
}


@dataclass(frozen=True)
class RunConfig:
    entries: dict

    def __getitem__(self, key):
        return self.entries[key]

    def model_params(self) -> ModelParams:
        return ModelParams(p=self["p"], q=self["q"], lam=self["lambda"])

    def grid(self) -> PolarGrid:
        return build_grid(self["R"], self["nr"], self["ntheta"],
                          sector_from_label(self["sector"]))

    def solve_config(self) -> SolveConfig:
        return SolveConfig(
            max_iters=self["max_iters"], grad_tol=self["grad_tol"],
            step=self["step"], seed_kind=self["seed"],
            newton_refine=self["newton"], keep_trace=self["keep_trace"],
        )


def parse_config(text: str, overrides: dict | None = None) -> RunConfig:
    """Parse config text; overrides (e.g. from CLI flags) win over file values."""
    entries = {key: default for key, (_, default) in _SCHEMA.items()}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _SCHEMA:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        parser = _SCHEMA[key][0]
        try:
            entries[key] = parser(value)
        except (ValueError, ConfigError) as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from None
    for key, value in (overrides or {}).items():
        if key not in _SCHEMA:
            raise ConfigError(f"unknown override key {key!r}")
        entries[key] = _SCHEMA[key][0](value) if isinstance(value, str) else value
    return RunConfig(entries)


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(repr(float(x)) for x in value)
    return str(value)


def serialize_config(cfg: RunConfig) -> str:
    """Canonical text form: sorted keys, normalized value formatting."""
    lines = [f"{key} = {_format_value(cfg.entries[key])}"
             for key in sorted(cfg.entries)]
    return "\n".join(lines) + "\n"


def resolve_out_dir(cfg: RunConfig) -> str:
    out = cfg["out_dir"] or os.environ.get(ENV_OUTDIR, "") or "runs"
    os.makedirs(out, exist_ok=True)
    return out


# ---------------------------------------------------------------- solutions

def save_solution(path, field: Field, params: ModelParams) -> None:
    grid = field.grid
    sector = grid.sector
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(SOLUTION_MAGIC + "\n")
        fh.write(f"# p = {params.p!r}\n")
        fh.write(f"# q = {int(params.q)}\n")
        fh.write(f"# lambda = {params.lam!r}\n")
        fh.write(f"# sector = {sector.label()}\n")
        fh.write(f"# R = {grid.R!r}\n")
        fh.write(f"# nr = {grid.nr}\n")
        fh.write(f"# ntheta = {grid.ntheta}\n")
        fh.write("j,k,value\n")
        for j in range(grid.nr):
            row = field.values[j]
            for k in range(grid.ntheta):
                fh.write(f"{j},{k},{float(row[k])!r}\n")


def load_solution(path):
    """Read a solution file back into (Field, ModelParams); bit-exact."""
    meta = {}
    values = None
    with open(path, encoding="ascii") as fh:
        first = fh.readline().rstrip("\n")
        if first != SOLUTION_MAGIC:
            raise ConfigError(f"{path}: not a solution file")
        for raw in fh:
            line = raw.strip()
            if line.startswith("#"):
                key, _, val = line[1:].partition("=")
                meta[key.strip()] = val.strip()
                continue
            if line == "j,k,value":
                grid = build_grid(float(meta["R"]), int(meta["nr"]),
                                  int(meta["ntheta"]),
                                  sector_from_label(meta["sector"]))
                values = np.empty((grid.nr, grid.ntheta))
                continue
            j_s, k_s, v_s = line.split(",")
            values[int(j_s), int(k_s)] = float(v_s)
    if values is None or not np.all(np.isfinite(values)):
        raise ConfigError(f"{path}: missing or non-finite value block")
    params = ModelParams(p=float(meta["p"]), q=int(meta["q"]),
                         lam=float(meta["lambda"]))
    return Field(grid, values), params


# ------------------------------------------------------------------ reports

def _clean(x):
    if isinstance(x, float) and math.isnan(x):
        return None
    return x


def breakdown_dict(b) -> dict:
    return {"dirichlet": b.dirichlet, "angular": b.angular, "mass": b.mass,
            "potential": b.potential, "total": b.total}


def symmetry_dict(rep: SymmetryReport) -> dict:
    return {
        "nonradiality": rep.nonradiality,
        "linf": rep.linf,
        "radiality_threshold": _clean(rep.radiality_threshold
                                      if math.isfinite(rep.radiality_threshold)
                                      else math.nan),
        "below_threshold": rep.below_threshold,
        "angular_monotone": rep.angular_monotone,
        "wirtinger_ok": rep.wirtinger_ok,
    }


def report_dict(report: SolveReport, params: ModelParams) -> dict:
    grid = report.field.grid
    sym = symmetry_report(report.field, params)
    out = {
        "params": {"p": params.p, "q": int(params.q), "lambda": params.lam},
        "grid": {"R": grid.R, "nr": grid.nr, "ntheta": grid.ntheta,
                 "sector": grid.sector.label()},
        "energy": breakdown_dict(report.energy),
        "nehari": {"single": _clean(report.nehari.single),
                   "plus": _clean(report.nehari.plus),
                   "minus": _clean(report.nehari.minus)},
        "linf": report.linf,
        "h1": report.h1,
        "lambda_norm": report.lnorm,
        "lp_norm": report.lp,
        "iterations": report.iterations,
        "converged": report.converged,
        "nonradiality": report.nonradiality,
        "symmetry": symmetry_dict(sym),
    }
    if report.trace is not None:
        out["trace_tail"] = [list(row) for row in report.trace[-20:]]
    return out


def write_json(path, payload: dict) -> None:
    with open(path, "w", encoding="ascii") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


def write_manifest(path, command: str, cfg: RunConfig, outputs: list) -> None:
    write_json(path, {
        "artifact": ARTIFACT_VERSION,
        "command": command,
        "config": {k: _format_value(v) for k, v in sorted(cfg.entries.items())},
        "outputs": sorted(outputs),
    })


def write_csv(path, header: list, rows: list) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(
                repr(float(x)) if isinstance(x, float) else str(x)
                for x in row) + "\n")


def trace_rows(report: SolveReport):
    return [(it, e, gn) for (it, e, gn) in (report.trace or [])]

"""Strict parser for plain-text run configuration files.

The format is ``key = value`` grouped under the four sections ``[grid]``,
``[solver]``, ``[initial_data]``, ``[diagnostics]``.  Every key is checked
against the documented schema; unknown sections or keys are hard errors,
as are malformed values.  ``q = inf`` selects the sup across blocks.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass

from .errors import ConfigError
from .initial_data import random_divergence_free, taylor_green
from .lp import LPFilterBank, NormSpec, besov_norm
from .solver import SolverConfig
from .spectral import Grid, SpectralField

__all__ = ["RunPlan", "InitialDataSpec", "DiagnosticsSpec", "load_config", "build_initial_data"]

import numpy as np


@dataclass(frozen=True)
class InitialDataSpec:
    kind: str
    amplitude: float = 1.0
    seed: int = 0
    sigma: float = 3.0
    target_norm: float | None = None


@dataclass(frozen=True)
class DiagnosticsSpec:
    p: float = 2.0
    q: float = 2.0
    kappa: float = 2.0
    n_max: int = 3


@dataclass(frozen=True)
class RunPlan:
    solver: SolverConfig
    method: str
    initial: InitialDataSpec
    diagnostics: DiagnosticsSpec


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_extended(text: str) -> float:
    if text.strip().lower() == "inf":
        return math.inf
    return float(text)


_SCHEMA: dict[str, dict[str, object]] = {
    "grid": {"dim": int, "n_per_axis": int},
    "solver": {
        "T": float,
        "steps": int,
        "record_every": int,
        "substeps_quadrature": int,
        "dealias_fraction": float,
        "picard_tol": float,
        "picard_max_iters": int,
        "smallness_threshold": float,
        "method": str,
        "zero_mean": _parse_bool,
    },
    "initial_data": {
        "kind": str,
        "amplitude": float,
        "seed": int,
        "sigma": float,
        "target_norm": float,
    },
    "diagnostics": {"p": float, "q": _parse_extended, "kappa": float, "n_max": int},
}

_REQUIRED = [("grid", "dim"), ("grid", "n_per_axis"), ("solver", "T"),
             ("solver", "steps"), ("initial_data", "kind")]


def load_config(path: str) -> RunPlan:
    """Parse and validate a run configuration; every failure names its key."""
    parser = configparser.ConfigParser(interpolation=None, strict=True)
    parser.optionxform = str  # keys are case-sensitive as documented
    try:
        with open(path) as handle:
            parser.read_file(handle, source=path)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError("key outside any [section]", line=exc.lineno) from exc
    except configparser.ParsingError as exc:
        lineno = exc.errors[0][0] if getattr(exc, "errors", None) else None
        raise ConfigError(f"malformed config: {exc.message.splitlines()[0]}", line=lineno) from exc

    values: dict[str, dict[str, object]] = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]", key=section)
        values[section] = {}
        for key, raw in parser.items(section):
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]", key=f"{section}.{key}")
            converter = _SCHEMA[section][key]
            try:
                values[section][key] = converter(raw)
            except (ValueError, TypeError) as exc:
                raise ConfigError(
                    f"bad value for {section}.{key}: {raw!r} ({exc})", key=f"{section}.{key}"
                ) from exc
    for section, key in _REQUIRED:
        if key not in values.get(section, {}):
            raise ConfigError(f"missing required key {section}.{key}", key=f"{section}.{key}")

    try:
        grid = Grid(dim=values["grid"]["dim"], n_per_axis=values["grid"]["n_per_axis"])
    except ValueError as exc:
        raise ConfigError(str(exc), key="grid") from exc

    solver_in = dict(values.get("solver", {}))
    method = solver_in.pop("method", "step")
    if method not in ("step", "picard"):
        raise ConfigError(f"method must be 'step' or 'picard', got {method!r}", key="solver.method")
    diag_in = values.get("diagnostics", {})
    diag = DiagnosticsSpec(**diag_in)
    try:
        solver = SolverConfig(
            grid=grid, norm_p=diag.p, norm_q=diag.q, **solver_in
        )
    except ValueError as exc:
        raise ConfigError(str(exc), key="solver") from exc

    init_in = dict(values.get("initial_data", {}))
    kind = init_in.pop("kind")
    if kind not in ("taylor_green", "random", "zero"):
        raise ConfigError(
            f"kind must be taylor_green, random or zero, got {kind!r}", key="initial_data.kind"
        )
    initial = InitialDataSpec(kind=kind, **init_in)
    return RunPlan(solver=solver, method=method, initial=initial, diagnostics=diag)


def build_initial_data(plan: RunPlan) -> SpectralField:
    """Construct the configured initial velocity on the configured grid.

    Random data is rescaled to ``target_norm`` in the critical Besov norm
    when that key is present, otherwise multiplied by ``amplitude``.
    """
    grid = plan.solver.grid
    spec = plan.initial
    if spec.kind == "taylor_green":
        return taylor_green(grid, amplitude=spec.amplitude)
    if spec.kind == "zero":
        return SpectralField(grid, np.zeros((grid.dim,) + grid.shape, dtype=complex))
    field = random_divergence_free(grid, seed=spec.seed, sigma=spec.sigma,
                                   band_fraction=plan.solver.dealias_fraction)
    if spec.target_norm is not None:
        bank = LPFilterBank(grid)
        norm_spec = NormSpec(3.0 / plan.diagnostics.p - 1.0, plan.diagnostics.p, plan.diagnostics.q)
        current = besov_norm(field, norm_spec, bank)
        if current == 0.0:
            raise ConfigError("random field degenerated to zero; cannot hit target_norm")
        return (spec.target_norm / current) * field
    return spec.amplitude * field

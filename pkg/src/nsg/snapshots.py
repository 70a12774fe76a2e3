"""On-disk container for field snapshots and recorded trajectories.

Snapshot layout (``.nsgf``), fixed and covered by a golden-file test:

* line 1: ASCII magic ``NSGF 1``
* line 2: one JSON object with keys ``components``, ``dim``,
  ``n_per_axis``, ``time`` (sorted, compact separators)
* payload: ``components * n**dim`` coefficients as little-endian float64
  pairs (real, imaginary), C-order over (component, axis0, axis1[, axis2])
  in FFT storage order.

A trajectory is a directory holding ``manifest.json`` plus one snapshot
per recorded sample under ``fields/``.  Infinite norm indices are encoded
as the string ``"inf"`` so the manifest stays valid JSON.
"""

from __future__ import annotations

import json
import math
import os
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .ioutils import atomic_write_bytes, atomic_write_text
from .solver import SolutionTrajectory, SolverConfig
from .spectral import Grid, SpectralField

__all__ = [
    "save_field",
    "load_field",
    "save_trajectory",
    "load_trajectory",
]

_MAGIC = b"NSGF 1"


def save_field(field: SpectralField, t: float, path: str | os.PathLike) -> None:
    """Write one field snapshot; the write is atomic."""
    header = {
        "components": field.num_components,
        "dim": field.grid.dim,
        "n_per_axis": field.grid.n_per_axis,
        "time": float(t),
    }
    flat = field.coeffs.ravel(order="C")
    payload = np.empty(2 * flat.size, dtype="<f8")
    payload[0::2] = flat.real
    payload[1::2] = flat.imag
    blob = b"%s\n%s\n%s" % (
        _MAGIC,
        json.dumps(header, sort_keys=True, separators=(",", ":")).encode("ascii"),
        payload.tobytes(),
    )
    atomic_write_bytes(path, blob)


def load_field(path: str | os.PathLike) -> tuple[SpectralField, float]:
    """Read one snapshot back; returns the field and its time stamp."""
    raw = Path(path).read_bytes()
    first = raw.find(b"\n")
    second = raw.find(b"\n", first + 1)
    if first < 0 or second < 0 or raw[:first] != _MAGIC:
        raise ConfigError(f"{path}: not a field snapshot (bad magic)")
    try:
        header = json.loads(raw[first + 1 : second])
        grid = Grid(dim=int(header["dim"]), n_per_axis=int(header["n_per_axis"]))
        components = int(header["components"])
        t = float(header["time"])
    except (KeyError, ValueError, json.JSONDecodeError) as exc:
        raise ConfigError(f"{path}: malformed snapshot header: {exc}") from exc
    expected = components * grid.n_points
    data = np.frombuffer(raw[second + 1 :], dtype="<f8")
    if data.size != 2 * expected:
        raise ConfigError(
            f"{path}: payload holds {data.size // 2} coefficients, expected {expected}"
        )
    coeffs = (data[0::2] + 1j * data[1::2]).reshape((components,) + grid.shape)
    return SpectralField(grid, coeffs.copy()), t


def _encode_extended(x: float) -> float | str:
    return "inf" if math.isinf(x) else float(x)


def _decode_extended(x) -> float:
    return math.inf if x == "inf" else float(x)


def save_trajectory(
    traj: SolutionTrajectory, directory: str | os.PathLike, extra: dict | None = None
) -> None:
    """Persist a recorded trajectory as a manifest plus per-sample snapshots."""
    root = Path(directory)
    (root / "fields").mkdir(parents=True, exist_ok=True)
    names = []
    for i, (t, f) in enumerate(zip(traj.times, traj.fields)):
        name = f"fields/snap_{i:06d}.nsgf"
        save_field(f, float(t), root / name)
        names.append(name)
    cfg = traj.config
    manifest = {
        "format": "nsg-trajectory",
        "version": 1,
        "method": traj.method,
        "grid": {"dim": cfg.grid.dim, "n_per_axis": cfg.grid.n_per_axis},
        "solver": {
            "T": cfg.T,
            "steps": cfg.steps,
            "record_every": cfg.record_every,
            "substeps_quadrature": cfg.substeps_quadrature,
            "dealias_fraction": cfg.dealias_fraction,
            "picard_tol": cfg.picard_tol,
            "picard_max_iters": cfg.picard_max_iters,
            "smallness_threshold": cfg.smallness_threshold,
            "norm_p": cfg.norm_p,
            "norm_q": _encode_extended(cfg.norm_q),
            "zero_mean": cfg.zero_mean,
        },
        "times": [float(t) for t in traj.times],
        "snapshots": names,
    }
    if extra:
        manifest["extra"] = extra
    atomic_write_text(root / "manifest.json", json.dumps(manifest, sort_keys=True, indent=2) + "\n")


def load_trajectory(directory: str | os.PathLike) -> SolutionTrajectory:
    """Rebuild a trajectory (config, times, fields) from a run directory."""
    root = Path(directory)
    manifest_path = root / "manifest.json"
    if not manifest_path.is_file():
        raise ConfigError(f"{directory}: no manifest.json — not a trajectory directory")
    try:
        manifest = json.loads(manifest_path.read_text())
        grid = Grid(**{k: int(v) for k, v in manifest["grid"].items()})
        s = manifest["solver"]
        config = SolverConfig(
            grid=grid,
            T=float(s["T"]),
            steps=int(s["steps"]),
            record_every=int(s["record_every"]),
            substeps_quadrature=int(s["substeps_quadrature"]),
            dealias_fraction=float(s["dealias_fraction"]),
            picard_tol=float(s["picard_tol"]),
            picard_max_iters=int(s["picard_max_iters"]),
            smallness_threshold=float(s["smallness_threshold"]),
            norm_p=float(s["norm_p"]),
            norm_q=_decode_extended(s["norm_q"]),
            zero_mean=bool(s["zero_mean"]),
        )
        names = manifest["snapshots"]
        times = manifest["times"]
        method = manifest.get("method", "step")
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise ConfigError(f"{directory}: malformed manifest: {exc}") from exc
    fields = []
    for name, t in zip(names, times):
        f, t_stored = load_field(root / name)
        if abs(t_stored - float(t)) > 1e-12:
            raise ConfigError(f"{directory}/{name}: time stamp disagrees with manifest")
        fields.append(f)
    return SolutionTrajectory(config, np.array(times, dtype=float), fields, method=method)

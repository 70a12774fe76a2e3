"""Analyticity diagnostics: weighted norms, growth functionals, radii, decay.

Everything here consumes a recorded trajectory.  The exponential weight at
time ``t`` is always ``exp(sqrt(t) |k|_1)``, matching the parabolic
smoothing scale, and spatial norms are the critical-index Besov norms at
regularity ``3/p - 1`` unless stated otherwise.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .errors import DiagnosticImpossibleError, GevreyOverflowError
from .ioutils import atomic_write_text
from .lp import FieldSeries, LPFilterBank, NormSpec, besov_norm, epq_norm
from .solver import SolutionTrajectory, time_derivative_stack
from .spectral import SpectralField, derivative, gevrey_multiplier, to_physical

__all__ = [
    "RadiusEstimate",
    "RadiusScalingRow",
    "DecayRateReport",
    "ConstantsReport",
    "gevrey_sample_norms",
    "gevrey_epq_norm",
    "mixed_time_power_derivative",
    "f_n_norm",
    "operational_radius",
    "radius_scaling_probe",
    "derivative_decay_probe",
    "build_constants_report",
    "write_radius_csv",
    "write_decay_csv",
]

NOISE_FLOOR = 1e-13
RADIUS_BISECTION_TOL = 1e-4
_SAFE_EXP = 690.0


def _critical_spec(p: float, q: float) -> NormSpec:
    return NormSpec(3.0 / p - 1.0, p, q)


def _weighted_or_none(f: SpectralField, a: float) -> SpectralField | None:
    try:
        return gevrey_multiplier(f, a)
    except GevreyOverflowError:
        return None


def gevrey_sample_norms(
    traj: SolutionTrajectory, p: float, q: float, bank: LPFilterBank
) -> np.ndarray:
    """Per-sample norms ``||exp(sqrt(t) L) u(t)||`` at the critical index.

    Samples whose weight overflows the float range report ``inf`` — the
    radius of the field is below ``sqrt(t)`` there, and the norm is
    genuinely out of reach.
    """
    spec = _critical_spec(p, q)
    values = np.empty(len(traj))
    for i, (t, f) in enumerate(zip(traj.times, traj.fields)):
        weighted = _weighted_or_none(f, math.sqrt(float(t)))
        values[i] = math.inf if weighted is None else besov_norm(weighted, spec, bank)
    if np.all(np.isinf(values)):
        raise DiagnosticImpossibleError("the exponential weight overflowed at every sample")
    return values


def gevrey_epq_norm(
    traj: SolutionTrajectory, p: float, q: float, bank: LPFilterBank
) -> float:
    """Two-part critical norm of the exponentially weighted trajectory.

    Returns ``inf`` when the weight overflows at some (but not all) samples.
    """
    weighted: list[SpectralField] = []
    for t, f in zip(traj.times, traj.fields):
        w = _weighted_or_none(f, math.sqrt(float(t)))
        if w is None:
            weighted = []
            break
        weighted.append(w)
    if not weighted:
        # distinguish "some overflowed" from "all overflowed"
        gevrey_sample_norms(traj, p, q, bank)
        return math.inf
    series = FieldSeries(traj.times, weighted)
    return epq_norm(series, p, q, float(traj.times[-1]), bank)


def mixed_time_power_derivative(
    traj: SolutionTrajectory, i: int, n: int, m: int
) -> SpectralField:
    """``d^n/dt^n (t^m u)`` at recorded sample ``i``, via the derivative stack."""
    if n < 0 or m < 0:
        raise ValueError("derivative and power orders must be nonnegative")
    stack = time_derivative_stack(traj, n)
    t = float(traj.times[i])
    out = np.zeros_like(traj.fields[i].coeffs)
    for r in range(min(n, m) + 1):
        factor = math.comb(n, r) * math.perm(m, r) * t ** (m - r)
        out += factor * stack[n - r][i].coeffs
    return SpectralField(traj.grid, out)


def f_n_norm(
    traj: SolutionTrajectory, n: int, p: float, q: float, bank: LPFilterBank
) -> float:
    """Two-part critical norm of ``exp(sqrt(t) L) d^n/dt^n (t^n u)``.

    The order-``n`` growth functional; by design its size should scale like
    ``n**n`` with a geometric constant, and ``n = 0`` reduces to the plain
    weighted solution norm.
    """
    time_derivative_stack(traj, n)
    weighted: list[SpectralField] = []
    for i, t in enumerate(traj.times):
        core = mixed_time_power_derivative(traj, i, n, n)
        w = _weighted_or_none(core, math.sqrt(float(t)))
        if w is None:
            return math.inf
        weighted.append(w)
    series = FieldSeries(traj.times, weighted)
    return epq_norm(series, p, q, float(traj.times[-1]), bank)


@dataclass
class RadiusEstimate:
    """Two views of the analyticity radius of a single field."""

    rad_op: float
    rad_fit: float
    fit_r2: float
    kappa: float
    p: float
    q: float
    flags: dict[str, bool] = dataclass_field(default_factory=dict)


def _shell_amplitudes(f: SpectralField) -> np.ndarray:
    """Max coefficient magnitude per integer l1 shell."""
    shells = np.rint(f.grid.k_l1).astype(np.int64)
    mag = np.max(np.abs(f.coeffs), axis=0)
    out = np.zeros(int(shells.max()) + 1)
    np.maximum.at(out, shells.ravel(), mag.ravel())
    return out


def _linear_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Least-squares slope and R^2."""
    coeffs = np.polyfit(x, y, 1)
    pred = np.polyval(coeffs, x)
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(coeffs[0]), r2


def _fit_radius(f: SpectralField) -> tuple[float, float, dict[str, bool]]:
    amps = _shell_amplitudes(f)
    top = float(np.max(amps))
    if top == 0.0:
        return math.nan, 0.0, {"finite_support": True, "poor_fit": True}
    rel = amps / top
    kept = np.nonzero(rel >= NOISE_FLOOR)[0]
    peak = int(kept[np.argmax(rel[kept])])
    tail = kept[kept >= peak]
    flags = {"finite_support": False, "poor_fit": False}
    if tail.size < 3:
        flags["finite_support"] = True
        flags["poor_fit"] = True
        if tail.size < 2:
            return math.nan, 0.0, flags
        r0, r1 = tail
        slope = (math.log(rel[r1]) - math.log(rel[r0])) / (r1 - r0)
        return -slope, 1.0, flags
    slope, r2 = _linear_fit(tail.astype(float), np.log(rel[tail]))
    if r2 < 0.98:
        flags["poor_fit"] = True
    return -slope, r2, flags


def operational_radius(
    f: SpectralField, kappa: float, p: float, q: float, bank: LPFilterBank
) -> RadiusEstimate:
    """Estimate the analyticity radius of one field, two ways.

    ``rad_op`` is the largest weight ``a`` for which the exponentially
    amplified critical norm stays within factor ``kappa`` of the plain one
    (found by bisection to 1e-4, capped at the overflow-safe maximum).
    ``rad_fit`` is minus the fitted log-slope of the l1-shell amplitude
    profile from its peak down to the noise floor.
    """
    if kappa <= 1.0:
        raise ValueError(f"kappa must exceed 1, got {kappa}")
    spec = _critical_spec(p, q)
    base = besov_norm(f, spec, bank)
    if base == 0.0 or not math.isfinite(base):
        raise ValueError("radius undefined for zero or non-finite fields")

    mag = np.max(np.abs(f.coeffs), axis=0)
    k_l1 = f.grid.k_l1
    populated = (mag > 0.0) & (k_l1 > 0)
    if not np.any(populated):
        raise ValueError("field has no nonzero non-mean modes")
    with np.errstate(divide="ignore"):
        headroom = (_SAFE_EXP - np.log(mag[populated])) / k_l1[populated]
    a_max = float(np.min(headroom))

    def amplified(a: float) -> float:
        return besov_norm(gevrey_multiplier(f, a), spec, bank)

    flags: dict[str, bool] = {"radius_capped": False}
    lo, hi = 0.0, min(0.25, a_max)
    while amplified(hi) <= kappa * base and hi < a_max:
        lo = hi
        hi = min(2.0 * hi, a_max)
    if hi >= a_max and amplified(a_max) <= kappa * base:
        rad_op = a_max
        flags["radius_capped"] = True
    else:
        while hi - lo > RADIUS_BISECTION_TOL:
            mid = 0.5 * (lo + hi)
            if amplified(mid) <= kappa * base:
                lo = mid
            else:
                hi = mid
        rad_op = 0.5 * (lo + hi)

    rad_fit, fit_r2, fit_flags = _fit_radius(f)
    flags.update(fit_flags)
    return RadiusEstimate(rad_op=rad_op, rad_fit=rad_fit, fit_r2=fit_r2,
                          kappa=kappa, p=p, q=q, flags=flags)


@dataclass
class RadiusScalingRow:
    t: float
    rad_op: float
    rad_fit: float
    fit_r2: float
    rad_over_sqrt_t: float
    rad_over_sqrt_tlog: float | None


def radius_scaling_probe(
    traj: SolutionTrajectory, kappa: float, p: float, q: float, bank: LPFilterBank
) -> list[RadiusScalingRow]:
    """Radius estimates along a trajectory with square-root-law compensation.

    The column ``rad_over_sqrt_tlog`` divides by ``sqrt(t ln(1/t))`` and is
    empty for ``t >= 1`` where that compensator loses meaning.
    """
    rows = []
    for t, f in zip(traj.times, traj.fields):
        t = float(t)
        if t <= 0.0:
            continue
        est = operational_radius(f, kappa, p, q, bank)
        tlog = None
        if t < 1.0:
            tlog = est.rad_op / math.sqrt(t * math.log(1.0 / t))
        rows.append(
            RadiusScalingRow(
                t=t,
                rad_op=est.rad_op,
                rad_fit=est.rad_fit,
                fit_r2=est.fit_r2,
                rad_over_sqrt_t=est.rad_op / math.sqrt(t),
                rad_over_sqrt_tlog=tlog,
            )
        )
    return rows


@dataclass
class DecayRateReport:
    """Sup-norm decay of one space-time derivative along a trajectory."""

    alpha: tuple[int, ...]
    n: int
    times: np.ndarray
    raw_sup: np.ndarray
    compensated: np.ndarray
    fitted_exponent: float
    fit_window: tuple[float, float]


def derivative_decay_probe(
    traj: SolutionTrajectory, alpha: tuple[int, ...], n: int
) -> DecayRateReport:
    """Track ``sup |d_x^alpha d_t^n u|`` and its parabolic compensation.

    The compensated column multiplies by ``t**(|alpha|/2 + n)``; the decay
    exponent is fitted over the last decade of sampled times.
    """
    stack = time_derivative_stack(traj, n)
    order = sum(alpha)
    times, sups = [], []
    for i, t in enumerate(traj.times):
        t = float(t)
        if t <= 0.0:
            continue
        g = derivative(stack[n][i], alpha)
        sups.append(float(np.max(np.abs(to_physical(g)))))
        times.append(t)
    times_arr = np.array(times)
    raw = np.array(sups)
    compensated = times_arr ** (order / 2.0 + n) * raw
    t_hi = float(times_arr[-1])
    t_lo = t_hi / 10.0
    window = (times_arr >= t_lo) & (raw > 0.0)
    if np.count_nonzero(window) >= 2:
        slope, _ = _linear_fit(np.log(times_arr[window]), np.log(raw[window]))
    else:
        slope = math.nan
    return DecayRateReport(
        alpha=tuple(alpha),
        n=n,
        times=times_arr,
        raw_sup=raw,
        compensated=compensated,
        fitted_exponent=slope,
        fit_window=(t_lo, t_hi),
    )


@dataclass
class ConstantsReport:
    """Measured analogues of the constants in the derivative-growth bound."""

    rho_inv: float
    c_growth: float
    per_n: list[tuple[int, float]]


def build_constants_report(
    traj: SolutionTrajectory,
    p: float,
    q: float,
    bank: LPFilterBank,
    n_max: int = 3,
) -> ConstantsReport:
    """Fit the geometric base of the ``n``-th growth functional's size.

    ``rho_inv`` is the sup over samples of the weighted critical norm;
    ``c_growth`` the largest ``(||F_n|| / ||F_0||)**(1/n) / n`` over
    ``1 <= n <= n_max``.
    """
    if n_max < 1:
        raise ValueError(f"the growth fit needs n_max >= 1, got {n_max}")
    rho_inv = float(np.max(gevrey_sample_norms(traj, p, q, bank)))
    base = f_n_norm(traj, 0, p, q, bank)
    per_n = []
    for n in range(1, n_max + 1):
        fn = f_n_norm(traj, n, p, q, bank)
        per_n.append((n, (fn / base) ** (1.0 / n) / n))
    c_growth = max(v for _, v in per_n)
    return ConstantsReport(rho_inv=rho_inv, c_growth=c_growth, per_n=per_n)


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if v is None else v for v in row])
    return buf.getvalue()


def write_radius_csv(rows: list[RadiusScalingRow], path) -> None:
    """Emit the radius-scaling table; empty cell where the log compensator is undefined."""
    table = [
        [r.t, r.rad_op, r.rad_fit, r.fit_r2, r.rad_over_sqrt_t, r.rad_over_sqrt_tlog]
        for r in rows
    ]
    atomic_write_text(
        path,
        _csv_text(["t", "rad_op", "rad_fit", "fit_r2", "rad_over_sqrt_t", "rad_over_sqrt_tlog"], table),
    )


def write_decay_csv(report: DecayRateReport, path) -> None:
    """Emit the decay table; ``alpha`` is serialized as comma-joined integers."""
    alpha_text = ",".join(str(a) for a in report.alpha)
    table = [
        [t, raw, comp, alpha_text, report.n]
        for t, raw, comp in zip(report.times, report.raw_sup, report.compensated)
    ]
    atomic_write_text(path, _csv_text(["t", "raw_sup", "compensated", "alpha", "n"], table))

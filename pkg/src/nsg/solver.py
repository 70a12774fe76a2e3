"""Mild-formulation solver for the viscous incompressible equations.

The velocity is advanced in integral form

    u(t) = exp(t Lap) u0 - int_0^t exp((t-s) Lap) P div(u (x) u)(s) ds,

with the heat factor handled exactly per mode.  Two routes are provided:
a two-stage exponential Runge-Kutta stepper, and a Picard iteration that
applies the integral operator to whole trajectories until it contracts.
Both share one quadrature for the integral term: composite sub-intervals
per recorded interval, the quadratic term interpolated linearly between
nodes, and the exponential factor integrated in closed form against that
interpolant.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .errors import BlowupError, FixedPointDivergenceError
from .lp import FieldSeries, LPFilterBank, NormSpec, besov_norm, epq_norm
from .spectral import (
    DEFAULT_DEALIAS_FRACTION,
    Grid,
    SpectralField,
    advection_term,
    dealias,
    heat_semigroup,
)

__all__ = [
    "SolverConfig",
    "SolutionTrajectory",
    "PicardReport",
    "heat_part",
    "heat_trajectory",
    "step_solve",
    "picard_solve",
    "bilinear_duhamel",
    "duhamel_series",
    "mild_residual",
    "time_derivative_stack",
]

MAX_DERIVATIVE_ORDER = 4


@dataclass(frozen=True)
class SolverConfig:
    """Run parameters shared by both solver routes.

    ``record_every`` thins the recorded samples; the final time is always
    recorded.  ``substeps_quadrature`` sets the number of sub-intervals per
    recorded interval in the integral-term quadrature.  ``norm_p`` and
    ``norm_q`` fix the solution norm used for Picard distances, and
    ``smallness_threshold`` is the heat-flow norm below which contraction
    is expected.
    """

    grid: Grid
    T: float
    steps: int
    record_every: int = 1
    substeps_quadrature: int = 2
    dealias_fraction: float = DEFAULT_DEALIAS_FRACTION
    picard_tol: float = 1e-9
    picard_max_iters: int = 40
    smallness_threshold: float = 0.25
    norm_p: float = 2.0
    norm_q: float = 2.0
    zero_mean: bool = True

    def __post_init__(self):
        if self.T <= 0:
            raise ValueError(f"final time T must be positive, got {self.T}")
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        if self.record_every < 1:
            raise ValueError(f"record_every must be >= 1, got {self.record_every}")
        if self.substeps_quadrature < 1:
            raise ValueError(f"substeps_quadrature must be >= 1, got {self.substeps_quadrature}")
        if not 0.0 < self.dealias_fraction <= 1.0:
            raise ValueError(f"dealias_fraction must lie in (0, 1], got {self.dealias_fraction}")
        if self.picard_tol <= 0 or self.picard_max_iters < 1:
            raise ValueError("picard_tol must be positive and picard_max_iters >= 1")
        if not 1.0 < self.norm_p < math.inf:
            raise ValueError(f"norm_p must lie in (1, inf), got {self.norm_p}")
        if self.norm_q < 1.0:
            raise ValueError(f"norm_q must lie in [1, inf], got {self.norm_q}")


@dataclass
class SolutionTrajectory:
    """Recorded velocity samples of one run, plus lazily attached derivatives."""

    config: SolverConfig
    times: np.ndarray
    fields: list[SpectralField]
    method: str
    derivatives: dict[int, list[SpectralField]] = dataclass_field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=np.float64)

    @property
    def grid(self) -> Grid:
        return self.config.grid

    @property
    def initial(self) -> SpectralField:
        return self.fields[0]

    def __len__(self) -> int:
        return len(self.fields)

    def series(self) -> FieldSeries:
        return FieldSeries(self.times, self.fields)

    def heat_series(self) -> FieldSeries:
        u0 = self.initial
        return FieldSeries(self.times, [heat_semigroup(u0, float(t)) for t in self.times])

    def fluctuation(self, i: int) -> SpectralField:
        """Deviation from the linear evolution at sample ``i``."""
        return self.fields[i] - heat_semigroup(self.initial, float(self.times[i]))


@dataclass
class PicardReport:
    """Convergence record of one Picard run."""

    converged: bool
    iterations: int
    distances: list[float]
    ratios: list[float]
    tol: float
    heat_norm: float
    smallness_threshold: float

    @property
    def contraction_expected(self) -> bool:
        return self.heat_norm < self.smallness_threshold


def heat_part(u0: SpectralField, times) -> SpectralField | list[SpectralField]:
    """Linear evolution ``exp(t Lap) u0``; a scalar time gives one field,
    an iterable gives the list of samples."""
    if np.isscalar(times):
        return heat_semigroup(u0, float(times))
    return [heat_semigroup(u0, float(t)) for t in times]


def heat_trajectory(
    u0: SpectralField, config: SolverConfig, times: np.ndarray | None = None
) -> SolutionTrajectory:
    """Pure heat-flow trajectory, useful as a linear-evolution baseline."""
    u0 = _prepare_initial(config, u0)
    if times is None:
        times = _record_times(config)
    times = np.asarray(times, dtype=np.float64)
    fields = [heat_semigroup(u0, float(t)) for t in times]
    return SolutionTrajectory(config, times, fields, method="heat")


def _record_times(config: SolverConfig) -> np.ndarray:
    h = config.T / config.steps
    idx = list(range(0, config.steps + 1, config.record_every))
    if idx[-1] != config.steps:
        idx.append(config.steps)
    return np.array([i * h for i in idx])


def _prepare_initial(config: SolverConfig, u0: SpectralField) -> SpectralField:
    grid = config.grid
    if u0.grid != grid:
        raise ValueError("initial data lives on a different grid than the config")
    if not u0.is_velocity():
        raise ValueError(f"initial data must have {grid.dim} components")
    scale = float(np.max(np.abs(u0.coeffs)))
    if u0.max_divergence() > 1e-8 * (1.0 + scale) * grid.n_per_axis:
        raise ValueError("initial data is not divergence-free; project it first")
    u = dealias(u0, config.dealias_fraction)
    if config.zero_mean:
        u.coeffs[(slice(None),) + (0,) * grid.dim] = 0.0
    return u


def _phi1(x: np.ndarray) -> np.ndarray:
    """(1 - exp(-x)) / x with a series branch for small x >= 0."""
    x = np.asarray(x, dtype=np.float64)
    small = x < 1e-5
    safe = np.where(small, 1.0, x)
    out = -np.expm1(-safe) / safe
    series = 1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0
    return np.where(small, series, out)


def _phi2(x: np.ndarray) -> np.ndarray:
    """(exp(-x) - 1 + x) / x^2 with a series branch for small x >= 0."""
    x = np.asarray(x, dtype=np.float64)
    small = x < 1e-4
    safe = np.where(small, 1.0, x)
    out = (safe + np.expm1(-safe)) / (safe * safe)
    series = 0.5 - x / 6.0 + x * x / 24.0 - x * x * x / 120.0
    return np.where(small, series, out)


def _endpoint_weights(delta: float, k_sq: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Exact heat-weighted quadrature of a linear interpolant over a sub-interval.

    Returns ``(w_left, w_right)`` such that
    ``int_0^delta exp(-(delta - s) k^2) (N_l (1 - s/delta) + N_r s/delta) ds
    = w_left N_l + w_right N_r`` per mode.
    """
    x = delta * k_sq
    phi1 = _phi1(x)
    phi2 = _phi2(x)
    return delta * (phi1 - phi2), delta * phi2


def step_solve(u0: SpectralField, config: SolverConfig) -> SolutionTrajectory:
    """Advance with a two-stage exponential Runge-Kutta rule.

    The predictor is an exponential-Euler stage launched from
    ``exp(h Lap) u(t)``; the corrector integrates the linear interpolant of
    the endpoint quadratic terms against the exact heat factor.  Raises
    :class:`BlowupError` when the iterate loses finiteness.
    """
    u = _prepare_initial(config, u0)
    grid = config.grid
    h = config.T / config.steps
    k_sq = grid.k_sq
    decay = np.exp(-h * k_sq)
    stage_weight = h * _phi1(h * k_sq)
    w_left, w_right = _endpoint_weights(h, k_sq)

    times = [0.0]
    fields = [u.copy()]
    coeffs = u.coeffs
    for step in range(1, config.steps + 1):
        f0 = -advection_term(
            SpectralField(grid, coeffs), SpectralField(grid, coeffs), config.dealias_fraction
        ).coeffs
        stage = decay * coeffs + stage_weight * f0
        f1 = -advection_term(
            SpectralField(grid, stage), SpectralField(grid, stage), config.dealias_fraction
        ).coeffs
        coeffs = decay * coeffs + w_left * f0 + w_right * f1
        if not np.all(np.isfinite(coeffs)):
            raise BlowupError(t_last=(step - 1) * h)
        if step % config.record_every == 0 or step == config.steps:
            times.append(step * h)
            fields.append(SpectralField(grid, coeffs.copy()))
    return SolutionTrajectory(config, np.array(times), fields, method="step")


def _series_pair_nodes(
    u_series: FieldSeries, v_series: FieldSeries
) -> None:
    if u_series.times.shape != v_series.times.shape or not np.allclose(
        u_series.times, v_series.times, rtol=0.0, atol=1e-12
    ):
        raise ValueError("operand series must share their time grid")
    if abs(float(u_series.times[0])) > 1e-14:
        raise ValueError("integral term needs series starting at t = 0")


def duhamel_series(
    u_series: FieldSeries, v_series: FieldSeries, config: SolverConfig
) -> FieldSeries:
    """Integral term ``B(u, v)`` evaluated at every sample time of the series.

    Marches interval by interval: the accumulated integral is damped by the
    exact heat factor across each sub-interval and the local contribution of
    the linearly interpolated quadratic term is added in closed form.
    """
    _series_pair_nodes(u_series, v_series)
    grid = u_series.fields[0].grid
    k_sq = grid.k_sq
    m = config.substeps_quadrature
    times = u_series.times

    def nonlin(uc: np.ndarray, vc: np.ndarray) -> np.ndarray:
        return advection_term(
            SpectralField(grid, uc), SpectralField(grid, vc), config.dealias_fraction
        ).coeffs

    end_values = [nonlin(u_series.fields[i].coeffs, v_series.fields[i].coeffs)
                  for i in range(len(times))]

    acc = np.zeros_like(u_series.fields[0].coeffs)
    out = [acc.copy()]
    weight_cache: dict[float, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}
    for i in range(len(times) - 1):
        span = float(times[i + 1] - times[i])
        if span <= 0.0:
            out.append(acc.copy())
            continue
        delta = span / m
        if delta not in weight_cache:
            w_l, w_r = _endpoint_weights(delta, k_sq)
            weight_cache[delta] = (np.exp(-delta * k_sq), w_l, w_r)
        sub_decay, w_l, w_r = weight_cache[delta]

        nodes = [end_values[i]]
        for r in range(1, m):
            theta = r / m
            uc = (1.0 - theta) * u_series.fields[i].coeffs + theta * u_series.fields[i + 1].coeffs
            vc = (1.0 - theta) * v_series.fields[i].coeffs + theta * v_series.fields[i + 1].coeffs
            nodes.append(nonlin(uc, vc))
        nodes.append(end_values[i + 1])

        for r in range(m):
            acc = acc * sub_decay + w_l * nodes[r] + w_r * nodes[r + 1]
        out.append(acc.copy())
    return FieldSeries(times, [SpectralField(grid, c) for c in out])


def _truncated(series: FieldSeries, t: float) -> FieldSeries:
    times = series.times
    if t < -1e-14 or t > float(times[-1]) + 1e-12:
        raise ValueError(f"evaluation time {t} outside the sampled range [0, {times[-1]}]")
    k = int(np.searchsorted(times, t + 1e-14, side="right") - 1)
    if abs(float(times[k]) - t) <= 1e-14:
        return FieldSeries(times[: k + 1], series.fields[: k + 1])
    theta = (t - float(times[k])) / float(times[k + 1] - times[k])
    interp = SpectralField(
        series.fields[0].grid,
        (1.0 - theta) * series.fields[k].coeffs + theta * series.fields[k + 1].coeffs,
    )
    return FieldSeries(
        np.append(times[: k + 1], t), series.fields[: k + 1] + [interp]
    )


def bilinear_duhamel(
    u_traj, v_traj, t: float, config: SolverConfig | None = None
) -> SpectralField:
    """Integral term ``B(u, v)(t)`` for a single evaluation time.

    Accepts trajectories (their shared config supplies the quadrature) or
    plain sample series with an explicit ``config``.  ``t`` may fall between
    samples, in which case the last partial interval uses linearly
    interpolated endpoint fields.
    """
    u_series = u_traj.series() if isinstance(u_traj, SolutionTrajectory) else u_traj
    v_series = v_traj.series() if isinstance(v_traj, SolutionTrajectory) else v_traj
    if config is None:
        if not isinstance(u_traj, SolutionTrajectory):
            raise ValueError("pass a config when the operands are bare series")
        if isinstance(v_traj, SolutionTrajectory) and v_traj.config != u_traj.config:
            raise ValueError("operand trajectories must share their config")
        config = u_traj.config
    _series_pair_nodes(u_series, v_series)
    partial = duhamel_series(_truncated(u_series, t), _truncated(v_series, t), config)
    return partial.fields[-1]


def mild_residual(traj: SolutionTrajectory, i: int) -> float:
    """L^2 defect of the integral form at recorded sample ``i``."""
    series = traj.series()
    t = float(traj.times[i])
    b = bilinear_duhamel(series, series, t, traj.config)
    defect = traj.fields[i] - heat_semigroup(traj.initial, t) + b
    return defect.l2_norm()


def picard_solve(
    u0: SpectralField, config: SolverConfig
) -> tuple[SolutionTrajectory, PicardReport]:
    """Iterate the integral operator on whole trajectories until it contracts.

    Writing the solution as heat flow plus fluctuation, each sweep maps the
    fluctuation to minus the integral term of the full field.  Distances
    between successive sweeps are measured in the two-part critical norm
    from the config; failure to contract raises
    :class:`FixedPointDivergenceError` with the report attached.  Initial
    data above the smallness threshold only warns: the iteration is run
    anyway and its behaviour recorded.
    """
    u0 = _prepare_initial(config, u0)
    grid = config.grid
    h = config.T / config.steps
    times = np.array([i * h for i in range(config.steps + 1)])
    heat_fields = [heat_semigroup(u0, float(t)) for t in times]
    heat_series = FieldSeries(times, heat_fields)
    bank = LPFilterBank(grid)
    heat_norm = epq_norm(heat_series, config.norm_p, config.norm_q, config.T, bank)
    initial_norm = besov_norm(
        u0, NormSpec(3.0 / config.norm_p - 1.0, config.norm_p, config.norm_q), bank
    )
    if initial_norm >= config.smallness_threshold:
        warnings.warn(
            f"initial critical norm {initial_norm:.3g} is at or above the smallness "
            f"threshold {config.smallness_threshold:.3g}; contraction is not expected",
            stacklevel=2,
        )

    fluct = [SpectralField(grid, np.zeros_like(u0.coeffs)) for _ in times]
    distances: list[float] = []
    ratios: list[float] = []

    def report(converged: bool, iterations: int) -> PicardReport:
        return PicardReport(
            converged=converged,
            iterations=iterations,
            distances=list(distances),
            ratios=list(ratios),
            tol=config.picard_tol,
            heat_norm=heat_norm,
            smallness_threshold=config.smallness_threshold,
        )

    converged = False
    iterations = 0
    for sweep in range(1, config.picard_max_iters + 1):
        iterations = sweep
        total = FieldSeries(times, [heat_fields[i] + fluct[i] for i in range(len(times))])
        with np.errstate(over="ignore", invalid="ignore"):
            integral = duhamel_series(total, total, config)
        new_fluct = [SpectralField(grid, -f.coeffs) for f in integral.fields]
        finite = all(np.all(np.isfinite(f.coeffs)) for f in new_fluct)
        if not finite:
            raise FixedPointDivergenceError(
                f"iterate lost finiteness at sweep {sweep}", report(False, sweep)
            )
        diff = FieldSeries(
            times, [new_fluct[i] - fluct[i] for i in range(len(times))]
        )
        d = epq_norm(diff, config.norm_p, config.norm_q, config.T, bank)
        if distances:
            ratios.append(d / distances[-1] if distances[-1] > 0 else math.inf)
        distances.append(d)
        fluct = new_fluct
        if d < config.picard_tol:
            converged = True
            break
        if len(ratios) >= 2 and ratios[-1] >= 1.0 and ratios[-2] >= 1.0:
            raise FixedPointDivergenceError(
                "successive sweeps are not contracting "
                f"(last ratios {ratios[-2]:.3g}, {ratios[-1]:.3g})",
                report(False, sweep),
            )
    if not converged:
        raise FixedPointDivergenceError(
            f"no contraction below tol after {iterations} sweeps", report(False, iterations)
        )

    record = _record_times(config)
    idx = [int(round(t / h)) for t in record]
    fields = [heat_fields[i] + fluct[i] for i in idx]
    traj = SolutionTrajectory(config, record, fields, method="picard")
    return traj, report(True, iterations)


def time_derivative_stack(
    traj: SolutionTrajectory, n_max: int
) -> dict[int, list[SpectralField]]:
    """Time derivatives of the velocity at every recorded sample, orders ``0..n_max``.

    Uses the equation recursively: each next order is the Laplacian of the
    previous one minus the Leibniz expansion of the quadratic term over
    lower-order derivatives.  Results are cached on the trajectory.
    """
    if not 0 <= n_max <= MAX_DERIVATIVE_ORDER:
        raise ValueError(f"n_max must lie in 0..{MAX_DERIVATIVE_ORDER}, got {n_max}")
    grid = traj.grid
    fraction = traj.config.dealias_fraction
    if 0 not in traj.derivatives:
        traj.derivatives[0] = list(traj.fields)
    for n in range(1, n_max + 1):
        if n in traj.derivatives:
            continue
        prev_orders = traj.derivatives
        current: list[SpectralField] = []
        for i in range(len(traj)):
            lap = SpectralField(grid, -grid.k_sq * prev_orders[n - 1][i].coeffs)
            quad = np.zeros_like(lap.coeffs)
            for j in range(n):
                coeff = math.comb(n - 1, j)
                quad += coeff * advection_term(
                    prev_orders[j][i], prev_orders[n - 1 - j][i], fraction
                ).coeffs
            current.append(SpectralField(grid, lap.coeffs - quad))
        traj.derivatives[n] = current
    return {n: traj.derivatives[n] for n in range(n_max + 1)}

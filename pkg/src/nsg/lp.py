"""Dyadic frequency decomposition and the norms built on top of it.

The decomposition uses a smooth radial ramp ``psi`` that vanishes for
``r <= 3/4`` and equals one for ``r >= 1``, obtained as the normalized
integral of the standard compactly supported bump ``exp(-1/(1-u^2))``.
The annulus filter is ``phi_hat(xi) = psi(|xi|) - psi(|xi|/2)``, supported
in ``3/4 <= |xi| <= 2``, and the low-pass is ``chi = 1 - psi``.  Because
consecutive annuli share ramp evaluations, the finite partition of unity

    sum_j phi_hat(2**-j xi) = 1   for resolved xi != 0

telescopes exactly in floating point.

Block norms are measured on the collocation grid: the ``L^p`` norm of the
pointwise Euclidean magnitude via uniform quadrature with cell volume
``(2 pi / n)**dim``.  Time-mixed norms put the time integral inside the
sum over blocks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field
from functools import lru_cache

import numpy as np

from .spectral import Grid, SpectralField, dealias, to_physical, to_spectral

__all__ = [
    "NormSpec",
    "LPFilterBank",
    "FieldSeries",
    "BonyPieces",
    "besov_norm",
    "besov_block_profile",
    "time_besov_norm",
    "epq_norm",
    "paraproduct",
]

_RAMP_TABLE_SIZE = 1 << 14

_trapezoid = np.trapezoid if hasattr(np, "trapezoid") else np.trapz


@lru_cache(maxsize=1)
def _ramp_table() -> tuple[np.ndarray, np.ndarray]:
    """Cumulative integral of the unit bump on [-1, 1], normalized to end at 1."""
    u = np.linspace(-1.0, 1.0, _RAMP_TABLE_SIZE + 1)
    with np.errstate(divide="ignore", over="ignore", under="ignore"):
        bump = np.where(np.abs(u) < 1.0, np.exp(1.0 / np.minimum(u * u - 1.0, -1e-12)), 0.0)
    cumulative = np.concatenate([[0.0], np.cumsum((bump[1:] + bump[:-1]) * 0.5 * (u[1] - u[0]))])
    return u, cumulative / cumulative[-1]


def smooth_ramp(r: np.ndarray) -> np.ndarray:
    """C-infinity transition ramp: 0 for ``r <= 3/4``, 1 for ``r >= 1``."""
    u, table = _ramp_table()
    x = np.clip(8.0 * np.asarray(r, dtype=np.float64) - 7.0, -1.0, 1.0)
    return np.interp(x, u, table)


@dataclass(frozen=True)
class NormSpec:
    """Parameters of a (time-mixed) homogeneous Besov norm.

    ``s`` is the regularity index, ``p`` the spatial integrability
    (finite, ``1 < p``), ``q`` the summability across blocks, and ``r``
    the optional time integrability.  Infinite ``q``/``r`` are passed as
    ``math.inf``.
    """

    s: float
    p: float
    q: float
    r: float | None = None

    def __post_init__(self):
        if not (1.0 < self.p < math.inf):
            raise ValueError(f"p must lie in (1, inf), got {self.p}")
        if not (1.0 <= self.q):
            raise ValueError(f"q must lie in [1, inf], got {self.q}")
        if self.r is not None and not (1.0 <= self.r):
            raise ValueError(f"r must lie in [1, inf] when given, got {self.r}")


class LPFilterBank:
    """Sampled annulus filters ``phi_hat(2**-j xi)`` for one grid.

    The block range is ``j_min .. j_max`` with ``j_min = -2`` and
    ``j_max = ceil(log2(max resolved |xi|)) + 1``, wide enough that the
    partition of unity covers every resolved nonzero frequency.
    """

    def __init__(self, grid: Grid, j_min: int = -2):
        self.grid = grid
        self.j_min = j_min
        k_abs = grid.k_abs
        xi_max = float(np.max(k_abs))
        self.j_max = math.ceil(math.log2(xi_max)) + 1
        self._filters: dict[int, np.ndarray] = {}
        ramp_here = {j: smooth_ramp(k_abs / 2.0**j) for j in range(self.j_min, self.j_max + 2)}
        for j in self.js:
            self._filters[j] = ramp_here[j] - ramp_here[j + 1]

    @property
    def js(self) -> range:
        return range(self.j_min, self.j_max + 1)

    def annulus_filter(self, j: int) -> np.ndarray:
        """Multiplier array of the ``j``-th annulus."""
        if j not in self._filters:
            raise ValueError(f"block index {j} outside bank range {self.j_min}..{self.j_max}")
        return self._filters[j]

    def lowpass_filter(self, j: int) -> np.ndarray:
        """Multiplier of ``S_j``: one minus the ramp at scale ``2**j`` (mean kept)."""
        return 1.0 - smooth_ramp(self.grid.k_abs / 2.0**j)

    def block(self, f: SpectralField, j: int) -> SpectralField:
        """Dyadic block ``Delta_j f``."""
        return SpectralField(f.grid, f.coeffs * self.annulus_filter(j))

    def lowpass(self, f: SpectralField, j: int) -> SpectralField:
        """Low-frequency part ``S_j f`` (the sum of blocks below ``j`` plus the mean)."""
        return SpectralField(f.grid, f.coeffs * self.lowpass_filter(j))

    def partition_defect(self) -> float:
        """Largest ``|sum_j phi_hat(2**-j xi) - 1|`` over resolved ``xi != 0``."""
        total = np.zeros(self.grid.shape)
        for j in self.js:
            total += self._filters[j]
        total[(0,) * self.grid.dim] = 1.0  # mean mode belongs to no annulus
        return float(np.max(np.abs(total - 1.0)))

    def populated_js(self, tol: float = 0.0) -> list[int]:
        """Blocks whose multiplier is not identically zero on this lattice."""
        return [j for j in self.js if float(np.max(self._filters[j])) > tol]


def _magnitude(f: SpectralField) -> np.ndarray:
    """Pointwise Euclidean magnitude of the physical-space field."""
    values = to_physical(f)
    if values.shape[0] == 1:
        return np.abs(values[0])
    return np.sqrt(np.sum(values * values, axis=0))


def _lp_quadrature(magnitude: np.ndarray, p: float, cell_volume: float) -> float:
    return float((np.sum(magnitude**p) * cell_volume) ** (1.0 / p))


def _lq_aggregate(weights: np.ndarray, q: float) -> float:
    if math.isinf(q):
        return float(np.max(weights)) if weights.size else 0.0
    return float(np.sum(weights**q) ** (1.0 / q))


def besov_norm(f: SpectralField, spec: NormSpec, bank: LPFilterBank) -> float:
    """Homogeneous Besov norm ``l^q over j of 2**(j s) ||Delta_j f||_p``.

    The mean mode lies in no annulus, so constants have norm zero.
    """
    if bank.grid != f.grid:
        raise ValueError("filter bank was built for a different grid")
    weights = np.array(
        [2.0 ** (j * spec.s) * _lp_quadrature(_magnitude(bank.block(f, j)), spec.p, f.grid.cell_volume)
         for j in bank.js]
    )
    return _lq_aggregate(weights, spec.q)


def besov_block_profile(
    f: SpectralField, spec: NormSpec, bank: LPFilterBank
) -> list[tuple[int, float]]:
    """Per-block weighted norms ``(j, 2**(js) ||Delta_j f||_p)`` for reports."""
    out = []
    for j in bank.js:
        w = 2.0 ** (j * spec.s) * _lp_quadrature(
            _magnitude(bank.block(f, j)), spec.p, f.grid.cell_volume
        )
        out.append((j, w))
    return out


@dataclass
class FieldSeries:
    """Time samples of a field on one grid, with nondecreasing times."""

    times: np.ndarray
    fields: list[SpectralField]

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=np.float64)
        if self.times.ndim != 1 or len(self.fields) != self.times.size:
            raise ValueError("times and fields must have matching lengths")
        if self.times.size == 0:
            raise ValueError("a field series needs at least one sample")
        if np.any(np.diff(self.times) < 0):
            raise ValueError("sample times must be nondecreasing")

    def __len__(self) -> int:
        return self.times.size

    def restricted(self, T: float) -> "FieldSeries":
        """Samples with ``t <= T`` (tiny slack for round-off)."""
        keep = self.times <= T * (1.0 + 1e-12) + 1e-300
        if not np.any(keep):
            raise ValueError(f"no samples at or before T={T}")
        idx = np.nonzero(keep)[0]
        return FieldSeries(self.times[idx], [self.fields[i] for i in idx])


def _time_aggregate(values: np.ndarray, times: np.ndarray, r: float) -> float:
    """L^r norm in time by trapezoid quadrature; sup for infinite ``r``."""
    if math.isinf(r):
        return float(np.max(values))
    if times.size < 2:
        raise ValueError("a time-integrated norm with finite r needs at least two samples")
    return float(_trapezoid(values**r, times) ** (1.0 / r))


def time_besov_norm(series: FieldSeries, spec: NormSpec, bank: LPFilterBank) -> float:
    """Time-mixed Besov norm with the time integral inside the block sum.

    For each block ``j`` the curve ``t -> ||Delta_j f(t)||_p`` is reduced to
    a scalar by its ``L^r`` norm in time, weighted by ``2**(j s)``, and the
    block weights are aggregated in ``l^q``.
    """
    if spec.r is None:
        raise ValueError("time_besov_norm needs the time exponent r in NormSpec")
    grid = series.fields[0].grid
    if bank.grid != grid:
        raise ValueError("filter bank was built for a different grid")
    block_weights = []
    for j in bank.js:
        values = np.array(
            [_lp_quadrature(_magnitude(bank.block(f, j)), spec.p, grid.cell_volume)
             for f in series.fields]
        )
        block_weights.append(2.0 ** (j * spec.s) * _time_aggregate(values, series.times, spec.r))
    return _lq_aggregate(np.array(block_weights), spec.q)


def epq_norm(series: FieldSeries, p: float, q: float, T: float, bank: LPFilterBank) -> float:
    """Critical two-part solution norm on ``[0, T]``.

    Sum of the sup-in-time norm at regularity ``3/p - 1`` and the
    ``L^(2p/(p-1))``-in-time norm at regularity ``2/p``.
    """
    part = series.restricted(T)
    sup_part = time_besov_norm(part, NormSpec(3.0 / p - 1.0, p, q, math.inf), bank)
    r = 2.0 * p / (p - 1.0)
    integral_part = time_besov_norm(part, NormSpec(2.0 / p, p, q, r), bank)
    return sup_part + integral_part


@dataclass
class BonyPieces:
    """The three pieces of the paraproduct splitting of a pointwise product."""

    low_high: SpectralField
    high_low: SpectralField
    remainder: SpectralField

    def total(self) -> SpectralField:
        return self.low_high + self.high_low + self.remainder


def paraproduct(
    f: SpectralField,
    g: SpectralField,
    bank: LPFilterBank,
    dealias_fraction: float = 2.0 / 3.0,
) -> BonyPieces:
    """Bony splitting ``fg = T_f g + T_g f + R(f, g)`` of a componentwise product.

    ``T_f g`` pairs ``S_(j-1) f`` with ``Delta_j g``; the remainder pairs
    blocks at distance at most one, with out-of-range blocks treated as
    zero.  On the torus the product of the two mean modes has no annulus
    to live in and is assigned to the remainder, which makes the
    reconstruction identity exact for arbitrary inputs.  All products are
    formed on the collocation grid and dealiased with the same cutoff.
    """
    grid = f.grid
    if grid != g.grid or f.num_components != g.num_components:
        raise ValueError("paraproduct operands must share grid and component count")

    f_blocks = {j: to_physical(bank.block(f, j)) for j in bank.js}
    g_blocks = {j: to_physical(bank.block(g, j)) for j in bank.js}
    f_low = {j: to_physical(bank.lowpass(f, j - 1)) for j in bank.js}
    g_low = {j: to_physical(bank.lowpass(g, j - 1)) for j in bank.js}

    shape = (f.num_components,) + grid.shape
    low_high = np.zeros(shape)
    high_low = np.zeros(shape)
    remainder = np.zeros(shape)
    for j in bank.js:
        low_high += f_low[j] * g_blocks[j]
        high_low += g_low[j] * f_blocks[j]
        near = np.zeros(shape)
        for jj in (j - 1, j, j + 1):
            if bank.j_min <= jj <= bank.j_max:
                near += g_blocks[jj]
        remainder += f_blocks[j] * near
    zero = (slice(None),) + (0,) * grid.dim
    mean_product = f.coeffs[zero] * g.coeffs[zero]

    pieces = []
    for samples in (low_high, high_low, remainder):
        pieces.append(dealias(to_spectral(samples, grid), dealias_fraction))
    pieces[2].coeffs[zero] += mean_product
    return BonyPieces(*pieces)

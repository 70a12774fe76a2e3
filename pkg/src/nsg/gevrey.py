"""Exponential l1-frequency weights, half-line sectors, and refined schedules.

The product operator ``P_t(f, g) = exp(t L) (exp(-t L) f * exp(-t L) g)``
(``L`` = the l1-symbol multiplier) is the workhorse: because the l1 norm is
additive octant by octant, ``P_t`` splits into a finite sum of sector terms
in which every exponential factor damps.  Concretely, with ``K_b`` the
half-line cut along one axis and ``L_t`` the one-axis Poisson damping
``exp(-2t |k_axis|)``,

    P_t(f, g) = sum over (a, b, c) in {-1, 1}^(3 dim) of
                K_a ( Z_(t,a,b) f * Z_(t,a,c) g ),

where ``Z_(t,a,b)`` applies ``K_(b_i)`` and then damps axis ``i`` whenever
``a_i b_i = -1``.  The module exposes both the direct form and the literal
sector sum so they can be compared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product as iter_product

import numpy as np

from .errors import ScheduleMismatchError
from .lp import FieldSeries, LPFilterBank, epq_norm
from .spectral import (
    DEFAULT_DEALIAS_FRACTION,
    SpectralField,
    dealias,
    gevrey_multiplier,
    to_physical,
    to_spectral,
)

__all__ = [
    "half_line_projection",
    "octant_projection",
    "poisson_damped",
    "sector_operator",
    "product_operator",
    "product_operator_decomposed",
    "RefinedWeight",
    "refined_weight_value",
    "refined_gevrey_norm",
    "lambda_schedule",
]


def _half_line_multiplier(field: SpectralField, axis: int, sign: int) -> np.ndarray:
    grid = field.grid
    if axis < 0 or axis >= grid.dim:
        raise ValueError(f"axis must be in 0..{grid.dim - 1}, got {axis}")
    if sign not in (-1, 1):
        raise ValueError(f"sign must be -1 or +1, got {sign}")
    k_axis = grid.wavevectors[axis]
    return np.where(sign * k_axis > 0, 1.0, np.where(k_axis == 0, 0.5, 0.0))


def half_line_projection(field: SpectralField, axis: int, sign: int) -> SpectralField:
    """Keep modes with ``sign * k_axis > 0``; the ``k_axis = 0`` plane is halved.

    The halving follows the symmetric Fourier-integral convention, so the
    two half-line projections along an axis sum exactly to the identity.
    """
    return SpectralField(field.grid, field.coeffs * _half_line_multiplier(field, axis, sign))


def octant_projection(field: SpectralField, signs: tuple[int, ...]) -> SpectralField:
    """Product of half-line projections, one per axis."""
    grid = field.grid
    if len(signs) != grid.dim:
        raise ValueError(f"need {grid.dim} signs, got {signs}")
    mult = np.ones(grid.shape)
    for axis, sign in enumerate(signs):
        mult *= _half_line_multiplier(field, axis, sign)
    return SpectralField(grid, field.coeffs * mult)


def poisson_damped(field: SpectralField, t: float, axis: int, orientation: int) -> SpectralField:
    """One-axis damping: identity for ``orientation=+1``, ``exp(-2t|k_axis|)`` for ``-1``."""
    if t < 0:
        raise ValueError(f"damping time must be >= 0, got {t}")
    if orientation == 1:
        return field.copy()
    if orientation == -1:
        k_axis = field.grid.wavevectors[axis]
        return SpectralField(field.grid, field.coeffs * np.exp(-2.0 * t * np.abs(k_axis)))
    raise ValueError(f"orientation must be -1 or +1, got {orientation}")


def sector_operator(
    field: SpectralField, t: float, alpha: tuple[int, ...], beta: tuple[int, ...]
) -> SpectralField:
    """Apply ``Z_(t,alpha,beta)``: per axis, the ``beta`` half-line cut followed by
    Poisson damping whenever ``alpha_i * beta_i = -1``.  A pure contraction."""
    grid = field.grid
    if len(alpha) != grid.dim or len(beta) != grid.dim:
        raise ValueError(f"alpha and beta must each have {grid.dim} signs")
    if t < 0:
        raise ValueError(f"damping time must be >= 0, got {t}")
    mult = np.ones(grid.shape)
    for axis, (a, b) in enumerate(zip(alpha, beta)):
        if a not in (-1, 1) or b not in (-1, 1):
            raise ValueError("sector signs must be -1 or +1")
        mult *= _half_line_multiplier(field, axis, b)
        if a * b == -1:
            k_axis = grid.wavevectors[axis]
            mult = mult * np.exp(-2.0 * t * np.abs(k_axis))
    return SpectralField(grid, field.coeffs * mult)


def _componentwise_product(f: SpectralField, g: SpectralField, fraction: float) -> SpectralField:
    # The complex transform pair keeps one-sided spectra intact, so the
    # operator is exact on single complex modes as well as on real fields.
    prod = _complex_physical(f) * _complex_physical(g)
    return dealias(_complex_spectral(prod, f.grid), fraction)


def product_operator(
    f: SpectralField,
    g: SpectralField,
    t: float,
    dealias_fraction: float = DEFAULT_DEALIAS_FRACTION,
) -> SpectralField:
    """Direct form ``exp(tL) (exp(-tL) f * exp(-tL) g)`` with a dealiased product."""
    if f.grid != g.grid or f.num_components != g.num_components:
        raise ValueError("product operands must share grid and component count")
    if t < 0:
        raise ValueError(f"weight time must be >= 0, got {t}")
    damped_f = gevrey_multiplier(f, -t)
    damped_g = gevrey_multiplier(g, -t)
    return gevrey_multiplier(_componentwise_product(damped_f, damped_g, dealias_fraction), t)


def _complex_physical(field: SpectralField) -> np.ndarray:
    """Collocation values without discarding the imaginary part.

    Sector pieces have one-sided spectra, so they are genuinely complex
    on the grid even when the underlying field is real.
    """
    axes = tuple(range(1, field.grid.dim + 1))
    return np.fft.ifftn(field.coeffs, axes=axes) * field.grid.n_points


def _complex_spectral(values: np.ndarray, grid) -> SpectralField:
    axes = tuple(range(1, grid.dim + 1))
    return SpectralField(grid, np.fft.fftn(values, axes=axes) / grid.n_points)


def product_operator_decomposed(
    f: SpectralField,
    g: SpectralField,
    t: float,
    dealias_fraction: float = DEFAULT_DEALIAS_FRACTION,
) -> SpectralField:
    """Literal sector sum for ``P_t``: ``(2**dim)**3`` terms, all damping.

    Matches :func:`product_operator` up to round-off; the agreement is the
    numerical witness that the l1 symbol is octant-wise additive.
    """
    if f.grid != g.grid or f.num_components != g.num_components:
        raise ValueError("product operands must share grid and component count")
    if t < 0:
        raise ValueError(f"weight time must be >= 0, got {t}")
    grid = f.grid
    signs = list(iter_product((-1, 1), repeat=grid.dim))

    f_sectors = {
        (a, b): _complex_physical(sector_operator(f, t, a, b)) for a in signs for b in signs
    }
    g_sectors = {
        (a, c): _complex_physical(sector_operator(g, t, a, c)) for a in signs for c in signs
    }

    total = np.zeros_like(f.coeffs)
    for a in signs:
        for b in signs:
            for c in signs:
                prod = f_sectors[(a, b)] * g_sectors[(a, c)]
                term = dealias(_complex_spectral(prod, grid), dealias_fraction)
                total += octant_projection(term, a).coeffs
    return SpectralField(grid, total)


@dataclass(frozen=True)
class RefinedWeight:
    """Time-dependent attenuation ``exp(-lambda(t)^2 t / (a (1-eps) T))``.

    ``lam`` is either a constant or a tabulated schedule aligned with the
    sample times it will be applied to; ``a`` is 2 or 4.
    """

    epsilon: float
    T: float
    a: int = 4
    lam: float | tuple[np.ndarray, np.ndarray] = 1.0

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if self.T <= 0:
            raise ValueError(f"horizon T must be positive, got {self.T}")
        if self.a not in (2, 4):
            raise ValueError(f"denominator index a must be 2 or 4, got {self.a}")

    def lambda_at(self, t: float) -> float:
        if isinstance(self.lam, (int, float)):
            return float(self.lam)
        times, values = self.lam
        idx = np.nonzero(np.isclose(np.asarray(times, dtype=float), t, rtol=0, atol=1e-12))[0]
        if idx.size == 0:
            raise ScheduleMismatchError(
                f"lambda schedule has no entry for t = {t:g}; tabulated schedules "
                "must share their sample times with the series they weight"
            )
        return float(np.asarray(values, dtype=float)[idx[0]])


def refined_weight_value(weight: RefinedWeight, t: float) -> float:
    """Evaluate the attenuation factor at time ``t`` in ``[0, T]``."""
    if t < 0 or t > weight.T * (1.0 + 1e-12):
        raise ValueError(f"time must lie in [0, {weight.T:g}], got {t}")
    lam = weight.lambda_at(t)
    return math.exp(-(lam**2) * t / (weight.a * (1.0 - weight.epsilon) * weight.T))


def refined_gevrey_norm(
    series: FieldSeries,
    p: float,
    q: float,
    weight: RefinedWeight,
    bank: LPFilterBank,
) -> float:
    """Two-part critical norm of the attenuated, exponentially weighted series.

    Each sample is multiplied by the scalar attenuation and by the growing
    l1 weight ``exp(lambda(t) (t / sqrt(T)) |k|_1)`` before the norm on
    ``[0, T]`` is taken.
    """
    part = series.restricted(weight.T)
    sqrt_T = math.sqrt(weight.T)
    weighted = []
    for t, f in zip(part.times, part.fields):
        lam = weight.lambda_at(float(t))
        amplified = gevrey_multiplier(f, lam * float(t) / sqrt_T)
        weighted.append(refined_weight_value(weight, float(t)) * amplified)
    return epq_norm(FieldSeries(part.times, weighted), p, q, weight.T, bank)


def lambda_schedule(uh_norm: float, epsilon: float) -> float:
    """Terminal weight strength ``2 sqrt((1-eps) ln(uh_norm**-1/2))``.

    Only meaningful when the linear-evolution norm is below one; the choice
    balances the attenuation against the square root of that norm:
    ``exp(lambda^2 / (4 (1-eps))) * uh_norm = sqrt(uh_norm)``.
    """
    if not 0.0 < uh_norm < 1.0:
        raise ScheduleMismatchError(
            f"the weight strength is defined only for heat-flow norms in (0, 1), got {uh_norm}"
        )
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    return 2.0 * math.sqrt((1.0 - epsilon) * math.log(uh_norm**-0.5))

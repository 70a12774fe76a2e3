"""Fourier-side representation of periodic fields and the basic operators.

Fields live on the torus ``[0, 2*pi]^d`` (d = 2 or 3) and are stored by
their Fourier coefficients on the integer frequency lattice, with the
normalization fixed so that a pure mode ``exp(i k.x)`` has a single unit
coefficient.  Real fields correspond to Hermitian-symmetric coefficient
arrays.  All operators in this module act diagonally per mode except the
quadratic term, which is formed by pointwise products on the collocation
grid with a sharp dealiasing cutoff.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import GevreyOverflowError

__all__ = [
    "Grid",
    "SpectralField",
    "to_physical",
    "to_spectral",
    "dealias",
    "heat_semigroup",
    "gevrey_multiplier",
    "derivative",
    "leray_project",
    "divergence",
    "nonlinear_term",
    "advection_term",
    "hermitian_defect",
    "hermitianize",
]

#: Fraction of the Nyquist band kept when forming quadratic terms (the 2/3 rule).
DEFAULT_DEALIAS_FRACTION = 2.0 / 3.0

_EXP_LIMIT = 700.0  # log(float64 max) with headroom


@dataclass(frozen=True)
class Grid:
    """Uniform collocation grid on the periodic box ``[0, 2*pi]^dim``.

    ``n_per_axis`` points per axis resolve integer frequencies with every
    component in ``(-n/2, n/2]``; the Nyquist frequency is labelled ``+n/2``.
    """

    dim: int
    n_per_axis: int

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError(f"dim must be 2 or 3, got {self.dim}")
        if self.n_per_axis < 4 or self.n_per_axis % 2:
            raise ValueError(f"n_per_axis must be even and >= 4, got {self.n_per_axis}")

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n_per_axis,) * self.dim

    @property
    def n_points(self) -> int:
        return self.n_per_axis**self.dim

    @property
    def cell_volume(self) -> float:
        return (2.0 * np.pi / self.n_per_axis) ** self.dim

    @cached_property
    def frequencies_1d(self) -> np.ndarray:
        """Integer frequencies along one axis, in FFT storage order."""
        k = np.fft.fftfreq(self.n_per_axis, d=1.0 / self.n_per_axis).astype(np.int64)
        k[self.n_per_axis // 2] = self.n_per_axis // 2  # label Nyquist as +n/2
        return k

    @cached_property
    def wavevectors(self) -> np.ndarray:
        """Stacked integer wavevectors, shape ``(dim, n, ..., n)``."""
        axes = np.meshgrid(*([self.frequencies_1d] * self.dim), indexing="ij")
        return np.stack(axes).astype(np.float64)

    @cached_property
    def k_sq(self) -> np.ndarray:
        """Squared Euclidean frequency ``|k|^2`` per lattice site."""
        return np.sum(self.wavevectors**2, axis=0)

    @cached_property
    def k_l1(self) -> np.ndarray:
        """l1 frequency ``|k|_1 = sum_i |k_i|`` per lattice site."""
        return np.sum(np.abs(self.wavevectors), axis=0)

    @cached_property
    def k_abs(self) -> np.ndarray:
        """Euclidean frequency magnitude ``|k|`` per lattice site."""
        return np.sqrt(self.k_sq)

    def dealias_mask(self, fraction: float = DEFAULT_DEALIAS_FRACTION) -> np.ndarray:
        """Boolean mask keeping modes with every ``|k_i| <= fraction * n/2``."""
        if not 0.0 < fraction <= 1.0:
            raise ValueError(f"dealias fraction must lie in (0, 1], got {fraction}")
        cutoff = fraction * self.n_per_axis / 2.0
        keep = np.ones(self.shape, dtype=bool)
        for axis_k in self.wavevectors:
            keep &= np.abs(axis_k) <= cutoff
        return keep

    def physical_coordinates(self) -> np.ndarray:
        """Collocation points, shape ``(dim, n, ..., n)``."""
        x = np.arange(self.n_per_axis) * (2.0 * np.pi / self.n_per_axis)
        return np.stack(np.meshgrid(*([x] * self.dim), indexing="ij"))


@dataclass
class SpectralField:
    """A (possibly vector-valued) field stored by Fourier coefficients.

    ``coeffs`` has shape ``(components, n, ..., n)`` with ``dim`` trailing
    lattice axes in FFT storage order.
    """

    grid: Grid
    coeffs: np.ndarray

    def __post_init__(self):
        expected = self.grid.shape
        if self.coeffs.ndim != self.grid.dim + 1 or self.coeffs.shape[1:] != expected:
            raise ValueError(
                f"coefficient array shape {self.coeffs.shape} does not match "
                f"(components, {', '.join(map(str, expected))})"
            )
        if self.coeffs.dtype != np.complex128:
            self.coeffs = self.coeffs.astype(np.complex128)

    @property
    def num_components(self) -> int:
        return self.coeffs.shape[0]

    def copy(self) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs.copy())

    def component(self, i: int) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs[i : i + 1])

    def l2_norm(self) -> float:
        """L^2 norm over the box via Plancherel (components summed)."""
        return float(np.sqrt(np.sum(np.abs(self.coeffs) ** 2) * (2.0 * np.pi) ** self.grid.dim))

    def is_velocity(self) -> bool:
        return self.num_components == self.grid.dim

    def max_divergence(self) -> float:
        """Largest ``|k . u(k)|`` over the lattice; zero for solenoidal fields."""
        if not self.is_velocity():
            raise ValueError("divergence defined for velocity fields only")
        kdot = np.sum(self.grid.wavevectors * self.coeffs, axis=0)
        return float(np.max(np.abs(kdot)))

    def __add__(self, other: "SpectralField") -> "SpectralField":
        self._check_compatible(other)
        return SpectralField(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        self._check_compatible(other)
        return SpectralField(self.grid, self.coeffs - other.coeffs)

    def __mul__(self, scalar: float) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs * scalar)

    __rmul__ = __mul__

    def _check_compatible(self, other: "SpectralField") -> None:
        if self.grid != other.grid or self.coeffs.shape != other.coeffs.shape:
            raise ValueError("fields live on different grids or component counts")


def _lattice_axes(grid: Grid) -> tuple[int, ...]:
    return tuple(range(1, grid.dim + 1))


def to_physical(field: SpectralField) -> np.ndarray:
    """Evaluate the field on the collocation grid.

    Returns the real part; for Hermitian-symmetric coefficients the imaginary
    part is at round-off level.
    """
    values = np.fft.ifftn(field.coeffs, axes=_lattice_axes(field.grid))
    return np.ascontiguousarray(values.real) * field.grid.n_points


def to_spectral(values: np.ndarray, grid: Grid) -> SpectralField:
    """Project collocation samples onto unit-coefficient Fourier modes."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim == grid.dim:
        values = values[np.newaxis]
    if values.shape[1:] != grid.shape:
        raise ValueError(f"sample array shape {values.shape} does not match grid {grid.shape}")
    coeffs = np.fft.fftn(values, axes=_lattice_axes(grid)) / grid.n_points
    return SpectralField(grid, coeffs)


def hermitian_defect(field: SpectralField) -> float:
    """Largest deviation from the real-field symmetry ``c(-k) = conj(c(k))``."""
    c = field.coeffs
    rev = c
    for ax in _lattice_axes(field.grid):
        rev = np.roll(np.flip(rev, axis=ax), 1, axis=ax)
    return float(np.max(np.abs(c - np.conj(rev))))


def hermitianize(field: SpectralField) -> SpectralField:
    """Symmetrize coefficients so the physical field is exactly real."""
    c = field.coeffs
    rev = c
    for ax in _lattice_axes(field.grid):
        rev = np.roll(np.flip(rev, axis=ax), 1, axis=ax)
    return SpectralField(field.grid, 0.5 * (c + np.conj(rev)))


def dealias(field: SpectralField, fraction: float = DEFAULT_DEALIAS_FRACTION) -> SpectralField:
    """Zero every mode with any ``|k_i|`` beyond ``fraction * n/2``."""
    mask = field.grid.dealias_mask(fraction)
    return SpectralField(field.grid, field.coeffs * mask)


def heat_semigroup(field: SpectralField, t: float) -> SpectralField:
    """Apply ``exp(t * Laplacian)``: per-mode factor ``exp(-t |k|^2)``."""
    if t < 0:
        raise ValueError(f"heat semigroup requires t >= 0, got {t}")
    return SpectralField(field.grid, field.coeffs * np.exp(-t * field.grid.k_sq))


def gevrey_multiplier(field: SpectralField, a: float) -> SpectralField:
    """Apply the exponential l1-frequency weight ``exp(a |k|_1)`` per mode.

    Negative ``a`` damps.  For positive ``a`` the combination of weight and
    coefficient magnitude is checked against the float64 range first; an
    offending shell raises :class:`GevreyOverflowError` instead of emitting
    ``inf``.
    """
    k_l1 = field.grid.k_l1
    if a > 0:
        mag = np.max(np.abs(field.coeffs), axis=0)
        with np.errstate(divide="ignore"):
            log_mag = np.where(mag > 0, np.log(np.where(mag > 0, mag, 1.0)), -np.inf)
        over = a * k_l1 + log_mag > _EXP_LIMIT
        if np.any(over):
            shell = int(np.min(k_l1[over]))
            raise GevreyOverflowError(shell=shell, weight=a)
    with np.errstate(over="ignore"):
        weights = np.exp(a * k_l1)
    finite = np.isfinite(weights)
    if np.all(finite):
        return SpectralField(field.grid, field.coeffs * weights)
    # The weight itself overflows only on modes whose coefficients are small
    # enough that the product is representable (the guard above); build those
    # entries in log space instead of letting inf * 0 poison them.
    with np.errstate(invalid="ignore"):
        out = field.coeffs * weights
    bad = ~finite
    c = field.coeffs[..., bad]
    absc = np.abs(c)
    safe = np.where(absc > 0, absc, 1.0)
    exponent = np.where(absc > 0, a * k_l1[bad] + np.log(safe), -np.inf)
    out[..., bad] = np.where(absc > 0, c / safe, 0.0) * np.exp(exponent)
    return SpectralField(field.grid, out)


def derivative(field: SpectralField, alpha: tuple[int, ...]) -> SpectralField:
    """Spatial derivative of multi-index ``alpha``: factor ``prod (i k_j)^alpha_j``."""
    grid = field.grid
    if len(alpha) != grid.dim or any(a < 0 or a != int(a) for a in alpha):
        raise ValueError(f"alpha must be {grid.dim} nonnegative integers, got {alpha}")
    factor = np.ones(grid.shape, dtype=np.complex128)
    for j, a in enumerate(alpha):
        if a:
            factor *= (1j * grid.wavevectors[j]) ** int(a)
    return SpectralField(grid, field.coeffs * factor)


def leray_project(field: SpectralField) -> SpectralField:
    """Project onto divergence-free fields: ``u(k) -> u(k) - k (k.u(k)) / |k|^2``.

    The mean mode is left unchanged.
    """
    grid = field.grid
    if not field.is_velocity():
        raise ValueError(
            f"Leray projection needs {grid.dim} components, got {field.num_components}"
        )
    k = grid.wavevectors
    with np.errstate(invalid="ignore", divide="ignore"):
        kdot_over_ksq = np.sum(k * field.coeffs, axis=0) / grid.k_sq
    kdot_over_ksq[(0,) * grid.dim] = 0.0  # mean mode: nothing to remove
    return SpectralField(grid, field.coeffs - k * kdot_over_ksq)


def divergence(field: SpectralField) -> SpectralField:
    """Spectral divergence ``sum_j i k_j u_j(k)`` as a scalar field."""
    if not field.is_velocity():
        raise ValueError("divergence defined for velocity fields only")
    k = field.grid.wavevectors
    div = np.sum(1j * k * field.coeffs, axis=0, keepdims=True)
    return SpectralField(field.grid, div)


def advection_term(
    u: SpectralField,
    v: SpectralField,
    dealias_fraction: float = DEFAULT_DEALIAS_FRACTION,
) -> SpectralField:
    """Projected quadratic term ``P div(u (x) v)`` for a pair of velocity fields.

    Component ``l`` of ``div(u (x) v)`` is ``sum_j d_j (u_j v_l)``.  Products
    are formed on the collocation grid and the result is dealiased before the
    divergence-free projection.
    """
    grid = u.grid
    if grid != v.grid:
        raise ValueError("operands live on different grids")
    if not (u.is_velocity() and v.is_velocity()):
        raise ValueError("quadratic term defined for velocity fields only")
    u_phys = to_physical(u)
    v_phys = to_physical(v)
    k = grid.wavevectors
    div = np.zeros((grid.dim,) + grid.shape, dtype=np.complex128)
    for l in range(grid.dim):
        for j in range(grid.dim):
            prod = to_spectral(u_phys[j] * v_phys[l], grid)
            div[l] += 1j * k[j] * prod.coeffs[0]
    out = dealias(SpectralField(grid, div), dealias_fraction)
    return leray_project(out)


def nonlinear_term(
    u: SpectralField, dealias_fraction: float = DEFAULT_DEALIAS_FRACTION
) -> SpectralField:
    """Navier-Stokes quadratic term ``P div(u (x) u)`` with dealiasing."""
    return advection_term(u, u, dealias_fraction)

"""Constructors for the velocity fields used by runs and tests."""

from __future__ import annotations

import numpy as np

from .spectral import (
    DEFAULT_DEALIAS_FRACTION,
    Grid,
    SpectralField,
    dealias,
    hermitianize,
    leray_project,
    to_spectral,
)

__all__ = [
    "taylor_green",
    "cosine_mode",
    "random_field",
    "random_divergence_free",
]


def taylor_green(grid: Grid, amplitude: float = 1.0) -> SpectralField:
    """Two-dimensional Taylor-Green vortex ``(A sin x cos y, -A cos x sin y)``.

    Its quadratic self-interaction is a pure gradient, so the divergence-free
    projection kills it and the exact evolution is ``exp(-2t)`` times the
    initial field.
    """
    if grid.dim != 2:
        raise ValueError("Taylor-Green initial data is two-dimensional")
    x, y = grid.physical_coordinates()
    samples = np.stack([
        amplitude * np.sin(x) * np.cos(y),
        -amplitude * np.cos(x) * np.sin(y),
    ])
    return to_spectral(samples, grid)


def cosine_mode(grid: Grid, k: tuple[int, ...], amplitude: float = 1.0) -> SpectralField:
    """Scalar field ``amplitude * cos(k.x)`` as a coefficient pair at ``+-k``."""
    if len(k) != grid.dim:
        raise ValueError(f"mode must have {grid.dim} components, got {k}")
    n = grid.n_per_axis
    if any(abs(int(ki)) > n // 2 for ki in k):
        raise ValueError(f"mode {k} is not resolved on an n={n} grid")
    coeffs = np.zeros((1,) + grid.shape, dtype=np.complex128)
    plus = tuple(int(ki) % n for ki in k)
    minus = tuple(-int(ki) % n for ki in k)
    coeffs[(0,) + plus] += amplitude / 2.0
    coeffs[(0,) + minus] += amplitude / 2.0
    return SpectralField(grid, coeffs)


def random_field(
    grid: Grid,
    seed: int,
    components: int = 1,
    band_fraction: float = DEFAULT_DEALIAS_FRACTION,
    mean_zero: bool = True,
) -> SpectralField:
    """Band-limited random real field with unit-variance Gaussian coefficients."""
    rng = np.random.default_rng(seed)
    shape = (components,) + grid.shape
    coeffs = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    field = hermitianize(SpectralField(grid, coeffs))
    field = dealias(field, band_fraction)
    if mean_zero:
        field.coeffs[(slice(None),) + (0,) * grid.dim] = 0.0
    return field


def random_divergence_free(
    grid: Grid,
    seed: int,
    sigma: float = 3.0,
    band_fraction: float = DEFAULT_DEALIAS_FRACTION,
) -> SpectralField:
    """Random solenoidal velocity with coefficient magnitudes ``|k|_1 ** -sigma``.

    Gaussian phases, Hermitian symmetry, zero mean; the amplitude envelope
    decays like an l1-frequency power law, which gives data rough enough to
    sit outside every exponential-weight class at time zero.  The caller is
    expected to rescale to a target norm.
    """
    field = random_field(grid, seed, components=grid.dim, band_fraction=band_fraction)
    with np.errstate(divide="ignore"):
        envelope = np.where(grid.k_l1 > 0, grid.k_l1, 1.0) ** (-sigma)
    envelope[(0,) * grid.dim] = 0.0
    shaped = SpectralField(grid, field.coeffs * envelope)
    return leray_project(shaped)

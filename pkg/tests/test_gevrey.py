"""Half-line cuts, sector operators, the exponential product identity, and
time-dependent weight schedules."""

import math
from itertools import product as iter_product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nsg import (
    FieldSeries,
    Grid,
    LPFilterBank,
    RefinedWeight,
    ScheduleMismatchError,
    SpectralField,
    cosine_mode,
    epq_norm,
    half_line_projection,
    heat_semigroup,
    gevrey_multiplier,
    lambda_schedule,
    octant_projection,
    poisson_damped,
    product_operator,
    product_operator_decomposed,
    random_field,
    refined_gevrey_norm,
    refined_weight_value,
    sector_operator,
)

seeds = st.integers(min_value=0, max_value=2**31 - 1)


def _one_mode(grid, k, value=1.0):
    """Complex field with a single coefficient at lattice site k."""
    coeffs = np.zeros((1,) + grid.shape, dtype=np.complex128)
    coeffs[(0,) + tuple(int(ki) % grid.n_per_axis for ki in k)] = value
    return SpectralField(grid, coeffs)


class TestHalfLineProjection:
    def test_cosine_becomes_half_exponential(self):
        """The positive cut of cos(x) keeps only the coefficient 1/2 at +1."""
        g = Grid(2, 16)
        out = half_line_projection(cosine_mode(g, (1, 0)), axis=0, sign=1)
        assert out.coeffs[0, 1, 0] == pytest.approx(0.5)
        rest = out.coeffs.copy()
        rest[0, 1, 0] = 0.0
        assert np.max(np.abs(rest)) == 0.0

    def test_zero_plane_is_halved(self):
        """Content on the k_axis = 0 plane is split evenly between the cuts."""
        g = Grid(2, 16)
        f = cosine_mode(g, (0, 3))
        out = half_line_projection(f, axis=0, sign=1)
        assert out.coeffs[0, 0, 3] == pytest.approx(0.25)

    def test_two_cuts_sum_to_identity(self):
        """K(+1) + K(-1) along one axis reconstructs the field exactly."""
        g = Grid(2, 16)
        f = random_field(g, seed=2)
        total = (
            half_line_projection(f, 0, 1).coeffs + half_line_projection(f, 0, -1).coeffs
        )
        assert np.max(np.abs(total - f.coeffs)) == 0.0

    def test_octant_partition(self):
        """The 2**d octant projections tile the whole lattice."""
        g = Grid(3, 8)
        f = random_field(g, seed=4)
        total = np.zeros_like(f.coeffs)
        for signs in iter_product((-1, 1), repeat=3):
            total += octant_projection(f, signs).coeffs
        assert np.max(np.abs(total - f.coeffs)) < 1e-15

    def test_invalid_axis_rejected(self):
        """Axis indices outside the grid dimension are refused."""
        g = Grid(2, 16)
        with pytest.raises(ValueError):
            half_line_projection(random_field(g, seed=1), axis=2, sign=1)


class TestPoissonDamping:
    def test_single_mode_factor(self):
        """Mode (3, 0), axis 0, t=1, orientation -1 damps by e**-6."""
        g = Grid(2, 16)
        f = cosine_mode(g, (3, 0))
        out = poisson_damped(f, 1.0, axis=0, orientation=-1)
        assert out.coeffs[0, 3, 0] == pytest.approx(0.5 * np.exp(-6.0), rel=1e-13)

    def test_positive_orientation_identity(self):
        """Orientation +1 applies no damping at all."""
        g = Grid(2, 16)
        f = random_field(g, seed=3)
        out = poisson_damped(f, 5.0, axis=1, orientation=1)
        assert np.array_equal(out.coeffs, f.coeffs)

    def test_zero_time_identity(self):
        """t = 0 leaves even the damped orientation untouched."""
        g = Grid(2, 16)
        f = random_field(g, seed=3)
        out = poisson_damped(f, 0.0, axis=0, orientation=-1)
        assert np.max(np.abs(out.coeffs - f.coeffs)) == 0.0

    def test_l2_contraction(self):
        """The damping never increases the l2 norm."""
        g = Grid(2, 32)
        f = random_field(g, seed=6)
        out = poisson_damped(f, 0.7, axis=0, orientation=-1)
        assert out.l2_norm() <= f.l2_norm() * (1.0 + 1e-12)

    def test_negative_time_rejected(self):
        """Damping backwards in time is an error."""
        g = Grid(2, 16)
        with pytest.raises(ValueError):
            poisson_damped(random_field(g, seed=1), -0.1, axis=0, orientation=-1)


class TestSectorOperator:
    def test_aligned_signs_no_damping(self):
        """alpha = beta reduces the sector operator to the octant cut."""
        g = Grid(2, 16)
        f = random_field(g, seed=8)
        out = sector_operator(f, 0.9, (1, 1), (1, 1))
        cut = octant_projection(f, (1, 1))
        assert np.max(np.abs(out.coeffs - cut.coeffs)) == 0.0

    def test_zero_time_is_pure_cut(self):
        """At t = 0 only the half-line cuts act."""
        g = Grid(2, 16)
        f = random_field(g, seed=8)
        out = sector_operator(f, 0.0, (1, -1), (-1, -1))
        mult = np.ones(g.shape)
        cut = octant_projection(SpectralField(g, f.coeffs * mult), (-1, -1))
        assert np.max(np.abs(out.coeffs - cut.coeffs)) == 0.0

    def test_opposed_axis_damps(self):
        """An axis with alpha*beta = -1 picks up the Poisson factor."""
        g = Grid(2, 16)
        f = _one_mode(g, (2, 1))
        out = sector_operator(f, 0.5, (-1, 1), (1, 1))
        # axis 0 opposes: factor e^{-2 * 0.5 * 2}; axis 1 aligned: none.
        assert out.coeffs[0, 2, 1] == pytest.approx(np.exp(-2.0), rel=1e-13)

    def test_l2_contraction_exact(self):
        """The sector multiplier is bounded by one, so l2 never grows."""
        g = Grid(2, 32)
        f = random_field(g, seed=9)
        for alpha, beta in [((1, 1), (1, 1)), ((1, -1), (-1, 1)), ((-1, -1), (1, 1))]:
            out = sector_operator(f, 0.3, alpha, beta)
            assert out.l2_norm() <= f.l2_norm() * (1.0 + 1e-12)

    def test_l4_operator_norm_moderate(self, grid32):
        """Measured L4 -> L4 norms of the sector pieces stay below 3."""
        worst = 0.0
        for seed in range(4):
            f = random_field(grid32, seed=seed)
            base = np.max(
                [np.mean(np.abs(np.fft.ifftn(f.coeffs[0]) * grid32.n_points) ** 4) ** 0.25]
            )
            for alpha in iter_product((-1, 1), repeat=2):
                for beta in iter_product((-1, 1), repeat=2):
                    out = sector_operator(f, 0.1, alpha, beta)
                    vals = np.fft.ifftn(out.coeffs[0]) * grid32.n_points
                    norm = np.mean(np.abs(vals) ** 4) ** 0.25
                    worst = max(worst, norm / base)
        assert worst < 3.0, f"sector L4 operator norm reached {worst:.3f}"


class TestProductOperator:
    def test_opposite_modes_poisson_factor(self):
        """Modes xi = +1 and eta = -1 meet at 0 with weight e**(-2t)."""
        g = Grid(2, 16)
        f = _one_mode(g, (1, 0))
        h = _one_mode(g, (-1, 0))
        out = product_operator(f, h, 0.3)
        assert out.coeffs[0, 0, 0] == pytest.approx(np.exp(-0.6), rel=1e-12)

    def test_same_sign_modes_unweighted(self):
        """Modes xi = 1 and eta = 2 combine at 3 with weight exactly 1."""
        g = Grid(2, 16)
        f = _one_mode(g, (1, 0))
        h = _one_mode(g, (2, 0))
        out = product_operator(f, h, 0.4)
        assert out.coeffs[0, 3, 0] == pytest.approx(1.0, rel=1e-12)

    def test_zero_time_plain_product(self):
        """At t = 0 the operator is the dealiased pointwise product."""
        g = Grid(2, 32)
        f = random_field(g, seed=11)
        h = random_field(g, seed=12)
        out = product_operator(f, h, 0.0)
        from nsg import dealias, to_physical, to_spectral

        direct = dealias(to_spectral(to_physical(f) * to_physical(h), g))
        assert np.max(np.abs(out.coeffs - direct.coeffs)) < 1e-12

    def test_never_amplifies_single_mode_pairs(self):
        """|xi+eta|_1 <= |xi|_1 + |eta|_1 makes every weight at most one."""
        g = Grid(2, 16)
        pairs = [((1, 2), (-3, 1)), ((2, 0), (0, 2)), ((1, -1), (-1, 1)), ((3, 2), (1, 1))]
        for xi, eta in pairs:
            f = _one_mode(g, xi)
            h = _one_mode(g, eta)
            base = np.abs(product_operator(f, h, 0.0).coeffs)
            for t in (0.05, 0.2, 1.0):
                out = np.abs(product_operator(f, h, t).coeffs)
                assert np.all(out <= base + 1e-14), (
                    f"pair {xi},{eta} amplified at t={t}"
                )

    def test_negative_time_rejected(self):
        """Negative weight times are refused."""
        g = Grid(2, 16)
        f = random_field(g, seed=1)
        with pytest.raises(ValueError):
            product_operator(f, f, -0.5)


class TestSectorSumForm:
    def test_agrees_with_direct_form_2d(self, grid32):
        """All 64 sector terms reassemble the direct operator on N=32."""
        f = random_field(grid32, seed=13)
        h = random_field(grid32, seed=14)
        for t in (0.0, 0.05, 0.2):
            direct = product_operator(f, h, t)
            summed = product_operator_decomposed(f, h, t)
            scale = np.max(np.abs(direct.coeffs))
            err = np.max(np.abs(direct.coeffs - summed.coeffs)) / scale
            assert err < 1e-8, f"sector sum off by {err:.3e} at t={t}"

    def test_agrees_with_direct_form_3d(self):
        """The 512-term 3D sum matches the direct form as well."""
        g = Grid(3, 16)
        f = random_field(g, seed=15)
        h = random_field(g, seed=16)
        direct = product_operator(f, h, 0.1)
        summed = product_operator_decomposed(f, h, 0.1)
        scale = np.max(np.abs(direct.coeffs))
        assert np.max(np.abs(direct.coeffs - summed.coeffs)) / scale < 1e-8

    def test_single_octant_support_collapse(self):
        """Inputs with strictly positive spectra only feed one octant."""
        g = Grid(2, 16)
        f = _one_mode(g, (1, 2))
        h = _one_mode(g, (2, 1))
        out = product_operator_decomposed(f, h, 0.2)
        # the product lives at (3, 3): strictly positive, so it must agree
        # with the direct form and carry weight 1 (same-sign additivity).
        assert out.coeffs[0, 3, 3] == pytest.approx(1.0, rel=1e-10)
        rest = out.coeffs.copy()
        rest[0, 3, 3] = 0.0
        assert np.max(np.abs(rest)) < 1e-12


class TestKernelMass:
    def test_poisson_kernel_mass_bounded(self):
        """The 1D kernel of exp(-a |k|) has L1 mass at most 1.01."""
        for a in (0.01, 0.1, 1.0):
            n = 1 << max(7, math.ceil(math.log2(48.0 / a)))
            k = np.abs(np.fft.fftfreq(n, d=1.0 / n))
            kernel = np.fft.ifft(np.exp(-a * k)) * n
            mass = float(np.mean(np.abs(kernel)))
            assert mass <= 1.01, f"kernel mass {mass:.4f} at a={a}"


class TestRefinedWeight:
    def test_unit_at_time_zero(self):
        """The attenuation starts at exactly one."""
        w = RefinedWeight(epsilon=0.5, T=1.0, a=4, lam=2.0)
        assert refined_weight_value(w, 0.0) == 1.0

    def test_pinned_endpoint_value(self):
        """lam = 2, eps = 1/2, a = 4 gives e**-2 at t = T."""
        w = RefinedWeight(epsilon=0.5, T=1.0, a=4, lam=2.0)
        assert refined_weight_value(w, 1.0) == pytest.approx(np.exp(-2.0), rel=1e-14)

    def test_monotone_decreasing(self):
        """With constant lam the attenuation decreases in t."""
        w = RefinedWeight(epsilon=0.25, T=2.0, a=2, lam=1.5)
        vals = [refined_weight_value(w, t) for t in np.linspace(0.0, 2.0, 9)]
        assert all(b < a for a, b in zip(vals, vals[1:]))

    def test_time_outside_window_rejected(self):
        """Evaluation outside [0, T] is an error."""
        w = RefinedWeight(epsilon=0.5, T=1.0)
        with pytest.raises(ValueError):
            refined_weight_value(w, -0.1)
        with pytest.raises(ValueError):
            refined_weight_value(w, 1.5)

    def test_tabulated_schedule_lookup(self):
        """A tabulated schedule resolves exactly at its own sample times."""
        times = np.array([0.0, 0.5, 1.0])
        lams = np.array([0.0, 1.0, 2.0])
        w = RefinedWeight(epsilon=0.5, T=1.0, lam=(times, lams))
        assert w.lambda_at(0.5) == 1.0
        with pytest.raises(ScheduleMismatchError):
            w.lambda_at(0.25)

    def test_invalid_parameters_rejected(self):
        """epsilon outside (0,1) and a outside {2,4} are refused."""
        with pytest.raises(ValueError):
            RefinedWeight(epsilon=1.5, T=1.0)
        with pytest.raises(ValueError):
            RefinedWeight(epsilon=0.5, T=1.0, a=3)


class TestRefinedGevreyNorm:
    def test_zero_series(self, grid16, bank16):
        """The weighted norm of the zero series vanishes."""
        z = SpectralField(grid16, np.zeros((2,) + grid16.shape, dtype=np.complex128))
        series = FieldSeries(np.array([0.0, 0.5, 1.0]), [z, z, z])
        w = RefinedWeight(epsilon=0.5, T=1.0, lam=1.0)
        assert refined_gevrey_norm(series, 2.0, 2.0, w, bank16) == 0.0

    def test_zero_strength_reduces_to_plain_norm(self, grid16, bank16):
        """lam = 0 removes both weights, leaving the two-part norm."""
        f = random_field(grid16, seed=19, components=2)
        times = np.linspace(0.0, 1.0, 11)
        series = FieldSeries(times, [heat_semigroup(f, t) for t in times])
        w = RefinedWeight(epsilon=0.5, T=1.0, lam=0.0)
        assert refined_gevrey_norm(series, 2.0, 2.0, w, bank16) == pytest.approx(
            epq_norm(series, 2.0, 2.0, 1.0, bank16), rel=1e-12
        )

    def test_heat_mode_closed_form(self):
        """Constant lam on the heat flow of cos(2x) matches the closed form."""
        g = Grid(2, 8)
        bank = LPFilterBank(g)
        f = cosine_mode(g, (2, 0))
        times = np.linspace(0.0, 1.0, 4001) ** 2
        series = FieldSeries(times, [heat_semigroup(f, t) for t in times])
        w = RefinedWeight(epsilon=0.5, T=1.0, a=4, lam=1.0)
        value = refined_gevrey_norm(series, 2.0, 2.0, w, bank)
        # Sample weight: attenuation e^{-t/2} times the l1 amplification
        # e^{1 * t * 2} on |k|_1 = 2, times the heat decay e^{-4t}: a pure
        # exponential e^{mu t} with mu = -0.5 + 2 - 4 = -2.5 on block 1.
        base = np.pi * np.sqrt(2.0)
        sup_part = 2.0**0.5 * base
        l4_part = 2.0 * base * ((1.0 - np.exp(-10.0)) / 10.0) ** 0.25
        assert value == pytest.approx(sup_part + l4_part, rel=1e-6)


class TestLambdaSchedule:
    def test_pinned_value(self):
        """uh_norm = e**-2 with eps = 1/2 gives sqrt(2)."""
        assert lambda_schedule(np.exp(-2.0), 0.5) == pytest.approx(np.sqrt(2.0), rel=1e-14)

    def test_balancing_identity(self):
        """exp(lam**2 / (4(1-eps))) * uh equals sqrt(uh) identically."""
        for uh in (0.5, 0.1, 0.01):
            for eps in (0.25, 0.5):
                lam = lambda_schedule(uh, eps)
                lhs = math.exp(lam**2 / (4.0 * (1.0 - eps))) * uh
                assert lhs == pytest.approx(math.sqrt(uh), rel=1e-14)

    def test_vanishes_as_norm_approaches_one(self):
        """The strength goes to zero as the heat norm approaches one."""
        assert lambda_schedule(1.0 - 1e-12, 0.5) == pytest.approx(0.0, abs=1e-5)

    def test_large_norm_rejected(self):
        """Norms at or above one make the schedule undefined."""
        with pytest.raises(ScheduleMismatchError):
            lambda_schedule(1.5, 0.5)
        with pytest.raises(ScheduleMismatchError):
            lambda_schedule(1.0, 0.5)

    @given(uh=st.floats(min_value=1e-6, max_value=0.999), eps=st.floats(min_value=0.01, max_value=0.99))
    @settings(max_examples=25, deadline=None)
    def test_balancing_identity_property(self, uh, eps):
        """The balancing identity holds across the whole parameter range."""
        lam = lambda_schedule(uh, eps)
        assert math.exp(lam**2 / (4.0 * (1.0 - eps))) * uh == pytest.approx(
            math.sqrt(uh), rel=1e-12
        )


class TestGevreyMultiplierInterplay:
    @given(seed=seeds)
    @settings(max_examples=8, deadline=None)
    def test_sector_commutes_with_weight(self, seed):
        """Sector cuts and the l1 weight are both diagonal, so they commute."""
        g = Grid(2, 16)
        f = random_field(g, seed=seed)
        a = sector_operator(gevrey_multiplier(f, 0.3), 0.2, (1, -1), (1, 1))
        b = gevrey_multiplier(sector_operator(f, 0.2, (1, -1), (1, 1)), 0.3)
        assert np.max(np.abs(a.coeffs - b.coeffs)) < 1e-12

"""End-to-end acceptance checks, one per headline property of the toolkit.

Each test records a PASS/FAIL line through the ``acceptance`` fixture; the
collected lines are printed as a summary section at the end of the pytest
run.  Tolerances are deliberately loose multiples of the measured desk-scale
values so the checks guard regressions rather than chase noise.
"""

import math

import numpy as np
import pytest

from nsg import (
    FieldSeries,
    FixedPointDivergenceError,
    Grid,
    LPFilterBank,
    NormSpec,
    SolverConfig,
    SpectralField,
    besov_norm,
    build_constants_report,
    derivative,
    derivative_decay_probe,
    epq_norm,
    gevrey_multiplier,
    gevrey_sample_norms,
    heat_localization_probe,
    heat_semigroup,
    heat_trajectory,
    kahane_closed_form_check,
    leibniz_identity_check,
    leray_project,
    mild_residual,
    nonlinear_term,
    picard_solve,
    product_operator,
    product_operator_decomposed,
    radius_scaling_probe,
    random_divergence_free,
    random_field,
    step_solve,
    taylor_green,
    to_physical,
    to_spectral,
)

CRITICAL = NormSpec(0.5, 2.0, 2.0)


def _scaled(grid, bank, target, sigma, seed):
    raw = random_divergence_free(grid, seed=seed, sigma=sigma)
    return (target / besov_norm(raw, CRITICAL, bank)) * raw


def test_dyadic_partition_of_unity(acceptance):
    """Away from the mean mode the annulus filters sum to one on every grid."""
    worst = 0.0
    for dim in (2, 3):
        for n in (16, 32, 64):
            worst = max(worst, LPFilterBank(Grid(dim, n)).partition_defect())
    passed = worst < 1e-10
    acceptance.record(
        "dyadic partition of unity", passed,
        f"max defect {worst:.2e} over d in {{2,3}}, N in {{16,32,64}} (tol 1e-10)",
    )
    assert passed


def test_transform_and_multiplier_invariants(acceptance, grid32):
    """Round trips at 1e-12; diagonal operators commute at 1e-13."""
    f = random_field(grid32, seed=21)
    scale = float(np.max(np.abs(f.coeffs)))

    phys = to_physical(f)
    round1 = float(np.max(np.abs(to_physical(to_spectral(phys, grid32)) - phys)))
    round2 = float(np.max(np.abs(to_spectral(to_physical(f), grid32).coeffs - f.coeffs)))

    u = random_divergence_free(grid32, seed=22)
    pu = leray_project(u)
    ortho = abs(complex(np.sum(np.conj(u.coeffs - pu.coeffs) * pu.coeffs)))

    a, t = 0.4, 0.3
    alpha = (1, 1)
    pairs = [
        (derivative(heat_semigroup(u, t), alpha), heat_semigroup(derivative(u, alpha), t)),
        (derivative(gevrey_multiplier(u, a), alpha), gevrey_multiplier(derivative(u, alpha), a)),
        (gevrey_multiplier(heat_semigroup(u, t), a), heat_semigroup(gevrey_multiplier(u, a), t)),
    ]
    commute = max(float(np.max(np.abs(x.coeffs - y.coeffs))) for x, y in pairs)

    passed = round1 < 1e-12 * scale and round2 < 1e-12 * scale and ortho < 1e-13 and commute < 1e-13
    acceptance.record(
        "transform round trip and multiplier commutation", passed,
        f"round trips {max(round1, round2):.2e}, projection angle {ortho:.2e}, "
        f"commutators {commute:.2e}",
    )
    assert passed


def test_sector_sum_product_identity(acceptance):
    """The weighted product equals its sector-by-sector sum form."""
    grid = Grid(2, 32)
    worst2d = 0.0
    for seed in range(10):
        f = random_field(grid, seed=300 + seed)
        g = random_field(grid, seed=400 + seed)
        for t in (0.0, 0.05, 0.2):
            direct = product_operator(f, g, t)
            split = product_operator_decomposed(f, g, t)
            worst2d = max(worst2d, (direct - split).l2_norm() / direct.l2_norm())

    grid3 = Grid(3, 16)
    f3 = random_field(grid3, seed=310)
    g3 = random_field(grid3, seed=410)
    direct3 = product_operator(f3, g3, 0.05)
    split3 = product_operator_decomposed(f3, g3, 0.05)
    worst3d = (direct3 - split3).l2_norm() / direct3.l2_norm()

    passed = worst2d < 1e-8 and worst3d < 1e-8
    acceptance.record(
        "sector-sum product identity", passed,
        f"2D worst {worst2d:.2e} over 10 pairs x 3 times (64 terms); "
        f"3D spot check {worst3d:.2e} (512 terms); tol 1e-8",
    )
    assert passed


def test_binomial_convolution_closed_form(acceptance):
    """Exact integer identity, monotone normalized ratios, strict bound 4."""
    report = kahane_closed_form_check(200)
    passed = report.identity_holds and report.strictly_increasing and report.bounded_by_four
    acceptance.record(
        "binomial convolution closed form", passed,
        f"exact for n <= 200; last ratio {report.ratios[-1]} < 4",
    )
    assert passed


def test_extended_product_rule(acceptance):
    """The n-th derivative identity for t^n f g across the closed family."""
    pairs = [
        ("poly:0,1", "exp:1"), ("poly:1,2,0.5", "sin"),
        ("poly:2,0,0,1,0,0,1", "cos"), ("exp:-0.5", "cos"),
        ("sin", "cos"), ("exp:1", "exp:0.25"),
    ]
    worst = 0.0
    for f_spec, g_spec in pairs:
        for n in range(1, 9):
            worst = max(worst, leibniz_identity_check(n, f_spec, g_spec))
    passed = worst < 1e-9
    acceptance.record(
        "extended product rule", passed,
        f"max deviation {worst:.2e} over 6 pairs, n <= 8 (tol 1e-9)",
    )
    assert passed


def test_heat_block_localization(acceptance):
    """Per-block heat decay rates sit inside the annulus-squared bracket."""
    grid = Grid(2, 64)
    bank = LPFilterBank(grid)
    outside = []
    for j in bank.populated_js():
        rep = heat_localization_probe(j, grid, bank, seed=40 + j)
        if not rep.within_bracket:
            outside.append((j, rep.rate))
    passed = not outside
    acceptance.record(
        "heat block localization", passed,
        f"all rates in [(3/4)^2, (8/3)^2] * 4^j on N=64" if passed
        else f"blocks outside bracket: {outside}",
    )
    assert passed


def test_vortex_decay_exactness(acceptance, grid32):
    """The single-cell vortex decays at exactly e^{-2t} with no nonlinearity."""
    traj = step_solve(taylor_green(grid32), SolverConfig(grid32, T=1.0, steps=200, record_every=20))
    ratio = traj.fields[-1].l2_norm() / traj.fields[0].l2_norm()
    rel = abs(ratio - math.exp(-2.0)) / math.exp(-2.0)
    nl = max(nonlinear_term(f).l2_norm() for f in traj.fields)
    passed = rel < 1e-6 and nl < 1e-12
    acceptance.record(
        "vortex decay exactness", passed,
        f"amplitude error {rel:.2e} (tol 1e-6), advection residue {nl:.2e} (tol 1e-12)",
    )
    assert passed


def test_mild_solution_residual(acceptance, small_run):
    """The recorded flow satisfies the integral equation at every sample."""
    worst = max(mild_residual(small_run, i) for i in range(len(small_run)))
    passed = worst < 1e-6
    acceptance.record(
        "mild-solution residual", passed,
        f"max L2 residual {worst:.2e} over {len(small_run)} samples (tol 1e-6)",
    )
    assert passed


def test_fixed_point_contraction(acceptance, grid32, bank32):
    """Small data contracts below 1/2 and matches stepping; big data fails loudly."""
    u0 = _scaled(grid32, bank32, 1e-2, sigma=3.0, seed=5)
    cfg = SolverConfig(grid32, T=0.5, steps=50, record_every=5)
    traj, report = picard_solve(u0, cfg)
    worst_ratio = max(report.ratios) if report.ratios else 0.0
    stepped = step_solve(u0, cfg)
    diff = FieldSeries(
        traj.times, [a - b for a, b in zip(traj.fields, stepped.fields)]
    )
    dist = epq_norm(diff, cfg.norm_p, cfg.norm_q, cfg.T, bank32)
    allowed = max(1e-6, 10.0 * cfg.picard_tol)
    small_ok = report.converged and worst_ratio < 0.5 and dist < allowed

    g64 = Grid(2, 64)
    bank64 = LPFilterBank(g64)
    raw = random_divergence_free(g64, seed=5, sigma=0.75)
    spec = NormSpec(3.0 / 4.0 - 1.0, 4.0, math.inf)
    big = (10.0 / besov_norm(raw, spec, bank64)) * raw
    big_cfg = SolverConfig(g64, T=1.0, steps=8, norm_p=4.0, norm_q=math.inf,
                           picard_max_iters=12)
    with pytest.warns(UserWarning, match="smallness"):
        with pytest.raises(FixedPointDivergenceError) as info:
            picard_solve(big, big_cfg)
    big_report = info.value.report
    big_ok = (
        big_report is not None
        and not big_report.converged
        and max(big_report.ratios) >= 0.5
    )

    passed = small_ok and big_ok
    acceptance.record(
        "fixed-point contraction", passed,
        f"small data: converged in {report.iterations} sweeps (worst ratio "
        f"{worst_ratio:.3f}), solver gap {dist:.2e} "
        f"(allowed {allowed:.1e}); large data: reported non-contraction after "
        f"{big_report.iterations} sweeps, last ratio {big_report.ratios[-1]:.3f}",
    )
    assert passed


def test_weighted_norm_boundedness(acceptance, small_initial, small_run, bank32):
    """sup_t of the exponentially weighted critical norm stays within 3x the data."""
    worst = 0.0
    details = []
    for p, q in [(2.0, 2.0), (3.0, 1.0), (4.0, math.inf)]:
        initial = besov_norm(small_initial, NormSpec(3.0 / p - 1.0, p, q), bank32)
        sup = float(np.max(gevrey_sample_norms(small_run, p, q, bank32)))
        ratio = sup / initial
        worst = max(worst, ratio)
        details.append(f"({p:g},{q:g}): {ratio:.3f}")
    passed = worst <= 3.0
    acceptance.record(
        "weighted norm boundedness", passed,
        f"sup/initial over t <= 1: {', '.join(details)} (cap 3)",
    )
    assert passed


def test_derivative_growth_constant(acceptance, small_run, bank32):
    """(||F_n||/||F_0||)^{1/n}/n is one constant across n = 1..3, within x3."""
    report = build_constants_report(small_run, 2.0, 2.0, bank32, n_max=3)
    values = [v for _, v in report.per_n]
    finite = all(math.isfinite(v) and v > 0 for v in values)
    spread = max(values) / min(values) if finite else math.inf
    passed = finite and spread <= 3.0
    acceptance.record(
        "derivative growth constant", passed,
        f"per-order constants {['%.3f' % v for v in values]}, spread {spread:.3f} (cap 3)",
    )
    assert passed


def test_compensated_derivative_decay(acceptance, decay_run):
    """t^{|a|/2+n} sup|d^a d_t^n u| is flat within x3 on the final decade."""
    spreads = []
    for alpha, n in [((1, 0), 0), ((0, 0), 1), ((2, 0), 0)]:
        report = derivative_decay_probe(decay_run, alpha, n)
        comp = [c for t, c in zip(report.times, report.compensated) if t >= 0.1]
        spreads.append(max(comp) / min(comp))
    worst = max(spreads)
    passed = worst <= 3.0
    acceptance.record(
        "compensated derivative decay", passed,
        f"max/min over t in [0.1, 1]: {['%.3f' % s for s in spreads]} "
        f"for (|a|, n) in {{(1,0),(0,1),(2,0)}} (cap 3)",
    )
    assert passed


def test_radius_square_root_law(acceptance, small_run, bank32):
    """The operational analyticity radius clears 0.5 sqrt(t) past t = 0.05."""
    rows = radius_scaling_probe(small_run, kappa=2.0, p=2.0, q=2.0, bank=bank32)
    ratios = [r.rad_over_sqrt_t for r in rows if r.t >= 0.05]
    lowest = min(ratios)
    passed = lowest >= 0.5
    acceptance.record(
        "radius square-root law", passed,
        f"min rad/sqrt(t) = {lowest:.3f} over t in [0.05, 1] at kappa=2 (floor 0.5)",
    )
    assert passed


def test_rough_data_radius_scaling(acceptance):
    """Borderline data beats sqrt(t) by a log factor; the NSE flow agrees."""
    g = Grid(2, 128)
    bank = LPFilterBank(g)
    kx, ky = g.wavevectors
    k_abs = np.sqrt(g.k_sq)
    mags = np.where(g.k_l1 > 0, np.float_power(g.k_l1, -3.0, where=g.k_l1 > 0), 0.0)
    mags = np.where((np.abs(kx) == g.n_per_axis // 2) | (np.abs(ky) == g.n_per_axis // 2),
                    0.0, mags)
    unit = np.where(k_abs > 0, k_abs, 1.0)
    rough = SpectralField(g, np.stack([1j * mags * (-ky) / unit, 1j * mags * kx / unit]))
    times = np.array([0.0, 1e-4, 3.162e-4, 1e-3, 3.162e-3, 1e-2, 3.162e-2, 1e-1])
    # dealias_fraction 1: the heat flow is linear, so the full tail is kept
    traj = heat_trajectory(rough, SolverConfig(g, T=0.1, steps=1, dealias_fraction=1.0),
                           times=times)
    rows = radius_scaling_probe(traj, kappa=2.5, p=2.0, q=2.0, bank=bank)
    by_t = {round(r.t, 6): r for r in rows}
    sqrt_gain = by_t[0.001].rad_over_sqrt_t / by_t[0.1].rad_over_sqrt_t
    logs = [r.rad_over_sqrt_tlog for r in rows]
    log_spread = max(logs) / min(logs)

    g64 = Grid(2, 64)
    bank64 = LPFilterBank(g64)
    v0 = _scaled(g64, bank64, 0.05, sigma=3.0, seed=12)
    nse = step_solve(v0, SolverConfig(g64, T=0.1, steps=100, record_every=1))
    nse_rows = radius_scaling_probe(nse, kappa=2.5, p=2.0, q=2.0, bank=bank64)
    nse_trend = nse_rows[0].rad_over_sqrt_t / nse_rows[-1].rad_over_sqrt_t

    passed = sqrt_gain >= 1.5 and log_spread <= 2.0 and nse_trend >= 1.2
    acceptance.record(
        "rough-data radius scaling", passed,
        f"heat flow: rad/sqrt(t) gain {sqrt_gain:.3f} (floor 1.5), "
        f"log-compensated spread {log_spread:.3f} (cap 2); "
        f"short-time solver trend {nse_trend:.3f} (floor 1.2)",
    )
    assert passed

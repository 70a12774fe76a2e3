"""Self-contained verification suites behind ``nsg verify``.

Each check produces one report entry ``{lemma_id, range_tested, status,
measured_constant, worst_case}``; a suite passes when every entry does.
The suites re-measure the inequalities the toolkit leans on, on small
grids chosen to finish in seconds.
"""

from __future__ import annotations

import math
from itertools import product as iter_product

import numpy as np

from .gevrey import product_operator, product_operator_decomposed, sector_operator
from .identities import (
    bernstein_probe,
    heat_gevrey_bound_probe,
    heat_localization_probe,
    kahane_closed_form_check,
    leibniz_identity_check,
)
from .initial_data import cosine_mode, random_field
from .lp import LPFilterBank
from .spectral import Grid, SpectralField, to_physical

__all__ = ["run_suite", "SUITE_NAMES"]


def _entry(lemma_id: str, rng: str, ok: bool, measured: float | None, worst) -> dict:
    return {
        "lemma_id": lemma_id,
        "range_tested": rng,
        "status": "pass" if ok else "fail",
        "measured_constant": measured,
        "worst_case": worst,
    }


def _lp_norm(f: SpectralField, p: float) -> float:
    values = to_physical(f)
    mag = np.abs(values[0]) if values.shape[0] == 1 else np.sqrt(np.sum(values**2, axis=0))
    return float((np.sum(mag**p) * f.grid.cell_volume) ** (1.0 / p))


def _suite_lp() -> list[dict]:
    entries = []

    worst_defect, worst_grid = 0.0, None
    for dim, n in [(2, 16), (2, 32), (2, 64), (3, 16), (3, 32)]:
        bank = LPFilterBank(Grid(dim, n))
        defect = bank.partition_defect()
        if defect > worst_defect:
            worst_defect, worst_grid = defect, f"dim={dim}, n={n}"
    entries.append(_entry(
        "lp-partition-unity", "dim in {2,3}, n up to 64 (2D) / 32 (3D)",
        worst_defect < 1e-10, worst_defect, worst_grid,
    ))

    grid = Grid(2, 32)
    bank = LPFilterBank(grid)
    spurious = 0.0
    candidates = {1.0: {-1, 0}, 2.0: {0, 1}}
    for radius, allowed in candidates.items():
        mode = cosine_mode(grid, (int(radius), 0))
        for j in bank.js:
            if j not in allowed:
                spurious = max(spurious, float(np.max(np.abs(bank.block(mode, j).coeffs))))
    entries.append(_entry(
        "lp-support-arithmetic", "|xi| in {1, 2}, all blocks",
        spurious == 0.0, spurious, "blocks outside the support window",
    ))

    f = random_field(grid, seed=7)
    total = sum((bank.block(f, j).coeffs for j in bank.js), np.zeros_like(f.coeffs))
    mean_slot = (slice(None),) + (0,) * grid.dim
    total[mean_slot] += f.coeffs[mean_slot]
    defect = float(np.max(np.abs(total - f.coeffs)))
    entries.append(_entry(
        "lp-reconstruction", "random band-limited field, n=32, dim=2",
        defect < 1e-12, defect, "sum of blocks plus mean vs. the field",
    ))

    worst_cross = 0.0
    for j in bank.js:
        for k in bank.js:
            if abs(j - k) >= 2:
                cross = bank.block(bank.block(f, k), j)
                worst_cross = max(worst_cross, float(np.max(np.abs(cross.coeffs))))
    entries.append(_entry(
        "lp-quasi-orthogonality", "all block pairs |j-k| >= 2, n=32, dim=2",
        worst_cross == 0.0, worst_cross, "composed annulus filters",
    ))
    return entries


def _suite_bernstein() -> list[dict]:
    grid64 = Grid(2, 64)
    bank64 = LPFilterBank(grid64)
    worst_fwd, worst_rev_margin, worst_case = 0.0, math.inf, None
    for p in (2.0, 4.0):
        for j in bank64.populated_js():
            rep = bernstein_probe(j, grid64, bank64, p=p, seed=11 + j)
            worst_fwd = max(worst_fwd, rep.forward_constant)
            margin = rep.reverse_constant / rep.reverse_floor
            if margin < worst_rev_margin:
                worst_rev_margin, worst_case = margin, f"j={j}, p={p}"
    ok = worst_fwd <= (8.0 / 3.0) * 1.1 and worst_rev_margin >= 1.0
    return [_entry(
        "bernstein-two-sided", "orders 1..3, p in {2,4}, populated blocks, n=64",
        ok, worst_fwd, worst_case,
    )]


def _suite_gevrey() -> list[dict]:
    entries = []
    grid = Grid(2, 32)
    f = random_field(grid, seed=3)

    from .gevrey import half_line_projection

    worst = 0.0
    for axis in range(grid.dim):
        both = half_line_projection(f, axis, +1) + half_line_projection(f, axis, -1)
        worst = max(worst, float(np.max(np.abs(both.coeffs - f.coeffs))))
    entries.append(_entry(
        "halfline-partition", "both axes, random field, n=32",
        worst == 0.0, worst, "K_plus + K_minus vs. identity",
    ))

    signs = list(iter_product((-1, 1), repeat=grid.dim))
    worst2, worst4 = 0.0, 0.0
    for a in signs[:2]:
        for b in signs:
            z = sector_operator(f, 0.1, a, b)
            worst2 = max(worst2, _lp_norm(z, 2) / _lp_norm(f, 2))
            worst4 = max(worst4, _lp_norm(z, 4) / _lp_norm(f, 4))
    ok = worst2 <= 1.0 + 1e-12 and worst4 < 3.0
    entries.append(_entry(
        "sector-contraction", "sampled sectors, p in {2,4}, t=0.1, n=32",
        ok, worst2, {"p4_constant": worst4},
    ))

    worst_rel, worst_at = 0.0, None
    for seed in (0, 1, 2):
        g1 = random_field(grid, seed=100 + seed)
        g2 = random_field(grid, seed=200 + seed)
        for t in (0.0, 0.05, 0.2):
            direct = product_operator(g1, g2, t)
            split = product_operator_decomposed(g1, g2, t)
            rel = (direct - split).l2_norm() / direct.l2_norm()
            if rel > worst_rel:
                worst_rel, worst_at = rel, f"seed={seed}, t={t}"
    entries.append(_entry(
        "sector-product-identity", "3 random pairs, t in {0, 0.05, 0.2}, n=32, dim=2",
        worst_rel < 1e-8, worst_rel, worst_at,
    ))

    worst_mass, worst_a = 0.0, None
    for a in (0.01, 0.1, 1.0):
        n = 1 << max(7, math.ceil(math.log2(48.0 / a)))
        k = np.abs(np.fft.fftfreq(n, d=1.0 / n))
        kernel = np.fft.ifft(np.exp(-a * k)) * n
        mass = float(np.mean(np.abs(kernel.real)))
        if mass > worst_mass:
            worst_mass, worst_a = mass, a
    entries.append(_entry(
        "gevrey-kernel-mass", "per-axis kernel, a in {0.01, 0.1, 1}",
        worst_mass <= 1.01, worst_mass, f"a={worst_a}",
    ))

    cap2 = 1.1 * math.exp(grid.dim / 2.0)
    measured = {2.0: [], 4.0: []}
    for batch in (0, 1):
        h = random_field(grid, seed=500 + batch)
        for t in (0.01, 0.1, 1.0, 10.0):
            mult = np.exp(-0.5 * t * grid.k_sq + math.sqrt(t) * grid.k_l1)
            hf = SpectralField(grid, h.coeffs * mult)
            for p in (2.0, 4.0):
                measured[p].append(_lp_norm(hf, p) / _lp_norm(h, p))
    c2 = max(measured[2.0])
    c4 = max(measured[4.0])
    half = len(measured[2.0]) // 2
    stability = max(max(measured[2.0][:half]) / max(measured[2.0][half:]),
                    max(measured[2.0][half:]) / max(measured[2.0][:half]))
    ok = c2 <= cap2 and c4 <= 3.0 and stability <= 1.1
    entries.append(_entry(
        "heat-gevrey-lp", "t in {0.01, 0.1, 1, 10}, p in {2,4}, two batches, n=32",
        ok, c2, {"p4_constant": c4, "batch_stability": stability},
    ))
    return entries


def _suite_kahane() -> list[dict]:
    report = kahane_closed_form_check(200)
    ok = report.identity_holds and report.strictly_increasing and report.bounded_by_four
    return [_entry(
        "kahane-closed-form", "1 <= n <= 200 (exact integers)",
        ok, float(report.ratios[-1]), f"ratio at n=200 is {report.ratios[-1]}",
    )]


def _suite_leibniz() -> list[dict]:
    pairs = [
        ("poly:0,1", "exp:1"),
        ("poly:1,2,0.5", "sin"),
        ("poly:2,0,0,1,0,0,1", "cos"),
        ("exp:-0.5", "cos"),
        ("sin", "cos"),
        ("exp:1", "exp:0.25"),
    ]
    worst, worst_at = 0.0, None
    for f_spec, g_spec in pairs:
        for n in (1, 2, 4, 8):
            dev = leibniz_identity_check(n, f_spec, g_spec)
            if dev > worst:
                worst, worst_at = dev, f"n={n}, f={f_spec}, g={g_spec}"
    return [_entry(
        "leibniz-product-rule", "closed family pairs, n in {1,2,4,8}",
        worst < 1e-9, worst, worst_at,
    )]


def _suite_heat() -> list[dict]:
    entries = []
    grid = Grid(2, 64)
    bank = LPFilterBank(grid)

    rates, ok = {}, True
    for j in bank.populated_js():
        rep = heat_localization_probe(j, grid, bank, seed=40 + j)
        rates[j] = rep.rate / 4.0**j
        ok = ok and rep.within_bracket
    entries.append(_entry(
        "heat-localization", "populated blocks, n=64, dim=2",
        ok, max(rates.values()), {f"j={j}": r for j, r in rates.items()},
    ))

    grid32 = Grid(2, 32)
    bank32 = LPFilterBank(grid32)
    per_n = {}
    for n in range(4):
        implied = []
        for j in range(0, 5):
            for t in (2.0**-8, 2.0**-4, 2.0**-2, 1.0):
                ratio = heat_gevrey_bound_probe(n, j, t, grid32, bank32, seed=60 + j)
                implied.append(ratio ** (1.0 / (n + 1)))
        per_n[n] = max(implied)
    stability = max(per_n.values()) / min(per_n.values())
    entries.append(_entry(
        "heat-gevrey-smoothing", "n in 0..3, j in 0..4, t in 2^-8..1, n_grid=32",
        stability <= 2.0, stability, {f"n={n}": c for n, c in per_n.items()},
    ))
    return entries


_SUITES = {
    "lp": _suite_lp,
    "bernstein": _suite_bernstein,
    "gevrey": _suite_gevrey,
    "kahane": _suite_kahane,
    "leibniz": _suite_leibniz,
    "heat": _suite_heat,
}

SUITE_NAMES = sorted(_SUITES) + ["all"]


def run_suite(name: str) -> tuple[list[dict], bool]:
    """Run one suite (or ``all``); returns the entries and overall success."""
    if name == "all":
        entries = []
        for key in sorted(_SUITES):
            entries.extend(_SUITES[key]())
    elif name in _SUITES:
        entries = _SUITES[name]()
    else:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITE_NAMES)}")
    return entries, all(e["status"] == "pass" for e in entries)

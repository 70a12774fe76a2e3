"""Exact identities and measured constants behind the derivative-growth bound.

The combinatorial side is integer-exact (Python bignums and rationals).
The analytic side measures operator constants on random block-limited
fields: exponential smoothing of heat-evolved blocks, block-wise heat
decay rates, and the two-sided derivative (Bernstein-type) inequalities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iter_product

import numpy as np
import sympy

from .initial_data import random_field
from .lp import LPFilterBank
from .spectral import Grid, SpectralField, derivative, gevrey_multiplier, heat_semigroup, to_physical

__all__ = [
    "ExactRatio",
    "kahane_sum",
    "kahane_closed_form_check",
    "KahaneReport",
    "leibniz_identity_check",
    "heat_gevrey_bound_probe",
    "heat_localization_probe",
    "LocalizationReport",
    "bernstein_probe",
    "BernsteinReport",
]

@dataclass(frozen=True)
class ExactRatio:
    """One binomial-convolution value with its normalizing power of ``n``.

    Everything is exact: ``sum`` and ``bound_base`` are big integers and
    ``ratio = sum / bound_base`` is a stdlib fraction.
    """

    n: int
    sum: int
    bound_base: int

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.sum, self.bound_base)


def _tower(base: int, exponent: int) -> int:
    """``base**exponent`` with the convention ``0**s = 1`` for every ``s``."""
    if base == 0:
        return 1
    if exponent < 0:
        raise ValueError("negative exponents only arise at base zero")
    return base**exponent


def kahane_sum(n: int) -> ExactRatio:
    """Binomial convolution of tree-function weights.

    ``sum over j of C(n, j) j**(j-1) (n-j)**(n-j-1)`` with ``0**s = 1``,
    in exact integer arithmetic, normalized by ``n**(n-1)``.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    total = sum(
        math.comb(n, j) * _tower(j, j - 1) * _tower(n - j, n - j - 1)
        for j in range(n + 1)
    )
    return ExactRatio(n=n, sum=total, bound_base=_tower(n, n - 1))


@dataclass
class KahaneReport:
    n_max: int
    identity_holds: bool
    ratios: list[Fraction]
    strictly_increasing: bool
    bounded_by_four: bool


def kahane_closed_form_check(n_max: int) -> KahaneReport:
    """Compare the convolution against ``(4n - 2) n**(n-2)`` for ``1 <= n <= n_max``.

    Ratios are ``sum / n**(n-1)``, exactly ``(4n - 2)/n``: strictly
    increasing and below 4.
    """
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    identity = True
    ratios: list[Fraction] = []
    for n in range(1, n_max + 1):
        s = kahane_sum(n)
        closed = (4 * n - 2) * Fraction(n) ** (n - 2)
        if Fraction(s.sum) != closed:
            identity = False
        ratios.append(s.ratio)
    increasing = all(b > a for a, b in zip(ratios, ratios[1:]))
    bounded = all(r < 4 for r in ratios)
    return KahaneReport(
        n_max=n_max,
        identity_holds=identity,
        ratios=ratios,
        strictly_increasing=increasing,
        bounded_by_four=bounded,
    )


_T = sympy.Symbol("t")


def _parse_function_spec(spec: str) -> sympy.Expr:
    """Closed family: ``poly:c0,c1,...`` (degree <= 6), ``exp:c``, ``sin``, ``cos``."""
    name, _, args = spec.partition(":")
    name = name.strip()
    if name == "poly":
        coeffs = [sympy.Rational(str(c.strip())) for c in args.split(",") if c.strip()]
        if not coeffs or len(coeffs) > 7:
            raise ValueError(f"poly spec needs 1..7 coefficients, got {spec!r}")
        return sum(c * _T**i for i, c in enumerate(coeffs))
    if name == "exp":
        rate = sympy.Rational(str(args.strip() or "1"))
        return sympy.exp(rate * _T)
    if name == "sin" and not args:
        return sympy.sin(_T)
    if name == "cos" and not args:
        return sympy.cos(_T)
    raise ValueError(f"unsupported function spec {spec!r}")


def leibniz_identity_check(
    n: int,
    f_spec: str,
    g_spec: str,
    times: tuple[float, ...] = (0.1, 0.5, 1.0, 2.0),
) -> float:
    """Largest deviation in the product rule for ``d^n/dt^n (t^n f g)``.

    Both sides are assembled independently (exact derivatives, 30-digit
    evaluation): the left side differentiates the full product, the right
    side combines ``d^j (t^j f)`` and ``d^(n-j) (t^(n-j) g)`` with binomial
    weights and subtracts the lower-order correction sum.
    """
    if not 0 <= n <= 8:
        raise ValueError(f"n must lie in 0..8, got {n}")
    f = _parse_function_spec(f_spec)
    g = _parse_function_spec(g_spec)

    lhs = sympy.diff(_T**n * f * g, _T, n)
    rhs = sympy.Integer(0)
    for j in range(n + 1):
        rhs += (
            sympy.binomial(n, j)
            * sympy.diff(_T**j * f, _T, j)
            * sympy.diff(_T ** (n - j) * g, _T, n - j)
        )
    for j in range(n):
        rhs -= (
            n
            * sympy.binomial(n - 1, j)
            * sympy.diff(_T**j * f, _T, j)
            * sympy.diff(_T ** (n - 1 - j) * g, _T, n - 1 - j)
        )

    worst = 0.0
    for t in times:
        point = {_T: sympy.Rational(str(t))}
        left = lhs.subs(point).evalf(30)
        right = rhs.subs(point).evalf(30)
        worst = max(worst, abs(float(left - right)))
    return worst


def _random_block(grid: Grid, bank: LPFilterBank, j: int, seed: int) -> SpectralField:
    f = random_field(grid, seed, components=1, band_fraction=1.0)
    block = bank.block(f, j)
    if float(np.max(np.abs(block.coeffs))) == 0.0:
        raise ValueError(f"dyadic block {j} is empty on an n={grid.n_per_axis} grid")
    return block


def _lp_norm(f: SpectralField, p: float) -> float:
    values = to_physical(f)
    mag = np.abs(values[0]) if values.shape[0] == 1 else np.sqrt(np.sum(values**2, axis=0))
    return float((np.sum(mag**p) * f.grid.cell_volume) ** (1.0 / p))


def heat_gevrey_bound_probe(
    n: int,
    j: int,
    t: float,
    grid: Grid,
    bank: LPFilterBank,
    seed: int = 0,
    p: float = 2.0,
    field: SpectralField | None = None,
) -> float:
    """Measured ratio ``t**n ||exp(sqrt(t) L) Lap^n exp(t Lap) f_j||_p / (n**n ||f_j||_p)``.

    ``f_j`` is a random dyadic-block field; a supplied ``field`` is
    block-filtered instead (single modes give closed-form ratios).  The
    ratio should be bounded by a geometric constant to the power ``n + 1``,
    uniformly in the block and the time.
    """
    if not 0 <= n <= 4:
        raise ValueError(f"derivative order must lie in 0..4, got {n}")
    if t < 0:
        raise ValueError("time must be nonnegative")
    if field is not None:
        f = bank.block(field, j)
        if float(np.max(np.abs(f.coeffs))) == 0.0:
            raise ValueError(f"block {j} of the supplied field is empty")
    else:
        f = _random_block(grid, bank, j, seed)
    evolved = heat_semigroup(f, t)
    powered = SpectralField(grid, evolved.coeffs * (-grid.k_sq) ** n)
    weighted = gevrey_multiplier(powered, math.sqrt(t))
    numerator = t**n * _lp_norm(weighted, p)
    denominator = float(n**n if n > 0 else 1) * _lp_norm(f, p)
    return numerator / denominator


@dataclass
class LocalizationReport:
    """Fitted heat-decay rate of one dyadic block against its support bracket."""

    j: int
    rate: float
    lower: float
    upper: float

    @property
    def within_bracket(self) -> bool:
        return self.lower <= self.rate <= self.upper


def heat_localization_probe(
    j: int,
    grid: Grid,
    bank: LPFilterBank,
    seed: int = 0,
    num_times: int = 8,
    field: SpectralField | None = None,
) -> LocalizationReport:
    """Fit ``||exp(t Lap) f_j||_2 ~ exp(-rho t)`` on a random block field.

    Because every mode in block ``j`` has ``3/4 <= |k| 2**-j <= 8/3``, the
    fitted rate must land in ``[(3/4)^2, (8/3)^2] * 4**j``.  Passing an
    explicit block-supported ``field`` replaces the random draw (useful for
    single-mode checks where the rate is known exactly).
    """
    f = bank.block(field, j) if field is not None else _random_block(grid, bank, j, seed)
    if float(np.max(np.abs(f.coeffs))) == 0.0:
        raise ValueError(f"block {j} of the supplied field is empty")
    scale = 4.0**j
    taus = np.linspace(0.05, 0.6, num_times)
    ts = taus / scale
    base = f.l2_norm()
    ratios = np.array([heat_semigroup(f, float(t)).l2_norm() / base for t in ts])
    slope = float(np.polyfit(ts, np.log(ratios), 1)[0])
    return LocalizationReport(
        j=j, rate=-slope, lower=(3.0 / 4.0) ** 2 * scale, upper=(8.0 / 3.0) ** 2 * scale
    )


@dataclass
class BernsteinReport:
    """Measured two-sided derivative constants for one block and exponent."""

    j: int
    p: float
    max_order: int
    forward_constant: float
    reverse_constant: float
    reverse_floor: float

    @property
    def ok(self) -> bool:
        return self.forward_constant <= (8.0 / 3.0) * 1.1 and self.reverse_constant >= self.reverse_floor


def bernstein_probe(
    j: int,
    grid: Grid,
    bank: LPFilterBank,
    p: float = 2.0,
    max_order: int = 3,
    seed: int = 0,
) -> BernsteinReport:
    """Two-sided derivative bounds on a random dyadic-block field.

    Forward: ``||d^alpha f_j||_p <= C**(|alpha|+1) 2**(j |alpha|) ||f_j||_p``
    with the implied ``C`` at most ``8/3 * 1.1``.  Reverse: the best
    single derivative of each total order recovers ``2**(j |alpha|)`` up to
    an annulus-geometry floor ``((3/4)/sqrt(dim))**|alpha| / sqrt(#alpha)``.
    """
    f = _random_block(grid, bank, j, seed)
    base = _lp_norm(f, p)
    forward = 0.0
    reverse = math.inf
    floor = math.inf
    for order in range(1, max_order + 1):
        alphas = [
            a for a in iter_product(range(order + 1), repeat=grid.dim) if sum(a) == order
        ]
        best = 0.0
        for alpha in alphas:
            ratio = _lp_norm(derivative(f, alpha), p) / (2.0 ** (j * order) * base)
            best = max(best, ratio)
            forward = max(forward, ratio ** (1.0 / (order + 1)))
        reverse = min(reverse, best)
        floor = min(
            floor,
            ((3.0 / 4.0) / math.sqrt(grid.dim)) ** order / math.sqrt(len(alphas)) / 1.05,
        )
    return BernsteinReport(
        j=j,
        p=p,
        max_order=max_order,
        forward_constant=forward,
        reverse_constant=reverse,
        reverse_floor=floor,
    )

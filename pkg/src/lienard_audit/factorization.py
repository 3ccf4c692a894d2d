"""Factorisation of ``Y'' + F1 Y' + F2 Y^2 + G Y = 0`` into
``(d/dt - f2)(d/dt - f1) Y = 0`` with half-power factors

    f1 = a (sqrt(F2) sqrt(Y) + i sqrt(G)),
    f2 = (1/a) (sqrt(F2) sqrt(Y) - i sqrt(G)),   a = +-i sqrt(2/3),

together with the Bernoulli reduction, its closed-form solution and the
extended ``omega`` solutions. Every square root is principal
(:func:`~lienard_audit.num_core.csqrt`).

A ``sign`` argument is ``+1`` for the upper choice of every paired
``+-``/``-+`` in a formula and ``-1`` for the lower one.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .errors import NearPole, VanishingOmega
from .exppoly import ExpPoly
from .lienard import Coefficient, CoefficientSet, coeff_at
from .num_core import cpow, csqrt, fd_derivative, quad

ALPHA_MAG = math.sqrt(2.0 / 3.0)
DAMPING_FACTOR = 5.0 / math.sqrt(6.0)
POLE_THRESHOLD = 1e-6
QUAD_TOL = 1e-10


def parse_sign(sign) -> int:
    if sign in (1, "+", "upper", "+1"):
        return 1
    if sign in (-1, "-", "lower", "-1"):
        return -1
    raise ValueError(f"sign must be '+' or '-', got {sign!r}")


def branch_alpha(branch) -> complex:
    return parse_sign(branch) * 1j * ALPHA_MAG


# ---------------------------------------------------------------------------
# half-power carriers
# ---------------------------------------------------------------------------

class HalfPowerPoly(dict):
    """``sum_k c_k Y^(k/2)`` stored as ``{k: c_k}``, for fixed ``t``."""

    def __add__(self, other):
        out = HalfPowerPoly(self)
        for k, v in other.items():
            out[k] = out.get(k, 0j) + v
        return out

    def __neg__(self):
        return HalfPowerPoly({k: -v for k, v in self.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return HalfPowerPoly({k: v * other for k, v in self.items()})
        out = HalfPowerPoly()
        for k1, v1 in self.items():
            for k2, v2 in other.items():
                out[k1 + k2] = out.get(k1 + k2, 0j) + v1 * v2
        return out

    __rmul__ = __mul__

    def d_dY(self):
        # d/dY Y^(k/2) = (k/2) Y^(k/2 - 1)
        return HalfPowerPoly({k - 2: v * k / 2.0 for k, v in self.items() if k != 0})

    def times_Y(self):
        return HalfPowerPoly({k + 2: v for k, v in self.items()})

    def max_abs(self) -> float:
        return max((abs(v) for v in self.values()), default=0.0)

    def evaluate(self, Y: complex) -> complex:
        return sum((v * cpow(Y, k / 2.0) if k else v for k, v in self.items()), 0j)


@dataclass(frozen=True)
class HalfPowerAffine:
    """``f(Y, t) = sqrtY_coeff(t) * sqrt(Y) + const_coeff(t)``."""

    sqrtY_coeff: Coefficient
    const_coeff: Coefficient

    def at(self, t: float) -> HalfPowerPoly:
        return HalfPowerPoly({1: coeff_at(self.sqrtY_coeff, t), 0: coeff_at(self.const_coeff, t)})

    def __call__(self, Y: complex, t: float) -> complex:
        return coeff_at(self.sqrtY_coeff, t) * csqrt(Y) + coeff_at(self.const_coeff, t)


@dataclass(frozen=True)
class FactorPair:
    f1: HalfPowerAffine
    f2: HalfPowerAffine
    alpha: complex

    def __post_init__(self):
        if abs(self.alpha**2 + 2.0 / 3.0) > 1e-14:
            raise ValueError("branch constant must satisfy alpha^2 = -2/3")


def _scaled_root(c: Coefficient, factor: complex) -> Coefficient:
    """``factor * sqrt(c)``, kept symbolic when ``c`` is a constant."""
    if isinstance(c, ExpPoly) and c.is_constant:
        return factor * csqrt(c.constant_value())
    if isinstance(c, (int, float, complex)):
        return factor * csqrt(c)
    return lambda t: factor * csqrt(coeff_at(c, t))


def make_factor_pair(coeffs: CoefficientSet, branch="+") -> FactorPair:
    a = branch_alpha(branch)
    return FactorPair(
        f1=HalfPowerAffine(_scaled_root(coeffs.F2, a), _scaled_root(coeffs.G, 1j * a)),
        f2=HalfPowerAffine(_scaled_root(coeffs.F2, 1 / a), _scaled_root(coeffs.G, -1j / a)),
        alpha=a,
    )


@dataclass(frozen=True)
class FactorizationReport:
    """Residuals of the two relations the factor pair must satisfy.

    ``product`` is ``f1 f2 - (F2 Y + G)`` and ``damping`` is
    ``-(f1 + f2 + Y df1/dY) - F1``, both as half-power coefficient maps
    (taken at the worst sample time).
    """

    product: HalfPowerPoly
    damping: HalfPowerPoly
    product_residual: float
    damping_residual: float

    @property
    def damping_sqrt_part(self) -> complex:
        return self.damping.get(1, 0j)

    @property
    def damping_const_part(self) -> complex:
        return self.damping.get(0, 0j)


def expand_factorization(pair: FactorPair, t: float) -> tuple[HalfPowerPoly, HalfPowerPoly]:
    """Coefficients of ``Y'`` and ``Y`` in ``(d/dt - f2)(d/dt - f1) Y``.

    With ``d(f1 Y)/dt = (f1 + Y df1/dY) Y'`` the expansion is
    ``Y'' - (f1 + f2 + Y df1/dY) Y' + f1 f2 Y``.
    """
    f1, f2 = pair.f1.at(t), pair.f2.at(t)
    ydot_coeff = -(f1 + f2 + f1.d_dY().times_Y())
    y_coeff = f1 * f2
    return ydot_coeff, y_coeff


def verify_factorization(pair: FactorPair, coeffs: CoefficientSet,
                         times: Iterable[float] = (0.0,)) -> FactorizationReport:
    worst = None
    for t in times:
        ydot_coeff, y_coeff = expand_factorization(pair, t)
        F1, F2, G = coeffs.at(t)
        product = y_coeff - HalfPowerPoly({2: F2, 0: G})
        damping = ydot_coeff - HalfPowerPoly({0: F1})
        rep = FactorizationReport(product, damping, product.max_abs(), damping.max_abs())
        if worst is None or (rep.product_residual + rep.damping_residual
                             > worst.product_residual + worst.damping_residual):
            worst = rep
    if worst is None:
        raise ValueError("no evaluation times supplied")
    return worst


def check_F1_G_relation(coeffs: CoefficientSet, branch="+", t: float = 0.0) -> complex:
    """``F1 - (+-5/sqrt(6)) sqrt(G)`` at ``t``."""
    F1, _, G = coeffs.at(t)
    return F1 - parse_sign(branch) * DAMPING_FACTOR * csqrt(G)


# ---------------------------------------------------------------------------
# Bernoulli reduction
# ---------------------------------------------------------------------------

def _integral_from(c: Coefficient, scale: float, t0: float) -> Callable[[float], complex]:
    """``t -> int_{t0}^{t} sqrt(c / scale) dt'``; exact for constants."""
    if (isinstance(c, ExpPoly) and c.is_constant) or isinstance(c, (int, float, complex)):
        k = csqrt(coeff_at(c, t0) / scale)
        return lambda t: k * (t - t0)

    def integral(t):
        return quad(lambda s: csqrt(coeff_at(c, s) / scale), t0, t, QUAD_TOL)

    return integral


def integrating_factor(coeffs: CoefficientSet, sign, t0: float = 0.0) -> Callable[[float], complex]:
    """``mu(t) = exp(-+ int_{t0}^t sqrt(G/6))``."""
    s = parse_sign(sign)
    g_int = _integral_from(coeffs.G, 6.0, t0)
    return lambda t: cmath.exp(-s * g_int(t))


def bernoulli_solution(coeffs: CoefficientSet, sign="+", t0: float = 0.0) -> Callable[[float], complex]:
    """Closed-form solution ``Y = -mu^2 (int sqrt(F2/6) mu)^-2`` anchored at ``t0``.

    Raises :class:`NearPole` where the integral is below ``POLE_THRESHOLD``.
    With principal roots, the upper sign solves the Bernoulli equation for
    ``t > t0`` and the lower sign for ``t < t0``; see :func:`pole_free_window`.
    """
    mu = integrating_factor(coeffs, sign, t0)

    def integrand(s):
        return csqrt(coeff_at(coeffs.F2, s) / 6.0) * mu(s)

    def Y(t: float) -> complex:
        I = quad(integrand, t0, t, QUAD_TOL)
        if abs(I) < POLE_THRESHOLD:
            raise NearPole(f"|int sqrt(F2/6) mu| = {abs(I):.3g} at t={t}")
        m = mu(t)
        return -(m * m) / (I * I)

    return Y


def pole_free_window(sign, t0: float = 0.0, length: float = 2.5, gap: float = 0.5) -> tuple[float, float]:
    """Interval on which the principal-branch closed form is valid.

    The integral of ``sqrt(F2/6) mu`` vanishes at ``t0`` (double pole).
    For the upper sign ``sqrt(Y)`` matches ``1/omega`` after ``t0``; for the
    lower sign the same root sits on the other side of the branch cut
    there, so the valid window lies before ``t0``.
    """
    if parse_sign(sign) > 0:
        return (t0 + gap, t0 + gap + length)
    return (t0 - gap - length, t0 - gap)


def verify_ode_residual(sol: Callable[[float], complex], ode: Callable, grid: Sequence[float],
                        order: int = 1) -> float:
    """Max over ``grid`` of ``|ode(t, y, y'[, y''])|`` with FD derivatives."""
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    worst = 0.0
    for t in grid:
        y = sol(t)
        dy = fd_derivative(sol, t, 1)
        if order == 1:
            r = ode(t, y, dy)
        else:
            r = ode(t, y, dy, fd_derivative(sol, t, 2))
        worst = max(worst, abs(r))
    return worst


def bernoulli_ode(coeffs: CoefficientSet, sign) -> Callable:
    s = parse_sign(sign)

    def ode(t, y, dy):
        _, F2, G = coeffs.at(t)
        return dy - s * 1j * csqrt(2.0 * F2 / 3.0) * cpow(y, 1.5) + s * csqrt(2.0 * G / 3.0) * y

    return ode


# ---------------------------------------------------------------------------
# extended solutions
# ---------------------------------------------------------------------------

def omega_special_solution(coeffs: CoefficientSet, C1: complex, sign="+", t0: float = 0.0) -> Callable[[float], complex]:
    """``omega(t) = (C1 +- i int_{t0}^t sqrt(F2/6))^2 / 4`` (constant ``phi``)."""
    s = parse_sign(sign)
    f_int = _integral_from(coeffs.F2, 6.0, t0)

    def omega(t: float) -> complex:
        w = C1 + s * 1j * f_int(t)
        return 0.25 * w * w

    return omega


def omega_to_Y(omega: Callable[[float], complex]) -> Callable[[float], complex]:
    def Y(t):
        w = omega(t)
        if w == 0:
            raise VanishingOmega(f"omega vanishes at t={t}")
        return w ** -2
    return Y


def omega_ode_residual(omega: Callable[[float], complex], coeffs: CoefficientSet, sign,
                       grid: Sequence[float], t0: float = 0.0) -> float:
    """Max ``|lhs - rhs|`` of the omega equation over ``grid``.

    lhs = omega' -+ sqrt(G/6) omega,
    rhs = -+ i sqrt(F2/6) - omega^3/2 * exp(-+ i sqrt(3/2) int_{t0}^t (sqrt(F2/omega) - i sqrt(G))).

    The inner integral is evaluated along the candidate ``omega``.
    """
    s = parse_sign(sign)

    def inner(u):
        w = omega(u)
        if w == 0:
            raise VanishingOmega(f"omega vanishes at t={u}")
        _, F2, G = coeffs.at(u)
        return csqrt(F2 / w) - 1j * csqrt(G)

    worst = 0.0
    for t in grid:
        w = omega(t)
        if abs(w) < 1e-14:
            raise VanishingOmega(f"omega vanishes at t={t}")
        _, F2, G = coeffs.at(t)
        lhs = fd_derivative(omega, t, 1) - s * csqrt(G / 6.0) * w
        phase = -s * 1j * math.sqrt(1.5) * quad(inner, t0, t, QUAD_TOL)
        rhs = -s * 1j * csqrt(F2 / 6.0) - 0.5 * w**3 * cmath.exp(phase)
        worst = max(worst, abs(lhs - rhs))
    return worst


def phi_log_derivative(omega: Callable[[float], complex], coeffs: CoefficientSet, sign, t: float) -> complex:
    """``phi'/phi = -+ i sqrt(3 F2 / (2 omega)) + 3 omega'/omega``."""
    s = parse_sign(sign)
    w = omega(t)
    if abs(w) < 1e-14:
        raise VanishingOmega(f"omega vanishes at t={t}")
    _, F2, _ = coeffs.at(t)
    return -s * 1j * csqrt(3.0 * F2 / (2.0 * w)) + 3.0 * fd_derivative(omega, t, 1) / w

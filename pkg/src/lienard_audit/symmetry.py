"""Lie point symmetries of ``y'' = f(x, y, y')`` with
``f = -F1 y' - F2 y^2 - G y``.

The linearised symmetry condition is evaluated exactly in the
:class:`~lienard_audit.exppoly.ExpPoly` basis and split by the monomials
``y^p y'^q`` into the determining system.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exppoly import YP, ExpPoly, Term, Y, render, render_term
from .lienard import CoefficientSet
from .num_core import csqrt

# label -> (p, q) of the monomial y^p y'^q
GROUPS: dict[str, tuple[int, int]] = {
    "y'^3": (0, 3),
    "y'^2": (0, 2),
    "y'": (0, 1),
    "y^2": (2, 0),
    "y": (1, 0),
    "y^0": (0, 0),
    "yy'": (1, 1),
}


@dataclass(frozen=True)
class VectorField2D:
    """``xi(x, y) d/dx + eta(x, y) d/dy``."""

    xi: ExpPoly
    eta: ExpPoly

    def __post_init__(self):
        object.__setattr__(self, "xi", ExpPoly.coerce(self.xi))
        object.__setattr__(self, "eta", ExpPoly.coerce(self.eta))
        for name in ("xi", "eta"):
            if any(t.q for t in getattr(self, name).terms):
                raise ValueError(f"{name} must not depend on y'")

    def apply(self, g: ExpPoly) -> ExpPoly:
        """Directional derivative ``xi g_x + eta g_y``."""
        return self.xi * g.diff("x") + self.eta * g.diff("y")

    def __add__(self, other: "VectorField2D") -> "VectorField2D":
        return VectorField2D(self.xi + other.xi, self.eta + other.eta)

    def __sub__(self, other: "VectorField2D") -> "VectorField2D":
        return VectorField2D(self.xi - other.xi, self.eta - other.eta)

    def scale(self, k: complex) -> "VectorField2D":
        return VectorField2D(self.xi * k, self.eta * k)

    def is_zero(self, tol: float = 1e-12) -> bool:
        return self.xi.is_zero(tol)[0] and self.eta.is_zero(tol)[0]

    def __str__(self):
        return f"({render(self.xi)})∂x + ({render(self.eta)})∂y"


def rhs_exppoly(coeffs: CoefficientSet) -> ExpPoly:
    F1, F2, G = coeffs.exppoly()
    return -(F1 * YP) - F2 * Y * Y - G * Y


def lin_symmetry_residual(v: VectorField2D, f: ExpPoly) -> ExpPoly:
    xi, eta = v.xi, v.eta
    xi_x, xi_y = xi.diff("x"), xi.diff("y")
    eta_x, eta_y = eta.diff("x"), eta.diff("y")
    xi_xx, xi_xy, xi_yy = xi_x.diff("x"), xi_x.diff("y"), xi_y.diff("y")
    eta_xx, eta_xy, eta_yy = eta_x.diff("x"), eta_x.diff("y"), eta_y.diff("y")
    yp2 = YP * YP
    return (
        eta_xx
        + (2 * eta_xy - xi_xx) * YP
        + (eta_yy - 2 * xi_xy) * yp2
        - yp2 * YP * xi_yy
        - xi * f.diff("x")
        - eta * f.diff("y")
        + (eta_y - 2 * xi_x - 3 * YP * xi_y) * f
        - (eta_x + (eta_y - xi_x) * YP - yp2 * xi_y) * f.diff("yp")
    )


@dataclass(frozen=True)
class DeterminingSystem:
    """Coefficients (functions of ``x``) of the seven labelled monomials,
    plus whatever falls outside them."""

    groups: dict[str, ExpPoly]
    extra: ExpPoly
    residual: ExpPoly

    def recombine(self) -> ExpPoly:
        total = self.extra
        for label, (p, q) in GROUPS.items():
            total = total + self.groups[label] * ExpPoly.monomial(p, q)
        return total

    def zero_groups(self, tol: float = 1e-12) -> dict[str, bool]:
        return {k: g.is_zero(tol)[0] for k, g in self.groups.items()}


def extract_determining_system(v: VectorField2D, coeffs: CoefficientSet) -> DeterminingSystem:
    residual = lin_symmetry_residual(v, rhs_exppoly(coeffs))
    groups = {label: residual.select(p, q) for label, (p, q) in GROUPS.items()}
    wanted = set(GROUPS.values())
    extra = ExpPoly([t for t in residual.terms if (t.p, t.q) not in wanted], residual.scale)
    return DeterminingSystem(groups, extra, residual)


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

def solve_xi(F1: complex, A: complex, B: complex) -> ExpPoly:
    """``A + B e^(F1 x)``, the general solution of ``-xi'' + F1 xi' = 0``."""
    return ExpPoly([Term(A), Term(B, F1)])


def char_roots(F1: complex, G: complex) -> tuple[complex, complex]:
    """Roots of ``a^2 - F1 a - G = 0``, so that ``e^(-a x)`` solves
    ``eta'' + F1 eta' - G eta = 0``."""
    d = csqrt(F1 * F1 + 4.0 * G)
    return 0.5 * (F1 + d), 0.5 * (F1 - d)


def halved_radical_roots(F1: complex, G: complex) -> tuple[complex, complex]:
    """Roots exactly as displayed, with the extra halving of the radical."""
    d = csqrt(F1 * F1 + 4.0 * G)
    return 0.5 * (F1 + 0.5 * d), 0.5 * (F1 - 0.5 * d)


def build_S(C1: complex, C2: complex, alpha_plus: complex, alpha_minus: complex) -> ExpPoly:
    return ExpPoly([Term(C1, -alpha_plus), Term(C2, -alpha_minus)])


def eta_ode_minus_G(eta: ExpPoly, F1: complex, G: complex) -> ExpPoly:
    """``eta_xx + F1 eta_x - G eta`` (minus-sign variant of the y^0 group)."""
    return eta.diff("x").diff("x") + F1 * eta.diff("x") - G * eta


def make_generators(F1: complex, alpha_plus: complex, alpha_minus: complex) -> tuple[VectorField2D, VectorField2D]:
    X1 = VectorField2D(ExpPoly.const(1.0), ExpPoly.exp(-alpha_plus))
    X2 = VectorField2D(ExpPoly.exp(F1), ExpPoly.exp(-alpha_minus))
    return X1, X2


def commutator(a: VectorField2D, b: VectorField2D) -> VectorField2D:
    return VectorField2D(a.apply(b.xi) - b.apply(a.xi), a.apply(b.eta) - b.apply(a.eta))


@dataclass(frozen=True)
class AlphaAudit:
    oracle: tuple[complex, complex]
    claimed: tuple[complex, complex]
    halved: tuple[complex, complex]
    theta_formula: float
    theta_branch: complex

    @property
    def plus_deviation(self) -> float:
        return abs(self.claimed[0] - self.oracle[0])

    @property
    def minus_deviation(self) -> float:
        return abs(self.claimed[1] - self.oracle[1])

    @property
    def sum_rule(self) -> float:
        # (-i theta + F1) + i theta - F1
        F1 = self.oracle[0] + self.oracle[1]
        return abs(self.claimed[0] + self.claimed[1] - F1)

    @property
    def halved_deviation(self) -> float:
        return max(abs(self.halved[0] - self.oracle[0]), abs(self.halved[1] - self.oracle[1]))

    @property
    def theta_deviation(self) -> float:
        return abs(self.theta_branch - self.theta_formula)


def paper_alpha_check(b) -> AlphaAudit:
    """Compare the claimed roots ``(-i theta + F1, i theta)`` and the
    displayed root formula with the characteristic-equation roots."""
    F1, G = b.F1(), b.G()
    theta = b.theta
    c = b.c
    return AlphaAudit(
        oracle=char_roots(F1, G),
        claimed=(-1j * theta + F1, 1j * theta),
        halved=halved_radical_roots(F1, G),
        theta_formula=(1.0 - c * c) / 5.0,
        theta_branch=theta,
    )


# ---------------------------------------------------------------------------
# invariance audit
# ---------------------------------------------------------------------------

Y_NODES = (1.0, -1.0, 1j, -1j)
YP_NODES = (0.0, 1.0, -1.0)


def audit_period(coeffs: CoefficientSet) -> float:
    """One period of the fastest oscillation in ``F2``; ``2 pi`` otherwise."""
    F2 = coeffs.exppoly()[1]
    rates = [abs(t.lam.imag) for t in F2.terms if abs(t.lam.imag) > 1e-12]
    return 2 * math.pi / max(rates) if rates else 2 * math.pi


def max_numeric(e: ExpPoly, x_grid: Sequence[float]) -> float:
    worst = 0.0
    for x in x_grid:
        for y in Y_NODES:
            for yp in YP_NODES:
                worst = max(worst, abs(e.evaluate(x, y, yp)))
    return worst


@dataclass
class InvarianceAudit:
    field: VectorField2D
    system: DeterminingSystem
    max_numeric: float
    x_grid: np.ndarray = field(repr=False)
    tol: float = 1e-12

    @property
    def passed(self) -> bool:
        return self.system.residual.is_zero(self.tol)[0]

    def witnesses(self) -> dict[str, str]:
        out = {}
        for label, g in self.system.groups.items():
            zero, w = g.is_zero(self.tol)
            if not zero:
                out[label] = render_term(w)
        zero, w = self.system.extra.is_zero(self.tol)
        if not zero:
            out["extra"] = render_term(w)
        return out

    def report(self) -> dict[str, dict]:
        """Group label -> ``{zero, witness, max_numeric}``."""
        out = {}
        items = list(self.system.groups.items()) + [("extra", self.system.extra)]
        for label, g in items:
            zero, w = g.is_zero(self.tol)
            monomial = ExpPoly.monomial(*GROUPS[label]) if label in GROUPS else ExpPoly.const(1.0)
            out[label] = {
                "zero": zero,
                "witness": None if zero else render_term(w),
                "max_numeric": max_numeric(g * monomial, self.x_grid),
            }
        return out


def invariance_audit(v: VectorField2D, coeffs: CoefficientSet, n_x: int = 32,
                     period: float | None = None, tol: float = 1e-12) -> InvarianceAudit:
    system = extract_determining_system(v, coeffs)
    period = audit_period(coeffs) if period is None else period
    x_grid = np.linspace(0.0, period, n_x)
    return InvarianceAudit(v, system, max_numeric(system.residual, x_grid), x_grid, tol)


def general_ansatz() -> VectorField2D:
    """Fields carrying ``y`` and ``y^2`` in both components."""
    return VectorField2D(Y * Y + Y + 1.0, Y * Y + Y)

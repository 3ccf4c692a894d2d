"""Exact orbit ``z = c e^(i theta t)`` of the deformed-equation chain.

With ``eps = i`` the amplitude solves ``c(c^2 - 1) = -+5`` and the
frequency is ``theta = +-(1 - c^2)/5`` (upper/lower pairing). The derived
coefficients are

    F1 = i(c^2 - 1),   F2 = -c theta e^(i theta t),   G = (6/25)(1 - c^2).

Several of the relations that lead here do not close; the functions below
compute the size of each mismatch rather than asserting the claims.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import NotARoot
from .exppoly import ExpPoly
from .factorization import DAMPING_FACTOR, parse_sign, verify_ode_residual
from .lienard import CoefficientSet, ExponentialOrbit, deformed_rhs
from .num_core import poly_roots, quad

EPS = 1j


def branch_name(branch) -> str:
    return "upper" if parse_sign(branch) > 0 else "lower"


def cubic_target(branch) -> float:
    """Right-hand side of ``c(c^2 - 1) = -+5``."""
    return -5.0 * parse_sign(branch)


def solve_c(branch="upper") -> list[complex]:
    """Three roots of ``c^3 - c -+ ... = 0``; the real root comes first."""
    roots = poly_roots([1.0, 0.0, -1.0, -cubic_target(branch)])
    real = [r for r in roots if r.imag == 0.0]
    rest = [r for r in roots if r.imag != 0.0]
    return real + rest


@dataclass(frozen=True)
class ExactSolutionBranch:
    branch: str
    c: complex
    theta: complex
    eps: complex
    coeffs: CoefficientSet = field(repr=False)

    @property
    def sign(self) -> int:
        return parse_sign(self.branch)

    @property
    def theta_is_real(self) -> bool:
        return isinstance(self.theta, float)

    @property
    def orbit(self) -> ExponentialOrbit:
        return ExponentialOrbit(self.c, self.theta)

    def z(self, t: float) -> complex:
        return self.orbit.z(t)

    def F1(self) -> complex:
        return self.coeffs.F1.constant_value()

    def G(self) -> complex:
        return self.coeffs.G.constant_value()

    def to_dict(self) -> dict:
        return {
            "branch": self.branch,
            "c": self.c,
            "theta": complex(self.theta),
            "eps": self.eps,
            "F1": self.F1(),
            "G": self.G(),
            "F2_amplitude": -self.c * self.theta,
            "F2_rate": 1j * self.theta,
        }


def branch_coefficients(c: complex, theta: complex) -> CoefficientSet:
    return CoefficientSet(
        F1=ExpPoly.const(1j * (c * c - 1.0)),
        F2=ExpPoly.exp(1j * theta, -c * theta),
        G=ExpPoly.const(6.0 / 25.0 * (1.0 - c * c)),
    )


def make_branch(c: complex, branch="upper") -> ExactSolutionBranch:
    c = complex(c)
    residual = abs(c * (c * c - 1.0) - cubic_target(branch))
    if residual > 1e-10:
        raise NotARoot(f"c={c} misses the cubic by {residual:.3g}")
    theta: complex = parse_sign(branch) * (1.0 - c * c) / 5.0
    if c.imag == 0.0:
        c = complex(c.real, 0.0)
        theta = float(complex(theta).real)
    return ExactSolutionBranch(branch_name(branch), c, theta, EPS, branch_coefficients(c, theta))


def default_branch(branch="upper", root_index: int = 0) -> ExactSolutionBranch:
    return make_branch(solve_c(branch)[root_index], branch)


def theta_c_identity(b: ExactSolutionBranch) -> float:
    return abs(b.theta * b.c - 1.0)


# ---------------------------------------------------------------------------
# consistency of G
# ---------------------------------------------------------------------------

def consistent_G(c: complex, theta: float, eps: complex) -> complex:
    """``G`` for which ``c e^(i theta t)`` solves the oscillator with
    restoring term ``G z``: ``theta^2 + i eps theta (1 - |c|^2)``."""
    mod2 = (complex(c) * complex(c).conjugate()).real
    return theta * theta + 1j * eps * theta * (1.0 - mod2)


def orbit_equation_residual(c: complex, theta: float, eps: complex, G: complex, t: float) -> complex:
    """Substitute the orbit with exact derivatives (no integration)."""
    orbit = ExponentialOrbit(c, theta)
    z, dz, ddz = orbit.z(t), orbit.dz(t), orbit.accel(t)
    return ddz - eps * (1.0 - (z * z.conjugate()).real) * dz + G * z


def G_candidates(b: ExactSolutionBranch) -> dict[str, complex]:
    """The three values of ``G`` the chain could be read to imply."""
    F1 = b.F1()
    return {
        "branch": b.G(),
        "damping_relation": (F1 / DAMPING_FACTOR) ** 2,
        "consistent": consistent_G(b.c, complex(b.theta).real, b.eps),
    }


# ---------------------------------------------------------------------------
# the z' relation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AmplitudeAudit:
    kappa: complex
    times: np.ndarray
    residuals: np.ndarray

    @property
    def max(self) -> float:
        return float(np.max(self.residuals))

    @property
    def at_start(self) -> float:
        return float(self.residuals[0])


def amplitude_rhs(b: ExactSolutionBranch, kappa: complex, t: float) -> complex:
    def excess(s):
        z = b.z(s)
        return (z * z.conjugate()).real - 1.0

    return -(6.0 / b.eps) * cmath.exp(kappa * quad(excess, 0.0, t, 1e-12))


def audit_eq29(b: ExactSolutionBranch, kappa: complex | None = None,
               grid: Sequence[float] | None = None) -> AmplitudeAudit:
    """Profile of ``|z' - (-(6/eps) e^(kappa int (|z|^2 - 1)))|``.

    ``kappa`` defaults to ``-eps``.
    """
    kappa = -b.eps if kappa is None else complex(kappa)
    grid = np.linspace(0.0, 2 * math.pi, 33) if grid is None else np.asarray(grid, dtype=float)
    res = np.array([abs(b.orbit.dz(t) - amplitude_rhs(b, kappa, t)) for t in grid])
    return AmplitudeAudit(kappa, grid, res)


def kappa_candidates(eps: complex) -> dict[str, complex]:
    r = math.sqrt(6.0) / 6.0
    return {"+eps": eps, "-eps": -eps, "+sqrt6*eps/6": r * eps, "-sqrt6*eps/6": -r * eps}


def kappa_sweep(b: ExactSolutionBranch, grid: Sequence[float] | None = None) -> tuple[str, dict[str, float]]:
    """Max residual for each candidate prefactor and the best label."""
    scores = {k: audit_eq29(b, v, grid).max for k, v in kappa_candidates(b.eps).items()}
    best = min(scores, key=lambda k: (scores[k], k))
    return best, scores


def exact_solution_Y_residual(b: ExactSolutionBranch, Y: Callable[[float], complex],
                              grid: Sequence[float]) -> float:
    def ode(t, y, dy, ddy):
        return ddy - deformed_rhs(b.coeffs, t, y, dy)

    return verify_ode_residual(Y, ode, grid, order=2)


def F2_phase_residual(b: ExactSolutionBranch, grid: Sequence[float]) -> float:
    """``max |F2(t) e^(-i theta t) + 1|``; zero because ``c theta = 1``."""
    return max(abs(b.coeffs.F2.evaluate(t) * cmath.exp(-1j * b.theta * t) + 1.0) for t in grid)


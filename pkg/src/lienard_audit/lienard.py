"""Complex Van der Pol equation, its variational deformation and the
homographic gauge.

The deformed equation for the perturbation ``Y`` of a base solution
``z(t)`` reads::

    Y'' + F1(t) Y' + F2(t) Y^2 + G(t) Y = 0,
    F1 = eps (|z|^2 - 1),  F2 = eps z'.

Coefficients are either :class:`~lienard_audit.exppoly.ExpPoly` values in
the independent variable (symbolic) or plain callables ``t -> complex``
(sampled). :class:`CoefficientSet` hides the difference behind ``at(t)``.
"""

from __future__ import annotations

import cmath
import csv
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .errors import MissingDerivatives, SingularGauge, VanishingVelocity
from .exppoly import ExpPoly
from .num_core import Trajectory, csqrt, fd_derivative, quad

Coefficient = Union[ExpPoly, Callable[[float], complex], complex, float]


def coeff_at(c: Coefficient, t: float) -> complex:
    if isinstance(c, ExpPoly):
        return c.evaluate(t)
    if callable(c):
        return complex(c(t))
    return complex(c)


def as_symbolic(c: Coefficient) -> ExpPoly | None:
    if isinstance(c, ExpPoly):
        return c
    if isinstance(c, (int, float, complex)):
        return ExpPoly.const(c)
    return None


@dataclass(frozen=True)
class CoefficientSet:
    F1: Coefficient
    F2: Coefficient
    G: Coefficient = 0.0

    def __post_init__(self):
        for name in ("F1", "F2", "G"):
            v = getattr(self, name)
            if isinstance(v, ExpPoly) and not v.is_pure_x:
                raise ValueError(f"{name} must depend on the independent variable only")

    @property
    def symbolic(self) -> bool:
        return all(as_symbolic(getattr(self, n)) is not None for n in ("F1", "F2", "G"))

    @property
    def representation(self) -> str:
        return "symbolic" if self.symbolic else "sampled"

    def at(self, t: float) -> tuple[complex, complex, complex]:
        return coeff_at(self.F1, t), coeff_at(self.F2, t), coeff_at(self.G, t)

    def exppoly(self) -> tuple[ExpPoly, ExpPoly, ExpPoly]:
        out = tuple(as_symbolic(getattr(self, n)) for n in ("F1", "F2", "G"))
        if any(v is None for v in out):
            raise TypeError("coefficient set is sampled, not symbolic")
        return out  # type: ignore[return-value]

    @classmethod
    def constant(cls, F1: complex, F2: complex, G: complex) -> "CoefficientSet":
        return cls(ExpPoly.const(F1), ExpPoly.const(F2), ExpPoly.const(G))


# ---------------------------------------------------------------------------
# base curves
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AnalyticCurve:
    """A base solution known in closed form; ``ddz`` falls back to finite
    differences of ``dz`` when omitted."""

    z: Callable[[float], complex]
    dz: Callable[[float], complex]
    ddz: Callable[[float], complex] | None = None

    def accel(self, t: float) -> complex:
        if self.ddz is not None:
            return complex(self.ddz(t))
        return fd_derivative(self.dz, t, 1)


@dataclass(frozen=True)
class ExponentialOrbit:
    """``z(t) = c * exp(i * theta * t)``."""

    c: complex
    theta: complex

    def z(self, t: float) -> complex:
        return self.c * cmath.exp(1j * self.theta * t)

    def dz(self, t: float) -> complex:
        return 1j * self.theta * self.z(t)

    def accel(self, t: float) -> complex:
        return -(self.theta**2) * self.z(t)

    def modulus_squared(self) -> ExpPoly:
        # |c e^{i theta t}|^2 = |c|^2 e^{-2 Im(theta) t}
        return ExpPoly.exp(-2.0 * complex(self.theta).imag, (self.c * self.c.conjugate()).real)

    def velocity(self) -> ExpPoly:
        return ExpPoly.exp(1j * self.theta, 1j * self.theta * self.c)

    def as_curve(self) -> AnalyticCurve:
        return AnalyticCurve(self.z, self.dz, self.accel)


# ---------------------------------------------------------------------------
# right-hand sides
# ---------------------------------------------------------------------------

def vdp_rhs(eps: complex, t: float, z: complex, zdot: complex) -> complex:
    """Acceleration of the complex Van der Pol oscillator."""
    mod2 = (z * z.conjugate()).real if isinstance(z, complex) else z * z
    return eps * (1.0 - mod2) * zdot - z


def vdp_general_rhs(eps: complex, G: Coefficient, t: float, z: complex, zdot: complex) -> complex:
    """Same oscillator with the restoring term ``G(t) z``."""
    z = complex(z)
    return eps * (1.0 - (z * z.conjugate()).real) * zdot - coeff_at(G, t) * z


def deformed_rhs(coeffs: CoefficientSet, t: float, Y: complex, Ydot: complex) -> complex:
    F1, F2, G = coeffs.at(t)
    return -F1 * Ydot - F2 * Y * Y - G * Y


def deform_coefficients(base, eps: complex, G: Coefficient = 0.0) -> CoefficientSet:
    """Coefficients ``F1 = eps(|z|^2-1)``, ``F2 = eps z'`` along ``base``.

    An :class:`ExponentialOrbit` yields symbolic coefficients; a
    :class:`Trajectory` yields piecewise-linear interpolants of the samples;
    an :class:`AnalyticCurve` yields pointwise callables.
    """
    eps = complex(eps)
    if isinstance(base, ExponentialOrbit):
        F1 = eps * (base.modulus_squared() - 1.0)
        F2 = eps * base.velocity()
        return CoefficientSet(F1, F2, G)
    if isinstance(base, AnalyticCurve):
        def F1c(t):
            z = complex(base.z(t))
            return eps * ((z * z.conjugate()).real - 1.0)

        def F2c(t):
            return eps * complex(base.dz(t))

        return CoefficientSet(F1c, F2c, G)
    if isinstance(base, Trajectory):
        if not base.has_derivatives:
            raise MissingDerivatives("base trajectory carries no first derivatives")
        t = base.t
        f1 = eps * (np.abs(base.z) ** 2 - 1.0)
        f2 = eps * base.dz
        return CoefficientSet(_interpolant(t, f1), _interpolant(t, f2), G)
    raise TypeError(f"unsupported base {type(base).__name__}")


def _interpolant(t: np.ndarray, v: np.ndarray) -> Callable[[float], complex]:
    re, im = np.ascontiguousarray(v.real), np.ascontiguousarray(v.imag)

    def f(s: float) -> complex:
        return complex(np.interp(s, t, re), np.interp(s, t, im))

    return f


# ---------------------------------------------------------------------------
# skeleton (surface Q = Y'' over the real (Y, P = Y') plane)
# ---------------------------------------------------------------------------

def skeleton_grid(
    coeffs: CoefficientSet,
    y_range: tuple[float, float],
    p_range: tuple[float, float],
    n: int,
    t: float = 0.0,
) -> list[tuple[float, float, complex]]:
    if n < 2:
        raise ValueError("n must be at least 2")
    F1, F2, G = coeffs.at(t)
    nodes = []
    for Y in np.linspace(y_range[0], y_range[1], n):
        for P in np.linspace(p_range[0], p_range[1], n):
            Y, P = float(Y), float(P)
            nodes.append((Y, P, -F1 * P - F2 * Y * Y - G * Y))
    return nodes


def write_skeleton_csv(nodes, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["Y", "P", "Q_re", "Q_im"])
    for Y, P, Q in nodes:
        w.writerow([repr(float(Y)), repr(float(P)), repr(Q.real), repr(Q.imag)])


# ---------------------------------------------------------------------------
# homographic gauge
# ---------------------------------------------------------------------------

@dataclass
class GaugeFunctions:
    """``alpha(t)``, ``beta_tilde(t)``, ``theta(t)`` and, when known, their
    analytic derivatives keyed as ``("alpha", 1)`` and so on."""

    alpha: Callable[[float], complex]
    beta_tilde: Callable[[float], complex]
    theta: Callable[[float], complex]
    derivatives: dict = field(default_factory=dict)
    t_grid: Sequence[float] = ()

    def derivative(self, name: str, order: int, t: float) -> complex:
        if order == 0:
            return complex(getattr(self, name)(t))
        fn = self.derivatives.get((name, order))
        if fn is not None:
            return complex(fn(t))
        return fd_derivative(getattr(self, name), t, order)

    def sample(self, t_grid: Sequence[float] | None = None) -> dict[str, np.ndarray]:
        grid = np.asarray(self.t_grid if t_grid is None else t_grid, dtype=float)
        return {
            "t": grid,
            "alpha": np.array([self.alpha(s) for s in grid], dtype=complex),
            "beta_tilde": np.array([self.beta_tilde(s) for s in grid], dtype=complex),
            "theta": np.array([self.theta(s) for s in grid], dtype=complex),
        }

    @classmethod
    def identity(cls) -> "GaugeFunctions":
        return cls(
            alpha=lambda t: 1.0 + 0j,
            beta_tilde=lambda t: 0j,
            theta=lambda t: complex(t),
            derivatives={
                ("alpha", 1): lambda t: 0j, ("alpha", 2): lambda t: 0j,
                ("beta_tilde", 1): lambda t: 0j, ("beta_tilde", 2): lambda t: 0j,
                ("theta", 1): lambda t: 1.0 + 0j, ("theta", 2): lambda t: 0j,
            },
        )


@dataclass(frozen=True)
class TransformedCoefficients:
    dY_dT: complex
    Y2: complex
    Y1: complex
    const: complex

    def as_tuple(self):
        return (self.dY_dT, self.Y2, self.Y1, self.const)


def transform_coefficients(coeffs: CoefficientSet, gauge: GaugeFunctions, t: float) -> TransformedCoefficients:
    """Coefficients of the gauge-transformed equation at ``t``, written
    exactly as displayed for the homographic map (including the
    ``theta''/theta`` term). ``eps(x^2-1)`` and ``eps x'`` are read off the
    coefficient set as ``F1`` and ``F2``.
    """
    F1, F2, G = coeffs.at(t)
    a = gauge.derivative("alpha", 0, t)
    a1 = gauge.derivative("alpha", 1, t)
    a2 = gauge.derivative("alpha", 2, t)
    b = gauge.derivative("beta_tilde", 0, t)
    b1 = gauge.derivative("beta_tilde", 1, t)
    b2 = gauge.derivative("beta_tilde", 2, t)
    th = gauge.derivative("theta", 0, t)
    th1 = gauge.derivative("theta", 1, t)
    th2 = gauge.derivative("theta", 2, t)
    if abs(a * th1) < 1e-12:
        raise SingularGauge(f"|alpha*theta'| = {abs(a * th1):.3g} at t={t}")
    if th2 == 0:
        curv = 0j
    elif th == 0:
        raise SingularGauge(f"theta vanishes at t={t} while theta'' does not")
    else:
        curv = th2 / th
    th1sq = th1 * th1
    return TransformedCoefficients(
        dY_dT=(2.0 * a1 / a + curv - F1) / th1,
        Y2=-F2 * a / th1sq,
        Y1=(a2 / a + 2.0 * F2 * b + F1 * a1 / a) / th1sq,
        const=a * (b2 + F2 * b * b + F1 * b1 - G) / th1sq,
    )


def canonical_gauge(x_base: AnalyticCurve | ExponentialOrbit, eps: complex, G: Coefficient,
                    t_grid: Sequence[float]) -> GaugeFunctions:
    """Gauge that would carry the deformed equation to ``Y'' - 6Y^2 + ...``.

    ``(ln alpha)' = -(2/5)(eps(1-|x|^2) + x''/(2x'))`` is integrated from
    ``t_grid[0]`` with ``alpha = 1`` there; ``theta' `` is the principal
    root of ``-eps x' alpha / 6`` and ``theta`` its integral from the same
    anchor.
    """
    if isinstance(x_base, ExponentialOrbit):
        x_base = x_base.as_curve()
    eps = complex(eps)
    grid = [float(s) for s in t_grid]
    if not grid:
        raise ValueError("t_grid must not be empty")
    for s in grid:
        if abs(complex(x_base.dz(s))) < 1e-10:
            raise VanishingVelocity(f"x' vanishes at t={s}")
    t0 = grid[0]

    def mod2(t):
        x = complex(x_base.z(t))
        return (x * x.conjugate()).real

    def log_alpha_rate(t):
        return -0.4 * (eps * (1.0 - mod2(t)) + x_base.accel(t) / (2.0 * complex(x_base.dz(t))))

    def alpha(t):
        return cmath.exp(quad(log_alpha_rate, t0, t, 1e-12))

    def alpha1(t):
        return alpha(t) * log_alpha_rate(t)

    def alpha2(t):
        L = log_alpha_rate(t)
        return alpha(t) * (fd_derivative(log_alpha_rate, t, 1) + L * L)

    def theta1(t):
        return csqrt(-eps * complex(x_base.dz(t)) * alpha(t) / 6.0)

    def theta2(t):
        # differentiate theta'^2 = -eps x' alpha / 6
        num = -eps * (x_base.accel(t) * alpha(t) + complex(x_base.dz(t)) * alpha1(t)) / 6.0
        return num / (2.0 * theta1(t))

    def theta(t):
        return quad(theta1, t0, t, 1e-12)

    def beta_tilde(t):
        L = log_alpha_rate(t)
        L1 = fd_derivative(log_alpha_rate, t, 1)
        inner = -coeff_at(G, t) + eps * (1.0 - mod2(t)) * L + L1 + L * L
        return -inner / (2.0 * eps * complex(x_base.dz(t)))

    gauge = GaugeFunctions(
        alpha=alpha,
        beta_tilde=beta_tilde,
        theta=theta,
        derivatives={
            ("alpha", 1): alpha1,
            ("alpha", 2): alpha2,
            ("theta", 1): theta1,
            ("theta", 2): theta2,
        },
        t_grid=grid,
    )
    for s in grid:
        if abs(alpha(s) * theta1(s)) < 1e-12:
            raise SingularGauge(f"alpha*theta' vanishes at t={s}")
    return gauge


def gauge_sign_note(coeffs: CoefficientSet, gauge: GaugeFunctions, t: float) -> complex:
    """Y^2 coefficient after the canonical gauge; the canonical target
    displays ``-6`` while the substitution produces ``+6``."""
    return transform_coefficients(coeffs, gauge, t).Y2


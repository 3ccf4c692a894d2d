"""Numeric substrate: branch conventions, Dormand-Prince integration,
adaptive Simpson quadrature, finite differences and polynomial roots.

Complex scalars are plain Python ``complex``. Square roots and
non-integer powers use the principal logarithm, with the sign of a zero
imaginary part normalised so that ``csqrt(-4) == 2j`` regardless of
whether the caller produced ``-4+0j`` or ``-4-0j``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DegreeUnsupported,
    DepthExceeded,
    NonFiniteState,
    StepLimitExceeded,
)

ComplexFn = Callable[[float], complex]


# ---------------------------------------------------------------------------
# branch conventions
# ---------------------------------------------------------------------------

def _unsign_zero(z: complex) -> complex:
    z = complex(z)
    if z.imag == 0.0:
        return complex(z.real, 0.0)
    return z


def csqrt(z: complex) -> complex:
    """Principal square root; a negative real maps to ``+i*sqrt(|x|)``."""
    return cmath.sqrt(_unsign_zero(z))


def cpow(z: complex, p: complex) -> complex:
    """Principal power ``exp(p * Log z)``; ``0**p`` is 0 for Re p > 0."""
    z = _unsign_zero(z)
    if z == 0:
        if complex(p).real > 0:
            return 0j
        raise ZeroDivisionError("0 raised to a power with Re p <= 0")
    return cmath.exp(complex(p) * cmath.log(z))


def is_finite(z: complex) -> bool:
    return math.isfinite(z.real) and math.isfinite(z.imag)


# ---------------------------------------------------------------------------
# trajectories and the integrator
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StepperConfig:
    rtol: float = 1e-10
    atol: float = 1e-12
    max_step: float = math.inf
    max_steps: int = 200_000

    def __post_init__(self):
        if not (self.rtol > 0 and self.atol > 0 and self.max_steps > 0):
            raise ValueError("rtol, atol and max_steps must be positive")
        if not self.max_step > 0:
            raise ValueError("max_step must be positive")


@dataclass(frozen=True)
class Trajectory:
    """Samples of a complex curve.

    ``z`` is one-dimensional for scalar states; for systems with more than
    two components it holds the full state matrix, one row per sample.
    ``dz`` is either empty or aligned with ``t``.
    """

    t: np.ndarray
    z: np.ndarray
    dz: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=complex))

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        z = np.asarray(self.z, dtype=complex)
        dz = np.asarray(self.dz, dtype=complex)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "dz", dz)
        if len(t) != len(z):
            raise ValueError("t and z must have equal length")
        if len(dz) not in (0, len(t)):
            raise ValueError("dz must be empty or aligned with t")
        if len(t) > 1 and not np.all(np.diff(t) > 0):
            raise ValueError("sample times must be strictly increasing")
        if not (np.all(np.isfinite(z)) and np.all(np.isfinite(dz))):
            raise NonFiniteState("trajectory contains non-finite values")

    @property
    def has_derivatives(self) -> bool:
        return len(self.dz) == len(self.t) and len(self.t) > 0

    def __len__(self):
        return len(self.t)


# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
# difference between the 5th and embedded 4th order weights
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])
# continuous extension (Shampine), columns multiply sigma, sigma^2, sigma^3, sigma^4
_P = np.array([
    [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])


def _dopri_step(rhs, t, y, f0, h):
    k = np.empty((7, y.size), dtype=complex)
    k[0] = f0
    for s in range(1, 7):
        ys = y + h * (np.dot(_A[s], k[:s]))
        k[s] = rhs(t + _C[s] * h, ys)
    y_new = y + h * np.dot(_B[:6], k[:6])
    # k[6] was evaluated at y_new (FSAL)
    err = h * np.dot(_E, k)
    return y_new, err, k


def integrate_ode(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    y0: Sequence[complex],
    t_span: tuple[float, float],
    cfg: StepperConfig | None = None,
    t_out: Sequence[float] | None = None,
) -> Trajectory:
    """Integrate ``y' = rhs(t, y)`` forward with an adaptive DOPRI5 pair.

    States at ``t_out`` come from the fourth-order continuous extension.
    Scalar problems return a one-dimensional ``z``; two-component problems
    are taken to be ``(z, z')`` and fill ``dz`` as well.
    """
    cfg = cfg or StepperConfig()
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not t1 > t0:
        raise ValueError("t_span must be increasing")
    y = np.atleast_1d(np.asarray(y0, dtype=complex)).copy()
    if t_out is None:
        t_out = [t0, t1]
    t_out = np.asarray(t_out, dtype=float)
    if np.any(t_out < t0) or np.any(t_out > t1):
        raise ValueError("t_out must lie inside t_span")
    order = np.argsort(t_out, kind="stable")
    out = np.empty((len(t_out), y.size), dtype=complex)

    def f(t, v):
        r = np.asarray(rhs(t, v), dtype=complex).reshape(y.size)
        if not np.all(np.isfinite(r)):
            raise NonFiniteState(f"rhs returned non-finite value at t={t}")
        return r

    t = t0
    fy = f(t, y)
    # initial step from the usual scale heuristic
    scale = cfg.atol + cfg.rtol * np.abs(y)
    d0 = np.max(np.abs(y) / scale)
    d1 = np.max(np.abs(fy) / scale)
    h = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h = min(h, cfg.max_step, t1 - t0)

    idx = 0
    while idx < len(order) and t_out[order[idx]] <= t:
        out[order[idx]] = y
        idx += 1

    steps = 0
    while t < t1:
        if steps >= cfg.max_steps:
            raise StepLimitExceeded(f"max_steps={cfg.max_steps} reached at t={t}")
        steps += 1
        h = min(h, t1 - t)
        y_new, err, k = _dopri_step(f, t, y, fy, h)
        tol = cfg.atol + cfg.rtol * np.maximum(np.abs(y), np.abs(y_new))
        ratio = float(np.max(np.abs(err) / tol))
        if not math.isfinite(ratio):
            raise NonFiniteState(f"non-finite error estimate at t={t}")
        if ratio <= 1.0:
            t_new = t + h if t1 - (t + h) > 1e-14 * max(1.0, abs(t1)) else t1
            while idx < len(order) and t_out[order[idx]] <= t_new:
                sigma = (t_out[order[idx]] - t) / h
                powers = np.array([sigma, sigma**2, sigma**3, sigma**4])
                out[order[idx]] = y + h * np.dot(_P @ powers, k)
                idx += 1
            t, y, fy = t_new, y_new, k[6]
            if not np.all(np.isfinite(y)):
                raise NonFiniteState(f"state became non-finite at t={t}")
            factor = 5.0 if ratio == 0 else min(5.0, max(0.2, 0.9 * ratio ** -0.2))
        else:
            factor = max(0.2, 0.9 * ratio ** -0.2)
        h = min(h * factor, cfg.max_step)
        if h < 1e-14 * max(1.0, abs(t)):
            raise StepLimitExceeded(f"step size underflow at t={t}")

    if y.size == 1:
        return Trajectory(t_out, out[:, 0])
    if y.size == 2:
        return Trajectory(t_out, out[:, 0], out[:, 1])
    return Trajectory(t_out, out)


def integrate_second_order(
    accel: Callable[[float, complex, complex], complex],
    z0: complex,
    v0: complex,
    t_span: tuple[float, float],
    cfg: StepperConfig | None = None,
    t_out: Sequence[float] | None = None,
) -> Trajectory:
    """Integrate ``z'' = accel(t, z, z')``; the result carries ``dz``."""

    def rhs(t, s):
        return np.array([s[1], accel(t, complex(s[0]), complex(s[1]))])

    return integrate_ode(rhs, [z0, v0], t_span, cfg, t_out)


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------

def quad(f: ComplexFn, a: float, b: float, tol: float = 1e-10, max_depth: int = 60) -> complex:
    """Adaptive Simpson quadrature with Richardson correction.

    The target is ``|result - true| <= tol * (1 + |result|)``.
    """
    if a == b:
        return 0j
    if b < a:
        return -quad(f, b, a, tol, max_depth)
    fa, fb = complex(f(a)), complex(f(b))
    m = 0.5 * (a + b)
    fm = complex(f(m))
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    # a coarse magnitude estimate sets the absolute target
    eps = tol * (1.0 + abs(whole))

    # explicit stack: (a, b, fa, fm, fb, whole, eps, depth)
    total = 0j
    stack = [(a, b, fa, fm, fb, whole, eps, 0)]
    while stack:
        a, b, fa, fm, fb, whole, eps, depth = stack.pop()
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = complex(f(lm)), complex(f(rm))
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        delta = left + right - whole
        if abs(delta) <= 15.0 * eps or m - a <= 4 * np.finfo(float).eps * abs(m):
            total += left + right + delta / 15.0
            continue
        if depth >= max_depth:
            raise DepthExceeded(f"quadrature depth {max_depth} exceeded near x={m}")
        stack.append((m, b, fm, frm, fb, right, 0.5 * eps, depth + 1))
        stack.append((a, m, fa, flm, fm, left, 0.5 * eps, depth + 1))
    return total


# ---------------------------------------------------------------------------
# finite differences
# ---------------------------------------------------------------------------

def default_step(t: float, order: int = 1) -> float:
    # second differences divide by h^2, so a larger step keeps roundoff down
    base = 1e-4 if order == 1 else 2e-3
    return base * max(1.0, abs(t))


def fd_derivative(f: ComplexFn, t: float, order: int = 1, h: float | None = None) -> complex:
    """Central five-point derivative of order 1 or 2 (both O(h^4))."""
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    if h is None:
        h = default_step(t, order)
    fm2, fm1 = complex(f(t - 2 * h)), complex(f(t - h))
    fp1, fp2 = complex(f(t + h)), complex(f(t + 2 * h))
    if order == 1:
        return (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h)
    f0 = complex(f(t))
    return (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h)


# ---------------------------------------------------------------------------
# polynomial roots
# ---------------------------------------------------------------------------

def poly_eval(coeffs: Sequence[complex], x: complex) -> complex:
    """Horner evaluation; ``coeffs`` runs from the leading coefficient down."""
    acc = 0j
    for c in coeffs:
        acc = acc * x + c
    return acc


def _newton_polish(coeffs, r, iters=50):
    deriv = [c * (len(coeffs) - 1 - i) for i, c in enumerate(coeffs[:-1])]
    for _ in range(iters):
        p = poly_eval(coeffs, r)
        dp = poly_eval(deriv, r)
        if dp == 0:
            break
        step = p / dp
        r_new = r - step
        if abs(poly_eval(coeffs, r_new)) >= abs(p):
            break
        r = r_new
        if abs(step) <= 1e-17 * max(1.0, abs(r)):
            break
    return r


def _sort_key(z: complex):
    return (round(z.real, 12), round(z.imag, 12))


def poly_roots(coeffs: Sequence[complex], tol: float = 1e-12) -> list[complex]:
    """All complex roots of a polynomial of degree at most four.

    Coefficients run from the leading term down. Degrees one and two use
    closed forms; three and four use companion-matrix eigenvalues refined
    by Newton's method. Roots are sorted by real then imaginary part.
    """
    coeffs = [complex(c) for c in coeffs]
    while len(coeffs) > 1 and coeffs[0] == 0:
        coeffs.pop(0)
    deg = len(coeffs) - 1
    if deg > 4:
        raise DegreeUnsupported(f"degree {deg} > 4")
    if deg < 1:
        return []
    lead = coeffs[0]
    mon = [c / lead for c in coeffs]
    if deg == 1:
        roots = [-mon[1]]
    elif deg == 2:
        b, c = mon[1], mon[2]
        disc = csqrt(b * b - 4.0 * c)
        # pick the sign that avoids cancellation, recover the partner by Vieta
        q = -0.5 * (b + disc) if (b.conjugate() * disc).real >= 0 else -0.5 * (b - disc)
        if q == 0:
            roots = [0j, -b]
        else:
            roots = [q, c / q]
    else:
        companion = np.zeros((deg, deg), dtype=complex)
        companion[0, :] = [-c for c in mon[1:]]
        companion[1:, :-1] = np.eye(deg - 1)
        roots = [_newton_polish(mon, complex(r)) for r in np.linalg.eigvals(companion)]
    # real-axis snap: drop imaginary dust produced by eigenvalue solvers
    cleaned = []
    for r in roots:
        if abs(r.imag) <= 1e-14 * max(1.0, abs(r)) and abs(poly_eval(coeffs, complex(r.real, 0.0))) <= abs(poly_eval(coeffs, r)) * (1 + 1e-12) + 1e-300:
            r = complex(r.real, 0.0)
        cleaned.append(r)
    return sorted(cleaned, key=_sort_key)

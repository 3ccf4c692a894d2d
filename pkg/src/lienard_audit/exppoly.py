"""Finite sums of ``k * e^(lam*x) * y^p * y'^q``.

The basis is closed under addition, multiplication and the partial
derivatives with respect to ``x``, ``y`` and ``y'``, which is all the Lie
symmetry machinery needs. Every operation returns a normalised value:
terms with equal ``(p, q)`` and rates within ``LAMBDA_TOL`` are merged,
negligible coefficients are dropped and the remaining terms are sorted by
``(p, q, Re lam, Im lam)``.
"""

from __future__ import annotations

import cmath
import re
from dataclasses import dataclass
from typing import Iterable

from .errors import DegreeOverflow, ParseError

LAMBDA_TOL = 1e-12
ZERO_TOL = 1e-12
MAX_DEGREE = 8

VARIABLES = ("x", "y", "yp")


@dataclass(frozen=True)
class Term:
    coeff: complex
    lam: complex = 0j
    p: int = 0
    q: int = 0

    def __post_init__(self):
        object.__setattr__(self, "coeff", complex(self.coeff))
        object.__setattr__(self, "lam", complex(self.lam))
        if self.p < 0 or self.q < 0:
            raise ValueError("powers must be non-negative")
        if self.p > MAX_DEGREE or self.q > MAX_DEGREE:
            raise DegreeOverflow(f"power exceeds cap {MAX_DEGREE}: p={self.p}, q={self.q}")
        c = self.coeff
        if c != c or abs(c) == float("inf"):
            raise ValueError("coefficient must be finite")

    @property
    def key(self):
        return (self.p, self.q, self.lam.real, self.lam.imag)

    def evaluate(self, x: float, y: complex, yp: complex) -> complex:
        return self.coeff * cmath.exp(self.lam * x) * y**self.p * yp**self.q


def _normalize(terms: Iterable[Term]) -> tuple[Term, ...]:
    merged: list[Term] = []
    for t in sorted(terms, key=lambda t: t.key):
        # candidates share (p, q) and sit at the tail, ordered by Re lam
        for i in range(len(merged) - 1, -1, -1):
            m = merged[i]
            if (m.p, m.q) != (t.p, t.q) or t.lam.real - m.lam.real > LAMBDA_TOL:
                merged.append(t)
                break
            if abs(m.lam - t.lam) <= LAMBDA_TOL:
                merged[i] = Term(m.coeff + t.coeff, m.lam, m.p, m.q)
                break
        else:
            merged.append(t)
    cmax = max((abs(t.coeff) for t in merged), default=0.0)
    kept = [t for t in merged if abs(t.coeff) > ZERO_TOL * cmax]
    return tuple(sorted(kept, key=lambda t: t.key))


class ExpPoly:
    """Immutable normal-form sum of :class:`Term` objects.

    ``scale`` records the largest coefficient magnitude that took part in
    building the value; :meth:`is_zero` measures cancellation residue
    against it.
    """

    __slots__ = ("terms", "scale")

    def __init__(self, terms: Iterable[Term] = (), scale: float | None = None):
        terms = list(terms)
        normal = _normalize(terms)
        seen = max((abs(t.coeff) for t in terms), default=0.0)
        object.__setattr__(self, "terms", normal)
        object.__setattr__(self, "scale", max(seen, scale or 0.0))

    def __setattr__(self, name, value):
        raise AttributeError("ExpPoly is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def const(cls, k: complex) -> "ExpPoly":
        return cls([Term(k)])

    @classmethod
    def exp(cls, lam: complex, k: complex = 1.0) -> "ExpPoly":
        return cls([Term(k, lam)])

    @classmethod
    def monomial(cls, p: int = 0, q: int = 0, k: complex = 1.0, lam: complex = 0j) -> "ExpPoly":
        return cls([Term(k, lam, p, q)])

    @classmethod
    def zero(cls) -> "ExpPoly":
        return cls()

    @classmethod
    def coerce(cls, value) -> "ExpPoly":
        if isinstance(value, ExpPoly):
            return value
        if isinstance(value, (int, float, complex)):
            return cls.const(value)
        raise TypeError(f"cannot convert {type(value).__name__} to ExpPoly")

    # -- algebra -------------------------------------------------------------

    def __add__(self, other):
        other = ExpPoly.coerce(other)
        return ExpPoly(self.terms + other.terms, max(self.scale, other.scale))

    __radd__ = __add__

    def __neg__(self):
        return ExpPoly([Term(-t.coeff, t.lam, t.p, t.q) for t in self.terms], self.scale)

    def __sub__(self, other):
        return self + (-ExpPoly.coerce(other))

    def __rsub__(self, other):
        return ExpPoly.coerce(other) - self

    def __mul__(self, other):
        other = ExpPoly.coerce(other)
        out = []
        for a in self.terms:
            for b in other.terms:
                p, q = a.p + b.p, a.q + b.q
                if p > MAX_DEGREE or q > MAX_DEGREE:
                    raise DegreeOverflow(f"product degree ({p}, {q}) exceeds cap {MAX_DEGREE}")
                out.append(Term(a.coeff * b.coeff, a.lam + b.lam, p, q))
        scale = max(self.scale * other.scale, max((abs(t.coeff) for t in out), default=0.0))
        return ExpPoly(out, scale)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers are supported")
        result = ExpPoly.const(1.0)
        for _ in range(n):
            result = result * self
        return result

    def diff(self, var: str) -> "ExpPoly":
        if var == "x":
            out = [Term(t.coeff * t.lam, t.lam, t.p, t.q) for t in self.terms]
        elif var == "y":
            out = [Term(t.coeff * t.p, t.lam, t.p - 1, t.q) for t in self.terms if t.p > 0]
        elif var in ("yp", "y'"):
            out = [Term(t.coeff * t.q, t.lam, t.p, t.q - 1) for t in self.terms if t.q > 0]
        else:
            raise ValueError(f"unknown variable {var!r}; expected one of {VARIABLES}")
        scale = max(self.scale, max((abs(t.coeff) for t in out), default=0.0))
        return ExpPoly(out, scale)

    def evaluate(self, x: float, y: complex = 0j, yp: complex = 0j) -> complex:
        return sum((t.evaluate(x, y, yp) for t in self.terms), 0j)

    __call__ = evaluate

    # -- queries -------------------------------------------------------------

    def is_zero(self, tol: float = 1e-12) -> tuple[bool, Term | None]:
        """Return ``(True, None)`` or ``(False, largest offending term)``."""
        bound = tol * (1.0 + self.scale)
        worst = max(self.terms, key=lambda t: abs(t.coeff), default=None)
        if worst is None or abs(worst.coeff) <= bound:
            return True, None
        return False, worst

    def max_coeff(self) -> float:
        return max((abs(t.coeff) for t in self.terms), default=0.0)

    @property
    def is_pure_x(self) -> bool:
        return all(t.p == 0 and t.q == 0 for t in self.terms)

    @property
    def is_constant(self) -> bool:
        return all(t.p == 0 and t.q == 0 and t.lam == 0 for t in self.terms)

    def constant_value(self) -> complex:
        if not self.is_constant:
            raise ValueError("ExpPoly is not a constant")
        return sum((t.coeff for t in self.terms), 0j)

    def select(self, p: int, q: int) -> "ExpPoly":
        """Coefficient (a function of x) of the monomial ``y^p y'^q``."""
        return ExpPoly(
            [Term(t.coeff, t.lam, 0, 0) for t in self.terms if (t.p, t.q) == (p, q)],
            self.scale,
        )

    def degrees(self) -> set[tuple[int, int]]:
        return {(t.p, t.q) for t in self.terms}

    def __eq__(self, other):
        if not isinstance(other, ExpPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"ExpPoly({render(self)!r})"

    def __str__(self):
        return render(self)


# ---------------------------------------------------------------------------
# text form, e.g. "(2+0i)·e^{(0+1i)x}·y^1·y'^0"
# ---------------------------------------------------------------------------

def _fmt_real(v: float) -> str:
    if v == 0:
        return "0"
    if v.is_integer() and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def fmt_complex(z: complex) -> str:
    z = complex(z)
    re_s = _fmt_real(z.real)
    im = z.imag
    sign = "-" if (im < 0 or (im == 0 and str(im).startswith("-"))) else "+"
    return f"({re_s}{sign}{_fmt_real(abs(im))}i)"


def render_term(t: Term) -> str:
    return f"{fmt_complex(t.coeff)}·e^{{{fmt_complex(t.lam)}x}}·y^{t.p}·y'^{t.q}"


def render(a: ExpPoly) -> str:
    if not a.terms:
        return "0"
    return " + ".join(render_term(t) for t in a.terms)


_UNUM = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][-+]?\d+)?|inf|nan"
_NUM = rf"[-+]?(?:{_UNUM})"
_CPLX = rf"\(\s*({_NUM})\s*([-+])\s*({_UNUM})i\s*\)"
_TERM_RE = re.compile(rf"^{_CPLX}·e\^\{{{_CPLX}x\}}·y\^(\d+)·y'\^(\d+)$")


def parse(text: str) -> ExpPoly:
    """Inverse of :func:`render`."""
    text = text.strip()
    if text == "0":
        return ExpPoly()
    terms = []
    for chunk in text.split(" + "):
        m = _TERM_RE.match(chunk.strip())
        if not m:
            raise ParseError(f"cannot parse term {chunk!r}")
        cre, csg, cim, lre, lsg, lim, p, q = m.groups()
        coeff = complex(float(cre), float(cim) * (-1 if csg == "-" else 1))
        lam = complex(float(lre), float(lim) * (-1 if lsg == "-" else 1))
        terms.append(Term(coeff, lam, int(p), int(q)))
    return ExpPoly(terms)


# functional aliases matching the operation names used across the package

def ep_add(a: ExpPoly, b: ExpPoly) -> ExpPoly:
    return a + b


def ep_mul(a: ExpPoly, b: ExpPoly) -> ExpPoly:
    return a * b


def ep_diff(a: ExpPoly, var: str) -> ExpPoly:
    return a.diff(var)


def ep_eval(a: ExpPoly, x: float, y: complex = 0j, yp: complex = 0j) -> complex:
    return a.evaluate(x, y, yp)


def ep_is_zero(a: ExpPoly, tol: float = 1e-12) -> tuple[bool, Term | None]:
    return a.is_zero(tol)


Y = ExpPoly.monomial(1, 0)
YP = ExpPoly.monomial(0, 1)
ONE = ExpPoly.const(1.0)

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lienard_audit.errors import NearPole, VanishingOmega
from lienard_audit.exact import default_branch
from lienard_audit.factorization import (
    DAMPING_FACTOR,
    HalfPowerPoly,
    bernoulli_ode,
    bernoulli_solution,
    branch_alpha,
    check_F1_G_relation,
    expand_factorization,
    integrating_factor,
    make_factor_pair,
    omega_ode_residual,
    omega_special_solution,
    omega_to_Y,
    parse_sign,
    phi_log_derivative,
    pole_free_window,
    verify_factorization,
    verify_ode_residual,
)
from lienard_audit.lienard import CoefficientSet

small = st.floats(-3, 3, allow_nan=False, allow_infinity=False)
cx = st.builds(complex, small, small)
sign = st.sampled_from([1, -1])


def const(F1, F2, G):
    return CoefficientSet.constant(F1, F2, G)


def test_parse_sign_aliases():
    assert [parse_sign(s) for s in (1, "+", "upper", "+1")] == [1] * 4
    assert [parse_sign(s) for s in (-1, "-", "lower", "-1")] == [-1] * 4
    with pytest.raises(ValueError):
        parse_sign("sideways")


def test_branch_alpha_squares_to_minus_two_thirds():
    for s in (1, -1):
        assert abs(branch_alpha(s) ** 2 + 2 / 3) < 1e-15


def test_factor_values():
    p = make_factor_pair(const(0, 6, 0), "+")
    assert abs(p.f1.at(0.0)[1] - 2j) < 1e-14
    assert abs(p.f2.at(0.0)[1] + 3j) < 1e-14
    p = make_factor_pair(const(0, 0, 6), "+")
    assert abs(p.f1.at(0.0)[0] + 2) < 1e-14
    assert abs(p.f2.at(0.0)[0] + 3) < 1e-14


def test_free_case_residuals_vanish():
    rep = verify_factorization(make_factor_pair(const(0, 6, 0)), const(0, 6, 0))
    assert rep.product_residual < 1e-14 and rep.damping_residual < 1e-14


def test_relation_satisfied_case():
    c = const(1.0, 1.0, 6 / 25)
    rep = verify_factorization(make_factor_pair(c, "+"), c)
    assert rep.product_residual < 1e-14 and rep.damping_residual < 1e-14


def test_relation_violated_case():
    c = const(0.0, 1.0, 1.0)
    rep = verify_factorization(make_factor_pair(c, "+"), c)
    assert rep.damping_residual == pytest.approx(5 / math.sqrt(6), abs=1e-12)
    assert rep.damping_residual == pytest.approx(2.0412415, abs=1e-7)


def test_branch_relation_mismatch():
    b = default_branch("upper")
    r = check_F1_G_relation(b.coeffs, "+")
    assert abs(r - 1.0053883j) < 1e-6


@settings(max_examples=100, deadline=None)
@given(cx, cx, cx, sign)
def test_product_identity_and_sqrt_cancellation(F1, F2, G, s):
    c = const(F1, F2, G)
    rep = verify_factorization(make_factor_pair(c, s), c)
    assert rep.product_residual < 1e-14 * (1 + abs(F2) + abs(G))
    assert abs(rep.damping_sqrt_part) < 1e-14 * (1 + abs(F2))


@settings(max_examples=100, deadline=None)
@given(cx, cx, cx, sign)
def test_damping_vanishes_with_relation(F1, F2, G, s):
    c = const(F1, F2, G)
    rep = verify_factorization(make_factor_pair(c, s), c)
    rel = check_F1_G_relation(c, s)
    # the constant part of the damping mismatch is the relation itself
    assert abs(abs(rep.damping_const_part) - abs(rel)) < 1e-12 * (1 + abs(F1) + abs(G))
    matched = const(s * DAMPING_FACTOR * cmath.sqrt(G), F2, G)
    rep = verify_factorization(make_factor_pair(matched, s), matched)
    assert rep.damping_residual < 1e-12 * (1 + abs(G))
    assert abs(check_F1_G_relation(matched, s)) < 1e-12 * (1 + abs(G))


def test_expansion_orders():
    ydot, y = expand_factorization(make_factor_pair(const(0, 6, 0)), 0.0)
    assert isinstance(y, HalfPowerPoly)
    assert set(y) <= {0, 1, 2}


# -- Bernoulli -------------------------------------------------------------------

def test_free_particle_solution():
    c = const(0, 6, 0)
    Y = bernoulli_solution(c, "+", 0.0)
    grid = np.linspace(0.5, 3.0, 26)
    assert max(abs(Y(t) + 1 / t**2) for t in grid) < 1e-10
    assert verify_ode_residual(Y, bernoulli_ode(c, "+"), grid) < 1e-10


def test_pole_at_anchor():
    with pytest.raises(NearPole):
        bernoulli_solution(const(0, 6, 0), "+", 1.0)(1.0)


def test_windows():
    assert pole_free_window("+", 1.0) == (1.5, 4.0)
    assert pole_free_window("-", 1.0) == (-2.0, 0.5)


@settings(max_examples=20, deadline=None)
@given(st.floats(1, 10), st.floats(0, 1), sign)
def test_bernoulli_random_constants(F2, G, s):
    c = const(0.0, F2, G)
    grid = np.linspace(*pole_free_window(s), 26)
    Y = bernoulli_solution(c, s, 0.0)
    assert verify_ode_residual(Y, bernoulli_ode(c, s), grid) < 1e-7


@pytest.mark.parametrize("branch", ["upper", "lower"])
def test_bernoulli_on_exact_branch(branch):
    b = default_branch(branch)
    grid = np.linspace(*pole_free_window(b.sign), 26)
    Y = bernoulli_solution(b.coeffs, b.sign, 0.0)
    assert verify_ode_residual(Y, bernoulli_ode(b.coeffs, b.sign), grid) < 1e-7


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 1), st.floats(-3, 3))
def test_integrating_factor_sign_symmetry(G, t):
    c = const(0, 1, G)
    assert abs(integrating_factor(c, "+")(t) * integrating_factor(c, "-")(t) - 1) < 1e-10


def test_verify_residual_examples():
    assert verify_ode_residual(lambda t: 1.0, lambda t, y, dy: dy - y, [0.0, 1.0]) == 1.0
    eps = 1.0

    def vdp(t, z, dz, ddz):
        return ddz - eps * (1 - abs(z) ** 2) * dz + z

    assert verify_ode_residual(lambda t: cmath.exp(1j * t), vdp, np.linspace(0, 3, 7), 2) < 1e-8
    with pytest.raises(ValueError):
        verify_ode_residual(lambda t: 1.0, None, [0.0], 3)


# -- extended solutions ------------------------------------------------------------

def test_omega_examples():
    assert omega_special_solution(const(0, 0, 0), 3.0)(1.7) == 9 / 4
    w = omega_special_solution(const(0, 6, 0), 0.0, "+")
    assert abs(w(2.0) + 1.0) < 1e-14
    Y = omega_to_Y(omega_special_solution(const(0, 0, 0), 2.0))
    assert Y(0.3) == 1


def test_omega_residual_examples():
    zero = const(0, 0, 0)
    assert omega_ode_residual(lambda t: 1.0 + 0j, zero, "+", [0.0, 1.0]) == pytest.approx(0.5, abs=1e-12)
    r = omega_ode_residual(lambda t: (t + 1) ** -0.5, zero, "+", np.linspace(0, 2, 9))
    assert r < 1e-8


def test_vanishing_omega():
    with pytest.raises(VanishingOmega):
        omega_ode_residual(lambda t: 0j, const(0, 0, 0), "+", [0.5])
    with pytest.raises(VanishingOmega):
        omega_to_Y(lambda t: 0j)(0.0)


def test_phi_log_derivative_examples():
    zero = const(0, 0, 0)
    assert phi_log_derivative(lambda t: 2.0 + 0j, zero, "+", 0.4) == 0
    assert abs(phi_log_derivative(math.exp, zero, "+", 0.4) - 3) < 1e-9

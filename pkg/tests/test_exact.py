import dataclasses
import math

import numpy as np
import pytest

from lienard_audit.errors import NotARoot
from lienard_audit.exact import (
    EPS,
    F2_phase_residual,
    G_candidates,
    audit_eq29,
    consistent_G,
    default_branch,
    orbit_equation_residual,
    exact_solution_Y_residual,
    kappa_candidates,
    kappa_sweep,
    make_branch,
    solve_c,
    theta_c_identity,
)

C_REAL = 1.9041608591349206
GRID = np.linspace(0.0, 2 * math.pi, 33)
PAIRS = [(br, k) for br in ("upper", "lower") for k in range(3)]


def bisect(f, a, b, iters=200):
    fa = f(a)
    for _ in range(iters):
        m = 0.5 * (a + b)
        if (f(m) > 0) == (fa > 0):
            a, fa = m, f(m)
        else:
            b = m
    return 0.5 * (a + b)


def test_lower_roots():
    roots = solve_c("lower")
    oracle = bisect(lambda c: c**3 - c - 5, 1.0, 3.0)
    assert abs(roots[0] - oracle) < 1e-12
    assert abs(roots[0] - 1.9041609) < 1e-6
    pair = sorted(roots[1:], key=lambda z: z.imag)
    assert abs(pair[0] - (-0.9520804 - 1.3112482j)) < 1e-6
    # Vieta: the roots sum to zero and multiply to 5
    assert abs(sum(roots)) < 1e-12
    assert abs(roots[0] * roots[1] * roots[2] - 5) < 1e-12


@pytest.mark.parametrize("branch, target", [("upper", -5), ("lower", 5)])
def test_roots_satisfy_cubic(branch, target):
    for c in solve_c(branch):
        assert abs(c * (c * c - 1) - target) < 1e-12


def test_branch_antisymmetry():
    up = sorted(solve_c("upper"), key=lambda z: (z.real, z.imag))
    lo = sorted((-z for z in solve_c("lower")), key=lambda z: (z.real, z.imag))
    assert max(abs(a - b) for a, b in zip(up, lo)) < 1e-12


def test_upper_branch_record():
    b = default_branch("upper")
    assert b.eps == EPS == 1j
    assert b.c == -C_REAL
    assert b.theta_is_real and isinstance(b.theta, float)
    assert abs(b.theta + 0.5251656) < 1e-6
    assert abs(b.F1() - 2.6258286j) < 1e-6
    assert abs(b.G() + 0.6301989) < 1e-6
    assert abs(b.coeffs.F2.evaluate(0.0) + 1.0) < 1e-15


def test_lower_branch_theta():
    assert abs(default_branch("lower").theta - 0.5251656) < 1e-6


def test_complex_roots_carry_complex_theta():
    b = default_branch("upper", 1)
    assert not b.theta_is_real
    assert isinstance(b.theta, complex)


def test_not_a_root():
    with pytest.raises(NotARoot):
        make_branch(0.0, "upper")


@pytest.mark.parametrize("branch, k", PAIRS)
def test_theta_c_identity(branch, k):
    assert theta_c_identity(default_branch(branch, k)) < 1e-12


def test_theta_c_identity_detects_perturbation():
    b = default_branch("upper")
    moved = dataclasses.replace(b, theta=b.theta + 0.1)
    assert theta_c_identity(moved) == pytest.approx(0.1 * C_REAL, abs=1e-12)


def test_consistent_G_examples():
    b = default_branch("upper")
    assert abs(consistent_G(b.c, b.theta, 1j) + 1.1032) < 1e-4
    assert consistent_G(1.0, 1.0, 0.37) == 1.0
    assert consistent_G(-1.9, 0.0, 1j) == 0.0


@pytest.mark.parametrize("branch", ["upper", "lower"])
def test_orbit_equation_residuals(branch):
    b = default_branch(branch)
    G_star = consistent_G(b.c, b.theta, b.eps)
    for t in GRID:
        assert abs(orbit_equation_residual(b.c, b.theta, b.eps, G_star, t)) < 1e-10
        r = abs(orbit_equation_residual(b.c, b.theta, b.eps, b.G(), t))
        assert abs(r - abs(b.G() - G_star) * abs(b.c)) < 1e-10


def test_G_candidates_disagree():
    g = G_candidates(default_branch("upper"))
    assert abs(g["consistent"] - g["branch"]) == pytest.approx(0.4730, abs=1e-3)
    assert abs(g["damping_relation"] - g["branch"]) > 0.1


@pytest.mark.parametrize("branch", ["upper", "lower"])
def test_F2_phase(branch):
    assert F2_phase_residual(default_branch(branch), GRID) < 1e-12


def test_amplitude_audit_start():
    b = default_branch("upper")
    audit = audit_eq29(b)
    assert audit.kappa == -1j
    assert audit.at_start == pytest.approx(5.0, abs=1e-9)


@pytest.mark.parametrize("branch, k", PAIRS)
def test_amplitude_rhs_magnitude_six_at_start(branch, k):
    b = default_branch(branch, k)
    # |z'(0)| = |c theta| = 1, so the residual is at least 5 and at most 7
    assert 5.0 - 1e-9 <= audit_eq29(b, grid=[0.0]).at_start <= 7.0 + 1e-9


def test_kappa_sweep_reports_all_candidates():
    b = default_branch("upper")
    best, scores = kappa_sweep(b)
    assert set(scores) == set(kappa_candidates(b.eps))
    assert scores[best] == min(scores.values())


def test_Y_residuals():
    b = default_branch("upper")
    assert exact_solution_Y_residual(b, lambda t: 0j, GRID) == 0
    r = exact_solution_Y_residual(b, lambda t: 1.0 + 0j, [0.0])
    assert r == pytest.approx(1.6301989, abs=1e-6)


def test_to_dict_fields():
    d = default_branch("upper").to_dict()
    assert set(d) == {"branch", "c", "theta", "eps", "F1", "G", "F2_amplitude", "F2_rate"}
    assert abs(d["F2_amplitude"] + 1) < 1e-15

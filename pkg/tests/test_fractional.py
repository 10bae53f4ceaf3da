from fractions import Fraction

import numpy as np
import pytest

from padicpme.errors import DomainError, ResourceError
from padicpme.fractional import (OperatorParams, apply_radial_power,
                                 apply_testfunction_at, apply_to_indicator,
                                 ball_eigenvalue_floor, ball_matrix,
                                 evaluate_indicator_image, exterior_constant,
                                 hypersingular_quadrature, mass_of_image,
                                 operator_symbol, restrict_to_ball,
                                 spectral_apply)
from padicpme.functions import GridFunction, TestFunction, to_grid
from padicpme.padic import Ball, GridSpec, PAdicExpansion, gamma_p


def _zero(p):
    return PAdicExpansion.zero(p)


def test_params_domain():
    with pytest.raises(DomainError):
        OperatorParams(2, 0.0)
    with pytest.raises(DomainError):
        OperatorParams(2, -1.0)
    op = OperatorParams(2, 2.0)
    assert op.hypersingular_coefficient == pytest.approx(-24 / 7)


def test_indicator_image_frozen_values():
    """p=2, alpha=2, unit ball: 4/7 inside, -3/7 and -3/56 outside."""
    prof = apply_to_indicator(OperatorParams(2, 2.0), Ball(_zero(2), 0))
    assert prof.value_at_zero.real == pytest.approx(4 / 7, abs=1e-15)
    assert prof.value_at_shell(0).real == pytest.approx(4 / 7, abs=1e-15)
    assert prof.value_at_shell(1).real == pytest.approx(-3 / 7, abs=1e-15)
    assert prof.value_at_shell(2).real == pytest.approx(-3 / 56, abs=1e-15)
    # far field follows p^l Gamma_p(a+1) |x|^{-a-1}
    assert prof.value_at_shell(5).real == pytest.approx(
        gamma_p(2, 3.0) * 2.0 ** (-15), abs=1e-18)


def test_indicator_image_scales_with_radius():
    """Dilation: the image of 1_{B_l} is p^{-l a} times the rescaled image."""
    p, a, l = 3, 1.5, 2
    prof0 = apply_to_indicator(OperatorParams(p, a), Ball(_zero(p), 0))
    profl = apply_to_indicator(OperatorParams(p, a), Ball(_zero(p), l))
    assert profl.value_at_zero.real == pytest.approx(
        float(p) ** (-l * a) * prof0.value_at_zero.real)
    assert profl.value_at_shell(l + 1).real == pytest.approx(
        float(p) ** (-l * a) * prof0.value_at_shell(1).real)


def test_image_of_shifted_ball_recenters():
    p = 2
    c = PAdicExpansion.from_rational(p, Fraction(1, 2))
    op = OperatorParams(p, 2.0)
    shifted = evaluate_indicator_image(op, Ball(c, 0), Fraction(1, 2))
    centered = evaluate_indicator_image(op, Ball(_zero(p), 0), Fraction(0))
    assert shifted == pytest.approx(centered)


def test_image_mass_cancels():
    assert mass_of_image(OperatorParams(2, 2.0), Ball(_zero(2), 0)) < 1e-14
    assert mass_of_image(OperatorParams(5, 0.7), Ball(_zero(5), -1)) < 1e-14


def test_superposition_linearity():
    op = OperatorParams(2, 2.0)
    b0, b1 = Ball(_zero(2), 0), Ball(_zero(2), 1)
    f = TestFunction(2, ((2.0 + 0j, b0), (-1.0 + 0j, b1)))
    x = Fraction(1, 2)
    direct = apply_testfunction_at(op, f, x)
    parts = (2.0 * evaluate_indicator_image(op, b0, x)
             - 1.0 * evaluate_indicator_image(op, b1, x))
    assert direct == pytest.approx(parts)


def test_radial_power_oracle_and_guards():
    c, expo = apply_radial_power(OperatorParams(2, 2.0), 4.0)
    assert c == pytest.approx(140 / 31, abs=1e-13)
    assert expo == 2.0
    for bad in (-1.0, 2.0, 1.0):  # poles and zero of the gamma quotient
        with pytest.raises(DomainError):
            apply_radial_power(OperatorParams(2, 2.0), bad)


def test_quadrature_certificate_honest():
    op = OperatorParams(2, 2.0)
    f = TestFunction.indicator(Ball(_zero(2), 0))
    for x in (Fraction(0), Fraction(1, 2), Fraction(4)):
        val, tail = hypersingular_quadrature(op, f, x, k_lo=-4, k_hi=12)
        closed = apply_testfunction_at(op, f, x)
        assert abs(val - closed) <= tail + 1e-12


def test_quadrature_node_cap():
    op = OperatorParams(2, 2.0)
    f = TestFunction.indicator(Ball(_zero(2), -4))
    with pytest.raises(ResourceError):
        hypersingular_quadrature(op, f, Fraction(0), k_lo=-4, k_hi=40)


def test_quadrature_callable_needs_metadata():
    op = OperatorParams(2, 2.0)
    with pytest.raises(DomainError):
        hypersingular_quadrature(op, lambda x: 1.0, Fraction(0),
                                 k_lo=0, k_hi=4)


def test_ball_matrix_structure():
    grid = GridSpec(2, 1, 2)
    op = OperatorParams(2, 2.0, grid)
    B = ball_matrix(op)
    m = B.matrix
    assert np.allclose(m, m.T)
    # circulant in i - j mod dim
    for i in range(grid.dim):
        for j in range(grid.dim):
            assert m[i, j] == m[(i + 1) % grid.dim, (j + 1) % grid.dim]
    # off-diagonal entries are negative, diagonal positive
    off = m[~np.eye(grid.dim, dtype=bool)]
    assert np.all(off < 0) and np.all(np.diag(m) > 0)
    assert np.allclose(m.sum(axis=1), B.lam)


def test_symbol_matches_eigenvalues():
    grid = GridSpec(3, 1, 1)
    op = OperatorParams(3, 1.5, grid)
    s = operator_symbol(op)
    eigs = np.sort(np.linalg.eigvalsh(ball_matrix(op).matrix))
    assert np.allclose(np.sort(s.real), eigs, atol=1e-12)
    assert s[0] == pytest.approx(ball_eigenvalue_floor(3, 1.5, 1))


def test_spectral_apply_matches_dense():
    grid = GridSpec(2, 2, 2)
    op = OperatorParams(2, 1.3, grid)
    rng = np.random.default_rng(3)
    u = GridFunction(grid, rng.standard_normal(grid.dim)
                     + 1j * rng.standard_normal(grid.dim))
    lhs = spectral_apply(op, u).values
    rhs = ball_matrix(op).matrix @ u.values
    assert np.max(np.abs(lhs - rhs)) < 1e-11


def test_restrict_to_ball():
    p = 2
    psi = TestFunction.indicator(Ball(_zero(p), 2))
    inner = restrict_to_ball(psi, Ball(_zero(p), 0))
    assert inner.canonicalize() == TestFunction.indicator(
        Ball(_zero(p), 0)).canonicalize()
    # support wholly outside the ball restricts to zero
    far = TestFunction.indicator(
        Ball(PAdicExpansion.from_rational(p, Fraction(1, 4)), -2))
    assert restrict_to_ball(far, Ball(_zero(p), 0)).canonicalize().terms == ()


def test_exterior_constant_hand_values():
    """At p=2, alpha=2, N=0 the exterior parts of wide indicators reduce to
    geometric sums with known closed forms."""
    op = OperatorParams(2, 2.0, GridSpec(2, 0, 2))
    ball_N = Ball(_zero(2), 0)
    psi1 = TestFunction.indicator(Ball(_zero(2), 1))
    r1 = exterior_constant(op, psi1 - restrict_to_ball(psi1, ball_N), 0)
    assert r1.real == pytest.approx(-3 / 7, abs=1e-15)
    psi2 = TestFunction.indicator(Ball(_zero(2), 2))
    r2 = exterior_constant(op, psi2 - restrict_to_ball(psi2, ball_N), 0)
    assert r2.real == pytest.approx(-15 / 28, abs=1e-15)

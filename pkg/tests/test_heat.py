import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from padicpme.errors import DomainError
from padicpme.fractional import OperatorParams, ball_matrix
from padicpme.functions import TestFunction
from padicpme.heat import (KernelParams, ball_c_coefficient,
                           ball_integral_of_Z, ball_kernel_ZN,
                           ball_kernel_mass_estimate, ball_semigroup_expm,
                           ball_semigroup_matrix, coeff_ck, green_kernel_value,
                           green_profile, green_tail_constant,
                           green_zero_value, kernel_Z, kernel_Z_alternating,
                           kernel_Z_profile, kernel_Z_shell_series,
                           kernel_mass_estimate, linear_split_bound,
                           semigroup_matrix, semigroup_on_indicator,
                           smoothness_modulus)
from padicpme.padic import Ball, GridSpec, PAdicExpansion


def test_params_domain():
    with pytest.raises(DomainError):
        KernelParams(2, 2.0, -0.5)
    with pytest.raises(DomainError):
        KernelParams(2, 0.0, 1.0)
    with pytest.raises(DomainError):
        KernelParams(4, 2.0, 1.0)
    with pytest.raises(DomainError):
        kernel_Z(KernelParams(2, 2.0, 0.0), 0)


def test_alternating_series_rejects_large_argument():
    # z = t p^{alpha(1 - shell)} = 2^8 at shell -3
    with pytest.raises(DomainError):
        kernel_Z_alternating(KernelParams(2, 2.0, 1.0), -3)
    with pytest.raises(DomainError):
        kernel_Z_alternating(KernelParams(2, 2.0, 1.0), None)


def test_series_and_alternating_agree():
    for p, a, t, j in ((2, 2.0, 1.0, 1), (3, 1.5, 0.25, 0), (2, 0.8, 2.0, 3)):
        params = KernelParams(p, a, t)
        ev_s = kernel_Z_shell_series(params, j)
        ev_a = kernel_Z_alternating(params, j)
        assert abs(ev_s.value - ev_a.value) <= (
            ev_s.truncation_bound + ev_a.truncation_bound + 1e-15)


def test_coeff_ck_oracle_and_sign():
    params = KernelParams(2, 2.0, 1.0)
    assert coeff_ck(params, 0) == pytest.approx(
        math.exp(-1.0) - math.exp(-4.0), rel=1e-14)
    for k in range(-30, 10):
        assert coeff_ck(params, k) >= 0.0
    # underflow guard: enormous exponents give exactly 0
    assert coeff_ck(KernelParams(2, 2.0, 1.0), 2000) == 0.0


def test_linear_split_certificate():
    for p, a, k in ((2, 2.0, 3), (3, 1.5, 7)):
        slope, quad = linear_split_bound(p, a, k)
        for t in (1e-3, 0.1, 0.5, 2.0):
            c = coeff_ck(KernelParams(p, a, t), -k)
            assert abs(c - slope * t) <= quad * t * t * (1 + 1e-12)


@settings(max_examples=60)
@given(p=st.sampled_from([2, 3, 5]),
       a=st.floats(0.4, 3.0),
       t=st.floats(1e-3, 5.0),
       j=st.integers(-3, 6))
def test_kernel_scaling_identity(p, a, t, j):
    """Z(t, p^j) = p Z(p^alpha t, p^{j+1}), from substituting xi -> xi/p
    in the oscillatory integral."""
    lhs = kernel_Z_shell_series(KernelParams(p, a, t), j)
    rhs = kernel_Z_shell_series(KernelParams(p, a, t * float(p) ** a), j + 1)
    tol = lhs.truncation_bound + p * rhs.truncation_bound
    assert abs(lhs.value - p * rhs.value) <= tol + 1e-14 * abs(lhs.value) + 1e-18


def test_kernel_positivity_and_mass():
    for p, a, t in ((2, 2.0, 1.0), (3, 1.5, 0.1), (5, 0.6, 4.0)):
        params = KernelParams(p, a, t)
        assert kernel_Z(params, None).value > 0
        for j in range(-6, 8):
            assert kernel_Z(params, j).value > 0
        mass, bound = kernel_mass_estimate(params)
        assert abs(mass - 1.0) <= bound + 1e-10


def test_kernel_profile_matches_pointwise():
    params = KernelParams(2, 2.0, 0.5)
    prof = kernel_Z_profile(params, -4, 6)
    for j in (-4, 0, 3, 6):
        assert prof.value_at_shell(j).real == pytest.approx(
            kernel_Z(params, j).value, rel=1e-12)
    assert prof.value_at_zero.real == pytest.approx(
        kernel_Z(params, None).value, rel=1e-12)
    # far shells decay like |x|^{-alpha-1}
    ratio = prof.value_at_shell(6).real / prof.value_at_shell(5).real
    assert ratio == pytest.approx(2.0 ** (-3), rel=1e-2)


def test_ball_integral_monotone_to_one():
    params = KernelParams(2, 2.0, 1.0)
    vals = [ball_integral_of_Z(params, l)[0] for l in range(-3, 21)]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    # 1 - integral decays like p^{-l alpha}
    assert vals[-1] == pytest.approx(1.0, abs=1e-11)


def test_semigroup_expansion_mass_accounting():
    """Truncated expansion mass + deficit telescopes to the exact p^l."""
    p, l = 2, 1
    params = KernelParams(p, 2.0, 0.7)
    ball = Ball(PAdicExpansion.zero(p), l)
    for k_max in (l + 2, l + 6, l + 15):
        exp = semigroup_on_indicator(params, ball, k_max=k_max)
        assert exp.k_max == k_max
        mass = exp.function.integral().real
        assert mass + exp.mass_deficit == pytest.approx(float(p) ** l,
                                                        rel=1e-13)
        assert exp.mass_deficit == pytest.approx(
            float(p) ** l * (1 - math.exp(-0.7 * float(p) ** (-k_max * 2.0))),
            rel=1e-12)


def test_semigroup_expansion_value_vs_ball_integral():
    """S(t) 1_{B_0} at the center equals the ball integral of the kernel."""
    params = KernelParams(2, 2.0, 0.3)
    exp = semigroup_on_indicator(params, Ball(PAdicExpansion.zero(2), 0))
    direct, bound = ball_integral_of_Z(params, 0)
    assert abs(exp.function.value_at(Fraction(0)).real - direct) <= (
        exp.pointwise_bound + bound + 1e-14)


def test_semigroup_matrix_positive_and_column_stochastic():
    op = OperatorParams(2, 2.0, GridSpec(2, 1, 2))
    for T in (semigroup_matrix(op, 0.4),
              ball_semigroup_matrix(op, 0.4),
              ball_semigroup_expm(op, 0.4)):
        assert np.all(T > -1e-14)
    # the restricted flow conserves mass: columns sum to one
    TN = ball_semigroup_matrix(op, 0.4)
    assert np.allclose(TN.sum(axis=0), 1.0, atol=1e-12)
    assert np.allclose(TN, ball_semigroup_expm(op, 0.4), atol=1e-9)


def test_ball_kernel_needs_N():
    params = KernelParams(2, 2.0, 1.0)  # N unset
    with pytest.raises(DomainError):
        ball_c_coefficient(params)
    with pytest.raises(DomainError):
        ball_kernel_ZN(params, -4)
    with pytest.raises(DomainError):
        params.lam


def test_ball_kernel_mass_is_one():
    params = KernelParams(2, 2.0, 0.9, N=1)
    mass, bound = ball_kernel_mass_estimate(params)
    assert abs(mass - 1.0) <= bound + 1e-9


def test_ball_c_coefficient_short_time():
    params0 = KernelParams(2, 2.0, 0.0, N=0)
    c0, _ = ball_c_coefficient(params0)
    assert c0 == pytest.approx(0.0, abs=1e-15)
    # c(t) = O(t^2): halving t divides c by about four
    cs = [ball_c_coefficient(KernelParams(2, 2.0, t, N=0))[0]
          for t in (1e-2, 5e-3, 2.5e-3)]
    assert cs[0] / cs[1] == pytest.approx(4.0, rel=0.02)
    assert cs[1] / cs[2] == pytest.approx(4.0, rel=0.02)


def test_green_domain_guards():
    for bad_alpha in (1.0, 0.7):
        with pytest.raises(DomainError):
            green_kernel_value(2, bad_alpha, 1.0, 0)
        with pytest.raises(DomainError):
            green_zero_value(2, bad_alpha, 1.0)
        with pytest.raises(DomainError):
            green_tail_constant(2, bad_alpha, 1.0)
    with pytest.raises(DomainError):
        green_kernel_value(2, 2.0, 0.0, 0)


def test_green_tail_oracle():
    assert green_tail_constant(2, 2.0, 1.0) == pytest.approx(24 / 7)
    # far shells approach tail * p^{-k(alpha+1)}
    k = 14
    expected = green_tail_constant(2, 2.0, 1.0) * 2.0 ** (-3 * k)
    assert green_kernel_value(2, 2.0, 1.0, k) == pytest.approx(expected,
                                                               rel=1e-3)


def test_green_positive_decreasing():
    vals = [green_zero_value(3, 1.8, 0.5)]
    vals += [green_kernel_value(3, 1.8, 0.5, j) for j in range(-8, 9)]
    assert all(v > 0 for v in vals)
    assert all(b < a for a, b in zip(vals, vals[1:]))
    prof = green_profile(3, 1.8, 0.5, -2, 2)
    assert prof.value_at_shell(0).real == pytest.approx(
        green_kernel_value(3, 1.8, 0.5, 0))


def test_smoothness_modulus_decays():
    vals = [smoothness_modulus(2, 2.0, 1.0, r) for r in range(0, 8)]
    assert all(v > 0 for v in vals)
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_semigroup_matrix_agrees_with_testfunction_route():
    """Grid semigroup columns reproduce S(t) applied to coset indicators."""
    grid = GridSpec(2, 1, 1)
    op = OperatorParams(2, 2.0, grid)
    t = 0.6
    K = semigroup_matrix(op, t)
    params = KernelParams(2, 2.0, t)
    j = 2
    ball_j = Ball(grid.representative(j), -grid.M)
    exp = semigroup_on_indicator(params, ball_j, k_max=40)
    for i in range(grid.dim):
        want = exp.function.value_at(grid.representative(i).value).real
        assert K[i, j] == pytest.approx(want, abs=exp.pointwise_bound + 1e-10)

# gkwcert: validated spectral certificates for transfer operators.
#
# DISTRIBUTION STATEMENT A. Approved for public release. Distribution is unlimited.
#
# This material is based upon work supported by the Federal Aviation Administration under Air Force Contract No. FA8702-15-D-0001.
# Any opinions, findings, conclusions or recommendations expressed in this material are those of the author(s)
# and do not necessarily reflect the views of the Federal Aviation Administration.
#
# © 2023 Massachusetts Institute of Technology.
#
# Subject to FAR52.227-11 Patent Rights - Ownership by the contractor (May 2014)
#
# The software/firmware is provided to you on an As-Is basis
#
# Delivered to the U.S. Government with Unlimited Rights, as defined in DFARS Part 252.227-7013 or 7014 (Feb 2014).
# Notwithstanding any copyright notice, U.S. Government rights in this work are defined by DFARS 252.227-7013
# or DFARS 252.227-7014 as detailed above. Use of this work other than as specifically authorized by the
# U.S. Government may violate any copyrights that exist in this work.

import cmath
import random

from flint import arb, acb
from hypothesis import assume, given, settings as hypothesis_settings
from hypothesis import strategies as st
from pydantic import ValidationError
from pytest import raises

from gkwcert.dfly import (DEFAULT_STRONG_COLUMNS, DEFAULT_WEIGHTS, PERTURBATIONS, DFLYConditionFailed, DFLYConstants,
                          check_one_step, default_base, default_family, default_perturbation, dfly_constants,
                          dfly_convergence_suite, dfly_exclusion, dfly_iterate, dfly_iterate_on_range, growth_bound,
                          laurent_partial_sum, oracle_rk_minus_r, oracle_strong_resolvent, oracle_weak_resolvent,
                          rk_minus_r_bound, strong_from_weak, true_to_fine, weak_to_strong)
from gkwcert.utils import working_precision

SLACK = 1e-9

# small perturbations and points well outside the spectrum
families = st.builds(lambda k, scale, pattern: default_family(k, scale, pattern=pattern),
                     st.integers(min_value=8, max_value=16), st.integers(min_value=1, max_value=3),
                     st.sampled_from(PERTURBATIONS))
outer_points = st.builds(cmath.rect, st.floats(min_value=1.0, max_value=3.0),
                         st.floats(min_value=0, max_value=2*cmath.pi))

def toy_constants(**update) -> DFLYConstants:
    values = dict(a=arb("0.5"), b=arb(1), M=arb(1), E_sw=arb(1), E_k_ws=arb(6), delta_k=arb(0), mu=arb("0.75"))
    values.update(update)
    return DFLYConstants(**values)

def random_point(rng: random.Random, low: float, high: float) -> complex:
    return cmath.rect(rng.uniform(low, high), rng.uniform(0, 2*cmath.pi))

def test_iterates_and_derived_constants():
    with working_precision(128):
        c = toy_constants()
        a_n, b_n = dfly_iterate(c, 3)
        assert abs(a_n - arb("0.125")) < arb("1e-30")
        # 1/4 + 1/2 + 1
        assert abs(b_n - arb("1.75")) < arb("1e-30")
        assert abs(c.b_n(3) - b_n) < arb("1e-30")
        assert abs(dfly_iterate_on_range(c, 3) - arb("2.5")) < arb("1e-30")

        assert abs(c.C_star - 3) < arb("1e-30")
        assert c.q_bar > 0 and c.q_bar < 1
        assert c.N_k == 3

        assert abs(laurent_partial_sum(arb(2), arb(1), 3) - arb("0.875")) < arb("1e-30")

    with raises(ValueError):
        dfly_iterate(c, 0)

def test_constants_validation():
    with raises(ValidationError):
        toy_constants(mu=arb("0.2"))
    with raises(ValidationError):
        toy_constants(a=arb(0))
    with raises(ValueError):
        toy_constants(mu=None).q_bar
    with raises(ValueError):
        growth_bound(toy_constants(mu=None), arb(1))

def test_family_constants_hold_on_test_vectors():
    for k in range(1, 7):
        example = default_family(k)
        assert check_one_step(example)
        c = example.constants
        assert c.a < c.M
        assert c.delta_k > 0

    # an understated b is caught on e_0
    example = default_family(3)
    tampered = example.copy(update={'constants': example.constants.copy(update={'b': arb("0.01")})})
    assert not check_one_step(tampered)

    with raises(ValueError):
        default_family(0)
    with raises(ValueError):
        default_perturbation("upper")

def test_lower_perturbation_pattern():
    P = default_perturbation("lower")
    for i in range(4):
        for j in range(4):
            if i <= j:
                assert P[i, j] == 0
    example = default_family(2, pattern="lower")
    assert check_one_step(example)

def test_bridge_failures_carry_the_margin():
    c = default_family(4).constants
    with raises(DFLYConditionFailed) as info:
        weak_to_strong(acb(arb("0.1")), c, arb(1))
    assert not info.value.margin > 0
    with raises(DFLYConditionFailed):
        strong_from_weak(acb(arb("0.1")), c, arb(1))
    with raises(DFLYConditionFailed):
        true_to_fine(acb(arb("0.1")), 2, c, arb(1))
    with raises(ValueError):
        true_to_fine(acb(2), 0, c, arb(1))

def test_weak_to_strong_dominates_oracle():
    rng = random.Random(11)
    checked = 0
    for _ in range(200):
        example = default_family(rng.randint(1, 10))
        c = example.constants
        z = random_point(rng, 0.45, 3.0)
        Mk = oracle_weak_resolvent(example.L_k, z)*(1 + SLACK)
        with working_precision(128):
            try:
                bound = weak_to_strong(acb(z.real, z.imag), c, arb(Mk))
            except DFLYConditionFailed:
                continue
        checked += 1
        assert bound >= oracle_strong_resolvent(example.L, z, example.weights)*(1 - SLACK)
    assert checked >= 100

def test_strong_from_weak_dominates_oracle():
    rng = random.Random(12)
    checked = 0
    for _ in range(200):
        example = default_family(rng.randint(1, 10))
        z = random_point(rng, 0.45, 3.0)
        Mk = oracle_weak_resolvent(example.L_k, z)*(1 + SLACK)
        with working_precision(128):
            try:
                bound = strong_from_weak(acb(z.real, z.imag), example.constants, arb(Mk))
            except DFLYConditionFailed:
                continue
        checked += 1
        assert bound >= oracle_strong_resolvent(example.L_k, z, example.weights)*(1 - SLACK)
    assert checked >= 100

def test_rk_minus_r_dominates_oracle():
    rng = random.Random(13)
    for _ in range(150):
        example = default_family(rng.randint(1, 10))
        z = random_point(rng, 0.9, 3.0)
        Mk = oracle_weak_resolvent(example.L_k, z)*(1 + SLACK)
        Ks = oracle_strong_resolvent(example.L, z, example.weights)*(1 + SLACK)
        with working_precision(128):
            bound = rk_minus_r_bound(arb(Mk), example.constants.delta_k, arb(Ks))
        assert bound >= oracle_rk_minus_r(example.L, example.L_k, z, example.weights)*(1 - SLACK)

def test_true_to_fine_dominates_oracle_without_perturbation():
    # with L_k = L the truncated Laurent identity is exact
    rng = random.Random(14)
    L = default_base()
    with working_precision(128):
        c = dfly_constants([L], DEFAULT_WEIGHTS, DEFAULT_STRONG_COLUMNS, arb(0))
    for _ in range(150):
        z = random_point(rng, float(c.a.mid()) + 0.05, 3.0)
        N = rng.randint(1, 6)
        K = oracle_strong_resolvent(L, z, DEFAULT_WEIGHTS)*(1 + SLACK)
        with working_precision(128):
            bound = true_to_fine(acb(z.real, z.imag), N, c, arb(K))
        assert bound >= oracle_weak_resolvent(L, z)*(1 - SLACK)

@given(families, outer_points, st.integers(min_value=1, max_value=6))
@hypothesis_settings(max_examples=150, deadline=None)
def test_true_to_fine_dominates_oracle_with_perturbation(example, z, N):
    c = example.constants
    assert c.delta_k > 0
    K = oracle_strong_resolvent(example.L, z, example.weights)*(1 + SLACK)
    with working_precision(128):
        try:
            bound = true_to_fine(acb(z.real, z.imag), N, c, arb(K))
        except DFLYConditionFailed:
            assume(False)
    assert bound >= oracle_weak_resolvent(example.L_k, z)*(1 - SLACK)

def test_growth_bound_gate():
    c = default_family(6).constants
    with working_precision(128):
        assert growth_bound(c, arb(1)) > 0
        with raises(DFLYConditionFailed):
            growth_bound(c, arb(10)**6)

@given(families, outer_points)
@hypothesis_settings(max_examples=150, deadline=None)
def test_growth_bound_dominates_oracle(example, z):
    c = example.constants
    assert abs(z) >= c.mu
    K = oracle_strong_resolvent(example.L, z, example.weights)*(1 + SLACK)
    with working_precision(128):
        try:
            bound = growth_bound(c, arb(K))
        except DFLYConditionFailed:
            assume(False)
        assert bound >= oracle_weak_resolvent(example.L_k, z)*(1 - SLACK)

        # the closed form relaxes the damped Laurent bound at N = N_k
        assert bound >= true_to_fine(acb(z.real, z.imag), c.N_k, c, arb(K))*(1 - SLACK)

def test_exclusion_on_a_circle_through_the_spectrum():
    example = default_family(8)
    report = dfly_exclusion(example.constants, example.L_k, acb(arb("0.75")), arb("0.375"))
    assert not report.passed
    assert report.margin is None

def test_convergence_suite_eventually_passes():
    rows = dfly_convergence_suite(12)
    assert [r.k for r in rows] == list(range(1, 13))
    assert not rows[0].passed
    tail = rows[-4:]
    assert all(r.passed for r in tail)
    assert {r.multiplicity for r in tail} == {1}
    assert rows[-1].projector_diff < rows[0].projector_diff
    for earlier, later in zip(rows, rows[1:]):
        assert later.delta_k < earlier.delta_k

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

import pytest

from flint import arb, acb
from pytest import raises

from gkwcert.balls import BallMatrix
from gkwcert.certify import (MultiplicityAmbiguous, OperatorContext, SmallGainFailed, ThetaGateFailed, WindowOptions,
                             certify_window, certify_windows, coarse_fine_propagate, convergence_sweep, default_windows,
                             diagonal_inside, eigenvalue_enclosure, eigenvector_bound, finite_rank_resolvent,
                             gap_window, lift_resolvent, matrix_eigenvalue_ball, multiplicity_in_contour,
                             operator_context, origin_distance, projector_bound, propagate_window, small_gain,
                             spectrum_candidates)
from gkwcert.gkw import assemble_matrix, refine_operator_norm
from gkwcert.linalg import approx_schur, certify_schur, contour_resolvent_sup, lift_to_matrix_resolvent
from gkwcert.settings import prec_for_degree
from gkwcert.utils import working_precision

# first 19 digits of the Wirsing constant
LAMBDA_2 = arb("-0.3036630028987326585") + arb(0, 1e-18)

def diagonal_context(eps: str = "1e-12") -> OperatorContext:
    A = BallMatrix.diagonal([0.5, -0.25, 0.0625])
    Q, T = approx_schur(A, 128)
    schur = certify_schur(A, Q, T, 128)
    return OperatorContext(K=2, prec=128, eps_K=arb(eps), C=arb(1), A=A, schur=schur)

def test_resolvent_arithmetic():
    with working_precision(128):

        # 2 (1 + 10/0.5) + 1/0.5
        bound = finite_rank_resolvent(arb(2), arb(10), arb("0.5"))
        assert bound >= 44 and bound < arb("44.000001")
        with raises(SmallGainFailed):
            finite_rank_resolvent(arb(2), arb(10), arb(0))

        assert small_gain(arb("0.5"), arb(4)) >= 2
        with raises(ValueError):
            small_gain(arb(-1), arb(4))

        assert abs(coarse_fine_propagate(arb(10), arb("0.01")) - arb(100)/9) < arb("1e-20")
        with raises(SmallGainFailed):
            coarse_fine_propagate(arb(10), arb("0.2"))

        theta = projector_bound(arb("0.1"), arb("0.001"), arb(10))
        assert abs(theta - arb("0.01")/arb("0.99")) < arb("1e-20")
        with raises(SmallGainFailed):
            projector_bound(arb("0.1"), arb("0.2"), arb(10))

        assert abs(eigenvector_bound(arb("0.5")) - 2) < arb("1e-20")
        with raises(ThetaGateFailed):
            eigenvector_bound(arb(1))

        # the circle |z - 0.25| = 0.5 comes within 0.25 of the origin
        assert abs(origin_distance(acb(arb("0.25")), arb("0.5")) - arb("0.25")) < arb("1e-20")

def test_window_helpers():
    candidates = [acb(1), acb(arb("-0.3")), acb(arb("0.1")), acb(0)]
    windows = default_windows(candidates, 2, factor=1/3)
    center, rho = windows[0]
    assert abs(center - 1) < arb("1e-30")
    assert abs(rho - arb("0.3")) < arb("1e-12")
    with raises(ValueError):
        default_windows(candidates, 5)

    center, rho = gap_window(candidates, 1, factor=1/3)
    assert abs(center - arb("0.35")) < arb("1e-12")
    assert abs(rho - arb("0.25")/3) < arb("1e-12")
    with raises(ValueError):
        gap_window(candidates, 4)

    # decreasing modulus
    ctx = diagonal_context()
    ordered = spectrum_candidates(ctx.schur)
    assert [float(x.real.mid()) for x in ordered] == [0.5, -0.25, 0.0625]

def test_diagonal_inside():
    T = BallMatrix.diagonal([0.5, -0.25, 0.0625])
    assert diagonal_inside(T, acb(arb("0.5")), arb("0.1")) == [0]
    assert diagonal_inside(T, acb(0), arb(1)) == [0, 1, 2]

    # an entry exactly on the circle
    with raises(MultiplicityAmbiguous):
        diagonal_inside(T, acb(arb("0.25")), arb("0.25"))

def test_certify_window_simple_eigenvalue():
    ctx = diagonal_context()
    enclosure = certify_window(ctx, acb(arb("0.5")), arb("0.1"), index=1)
    assert enclosure.multiplicity == 1
    assert enclosure.simple
    assert enclosure.eigenvalue.contains(acb(arb("0.5")))
    assert enclosure.radius < 1e-9
    assert enclosure.alpha < arb("1e-9")
    assert enclosure.theta < arb("1e-9")
    assert enclosure.M_inf >= enclosure.M_op
    assert enclosure.contour.lifted
    assert not enclosure.propagated

def test_certify_window_empty_disc():
    ctx = diagonal_context()
    enclosure = certify_window(ctx, acb(arb("0.25")), arb("0.1"))
    assert enclosure.multiplicity == 0
    assert not enclosure.simple
    assert enclosure.eigenvalue is None
    assert enclosure.theta is None

def test_certify_window_gates():
    # circles around the origin are never counted
    with raises(MultiplicityAmbiguous):
        certify_window(diagonal_context(), acb(arb("0.0625")), arb("0.1"))

    # a larger budget breaks the projector gate first
    ctx = diagonal_context("0.02")
    with raises(ThetaGateFailed) as info:
        certify_window(ctx, acb(arb("0.5")), arb("0.1"))
    assert info.value.gate == "theta"
    assert not info.value.theta < 1

    # isolation still holds without the projector
    enclosure = certify_window(ctx, acb(arb("0.5")), arb("0.1"), WindowOptions(require_projector=False))
    assert enclosure.multiplicity == 1
    assert enclosure.theta is None
    assert enclosure.eigenvalue.contains(acb(arb("0.5")))

    # and an even larger one breaks the small-gain condition
    with raises(SmallGainFailed) as info:
        certify_window(diagonal_context("0.05"), acb(arb("0.5")), arb("0.1"))
    assert info.value.gate == "alpha"

def test_lift_and_enclose():
    with working_precision(128):
        assert abs(lift_resolvent(arb(10), arb("0.5")) - 20) < arb("1e-20")
        with raises(SmallGainFailed):
            lift_resolvent(arb(10), arb(1))

        # (eps (1 + theta) + 2 C theta)/(1 - theta) ~ 3e-10
        enclosure = eigenvalue_enclosure(acb(arb("0.5")), arb("1e-10"), arb(1), arb("1e-10"))
        assert enclosure.real.contains(arb("0.5"))
        assert enclosure.imag.contains(0)
        assert enclosure.real.rad() > arb("2.9999e-10") and enclosure.real.rad() < arb("3.0001e-10")
        with raises(ThetaGateFailed):
            eigenvalue_enclosure(acb(arb("0.5")), arb("1e-10"), arb(1), arb(1))

        # theta = 0.1 e M_S^2/(1 - e M_S) ~ 1e-11, radius ~ e + 2 theta
        ball = matrix_eigenvalue_ball(acb(arb("0.5")), arb("1e-12"), arb(10), arb("0.1"), arb(1))
        assert ball.real.contains(arb("0.5"))
        assert ball.real.rad() < arb("2.2e-11")
        for e in ["0.2", "0.05"]:
            with raises(ThetaGateFailed):
                matrix_eigenvalue_ball(acb(arb("0.5")), arb(e), arb(10), arb("0.1"), arb(1))

def test_multiplicity_in_contour():
    schur = diagonal_context().schur
    contour = contour_resolvent_sup(schur.T, acb(arb("0.5")), arb("0.1"), prec=128)

    # counting needs the matrix-level contour and a small gain
    with raises(ValueError):
        multiplicity_in_contour(schur, contour, arb("1e-10"))
    lifted = lift_to_matrix_resolvent(schur, contour)
    with raises(SmallGainFailed):
        multiplicity_in_contour(schur, lifted, arb(1))
    assert multiplicity_in_contour(schur, lifted, arb("1e-10")) == 1

    around_origin = lift_to_matrix_resolvent(schur, contour_resolvent_sup(schur.T, acb(arb("0.0625")), arb("0.1"),
                                                                          prec=128))
    with raises(MultiplicityAmbiguous):
        multiplicity_in_contour(schur, around_origin, arb("1e-10"))

def test_operator_context_checks_schur_size():
    matrix = assemble_matrix(4, 128)
    with raises(ValueError):
        operator_context(matrix, arb(11), diagonal_context().schur)

    ctx = operator_context(matrix, arb(11))
    assert ctx.K == 4
    assert ctx.schur.size == 5
    assert ctx.c2.contains(11)

    # the refined norm of L_4 undercuts a loose c2
    assert ctx.C >= 1 and ctx.C < 11
    assert ctx.C.contains(refine_operator_norm(ctx.schur.C_A, 4, 128).upper())

def test_convergence_sweep_reports_failures():
    # a circle around the origin can never be certified
    assert convergence_sweep([4], acb(arb("0.05")), arb("0.1"), prec=128, c2=arb(11)) == [(4, False)]

@pytest.mark.slow
def test_leading_eigenvalues_at_k48():
    ctx = operator_context(assemble_matrix(48, prec_for_degree(48)))
    windows = default_windows(spectrum_candidates(ctx.schur), 5)
    enclosures = certify_windows(ctx, windows, WindowOptions(require_projector=False))

    assert [e.index for e in enclosures] == [1, 2, 3, 4, 5]
    for enclosure in enclosures:
        assert enclosure.multiplicity == 1
        assert enclosure.alpha < 1
    assert enclosures[0].eigenvalue.contains(acb(1))
    assert enclosures[1].eigenvalue.real.overlaps(LAMBDA_2)

    # nothing between lambda_2 and lambda_3
    center, rho = gap_window(spectrum_candidates(ctx.schur), 2)
    assert certify_window(ctx, center, rho).multiplicity == 0

@pytest.mark.slow
def test_propagation_to_a_finer_level():
    coarse_ctx = operator_context(assemble_matrix(48, prec_for_degree(48)))
    center, rho = default_windows(spectrum_candidates(coarse_ctx.schur), 2)[1]
    coarse = certify_window(coarse_ctx, center, rho, WindowOptions(require_projector=False), index=2)

    fine_ctx = operator_context(assemble_matrix(96, prec_for_degree(96)))
    fine = propagate_window(coarse, coarse_ctx, fine_ctx)
    assert fine.propagated
    assert fine.K == 96
    assert fine.multiplicity == 1
    assert fine.M_op >= coarse.M_op
    assert fine.theta < 1
    assert fine.eigenvalue.real.overlaps(LAMBDA_2)

    with raises(ValueError):
        propagate_window(fine, fine_ctx, coarse_ctx)

@pytest.mark.slow
def test_second_eigenvalue_at_k128():
    ctx = operator_context(assemble_matrix(128, 512))
    center, rho = default_windows(spectrum_candidates(ctx.schur), 2)[1]
    enclosure = certify_window(ctx, center, rho, index=2)
    assert enclosure.multiplicity == 1
    assert enclosure.eigenvalue.real.overlaps(LAMBDA_2)
    assert enclosure.eigenvalue.imag.contains(0)
    assert enclosure.radius < 1e-10
    assert abs(enclosure.eigenvalue.real.mid() - LAMBDA_2.mid()) < 1e-10

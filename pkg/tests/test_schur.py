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

import random

import numpy as np

from flint import arb
from pytest import raises

from gkwcert.balls import BallMatrix, FloatMatrix, DimensionError
from gkwcert.linalg import NotOrthogonalError, approx_schur, certify_schur, approx_ordschur, certify_ordschur
from gkwcert.utils import working_precision

def random_matrix(rng: random.Random, n: int, complex_entries: bool = False) -> FloatMatrix:
    if complex_entries:
        values = [[complex(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(n)] for _ in range(n)]
    else:
        values = [[rng.gauss(0, 1) for _ in range(n)] for _ in range(n)]
    return FloatMatrix(np.array(values, dtype=complex))

def is_upper_triangular(T: BallMatrix) -> bool:
    return all(T[i, j] == 0 for i in range(T.rows) for j in range(i))

def test_schur_certificate_random_matrices():
    rng = random.Random(11)
    for trial in range(20):
        n = rng.randint(2, 8)
        A = random_matrix(rng, n, complex_entries=trial % 2 == 1)
        Q, T = approx_schur(A, 128)
        cert = certify_schur(A, Q, T, 128)

        # the certificate is tight at 128 bits
        assert is_upper_triangular(cert.T)
        assert cert.delta < arb("1e-25")
        assert cert.normE < arb("1e-25")
        assert cert.kappaQ < arb("1.000001")

        # diagonal of T ordered by decreasing modulus and matching the eigenvalues
        moduli = [float(abs(t).mid()) for t in cert.T.diag()]
        assert all(moduli[i] >= moduli[i + 1] - 1e-12 for i in range(n - 1))
        expected = sorted(np.abs(np.linalg.eigvals(A.to_numpy())), reverse=True)
        assert np.allclose(moduli, expected, rtol=1e-8, atol=1e-10)

def test_schur_of_triangular_input_is_trivial():
    T = FloatMatrix(np.array([[2.0, 1.0, 0.5], [0.0, -1.0, 3.0], [0.0, 0.0, 0.25]]))
    Q, T_hat = approx_schur(T, 128)
    assert Q.contains(BallMatrix.identity(3))
    cert = certify_schur(T, Q, T_hat, 128)
    assert cert.normE == 0
    assert cert.delta == 0

def test_schur_certificate_rejects_bad_candidates():
    A = FloatMatrix(np.array([[1.0, 2.0], [3.0, 4.0]]))
    Q, T = approx_schur(A, 128)

    # a scaled Q is not close to unitary
    with raises(NotOrthogonalError):
        certify_schur(A, FloatMatrix(Q*2), T, 128)

    # shapes must agree
    with raises(DimensionError):
        certify_schur(A, FloatMatrix(BallMatrix.identity(3)), T, 128)
    with raises(DimensionError):
        approx_schur(BallMatrix([[1, 2, 3], [4, 5, 6]]), 128)

def test_schur_residual_reflects_ball_radius():
    # a radius on A shows up in r_sch, never hidden by the candidate
    with working_precision(128):
        A = BallMatrix([[arb(1, 1e-10), arb(2)], [arb(3), arb(4)]])
        Q, T = approx_schur(A, 128)
        cert = certify_schur(A, Q, T, 128)
        assert cert.r_sch > arb("5e-11")

def test_ordschur_moves_selection_to_front():
    rng = random.Random(5)
    A = random_matrix(rng, 6, complex_entries=True)
    Q, T = approx_schur(A, 128)
    diagonal = T.diag()

    for index in range(6):
        U_hat, T_tilde = approx_ordschur(T, [index], 128)
        cert = certify_ordschur(T, [index], U_hat, T_tilde, 128)

        # the selected eigenvalue leads, the rest stay upper triangular
        with working_precision(128):
            assert abs(cert.T_tilde[0, 0] - diagonal[index]) < arb("1e-25")
        assert is_upper_triangular(cert.T_tilde)
        assert cert.delta_U < arb("1e-25")
        assert cert.normE_ord < arb("1e-25")

def test_ordschur_leading_selection_is_identity():
    T = FloatMatrix(np.array([[3.0, 1.0], [0.0, 1.0]]))
    U_hat, T_tilde = approx_ordschur(T, [0], 128)
    assert U_hat.contains(BallMatrix.identity(2))
    assert T_tilde.contains(T)

    with raises(IndexError):
        approx_ordschur(T, [2], 128)

def test_ordschur_swap_of_a_two_by_two_block():
    T = FloatMatrix(np.array([[3.0, 1.0], [0.0, 1.0]]))
    U_hat, T_tilde = approx_ordschur(T, [1], 128)
    cert = certify_ordschur(T, [1], U_hat, T_tilde, 128)
    with working_precision(128):
        assert abs(cert.T_tilde[0, 0] - 1) < arb("1e-30")
        assert abs(cert.T_tilde[1, 1] - 3) < arb("1e-30")
        assert cert.normE_ord < arb("1e-30")

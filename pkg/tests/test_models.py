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

import json

from flint import arb, acb
from pydantic import ValidationError
from pytest import raises

from gkwcert.balls import BallMatrix
from gkwcert.certify import EigenEnclosure, OperatorContext, certify_window
from gkwcert.gkw import GKWMatrix, assemble_matrix
from gkwcert.linalg import SchurCertificate, approx_schur, certify_schur

def test_enclosure_json_keeps_containment():
    A = BallMatrix.diagonal([0.5, -0.25, 0.0625])
    Q, T = approx_schur(A, 128)
    ctx = OperatorContext(K=2, prec=128, eps_K=arb("1e-12"), C=arb(1), A=A, schur=certify_schur(A, Q, T, 128))
    enclosure = certify_window(ctx, acb(arb("0.5")), arb("0.1"), index=1)

    parsed = EigenEnclosure.parse_raw(enclosure.json())
    assert parsed.multiplicity == enclosure.multiplicity
    assert parsed.eigenvalue.contains(enclosure.eigenvalue)
    assert parsed.theta.contains(enclosure.theta)
    assert parsed.contour.M_T.contains(enclosure.contour.M_T)
    assert parsed.contour.lifted

def test_matrix_and_schur_json():
    matrix = assemble_matrix(6, 128)
    parsed = GKWMatrix.parse_raw(matrix.json())
    assert parsed.K == 6
    assert parsed.A.contains(matrix.A)
    assert parsed.c2.contains(matrix.c2)
    assert parsed.eps_K.contains(matrix.eps_K)

    # matrices built by hand carry no header
    bare = GKWMatrix.parse_raw(matrix.json(exclude={'c2', 'eps_K'}))
    assert bare.c2 is None and bare.eps_K is None

def test_schur_certificate_reloads_exactly():
    matrix = assemble_matrix(6, 256)
    Q, T = approx_schur(matrix.A, 256)
    schur = certify_schur(matrix.A, Q, T, 256)
    text = schur.json()

    # parsed at the ambient precision, the candidates come back bit for bit
    again = SchurCertificate.parse_raw(text)
    assert again.T.contains(schur.T) and schur.T.contains(again.T)
    assert again.Q.contains(schur.Q) and schur.Q.contains(again.Q)
    assert again.T.max_radius() == 0
    for name in ['delta', 'r_sch', 'C_A', 'kappaQ', 'normE']:
        assert getattr(again, name).contains(getattr(schur, name))
    assert again.r_sch.rad() <= schur.r_sch*arb("1e-40")

    # rounded candidates would invalidate the stored defects
    tampered = json.loads(text)
    tampered['T'] = schur.T.to_strings()
    with raises(ValidationError):
        SchurCertificate.parse_obj(tampered)

def test_models_are_immutable_and_checked():
    matrix = assemble_matrix(2, 128)
    with raises(TypeError):
        matrix.K = 3
    with raises(ValidationError):
        GKWMatrix(K=1, prec=64, A=5)
    with raises(ValidationError):
        GKWMatrix(K=1, prec=64, A=[["[1 +/- 0.1]", "oops"]])

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

from typing import List

import numpy as np

from flint import arb, acb

from . import NotOrthogonalError
from ..balls import (BallMatrix, FloatMatrix, DimensionError, abs_lower, abs_upper, interval, lower_min, norm2_upper,
                     identity_defect)
from ..utils import working_precision

def svd_enclosure(A: BallMatrix, U: FloatMatrix, V: FloatMatrix, prec: int = None) -> List[arb]:
    """Intervals containing the singular values of every matrix in A.

    With U*AV = D + E (D diagonal) and |I - U*U| <= alpha, |I - V*V| <= beta,
    some permutation of the singular values lies in
    [(|d_i| - |E|)/sqrt((1+alpha)(1+beta)), (|d_i| + |E|)/sqrt((1-alpha)(1-beta))].
    """
    if A.rows != A.cols or U.shape != A.shape or V.shape != A.shape:
        raise DimensionError(f"svd candidates {U.shape}, {V.shape} do not match {A.shape}")

    def run():
        Ub, Vb = U.as_ball(), V.as_ball()
        alpha = norm2_upper(identity_defect(Ub))
        beta = norm2_upper(identity_defect(Vb))
        if not (alpha < 1 and beta < 1):
            raise NotOrthogonalError(f"singular vector candidates not orthogonal enough: alpha={alpha}, beta={beta}")
        M = Ub.adjoint()*A*Vb
        d = M.diag()
        E = M - BallMatrix.diagonal(d)
        normE = norm2_upper(E)
        shrink = ((1 + alpha)*(1 + beta)).sqrt()
        grow = ((1 - alpha)*(1 - beta)).sqrt()
        bounds = []
        for d_i in d:
            lo = ((abs_lower(d_i) - normE)/shrink).lower()
            hi = ((abs_upper(d_i) + normE)/grow).upper()
            bounds.append(interval(lo if lo > 0 else arb(0), hi))
        return bounds

    if prec is None:
        return run()
    with working_precision(prec):
        return run()

def sigmin_lower(T: BallMatrix, z: acb, prec: int = None) -> arb:
    """Certified lower bound on sigma_min(zI - T), clamped at 0."""
    def run():
        B = BallMatrix.diagonal([z]*T.rows) - T
        u, _, vh = np.linalg.svd(B.to_numpy())
        bounds = svd_enclosure(B, FloatMatrix(u), FloatMatrix(vh.conj().T))
        low = lower_min(*bounds)
        return low if low > 0 else arb(0)

    if prec is None:
        return run()
    with working_precision(prec):
        return run()

def block_sigmin_lower(T: BallMatrix, split: int, c12: arb, z: acb, prec: int = None, block_prec: int = None) -> arb:
    """min(sigma_min(zI - T11), sigma_min(zI - T22)) - c12, possibly negative.

    The leading k x k block may be bounded at a higher precision than the bulk.
    """
    n = T.rows
    if not 1 <= split < n:
        raise ValueError(f"split {split} must lie in [1, {n - 1}]")
    head = sigmin_lower(T.submatrix(0, split, 0, split), z, block_prec or prec)
    bulk = sigmin_lower(T.submatrix(split, n, split, n), z, prec)
    low = head if head < bulk else bulk
    return (low - c12).lower()

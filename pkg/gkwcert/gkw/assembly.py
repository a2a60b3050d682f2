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

from math import comb
from typing import List, Optional

from flint import arb, acb, acb_mat

from . import logger, PrecisionExhausted
from .constants import best_c2, truncation_budget
from .zeta import hurwitz_zeta
from ..balls import BallMatrix, vector_norm_upper
from ..models.domain import CertificateModel, _ball_validator, _matrix_validator
from ..utils import parallel_map, working_precision

class GKWMatrix(CertificateModel):
    """Discretization A_K in the shifted monomial basis (w-1)^j, j = 0..K.

    c2 and eps_K record the norm bound and the truncation budget the
    matrix was assembled with.
    """
    K: int
    prec: int
    A: BallMatrix
    c2: Optional[arb] = None
    eps_K: Optional[arb] = None

    _balls = _ball_validator('c2', 'eps_K')
    _matrix = _matrix_validator('A')

def _column(k: int, K: int, zetas: List[arb]) -> List[arb]:
    # Taylor coefficients at w=1 of sum_n (w+n)^-2 ((w+n)^-1 - 1)^k, all orders l <= K
    column = []
    for l in range(K + 1):
        entry = arb(0)
        for i in range(k + 1):
            s = k + 2 - i
            weight = comb(k, i)*comb(s + l - 1, l)
            if (i + l) % 2:
                weight = -weight
            entry += weight*zetas[s + l]
        column.append(entry)
    return column

def assemble_matrix(K: int, prec: int) -> GKWMatrix:
    """Ball enclosure of the (K+1)x(K+1) GKW matrix at `prec` bits.

    Entry (l, k) = sum_i (-1)^(i+l) C(k,i) C(s_i+l-1, l) zeta(s_i+l, 2) with
    s_i = k+2-i. Columns are independent and assembled in parallel.
    """
    if K < 0:
        raise ValueError("truncation degree must be nonnegative")
    if prec < 64:
        raise PrecisionExhausted(f"assembly needs at least 64 bits, got {prec}")

    with working_precision(prec):
        zetas = [None, None] + [hurwitz_zeta(s, 2, prec) for s in range(2, 2*K + 3)]
        columns = parallel_map(lambda k: _column(k, K, zetas), range(K + 1), "gkw_assembly")

        mat = acb_mat(K + 1, K + 1)
        for k, column in enumerate(columns):
            for l, entry in enumerate(column):
                mat[l, k] = acb(entry)
        A = BallMatrix(mat)

        ceiling = arb(2)**(-(prec//2))
        worst = A.max_radius()
        if worst > ceiling:
            raise PrecisionExhausted(f"entry radius {worst} exceeds 2^-{prec//2} at K={K}, prec={prec}")
    c2 = best_c2(prec)
    budget = truncation_budget(K, c2, prec)
    logger.info(f"assembled GKW matrix K={K} at {prec} bits, max radius {worst}, eps_K {budget.eps_K}")
    return GKWMatrix(K=K, prec=prec, A=A, c2=c2, eps_K=budget.eps_K)

def gauss_density_coefficients(K: int, prec: int) -> List[arb]:
    """Coefficients of (1/ln 2)/(1+x) in powers of (x-1), degrees 0..K."""
    with working_precision(prec):
        scale = 1/arb(2).log()
        return [(-1)**j*scale/arb(2)**(j + 1) for j in range(K + 1)]

def density_residual(matrix: GKWMatrix) -> arb:
    """Certified |A_K h - h| for the truncated invariant density h."""
    with working_precision(matrix.prec):
        h = BallMatrix.column(gauss_density_coefficients(matrix.K, matrix.prec))
        return vector_norm_upper((matrix.A*h - h).col(0))

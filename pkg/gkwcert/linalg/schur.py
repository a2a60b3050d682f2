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

from typing import List, Sequence, Tuple

from flint import arb, acb, acb_mat

from . import logger, SchurConvergenceError, NotOrthogonalError
from ..balls import BallMatrix, FloatMatrix, DimensionError, norm2_upper, identity_defect
from ..models.domain import CertificateModel, _ball_validator, _float_matrix_validator
from ..utils import working_precision, current_precision

class SchurCertificate(CertificateModel):
    """Approximate Schur pair (Q, T) of a ball matrix A with certified defects.

    normE bounds |A - Q T Q*|, kappaQ bounds the condition number of Q.
    """
    Q: FloatMatrix
    T: FloatMatrix
    delta: arb
    r_sch: arb
    C_A: arb
    kappaQ: arb
    normE: arb
    prec: int

    _balls = _ball_validator('delta', 'r_sch', 'C_A', 'kappaQ', 'normE')
    _matrices = _float_matrix_validator('Q', 'T')

    @property
    def size(self) -> int:
        return self.T.rows

class OrdschurCertificate(CertificateModel):
    """Reordering T Û ≈ Û T̃ that moves `selection` to the leading diagonal block."""
    selection: List[int]
    U_hat: FloatMatrix
    T_tilde: FloatMatrix
    delta_ord: arb
    delta_U: arb
    normE_ord: arb

    _balls = _ball_validator('delta_ord', 'delta_U', 'normE_ord')
    _matrices = _float_matrix_validator('U_hat', 'T_tilde')

def _is_upper_triangular(A: BallMatrix) -> bool:
    return all(A[i, j] == 0 for i in range(A.rows) for j in range(min(i, A.cols)))

def _sort_key(value: acb) -> Tuple[float, float, float]:
    return (-float(abs(value).mid()), -float(value.real.mid()), -float(value.imag.mid()))

def _normalized_phase(column: List[acb]) -> List[acb]:
    # largest entry becomes real positive
    pivot = max(column, key=lambda x: float(abs(x).mid()))
    size = abs(pivot)
    if not size > 0:
        return column
    phase = (pivot/size).conjugate()
    return [(x*phase).mid() for x in column]

def _orthonormalize(columns: List[List[acb]], n: int) -> acb_mat:
    """Gram-Schmidt with one reorthogonalization pass.

    Columns that lose too much norm are replaced by the first unused unit
    vector, so the result always spans C^n.
    """
    basis = acb_mat(n, n)
    basis_h = acb_mat(n, n)
    tolerance = arb(2)**(-(current_precision()//4))
    spare = iter(range(n))
    filled = 0

    def project_out(v: acb_mat) -> acb_mat:
        for _ in range(2):
            v = v - basis*(basis_h*v)
        return v

    def accept(v: acb_mat, scale: arb) -> bool:
        nonlocal filled
        norm = sum((abs(v[i, 0])**2 for i in range(n)), arb(0)).sqrt()
        if not norm > tolerance*scale:
            return False
        for i in range(n):
            q = (v[i, 0]/norm).mid()
            basis[i, filled] = q
            basis_h[filled, i] = q.conjugate()
        filled += 1
        return True

    for column in columns:
        if filled == n:
            break
        v = acb_mat([[x] for x in column])
        scale = sum((abs(x)**2 for x in column), arb(0)).sqrt()
        if accept(project_out(v), scale):
            continue
        logger.debug(f"schur basis column {filled} is rank deficient, filling from unit vectors")
        for k in spare:
            unit = acb_mat(n, 1)
            unit[k, 0] = 1
            if accept(project_out(unit), arb(1)):
                break
    if filled < n:
        raise SchurConvergenceError(f"could only build {filled} of {n} orthonormal columns")
    return basis

def approx_schur(A: BallMatrix, prec: int) -> Tuple[FloatMatrix, FloatMatrix]:
    """Unvalidated Schur candidate of the midpoint matrix of A.

    Eigenvectors are sorted by decreasing modulus, orthonormalized and used
    to triangularize; the strict lower triangle of the result is dropped and
    only shows up later in the certified residual.
    """
    if A.rows != A.cols:
        raise DimensionError("Schur decomposition needs a square matrix")
    n = A.rows
    with working_precision(prec):
        M = A.mid()
        if _is_upper_triangular(M):
            return FloatMatrix(BallMatrix.identity(n)), FloatMatrix(M)

        try:
            values, vectors = M.to_acb_mat().eig(right=True, algorithm="approx")
        except (ValueError, ZeroDivisionError) as e:
            raise SchurConvergenceError(f"eigenvalue iteration failed at {prec} bits: {e}")
        if not all(x.is_finite() for x in values):
            raise SchurConvergenceError(f"eigenvalue iteration did not converge at {prec} bits")

        order = sorted(range(n), key=lambda j: _sort_key(values[j]))
        columns = [_normalized_phase([vectors[i, j] for i in range(n)]) for j in order]
        Q = BallMatrix(_orthonormalize(columns, n))
        T = (Q.adjoint()*M*Q).mid().upper_triangular()
    logger.debug(f"approximate Schur form of a {n}x{n} matrix at {prec} bits")
    return FloatMatrix(Q), FloatMatrix(T)

def certify_schur(A: BallMatrix, Q: FloatMatrix, T: FloatMatrix, prec: int = None) -> SchurCertificate:
    if not (A.shape == Q.shape == T.shape and A.rows == A.cols):
        raise DimensionError(f"Schur pair shapes {Q.shape}, {T.shape} do not match A {A.shape}")
    prec = prec or current_precision()
    with working_precision(prec):
        T = FloatMatrix(T.upper_triangular())
        Qb = Q.as_ball()
        delta = norm2_upper(identity_defect(Qb))
        if not delta < 1:
            raise NotOrthogonalError(f"candidate Q too far from unitary: |I - Q*Q| <= {delta}")
        r_sch = norm2_upper(A*Qb - Qb*T.as_ball())
        C_A = norm2_upper(A)
        normE = (r_sch*(1 + delta).sqrt() + C_A*delta).upper()
        kappaQ = ((1 + delta)/(1 - delta)).sqrt().upper()
    logger.info(f"Schur certificate n={A.rows}: delta={delta}, r_sch={r_sch}, |E|<={normE}")
    return SchurCertificate(Q=Q, T=T, delta=delta, r_sch=r_sch, C_A=C_A, kappaQ=kappaQ, normE=normE, prec=prec)

def _swap_adjacent(T: acb_mat, U: acb_mat, k: int):
    """Exchange the diagonal entries k and k+1 of the triangular T in place."""
    n = T.nrows()
    a, b, c = T[k, k], T[k, k + 1], T[k + 1, k + 1]
    x1, x2 = b, c - a
    norm = (abs(x1)**2 + abs(x2)**2).sqrt()
    if not norm > 0:
        return
    g1, g2 = (x1/norm).mid(), (x2/norm).mid()
    h1, h2 = g1.conjugate(), g2.conjugate()
    # G = [[g1, -conj g2], [g2, conj g1]], T <- G* T G, U <- U G
    for j in range(n):
        top, bottom = T[k, j], T[k + 1, j]
        T[k, j] = (h1*top + h2*bottom).mid()
        T[k + 1, j] = (-g2*top + g1*bottom).mid()
    for M in (T, U):
        for i in range(n):
            left, right = M[i, k], M[i, k + 1]
            M[i, k] = (left*g1 + right*g2).mid()
            M[i, k + 1] = (-left*h2 + right*h1).mid()
    T[k + 1, k] = 0

def approx_ordschur(T: FloatMatrix, selection: Sequence[int], prec: int) -> Tuple[FloatMatrix, FloatMatrix]:
    """Candidate unitary Û with Û* T Û upper triangular and the selected
    diagonal entries leading, in their original relative order."""
    n = T.rows
    selection = sorted(set(selection))
    if any(not 0 <= s < n for s in selection):
        raise IndexError(f"selection {selection} outside a {n}x{n} matrix")
    if selection == list(range(len(selection))):
        return FloatMatrix(BallMatrix.identity(n)), T

    with working_precision(prec):
        Tm = T.upper_triangular().to_acb_mat()
        U = BallMatrix.identity(n).to_acb_mat()
        for target, source in enumerate(selection):
            for k in range(source - 1, target - 1, -1):
                _swap_adjacent(Tm, U, k)
        T_tilde = BallMatrix(Tm).upper_triangular()
    return FloatMatrix(BallMatrix(U)), FloatMatrix(T_tilde)

def certify_ordschur(T: FloatMatrix, selection: Sequence[int], U_hat: FloatMatrix, T_tilde: FloatMatrix,
                     prec: int = None) -> OrdschurCertificate:
    if not T.shape == U_hat.shape == T_tilde.shape:
        raise DimensionError("reordering candidates do not match T")
    with working_precision(prec or current_precision()):
        T_tilde = FloatMatrix(T_tilde.upper_triangular())
        U = U_hat.as_ball()
        delta_U = norm2_upper(identity_defect(U))
        if not delta_U < 1:
            raise NotOrthogonalError(f"reordering Û too far from unitary: |I - Û*Û| <= {delta_U}")
        delta_ord = norm2_upper(T.as_ball()*U - U*T_tilde.as_ball())
        normE_ord = (delta_ord/(1 - delta_U).sqrt()).upper()
    return OrdschurCertificate(selection=sorted(set(selection)), U_hat=U_hat, T_tilde=T_tilde,
                               delta_ord=delta_ord, delta_U=delta_U, normE_ord=normE_ord)

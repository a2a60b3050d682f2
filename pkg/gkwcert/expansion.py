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

import logging

from typing import List, NamedTuple, Optional, Sequence, Tuple

from flint import arb, acb, acb_mat

from .balls import BallMatrix, to_ball, abs_upper, norm2_upper, vector_norm_upper, identity_defect
from .certify import (OperatorContext, EigenEnclosure, MultiplicityAmbiguous, diagonal_inside, finite_rank_resolvent,
                      lift_resolvent, schur_similarity_defect, small_gain, spectrum_candidates)
from .linalg import (SchurCertificate, OrdschurCertificate, SingularPivotError, approx_ordschur, certify_ordschur,
                     contour_resolvent_sup, lift_to_matrix_resolvent, projector_error_decomposition)
from .models.domain import CertificateModel, _ball_validator, _complex_validator, _matrix_validator
from .utils import working_precision

logger = logging.getLogger(__name__)

class ExpansionCertificate(CertificateModel):
    """Certified data for L^n 1 = sum_j lambda_j^n P_j 1 + R_N(n).

    coeffs are the dual coefficients l_j(1) widened by the mode errors;
    raw_coeffs pair exactly with evec_columns, and |P_j 1 - raw_j v_j| <= mode_errors[j].
    |R_N(n)| <= rho_sep^(n+1) * tail_constant <= rho_sep^(n+1) * M_inf_sep * qnorm.
    """
    N: int
    K: int
    prec: int
    lambdas: List[acb]
    coeffs: List[acb]
    raw_coeffs: List[acb]
    mode_errors: List[arb]
    residuals: List[arb]
    evec_columns: BallMatrix
    rho_sep: arb
    M_inf_sep: arb
    qnorm: arb
    tail_constant: arb
    projector_defects: List[Optional[arb]] = []

    _complex = _complex_validator('lambdas', 'coeffs', 'raw_coeffs')
    _balls = _ball_validator('mode_errors', 'residuals', 'rho_sep', 'M_inf_sep', 'qnorm', 'tail_constant',
                             'projector_defects')
    _matrix = _matrix_validator('evec_columns')

class _Mode(NamedTuple):
    W: BallMatrix
    vector: List[acb]
    coeff: acb
    y: List[acb]

def left_eigenvector_tail(T_tilde: BallMatrix) -> List[acb]:
    """Row y with y (T22 - lambda) = t12 for lambda = T_tilde[0, 0], by forward substitution.

    [1, -y] is then the left eigenvector normalized against e_0.
    """
    lam = T_tilde[0, 0]
    n = T_tilde.rows
    y = []
    for k in range(1, n):
        pivot = T_tilde[k, k] - lam
        if not abs(pivot) > 0:
            raise SingularPivotError(f"pivot {k} of the shifted triangular block contains 0")
        s = T_tilde[0, k]
        for i in range(1, k):
            s -= y[i - 1]*T_tilde[i, k]
        y.append(s/pivot)
    return y

def _mode(schur: SchurCertificate, ordered: OrdschurCertificate) -> _Mode:
    W = schur.Q.as_ball()*ordered.U_hat.as_ball()
    vector = W.col(0)
    # sign convention: the eigenvector's value at x = 1 has nonnegative real part
    if vector[0].real.mid() < 0:
        vector = [-x for x in vector]
        sign = -1
    else:
        sign = 1
    q = [x.conjugate() for x in W.row(0)]
    y = left_eigenvector_tail(ordered.T_tilde)
    coeff = q[0]
    for k, y_k in enumerate(y):
        coeff -= y_k*q[k + 1]
    return _Mode(W=W, vector=vector, coeff=sign*coeff, y=y)

def spectral_coefficient(schur: SchurCertificate, ordered: OrdschurCertificate, mode_error: arb = None) -> acb:
    """l(1) = q_1 - t12 (T22 - lambda)^-1 q_rest with q = (Q Û)* e_0.

    The sign follows the eigenvector normalization v(1) >= 0, so that
    l(1) v is independent of it and sign(l(1)) = sign of the (0, 0) entry of P.
    Given a mode error, both parts of the coefficient are widened by it.
    """
    with working_precision(schur.prec):
        coeff = _mode(schur, ordered).coeff
        if mode_error is None:
            return coeff
        error = to_ball(mode_error).upper()
        return coeff + acb(arb(0, error), arb(0, error))

def _mode_error(A: BallMatrix, mode: _Mode, ordered: OrdschurCertificate, enclosure: EigenEnclosure) -> Tuple[arb, arb]:
    """Bound on |P_j 1 - l v| and the residual |A W - W T_tilde|.

    theta_j covers P_j versus the L_K projector; the two remaining terms cover
    A versus S = W T_tilde W^-1 and W^-1 versus W*.
    """
    W = mode.W
    delta = norm2_upper(identity_defect(W))
    if not delta < 1:
        raise MultiplicityAmbiguous(f"reordered Schur basis not invertible: delta = {delta}")
    residual = norm2_upper(A*W - W*ordered.T_tilde.as_ball())
    e = (residual/(1 - delta).sqrt()).upper()
    M = enclosure.M_op
    gain = (e*M).upper()
    if not gain < 1:
        raise MultiplicityAmbiguous(f"reordered Schur defect {e} too large on window {enclosure.index}")
    M_S = M/(1 - gain)
    w_norm = (1 + sum((abs(x)**2 for x in mode.y), arb(0))).sqrt()
    error = enclosure.theta + enclosure.rho*e*M*M_S + (1 + delta)*delta*w_norm/(1 - delta)
    return error.upper(), residual

def _check_separation(schur: SchurCertificate, enclosures: Sequence[EigenEnclosure], rho_sep: arb, M_S: arb):
    """The windows must hold every eigenvalue of L outside |z| = rho_sep."""
    for a in enclosures:
        if not abs(a.center) - a.rho > rho_sep:
            raise MultiplicityAmbiguous(f"window {a.index} meets the separating circle")
        for b in enclosures:
            if a.index < b.index and not abs(a.center - b.center) > a.rho + b.rho:
                raise MultiplicityAmbiguous(f"windows {a.index} and {b.index} overlap")
    e = schur_similarity_defect(schur)
    if not e*M_S < 1:
        raise MultiplicityAmbiguous(f"Schur defect {e} too large on the separating circle")
    outside = 0
    for i, t in enumerate(schur.T.diag()):
        if abs(t) > rho_sep:
            outside += 1
        elif not abs(t) < rho_sep:
            raise MultiplicityAmbiguous(f"diagonal entry {i} lies on the separating circle")
    if outside != len(enclosures):
        raise MultiplicityAmbiguous(f"{outside} eigenvalues outside the separating circle, "
                                    f"{len(enclosures)} windows")

def separating_radius(schur: SchurCertificate, N: int) -> arb:
    """Geometric mean of the N-th and (N+1)-th candidate moduli."""
    candidates = spectrum_candidates(schur)
    if N >= len(candidates):
        raise ValueError(f"need more than {N} candidates for a separating circle")
    return (abs(candidates[N - 1])*abs(candidates[N])).sqrt().mid()

def build_expansion(ctx: OperatorContext, enclosures: Sequence[EigenEnclosure], m: int = None) -> ExpansionCertificate:
    """Assemble the expansion certificate at the level of `ctx` from certified simple windows 1..N."""
    enclosures = sorted(enclosures, key=lambda a: a.index)
    N = len(enclosures)
    if N == 0:
        raise ValueError("expansion needs at least one certified window")
    for a in enclosures:
        if a.K != ctx.K:
            raise ValueError(f"window {a.index} was certified at K={a.K}, expansion runs at K={ctx.K}")
        if not a.simple or a.theta is None or a.eigenvalue is None:
            raise ValueError(f"window {a.index} is not a certified simple eigenvalue with projector bound")
    schur, A = ctx.schur, ctx.A
    n = schur.size

    with working_precision(ctx.prec):
        lambdas, coeffs, raw, errors, residuals, defects, columns = [], [], [], [], [], [], []
        remainder = [acb(1)] + [acb(0)]*(n - 1)
        for a in enclosures:
            [i] = diagonal_inside(schur.T, a.center, a.rho)
            U_hat, T_tilde = approx_ordschur(schur.T, [i], ctx.prec)
            ordered = certify_ordschur(schur.T, [i], U_hat, T_tilde, ctx.prec)
            if diagonal_inside(T_tilde, a.center, a.rho) != [0]:
                raise MultiplicityAmbiguous(f"reordering did not bring window {a.index} to the front")
            mode = _mode(schur, ordered)
            error, residual = _mode_error(A, mode, ordered, a)
            if a.contour is not None and not a.propagated:
                defects.append(projector_error_decomposition(schur, ordered, a.contour))
            else:
                defects.append(None)
            lambdas.append(a.eigenvalue)
            raw.append(mode.coeff)
            coeffs.append(spectral_coefficient(schur, ordered, error))
            errors.append(error)
            residuals.append(residual)
            columns.append(mode.vector)
            remainder = [r - mode.coeff*v for r, v in zip(remainder, mode.vector)]
            logger.info(f"mode {a.index}: l(1) = {mode.coeff}, error {error}")

        q_K = vector_norm_upper(remainder)
        qnorm = qnorm_bound(remainder, errors)

        rho_sep = separating_radius(schur, N)
        contour = lift_to_matrix_resolvent(schur, contour_resolvent_sup(schur.T, acb(0), rho_sep, m, prec=ctx.prec))
        _check_separation(schur, enclosures, rho_sep, (schur.kappaQ**2*contour.M_T).upper())
        M_op = finite_rank_resolvent(contour.M_A, ctx.C, rho_sep)
        alpha = small_gain(ctx.eps_K, M_op)
        M_inf = lift_resolvent(M_op, alpha)
        # the computed part of Q_N 1 lies in the range of Pi_K, where only A_K acts
        tail_constant = ((contour.M_A*q_K + M_op*sum(errors, arb(0)))/(1 - alpha)).upper()

        evecs = acb_mat(n, N)
        for j, column in enumerate(columns):
            for k, x in enumerate(column):
                evecs[k, j] = x
    logger.info(f"expansion with {N} modes at K={ctx.K}: rho_sep={rho_sep}, |Q_N 1| <= {qnorm}")
    return ExpansionCertificate(N=N, K=ctx.K, prec=ctx.prec, lambdas=lambdas, coeffs=coeffs, raw_coeffs=raw,
                                mode_errors=errors, residuals=residuals, evec_columns=BallMatrix(evecs),
                                rho_sep=rho_sep, M_inf_sep=M_inf, qnorm=qnorm, tail_constant=tail_constant,
                                projector_defects=defects)

def qnorm_bound(remainder: Sequence[acb], mode_errors: Sequence[arb]) -> arb:
    """|(I - sum P_j) 1| <= |e_0 - sum l_j v_j| + sum of the mode errors."""
    return (vector_norm_upper(remainder) + sum(mode_errors, arb(0))).upper()

def tail_formula(rho: arb, M: arb, q: arb, n: int) -> arb:
    if n < 0:
        raise ValueError("iteration count must be nonnegative")
    return (to_ball(rho)**(n + 1)*to_ball(M)*to_ball(q)).upper()

def tail_bound(cert: ExpansionCertificate, n: int) -> arb:
    """Bound on |R_N(n)| = |L^n Q_N 1| from the contour integral over |z| = rho_sep."""
    with working_precision(cert.prec):
        return tail_formula(cert.rho_sep, cert.tail_constant, arb(1), n)

def monomial_integrals(x: arb, K: int) -> List[arb]:
    """Integrals of (t-1)^k over [0, x] for k = 0..K, exact up to ball rounding."""
    x = to_ball(x)
    shifted = x - 1
    power = shifted
    sign = arb(-1)
    values = []
    for k in range(K + 1):
        values.append((power - sign)/(k + 1))
        power *= shifted
        sign = -sign
    return values

def gram_norm_bound(K: int, xs: Sequence[arb], prec: int = 128) -> arb:
    """Largest norm over xs of the functional f -> integral of f over [0, x] on degrees 0..K.

    Every value is at most pi/sqrt(6), below the sqrt(pi) used in the error terms.
    """
    with working_precision(prec):
        return max((vector_norm_upper(monomial_integrals(to_ball(x), K)) for x in xs), key=float)

def _check_x(x: arb):
    x = to_ball(x)
    if x < 0 or x > 1:
        raise ValueError(f"evaluation point {x} outside [0, 1]")
    return x

def _integrated_mode(cert: ExpansionCertificate, j: int, integrals: List[arb]) -> acb:
    total = acb(0)
    for k, m_k in enumerate(integrals):
        total += cert.evec_columns[k, j]*m_k
    return total

def expansion_eval(cert: ExpansionCertificate, n: int, xs: Sequence[arb], j0: int = 1) -> List[Tuple[arb, arb, arb]]:
    """(x, F, error) with F = sum over j >= j0 of lambda_j^n l_j(1) times the integral of v_j over [0, x].

    F +/- error encloses the integral over [0, x] of L^n 1 minus its first
    j0-1 spectral components.
    """
    if n < 0:
        raise ValueError("iteration count must be nonnegative")
    if not 1 <= j0 <= cert.N + 1:
        raise ValueError(f"j0 must lie in [1, {cert.N + 1}]")
    rows = []
    with working_precision(cert.prec):
        powers = [cert.lambdas[j]**n for j in range(cert.N)]
        mode_part = sum((abs_upper(powers[j])*cert.mode_errors[j] for j in range(j0 - 1, cert.N)), arb(0))
        error = (arb.pi().sqrt()*(tail_bound(cert, n) + mode_part)).upper()
        for x in xs:
            x = _check_x(x)
            integrals = monomial_integrals(x, cert.K)
            value = acb(0)
            for j in range(j0 - 1, cert.N):
                value += powers[j]*cert.raw_coeffs[j]*_integrated_mode(cert, j, integrals)
            rows.append((x, value.real, error))
    return rows

def gauss_kuzmin_error(cert: ExpansionCertificate, n: int, x: arb) -> arb:
    """Upper bound on |G_n(x) - log2(1 + x)| after n steps of the Gauss map from the uniform start."""
    [(_, value, error)] = expansion_eval(cert, n, [x], j0=2)
    with working_precision(cert.prec):
        return (abs_upper(value) + error).upper()

def eigenfunction_eval(cert: ExpansionCertificate, j: int, x: arb) -> acb:
    """Horner evaluation of the j-th (1-based) eigenvector candidate at x."""
    if not 1 <= j <= cert.N:
        raise IndexError(f"mode {j} outside 1..{cert.N}")
    with working_precision(cert.prec):
        shifted = to_ball(x) - 1
        value = acb(0)
        for k in range(cert.K, -1, -1):
            value = value*shifted + cert.evec_columns[k, j - 1]
        return value

def eigenpair_residual(A: BallMatrix, cert: ExpansionCertificate, j: int) -> arb:
    """|A v_j - t_j v_j| for the mode vector and its diagonal entry lambda_K."""
    with working_precision(cert.prec):
        v = BallMatrix([[cert.evec_columns[k, j - 1]] for k in range(cert.K + 1)])
        Av = A*v
        lam = (v.adjoint()*Av)[0, 0].mid()
        return vector_norm_upper([Av[k, 0] - lam*v[k, 0] for k in range(cert.K + 1)])

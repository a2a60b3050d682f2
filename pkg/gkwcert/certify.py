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

from typing import List, Optional, Sequence, Tuple

from flint import arb, acb
from pydantic import BaseModel, validator

from .balls import BallMatrix, to_ball, to_complex, abs_lower
from .gkw import GKWMatrix, PrecisionExhausted, assemble_matrix, best_c2, refine_operator_norm, truncation_budget
from .linalg import (CertificationError, SchurCertificate, ContourCertificate, approx_schur, certify_schur,
                     contour_resolvent_sup, lift_to_matrix_resolvent)
from .models.domain import CertificateModel, _ball_validator, _complex_validator, _matrix_validator
from .settings import settings, prec_for_degree
from .utils import working_precision

logger = logging.getLogger(__name__)

class SmallGainFailed(CertificationError):
    gate = "alpha"

    def __init__(self, message: str, alpha: Optional[arb] = None):
        super().__init__(message)
        self.alpha = alpha

class ThetaGateFailed(CertificationError):
    gate = "theta"

    def __init__(self, message: str, theta: Optional[arb] = None):
        super().__init__(message)
        self.theta = theta

class MultiplicityAmbiguous(CertificationError):
    gate = "multiplicity"

class OperatorContext(CertificateModel):
    """A level K of the discretization: matrix, Schur certificate and budget.

    eps_K bounds |L - L_K| and C bounds both |L| and |L_K|. c2, when known,
    is the norm of L from H2(D_1) into H2(D_3/2) behind the eigenvalue decay.
    """
    K: int
    prec: int
    eps_K: arb
    C: arb
    A: BallMatrix
    schur: SchurCertificate
    c2: Optional[arb] = None

    _balls = _ball_validator('eps_K', 'C', 'c2')
    _matrix = _matrix_validator('A')

    @validator('eps_K')
    def positive_budget(cls, eps_K):
        if not eps_K > 0:
            raise ValueError("truncation budget must be positive")
        return eps_K

class WindowOptions(BaseModel):
    m: Optional[int] = None
    split: Optional[int] = None
    require_projector: bool = True

class EigenEnclosure(CertificateModel):
    """Operator-level statement about the spectrum of L inside one circle.

    multiplicity 0 certifies a spectrum-free disc. eigenvalue is the certified
    ball for a simple eigenvalue, or the bounding box of the disc when only
    isolation could be shown. M_op bounds sup |(z - L_K)^-1| on the circle.
    """
    index: int
    K: int
    prec: int
    center: acb
    rho: arb
    multiplicity: int
    simple: bool
    eigenvalue: Optional[acb] = None
    lambda_K: Optional[acb] = None
    alpha: arb
    M_A: arb
    M_op: arb
    M_inf: arb
    theta: Optional[arb] = None
    evec_err: Optional[arb] = None
    contour: Optional[ContourCertificate] = None
    propagated: bool = False

    _complex = _complex_validator('center', 'eigenvalue', 'lambda_K')
    _balls = _ball_validator('rho', 'alpha', 'M_A', 'M_op', 'M_inf', 'theta', 'evec_err')

    @property
    def radius(self) -> Optional[arb]:
        if self.eigenvalue is None:
            return None
        return max(self.eigenvalue.real.rad(), self.eigenvalue.imag.rad(), key=float)

def operator_context(matrix: GKWMatrix, c2: arb = None, schur: SchurCertificate = None) -> OperatorContext:
    """Schur-certify the GKW matrix (unless a certificate is given) and attach its truncation budget.

    C bounds |L| and |L_K|. It is the smaller of c2 and the refined norm
    |A_K|/(1 - (2/3)^(K+1)); the shifted-monomial basis is orthonormal, so
    the spectral norm of A_K is the norm of L_K.
    """
    if c2 is None:
        c2 = matrix.c2 if matrix.c2 is not None else best_c2(matrix.prec)
    budget = truncation_budget(matrix.K, c2, matrix.prec)
    if schur is None:
        Q, T = approx_schur(matrix.A, matrix.prec)
        schur = certify_schur(matrix.A, Q, T, matrix.prec)
    elif schur.size != matrix.K + 1:
        raise ValueError(f"Schur certificate of size {schur.size} does not match K={matrix.K}")
    refined = refine_operator_norm(schur.C_A, matrix.K, matrix.prec).upper()
    C = refined if refined < c2.upper() else c2.upper()
    logger.debug(f"K={matrix.K}: |L| <= {C} (c2 = {c2.upper()}, refined = {refined})")
    return OperatorContext(K=matrix.K, prec=matrix.prec, eps_K=budget.eps_K, C=C, A=matrix.A, schur=schur, c2=c2)

def small_gain(eps_K: arb, M_A: arb) -> arb:
    eps_K, M_A = to_ball(eps_K), to_ball(M_A)
    if eps_K < 0 or M_A < 0:
        raise ValueError("small-gain inputs must be nonnegative")
    return (eps_K*M_A).upper()

def lift_resolvent(M_A: arb, alpha: arb) -> arb:
    """M_inf = M_A/(1 - alpha), the resolvent bound for L itself."""
    if not alpha < 1:
        raise SmallGainFailed(f"small-gain condition failed: alpha = {alpha}", alpha)
    return (to_ball(M_A)/(1 - alpha)).upper()

def origin_distance(center: acb, rho: arb) -> arb:
    """Certified lower bound on min |z| over the circle."""
    return abs_lower(abs(to_complex(center)) - to_ball(rho))

def finite_rank_resolvent(M_A: arb, C: arb, d0: arb) -> arb:
    """Resolvent of L_K = [[A_K, B], [0, 0]] from that of A_K.

    (z - L_K)^-1 = [[R, R B/z], [0, 1/z]] with R = (z - A_K)^-1 and |B| <= C.
    """
    if not d0 > 0:
        raise SmallGainFailed("contour passes through the origin, where L_K is never invertible")
    return (to_ball(M_A)*(1 + to_ball(C)/d0) + 1/to_ball(d0)).upper()

def coarse_fine_propagate(M_coarse: arb, eps_coarse: arb) -> arb:
    """M' = M/(1 - eps M), valid for every finer truncation on the same contour."""
    gain = small_gain(eps_coarse, M_coarse)
    if not gain < 1:
        raise SmallGainFailed(f"coarse resolvent cannot be propagated: eps*M = {gain}", gain)
    return (to_ball(M_coarse)/(1 - gain)).upper()

def projector_bound(rho: arb, eps_K: arb, M_op: arb) -> arb:
    """theta = rho eps M^2/(1 - eps M), bounding |P - P_K| for the circle."""
    alpha = small_gain(eps_K, M_op)
    if not alpha < 1:
        raise SmallGainFailed(f"small-gain condition failed: alpha = {alpha}", alpha)
    return (to_ball(rho)*to_ball(eps_K)*to_ball(M_op)**2/(1 - alpha)).upper()

def _widen(value: acb, radius: arb) -> acb:
    value = to_complex(value)
    return acb(value.real + arb(0, radius), value.imag + arb(0, radius))

def eigenvalue_enclosure(lambda_K: acb, eps_K: arb, C: arb, theta: arb) -> acb:
    if not theta < 1:
        raise ThetaGateFailed(f"projector error too large: theta = {theta}", theta)
    radius = ((eps_K*(1 + theta) + 2*C*theta)/(1 - theta)).upper()
    return _widen(lambda_K, radius)

def eigenvector_bound(theta: arb) -> arb:
    if not theta < 1:
        raise ThetaGateFailed(f"projector error too large: theta = {theta}", theta)
    return (2*to_ball(theta)/(1 - theta)).upper()

def schur_similarity_defect(schur: SchurCertificate) -> arb:
    """Bound on |A - Q T Q^-1|, the larger of the two available estimates."""
    via_inverse = (schur.r_sch/(1 - schur.delta).sqrt()).upper()
    return via_inverse if via_inverse > schur.normE else schur.normE

def matrix_eigenvalue_ball(T_ii: acb, e: arb, M_S: arb, rho: arb, C_S: arb) -> acb:
    """Ball around the diagonal entry T_ii that contains the matching eigenvalue of A.

    T_ii is an exact eigenvalue of S = Q T Q^-1 with |A - S| <= e and
    sup |(z - S)^-1| <= M_S on the circle; the projector lemma is applied to
    the pair (S, A).
    """
    gain = (e*M_S).upper()
    if not gain < 1:
        raise ThetaGateFailed(f"Schur defect too large on the contour: e*M_S = {gain}")
    theta = (rho*e*M_S**2/(1 - gain)).upper()
    if not theta < 1:
        raise ThetaGateFailed(f"matrix-level projector error too large: theta = {theta}", theta)
    return _widen(T_ii, ((e*(1 + theta) + 2*C_S*theta)/(1 - theta)).upper())

def diagonal_inside(T: BallMatrix, center: acb, rho: arb) -> List[int]:
    """Indices of diagonal entries of T certainly inside the circle.

    An entry that cannot be placed strictly inside or outside raises.
    """
    inside = []
    for i, t in enumerate(T.diag()):
        distance = abs(t - center)
        if distance < rho:
            inside.append(i)
        elif not distance > rho:
            raise MultiplicityAmbiguous(f"diagonal entry {i} of T cannot be placed relative to the contour; "
                                        "re-center or resize")
    return inside

def _check_homotopy(schur: SchurCertificate, center: acb, rho: arb, M_S: arb):
    e = schur_similarity_defect(schur)
    if not e*M_S < 1:
        raise MultiplicityAmbiguous(f"Schur defect {e} too large to transfer counts across the contour")
    if not abs(to_complex(center)) > rho:
        # L_K has the eigenvalue 0 with infinite multiplicity
        raise MultiplicityAmbiguous("contour encloses the origin; counts are only defined away from 0")

def multiplicity_in_contour(schur: SchurCertificate, contour: ContourCertificate, alpha: arb) -> int:
    """Number of eigenvalues of L inside the circle, with multiplicity.

    Counts the diagonal entries of T inside; the count carries over to A along
    S + t(A - S), to L_K (the origin lies outside) and to L (alpha < 1).
    """
    if not contour.lifted:
        raise ValueError("contour must be lifted to the matrix before counting")
    if not alpha < 1:
        raise SmallGainFailed(f"small-gain condition failed: alpha = {alpha}", alpha)
    with working_precision(schur.prec):
        _check_homotopy(schur, contour.center, contour.rho, (schur.kappaQ**2*contour.M_T).upper())
        return len(diagonal_inside(schur.T, contour.center, contour.rho))

def _disc_box(center: acb, rho: arb) -> acb:
    return _widen(center, to_ball(rho).upper())

def certify_window(ctx: OperatorContext, center: acb, rho: arb, options: WindowOptions = None,
                   index: int = 0) -> EigenEnclosure:
    """Run the gate chain contour -> beta -> alpha -> multiplicity -> theta for one circle.

    The first failing gate raises its CertificationError subclass.
    """
    options = options or WindowOptions()
    center, rho = to_complex(center), to_ball(rho)
    schur = ctx.schur
    with working_precision(ctx.prec):
        contour = contour_resolvent_sup(schur.T, center, rho, options.m, options.split, ctx.prec)
        contour = lift_to_matrix_resolvent(schur, contour)
        M_op = finite_rank_resolvent(contour.M_A, ctx.C, origin_distance(center, rho))
        alpha = small_gain(ctx.eps_K, M_op)
        M_inf = lift_resolvent(M_op, alpha)
        count = multiplicity_in_contour(schur, contour, alpha)
        logger.info(f"window {index} at K={ctx.K}: alpha={alpha}, multiplicity {count}")

        common = dict(index=index, K=ctx.K, prec=ctx.prec, center=center, rho=rho, multiplicity=count,
                      simple=count == 1, alpha=alpha, M_A=contour.M_A, M_op=M_op, M_inf=M_inf, contour=contour)
        if count == 0:
            return EigenEnclosure(**common)

        theta = projector_bound(rho, ctx.eps_K, M_op)
        if not theta < 1:
            if options.require_projector:
                raise ThetaGateFailed(f"window {index}: projector error too large, theta = {theta}", theta)
            logger.info(f"window {index}: isolation only, theta = {theta}")
            return EigenEnclosure(eigenvalue=_disc_box(center, rho), **common)
        if count > 1:
            return EigenEnclosure(eigenvalue=_disc_box(center, rho), theta=theta, **common)

        [i] = diagonal_inside(schur.T, center, rho)
        e = schur_similarity_defect(schur)
        lambda_K = matrix_eigenvalue_ball(schur.T[i, i], e, (schur.kappaQ**2*contour.M_T).upper(), rho,
                                          (schur.C_A + e).upper())
        eigenvalue = eigenvalue_enclosure(lambda_K, ctx.eps_K, ctx.C, theta)
        logger.info(f"window {index}: theta={theta}, eigenvalue {eigenvalue}")
        return EigenEnclosure(eigenvalue=eigenvalue, lambda_K=lambda_K, theta=theta,
                              evec_err=eigenvector_bound(theta), **common)

def propagate_window(coarse: EigenEnclosure, coarse_ctx: OperatorContext, fine_ctx: OperatorContext) -> EigenEnclosure:
    """Re-budget a certified coarse window at a finer level without resampling the contour.

    The fine eigenvalue ball comes from the diagonal entry of the fine Schur
    factor inside the same circle.
    """
    if fine_ctx.K < coarse_ctx.K:
        raise ValueError(f"fine level K={fine_ctx.K} is below the coarse level K={coarse_ctx.K}")
    schur = fine_ctx.schur
    center, rho = coarse.center, coarse.rho
    with working_precision(fine_ctx.prec):
        M_op = coarse_fine_propagate(coarse.M_op, coarse_ctx.eps_K)
        alpha = small_gain(fine_ctx.eps_K, M_op)
        M_inf = lift_resolvent(M_op, alpha)
        # the resolvent of A_K' is a diagonal block of that of L_K'
        e = schur_similarity_defect(schur)
        gain = (e*M_op).upper()
        if not gain < 1:
            raise MultiplicityAmbiguous(f"fine Schur defect {e} too large for the propagated resolvent {M_op}")
        M_S = (M_op/(1 - gain)).upper()
        _check_homotopy(schur, center, rho, M_S)
        inside = diagonal_inside(schur.T, center, rho)
        if len(inside) != coarse.multiplicity:
            raise MultiplicityAmbiguous(f"fine level sees {len(inside)} eigenvalues, coarse level certified "
                                        f"{coarse.multiplicity}")

        common = dict(index=coarse.index, K=fine_ctx.K, prec=fine_ctx.prec, center=center, rho=rho,
                      multiplicity=coarse.multiplicity, simple=coarse.simple, alpha=alpha, M_A=M_op, M_op=M_op,
                      M_inf=M_inf, contour=coarse.contour, propagated=True)
        if coarse.multiplicity == 0:
            return EigenEnclosure(**common)
        theta = projector_bound(rho, fine_ctx.eps_K, M_op)
        if not theta < 1:
            raise ThetaGateFailed(f"window {coarse.index}: fine projector error too large, theta = {theta}", theta)
        if coarse.multiplicity > 1:
            return EigenEnclosure(eigenvalue=_disc_box(center, rho), theta=theta, **common)

        [i] = inside
        lambda_K = matrix_eigenvalue_ball(schur.T[i, i], e, M_S, rho, (schur.C_A + e).upper())
        eigenvalue = eigenvalue_enclosure(lambda_K, fine_ctx.eps_K, fine_ctx.C, theta)
    logger.info(f"window {coarse.index} propagated K={coarse_ctx.K} -> {fine_ctx.K}: theta={theta}")
    return EigenEnclosure(eigenvalue=eigenvalue, lambda_K=lambda_K, theta=theta, evec_err=eigenvector_bound(theta),
                          **common)

def spectrum_candidates(schur: SchurCertificate) -> List[acb]:
    """Diagonal of T ordered by decreasing modulus."""
    return sorted(schur.T.diag(), key=lambda x: (-float(abs(x).mid()), -float(x.real.mid())))

def default_windows(candidates: Sequence[acb], count: int, factor: float = None) -> List[Tuple[acb, arb]]:
    """Circles around the first `count` candidates.

    rho_j = factor * distance from candidate j to every other candidate and to 0.
    """
    factor = arb(settings.radius_factor if factor is None else factor)
    if count > len(candidates):
        raise ValueError(f"only {len(candidates)} candidates for {count} windows")
    windows = []
    for j in range(count):
        c = to_complex(candidates[j]).mid()
        gaps = [abs_lower(c - other) for i, other in enumerate(candidates) if i != j] + [abs_lower(c)]
        windows.append((c, (factor*min(gaps, key=float)).mid()))
    return windows

def gap_window(candidates: Sequence[acb], j: int, factor: float = None) -> Tuple[acb, arb]:
    """Circle between the j-th and (j+1)-th candidates (1-based), avoiding all of them and 0."""
    factor = arb(settings.radius_factor if factor is None else factor)
    if not 1 <= j < len(candidates):
        raise ValueError(f"no gap after candidate {j}")
    c = ((to_complex(candidates[j - 1]) + to_complex(candidates[j]))/2).mid()
    gaps = [abs_lower(c - other) for other in candidates] + [abs_lower(c)]
    return c, (factor*min(gaps, key=float)).mid()

def certify_windows(ctx: OperatorContext, windows: Sequence[Tuple[acb, arb]], options: WindowOptions = None,
                    first_index: int = 1) -> List[EigenEnclosure]:
    """Certify several circles in order; windows past n_full use the block-split bound."""
    options = options or WindowOptions()
    results = []
    for offset, (center, rho) in enumerate(windows):
        index = first_index + offset
        window_options = options
        if options.split is None and index > settings.n_full and settings.block_size < ctx.schur.size:
            window_options = options.copy(update={'split': settings.block_size})
        results.append(certify_window(ctx, center, rho, window_options, index))
    return results

def convergence_sweep(Ks: Sequence[int], center: acb, rho: arb, prec: int = None,
                      options: WindowOptions = None, c2: arb = None) -> List[Tuple[int, bool]]:
    """Certify the same circle at each K in turn and report which levels succeed."""
    flags = []
    for K in Ks:
        try:
            ctx = operator_context(assemble_matrix(K, prec or prec_for_degree(K)), c2)
            certify_window(ctx, center, rho, options)
            ok = True
        except (CertificationError, PrecisionExhausted) as e:
            logger.info(f"window fails at K={K}: {e}")
            ok = False
        flags.append((K, ok))
    return flags

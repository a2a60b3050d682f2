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

from typing import List, Optional

from flint import arb, acb, fmpq

from . import logger, ContourNotCertified, NeumannConditionFailed, ProjectorConditionFailed
from .schur import SchurCertificate, OrdschurCertificate
from .svd import sigmin_lower, block_sigmin_lower
from ..balls import FloatMatrix, to_ball, to_complex, norm2_upper
from ..models.domain import CertificateModel, _ball_validator, _complex_validator
from ..settings import settings
from ..utils import current_precision, parallel_map, working_precision

class ContourCertificate(CertificateModel):
    """Sampled circle |z - center| = rho with a certified triangular resolvent bound.

    beta and M_A stay empty until the bound is lifted to the full matrix.
    """
    center: acb
    rho: arb
    m: int
    Delta_m: arb
    s_star: arb
    M_T: arb
    split: Optional[int] = None
    c12: Optional[arb] = None
    beta: Optional[arb] = None
    M_A: Optional[arb] = None

    _center = _complex_validator('center')
    _balls = _ball_validator('rho', 'Delta_m', 's_star', 'M_T', 'c12', 'beta', 'M_A')

    @property
    def lifted(self) -> bool:
        return self.M_A is not None

def contour_points(center: acb, rho: arb, m: int) -> List[acb]:
    center, rho = to_complex(center), to_ball(rho)
    two_pi = 2*arb.pi()
    return [center + rho*acb(0, two_pi*arb(fmpq(l, m))).exp() for l in range(m)]

def sample_spacing(rho: arb, m: int) -> arb:
    """Delta_m = 2 rho sin(pi/2m), the largest distance from Γ to the nearest sample."""
    return (2*to_ball(rho)*(arb.pi()/(2*m)).sin()).upper()

def contour_resolvent_sup(T: FloatMatrix, center: acb, rho: arb, m: int = None, split: int = None,
                          prec: int = None) -> ContourCertificate:
    """Certified sup over the circle of |(zI - T)^-1|; T is the triangular Schur factor in the certification chain.

    Every sample gets a lower bound s_l on sigma_min(z_l I - T); since sigma_min
    is 1-Lipschitz in z, min s_l - Delta_m bounds it on the whole circle.
    """
    m = m or settings.contour_samples
    rho = to_ball(rho)
    if m < 4:
        raise ValueError(f"need at least 4 contour samples, got {m}")
    if not rho > 0:
        raise ValueError("contour radius must be positive")

    with working_precision(min(prec or current_precision(), settings.svd_prec)):
        T_ball = T.as_ball() if isinstance(T, FloatMatrix) else T
        points = contour_points(center, rho, m)
        c12 = None
        if split:
            c12 = norm2_upper(T_ball.submatrix(0, split, split, T_ball.cols))
            values = parallel_map(lambda z: block_sigmin_lower(T_ball, split, c12, z), points, "contour")
        else:
            values = parallel_map(lambda z: sigmin_lower(T_ball, z), points, "contour")

        index = 0
        for l, value in enumerate(values):
            if value < values[index]:
                index = l
        Delta_m = sample_spacing(rho, m)
        s_star = (values[index] - Delta_m).lower()
        if not s_star > 0:
            logger.info(f"contour at {center}, rho={rho}, m={m} failed at sample {index}: s*={s_star}")
            raise ContourNotCertified(f"contour not certified: sample {index} gives s* = {s_star}", index, s_star)
        M_T = (1/s_star).upper()
    logger.info(f"contour at {center}, rho={rho}, m={m}: s*={s_star}, M_T<={M_T}")
    return ContourCertificate(center=to_complex(center), rho=rho, m=m, Delta_m=Delta_m, s_star=s_star, M_T=M_T,
                              split=split, c12=c12)

def lift_to_matrix_resolvent(cert: SchurCertificate, contour: ContourCertificate) -> ContourCertificate:
    """Neumann step from the triangular factor back to A.

    beta = kappa^2 M_T |E|; for beta < 1, M_A = kappa^2 M_T/(1 - beta).
    """
    with working_precision(cert.prec):
        kappa2 = cert.kappaQ**2
        beta = (kappa2*contour.M_T*cert.normE).upper()
        if not beta < 1:
            raise NeumannConditionFailed(f"Neumann condition failed: beta = {beta}", beta)
        M_A = (kappa2*contour.M_T/(1 - beta)).upper()
    logger.info(f"lifted contour at {contour.center}: beta={beta}, M_A<={M_A}")
    return contour.copy(update={'beta': beta, 'M_A': M_A})

def projector_error_decomposition(schur: SchurCertificate, ordered: OrdschurCertificate,
                                  contour: ContourCertificate) -> arb:
    """Bound on the distance between the Riesz projector of A and the one read
    off the reordered triangular factor: one contour term per defect."""
    with working_precision(schur.prec):
        M_T = contour.M_T
        terms = []
        for which, defect in (("schur", schur.r_sch), ("ord", ordered.normE_ord)):
            eta = (defect*M_T).upper()
            if not eta < 1:
                raise ProjectorConditionFailed(f"{which} defect too large on the contour: eta = {eta}", which)
            terms.append(contour.rho*defect*M_T**2/(1 - eta))
        return (terms[0] + terms[1]).upper()

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

from flint import arb

logger = logging.getLogger(__name__)

class CertificationError(Exception):
    gate = "certification"

class SchurConvergenceError(CertificationError):
    gate = "schur"

class NotOrthogonalError(CertificationError):
    gate = "orthogonality"

class ContourNotCertified(CertificationError):
    gate = "contour"

    def __init__(self, message: str, index: int, s_star: arb):
        super().__init__(message)
        self.index = index
        self.s_star = s_star

class NeumannConditionFailed(CertificationError):
    gate = "beta"

    def __init__(self, message: str, beta: arb):
        super().__init__(message)
        self.beta = beta

class ProjectorConditionFailed(CertificationError):
    gate = "projector"

    def __init__(self, message: str, which: str):
        super().__init__(message)
        self.which = which

class SingularPivotError(CertificationError):
    gate = "pivot"

from .schur import (SchurCertificate, OrdschurCertificate, approx_schur, certify_schur,
                    approx_ordschur, certify_ordschur)
from .svd import svd_enclosure, sigmin_lower, block_sigmin_lower
from .contour import (ContourCertificate, contour_points, contour_resolvent_sup, lift_to_matrix_resolvent,
                      projector_error_decomposition)

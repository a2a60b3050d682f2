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

logger = logging.getLogger(__name__)

class PrecisionExhausted(RuntimeError):
    pass

class BranchGeometryViolation(AssertionError):
    pass

from .zeta import hurwitz_zeta
from .constants import (TruncationBudget, BranchGeometryReport, c2_bound, best_c2, truncation_budget,
                        refine_operator_norm, branch_geometry_check, eigen_decay_bound, check_eigen_decay)
from .assembly import GKWMatrix, assemble_matrix, gauss_density_coefficients, density_residual

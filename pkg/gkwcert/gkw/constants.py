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

from typing import Iterable, List

from flint import arb, acb, fmpq
from pydantic import validator

from . import logger, BranchGeometryViolation
from .zeta import hurwitz_zeta
from ..balls import to_ball
from ..models.domain import CertificateModel, _ball_validator
from ..settings import settings
from ..utils import working_precision

TWO_THIRDS = fmpq(2, 3)

class TruncationBudget(CertificateModel):
    K: int
    c2: arb
    eps_K: arb

    _balls = _ball_validator('c2', 'eps_K')

    @validator('K')
    def nonnegative_degree(cls, K):
        if K < 0:
            raise ValueError("truncation degree must be nonnegative")
        return K

class BranchGeometryReport(CertificateModel):
    samples: int
    passed: int
    undecided: int
    failed: int

def c2_bound(N: int, prec: int) -> arb:
    """Certified upper bound for the norm of the operator from H2(D_1) into H2(D_3/2).

    The branch sum is split at N: the first N-1 branches exactly, the rest
    through zeta(3/2, N-1/2).
    """
    if N < 1:
        raise ValueError("split index must be at least 1")
    with working_precision(prec + 16):
        half = arb(fmpq(1, 2))
        head = arb(0)
        for n in range(1, N):
            head += arb(2*n + 1).sqrt()/(n - half)**2
        shift = N - half
        tail = (2 + 2/shift).sqrt()*hurwitz_zeta(arb(fmpq(3, 2)), shift, prec + 16)
        total = head + tail
    with working_precision(prec):
        return total + 0

def best_c2(prec: int) -> arb:
    return c2_bound(settings.c2_split, prec)

def truncation_budget(K: int, c2: arb, prec: int = None) -> TruncationBudget:
    """eps_K = c2 (2/3)^(K+1), the operator distance between L and its rank-(K+1) truncation."""
    if K < 0:
        raise ValueError("truncation degree must be nonnegative")
    with working_precision(prec or settings.default_prec):
        eps = to_ball(c2)*arb(TWO_THIRDS)**(K + 1)
    return TruncationBudget(K=K, c2=c2, eps_K=eps)

def refine_operator_norm(norm_LK: arb, K: int, prec: int = None) -> arb:
    """Bound |L| from a bound on the truncated operator: |L_K| / (1 - (2/3)^(K+1))."""
    with working_precision(prec or settings.default_prec):
        return to_ball(norm_LK)/(1 - arb(TWO_THIRDS)**(K + 1))

def eigen_decay_bound(c2: arb, m: int) -> arb:
    """Trace-class decay of the m-th eigenvalue (m >= 1): c2 (2/3)^(m-1)."""
    if m < 1:
        raise ValueError("eigenvalues are indexed from 1")
    return to_ball(c2)*arb(TWO_THIRDS)**(m - 1)

def check_eigen_decay(enclosures: Iterable, c2: arb) -> List[int]:
    """Indices whose certified eigenvalue certainly violates the decay bound."""
    violations = []
    for enclosure in enclosures:
        if enclosure.eigenvalue is None:
            continue
        if abs(enclosure.eigenvalue).lower() > eigen_decay_bound(c2, enclosure.index).upper():
            violations.append(enclosure.index)
    return violations

def branch_geometry_check(samples: int, seed: int = 0, prec: int = 128, max_branch: int = 100) -> BranchGeometryReport:
    """Sample w in the disc |w-1| < 3/2 and branches n <= max_branch.

    Certifies |1/(w+n) - 1| < 1 and |(w+n)^-2| <= (n-1/2)^-2. A certified
    violation means the arithmetic is broken and raises immediately.
    """
    rng = random.Random(seed)
    passed = undecided = 0
    with working_precision(prec):
        half = arb(fmpq(1, 2))
        for _ in range(samples):
            r = 1.5*rng.random()*0.999
            phase = rng.random()
            w = 1 + arb(r)*acb(0, 2*arb.pi()*phase).exp()
            n = rng.randint(1, max_branch)
            contraction = abs(1/(w + n) - 1)
            weight = abs(1/(w + n)**2)
            weight_cap = 1/(n - half)**2
            if contraction >= 1 or weight > weight_cap:
                raise BranchGeometryViolation(f"branch {n} at w={w}: |tau - 1| = {contraction}, weight {weight}")
            if contraction < 1 and weight <= weight_cap:
                passed += 1
            else:
                undecided += 1
                logger.debug(f"branch geometry undecided at n={n}, w={w}")
    return BranchGeometryReport(samples=samples, passed=passed, undecided=undecided, failed=0)

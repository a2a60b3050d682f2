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

from math import factorial

from flint import arb, fmpq
from mpmath import bernfrac

from . import logger
from ..balls import IndeterminateError, to_ball
from ..balls.scalar import Number
from ..utils import working_precision

MAX_CORRECTION_TERMS = 400

def _exact_integer(value: arb):
    if value.rad() != 0 or value == 0:
        return None
    man, exp = (int(v) for v in value.mid().man_exp())
    if exp >= 0:
        return man << exp
    if man % (1 << -exp) == 0:
        return man >> -exp
    return None

def _bernoulli_ratio(k: int) -> arb:
    # B_{2k}/(2k)!
    p, q = bernfrac(2*k)
    return arb(fmpq(int(p), int(q)*factorial(2*k)))

def hurwitz_zeta(s: Number, a: Number, prec: int) -> arb:
    """Certified enclosure of zeta(s, a) = sum_{n>=0} (n+a)^(-s) for real s > 1, a > 0.

    A prefix of max(prec/2, 64) terms is summed in ball arithmetic; the tail
    is the Euler-Maclaurin expansion at N+a whose remainder bound
    |B_2M|/(2M)! (s)_{2M-1} (N+a)^(1-s-2M) goes into the radius.
    """
    with working_precision(prec + 16):
        s = to_ball(s)
        a = to_ball(a)
        if isinstance(s, arb) is False or isinstance(a, arb) is False:
            raise TypeError("hurwitz_zeta takes real balls")
        if s.overlaps(arb(1)) or not s > 1:
            raise IndeterminateError("zeta(s, a) needs s certainly greater than 1")
        if not a > 0:
            raise IndeterminateError("zeta(s, a) needs a certainly positive")

        k_int = _exact_integer(s)
        if k_int is not None:
            power = lambda x: 1/x**k_int
        else:
            power = lambda x: (-s*x.log()).exp()

        N = max(prec//2, 64)
        prefix = arb(0)
        for n in range(N):
            prefix += power(a + n)

        X = a + N
        X_s = power(X)
        tail = X*X_s/(s - 1) + X_s/2
        X2 = X*X
        poch = s
        x_pow = X_s/X
        target = arb(2)**(-prec - 8)
        remainder = None
        for k in range(1, MAX_CORRECTION_TERMS + 1):
            coeff = _bernoulli_ratio(k)
            term = coeff*poch*x_pow
            tail += term
            remainder = abs(term).upper()
            if remainder < target:
                break
            poch = poch*(s + 2*k - 1)*(s + 2*k)
            x_pow = x_pow/X2
        else:
            logger.debug(f"zeta({s}, {a}): correction series capped at {MAX_CORRECTION_TERMS} terms")

        value = prefix + tail + arb(0, remainder)

    with working_precision(prec):
        return value + 0

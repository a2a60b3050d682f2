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

import re

from decimal import ROUND_CEILING, ROUND_HALF_EVEN
from fractions import Fraction
from typing import Callable, Dict, Union

from flint import arb, acb, fmpq

from ..settings import settings
from ..utils import current_precision, fraction_to_decimal, working_precision

Ball = Union[arb, acb]
Number = Union[int, float, complex, str, Fraction, arb, acb]

_BALL_PATTERN = re.compile(r"^\s*\[\s*(\S+)\s*\+/-\s*(\S+)\s*\]\s*$")
_COMPLEX_PATTERN = re.compile(r"^\s*(\[[^\]]*\])\s*\+\s*(\[[^\]]*\])\s*j\s*$")
_DYADIC_PATTERN = re.compile(r"^\s*(-?\d+)p(-?\d+)\s*$")
_EXPONENT = re.compile(r"[eE].*$")

class IndeterminateError(ArithmeticError):
    pass

class DimensionError(ValueError):
    pass

def to_ball(value: Number) -> Ball:
    if isinstance(value, (arb, acb)):
        return value
    elif isinstance(value, bool):
        raise TypeError("booleans are not balls")
    elif isinstance(value, int):
        return arb(value)
    elif isinstance(value, Fraction):
        return arb(fmpq(value.numerator, value.denominator))
    elif isinstance(value, float):
        return arb(value)
    elif isinstance(value, complex):
        return acb(value.real, value.imag)
    elif isinstance(value, str):
        return ball_from_str(value)
    else:
        raise TypeError(f"expected a number or ball, but received {type(value).__name__}")

def to_complex(value: Number) -> acb:
    value = to_ball(value)
    return value if isinstance(value, acb) else acb(value)

def is_complex(value: Ball) -> bool:
    return isinstance(value, acb)

def abs_upper(value: Ball) -> arb:
    """Exact upper bound of |value| over the whole ball."""
    return abs(to_ball(value)).upper()

def abs_lower(value: Ball) -> arb:
    """Exact lower bound of |value|, clamped at zero."""
    low = abs(to_ball(value)).lower()
    return low if low > 0 else arb(0)

def upper_max(*values: Ball) -> arb:
    best = None
    for value in values:
        up = to_ball(value).upper()
        if best is None or up > best:
            best = up
    if best is None:
        raise ValueError("upper_max of an empty sequence")
    return best

def lower_min(*values: Ball) -> arb:
    best = None
    for value in values:
        low = to_ball(value).lower()
        if best is None or low < best:
            best = low
    if best is None:
        raise ValueError("lower_min of an empty sequence")
    return best

def interval(lo: arb, hi: arb) -> arb:
    """Smallest convenient ball containing [lo, hi]."""
    lo = to_ball(lo).lower()
    hi = to_ball(hi).upper()
    if lo > hi:
        raise ValueError("interval endpoints out of order")
    mid = ((lo + hi)/2).mid()
    rad = upper_max(hi - mid, mid - lo)
    return arb(mid, rad)

def certainly_positive(value: Ball) -> bool:
    return to_ball(value) > 0

def _excludes_zero(value: Ball) -> bool:
    if isinstance(value, acb):
        return abs_lower(value) > 0
    return value > 0 or value < 0

def _check_branch(value: Ball, name: str):
    # principal branch cut of sqrt and log runs along (-inf, 0]
    if isinstance(value, acb):
        if not _excludes_zero(value):
            raise IndeterminateError(f"{name} of a ball containing 0")
        if not (value.real > 0) and not _excludes_zero(acb(value.imag)):
            raise IndeterminateError(f"{name} of a ball touching the branch cut")
    elif name == "log" and not value > 0:
        raise IndeterminateError("log of a ball not certainly positive")
    elif name == "sqrt" and not value >= 0:
        raise IndeterminateError("sqrt of a ball not certainly nonnegative")

def _div(x: Ball, y: Ball) -> Ball:
    if not _excludes_zero(y):
        raise IndeterminateError("division by a ball containing 0")
    return x/y

def _sqrt(x: Ball) -> Ball:
    _check_branch(x, "sqrt")
    return x.sqrt()

def _log(x: Ball) -> Ball:
    _check_branch(x, "log")
    return x.log()

def _pow(x: Ball, y: Union[int, Ball]) -> Ball:
    if isinstance(y, int):
        if y < 0 and not _excludes_zero(x):
            raise IndeterminateError("negative power of a ball containing 0")
        return x**y
    y = to_ball(y)
    if isinstance(x, arb) and isinstance(y, arb):
        if not x > 0:
            raise IndeterminateError("real power of a ball not certainly positive")
        return (y*x.log()).exp()
    _check_branch(to_complex(x), "log")
    return (to_complex(y)*to_complex(x).log()).exp()

_OPERATIONS: Dict[str, Callable] = {
    'add': lambda x, y: x + y,
    'sub': lambda x, y: x - y,
    'mul': lambda x, y: x*y,
    'div': _div,
    'sqrt': _sqrt,
    'pow': _pow,
    'exp': lambda x: x.exp(),
    'log': _log,
    'sin': lambda x: x.sin(),
    'pi': lambda: arb.pi(),
}

def ball_arith(op: str, *operands: Number, prec: int) -> Ball:
    """Evaluate one elementary operation at `prec` bits with outward rounding.

    Operands that are not balls are converted exactly where possible
    (integers, fractions, dyadic floats) and otherwise rounded outward.
    """
    try:
        fn = _OPERATIONS[op]
    except KeyError:
        raise ValueError(f"unknown ball operation {op!r}") from None
    with working_precision(prec):
        args = [operand if (op == 'pow' and i == 1 and isinstance(operand, int)) else to_ball(operand)
                for i, operand in enumerate(operands)]
        result = fn(*args)
        # force the result to the requested precision
        return result + 0

def _exact_fraction(value: arb) -> Fraction:
    if value == 0:
        return Fraction(0)
    man, exp = value.man_exp()
    man, exp = int(man), int(exp)
    return Fraction(man)*Fraction(2)**exp

def _default_digits(value: arb) -> int:
    if value == 0:
        return 1
    man, _ = value.man_exp()
    digits = int(man).bit_length()*30103//100000 + 2
    if settings.serialize_digits is not None:
        digits = min(digits, settings.serialize_digits)
    return max(digits, 2)

def ball_to_str(value: arb, digits: int = None) -> str:
    """Decimal midpoint with an outward-rounded radius, e.g. "[-3.0366300e-1 +/- 2.1e-45]".

    The midpoint is rounded to `digits` significant digits and the rounding
    error is added to the radius, so parsing the string back always yields a
    ball containing `value`.
    """
    if isinstance(value, acb):
        return complex_to_str(value, digits)
    if not value.is_finite():
        raise IndeterminateError("cannot serialize a non-finite ball")
    mid = _exact_fraction(value.mid())
    rad = _exact_fraction(value.rad())
    if digits is None:
        digits = _default_digits(value.mid())
    dmid = fraction_to_decimal(mid, digits, ROUND_HALF_EVEN)
    err = rad + abs(mid - Fraction(dmid))
    drad = fraction_to_decimal(err, 2, ROUND_CEILING)
    return f"[{dmid:e} +/- {drad:e}]"

def complex_to_str(value: acb, digits: int = None) -> str:
    return f"{ball_to_str(value.real, digits)}+{ball_to_str(value.imag, digits)}j"

def _parse_prec(mid: str) -> int:
    # enough bits for every decimal digit written, whatever the ambient precision
    digits = sum(c.isdigit() for c in _EXPONENT.sub("", mid))
    return max(current_precision(), digits*10//3 + 16)

def ball_from_str(text: str) -> Ball:
    complex_match = _COMPLEX_PATTERN.match(text)
    if complex_match:
        return acb(ball_from_str(complex_match.group(1)), ball_from_str(complex_match.group(2)))
    match = _BALL_PATTERN.match(text)
    try:
        if match:
            with working_precision(_parse_prec(match.group(1))):
                return arb(match.group(1), match.group(2))
        with working_precision(_parse_prec(text.strip())):
            return arb(text.strip())
    except Exception as exc:
        raise ValueError(f"not a ball string: {text!r}") from exc

def dyadic_to_str(value: arb) -> str:
    """Exact text form of a zero-radius ball as mantissa and binary exponent, e.g. "-5p-3" for -0.625."""
    if not value.is_finite() or value.rad() != 0:
        raise ValueError(f"only exact finite values have a dyadic form, not {value}")
    if value == 0:
        return "0p0"
    man, exp = value.man_exp()
    return f"{int(man)}p{int(exp)}"

def dyadic_from_str(text: str) -> arb:
    match = _DYADIC_PATTERN.match(text) if isinstance(text, str) else None
    if match is None:
        raise ValueError(f"not a dyadic string: {text!r}")
    man, exp = int(match.group(1)), int(match.group(2))
    value = Fraction(man)*Fraction(2)**exp
    with working_precision(max(man.bit_length(), 2) + 8):
        result = arb(fmpq(value.numerator, value.denominator))
    if result.rad() != 0:
        raise ValueError(f"dyadic string {text!r} did not parse exactly")
    return result

def deserialize_ball(value) -> Ball:
    if isinstance(value, (arb, acb)):
        return value
    elif isinstance(value, str):
        return ball_from_str(value)
    elif isinstance(value, (list, tuple)) and len(value) == 2:
        return acb(deserialize_ball(value[0]), deserialize_ball(value[1]))
    elif isinstance(value, (int, float, Fraction, complex)):
        return to_ball(value)
    else:
        raise TypeError(f"expected str or ball, but received {type(value).__name__}")

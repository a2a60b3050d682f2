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

import hashlib
import json

from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from decimal import Context, Decimal, ROUND_CEILING, ROUND_FLOOR, ROUND_HALF_EVEN
from fractions import Fraction
from typing import Any, Callable, Iterable, Iterator, List, TypeVar

from flint import ctx

from .settings import settings

T = TypeVar('T')
R = TypeVar('R')

@contextmanager
def working_precision(prec: int) -> Iterator[int]:
    """Set the process-wide ball precision for the duration of a block."""
    if prec < 2:
        raise ValueError("precision must be at least 2 bits")
    saved = ctx.prec
    ctx.prec = prec
    try:
        yield prec
    finally:
        ctx.prec = saved

def current_precision() -> int:
    return ctx.prec

def fraction_to_decimal(value: Fraction, digits: int, rounding=ROUND_HALF_EVEN) -> Decimal:
    if rounding not in (ROUND_HALF_EVEN, ROUND_CEILING, ROUND_FLOOR):
        raise ValueError("rounding must be one of ROUND_HALF_EVEN, ROUND_CEILING or ROUND_FLOOR")
    context = Context(prec=digits, rounding=rounding, Emin=-10**9, Emax=10**9)
    return context.divide(Decimal(value.numerator), Decimal(value.denominator))

def parallel_map(fn: Callable[[T], R], items: Iterable[T], name: str = "gkwcert") -> List[R]:
    # results come back in input order regardless of thread count
    items = list(items)
    if settings.num_threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(settings.num_threads, name) as pool:
        return list(pool.map(fn, items))

def canonical_json(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, separators=(',', ':'), default=str)

def content_key(kind: str, parameters: dict) -> str:
    payload = {'kind': kind, 'parameters': parameters, 'code_version': settings.code_version}
    return hashlib.sha256(canonical_json(payload).encode('utf-8')).hexdigest()

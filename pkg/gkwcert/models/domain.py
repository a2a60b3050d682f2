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

from typing import Callable, Optional

from flint import arb, acb
from pydantic import BaseModel, validator

from ..balls import BallMatrix, FloatMatrix, ball_to_str, deserialize_ball, to_complex

def deserialize_optional_ball(value):
    if value is None:
        return None
    return deserialize_ball(value)

def deserialize_optional_complex(value):
    if value is None:
        return None
    return to_complex(deserialize_ball(value))

def deserialize_matrix(value) -> Optional[BallMatrix]:
    if value is None or isinstance(value, BallMatrix):
        return value
    elif isinstance(value, (list, tuple)):
        return BallMatrix.from_strings(value)
    else:
        raise TypeError(f"expected a list of rows or BallMatrix, but received {type(value).__name__}")

def deserialize_float_matrix(value) -> Optional[FloatMatrix]:
    if value is None or isinstance(value, FloatMatrix):
        return value
    elif isinstance(value, BallMatrix):
        if not value.max_radius() == 0:
            raise ValueError("candidate matrices carry exact entries, not balls")
        return FloatMatrix(value)
    elif isinstance(value, (list, tuple)):
        return FloatMatrix.from_dyadic(value)
    else:
        raise TypeError(f"expected a list of rows or FloatMatrix, but received {type(value).__name__}")

def _ball_validator(*args) -> Callable:
    return validator(*args, pre=True, each_item=True, allow_reuse=True)(deserialize_optional_ball)

def _complex_validator(*args) -> Callable:
    return validator(*args, pre=True, each_item=True, allow_reuse=True)(deserialize_optional_complex)

def _matrix_validator(*args) -> Callable:
    return validator(*args, pre=True, allow_reuse=True)(deserialize_matrix)

def _float_matrix_validator(*args) -> Callable:
    return validator(*args, pre=True, allow_reuse=True)(deserialize_float_matrix)

class CertificateModel(BaseModel):
    """Immutable record whose ball fields serialize as decimal ball strings.

    Candidate matrices (FloatMatrix) serialize exactly as mantissa-exponent pairs.
    """

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False
        json_encoders = {
            arb: ball_to_str,
            acb: ball_to_str,
            BallMatrix: lambda m: m.to_strings(),
            FloatMatrix: lambda m: m.to_dyadic(),
        }

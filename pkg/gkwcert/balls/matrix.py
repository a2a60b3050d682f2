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

from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np

from flint import arb, acb, acb_mat

from .scalar import (Ball, DimensionError, Number, abs_upper, ball_to_str, deserialize_ball, dyadic_from_str, dyadic_to_str,
                     to_complex, upper_max)
from ..utils import working_precision

class BallMatrix:
    """Dense complex ball matrix with fixed dimensions.

    Instances never change after construction; every operation returns a new
    matrix. Products and sums delegate to Arb, whose kernels are deterministic
    for a given precision.
    """
    __slots__ = ('_mat',)

    def __init__(self, entries: Union[acb_mat, Sequence[Sequence[Number]], 'BallMatrix']):
        if isinstance(entries, BallMatrix):
            mat = acb_mat(entries._mat)
        elif isinstance(entries, acb_mat):
            mat = acb_mat(entries)
        else:
            rows = [list(row) for row in entries]
            if not rows or not rows[0]:
                raise DimensionError("matrices must have positive dimensions")
            width = len(rows[0])
            if any(len(row) != width for row in rows):
                raise DimensionError("ragged matrix rows")
            mat = acb_mat([[to_complex(x) for x in row] for row in rows])
        if mat.nrows() == 0 or mat.ncols() == 0:
            raise DimensionError("matrices must have positive dimensions")
        self._mat = mat

    @classmethod
    def zeros(cls, rows: int, cols: int) -> 'BallMatrix':
        return cls(acb_mat(rows, cols))

    @classmethod
    def identity(cls, n: int) -> 'BallMatrix':
        mat = acb_mat(n, n)
        for i in range(n):
            mat[i, i] = 1
        return cls(mat)

    @classmethod
    def diagonal(cls, values: Sequence[Number]) -> 'BallMatrix':
        mat = acb_mat(len(values), len(values))
        for i, value in enumerate(values):
            mat[i, i] = to_complex(value)
        return cls(mat)

    @classmethod
    def column(cls, values: Sequence[Number]) -> 'BallMatrix':
        return cls([[value] for value in values])

    @property
    def rows(self) -> int:
        return self._mat.nrows()

    @property
    def cols(self) -> int:
        return self._mat.ncols()

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, index: Tuple[int, int]) -> acb:
        i, j = index
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"entry ({i}, {j}) outside a {self.rows}x{self.cols} matrix")
        return self._mat[i, j]

    def entries(self) -> List[List[acb]]:
        return [[self._mat[i, j] for j in range(self.cols)] for i in range(self.rows)]

    def row(self, i: int) -> List[acb]:
        return [self._mat[i, j] for j in range(self.cols)]

    def col(self, j: int) -> List[acb]:
        return [self._mat[i, j] for i in range(self.rows)]

    def diag(self) -> List[acb]:
        return [self._mat[i, i] for i in range(min(self.rows, self.cols))]

    def submatrix(self, r0: int, r1: int, c0: int, c1: int) -> 'BallMatrix':
        return type(self)([[self._mat[i, j] for j in range(c0, c1)] for i in range(r0, r1)])

    def adjoint(self) -> 'BallMatrix':
        mat = acb_mat(self.cols, self.rows)
        for i in range(self.rows):
            for j in range(self.cols):
                mat[j, i] = self._mat[i, j].conjugate()
        return type(self)(mat)

    def mid(self) -> 'BallMatrix':
        mat = acb_mat(self.rows, self.cols)
        for i in range(self.rows):
            for j in range(self.cols):
                mat[i, j] = self._mat[i, j].mid()
        return BallMatrix(mat)

    def upper_triangular(self) -> 'BallMatrix':
        mat = acb_mat(self._mat)
        for i in range(self.rows):
            for j in range(min(i, self.cols)):
                mat[i, j] = 0
        return type(self)(mat)

    def max_radius(self) -> arb:
        return upper_max(*(part.rad() for row in self.entries() for entry in row for part in (entry.real, entry.imag)))

    def is_finite(self) -> bool:
        return all(x.is_finite() for row in self.entries() for x in row)

    def contains(self, other: 'BallMatrix') -> bool:
        if self.shape != other.shape:
            return False
        return all(self[i, j].contains(other[i, j]) for i in range(self.rows) for j in range(self.cols))

    def overlaps(self, other: 'BallMatrix') -> bool:
        if self.shape != other.shape:
            return False
        return all(self[i, j].overlaps(other[i, j]) for i in range(self.rows) for j in range(self.cols))

    def to_acb_mat(self) -> acb_mat:
        return acb_mat(self._mat)

    def to_numpy(self) -> np.ndarray:
        return np.array([[complex(float(x.real.mid()), float(x.imag.mid())) for x in row] for row in self.entries()],
                        dtype=np.complex128)

    def to_strings(self) -> List[List[str]]:
        return [[ball_to_str(x) for x in row] for row in self.entries()]

    @classmethod
    def from_strings(cls, rows: Iterable[Iterable[str]]) -> 'BallMatrix':
        return cls([[deserialize_ball(x) for x in row] for row in rows])

    def _check_same_shape(self, other: 'BallMatrix'):
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: 'BallMatrix') -> 'BallMatrix':
        self._check_same_shape(other)
        return BallMatrix(self._mat + other._mat)

    def __sub__(self, other: 'BallMatrix') -> 'BallMatrix':
        self._check_same_shape(other)
        return BallMatrix(self._mat - other._mat)

    def __neg__(self) -> 'BallMatrix':
        return BallMatrix(-self._mat)

    def __mul__(self, other: Union['BallMatrix', Number]) -> 'BallMatrix':
        if isinstance(other, BallMatrix):
            if self.cols != other.rows:
                raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
            return BallMatrix(self._mat*other._mat)
        return BallMatrix(self._mat*to_complex(other))

    def __rmul__(self, other: Number) -> 'BallMatrix':
        return BallMatrix(self._mat*to_complex(other))

    __matmul__ = __mul__

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.rows}x{self.cols})"


class FloatMatrix(BallMatrix):
    """Candidate matrix: exact midpoints only, no radii.

    Used for unvalidated data (approximate Schur factors, SVD candidates) that
    certification re-checks in ball arithmetic.
    """
    __slots__ = ()

    def __init__(self, entries):
        if isinstance(entries, np.ndarray):
            if entries.ndim != 2:
                raise DimensionError("FloatMatrix needs a 2-d array")
            if not np.all(np.isfinite(entries)):
                raise ValueError("FloatMatrix entries must be finite")
            entries = [[acb(complex(x).real, complex(x).imag) for x in row] for row in entries]
        super().__init__(entries)
        for i in range(self.rows):
            for j in range(self.cols):
                entry = self._mat[i, j]
                if not entry.is_finite():
                    raise ValueError("FloatMatrix entries must be finite")
                self._mat[i, j] = entry.mid()

    def as_ball(self) -> BallMatrix:
        return BallMatrix(self._mat)

    def to_dyadic(self) -> List[List[List[str]]]:
        """Exact [real, imag] mantissa-exponent pairs; reloading gives back the same matrix bit for bit."""
        return [[[dyadic_to_str(x.real), dyadic_to_str(x.imag)] for x in row] for row in self.entries()]

    @classmethod
    def from_dyadic(cls, rows: Iterable[Iterable[Sequence[str]]]) -> 'FloatMatrix':
        entries = []
        for row in rows:
            entries.append([])
            for pair in row:
                if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                    raise ValueError(f"candidate entries are [real, imag] dyadic pairs, not {pair!r}")
                entries[-1].append(acb(dyadic_from_str(pair[0]), dyadic_from_str(pair[1])))
        matrix = cls(entries)
        if any(not matrix[i, j] == entries[i][j] for i in range(matrix.rows) for j in range(matrix.cols)):
            raise ValueError("candidate matrix did not reload exactly")
        return matrix


def mat_ops(op: str, A: BallMatrix, B: Union[BallMatrix, Number] = None, prec: int = None) -> BallMatrix:
    """Dispatch one matrix operation; `prec` defaults to the current working precision."""
    def run():
        if op == 'add':
            return A + B
        elif op == 'sub':
            return A - B
        elif op == 'mul':
            if not isinstance(B, BallMatrix):
                raise DimensionError("mul needs two matrices; use scalar-mul for scalars")
            return A*B
        elif op == 'scalar-mul':
            return A*B
        elif op == 'transpose-conjugate':
            return A.adjoint()
        raise ValueError(f"unknown matrix operation {op!r}")

    if prec is None:
        return run()
    with working_precision(prec):
        return run()

def vector_norm_upper(values: Iterable[Ball]) -> arb:
    total = arb(0)
    for value in values:
        total += abs_upper(value)**2
    return total.sqrt().upper()

def norm2_upper(A: BallMatrix) -> arb:
    """Upper bound of the spectral norm of every matrix in the enclosure.

    min(sqrt(|A|_1 |A|_inf), |A|_F) on entrywise magnitude upper bounds.
    """
    mags = [[abs_upper(x) for x in row] for row in A.entries()]
    zero = arb(0)
    row_sums = [sum(row, zero).upper() for row in mags]
    col_sums = [sum((mags[i][j] for i in range(A.rows)), zero).upper() for j in range(A.cols)]
    frobenius = sum((x*x for row in mags for x in row), zero).sqrt().upper()
    inf_norm = upper_max(*row_sums)
    one_norm = upper_max(*col_sums)
    mixed = (one_norm*inf_norm).sqrt().upper()
    return mixed if mixed < frobenius else frobenius

def identity_defect(Q: BallMatrix) -> BallMatrix:
    """I - Q*Q, the orthogonality defect of a candidate unitary."""
    return BallMatrix.identity(Q.cols) - Q.adjoint()*Q

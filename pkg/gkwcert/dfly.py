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
import math

from fractions import Fraction

from typing import List, Optional, Sequence, Tuple

import numpy as np

from flint import arb, acb, fmpq
from pydantic import root_validator

from .balls import BallMatrix, to_ball, to_complex, abs_lower, abs_upper, upper_max
from .linalg import CertificationError, ContourNotCertified, contour_resolvent_sup
from .models.domain import CertificateModel, _ball_validator, _matrix_validator
from .utils import parallel_map, working_precision

logger = logging.getLogger(__name__)

DEFAULT_WEIGHTS = (1, 2, 4, 8)
# the first coordinate is only controlled in the weak norm
DEFAULT_STRONG_COLUMNS = (1, 2, 3)
DEFAULT_PREC = 128

class DFLYConditionFailed(CertificationError):
    gate = "dfly"

    def __init__(self, message: str, margin: arb):
        super().__init__(message)
        self.margin = margin

class DFLYConstants(CertificateModel):
    """One-step bounds |Lu|_s <= a|u|_s + b|u|_w, |Lu|_w <= M|u|_w plus the two-norm geometry."""
    a: arb
    b: arb
    M: arb
    E_sw: arb
    E_k_ws: arb
    delta_k: arb
    mu: Optional[arb] = None

    _balls = _ball_validator('a', 'b', 'M', 'E_sw', 'E_k_ws', 'delta_k', 'mu')

    @root_validator(skip_on_failure=True)
    def ordered_rates(cls, values):
        a, M, mu = values['a'], values['M'], values.get('mu')
        if not (a > 0 and values['b'] >= 0 and M > 0):
            raise ValueError("DFLY constants must be positive")
        if mu is not None and not (a < mu and mu < M):
            raise ValueError(f"mu = {mu} must lie strictly between a = {a} and M = {M}")
        return values

    @property
    def q_bar(self) -> arb:
        if self.mu is None:
            raise ValueError("q_bar needs mu")
        return abs((self.mu/self.M).log())/abs((self.a/self.M).log())

    @property
    def C_star(self) -> arb:
        return 1 + self.b/(self.M - self.a)

    @property
    def N_k(self) -> int:
        # the truncated Laurent identity needs N >= 1
        if not self.a < self.M:
            raise ValueError("N_k needs a < M")
        ratio = (self.E_k_ws.log()/abs((self.a/self.M).log())).upper()
        return max(1, math.ceil(float(ratio)))

    def b_n(self, n: int) -> arb:
        return dfly_iterate(self, n)[1]

class TwoNormExample(CertificateModel):
    """Pair (L, L_k) of small matrices with weighted-max strong and plain-max weak norms."""
    k: int
    L: BallMatrix
    L_k: BallMatrix
    weights: List[int]
    strong_columns: List[int]
    constants: DFLYConstants

    _matrices = _matrix_validator('L', 'L_k')

class ExclusionReport(CertificateModel):
    passed: bool
    margin: Optional[arb]
    Mk_sup: Optional[arb]
    strong_sup: Optional[arb]

    _balls = _ball_validator('margin', 'Mk_sup', 'strong_sup')

class ConvergenceRow(CertificateModel):
    k: int
    delta_k: arb
    Mk_sup: Optional[arb]
    margin: Optional[arb]
    passed: bool
    multiplicity: int
    projector_diff: float

    _balls = _ball_validator('delta_k', 'Mk_sup', 'margin')

def dfly_iterate(c: DFLYConstants, n: int) -> Tuple[arb, arb]:
    """(a^n, b_n) with b_n = b * sum_{j<n} a^(n-1-j) M^j."""
    if n < 1:
        raise ValueError("iteration count must be at least 1")
    total = arb(0)
    for j in range(n):
        total += c.a**(n - 1 - j)*c.M**j
    return c.a**n, c.b*total

def dfly_iterate_on_range(c: DFLYConstants, n: int) -> arb:
    """|L_k^n f|_s <= (a^n E_k,w->s + b_n)|f|_w for f in the range of the discretization."""
    a_n, b_n = dfly_iterate(c, n)
    return (a_n*c.E_k_ws + b_n).upper()

def laurent_partial_sum(z_abs: arb, M: arb, N: int) -> arb:
    """S_N = (1/|z|) sum_{l<N} (M/|z|)^l."""
    z_abs = to_ball(z_abs)
    ratio = to_ball(M)/z_abs
    return (sum((ratio**l for l in range(N)), arb(0))/z_abs).upper()

def _modulus_lower(z) -> arb:
    return abs_lower(to_complex(z))

def weak_to_strong(z: acb, c: DFLYConstants, Mk_z: arb) -> arb:
    """Strong resolvent bound for L from the weak resolvent of L_k at z.

    Only meaningful for |z| > a. For a weak contraction the weak resolvent of L itself is unbounded
    inside the unit disc, which is why the bound goes through the finite-rank L_k.
    """
    z_abs = _modulus_lower(z)
    leak = c.b*Mk_z*c.delta_k
    margin = z_abs - c.a - leak
    if not margin > 0:
        raise DFLYConditionFailed(f"|z| > a + b Mk delta not certified, margin {margin}", margin)
    return ((c.b*Mk_z*c.E_sw + 1)/margin).upper()

def strong_from_weak(z: acb, c: DFLYConstants, Mk_z: arb) -> arb:
    """Strong resolvent bound for L_k itself: (b Mk E_sw + 1)/(|z| - a)."""
    margin = _modulus_lower(z) - c.a
    if not margin > 0:
        raise DFLYConditionFailed(f"|z| > a not certified, margin {margin}", margin)
    return ((c.b*Mk_z*c.E_sw + 1)/margin).upper()

def rk_minus_r_bound(Mk_z: arb, delta_k: arb, Ks_z: arb) -> arb:
    return (to_ball(Mk_z)*to_ball(delta_k)*to_ball(Ks_z)).upper()

def true_to_fine(z: acb, N: int, c: DFLYConstants, K_z: arb) -> arb:
    """Weak resolvent bound for L_k from a certified strong resolvent bound K_z of L."""
    if N < 1:
        raise ValueError("the truncated Laurent identity needs N >= 1")
    z_abs = _modulus_lower(z)
    if not z_abs > c.a:
        raise DFLYConditionFailed(f"|z| > a not certified", z_abs - c.a)
    S_N = laurent_partial_sum(z_abs, c.M, N)
    damping = dfly_iterate_on_range(c, N)
    decay = 1/z_abs**N
    beta = (decay*c.delta_k*K_z*damping).upper()
    if not beta < 1:
        raise DFLYConditionFailed(f"true-to-fine condition failed: beta = {beta}", 1 - beta)
    return ((S_N + decay*c.E_sw*K_z*damping)/(1 - beta)).upper()

def growth_bound(c: DFLYConstants, K_z: arb) -> arb:
    """Weak resolvent growth of L_k in E_k,w->s, valid for |z| >= mu."""
    if c.mu is None:
        raise ValueError("growth bound needs mu")
    factor = c.M/c.mu*c.E_k_ws**c.q_bar
    denominator = 1 - factor*c.delta_k*K_z*c.C_star
    if not denominator > 0:
        raise DFLYConditionFailed(f"growth denominator not positive: {denominator}", denominator)
    return (factor/denominator*(1/(c.M - c.mu) + c.E_sw*K_z*c.C_star)).upper()

def dfly_exclusion(c: DFLYConstants, L_k: BallMatrix, center: acb, rho: arb, m: int = 64) -> ExclusionReport:
    """Check inf (|z| - a) > b delta_k sup Mk on the circle and bound sup R_s(z, L).

    Mk is bounded on the whole circle by sqrt(n) over the sampled sigma_min bound.
    """
    center, rho = to_complex(center), to_ball(rho)
    try:
        contour = contour_resolvent_sup(L_k, center, rho, m)
    except ContourNotCertified as e:
        logger.info(f"circle at {center} not in the resolvent set of L_k: {e}")
        return ExclusionReport(passed=False, margin=None, Mk_sup=None, strong_sup=None)
    Mk_sup = (arb(L_k.rows).sqrt()*contour.M_T).upper()
    z_inf = abs_lower(abs(center) - rho)
    margin = (z_inf - c.a - c.b*c.delta_k*Mk_sup).lower()
    if not margin > 0:
        logger.info(f"exclusion condition fails at delta_k={c.delta_k}: margin {margin}")
        return ExclusionReport(passed=False, margin=margin, Mk_sup=Mk_sup, strong_sup=None)
    strong_sup = ((c.b*Mk_sup*c.E_sw + 1)/margin).upper()
    return ExclusionReport(passed=True, margin=margin, Mk_sup=Mk_sup, strong_sup=strong_sup)

def weak_norm_ss(X: BallMatrix) -> arb:
    """|X|_{w->w}: largest absolute row sum."""
    return upper_max(*(sum((abs_upper(x) for x in row), arb(0)) for row in X.entries()))

def norm_s_to_w(X: BallMatrix, weights: Sequence[int]) -> arb:
    return upper_max(*(sum((abs_upper(x)/w for x, w in zip(row, weights)), arb(0)) for row in X.entries()))

def norm_s_to_s(X: BallMatrix, weights: Sequence[int]) -> arb:
    return upper_max(*(weights[i]*sum((abs_upper(x)/w for x, w in zip(row, weights)), arb(0))
                       for i, row in enumerate(X.entries())))

def dfly_constants(matrices: Sequence[BallMatrix], weights: Sequence[int], strong_columns: Sequence[int],
                   delta_k: arb, mu: arb = None) -> DFLYConstants:
    """Constants valid for every matrix in `matrices`, read off row by row.

    Columns in strong_columns are charged to |u|_s, the rest to |u|_w.
    """
    a_rows, b_rows, M_rows = [], [], []
    for X in matrices:
        for i, row in enumerate(X.entries()):
            a_rows.append(weights[i]*sum((abs_upper(row[j])/weights[j] for j in strong_columns), arb(0)))
            b_rows.append(weights[i]*sum((abs_upper(row[j]) for j in range(len(row)) if j not in strong_columns),
                                         arb(0)))
            M_rows.append(sum((abs_upper(x) for x in row), arb(0)))
    a, b, M = upper_max(*a_rows), upper_max(*b_rows), upper_max(*M_rows)
    if mu is None:
        mu = (a + (M - a)/4).mid()
    return DFLYConstants(a=a, b=b, M=M, E_sw=(arb(1)/min(weights)).upper(), E_k_ws=arb(max(weights)),
                         delta_k=to_ball(delta_k).upper(), mu=mu)

def default_base() -> BallMatrix:
    return BallMatrix([[Fraction(3, 4), Fraction(1, 8), Fraction(1, 16), Fraction(1, 32)],
                       [0, Fraction(3, 8), Fraction(1, 16), Fraction(1, 32)],
                       [0, 0, Fraction(1, 8), Fraction(1, 32)],
                       [0, 0, 0, Fraction(1, 16)]])

PERTURBATIONS = ("dense", "lower")

def default_perturbation(pattern: str = "dense") -> BallMatrix:
    """Sign pattern ((-1)^(i+j)/8), on every entry or only strictly below the diagonal."""
    if pattern not in PERTURBATIONS:
        raise ValueError(f"unknown perturbation pattern {pattern!r}")
    return BallMatrix([[Fraction((-1)**(i + j), 8) if pattern == "dense" or i > j else 0 for j in range(4)]
                       for i in range(4)])

def default_family(k: int, scale: int = 1, prec: int = DEFAULT_PREC, pattern: str = "dense") -> TwoNormExample:
    """L_k = L + scale 2^-k P for the perturbation pattern P."""
    if k < 1:
        raise ValueError("family index starts at 1")
    with working_precision(prec):
        L = default_base()
        L_k = L + default_perturbation(pattern)*arb(fmpq(scale, 2**k))
        delta = norm_s_to_w(L_k - L, DEFAULT_WEIGHTS)
        constants = dfly_constants([L, L_k], DEFAULT_WEIGHTS, DEFAULT_STRONG_COLUMNS, delta)
    return TwoNormExample(k=k, L=L, L_k=L_k, weights=list(DEFAULT_WEIGHTS),
                          strong_columns=list(DEFAULT_STRONG_COLUMNS), constants=constants)

def check_one_step(example: TwoNormExample) -> bool:
    """Ball check of both one-step inequalities on the unit vectors and the all-ones vector."""
    c, n = example.constants, example.L.rows
    vectors = [[arb(1) if i == j else arb(0) for i in range(n)] for j in range(n)] + [[arb(1)]*n]
    for X in (example.L, example.L_k):
        for u in vectors:
            Xu = (X*BallMatrix.column(u)).col(0)
            strong_u = upper_max(*(w*abs(x) for w, x in zip(example.weights, u)))
            weak_u = upper_max(*(abs(x) for x in u))
            strong_Xu = upper_max(*(w*abs(x) for w, x in zip(example.weights, Xu)))
            weak_Xu = upper_max(*(abs(x) for x in Xu))
            if strong_Xu > c.a*strong_u + c.b*weak_u or weak_Xu > c.M*weak_u:
                return False
    return True

def _to_float(X: BallMatrix) -> np.ndarray:
    return X.to_numpy()

def oracle_weak_resolvent(X: BallMatrix, z: complex) -> float:
    R = np.linalg.inv(z*np.eye(X.rows) - _to_float(X))
    return float(np.abs(R).sum(axis=1).max())

def _weighted(R: np.ndarray, weights: Sequence[int], strong_target: bool) -> float:
    w = np.asarray(weights, dtype=float)
    scaled = np.abs(R)/w[np.newaxis, :]
    if strong_target:
        scaled = scaled*w[:, np.newaxis]
    return float(scaled.sum(axis=1).max())

def oracle_strong_resolvent(X: BallMatrix, z: complex, weights: Sequence[int]) -> float:
    R = np.linalg.inv(z*np.eye(X.rows) - _to_float(X))
    return _weighted(R, weights, True)

def oracle_rk_minus_r(L: BallMatrix, L_k: BallMatrix, z: complex, weights: Sequence[int]) -> float:
    I = np.eye(L.rows)
    D = np.linalg.inv(z*I - _to_float(L_k)) - np.linalg.inv(z*I - _to_float(L))
    return _weighted(D, weights, False)

def _riesz_projector(X: np.ndarray, center: complex, rho: float) -> Tuple[np.ndarray, int]:
    values, vectors = np.linalg.eig(X)
    mask = np.abs(values - center) < rho
    P = vectors @ np.diag(mask.astype(float)) @ np.linalg.inv(vectors)
    return P, int(mask.sum())

def dfly_convergence_suite(kmax: int, center: complex = 0.75, rho: float = 0.15, m: int = 64,
                           scale: int = 1, pattern: str = "dense") -> List[ConvergenceRow]:
    """Exclusion, multiplicity and projector convergence along the default family k = 1..kmax."""
    def row(k: int) -> ConvergenceRow:
        example = default_family(k, scale, pattern=pattern)
        report = dfly_exclusion(example.constants, example.L_k, acb(center), arb(rho), m)
        P, _ = _riesz_projector(_to_float(example.L), center, rho)
        P_k, count = _riesz_projector(_to_float(example.L_k), center, rho)
        diff = _weighted(P_k - P, example.weights, False)
        return ConvergenceRow(k=k, delta_k=example.constants.delta_k, Mk_sup=report.Mk_sup, margin=report.margin,
                              passed=report.passed, multiplicity=count, projector_diff=diff)

    with working_precision(DEFAULT_PREC):
        rows = parallel_map(row, range(1, kmax + 1), "dfly_suite")
    for r in rows:
        logger.info(f"k={r.k}: delta={r.delta_k}, passed={r.passed}, multiplicity {r.multiplicity}, "
                    f"|P_k - P| = {r.projector_diff:.3e}")
    return rows

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

import csv
import io
import logging

from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from dotenv import dotenv_values
from flint import arb, acb
from pydantic import BaseModel, validator, root_validator

from .balls import ball_to_str, to_ball
from .certify import (EigenEnclosure, MultiplicityAmbiguous, OperatorContext, WindowOptions, certify_window,
                      default_windows, operator_context, propagate_window, spectrum_candidates)
from .expansion import ExpansionCertificate, build_expansion
from .gkw import GKWMatrix, PrecisionExhausted, assemble_matrix, best_c2
from .linalg import CertificationError, SchurCertificate, approx_schur, certify_schur
from .models.domain import CertificateModel
from .settings import settings
from .store import CertificateStore

logger = logging.getLogger(__name__)

TABLE_COLUMNS = ["K", "window", "multiplicity", "eigenvalue", "radius", "alpha", "theta", "M_inf", "propagated"]

class PipelineConfig(BaseModel):
    K_coarse: int = 32
    K_fine: int = 64
    prec: int = 256
    windows: int = 3
    m: int = settings.contour_samples
    radius_factor: float = settings.radius_factor
    n_full: int = settings.n_full
    block_size: int = settings.block_size
    modes: int = 3
    out_dir: str = "gkwcert-out"
    max_prec: int = 1024
    max_m: int = settings.max_contour_samples
    max_K: int = 128

    @validator('K_coarse', 'K_fine', 'prec', 'windows', 'm', 'n_full', 'block_size', 'modes', 'max_prec', 'max_m',
               'max_K')
    def positive(cls, value, field):
        if value <= 0:
            raise ValueError(f"{field.name} must be positive")
        return value

    @validator('radius_factor')
    def proper_factor(cls, value):
        if not 0 < value < 1:
            raise ValueError("radius_factor must lie in (0, 1)")
        return value

    @root_validator(skip_on_failure=True)
    def consistent_levels(cls, values):
        if values['K_coarse'] > values['K_fine']:
            raise ValueError("K_coarse must not exceed K_fine")
        if values['K_fine'] > values['max_K']:
            raise ValueError("K_fine exceeds max_K")
        if values['modes'] > values['windows']:
            raise ValueError("cannot expand in more modes than certified windows")
        if values['prec'] > values['max_prec'] or values['m'] > values['max_m']:
            raise ValueError("starting precision and sample count must lie within the escalation limits")
        return values

    @classmethod
    def from_file(cls, path) -> 'PipelineConfig':
        """Read a plain key=value file; keys match field names case-insensitively."""
        names = {name.lower(): name for name in cls.__fields__}
        values = {}
        for key, value in dotenv_values(path).items():
            name = names.get(key.strip().lower())
            if name is None:
                raise ValueError(f"unknown configuration key {key!r}")
            values[name] = value
        return cls.parse_obj(values)

class Attempt(BaseModel):
    stage: str
    K: int
    prec: int
    m: int
    ok: bool
    gate: Optional[str] = None
    message: Optional[str] = None
    alpha: Optional[str] = None
    beta: Optional[str] = None
    s_star: Optional[str] = None

class EscalationExhausted(RuntimeError):

    def __init__(self, attempt: Attempt):
        super().__init__(f"escalation exhausted in {attempt.stage} at gate {attempt.gate}: {attempt.message}")
        self.attempt = attempt

class PipelineReport(CertificateModel):
    config: PipelineConfig
    attempts: List[Attempt]
    coarse: List[EigenEnclosure]
    fine: List[EigenEnclosure]
    expansion: Optional[ExpansionCertificate] = None
    store_hits: int
    store_lookups: int

    @property
    def success(self) -> bool:
        return self.expansion is not None and all(e.eigenvalue is not None for e in self.fine)

def _optional_str(value) -> Optional[str]:
    return None if value is None else ball_to_str(to_ball(value))

def _failed_attempt(stage: str, state: Dict[str, int], error: Exception) -> Attempt:
    if isinstance(error, PrecisionExhausted):
        gate = "precision"
    elif isinstance(error, CertificationError):
        gate = error.gate
    else:
        # windows or expansion could not be set up at this level
        gate = "setup"
    return Attempt(stage=stage, ok=False, gate=gate, message=str(error),
                   alpha=_optional_str(getattr(error, 'alpha', None)), beta=_optional_str(getattr(error, 'beta', None)),
                   s_star=_optional_str(getattr(error, 's_star', None)), **state)

def _next_state(state: Dict[str, int], knobs: Sequence[str], gate: str, config: PipelineConfig,
                K_limit: int) -> Optional[Dict[str, int]]:
    # m is the cheapest knob, then precision, then degree
    for knob in knobs:
        if knob == 'm' and gate not in ("precision", "setup") and 2*state['m'] <= config.max_m:
            return dict(state, m=2*state['m'])
        if knob == 'prec' and 2*state['prec'] <= config.max_prec:
            return dict(state, prec=2*state['prec'])
        if knob == 'K' and state['K'] < K_limit:
            return dict(state, K=min(2*state['K'], K_limit))
    return None

def _escalate(stage: str, attempt: Callable, state: Dict[str, int], knobs: Sequence[str], config: PipelineConfig,
              attempts: List[Attempt], K_limit: int = None):
    while True:
        try:
            result = attempt(**state)
        except (CertificationError, PrecisionExhausted, ValueError) as e:
            failed = _failed_attempt(stage, state, e)
            attempts.append(failed)
            state = _next_state(state, knobs, failed.gate, config, K_limit or state['K'])
            if state is None:
                raise EscalationExhausted(failed)
            logger.warning(f"{stage} failed at gate {failed.gate}, retrying with K={state['K']}, "
                           f"prec={state['prec']}, m={state['m']}")
            continue
        attempts.append(Attempt(stage=stage, ok=True, **state))
        return result, state

def stored_schur(store: CertificateStore, matrix: GKWMatrix) -> SchurCertificate:
    """Schur certificate of an assembled matrix, reloaded from the store when present."""
    def schur():
        Q, T = approx_schur(matrix.A, matrix.prec)
        return certify_schur(matrix.A, Q, T, matrix.prec)

    return store.fetch("schur", {'K': matrix.K, 'prec': matrix.prec}, SchurCertificate, schur, matrix.K)

def stored_context(store: CertificateStore, K: int, prec: int, c2: arb = None) -> OperatorContext:
    matrix = store.fetch("matrix", {'K': K, 'prec': prec}, GKWMatrix, lambda: assemble_matrix(K, prec), K)
    return operator_context(matrix, c2, stored_schur(store, matrix))

class _Levels:
    """Store-backed construction of operator contexts."""

    def __init__(self, store: CertificateStore):
        self.store = store
        self._c2 = {}

    def c2(self, prec: int) -> arb:
        if prec not in self._c2:
            self._c2[prec] = best_c2(prec)
        return self._c2[prec]

    def context(self, K: int, prec: int) -> OperatorContext:
        return stored_context(self.store, K, prec, self.c2(prec))

def _window_parameters(ctx: OperatorContext, index: int, center: acb, rho: arb, m: int, stage: str) -> dict:
    return {'K': ctx.K, 'prec': ctx.prec, 'index': index, 'center': ball_to_str(center), 'rho': ball_to_str(rho),
            'm': m, 'stage': stage}

def _keep(store: CertificateStore, kind: str, parameters: dict, enclosure: EigenEnclosure):
    key = store.key(kind, parameters)
    if enclosure.eigenvalue is not None:
        store.offer_enclosure(key, enclosure.K, enclosure.index, ball_to_str(enclosure.eigenvalue),
                              float(enclosure.radius.upper()))

def _certify_coarse(levels: _Levels, config: PipelineConfig, K: int, prec: int, m: int):
    store = levels.store
    ctx = levels.context(K, prec)
    windows = default_windows(spectrum_candidates(ctx.schur), config.windows, config.radius_factor)
    enclosures = []
    for offset, (center, rho) in enumerate(windows):
        index = offset + 1
        split = config.block_size if index > config.n_full and config.block_size < ctx.schur.size else None
        # the coarse level only has to isolate; the projector gate is checked after propagation
        options = WindowOptions(m=m, split=split, require_projector=False)
        parameters = _window_parameters(ctx, index, center, rho, m, "coarse")
        enclosure = store.fetch("window", parameters, EigenEnclosure,
                                lambda: certify_window(ctx, center, rho, options, index), K)
        if enclosure.multiplicity != 1:
            raise MultiplicityAmbiguous(f"coarse window {index} holds {enclosure.multiplicity} eigenvalues")
        _keep(store, "window", parameters, enclosure)
        enclosures.append(enclosure)
    return ctx, enclosures

def _certify_fine(levels: _Levels, config: PipelineConfig, coarse_ctx: OperatorContext,
                  coarse: List[EigenEnclosure], K: int, prec: int, m: int):
    store = levels.store
    ctx = levels.context(K, prec)
    fine, keys = [], []
    for enclosure in coarse:
        parameters = _window_parameters(ctx, enclosure.index, enclosure.center, enclosure.rho, m, "fine")
        parameters['coarse'] = {'K': coarse_ctx.K, 'prec': coarse_ctx.prec}
        propagated = store.fetch("window", parameters, EigenEnclosure,
                                 lambda: propagate_window(enclosure, coarse_ctx, ctx), ctx.K)
        _keep(store, "window", parameters, propagated)
        fine.append(propagated)
        keys.append(store.key("window", parameters))

    parameters = {'K': ctx.K, 'prec': ctx.prec, 'm': m, 'modes': config.modes, 'windows': keys[:config.modes]}
    expansion = store.fetch("expansion", parameters, ExpansionCertificate,
                            lambda: build_expansion(ctx, fine[:config.modes], m), ctx.K)
    return fine, expansion

def run_pipeline(config: PipelineConfig, store: CertificateStore = None) -> PipelineReport:
    """Coarse isolation, propagation to the fine level, then the spectral expansion.

    Gate failures escalate m, then precision, then the coarse degree, each
    within the configured limits; every attempt is recorded in the report.
    """
    store = store or CertificateStore()
    levels = _Levels(store)
    attempts = []
    logger.info(f"pipeline K={config.K_coarse} -> {config.K_fine} at {config.prec} bits, {config.windows} windows")

    state = {'K': config.K_coarse, 'prec': config.prec, 'm': config.m}
    (coarse_ctx, coarse), state = _escalate(
        "coarse", lambda K, prec, m: _certify_coarse(levels, config, K, prec, m), state, ['m', 'prec', 'K'],
        config, attempts, K_limit=config.K_fine)

    state = dict(state, K=config.K_fine)
    (fine, expansion), state = _escalate(
        "fine", lambda K, prec, m: _certify_fine(levels, config, coarse_ctx, coarse, K, prec, m), state,
        ['m', 'prec'], config, attempts)

    report = PipelineReport(config=config, attempts=attempts, coarse=coarse, fine=fine, expansion=expansion,
                            store_hits=store.hits, store_lookups=store.lookups)
    logger.info(f"pipeline finished: {len(attempts)} attempts, store hit rate {store.hit_rate:.0%}")
    return report

def _cell(value) -> str:
    return "" if value is None else ball_to_str(value)

def table_row(enclosure: EigenEnclosure) -> List[str]:
    radius = None if enclosure.radius is None else enclosure.radius.upper()
    return [str(enclosure.K), str(enclosure.index), str(enclosure.multiplicity), _cell(enclosure.eigenvalue),
            _cell(radius), _cell(enclosure.alpha), _cell(enclosure.theta), _cell(enclosure.M_inf),
            "yes" if enclosure.propagated else "no"]

def render_csv(rows: Sequence[List[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(TABLE_COLUMNS)
    writer.writerows(rows)
    return buffer.getvalue()

def render_text(rows: Sequence[List[str]]) -> str:
    table = [TABLE_COLUMNS] + [list(row) for row in rows]
    widths = [max(len(row[i]) for row in table) for i in range(len(TABLE_COLUMNS))]
    lines = ["  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip() for row in table]
    return "\n".join(lines) + "\n"

def emit_tables(store: CertificateStore, out_dir: str = None) -> Tuple[Path, Path]:
    """Write the kept eigenvalue enclosures as eigenvalues.csv and eigenvalues.txt."""
    out = Path(out_dir or PipelineConfig().out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = [table_row(enclosure) for _, _, enclosure in store.best_enclosures(EigenEnclosure)]
    csv_path, text_path = out/"eigenvalues.csv", out/"eigenvalues.txt"
    csv_path.write_text(render_csv(rows), encoding='utf-8')
    text_path.write_text(render_text(rows), encoding='utf-8')
    logger.info(f"wrote {len(rows)} rows to {csv_path} and {text_path}")
    return csv_path, text_path

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

import json
import logging

from enum import Enum
from pathlib import Path
from typing import List, Optional, Tuple

import typer
from flint import arb, acb

from .balls import ball_to_str
from .certify import (EigenEnclosure, OperatorContext, WindowOptions, certify_window, certify_windows, default_windows,
                      gap_window, operator_context, spectrum_candidates)
from .dfly import ConvergenceRow, dfly_convergence_suite
from .expansion import build_expansion, expansion_eval, tail_bound
from .gkw import (GKWMatrix, PrecisionExhausted, assemble_matrix, best_c2, branch_geometry_check, c2_bound,
                  check_eigen_decay, truncation_budget)
from .linalg import CertificationError, approx_schur, certify_schur
from .models.domain import CertificateModel
from .pipeline import (EscalationExhausted, PipelineConfig, emit_tables, render_text, run_pipeline, stored_context,
                       stored_schur, table_row)
from .settings import settings, prec_for_degree
from .store import CertificateStore

logging.basicConfig()
logger = logging.getLogger(__name__)

app = typer.Typer()
gkw_app = typer.Typer(help="GKW matrix, truncation constants and budgets")
dfly_app = typer.Typer(help="two-norm perturbation bounds on synthetic families")
pipeline_app = typer.Typer(help="coarse-fine workflow and tables")
app.add_typer(gkw_app, name="gkw")
app.add_typer(dfly_app, name="dfly")
app.add_typer(pipeline_app, name="pipeline")

state = {}

class Family(str, Enum):
    dense = "dense"
    lower = "lower"

class EnclosureList(CertificateModel):
    enclosures: List[EigenEnclosure]
    failures: List[str] = []

class ConvergenceReport(CertificateModel):
    rows: List[ConvergenceRow]
    eventual_pass: bool

def _emit(model: CertificateModel, text: str):
    output = model.json(indent=2) if state['json'] else text
    if state['out'] is None:
        typer.echo(output)
    else:
        state['out'].write_text(output + "\n", encoding='utf-8')

def _store() -> Optional[CertificateStore]:
    if state['store'] is None:
        return None
    return CertificateStore(str(state['store']), f"sqlite:///{state['store']/'index.db'}")

def _context(K: int, prec: Optional[int]) -> OperatorContext:
    prec = prec or prec_for_degree(K)
    store = _store()
    if store is None:
        return operator_context(assemble_matrix(K, prec))
    ctx = stored_context(store, K, prec)
    logger.info(f"store {store.hits}/{store.lookups} hits for K={K} at {prec} bits")
    return ctx

def parse_windows(text: str, candidates: List[acb], factor: float = None) -> List[Tuple[int, acb, arb]]:
    """A range such as 1-5 selects default windows by index; c:r,c:r gives explicit circles numbered from 1."""
    if ':' in text:
        windows = []
        for index, item in enumerate(text.split(','), start=1):
            center, radius = item.split(':')
            z = complex(center.strip())
            windows.append((index, acb(z.real, z.imag), arb(radius.strip())))
        return windows
    if '-' in text:
        first, last = (int(part) for part in text.split('-'))
    else:
        first = last = int(text)
    if first < 1 or last < first:
        raise typer.BadParameter(f"bad window range {text!r}")
    circles = default_windows(candidates, last, factor)
    return [(index, *circles[index - 1]) for index in range(first, last + 1)]

@gkw_app.command(name="assemble")
def gkw_assemble(K: int = typer.Option(32, "--K"), prec: Optional[int] = None):
    prec = prec or prec_for_degree(K)
    try:
        matrix = assemble_matrix(K, prec)
    except PrecisionExhausted as e:
        typer.echo(f"precision exhausted: {e}", err=True)
        raise typer.Exit(code=1)
    store = _store()
    if store is not None:
        store.put("matrix", {'K': K, 'prec': prec}, matrix, K)
    _emit(matrix, f"assembled K={K} at {prec} bits, max radius {ball_to_str(matrix.A.max_radius())}, "
                  f"c2 {ball_to_str(matrix.c2)}, eps_K {ball_to_str(matrix.eps_K)}")

@gkw_app.command(name="schur")
def gkw_schur(K: int = typer.Option(32, "--K"), prec: Optional[int] = None):
    """Assemble (or reload) the matrix and certify its Schur pair; both are kept when a store is given."""
    prec = prec or prec_for_degree(K)
    store = _store()
    try:
        if store is None:
            matrix = assemble_matrix(K, prec)
            Q, T = approx_schur(matrix.A, prec)
            schur = certify_schur(matrix.A, Q, T, prec)
        else:
            matrix = store.fetch("matrix", {'K': K, 'prec': prec}, GKWMatrix, lambda: assemble_matrix(K, prec), K)
            schur = stored_schur(store, matrix)
    except (CertificationError, PrecisionExhausted) as e:
        typer.echo(f"{getattr(e, 'gate', 'precision')} gate failed: {e}", err=True)
        raise typer.Exit(code=1)
    _emit(schur, f"Schur certificate K={K} at {prec} bits, |E| <= {ball_to_str(schur.normE)}, "
                 f"|I - Q*Q| <= {ball_to_str(schur.delta)}")

@gkw_app.command(name="c2")
def gkw_c2(N: List[int] = typer.Option([1, 2, 3, 4, 5, 10, 100], "--N"), prec: int = 128):
    values = {n: c2_bound(n, prec) for n in N}
    if state['json']:
        typer.echo(json.dumps({str(n): ball_to_str(v) for n, v in values.items()}, indent=2))
    else:
        for n, value in values.items():
            typer.echo(f"{n:>6}  {value.str(12, radius=False)}  {ball_to_str(value)}")

@gkw_app.command(name="budget")
def gkw_budget(K: List[int] = typer.Option([48, 256], "--K"), prec: int = 128):
    c2 = best_c2(prec)
    budgets = [truncation_budget(k, c2, prec) for k in K]
    if state['json']:
        typer.echo(json.dumps([json.loads(b.json()) for b in budgets], indent=2))
    else:
        for budget in budgets:
            typer.echo(f"{budget.K:>6}  {budget.eps_K.str(6, radius=False)}")

@gkw_app.command(name="geometry")
def gkw_geometry(samples: int = 1000, seed: int = 0):
    report = branch_geometry_check(samples, seed)
    _emit(report, f"{report.passed}/{report.samples} samples certified, {report.undecided} undecided")

@app.command(name="certify")
def certify(K: int = typer.Option(32, "--K"), prec: Optional[int] = None, windows: str = "1-3",
            gap: Optional[int] = typer.Option(None, help="also certify the gap circle after candidate j"),
            m: Optional[int] = None, isolation_only: bool = False):
    """Certify spectral windows of the GKW operator; exit code 1 if any window fails."""
    try:
        ctx = _context(K, prec)
    except (CertificationError, PrecisionExhausted) as e:
        typer.echo(f"{getattr(e, 'gate', 'precision')} gate failed: {e}", err=True)
        raise typer.Exit(code=1)
    candidates = spectrum_candidates(ctx.schur)
    circles = parse_windows(windows, candidates)
    if gap is not None:
        circles.append((0, *gap_window(candidates, gap)))
    enclosures, failures = [], []
    for index, center, rho in circles:
        split = settings.block_size if index > settings.n_full and settings.block_size < ctx.schur.size else None
        options = WindowOptions(m=m, split=split, require_projector=not isolation_only)
        try:
            enclosures.append(certify_window(ctx, center, rho, options, index))
        except CertificationError as e:
            logger.error(f"window {index} failed at gate {e.gate}: {e}")
            failures.append(f"{index}: {e.gate}")
    for index in check_eigen_decay(enclosures, ctx.c2 if ctx.c2 is not None else ctx.C):
        failures.append(f"{index}: decay")

    report = EnclosureList(enclosures=enclosures, failures=failures)
    _emit(report, render_text([table_row(e) for e in enclosures]).rstrip())
    if failures:
        raise typer.Exit(code=1)

@app.command(name="expand")
def expand(K: int = typer.Option(96, "--K"), prec: Optional[int] = None, modes: int = 5,
           n: List[int] = typer.Option([1, 2, 4, 8], "--n"), grid: int = 21, j0: int = 2):
    """Spectral expansion of L^n 1 and the Gauss-Kuzmin error on a uniform grid of [0, 1]."""
    if grid < 2:
        raise typer.BadParameter("grid needs at least two points")
    try:
        ctx = _context(K, prec)
        circles = default_windows(spectrum_candidates(ctx.schur), modes)
        enclosures = certify_windows(ctx, circles)
        cert = build_expansion(ctx, enclosures)
    except (CertificationError, PrecisionExhausted) as e:
        typer.echo(f"{getattr(e, 'gate', 'precision')} gate failed: {e}", err=True)
        raise typer.Exit(code=1)

    xs = [arb(i)/(grid - 1) for i in range(grid)]
    lines = ["n,x,value_mid,value_rad,error_bound"]
    for steps in n:
        logger.info(f"n={steps}: tail bound {tail_bound(cert, steps)}")
        for x, value, error in expansion_eval(cert, steps, xs, j0):
            lines.append(f"{steps},{x.str(6, radius=False)},{value.mid().str(20, radius=False)},"
                         f"{ball_to_str(value.rad())},{ball_to_str(error)}")
    _emit(cert, "\n".join(lines))

@dfly_app.command(name="check")
def dfly_check(family: Family = Family.dense, kmax: int = 10, scale: int = 1, center: float = 0.75,
               rho: float = 0.15, m: int = 64):
    """Run the exclusion test along the family; exit code 1 unless it eventually passes with stable multiplicity."""
    rows = dfly_convergence_suite(kmax, center, rho, m, scale, family.value)
    start = len(rows)
    while start > 0 and rows[start - 1].passed:
        start -= 1
    eventual = start < len(rows) and len({r.multiplicity for r in rows[start:]}) == 1
    lines = [f"{'k':>3}  {'delta_k':>10}  {'margin':>10}  passed  multiplicity  |P_k - P|"]
    for r in rows:
        margin = "" if r.margin is None else r.margin.str(3, radius=False)
        lines.append(f"{r.k:>3}  {r.delta_k.str(3, radius=False):>10}  {margin:>10}  {str(r.passed):>6}  "
                     f"{r.multiplicity:>12}  {r.projector_diff:.3e}")
    _emit(ConvergenceReport(rows=rows, eventual_pass=eventual), "\n".join(lines))
    if not eventual:
        raise typer.Exit(code=1)

@pipeline_app.command(name="run")
def pipeline_run(config: Optional[Path] = typer.Option(None, exists=True, dir_okay=False, readable=True)):
    parsed = PipelineConfig.from_file(config) if config is not None else PipelineConfig()
    store = _store() or CertificateStore()
    try:
        report = run_pipeline(parsed, store)
    except EscalationExhausted as e:
        attempt = e.attempt
        typer.echo(f"{e} (alpha={attempt.alpha}, beta={attempt.beta}, s_star={attempt.s_star})", err=True)
        raise typer.Exit(code=1)
    emit_tables(store, parsed.out_dir)
    summary = (render_text([table_row(e) for e in report.fine]).rstrip() +
               f"\n{len(report.attempts)} attempts, store hits {report.store_hits}/{report.store_lookups}")
    _emit(report, summary)
    if not report.success:
        raise typer.Exit(code=1)

@pipeline_app.command(name="tables")
def pipeline_tables(out_dir: Path = Path(PipelineConfig().out_dir)):
    csv_path, text_path = emit_tables(_store() or CertificateStore(), str(out_dir))
    typer.echo(f"{csv_path}\n{text_path}")

@app.callback()
def main(verbose: bool = typer.Option(False, "--verbose", "-v"), json_output: bool = typer.Option(False, "--json"),
         out: Optional[Path] = typer.Option(None, exists=False, dir_okay=False, writable=True),
         store: Optional[Path] = typer.Option(None, file_okay=False)):
    state["json"] = json_output
    state["out"] = out
    state["store"] = store

    if verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    else:
        logging.getLogger().setLevel(logging.INFO)

if __name__ == "__main__":
    app()

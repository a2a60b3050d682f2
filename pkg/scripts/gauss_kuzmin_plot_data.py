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

# Writes the expansion error curves as CSV for plotting; the curves themselves are not validated.

import csv
import sys

from flint import arb

from gkwcert.certify import certify_windows, default_windows, operator_context, spectrum_candidates
from gkwcert.expansion import build_expansion, expansion_eval, tail_bound
from gkwcert.gkw import assemble_matrix
from gkwcert.settings import prec_for_degree

K = 96
modes = 5
grid = 101
steps = range(0, 13)

ctx = operator_context(assemble_matrix(K, prec_for_degree(K)))
enclosures = certify_windows(ctx, default_windows(spectrum_candidates(ctx.schur), modes))
cert = build_expansion(ctx, enclosures)

xs = [arb(i)/(grid - 1) for i in range(grid)]
writer = csv.writer(sys.stdout, lineterminator="\n")
writer.writerow(["n", "x", "deviation", "error_bound", "tail_bound"])
for n in steps:
    tail = float(tail_bound(cert, n))
    for x, value, error in expansion_eval(cert, n, xs, j0=2):
        writer.writerow([n, float(x.mid()), float(value.mid()), float(error), tail])

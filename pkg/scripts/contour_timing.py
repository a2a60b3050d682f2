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

import timeit

from gkwcert.certify import default_windows, spectrum_candidates
from gkwcert.gkw import assemble_matrix
from gkwcert.linalg import approx_schur, certify_schur, contour_resolvent_sup
from gkwcert.settings import prec_for_degree

K = 48
prec = prec_for_degree(K)

repetitions = 3
time = timeit.timeit('assemble_matrix(K, prec)', globals=globals(), number=repetitions)
print(f"Avg assembly time at K={K}, {prec} bits was {time/repetitions} seconds over {repetitions} repetitions")

matrix = assemble_matrix(K, prec)
Q, T = approx_schur(matrix.A, prec)
schur = certify_schur(matrix.A, Q, T, prec)
center, rho = default_windows(spectrum_candidates(schur), 2)[1]

for m in (64, 256):
    time = timeit.timeit('contour_resolvent_sup(schur.T, center, rho, m, prec=prec)', globals=globals(),
                         number=repetitions)
    print(f"Avg full contour time with m={m} was {time/repetitions} seconds over {repetitions} repetitions")

    time = timeit.timeit('contour_resolvent_sup(schur.T, center, rho, m, split=8, prec=prec)', globals=globals(),
                         number=repetitions)
    print(f"Avg block-split contour time with m={m} was {time/repetitions} seconds over {repetitions} repetitions")

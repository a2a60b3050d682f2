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

from typing import Optional

from pydantic import BaseSettings

class Settings(BaseSettings):
    db_url: str = "sqlite:///./gkwcert.db"
    store_dir: str = "./gkwcert-store"
    num_threads: int = 4
    default_prec: int = 128
    prec_per_degree: int = 4
    contour_samples: int = 256
    max_contour_samples: int = 4096
    svd_prec: int = 128
    n_full: int = 5
    block_size: int = 8
    radius_factor: float = 1/3
    c2_split: int = 10000
    serialize_digits: Optional[int] = None
    code_version: str = "gkwcert-0.1.0"

    class Config:
        env_prefix = "gkwcert_"
        env_file = 'gkwcert.env'
        env_file_encoding = 'utf-8'

settings = Settings()

def prec_for_degree(K: int) -> int:
    return max(settings.default_prec, settings.prec_per_degree*K)

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

import datetime

from sqlalchemy import Column, Float, ForeignKey, Integer, String, DateTime, UniqueConstraint
from sqlalchemy.ext.declarative import declarative_base
from sqlalchemy.orm import relationship

from sqlalchemy.types import TypeDecorator


Base = declarative_base()

class TZDateTime(TypeDecorator):
    """Store timezone aware timestamps as naive UTC and restore the zone on load."""
    impl = DateTime
    cache_ok = True

    def process_bind_param(self, value, dialect):
        if value is not None:
            if not value.tzinfo:
                raise TypeError("tzinfo is required")
            value = value.astimezone(datetime.timezone.utc).replace(tzinfo=None)
        return value

    def process_result_value(self, value, dialect):
        if value is not None:
            value = value.replace(tzinfo=datetime.timezone.utc)
        return value

class Record(Base):
    __tablename__ = "records"

    pk      = Column(Integer, primary_key=True, index=True)

    kind    = Column(String, index=True, nullable = False)
    key     = Column(String(64), unique=True, index=True, nullable = False)
    path    = Column(String, nullable = False)
    K       = Column(Integer)
    created = Column(TZDateTime, nullable = False)

class BestEnclosure(Base):
    __tablename__ = "best_enclosures"
    __table_args__ = (UniqueConstraint("K", "window"),)

    pk         = Column(Integer, primary_key=True, index=True)
    record_pk  = Column(Integer, ForeignKey("records.pk"), nullable = False)

    K          = Column(Integer, nullable = False)
    window     = Column(Integer, nullable = False)
    eigenvalue = Column(String)
    radius     = Column(Float)

    record = relationship("Record", backref="best_enclosures")

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
import logging
import threading

from pathlib import Path
from typing import Callable, List, Optional, Tuple, Type, TypeVar

from pydantic import BaseModel
from sqlalchemy import create_engine
from sqlalchemy.orm import sessionmaker, Session

from .models import database
from .settings import settings
from .utils import content_key

logger = logging.getLogger(__name__)

M = TypeVar('M', bound=BaseModel)

class CertificateStore:
    """Append-only, content-addressed store of certificate records.

    Each record is a JSON file under <store_dir>/<kind>/<key>.json and a row
    in the sqlite index. Keys hash (kind, parameters, code version).
    """

    def __init__(self, store_dir: str = None, db_url: str = None):
        self.root = Path(store_dir or settings.store_dir)
        self.root.mkdir(parents=True, exist_ok=True)
        self.engine = create_engine(db_url or settings.db_url, connect_args={"check_same_thread": False})
        self.SessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=self.engine)
        database.Base.metadata.create_all(bind=self.engine)
        self.hits = 0
        self.misses = 0
        self._lock = threading.Lock()

    def session(self) -> Session:
        return self.SessionLocal()

    @property
    def lookups(self) -> int:
        return self.hits + self.misses

    @property
    def hit_rate(self) -> float:
        return self.hits/self.lookups if self.lookups else 1.0

    def reset_counters(self):
        self.hits = self.misses = 0

    def key(self, kind: str, parameters: dict) -> str:
        return content_key(kind, parameters)

    def path(self, kind: str, key: str) -> Path:
        return self.root/kind/f"{key}.json"

    def _find(self, db: Session, key: str) -> Optional[database.Record]:
        return db.query(database.Record).filter(database.Record.key == key).first()

    def get(self, kind: str, parameters: dict, model: Type[M]) -> Optional[M]:
        key = self.key(kind, parameters)
        with self._lock:
            db = self.session()
            try:
                record = self._find(db, key)
            finally:
                db.close()
            if record is None:
                self.misses += 1
                return None
            self.hits += 1
        logger.debug(f"store hit {kind}/{key}")
        return model.parse_file(record.path)

    def put(self, kind: str, parameters: dict, value: BaseModel, K: int = None) -> str:
        """Write `value` under its key; an existing key is left untouched."""
        key = self.key(kind, parameters)
        path = self.path(kind, key)
        with self._lock:
            db = self.session()
            try:
                if self._find(db, key) is not None:
                    self.hits += 1
                    return key
                path.parent.mkdir(parents=True, exist_ok=True)
                path.write_text(value.json(), encoding='utf-8')
                db.add(database.Record(kind=kind, key=key, path=str(path), K=K,
                                       created=datetime.datetime.now(datetime.timezone.utc)))
                db.commit()
            finally:
                db.close()
        logger.debug(f"stored {kind}/{key}")
        return key

    def fetch(self, kind: str, parameters: dict, model: Type[M], compute: Callable[[], M], K: int = None) -> M:
        """Return the stored record for these parameters, computing and storing it on a miss."""
        found = self.get(kind, parameters, model)
        if found is not None:
            return found
        value = compute()
        self.put(kind, parameters, value, K)
        return value

    def offer_enclosure(self, key: str, K: int, window: int, eigenvalue: str, radius: float) -> bool:
        """Record an eigenvalue enclosure as best for (K, window) unless a tighter one is kept."""
        with self._lock:
            db = self.session()
            try:
                record = self._find(db, key)
                if record is None:
                    raise KeyError(f"no record with key {key}")
                best = db.query(database.BestEnclosure).filter(database.BestEnclosure.K == K,
                                                               database.BestEnclosure.window == window).first()
                if best is not None and best.radius is not None and best.radius <= radius:
                    return False
                if best is None:
                    best = database.BestEnclosure(K=K, window=window)
                    db.add(best)
                best.record_pk = record.pk
                best.eigenvalue = eigenvalue
                best.radius = radius
                db.commit()
                return True
            finally:
                db.close()

    def best_enclosures(self, model: Type[M]) -> List[Tuple[int, int, M]]:
        """(K, window, record) for every kept enclosure, ordered by K then window."""
        with self._lock:
            db = self.session()
            try:
                rows = (db.query(database.BestEnclosure.K, database.BestEnclosure.window, database.Record.path)
                          .join(database.Record, database.BestEnclosure.record_pk == database.Record.pk)
                          .order_by(database.BestEnclosure.K.asc(), database.BestEnclosure.window.asc())
                          .all())
            finally:
                db.close()
        return [(K, window, model.parse_file(path)) for K, window, path in rows]

    def records(self, kind: str = None) -> List[database.Record]:
        db = self.session()
        try:
            query = db.query(database.Record)
            if kind is not None:
                query = query.filter(database.Record.kind == kind)
            return query.order_by(database.Record.pk.asc()).all()
        finally:
            db.close()

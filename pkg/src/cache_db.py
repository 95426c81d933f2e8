from __future__ import annotations

import hashlib
import json
import logging
import os
import sqlite3
from datetime import datetime, timedelta, timezone
from typing import Any, Dict, Optional

from .audit import AuditRecord

log = logging.getLogger("gme.cache")

SCHEMA = """
CREATE TABLE IF NOT EXISTS audit_runs (
  run_key     TEXT PRIMARY KEY,
  params      TEXT,
  record      TEXT,
  created_at  TEXT
);
"""

# Audits are deterministic per seed, so a row only goes stale when the code
# changes. Rows older than the TTL are recomputed.
DEFAULT_TTL_DAYS = 30


def run_key(params: Dict[str, Any]) -> str:
    """sha256 of the canonical JSON of the audit parameters."""
    canon = json.dumps(params, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


class AuditCache:
    def __init__(self, path: str, ttl_days: int = DEFAULT_TTL_DAYS):
        self.path = path
        self.ttl_days = ttl_days
        parent = os.path.dirname(os.path.abspath(path))
        os.makedirs(parent, exist_ok=True)
        self._conn = sqlite3.connect(self.path)
        self._conn.execute("PRAGMA journal_mode=WAL;")
        for stmt in SCHEMA.strip().split(";"):
            stmt = stmt.strip()
            if stmt:
                self._conn.execute(stmt)
        self._conn.commit()
        self._prune()

    def _prune(self) -> None:
        cutoff = (datetime.now(timezone.utc) - timedelta(days=self.ttl_days)).isoformat()
        cur = self._conn.execute("DELETE FROM audit_runs WHERE created_at < ?", (cutoff,))
        self._conn.commit()
        if cur.rowcount:
            log.info(f"Pruned {cur.rowcount} stale audit rows from {self.path}")

    def close(self) -> None:
        self._conn.close()

    def __enter__(self) -> "AuditCache":
        return self

    def __exit__(self, *exc: object) -> None:
        self.close()

    def get(self, params: Dict[str, Any]) -> Optional[AuditRecord]:
        cur = self._conn.execute(
            "SELECT record FROM audit_runs WHERE run_key = ? LIMIT 1",
            (run_key(params),),
        )
        row = cur.fetchone()
        if row is None:
            return None
        log.debug(f"Audit cache hit for {params}")
        return AuditRecord.from_dict(json.loads(row[0]))

    def put(self, params: Dict[str, Any], record: AuditRecord) -> None:
        now = datetime.now(timezone.utc).isoformat()
        self._conn.execute(
            "INSERT OR REPLACE INTO audit_runs(run_key, params, record, created_at) VALUES (?,?,?,?)",
            (
                run_key(params),
                json.dumps(params, sort_keys=True),
                json.dumps(record.to_dict()),
                now,
            ),
        )
        self._conn.commit()

    def __len__(self) -> int:
        return int(self._conn.execute("SELECT COUNT(*) FROM audit_runs").fetchone()[0])

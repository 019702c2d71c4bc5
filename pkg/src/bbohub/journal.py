"""Append-only study journal: one self-describing JSON record per line.

Each line carries ``{seq, kind, payload, checksum}`` where the checksum is the
lowercase hex SHA-256 of the canonical payload bytes (sorted keys, compact
separators). Replaying all records reconstructs the study exactly; there is no
compaction.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable

from .errors import JournalCorruptionError

KIND_STUDY_CREATED = "study_created"
KIND_TRIAL_ASKED = "trial_asked"
KIND_TRIAL_TOLD = "trial_told"

_KNOWN_KINDS = {KIND_STUDY_CREATED, KIND_TRIAL_ASKED, KIND_TRIAL_TOLD}


def canonical_bytes(payload: Any) -> bytes:
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")


def payload_checksum(payload: Any) -> str:
    return hashlib.sha256(canonical_bytes(payload)).hexdigest()


@dataclass(frozen=True)
class JournalRecord:
    seq: int
    kind: str
    payload: dict
    checksum: str

    @classmethod
    def make(cls, seq: int, kind: str, payload: dict) -> "JournalRecord":
        return cls(seq=seq, kind=kind, payload=payload, checksum=payload_checksum(payload))

    def verify(self) -> None:
        if self.kind not in _KNOWN_KINDS:
            raise JournalCorruptionError(f"record {self.seq}: unknown kind {self.kind!r}", seq=self.seq)
        if payload_checksum(self.payload) != self.checksum:
            raise JournalCorruptionError(f"record {self.seq}: checksum mismatch", seq=self.seq)

    def to_line(self) -> str:
        body = {"seq": self.seq, "kind": self.kind, "payload": self.payload, "checksum": self.checksum}
        return json.dumps(body, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_line(cls, line: str, lineno: int = -1) -> "JournalRecord":
        try:
            body = json.loads(line)
        except json.JSONDecodeError as exc:
            raise JournalCorruptionError(f"line {lineno}: not valid JSON: {exc}", seq=lineno) from None
        if not isinstance(body, dict) or not {"seq", "kind", "payload", "checksum"} <= set(body):
            raise JournalCorruptionError(f"line {lineno}: missing record fields", seq=lineno)
        return cls(seq=int(body["seq"]), kind=str(body["kind"]), payload=body["payload"], checksum=str(body["checksum"]))


class JournalWriter:
    """Appends records to a journal file, one line per record.

    Appends are atomic per record: each record is a single flushed write under
    an internal lock.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._fh = open(self.path, "a", encoding="utf-8")
        self._next_seq = _count_records(self.path) if self.path.stat().st_size else 0

    @property
    def next_seq(self) -> int:
        return self._next_seq

    def append(self, kind: str, payload: dict) -> JournalRecord:
        with self._lock:
            record = JournalRecord.make(self._next_seq, kind, payload)
            self._fh.write(record.to_line() + "\n")
            self._fh.flush()
            os.fsync(self._fh.fileno())
            self._next_seq += 1
            return record

    def close(self) -> None:
        with self._lock:
            if not self._fh.closed:
                self._fh.close()

    def __enter__(self) -> "JournalWriter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def _count_records(path: Path) -> int:
    with open(path, "r", encoding="utf-8") as fh:
        return sum(1 for line in fh if line.strip())


def read_journal(path: str | Path) -> list[JournalRecord]:
    """Load and integrity-check all records from a journal file."""
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh):
            line = line.strip()
            if not line:
                continue
            records.append(JournalRecord.from_line(line, lineno=lineno))
    return records


def check_sequence(records: Iterable[JournalRecord]) -> list[JournalRecord]:
    """Verify checksums and the contiguous seq rule (0, 1, 2, ...)."""
    checked = []
    for expected, record in enumerate(records):
        record.verify()
        if record.seq != expected:
            raise JournalCorruptionError(
                f"sequence gap: expected seq {expected}, found {record.seq}", seq=record.seq
            )
        checked.append(record)
    return checked

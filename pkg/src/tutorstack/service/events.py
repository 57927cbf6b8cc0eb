"""Append-only event log with gapless sequence numbers.

One JSON object per line in ``events.jsonl``. Appends are serialized,
flushed, and fsynced before the caller proceeds, so derived state is always
a pure function of the log; replaying it reconstructs the service state
exactly. A torn trailing line (interrupted append) is dropped on load.
"""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass
from pathlib import Path

EVENT_KINDS = ("interaction", "ask", "ingest", "recommend")


class EventLogError(Exception):
    pass


@dataclass(frozen=True)
class EventRecord:
    seq: int
    timestamp: int
    kind: str
    payload: dict

    def to_json(self) -> str:
        return json.dumps(
            {"seq": self.seq, "timestamp": self.timestamp, "kind": self.kind,
             "payload": self.payload},
            ensure_ascii=False,
            sort_keys=True,
        )


class EventLog:
    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._records = self._load()
        self._next_seq = self._records[-1].seq + 1 if self._records else 1

    def _load(self) -> list[EventRecord]:
        if not self.path.exists():
            return []
        records: list[EventRecord] = []
        with self.path.open(encoding="utf-8") as fh:
            lines = fh.readlines()
        for i, line in enumerate(lines):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
                record = EventRecord(
                    seq=raw["seq"], timestamp=raw["timestamp"],
                    kind=raw["kind"], payload=raw["payload"],
                )
            except (json.JSONDecodeError, KeyError) as exc:
                if i == len(lines) - 1:
                    break  # torn final append from a crash
                raise EventLogError(f"{self.path}:{i + 1}: corrupt event record: {exc}") from exc
            records.append(record)
        for expected, record in enumerate(records, start=1):
            if record.seq != expected:
                raise EventLogError(
                    f"{self.path}: sequence gap at {record.seq} (expected {expected})"
                )
        return records

    def append(self, kind: str, payload: dict) -> EventRecord:
        if kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {kind!r}")
        with self._lock:
            record = EventRecord(
                seq=self._next_seq,
                timestamp=int(time.time() * 1000),
                kind=kind,
                payload=payload,
            )
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(record.to_json() + "\n")
                fh.flush()
                os.fsync(fh.fileno())
            self._next_seq += 1
            self._records.append(record)
            return record

    def records(self) -> list[EventRecord]:
        with self._lock:
            return list(self._records)

    def __len__(self) -> int:
        with self._lock:
            return len(self._records)

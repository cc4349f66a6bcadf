"""Append-only event log backing the trial service.

One JSON record per line, one event per state change.  The in-memory view
is rebuilt by replaying the log at startup; reads return snapshots and a
single lock serializes appends.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterator

EVENT_TYPES = ("session_created", "profile_submitted", "bundle_created", "responses_submitted")


@dataclass
class SessionRecord:
    session_id: str
    demographics: dict[str, Any]
    state: str = "created"
    profile: list[str] = field(default_factory=list)
    sides: dict[str, str] = field(default_factory=dict)  # side letter -> scorer
    bundle: list[dict[str, Any]] = field(default_factory=list)
    responses: list[dict[str, Any]] = field(default_factory=list)


class EventLog:
    """Single-writer append-only log with replayable JSON lines."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._seq = 0
        if self.path.exists():
            for record in self.replay():
                self._seq = max(self._seq, int(record.get("seq", 0)))

    def append(self, event: str, session_id: str, payload: dict[str, Any]) -> dict[str, Any]:
        if event not in EVENT_TYPES:
            raise ValueError(f"unknown event type {event!r}")
        with self._lock:
            self._seq += 1
            record = {"seq": self._seq, "event": event, "session": session_id, **payload}
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record, sort_keys=True) + "\n")
        return record

    def replay(self) -> Iterator[dict[str, Any]]:
        if not self.path.exists():
            return
        with open(self.path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    yield json.loads(line)


class SessionStore:
    """Materialized session states on top of the event log."""

    def __init__(self, log: EventLog):
        self.log = log
        self._sessions: dict[str, SessionRecord] = {}
        self._lock = threading.Lock()
        for record in log.replay():
            self._apply(record)

    def _apply(self, record: dict[str, Any]) -> None:
        event = record["event"]
        sid = record["session"]
        if event == "session_created":
            self._sessions[sid] = SessionRecord(sid, dict(record.get("demographics", {})))
            return
        session = self._sessions.get(sid)
        if session is None:
            return
        if event == "profile_submitted":
            session.profile = list(record.get("items", []))
            session.state = "profiled"
        elif event == "bundle_created":
            session.sides = dict(record.get("sides", {}))
            session.bundle = list(record.get("entries", []))
        elif event == "responses_submitted":
            session.responses = list(record.get("responses", []))
            session.state = "completed"

    def record(self, event: str, session_id: str, payload: dict[str, Any]) -> None:
        stored = self.log.append(event, session_id, payload)
        with self._lock:
            self._apply(stored)

    def get(self, session_id: str) -> SessionRecord | None:
        return self._sessions.get(session_id)

    def all_sessions(self) -> list[SessionRecord]:
        return [self._sessions[sid] for sid in sorted(self._sessions)]

    def completed(self) -> list[SessionRecord]:
        return [s for s in self.all_sessions() if s.state == "completed"]

"""Append-only JSON Lines event log and deterministic replay.

One record per line: {"seq": n, "ts": RFC3339, "type": ..., ...payload}.
seq starts at 1 and increments by exactly 1; any gap, regression, or
malformed line rejects the log with its line number.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Iterator, Optional, Union

from .graph import GraphError, ReferralGraph

EVENT_TYPES = frozenset(
    {"link_created", "click", "member_registered", "proposal_authored", "proposal_result"}
)


class EventLogError(Exception):
    def __init__(self, msg: str, line: Optional[int] = None):
        self.line = line
        super().__init__(msg if line is None else f"line {line}: {msg}")


class ReplayError(EventLogError):
    pass


def format_ts(dt: datetime) -> str:
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


def parse_ts(value: str) -> datetime:
    # Python 3.10 fromisoformat rejects the Z suffix.
    dt = datetime.fromisoformat(value.replace("Z", "+00:00"))
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def utcnow() -> datetime:
    return datetime.now(timezone.utc)


@dataclass(frozen=True)
class EventRecord:
    seq: int
    ts: datetime
    type: str
    payload: dict

    def to_line(self) -> str:
        doc = {"seq": self.seq, "ts": format_ts(self.ts), "type": self.type, **self.payload}
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_line(cls, line: str, line_no: Optional[int] = None) -> "EventRecord":
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise EventLogError(f"malformed JSON: {exc.msg}", line_no) from exc
        if not isinstance(doc, dict):
            raise EventLogError("record is not an object", line_no)
        try:
            seq = doc.pop("seq")
            ts = doc.pop("ts")
            etype = doc.pop("type")
        except KeyError as exc:
            raise EventLogError(f"missing field {exc.args[0]!r}", line_no) from exc
        if not isinstance(seq, int):
            raise EventLogError("seq must be an integer", line_no)
        if etype not in EVENT_TYPES:
            raise EventLogError(f"unknown event type {etype!r}", line_no)
        try:
            when = parse_ts(ts)
        except (ValueError, TypeError) as exc:
            raise EventLogError(f"bad timestamp {ts!r}", line_no) from exc
        return cls(seq=seq, ts=when, type=etype, payload=doc)


def read_events(path: Union[str, Path]) -> Iterator[EventRecord]:
    """Yield validated records; seq must run 1, 2, 3, ... without gaps."""
    expected = 1
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            rec = EventRecord.from_line(line, line_no)
            if rec.seq != expected:
                raise EventLogError(
                    f"seq {rec.seq} out of order (expected {expected})", line_no
                )
            expected += 1
            yield rec


class EventLog:
    """Append-only writer over a JSON Lines file, fsynced per record."""

    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fh = open(self.path, "a", encoding="utf-8")
        self._next_seq = 1
        if self.path.stat().st_size > 0:
            for rec in read_events(self.path):
                self._next_seq = rec.seq + 1

    @property
    def next_seq(self) -> int:
        return self._next_seq

    def append(self, etype: str, payload: dict, ts: Optional[datetime] = None) -> EventRecord:
        rec = EventRecord(seq=self._next_seq, ts=ts or utcnow(), type=etype, payload=payload)
        self._fh.write(rec.to_line() + "\n")
        self._fh.flush()
        os.fsync(self._fh.fileno())
        self._next_seq += 1
        return rec

    def close(self) -> None:
        self._fh.close()

    def __enter__(self) -> "EventLog":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def apply_event(graph: ReferralGraph, rec: EventRecord) -> None:
    """Fold one record into the graph; invalid records reject the log."""
    if rec.seq != graph.last_seq + 1:
        raise ReplayError(f"seq {rec.seq} does not follow {graph.last_seq}")
    p = rec.payload
    try:
        if rec.type == "link_created":
            graph.issue_token(
                owner=p["owner_visitor"],
                now=rec.ts,
                staff=bool(p.get("staff", False)),
                token=p["token"],
                email_hash=p.get("email_hash"),
            )
        elif rec.type == "click":
            graph.record_click(
                token=p["token"], visitor=p["visitor"], now=rec.ts, country=p.get("country")
            )
        elif rec.type == "member_registered":
            graph.register_member(visitor=p["visitor"], member_id=p["member"], now=rec.ts)
        elif rec.type == "proposal_authored":
            graph.record_proposal_author(member_id=p["member"], proposal_id=p["proposal"])
        elif rec.type == "proposal_result":
            graph.record_proposal_result(proposal_id=p["proposal"], status=p["status"])
        else:  # pragma: no cover - from_line already filters
            raise ReplayError(f"unknown event type {rec.type!r}")
    except KeyError as exc:
        raise ReplayError(f"event seq {rec.seq}: missing payload field {exc.args[0]!r}") from exc
    except GraphError as exc:
        raise ReplayError(f"event seq {rec.seq}: {exc}") from exc
    graph.last_seq = rec.seq


def replay(
    source: Union[str, Path, Iterable[EventRecord]],
    graph: Optional[ReferralGraph] = None,
) -> ReferralGraph:
    """Fold a log (path or record iterable) into a graph; deterministic.

    Passing a graph restored from a snapshot resumes at its last_seq:
    records at or below it are skipped, so a full log replays as a suffix.
    """
    g = graph if graph is not None else ReferralGraph()
    records = read_events(source) if isinstance(source, (str, Path)) else source
    for rec in records:
        if rec.seq <= g.last_seq:
            continue
        apply_event(g, rec)
    return g


def canonical_snapshot_bytes(graph: ReferralGraph) -> bytes:
    return json.dumps(
        graph.to_snapshot(), sort_keys=True, separators=(",", ":"), ensure_ascii=True
    ).encode("utf-8")


def state_hash(graph: ReferralGraph) -> str:
    return hashlib.sha256(canonical_snapshot_bytes(graph)).hexdigest()


def write_snapshot(graph: ReferralGraph, path: Union[str, Path]) -> None:
    Path(path).write_bytes(canonical_snapshot_bytes(graph))


def load_snapshot(path: Union[str, Path]) -> ReferralGraph:
    return ReferralGraph.from_snapshot(json.loads(Path(path).read_text(encoding="utf-8")))

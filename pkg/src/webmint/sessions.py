"""Sessionization, activity classification and session-log views."""

from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass, field, replace
from datetime import datetime, timedelta
from typing import Iterable, NamedTuple

from .logparse import LogRecord, client_key
from .taxonomy import ConceptHierarchy

log = logging.getLogger(__name__)

INACTIVE = "inactive"
NONCUSTOMER = "noncustomer"
CUSTOMER = "customer"
LABELS = (INACTIVE, NONCUSTOMER, CUSTOMER)

VIEW_NAMES = ("all", "active", "inactive", "customer", "noncustomer")


class PageOccurrence(NamedTuple):
    concept: str
    occ: int

    def __str__(self) -> str:
        return f"({self.concept},{self.occ})"


Sequence = tuple[PageOccurrence, ...]


@dataclass
class SessionElement:
    concept: str
    occ: int
    entry: datetime
    dwell: timedelta | None = None  # unknown for the final element

    @property
    def page(self) -> PageOccurrence:
        return PageOccurrence(self.concept, self.occ)


@dataclass
class Session:
    visitor_key: str
    start: datetime
    elements: list[SessionElement]
    label: str | None = None

    def sequence(self) -> Sequence:
        return tuple(e.page for e in self.elements)


@dataclass
class SessionConfig:
    page_stay_limit: timedelta = timedelta(minutes=4)
    total_duration_limit: timedelta | None = None
    customer_dwell_threshold: timedelta | None = timedelta(minutes=7)
    success_relabel: str | None = "/SUCCESS"
    # unknown dwell on a session's final element does not qualify by default
    final_dwell_counts: bool = False

    def __post_init__(self):
        if self.page_stay_limit <= timedelta(0):
            raise ValueError("page_stay_limit must be > 0")
        if (self.total_duration_limit is not None
                and self.total_duration_limit <= timedelta(0)):
            raise ValueError("total_duration_limit must be > 0")


def visitor_key(record: LogRecord) -> str:
    """Host plus agent; distinguishes users behind the same host or proxy."""
    return client_key(record)


def to_page_occurrences(concepts: Iterable[str]) -> list[PageOccurrence]:
    """Number the k-th appearance of each concept with occurrence k."""
    counts: Counter[str] = Counter()
    out = []
    for c in concepts:
        counts[c] += 1
        out.append(PageOccurrence(c, counts[c]))
    return out


def segment_sessions(records: list[LogRecord], h: ConceptHierarchy,
                     cfg: SessionConfig) -> list[Session]:
    """Split one visitor's time-ordered records into sessions.

    A gap above the page-stay limit (or exceeding the optional total
    duration limit) opens a new session; consecutive requests mapping to
    the same concept collapse into one element.
    """
    if not records:
        return []
    key = visitor_key(records[0])
    sessions: list[Session] = []
    chunk: list[tuple[str, datetime]] = []  # (concept, entry)

    def flush():
        if not chunk:
            return
        collapsed: list[tuple[str, datetime]] = []
        for concept, t in chunk:
            if collapsed and collapsed[-1][0] == concept:
                continue
            collapsed.append((concept, t))
        pages = to_page_occurrences(c for c, _ in collapsed)
        elements = []
        for i, ((concept, t), page) in enumerate(zip(collapsed, pages)):
            dwell = (collapsed[i + 1][1] - t) if i + 1 < len(collapsed) else None
            elements.append(SessionElement(concept, page.occ, t, dwell))
        sessions.append(Session(key, chunk[0][1], elements))
        chunk.clear()

    prev_t: datetime | None = None
    session_start: datetime | None = None
    for rec in records:
        concept = h.map_url(rec.url_path, rec.query_string)
        t = rec.timestamp
        if chunk:
            gap = t - prev_t  # type: ignore[operator]
            over_total = (cfg.total_duration_limit is not None
                          and t - session_start > cfg.total_duration_limit)
            if gap > cfg.page_stay_limit or over_total:
                flush()
        if not chunk:
            session_start = t
        chunk.append((concept, t))
        prev_t = t
    flush()
    return sessions


def _role(h: ConceptHierarchy, concept: str, cfg: SessionConfig) -> str:
    if cfg.success_relabel is not None and concept == cfg.success_relabel:
        return "target"
    if concept in h:
        return h.role_of(concept)
    return "other"


def _dwell_qualifies(element: SessionElement, cfg: SessionConfig) -> bool:
    if cfg.customer_dwell_threshold is None:
        return True
    if element.dwell is None:
        return cfg.final_dwell_counts
    return element.dwell >= cfg.customer_dwell_threshold


def classify_session(s: Session, h: ConceptHierarchy,
                     cfg: SessionConfig) -> str:
    """Label a session inactive, noncustomer or customer."""
    roles = [_role(h, e.concept, cfg) for e in s.elements]
    if "action" not in roles:
        # a reached target without any goal-pursuing step breaks the
        # action-before-target assumption; worth surfacing, not fatal
        if "target" in roles:
            log.warning(
                "session %s at %s reaches a target page without any action page",
                s.visitor_key, s.start.isoformat(),
            )
        return INACTIVE
    for element, role in zip(s.elements, roles):
        if role == "target" and _dwell_qualifies(element, cfg):
            return CUSTOMER
    return NONCUSTOMER


def apply_success_relabel(s: Session, h: ConceptHierarchy,
                          cfg: SessionConfig) -> Session:
    """Rename qualifying target elements to the configured success concept.

    Positions are kept; only the success concept is renumbered, other
    concepts keep their original occurrence numbers.
    """
    if cfg.success_relabel is None:
        return s
    success = cfg.success_relabel
    new_elements = []
    success_count = 0
    for e in s.elements:
        role = h.role_of(e.concept) if e.concept in h else "other"
        if role == "target" and e.concept != success and _dwell_qualifies(e, cfg):
            success_count += 1
            new_elements.append(replace(e, concept=success, occ=success_count))
        else:
            new_elements.append(replace(e))
    return replace(s, elements=new_elements)


class LogView:
    """A multiset of page-occurrence sequences (one per session)."""

    def __init__(self, sequences: Iterable[Sequence] = ()):
        self.seqs: Counter[Sequence] = Counter(sequences)
        self._tree = None

    @classmethod
    def from_counter(cls, counter: Counter) -> "LogView":
        view = cls()
        view.seqs = Counter(counter)
        return view

    def card(self) -> int:
        return sum(self.seqs.values())

    def unique(self) -> list[tuple[Sequence, int]]:
        return sorted(self.seqs.items())

    def max_length(self) -> int:
        return max((len(s) for s in self.seqs), default=0)

    def tree(self):
        """Prefix-merged aggregate tree of this view, built once."""
        if self._tree is None:
            from .aggtree import build_aggregated_log
            self._tree = build_aggregated_log(self)
        return self._tree

    def containing(self, concept: str) -> int:
        """Number of sessions (with multiplicity) touching the concept."""
        return sum(mult for seq, mult in self.seqs.items()
                   if any(p.concept == concept for p in seq))

    def observed_occurrences(self) -> set[PageOccurrence]:
        out: set[PageOccurrence] = set()
        for seq in self.seqs:
            out.update(seq)
        return out

    def observed_first(self) -> set[PageOccurrence]:
        return {seq[0] for seq in self.seqs if seq}


@dataclass
class SessionLog:
    sessions: list[Session] = field(default_factory=list)

    def labelled(self) -> bool:
        return all(s.label in LABELS for s in self.sessions)

    def counts(self) -> dict[str, int]:
        by_label = Counter(s.label for s in self.sessions)
        active = by_label[CUSTOMER] + by_label[NONCUSTOMER]
        return {
            "all": len(self.sessions),
            "active": active,
            "inactive": by_label[INACTIVE],
            "customer": by_label[CUSTOMER],
            "noncustomer": by_label[NONCUSTOMER],
        }

    def view(self, name: str = "all") -> LogView:
        if name not in VIEW_NAMES:
            raise ValueError(f"unknown view {name!r}")
        if name == "all":
            keep = set(LABELS)
        elif name == "active":
            keep = {CUSTOMER, NONCUSTOMER}
        else:
            keep = {name}
        return LogView(s.sequence() for s in self.sessions if s.label in keep)


def classify_log(sessions: Iterable[Session], h: ConceptHierarchy,
                 cfg: SessionConfig) -> SessionLog:
    """Classify and (if configured) success-relabel every session."""
    out = []
    for s in sessions:
        label = classify_session(s, h, cfg)
        if label == CUSTOMER and cfg.success_relabel is not None:
            s = apply_success_relabel(s, h, cfg)
        s.label = label
        out.append(s)
    out.sort(key=lambda s: (s.start, s.visitor_key))
    return SessionLog(out)


def partition_log(slog: SessionLog) -> dict[str, LogView]:
    """Disjoint/exhaustive views keyed by activity class."""
    if not slog.labelled():
        raise ValueError("all sessions must be classified before partitioning")
    return {name: slog.view(name) for name in VIEW_NAMES}


# --- session store (newline-delimited JSON) --------------------------------

def _session_to_json(s: Session) -> dict:
    elements = []
    for e in s.elements:
        el: dict = {"concept": e.concept, "occ": e.occ, "t": e.entry.isoformat()}
        if e.dwell is not None:
            el["dwell"] = e.dwell.total_seconds()
        elements.append(el)
    return {
        "visitor": s.visitor_key,
        "start": s.start.isoformat(),
        "label": s.label,
        "elements": elements,
    }


def dump_store(slog: SessionLog) -> str:
    sessions = sorted(slog.sessions, key=lambda s: (s.start, s.visitor_key))
    lines = [json.dumps(_session_to_json(s), sort_keys=True, separators=(",", ":"))
             for s in sessions]
    return "".join(line + "\n" for line in lines)


def write_store(slog: SessionLog, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_store(slog))


def load_store(path) -> SessionLog:
    sessions = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                doc = json.loads(line)
                elements = [
                    SessionElement(
                        concept=el["concept"],
                        occ=el["occ"],
                        entry=datetime.fromisoformat(el["t"]),
                        dwell=(timedelta(seconds=el["dwell"])
                               if "dwell" in el else None),
                    )
                    for el in doc["elements"]
                ]
                sessions.append(Session(
                    visitor_key=doc["visitor"],
                    start=datetime.fromisoformat(doc["start"]),
                    elements=elements,
                    label=doc["label"],
                ))
            except (KeyError, ValueError, TypeError) as exc:
                raise ValueError(f"bad session store line {lineno}: {exc}") from exc
    return SessionLog(sessions)

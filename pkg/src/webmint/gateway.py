"""Project configuration and the pipeline shared by the CLI and service."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from datetime import timedelta
from fractions import Fraction
from pathlib import Path

from . import aggtree
from .heuristics import HeuristicConfig
from .logparse import CleaningConfig, CleaningReport, clean_records, read_log
from .miner import NavigationPattern, QueryResult, evaluate_query
from .mintlang import Wildcard, parse_query, validate_query
from .sessions import (LogView, SessionConfig, SessionLog, classify_log,
                       load_store, segment_sessions, visitor_key, write_store)
from .taxonomy import ConceptHierarchy, load_hierarchy_file

ENV_CONFIG = "WEBMINT_CONFIG"


def _duration(value, default: timedelta | None) -> timedelta | None:
    if value is None:
        return default
    return timedelta(seconds=float(value))


def _wildcard(value, default: Wildcard | None) -> Wildcard | None:
    if value is None:
        return default
    return Wildcard(int(value[0]), int(value[1]))


@dataclass
class ProjectConfig:
    logs: list[str]
    hierarchy: str
    session_store: str
    output_dir: str
    log_format: str = "combined"
    base_dir: Path = Path(".")
    cleaning: CleaningConfig = field(default_factory=CleaningConfig)
    session: SessionConfig = field(default_factory=SessionConfig)
    heuristics: HeuristicConfig = field(default_factory=HeuristicConfig)
    include_default_concept: bool = False
    strict_parse: bool = False

    def path(self, value: str) -> Path:
        p = Path(value)
        return p if p.is_absolute() else self.base_dir / p

    @property
    def store_path(self) -> Path:
        return self.path(self.session_store)

    @property
    def out_path(self) -> Path:
        return self.path(self.output_dir)

    @classmethod
    def load(cls, path) -> "ProjectConfig":
        path = Path(path)
        doc = json.loads(path.read_text(encoding="utf-8"))
        cleaning_doc = doc.get("cleaning", {})
        cleaning = CleaningConfig(
            ignore_extensions=tuple(cleaning_doc.get(
                "ignore_extensions", CleaningConfig().ignore_extensions)),
            ignore_agent_patterns=tuple(cleaning_doc.get(
                "ignore_agent_patterns", CleaningConfig().ignore_agent_patterns)),
            min_human_inter_request_seconds=cleaning_doc.get(
                "min_human_inter_request_seconds", 1.0),
            empty_referrer_heuristic_enabled=cleaning_doc.get(
                "empty_referrer_heuristic_enabled", True),
            min_requests_for_referrer_rule=cleaning_doc.get(
                "min_requests_for_referrer_rule", 5),
        )
        s_doc = doc.get("session", {})
        session = SessionConfig(
            page_stay_limit=_duration(s_doc.get("page_stay_limit_seconds"),
                                      timedelta(minutes=4)),
            total_duration_limit=_duration(
                s_doc.get("total_duration_limit_seconds"), None),
            customer_dwell_threshold=_duration(
                s_doc.get("customer_dwell_threshold_seconds"),
                timedelta(minutes=7))
            if "customer_dwell_threshold_seconds" in s_doc
            else (None if s_doc.get("no_dwell_threshold") else timedelta(minutes=7)),
            success_relabel=s_doc.get("success_relabel",
                                      None if s_doc.get("no_success_relabel")
                                      else "/SUCCESS"),
            final_dwell_counts=s_doc.get("final_dwell_counts", False),
        )
        h_doc = doc.get("heuristics", {})
        heuristics = HeuristicConfig(
            low_contact_threshold=Fraction(str(h_doc.get("low_contact_threshold", 0.2))),
            low_conversion_threshold=Fraction(str(h_doc.get("low_conversion_threshold", 0.5))),
            frequent_pattern_min_support=h_doc.get("frequent_pattern_min_support", 10),
            short_spec=_wildcard(h_doc.get("short_spec"), Wildcard(0, 3)),
            long_spec=_wildcard(h_doc.get("long_spec"), None),
            postminer_thr=h_doc.get("postminer_thr", 2),
            contact_shift_delta=Fraction(str(h_doc.get("contact_shift_delta", 0.05))),
            divergence_delta=Fraction(str(h_doc.get("divergence_delta", 0.05))),
            high_conversion_threshold=Fraction(str(h_doc.get("high_conversion_threshold", 0.5))),
            merge_min_confidence=Fraction(str(h_doc.get("merge_min_confidence", 0.05))),
        )
        return cls(
            logs=doc["logs"],
            hierarchy=doc["hierarchy"],
            session_store=doc.get("session_store", "out/sessions.ndjson"),
            output_dir=doc.get("output_dir", "out"),
            log_format=doc.get("log_format", "combined"),
            base_dir=path.parent,
            cleaning=cleaning,
            session=session,
            heuristics=heuristics,
            include_default_concept=doc.get("include_default_concept", False),
            strict_parse=doc.get("strict_parse", False),
        )


def load_project_hierarchy(cfg: ProjectConfig) -> ConceptHierarchy:
    h = load_hierarchy_file(cfg.path(cfg.hierarchy))
    success = cfg.session.success_relabel
    if success is not None and success not in h:
        from .taxonomy import Concept
        h = h.with_concept(Concept(success, role="target"))
    return h


def excluded_concepts(cfg: ProjectConfig, h: ConceptHierarchy) -> frozenset[str]:
    base = set(cfg.heuristics.exclude_concepts)
    if not cfg.include_default_concept:
        base.add(h.default_concept)
    return frozenset(base)


def prepare(cfg: ProjectConfig) -> tuple[SessionLog, CleaningReport]:
    """Ingest, clean, sessionize, classify and write the session store."""
    h = load_project_hierarchy(cfg)
    report = CleaningReport()
    records = []
    for log_path in cfg.logs:
        records.extend(read_log(cfg.path(log_path), cfg.log_format,
                                strict=cfg.strict_parse, report=report))
    records, report = clean_records(records, cfg.cleaning, report)

    per_visitor: dict[str, list] = {}
    for rec in records:
        per_visitor.setdefault(visitor_key(rec), []).append(rec)
    sessions = []
    for key in sorted(per_visitor):
        recs = sorted(per_visitor[key], key=lambda r: r.timestamp)
        sessions.extend(segment_sessions(recs, h, cfg.session))
    slog = classify_log(sessions, h, cfg.session)

    cfg.store_path.parent.mkdir(parents=True, exist_ok=True)
    write_store(slog, cfg.store_path)
    report_path = cfg.out_path / "cleaning_report.json"
    report_path.parent.mkdir(parents=True, exist_ok=True)
    report_path.write_text(json.dumps(report.to_dict(), sort_keys=True,
                                      indent=2) + "\n", encoding="utf-8")
    return slog, report


def pattern_id(gseq_text: str, view: str) -> str:
    return hashlib.sha1(f"{view}\x00{gseq_text}".encode()).hexdigest()[:12]


def result_to_json(result: QueryResult, view: str) -> dict:
    p = result.pattern
    stats = []
    for i, var_support in enumerate(p.supports):
        confidences = []
        for j in range(-1, i):
            denom = p.log_card if j < 0 else p.supports[j]
            confidences.append({
                "vs": None if j < 0 else j,
                "hits": var_support,
                "of": denom,
            })
        stats.append({"support": var_support, "confidence": confidences})
    return {
        "id": pattern_id(str(result.gseq), view),
        "gsequence": str(result.gseq),
        "stats": stats,
        "trees": [aggtree.to_json(t) for t in p.trees],
    }


def results_to_json(results: list[QueryResult], view: str) -> str:
    return json.dumps([result_to_json(r, view) for r in results],
                      sort_keys=True, separators=(",", ":"))


class AnalysisSnapshot:
    """Immutable store snapshot the service and CLI query against."""

    def __init__(self, cfg: ProjectConfig):
        self.cfg = cfg
        self.hierarchy = load_project_hierarchy(cfg)
        self.slog = load_store(cfg.store_path)
        self.views = {name: self.slog.view(name)
                      for name in ("all", "active", "inactive",
                                   "customer", "noncustomer")}
        self.exclude = excluded_concepts(cfg, self.hierarchy)
        self.patterns: dict[str, dict] = {}

    def counts(self) -> dict[str, int]:
        return self.slog.counts()

    def query(self, mint_text: str, view: str) -> list[dict]:
        q = parse_query(mint_text)
        validate_query(q, self.hierarchy)
        results = evaluate_query(q, self.views[view])
        docs = [result_to_json(r, view) for r in results]
        for doc in docs:
            self.patterns[doc["id"]] = doc
        return docs

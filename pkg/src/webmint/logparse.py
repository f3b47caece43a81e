"""Access-log parsing (Common/Combined formats) and traffic cleaning."""

from __future__ import annotations

import gzip
import re
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from typing import Iterable, Iterator

_COMMON_RE = re.compile(
    r'^(?P<host>\S+)\s+(?P<ident>\S+)\s+(?P<user>\S+)\s+'
    r'\[(?P<time>[^\]]+)\]\s+'
    r'"(?P<request>[^"]*)"\s+'
    r'(?P<status>\d{3})\s+(?P<bytes>\d+|-)'
)
_COMBINED_RE = re.compile(
    _COMMON_RE.pattern + r'\s+"(?P<referrer>[^"]*)"\s+"(?P<agent>[^"]*)"\s*$'
)

DEFAULT_IGNORE_EXTENSIONS = (
    ".gif", ".jpg", ".jpeg", ".png", ".ico", ".css", ".js", ".bmp", ".swf",
)
DEFAULT_AGENT_PATTERNS = (r"(?i)bot", r"(?i)crawler", r"(?i)spider", r"(?i)slurp",
                          r"(?i)archiver", r"(?i)wget", r"(?i)libwww")


class LogParseError(ValueError):
    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        where = f" (line {lineno})" if lineno is not None else ""
        super().__init__(f"{message}{where}")


@dataclass(frozen=True)
class LogRecord:
    client_host: str
    timestamp: datetime
    method: str
    url_path: str
    protocol: str
    status: int
    ident: str | None = None
    auth_user: str | None = None
    query_string: str | None = None
    bytes: int | None = None
    referrer: str | None = None
    user_agent: str | None = None


@dataclass
class CleaningConfig:
    ignore_extensions: tuple[str, ...] = DEFAULT_IGNORE_EXTENSIONS
    ignore_agent_patterns: tuple[str, ...] = DEFAULT_AGENT_PATTERNS
    min_human_inter_request_seconds: float = 1.0
    empty_referrer_heuristic_enabled: bool = True
    # one-hit visitors never trip the empty-referrer rule
    min_requests_for_referrer_rule: int = 5

    def __post_init__(self):
        if self.min_human_inter_request_seconds <= 0:
            raise ValueError("min_human_inter_request_seconds must be > 0")


@dataclass
class CleaningReport:
    input_records: int = 0
    ignored_extension: int = 0
    ignored_agent: int = 0
    nonhuman_client: int = 0
    parse_errors: int = 0

    @property
    def output_records(self) -> int:
        return (self.input_records - self.ignored_extension
                - self.ignored_agent - self.nonhuman_client)

    def to_dict(self) -> dict[str, int]:
        return {
            "input_records": self.input_records,
            "ignored_extension": self.ignored_extension,
            "ignored_agent": self.ignored_agent,
            "nonhuman_client": self.nonhuman_client,
            "parse_errors": self.parse_errors,
            "output_records": self.output_records,
        }


def _opt(value: str | None) -> str | None:
    return None if value in (None, "-", "") else value


def parse_log_line(line: str, format: str = "combined",
                   lineno: int | None = None) -> LogRecord:
    """Parse one access-log line in Common or Combined Log Format."""
    if format not in ("common", "combined"):
        raise ValueError(f"unknown log format: {format!r}")
    regex = _COMBINED_RE if format == "combined" else _COMMON_RE
    m = regex.match(line)
    if not m:
        raise LogParseError(f"unparseable {format} log line: {line[:80]!r}", lineno)

    try:
        ts = datetime.strptime(m.group("time"), "%d/%b/%Y:%H:%M:%S %z")
    except ValueError as exc:
        raise LogParseError(f"bad timestamp {m.group('time')!r}", lineno) from exc

    request = m.group("request").split()
    if len(request) != 3:
        raise LogParseError(f"bad request token {m.group('request')!r}", lineno)
    method, url, protocol = request
    path, _, query = url.partition("?")
    if not path:
        raise LogParseError(f"empty URL path in {url!r}", lineno)

    status = int(m.group("status"))
    if not 100 <= status <= 599:
        raise LogParseError(f"status {status} out of range", lineno)

    raw_bytes = m.group("bytes")
    return LogRecord(
        client_host=m.group("host"),
        ident=_opt(m.group("ident")),
        auth_user=_opt(m.group("user")),
        timestamp=ts,
        method=method,
        url_path=path,
        query_string=query or None,
        protocol=protocol,
        status=status,
        bytes=None if raw_bytes == "-" else int(raw_bytes),
        referrer=_opt(m.groupdict().get("referrer")),
        user_agent=_opt(m.groupdict().get("agent")),
    )


def read_log(path, format: str = "combined", strict: bool = False,
             report: CleaningReport | None = None) -> Iterator[LogRecord]:
    """Yield records from a plain or gzipped log file.

    Malformed lines are skipped and counted in the report unless strict.
    """
    opener = gzip.open if str(path).endswith(".gz") else open
    with opener(path, "rt", encoding="utf-8", errors="replace") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            try:
                yield parse_log_line(line, format, lineno)
            except LogParseError:
                if strict:
                    raise
                if report is not None:
                    report.parse_errors += 1


def client_key(record: LogRecord) -> str:
    return f"{record.client_host}\x00{record.user_agent or '<no-agent>'}"


def detect_nonhuman_clients(records: Iterable[LogRecord],
                            config: CleaningConfig) -> set[str]:
    """Flag clients whose traffic looks non-interactive.

    A client is flagged when every request lacks a referrer (given enough
    requests) or when any two consecutive requests arrive faster than a
    human could act.
    """
    per_client: dict[str, list[LogRecord]] = {}
    for rec in records:
        per_client.setdefault(client_key(rec), []).append(rec)

    min_gap = timedelta(seconds=config.min_human_inter_request_seconds)
    flagged: set[str] = set()
    for key, recs in per_client.items():
        if (config.empty_referrer_heuristic_enabled
                and len(recs) >= config.min_requests_for_referrer_rule
                and all(r.referrer is None for r in recs)):
            flagged.add(key)
            continue
        recs = sorted(recs, key=lambda r: r.timestamp)
        if any(b.timestamp - a.timestamp < min_gap
               for a, b in zip(recs, recs[1:])):
            flagged.add(key)
    return flagged


def clean_records(records: Iterable[LogRecord], config: CleaningConfig,
                  report: CleaningReport | None = None,
                  ) -> tuple[list[LogRecord], CleaningReport]:
    """Drop image-like requests, robot agents and flagged non-human clients."""
    report = report if report is not None else CleaningReport()
    agent_res = [re.compile(p) for p in config.ignore_agent_patterns]

    survivors: list[LogRecord] = []
    for rec in records:
        report.input_records += 1
        if rec.url_path.lower().endswith(tuple(config.ignore_extensions)):
            report.ignored_extension += 1
            continue
        agent = rec.user_agent or ""
        if any(r.search(agent) for r in agent_res):
            report.ignored_agent += 1
            continue
        survivors.append(rec)

    flagged = detect_nonhuman_clients(survivors, config)
    kept = [r for r in survivors if client_key(r) not in flagged]
    report.nonhuman_client += len(survivors) - len(kept)
    return kept, report

from datetime import datetime, timedelta, timezone

import pytest

from webmint.logparse import (CleaningConfig, CleaningReport, LogParseError,
                              LogRecord, clean_records, client_key,
                              detect_nonhuman_clients, parse_log_line,
                              read_log)

COMBINED = ('10.0.0.1 - frank [10/Oct/2000:13:55:36 -0700] '
            '"GET /apache_pb.html?x=1 HTTP/1.0" 200 2326 '
            '"http://www.example.com/start.html" "Mozilla/4.08 [en] (Win98)"')
COMMON = '10.0.0.1 - - [10/Oct/2000:13:55:36 -0700] "GET /index.html HTTP/1.0" 200 2326'


def rec(host="10.0.0.1", t=0.0, url="/page", referrer="http://r/", agent="M"):
    return LogRecord(
        client_host=host,
        timestamp=datetime(2000, 1, 1, tzinfo=timezone.utc) + timedelta(seconds=t),
        method="GET", url_path=url, protocol="HTTP/1.0", status=200,
        referrer=referrer, user_agent=agent)


def test_parse_combined_line():
    r = parse_log_line(COMBINED)
    assert r.client_host == "10.0.0.1"
    assert r.auth_user == "frank"
    assert r.method == "GET"
    assert r.url_path == "/apache_pb.html"
    assert r.query_string == "x=1"
    assert r.status == 200
    assert r.bytes == 2326
    assert r.referrer == "http://www.example.com/start.html"
    assert r.user_agent == "Mozilla/4.08 [en] (Win98)"
    assert r.timestamp.utcoffset() == timedelta(hours=-7)


def test_parse_common_line():
    r = parse_log_line(COMMON, format="common")
    assert r.url_path == "/index.html"
    assert r.query_string is None
    assert r.referrer is None and r.user_agent is None


def test_absent_fields_become_none():
    line = ('10.0.0.1 - - [10/Oct/2000:13:55:36 -0700] "GET / HTTP/1.0" '
            '304 - "-" "-"')
    r = parse_log_line(line)
    assert r.bytes is None and r.referrer is None and r.user_agent is None


@pytest.mark.parametrize("line", [
    "garbage",
    '10.0.0.1 - - [99/Oct/2000:13:55:36 -0700] "GET / HTTP/1.0" 200 1',
    '10.0.0.1 - - [10/Oct/2000:13:55:36 -0700] "GETGET" 200 1',
    '10.0.0.1 - - [10/Oct/2000:13:55:36 -0700] "GET / HTTP/1.0" 999 1',
])
def test_parse_errors(line):
    with pytest.raises(LogParseError):
        parse_log_line(line + ' "-" "-"' if line.count('"') == 2 else line)


def test_parse_error_carries_lineno():
    with pytest.raises(LogParseError) as err:
        parse_log_line("nope", lineno=17)
    assert err.value.lineno == 17
    assert "17" in str(err.value)


def test_read_log_skips_and_counts_bad_lines(tmp_path):
    p = tmp_path / "a.log"
    p.write_text(COMBINED + "\n\nbroken line\n" + COMBINED + "\n")
    report = CleaningReport()
    records = list(read_log(p, report=report))
    assert len(records) == 2
    assert report.parse_errors == 1


def test_read_log_strict_raises(tmp_path):
    p = tmp_path / "a.log"
    p.write_text("broken\n")
    with pytest.raises(LogParseError):
        list(read_log(p, strict=True))


def test_read_log_gzip(tmp_path):
    import gzip
    p = tmp_path / "a.log.gz"
    with gzip.open(p, "wt") as fh:
        fh.write(COMBINED + "\n")
    assert len(list(read_log(p))) == 1


def test_always_empty_referrer_flagged():
    recs = [rec(t=i * 30, referrer=None) for i in range(20)]
    flagged = detect_nonhuman_clients(recs, CleaningConfig())
    assert flagged == {client_key(recs[0])}


def test_too_fast_client_flagged():
    recs = [rec(t=i * 0.1) for i in range(5)]
    assert detect_nonhuman_clients(recs, CleaningConfig()) == {client_key(recs[0])}


def test_mixed_referrers_normal_speed_not_flagged():
    recs = [rec(t=i * 30, referrer="http://r/" if i % 2 else None)
            for i in range(10)]
    assert detect_nonhuman_clients(recs, CleaningConfig()) == set()


def test_few_requests_never_trip_referrer_rule():
    recs = [rec(t=i * 30, referrer=None) for i in range(3)]
    assert detect_nonhuman_clients(recs, CleaningConfig()) == set()


def test_referrer_rule_can_be_disabled():
    recs = [rec(t=i * 30, referrer=None) for i in range(20)]
    cfg = CleaningConfig(empty_referrer_heuristic_enabled=False)
    assert detect_nonhuman_clients(recs, cfg) == set()


def test_detection_order_independent():
    recs = [rec(t=i * 0.1) for i in range(5)] + [rec(host="10.0.0.2", t=i * 30)
                                                 for i in range(5)]
    import random
    shuffled = recs[:]
    random.Random(7).shuffle(shuffled)
    cfg = CleaningConfig()
    assert detect_nonhuman_clients(recs, cfg) == detect_nonhuman_clients(shuffled, cfg)


def test_clean_records_counts_are_exact():
    human = [rec(host="10.0.0.2", t=i * 30) for i in range(6)]
    robot = [rec(host="10.0.0.9", t=i * 0.2) for i in range(4)]
    images = [rec(host="10.0.0.2", t=1000 + i, url=f"/x{i}.gif") for i in range(3)]
    agent = [rec(host="10.0.0.3", t=i * 30, agent="Googlebot/2.1") for i in range(2)]
    kept, report = clean_records(human + robot + images + agent, CleaningConfig())
    assert [r.client_host for r in kept] == ["10.0.0.2"] * 6
    assert report.input_records == 15
    assert report.ignored_extension == 3
    assert report.ignored_agent == 2
    assert report.nonhuman_client == 4
    assert report.output_records == 6


def test_clean_records_mixed_fixture():
    # 10 records, 4 from a flagged (too fast) client: 6 survive
    fast = [rec(host="10.0.0.9", t=i * 0.1) for i in range(4)]
    slow = [rec(host="10.0.0.2", t=i * 45) for i in range(6)]
    kept, report = clean_records(fast + slow, CleaningConfig())
    assert len(kept) == 6
    assert report.output_records == 6


def test_extension_filter_case_insensitive():
    kept, report = clean_records([rec(url="/LOGO.GIF"), rec(url="/ok")],
                                 CleaningConfig())
    assert len(kept) == 1
    assert report.ignored_extension == 1


def test_bad_config_rejected():
    with pytest.raises(ValueError):
        CleaningConfig(min_human_inter_request_seconds=0)

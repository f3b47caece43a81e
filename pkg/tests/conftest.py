import random
from pathlib import Path

import pytest

from webmint.mintlang import Wildcard
from webmint.sessions import LogView, PageOccurrence, to_page_occurrences
from webmint.taxonomy import Concept, ConceptHierarchy

DEMO = Path(__file__).resolve().parent.parent / "demo"


def seq(*pairs):
    return tuple(PageOccurrence(c, o) for c, o in pairs)


def number(concepts):
    """Turn a list of concept names into a properly numbered sequence."""
    return tuple(to_page_occurrences(concepts))


S1 = seq(("ParamA", 1), ("ShortList", 1), ("ShortList", 2),
         ("TextOnlyDescr", 1), ("TextOnlyDescr", 2))
S2 = seq(("ParamA", 1), ("LongList", 1), ("ParamA&B", 1),
         ("LongList", 2), ("TextOnlyDescr", 1))
S3 = seq(("ParamA", 1), ("LongList", 1), ("ButtonX", 1), ("LongList", 2))


@pytest.fixture
def three_sessions_view():
    return LogView([S1, S2, S3])


@pytest.fixture
def funnel_view():
    """100 sessions: 20 P A T, 10 P B T, 20 P B, 40 P C, 10 P alone."""
    seqs = ([number(["P", "A", "T"])] * 20 + [number(["P", "B", "T"])] * 10
            + [number(["P", "B"])] * 20 + [number(["P", "C"])] * 40
            + [number(["P"])] * 10)
    return LogView(seqs)


@pytest.fixture
def funnel_hierarchy():
    concepts = {c: Concept(c, role=r) for c, r in
                [("P", "action"), ("A", "other"), ("B", "other"),
                 ("C", "other"), ("T", "target")]}
    return ConceptHierarchy(concepts, rules=[], default_concept="C")


@pytest.fixture
def demo_dir():
    return DEMO


def random_view(rng, max_sessions=200, alphabet=10, max_len=8):
    names = [chr(ord("a") + i) for i in range(rng.randint(1, alphabet))]
    n = rng.randint(1, max_sessions)
    seqs = []
    for _ in range(n):
        length = rng.randint(1, max_len)
        seqs.append(number([rng.choice(names) for _ in range(length)]))
    return LogView(seqs)


def random_gsequence(rng, view, max_vars=3, max_upper=4):
    from webmint.miner import GSequence
    occs = sorted(view.observed_occurrences())
    nvars = rng.randint(1, max_vars)
    bound = tuple(rng.choice(occs) for _ in range(nvars))
    gaps = []
    for _ in range(nvars - 1):
        lower = rng.randint(0, max_upper)
        gaps.append(Wildcard(lower, rng.randint(lower, max_upper)))
    return GSequence(bound, tuple(gaps), anchored=rng.random() < 0.5)


def brute_force_match(g, s):
    """Reference matcher: try every assignment of positions directly."""
    n = len(g.bound)

    def rec(k, prev):
        if k == n:
            return True
        starts = [0] if (k == 0 and g.anchored) else (
            range(len(s)) if k == 0 else
            range(prev + 1 + g.gaps[k - 1].lower,
                  prev + 2 + g.gaps[k - 1].upper))
        for p in starts:
            if p < len(s) and s[p] == g.bound[k] and rec(k + 1, p):
                return True
        return False

    return rec(0, -1)


def brute_force_hits(g, view):
    return sum(mult for s, mult in view.seqs.items() if brute_force_match(g, s))

"""G-sequence matching and MINT query evaluation over session logs."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .aggtree import TreeNode
from .mintlang import (MintQuery, OccurrenceConstraint, RatioConstraint,
                       SupportConstraint, UrlConstraint, Wildcard,
                       _literal_matches)
from .sessions import LogView, PageOccurrence, Sequence


@dataclass(frozen=True)
class GSequence:
    """Concrete pattern: page occurrences separated by bounded wildcards."""

    bound: tuple[PageOccurrence, ...]
    gaps: tuple[Wildcard, ...]
    anchored: bool = False

    def __post_init__(self):
        if len(self.gaps) != max(len(self.bound) - 1, 0):
            raise ValueError("need exactly one wildcard between bound elements")

    def __len__(self) -> int:
        return len(self.bound)

    def prefix(self, n: int) -> "GSequence":
        return GSequence(self.bound[:n], self.gaps[: max(n - 1, 0)], self.anchored)

    def extended(self, gap: Wildcard, page: PageOccurrence) -> "GSequence":
        return GSequence(self.bound + (page,), self.gaps + (gap,), self.anchored)

    def __str__(self) -> str:
        parts = ["#"] if self.anchored else []
        for i, page in enumerate(self.bound):
            if i:
                parts.append(str(self.gaps[i - 1]))
            parts.append(str(page))
        return " ".join(parts)


class MatchResult(NamedTuple):
    positions: tuple[int, ...]  # 1-based; anchored matches start at 1


def match_session(g: GSequence, seq: Sequence) -> MatchResult | None:
    """Leftmost match of g against one session sequence, or None."""
    n = len(g.bound)
    if n == 0:
        return MatchResult(())

    def rec(k: int, prev: int) -> tuple[int, ...] | None:
        if k == n:
            return ()
        want = g.bound[k]
        if k == 0:
            candidates = range(1 if g.anchored else len(seq))
        else:
            wc = g.gaps[k - 1]
            candidates = range(prev + 1 + wc.lower,
                               min(prev + 1 + wc.upper, len(seq) - 1) + 1)
        for p in candidates:
            if p < len(seq) and seq[p] == want:
                rest = rec(k + 1, p)
                if rest is not None:
                    return (p,) + rest
        return None

    positions = rec(0, -1)
    if positions is None:
        return None
    return MatchResult(tuple(p + 1 for p in positions))


def hits(g: GSequence, view: LogView) -> int:
    """Sessions matched by g, counted with multiplicity, via the aggregate tree."""
    n = len(g.bound)
    if n == 0:
        return view.card()
    bound, gaps, anchored = g.bound, g.gaps, g.anchored
    total = 0

    def dfs(node: TreeNode, depth: int, states: set, matched: bool) -> None:
        nonlocal total
        if matched:
            # every session ending in this subtree already matched
            total += node.total_ends()
            return
        page = PageOccurrence(node.concept, node.occ)  # type: ignore[arg-type]
        new: set[tuple[int, int]] = set()
        if page == bound[0] and not (anchored and depth > 1):
            if n == 1:
                matched = True
            else:
                new.add((1, 0))
        for m, d in states:
            wc = gaps[m - 1]
            if page == bound[m] and wc.lower <= d <= wc.upper:
                if m + 1 == n:
                    matched = True
                else:
                    new.add((m + 1, 0))
            if d + 1 <= wc.upper:
                new.add((m, d + 1))
        if node.ends and matched:
            total += node.ends
        for child in node.children:
            dfs(child, depth + 1, new, matched)

    for child in view.tree().children:
        dfs(child, 1, set(), False)
    return total


def confidence(prefix: GSequence, extension: GSequence,
               view: LogView) -> Fraction | None:
    """Ratio of extension hits to prefix hits; None when undefined.

    An empty prefix uses the whole log as denominator.
    """
    denom = view.card() if len(prefix) == 0 else hits(prefix, view)
    if denom == 0:
        return None
    return Fraction(hits(extension, view), denom)


@dataclass
class NavigationPattern:
    gseq: GSequence
    trees: list[TreeNode]  # one super-rooted tree per bound element
    supports: list[int]  # hits of the g-sequence prefix ending at element i
    log_card: int

    def confidence_vs(self, i: int, j: int) -> Fraction | None:
        """Confidence of element i towards element j (j == -1: whole log)."""
        denom = self.log_card if j < 0 else self.supports[j]
        if denom == 0:
            return None
        return Fraction(self.supports[i], denom)


def build_pattern(g: GSequence, view: LogView) -> NavigationPattern:
    """One aggregate tree per bound element.

    Tree i merges, for every session matching the prefix through element i,
    the sub-path from that element up to the match of element i+1
    (marked completed) or, when the next element is never reached within
    the wildcard budget, up to budget+1 further elements or session end.
    """
    n = len(g.bound)
    unique = view.unique()
    trees: list[TreeNode] = []
    supports: list[int] = []
    for i in range(n):
        prefix = g.prefix(i + 1)
        nxt = g.prefix(i + 2) if i + 1 < n else None
        tree = TreeNode(None, 0)
        for seq, mult in unique:
            m1 = match_session(prefix, seq)
            if m1 is None:
                continue
            if nxt is None:
                tree.insert((g.bound[i],), mult, completed=False)
                continue
            m2 = match_session(nxt, seq)
            if m2 is not None:
                start, end = m2.positions[i] - 1, m2.positions[i + 1] - 1
                tree.insert(seq[start:end + 1], mult, completed=True)
            else:
                start = m1.positions[i] - 1
                end = min(len(seq) - 1, start + g.gaps[i].upper + 1)
                tree.insert(seq[start:end + 1], mult, completed=False)
        trees.append(tree.sort())
        supports.append(tree.hits)
    return NavigationPattern(g, trees, supports, view.card())


@dataclass
class QueryResult:
    gseq: GSequence
    pattern: NavigationPattern

    @property
    def supports(self) -> list[int]:
        return self.pattern.supports


_CMP = {
    ">=": lambda a, b: a >= b,
    "<=": lambda a, b: a <= b,
    "=": lambda a, b: a == b,
}


def _binding_predicates(q: MintQuery):
    """Per-variable page-occurrence filters from url/occurrence constraints."""
    preds: dict[str, list] = {v: [] for v in q.variables}
    for c in q.constraints:
        if isinstance(c, UrlConstraint):
            preds[c.variable].append(
                lambda p, c=c: _literal_matches(c.op, c.literal, p.concept))
        elif isinstance(c, OccurrenceConstraint):
            preds[c.variable].append(lambda p, c=c: p.occ == c.value)
    return preds


def _stats_pass(q: MintQuery, supports: list[int]) -> bool:
    index = {v: i for i, v in enumerate(q.variables)}
    for c in q.constraints:
        if isinstance(c, SupportConstraint):
            if not _CMP[c.cmp](Fraction(supports[index[c.variable]]), c.value):
                return False
        elif isinstance(c, RatioConstraint):
            den = supports[index[c.denominator]]
            if den == 0:
                return False
            ratio = Fraction(supports[index[c.numerator]], den)
            if not _CMP[c.cmp](ratio, c.value):
                return False
    return True


def evaluate_query(q: MintQuery, view: LogView) -> list[QueryResult]:
    """Enumerate qualifying (g-sequence, navigation pattern) pairs.

    Variable bindings are drawn from page occurrences observed in the log;
    url/occurrence constraints filter bindings, support/ratio constraints
    filter on prefix-hit statistics.
    """
    nvars = len(q.variables)
    preds = _binding_predicates(q)
    anchored = q.template.anchored

    def allowed(var: str, page: PageOccurrence) -> bool:
        return all(p(page) for p in preds[var])

    unique = view.unique()
    first_candidates = sorted(
        view.observed_first() if anchored else view.observed_occurrences())
    results: list[QueryResult] = []

    def recurse(g: GSequence, supports: list[int],
                matched: list[tuple[Sequence, int, int]]) -> None:
        i = len(g.bound)
        if i == nvars:
            if _stats_pass(q, supports):
                results.append(QueryResult(g, build_pattern(g, view)))
            return
        wc = q.template.wildcards[i - 1]
        candidates: set[PageOccurrence] = set()
        for seq, _, first in matched:
            for p in range(first + 1, len(seq)):
                candidates.add(seq[p])
        for page in sorted(candidates):
            if not allowed(q.variables[i], page):
                continue
            g2 = g.extended(wc, page)
            matched2 = []
            for seq, mult, first in matched:
                if match_session(g2, seq) is not None:
                    matched2.append((seq, mult, first))
            support = sum(m for _, m, _ in matched2)
            if support:
                recurse(g2, supports + [support], matched2)

    for page in first_candidates:
        if not allowed(q.variables[0], page):
            continue
        g = GSequence((page,), (), anchored)
        matched = []
        for seq, mult in unique:
            m = match_session(g, seq)
            if m is not None:
                matched.append((seq, mult, m.positions[0] - 1))
        support = sum(m for _, m, _ in matched)
        if support:
            recurse(g, [support], matched)

    results.sort(key=lambda r: (-r.supports[-1], str(r.gseq)))
    return results

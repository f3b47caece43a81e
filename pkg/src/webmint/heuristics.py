"""Evaluation heuristics: contact, conversion and customer/non-customer
comparison, producing redesign-candidate findings."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .aggtree import TreeNode
from .measures import (ALL_PATHS, SHORT_DEFAULT, contact_efficiency,
                       conversion_efficiency, conversion_gsequence,
                       path_spec, relative_contact_efficiency, render_percent)
from .miner import GSequence, NavigationPattern, build_pattern, hits
from .mintlang import Wildcard
from .postmine import PostMinerConfig, prune_and_merge
from .sessions import LogView, PageOccurrence
from .taxonomy import ConceptHierarchy

FINDING_KINDS = ("inefficient_in_between_page", "low_conversion_start_page",
                 "low_conversion_inner_page", "divergent_pattern",
                 "contact_shift")


@dataclass
class HeuristicConfig:
    low_contact_threshold: Fraction = Fraction(1, 5)
    low_conversion_threshold: Fraction = Fraction(1, 2)
    frequent_pattern_min_support: int = 10
    short_spec: Wildcard = SHORT_DEFAULT
    long_spec: Wildcard | None = None
    postminer_thr: int | float = 2
    # comparison tuning
    contact_shift_delta: Fraction = Fraction(1, 20)
    divergence_delta: Fraction = Fraction(1, 20)
    high_conversion_threshold: Fraction = Fraction(1, 2)
    merge_min_confidence: Fraction = Fraction(1, 20)
    exclude_concepts: frozenset[str] = frozenset()


@dataclass
class Finding:
    kind: str
    concept: str
    evidence: dict = field(default_factory=dict)
    narrative: str = ""

    def to_json(self) -> dict:
        return {"kind": self.kind, "concept": self.concept,
                "evidence": self.evidence, "narrative": self.narrative}


def findings_to_json(findings: list[Finding]) -> str:
    ordered = sorted(findings, key=lambda f: (f.kind, f.concept))
    return json.dumps([f.to_json() for f in ordered],
                      sort_keys=True, separators=(",", ":"))


def findings_to_markdown(findings: list[Finding]) -> str:
    ordered = sorted(findings, key=lambda f: (f.kind, f.concept))
    if not ordered:
        return "No findings.\n"
    lines = ["# Findings", ""]
    for f in ordered:
        lines.append(f"- **{f.kind}** `{f.concept}`: {f.narrative}")
    lines.append("")
    return "\n".join(lines)


@dataclass(frozen=True)
class ComparablePair:
    customer: GSequence
    noncustomer: GSequence
    mode: str  # same_prefix | equal_but_last


def _frac(value) -> float:
    return float(value) if value is not None else 0.0


def _subtree_completion(node: TreeNode) -> Fraction:
    """Share of sessions through this node whose fragment completed."""
    if node.hits == 0:
        return Fraction(0)
    return Fraction(node.total_completed(), node.hits)


def _inner_nodes(root: TreeNode):
    """Nodes strictly between the pattern root and its completed ends."""
    first = root.children[0] if root.concept is None and root.children else root
    for node in first.walk():
        if node is first:
            continue
        yield node


def _entry_concepts(view: LogView) -> list[PageOccurrence]:
    return sorted(view.observed_first())


def eval_contact(views: dict[str, LogView], h: ConceptHierarchy,
                 cfg: HeuristicConfig) -> list[Finding]:
    """Flag frequent in-between pages that rarely lead on to a
    low-contact action page."""
    all_view, active_view = views["all"], views["active"]
    findings: list[Finding] = []
    pm = PostMinerConfig(cfg.postminer_thr)
    for action in h.concepts_with_role("action"):
        if action in cfg.exclude_concepts:
            continue
        contact = contact_efficiency(h, action, all_view)
        relative = relative_contact_efficiency(h, action, active_view)
        if contact is None or contact == 0:
            continue  # unobserved action page: nothing to mine
        if contact >= cfg.low_contact_threshold and (
                relative is None or relative >= cfg.low_contact_threshold):
            continue
        for entry in _entry_concepts(all_view):
            if entry.concept == action:
                continue
            g = GSequence((entry, PageOccurrence(action, 1)),
                          (cfg.short_spec,), anchored=True)
            if hits(g.prefix(1), all_view) < cfg.frequent_pattern_min_support:
                continue
            pattern = build_pattern(g, all_view)
            pruned = prune_and_merge(pattern.trees[0], pm)
            for node in _inner_nodes(pruned):
                if node.concept == action:
                    continue
                onward = _subtree_completion(node)
                if onward < cfg.low_conversion_threshold:
                    findings.append(Finding(
                        kind="inefficient_in_between_page",
                        concept=node.concept or "",
                        evidence={
                            "action": action,
                            "entry": entry.concept,
                            "gsequence": str(g),
                            "node_hits": node.hits,
                            "onward_confidence": [onward.numerator,
                                                  onward.denominator],
                            "contact": [contact.numerator, contact.denominator],
                        },
                        narrative=(
                            f"{node.concept} is reached in {node.hits} sessions "
                            f"after entry {entry.concept} but only "
                            f"{render_percent(onward)}% continue to action page "
                            f"{action} (contact {render_percent(contact)}%)"),
                    ))
    return _dedupe(findings)


def eval_conversion(views: dict[str, LogView], h: ConceptHierarchy,
                    cfg: HeuristicConfig) -> list[Finding]:
    """Inside low-conversion patterns with a frequent start page, flag
    frequent pages that rarely lead to the target; if none, flag the start."""
    active = views["active"]
    findings: list[Finding] = []
    pm = PostMinerConfig(cfg.postminer_thr)
    targets = [t for t in h.concepts_with_role("target")
               if t not in cfg.exclude_concepts and active.containing(t) > 0]
    specs: list[tuple[str, Wildcard | str]] = [
        ("short", cfg.short_spec), ("all", ALL_PATHS)]
    if cfg.long_spec is not None:
        specs.append(("long", cfg.long_spec))
    for start in h.concepts_with_role("action"):
        if start in cfg.exclude_concepts:
            continue
        start_support = active.containing(start)
        if start_support < cfg.frequent_pattern_min_support:
            continue
        for target in targets:
            for spec_name, spec in specs:
                conv = conversion_efficiency(h, start, target, spec, active)
                if conv is None or conv >= cfg.low_conversion_threshold:
                    continue
                g = conversion_gsequence(start, target, path_spec(spec, active))
                pattern = build_pattern(g, active)
                pruned = prune_and_merge(pattern.trees[0], pm)
                flagged_inner = False
                for node in _inner_nodes(pruned):
                    if node.concept == target:
                        continue
                    onward = _subtree_completion(node)
                    if onward < cfg.low_conversion_threshold:
                        flagged_inner = True
                        findings.append(Finding(
                            kind="low_conversion_inner_page",
                            concept=node.concept or "",
                            evidence={
                                "start": start, "target": target,
                                "spec": spec_name, "gsequence": str(g),
                                "node_hits": node.hits,
                                "node_conversions": node.total_completed(),
                                "conversion": [conv.numerator, conv.denominator],
                            },
                            narrative=(
                                f"{node.concept} appears in {node.hits} sessions "
                                f"after {start} but leads to {target} in only "
                                f"{node.total_completed()} of them "
                                f"(pattern conversion {render_percent(conv)}%)"),
                        ))
                if not flagged_inner:
                    findings.append(Finding(
                        kind="low_conversion_start_page",
                        concept=start,
                        evidence={
                            "target": target, "spec": spec_name,
                            "conversion": [conv.numerator, conv.denominator],
                            "support": start_support,
                        },
                        narrative=(
                            f"{start} converts to {target} in only "
                            f"{render_percent(conv)}% of {start_support} "
                            f"sessions and no single in-between page explains "
                            f"the loss"),
                    ))
    return _dedupe(findings)


def comparable_patterns(customer: list[GSequence],
                        noncustomer: list[GSequence]) -> list[ComparablePair]:
    """Pair patterns whose g-sequences share a prefix; record the stricter
    equal-but-last mode when only the final element differs."""
    pairs = []
    for gc in customer:
        for gn in noncustomer:
            mode = _comparability(gc, gn)
            if mode is not None:
                pairs.append(ComparablePair(gc, gn, mode))
    return pairs


def _comparability(a: GSequence, b: GSequence) -> str | None:
    if not a.bound or not b.bound or a.bound[0] != b.bound[0]:
        return None
    if (len(a.bound) == len(b.bound) and a.gaps == b.gaps
            and a.bound[:-1] == b.bound[:-1]):
        return "equal_but_last" if a.bound[-1] != b.bound[-1] else "same_prefix"
    return "same_prefix"


def _branch_shares(root: TreeNode) -> dict[tuple, Fraction]:
    """Per-path share of root hits, keyed by the path of (concept, occ)."""
    first = root.children[0] if root.concept is None and root.children else root
    shares: dict[tuple, Fraction] = {}
    if first.hits == 0:
        return shares

    def walk(node: TreeNode, path: tuple):
        for child in node.children:
            cpath = path + (child.key,)
            shares[cpath] = Fraction(child.hits, first.hits)
            walk(child, cpath)

    walk(first, ())
    return shares


def pattern_divergences(customer_tree: TreeNode, noncustomer_tree: TreeNode,
                        delta: Fraction) -> list[dict]:
    """Branches whose share of traffic differs by more than delta between
    the two pruned trees (including branches absent on one side)."""
    sc = _branch_shares(customer_tree)
    sn = _branch_shares(noncustomer_tree)
    out = []
    for path in sorted(set(sc) | set(sn)):
        a = sc.get(path, Fraction(0))
        b = sn.get(path, Fraction(0))
        gap = abs(a - b)
        if gap > delta:
            out.append({
                "path": [list(k) for k in path],
                "customer_share": [a.numerator, a.denominator],
                "noncustomer_share": [b.numerator, b.denominator],
                "delta": [gap.numerator, gap.denominator],
            })
    return out


def merge_patterns(patterns: list[NavigationPattern]) -> TreeNode | None:
    """Union of the first trees of patterns sharing the first bound element."""
    firsts = {p.gseq.bound[0] for p in patterns if p.gseq.bound}
    if len(firsts) != 1:
        return None
    merged = TreeNode(None, 0)
    for p in patterns:
        tree = p.trees[0]
        for seq, mult, completed in _tree_fragments(tree):
            merged.insert(seq, mult, completed=False)
            if completed:
                node = merged
                for page in seq:
                    node = node.child(page.concept, page.occ)  # type: ignore
                node.completed += completed
    return merged.sort()


def _tree_fragments(root: TreeNode):
    """Recover the (fragment, multiplicity, completed) multiset of a tree."""
    def walk(node: TreeNode, path: tuple):
        if node.ends:
            yield path, node.ends, node.completed
        for child in node.children:
            yield from walk(child, path + (PageOccurrence(child.concept, child.occ),))  # type: ignore[arg-type]

    start = () if root.concept is None else (PageOccurrence(root.concept, root.occ),)  # type: ignore[arg-type]
    if root.concept is not None and root.ends:
        yield start, root.ends, root.completed
    for child in root.children:
        yield from walk(child, start + (PageOccurrence(child.concept, child.occ),))  # type: ignore[arg-type]


def eval_comparison(customer: LogView, noncustomer: LogView,
                    h: ConceptHierarchy, cfg: HeuristicConfig) -> list[Finding]:
    """Compare customer and non-customer behaviour: contact shifts plus
    divergent branches inside comparable high-conversion patterns."""
    findings: list[Finding] = []
    pm = PostMinerConfig(cfg.postminer_thr)
    actions = [a for a in h.concepts_with_role("action")
               if a not in cfg.exclude_concepts]
    targets = [t for t in h.concepts_with_role("target")
               if t not in cfg.exclude_concepts]

    # contact shifts between the two logs
    for action in actions:
        rc_c = relative_contact_efficiency(h, action, customer)
        rc_n = relative_contact_efficiency(h, action, noncustomer)
        if rc_c is None or rc_n is None:
            continue
        shift = abs(rc_c - rc_n)
        if shift > cfg.contact_shift_delta:
            findings.append(Finding(
                kind="contact_shift",
                concept=action,
                evidence={
                    "customer": [rc_c.numerator, rc_c.denominator],
                    "noncustomer": [rc_n.numerator, rc_n.denominator],
                    "delta": [shift.numerator, shift.denominator],
                },
                narrative=(
                    f"relative contact of {action} is "
                    f"{render_percent(rc_c)}% for customers vs "
                    f"{render_percent(rc_n)}% for non-customers"),
            ))

    # divergence inside comparable patterns
    for action in actions:
        if customer.containing(action) < cfg.frequent_pattern_min_support:
            continue
        for target in targets:
            conv = conversion_efficiency(h, action, target, cfg.short_spec,
                                         customer)
            if conv is None or conv < cfg.high_conversion_threshold:
                continue
            # same g-sequence on both views: partial-match fragments show
            # where the non-customers go instead of the target
            gc = conversion_gsequence(action, target, cfg.short_spec)
            cust_pattern = build_pattern(gc, customer)
            nonc_pattern = build_pattern(gc, noncustomer)
            if nonc_pattern.supports[0] == 0:
                continue
            pruned_c = prune_and_merge(cust_pattern.trees[0], pm)
            pruned_n = prune_and_merge(nonc_pattern.trees[0], pm)
            for div in pattern_divergences(pruned_c, pruned_n,
                                           cfg.divergence_delta):
                concept = div["path"][-1][0]
                findings.append(Finding(
                    kind="divergent_pattern",
                    concept=concept,
                    evidence={"action": action, "target": target, **div},
                    narrative=(
                        f"branch via {concept} after {action} carries "
                        f"{render_percent(Fraction(*div['customer_share']))}% "
                        f"of customer vs "
                        f"{render_percent(Fraction(*div['noncustomer_share']))}% "
                        f"of non-customer sessions"),
                ))
    return _dedupe(findings)


def _dedupe(findings: list[Finding]) -> list[Finding]:
    seen = set()
    out = []
    for f in sorted(findings, key=lambda f: (f.kind, f.concept)):
        key = (f.kind, f.concept, json.dumps(f.evidence, sort_keys=True))
        if key not in seen:
            seen.add(key)
            out.append(f)
    return out

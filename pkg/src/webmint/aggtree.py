"""Prefix-merged, count-annotated session trees (the aggregated log)."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable

from .sessions import LogView, PageOccurrence, Sequence


class TreeFormatError(ValueError):
    pass


@dataclass
class TreeNode:
    """One node of an aggregate tree.

    The synthetic super-root has concept=None and hits equal to the number
    of aggregated sequences. ``ends`` counts sequences terminating exactly
    here; ``completed`` marks terminations that matched the next bound
    element of a pattern; ``merged`` marks nodes produced by post-mining.
    """

    concept: str | None
    occ: int
    hits: int = 0
    ends: int = 0
    completed: int = 0
    merged: bool = False
    children: list["TreeNode"] = field(default_factory=list)

    @property
    def key(self) -> tuple[str, int]:
        return (self.concept or "", self.occ)

    def child(self, concept: str, occ: int) -> "TreeNode | None":
        for c in self.children:
            if c.concept == concept and c.occ == occ:
                return c
        return None

    def insert(self, seq: Sequence, mult: int = 1, completed: bool = False) -> None:
        self.hits += mult
        node = self
        for page in seq:
            nxt = node.child(page.concept, page.occ)
            if nxt is None:
                nxt = TreeNode(page.concept, page.occ)
                node.children.append(nxt)
            nxt.hits += mult
            node = nxt
        node.ends += mult
        if completed:
            node.completed += mult

    def sort(self) -> "TreeNode":
        """Deterministic child order: descending hits, then concept, occ."""
        self.children.sort(key=lambda c: (-c.hits, c.concept or "", c.occ))
        for c in self.children:
            c.sort()
        return self

    def walk(self) -> Iterable["TreeNode"]:
        yield self
        for c in self.children:
            yield from c.walk()

    def total_ends(self) -> int:
        return sum(n.ends for n in self.walk())

    def total_completed(self) -> int:
        return sum(n.completed for n in self.walk())

    def copy(self) -> "TreeNode":
        return TreeNode(self.concept, self.occ, self.hits, self.ends,
                        self.completed, self.merged,
                        [c.copy() for c in self.children])

    def equals(self, other: "TreeNode") -> bool:
        return (self.concept == other.concept and self.occ == other.occ
                and self.hits == other.hits and self.ends == other.ends
                and self.completed == other.completed
                and self.merged == other.merged
                and len(self.children) == len(other.children)
                and all(a.equals(b)
                        for a, b in zip(self.children, other.children)))


def build_aggregated_log(view: LogView | Iterable[tuple[Sequence, int]]) -> TreeNode:
    """Merge a multiset of sequences by common prefix under one super-root."""
    items = view.unique() if isinstance(view, LogView) else sorted(view)
    root = TreeNode(None, 0)
    for seq, mult in items:
        root.insert(seq, mult)
    return root.sort()


def prefix_hits(tree: TreeNode, prefix: Iterable[PageOccurrence]) -> int:
    """Sequences beginning with exactly this consecutive prefix."""
    node = tree
    for page in prefix:
        node = node.child(page.concept, page.occ)
        if node is None:
            return 0
    return node.hits


def to_json(node: TreeNode) -> dict:
    doc: dict = {
        "concept": node.concept,
        "occ": node.occ,
        "hits": node.hits,
        "ends": node.ends,
        "children": [to_json(c) for c in node.children],
    }
    if node.completed:
        doc["completed"] = node.completed
    if node.merged:
        doc["merged"] = True
    return doc


def serialize(tree: TreeNode) -> str:
    return json.dumps(to_json(tree), sort_keys=True, separators=(",", ":"))


def from_json(doc: dict) -> TreeNode:
    try:
        node = TreeNode(
            concept=doc["concept"],
            occ=int(doc["occ"]),
            hits=int(doc["hits"]),
            ends=int(doc["ends"]),
            completed=int(doc.get("completed", 0)),
            merged=bool(doc.get("merged", False)),
            children=[from_json(c) for c in doc.get("children", [])],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise TreeFormatError(f"malformed tree document: {exc}") from exc
    if node.hits < 0 or node.ends < 0 or node.completed < 0:
        raise TreeFormatError("negative annotation")
    child_sum = sum(c.hits for c in node.children)
    if node.hits < child_sum:
        raise TreeFormatError(
            f"hits invariant violated at {node.key}: {node.hits} < {child_sum}"
        )
    return node


def deserialize(document: str) -> TreeNode:
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise TreeFormatError(f"invalid JSON: {exc}") from exc
    return from_json(doc)


def to_dot(tree: TreeNode, title: str = "pattern") -> str:
    """Render as a DOT digraph; edges into merged nodes are dashed."""
    lines = [f'digraph "{title}" {{', "  node [shape=box];"]
    ids: dict[int, str] = {}

    def visit(node: TreeNode) -> str:
        nid = f"n{len(ids)}"
        ids[id(node)] = nid
        if node.concept is None:
            label = f"* ({node.hits})"
        else:
            label = f"{node.concept},{node.occ} ({node.hits})"
        lines.append(f'  {nid} [label="{label}"];')
        for c in node.children:
            cid = visit(c)
            style = ' [style=dashed]' if c.merged else ""
            lines.append(f"  {nid} -> {cid}{style};")
        return nid

    visit(tree)
    lines.append("}")
    return "\n".join(lines) + "\n"

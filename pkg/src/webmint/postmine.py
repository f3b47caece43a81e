"""Post-mining: prune rare sub-paths of a pattern tree and merge their ends."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .aggtree import TreeNode


@dataclass(frozen=True)
class PostMinerConfig:
    thr: int | float | Fraction

    def absolute(self, root_hits: int) -> int:
        """Fractional thresholds convert to ceil(fraction * root hits)."""
        if isinstance(self.thr, int):
            if self.thr < 1:
                raise ValueError("absolute threshold must be >= 1")
            return self.thr
        frac = Fraction(self.thr).limit_denominator(10**9)
        if not 0 < frac <= 1:
            raise ValueError("fractional threshold must be in (0, 1]")
        return math.ceil(frac * root_hits)


def _merge_into(target: TreeNode, source: TreeNode) -> None:
    """Fold source into target, summing annotations and merging children."""
    target.hits += source.hits
    target.ends += source.ends
    target.completed += source.completed
    target.merged = True
    for child in source.children:
        existing = target.child(child.concept, child.occ)  # type: ignore[arg-type]
        if existing is None:
            target.children.append(child)
        else:
            _merge_into(existing, child)


def _merge_siblings(parent: TreeNode) -> None:
    by_key: dict[tuple, TreeNode] = {}
    merged_children: list[TreeNode] = []
    for child in parent.children:
        existing = by_key.get(child.key)
        if existing is None:
            by_key[child.key] = child
            merged_children.append(child)
        else:
            _merge_into(existing, child)
    parent.children = merged_children


def prune_and_merge(tree: TreeNode, cfg: PostMinerConfig) -> TreeNode:
    """Return a copy where every non-root node meets the hit threshold.

    Sub-threshold nodes are deleted and their children reattached to the
    parent; same-key siblings then merge, summing hits and ends, until no
    node remains below the threshold. The root survives regardless.
    Merged-origin nodes carry a flag (rendered as dashed edges).
    """
    out = tree.copy()
    thr = cfg.absolute(out.hits)
    roots = {id(out)}
    # the pattern's first bound element (sole child of a super-root) is the
    # visible root and is never removed either
    if out.concept is None and len(out.children) == 1:
        roots.add(id(out.children[0]))

    changed = True
    while changed:
        changed = False
        stack = [out]
        while stack:
            node = stack.pop()
            kept: list[TreeNode] = []
            for child in node.children:
                if child.hits < thr and id(child) not in roots:
                    kept.extend(child.children)
                    changed = True
                else:
                    kept.append(child)
            node.children = kept
            _merge_siblings(node)
            stack.extend(node.children)
    return out.sort()

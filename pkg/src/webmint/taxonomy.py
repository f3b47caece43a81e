"""Service-based concept hierarchy: URL-to-concept mapping and page roles."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

ROLES = ("action", "target", "other")


class HierarchyError(ValueError):
    """Raised when a hierarchy document fails validation."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


@dataclass(frozen=True)
class Concept:
    id: str
    parent: str | None = None
    role: str | None = None  # declared role; inherited by descendants
    label: str | None = None


@dataclass(frozen=True)
class MappingRule:
    kind: str  # prefix | suffix | regex
    pattern: str
    concept: str
    priority: int

    def matches(self, url: str) -> bool:
        if self.kind == "prefix":
            return url.startswith(self.pattern)
        if self.kind == "suffix":
            return url.endswith(self.pattern)
        return re.search(self.pattern, url) is not None


@dataclass
class ConceptHierarchy:
    concepts: dict[str, Concept]
    rules: list[MappingRule]
    default_concept: str
    _role_cache: dict[str, str] = field(default_factory=dict, repr=False)

    def __contains__(self, concept_id: str) -> bool:
        return concept_id in self.concepts

    def role_of(self, concept_id: str) -> str:
        """Effective role: nearest ancestor (or self) with a declared role."""
        if concept_id not in self.concepts:
            raise KeyError(f"unknown concept: {concept_id!r}")
        cached = self._role_cache.get(concept_id)
        if cached is not None:
            return cached
        cur: str | None = concept_id
        role = "other"
        while cur is not None:
            declared = self.concepts[cur].role
            if declared is not None:
                role = declared
                break
            cur = self.concepts[cur].parent
        self._role_cache[concept_id] = role
        return role

    def map_url(self, url_path: str, query_string: str | None = None) -> str:
        """First matching rule wins; unmatched URLs map to the default concept."""
        url = url_path if not query_string else f"{url_path}?{query_string}"
        for rule in self.rules:
            if rule.matches(url):
                return rule.concept
        return self.default_concept

    def depth_of(self, concept_id: str) -> int:
        if concept_id not in self.concepts:
            raise KeyError(f"unknown concept: {concept_id!r}")
        depth = 0
        cur = self.concepts[concept_id].parent
        while cur is not None:
            depth += 1
            cur = self.concepts[cur].parent
        return depth

    def ancestor_at_level(self, concept_id: str, level: int) -> str:
        """Ancestor at the given depth from the top (level 0 = top ancestor)."""
        depth = self.depth_of(concept_id)
        if level < 0 or level > depth:
            raise ValueError(
                f"level {level} out of range for {concept_id!r} (depth {depth})"
            )
        cur = concept_id
        for _ in range(depth - level):
            cur = self.concepts[cur].parent  # type: ignore[assignment]
        return cur

    def concepts_with_role(self, role: str) -> list[str]:
        return sorted(c for c in self.concepts if self.role_of(c) == role)

    def with_concept(self, concept: Concept) -> "ConceptHierarchy":
        """Copy of this hierarchy with one concept added (or replaced)."""
        concepts = dict(self.concepts)
        concepts[concept.id] = concept
        return ConceptHierarchy(concepts, self.rules, self.default_concept)


def load_hierarchy(document: str) -> ConceptHierarchy:
    """Parse and validate a hierarchy config document (JSON).

    Schema::

        {"concepts": [{"id", "parent"?, "role"?, "label"?}, ...],
         "rules": [{"match": {"prefix"|"suffix"|"regex": str}, "concept": str}, ...],
         "default_concept": str}

    Rule order is priority order.
    """
    problems: list[str] = []
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise HierarchyError([f"invalid JSON: {exc}"]) from exc

    raw_concepts = doc.get("concepts", [])
    if not raw_concepts:
        raise HierarchyError(["empty concept list"])

    concepts: dict[str, Concept] = {}
    for i, raw in enumerate(raw_concepts):
        cid = raw.get("id")
        if not cid:
            problems.append(f"concepts[{i}]: missing id")
            continue
        if cid in concepts:
            problems.append(f"concepts[{i}]: duplicate concept id {cid!r}")
            continue
        role = raw.get("role")
        if role is not None and role not in ROLES:
            problems.append(f"concepts[{i}]: unknown role {role!r}")
            continue
        concepts[cid] = Concept(
            id=cid, parent=raw.get("parent"), role=role, label=raw.get("label")
        )

    for c in concepts.values():
        if c.parent is not None and c.parent not in concepts:
            problems.append(f"concept {c.id!r}: unknown parent {c.parent!r}")

    # cycle check over parent links
    for c in concepts.values():
        seen = {c.id}
        cur = c.parent
        while cur is not None and cur in concepts:
            if cur in seen:
                problems.append(f"concept {c.id!r}: cyclic parent chain via {cur!r}")
                break
            seen.add(cur)
            cur = concepts[cur].parent

    rules: list[MappingRule] = []
    for i, raw in enumerate(doc.get("rules", [])):
        match = raw.get("match", {})
        kinds = [k for k in ("prefix", "suffix", "regex") if k in match]
        if len(kinds) != 1:
            problems.append(f"rules[{i}]: match must have exactly one of prefix/suffix/regex")
            continue
        kind = kinds[0]
        concept = raw.get("concept")
        if concept not in concepts:
            problems.append(f"rules[{i}]: unknown concept {concept!r}")
            continue
        if kind == "regex":
            try:
                re.compile(match[kind])
            except re.error as exc:
                problems.append(f"rules[{i}]: bad regex: {exc}")
                continue
        rules.append(MappingRule(kind, match[kind], concept, priority=i))

    default = doc.get("default_concept")
    if not default:
        problems.append("missing default_concept")
    elif default not in concepts:
        problems.append(f"default_concept {default!r} not declared")

    if problems:
        raise HierarchyError(problems)
    return ConceptHierarchy(concepts, rules, default)


def load_hierarchy_file(path) -> ConceptHierarchy:
    with open(path, encoding="utf-8") as fh:
        return load_hierarchy(fh.read())

"""Deterministic synthetic session-log generator for tests and demos."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from fractions import Fraction

from .sessions import Session, SessionElement, SessionLog, to_page_occurrences
from .taxonomy import Concept, ConceptHierarchy

DEFAULT_FILLERS = ("ResultList", "ResultPage2", "HelpPage", "HomePage")


@dataclass(frozen=True)
class StrategySpec:
    concept: str
    share: float  # share of all sessions starting with this strategy
    conversion: float  # share of those reaching the target within 3 steps


@dataclass
class ScenarioSpec:
    seed: int
    sessions: int
    strategies: list[StrategySpec]
    inactive_share: float = 0.0
    target_concept: str = "/SUCCESS"
    filler_concepts: tuple[str, ...] = DEFAULT_FILLERS

    def __post_init__(self):
        total = self.inactive_share + sum(s.share for s in self.strategies)
        if total > 1.0 + 1e-9:
            raise ValueError(f"shares sum to {total:.3f} > 1")
        for s in self.strategies:
            if not 0.0 <= s.conversion <= 1.0:
                raise ValueError(f"conversion for {s.concept} not in [0,1]")

    @classmethod
    def from_json(cls, text: str) -> "ScenarioSpec":
        doc = json.loads(text)
        return cls(
            seed=doc["seed"],
            sessions=doc["sessions"],
            strategies=[StrategySpec(s["concept"], s["share"], s["conversion"])
                        for s in doc["strategies"]],
            inactive_share=doc.get("inactive_share", 0.0),
            target_concept=doc.get("target_concept", "/SUCCESS"),
            filler_concepts=tuple(doc.get("filler_concepts", DEFAULT_FILLERS)),
        )


@dataclass
class GroundTruth:
    """Counts realized in the generated log, not the spec probabilities."""
    sessions: int
    inactive: int
    per_strategy: dict[str, dict[str, int]] = field(default_factory=dict)

    @property
    def active(self) -> int:
        return self.sessions - self.inactive

    def relative_contact(self, concept: str) -> Fraction:
        return Fraction(self.per_strategy[concept]["sessions"], self.active)

    def conversion_short(self, concept: str) -> Fraction:
        row = self.per_strategy[concept]
        return Fraction(row["converted"], row["sessions"])


def scenario_hierarchy(spec: ScenarioSpec) -> ConceptHierarchy:
    concepts = {
        "Action": Concept("Action", role="action"),
        "Target": Concept("Target", role="target"),
        "Other": Concept("Other", role="other"),
        "Unknown": Concept("Unknown", parent="Other"),
        spec.target_concept: Concept(spec.target_concept, parent="Target"),
    }
    for s in spec.strategies:
        concepts[s.concept] = Concept(s.concept, parent="Action")
    for f in spec.filler_concepts:
        concepts[f] = Concept(f, parent="Other")
    return ConceptHierarchy(concepts, rules=[], default_concept="Unknown")


def _allocate(total: int, weights: list[float]) -> list[int]:
    """Largest-remainder allocation so counts match shares exactly."""
    raw = [w * total for w in weights]
    counts = [int(r) for r in raw]
    remainder = total - sum(counts)
    order = sorted(range(len(raw)), key=lambda i: (-(raw[i] - counts[i]), i))
    for i in order[:remainder]:
        counts[i] += 1
    return counts


def generate(spec: ScenarioSpec) -> tuple[SessionLog, GroundTruth]:
    """Seeded, reproducible log with exact per-strategy session counts."""
    rng = random.Random(spec.seed)
    fillers = list(spec.filler_concepts)
    weights = [s.share for s in spec.strategies] + [
        max(0.0, 1.0 - sum(s.share for s in spec.strategies) - spec.inactive_share),
        spec.inactive_share,
    ]
    counts = _allocate(spec.sessions, weights)
    strategy_counts = counts[: len(spec.strategies)]
    inactive_count = counts[-2] + counts[-1]  # unallocated share is inactive too

    plans: list[tuple[str | None, bool]] = []
    truth = GroundTruth(sessions=spec.sessions, inactive=inactive_count)
    for s, n in zip(spec.strategies, strategy_counts):
        converted = round(s.conversion * n)
        truth.per_strategy[s.concept] = {"sessions": n, "converted": converted}
        plans.extend((s.concept, True) for _ in range(converted))
        plans.extend((s.concept, False) for _ in range(n - converted))
    plans.extend((None, False) for _ in range(inactive_count))
    rng.shuffle(plans)

    base = datetime(2000, 3, 1, 8, 0, 0, tzinfo=timezone.utc)
    sessions = []
    for i, (strategy, converts) in enumerate(plans):
        if strategy is None:
            concepts = rng.choices(fillers, k=rng.randint(1, 3))
            label = "inactive"
        elif converts:
            gap = rng.randint(0, 3)
            concepts = ([strategy] + rng.choices(fillers, k=gap)
                        + [spec.target_concept])
            label = "customer"
        else:
            concepts = [strategy] + rng.choices(fillers, k=rng.randint(1, 4))
            label = "noncustomer"
        start = base + timedelta(minutes=i)
        elements = [
            SessionElement(page.concept, page.occ,
                           start + timedelta(seconds=30 * j),
                           dwell=timedelta(seconds=30))
            for j, page in enumerate(to_page_occurrences(concepts))
        ]
        if elements:
            elements[-1].dwell = None
        sessions.append(Session(f"v{i:06d}", start, elements, label=label))
    return SessionLog(sessions), truth

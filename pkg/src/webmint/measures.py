"""Site-success measures: contact, relative contact, conversion efficiency."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction

from .miner import GSequence
from .mintlang import Wildcard
from .sessions import LogView, PageOccurrence
from .taxonomy import ConceptHierarchy

ALL_PATHS = "all"

SHORT_DEFAULT = Wildcard(0, 3)


def path_spec(spec: Wildcard | str, view: LogView) -> Wildcard:
    """Resolve the 'all' path group to an unbounded wildcard for this log."""
    if spec == ALL_PATHS:
        return Wildcard(0, max(view.max_length(), 1))
    if isinstance(spec, Wildcard):
        return spec
    raise ValueError(f"bad path spec: {spec!r}")


def _require_role(h: ConceptHierarchy, concept: str, role: str) -> None:
    if concept not in h or h.role_of(concept) != role:
        raise ValueError(f"concept {concept!r} does not have role {role!r}")


def contact_efficiency(h: ConceptHierarchy, action: str,
                       all_view: LogView) -> Fraction | None:
    """Share of all sessions touching the action page; None on an empty log."""
    _require_role(h, action, "action")
    if all_view.card() == 0:
        return None
    return Fraction(all_view.containing(action), all_view.card())


def relative_contact_efficiency(h: ConceptHierarchy, action: str,
                                active_view: LogView) -> Fraction | None:
    """Same numerator over active sessions only."""
    _require_role(h, action, "action")
    if active_view.card() == 0:
        return None
    return Fraction(active_view.containing(action), active_view.card())


def conversion_gsequence(page: str, target: str, spec: Wildcard) -> GSequence:
    return GSequence((PageOccurrence(page, 1), PageOccurrence(target, 1)), (spec,))


def conversion_efficiency(h: ConceptHierarchy, page: str, target: str,
                          spec: Wildcard | str,
                          active_view: LogView) -> Fraction | None:
    """Share of active sessions containing the page whose continuation
    reaches the target along the given path group; None when undefined."""
    _require_role(h, target, "target")
    denominator = active_view.containing(page)
    if denominator == 0:
        return None
    wc = path_spec(spec, active_view)
    g = conversion_gsequence(page, target, wc)
    from .miner import hits
    return Fraction(hits(g, active_view), denominator)


def render_percent(value: Fraction | None) -> str:
    """Half-up rendering to one decimal, as in the reported tables."""
    if value is None:
        return ""
    dec = Decimal(value.numerator) / Decimal(value.denominator) * 100
    return str(dec.quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


@dataclass
class EfficiencyRow:
    concept: str
    contact: Fraction | None = None
    relative_contact: Fraction | None = None
    conversion_short: Fraction | None = None
    conversion_all: Fraction | None = None
    conversion_long: Fraction | None = None
    denominators: dict[str, int] = field(default_factory=dict)


@dataclass
class EfficiencyTable:
    rows: list[EfficiencyRow]

    COLUMNS = ("concept", "contact", "relative_contact", "conversion_short",
               "conversion_all", "conversion_long",
               "denominator_contact", "denominator_relative_contact",
               "denominator_conversion")

    def to_json(self) -> list[dict]:
        def cell(v: Fraction | None):
            if v is None:
                return None
            return {"num": v.numerator, "den": v.denominator,
                    "percent": render_percent(v)}

        return [
            {
                "concept": r.concept,
                "contact": cell(r.contact),
                "relative_contact": cell(r.relative_contact),
                "conversion_short": cell(r.conversion_short),
                "conversion_all": cell(r.conversion_all),
                "conversion_long": cell(r.conversion_long),
                "denominator_contact": r.denominators.get("contact"),
                "denominator_relative_contact": r.denominators.get("relative_contact"),
                "denominator_conversion": r.denominators.get("conversion"),
            }
            for r in self.rows
        ]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.COLUMNS)
        for r in self.rows:
            writer.writerow([
                r.concept,
                render_percent(r.contact),
                render_percent(r.relative_contact),
                render_percent(r.conversion_short),
                render_percent(r.conversion_all),
                render_percent(r.conversion_long),
                r.denominators.get("contact", ""),
                r.denominators.get("relative_contact", ""),
                r.denominators.get("conversion", ""),
            ])
        return buf.getvalue()

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))


def efficiency_table(h: ConceptHierarchy, actions: list[str], target: str | None,
                     all_view: LogView, active_view: LogView,
                     short_spec: Wildcard = SHORT_DEFAULT,
                     long_spec: Wildcard | None = None,
                     exclude: set[str] | frozenset[str] = frozenset(),
                     ) -> EfficiencyTable:
    """One row per action concept; excluded (dummy) concepts are dropped."""
    rows = []
    for concept in actions:
        if concept in exclude:
            continue
        row = EfficiencyRow(concept)
        row.contact = contact_efficiency(h, concept, all_view)
        row.relative_contact = relative_contact_efficiency(h, concept, active_view)
        row.denominators["contact"] = all_view.card()
        row.denominators["relative_contact"] = active_view.card()
        if target is not None:
            row.denominators["conversion"] = active_view.containing(concept)
            row.conversion_short = conversion_efficiency(
                h, concept, target, short_spec, active_view)
            row.conversion_all = conversion_efficiency(
                h, concept, target, ALL_PATHS, active_view)
            if long_spec is not None:
                row.conversion_long = conversion_efficiency(
                    h, concept, target, long_spec, active_view)
        rows.append(row)
    return EfficiencyTable(rows)


def table_delta(before: EfficiencyTable, after: EfficiencyTable,
                column: str = "relative_contact") -> list[dict]:
    """Before/after comparison rows with a change column, in percent points."""
    older = {r.concept: r for r in before.rows}
    out = []
    for row in after.rows:
        old = older.get(row.concept)
        new_v = getattr(row, column)
        old_v = getattr(old, column) if old else None
        change = None
        if new_v is not None and old_v is not None:
            change = render_percent(new_v - old_v)
            if not change.startswith("-") and Fraction(new_v - old_v) > 0:
                change = "+" + change
        out.append({
            "concept": row.concept,
            "old": render_percent(old_v) if old_v is not None else None,
            "new": render_percent(new_v) if new_v is not None else None,
            "change": change,
        })
    return out

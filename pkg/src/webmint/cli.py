"""Command-line interface over the mining pipeline."""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from . import aggtree
from .gateway import (ENV_CONFIG, AnalysisSnapshot, ProjectConfig, prepare,
                      results_to_json)
from .heuristics import (eval_comparison, eval_contact, eval_conversion,
                         findings_to_json, findings_to_markdown)
from .measures import ALL_PATHS, efficiency_table
from .mintlang import MintSyntaxError, Wildcard
from .sessions import VIEW_NAMES
from .synth import ScenarioSpec, generate, scenario_hierarchy
from .taxonomy import HierarchyError


def _load_config(path: str | None) -> ProjectConfig:
    path = path or os.environ.get(ENV_CONFIG) or "project.json"
    if not Path(path).exists():
        raise click.ClickException(f"config file not found: {path}")
    try:
        return ProjectConfig.load(path)
    except (KeyError, ValueError) as exc:
        raise click.ClickException(f"bad config {path}: {exc}") from exc


def _snapshot(config: str | None) -> AnalysisSnapshot:
    cfg = _load_config(config)
    if not cfg.store_path.exists():
        raise click.ClickException(
            f"session store {cfg.store_path} not found; run 'prepare' first")
    try:
        return AnalysisSnapshot(cfg)
    except (ValueError, HierarchyError) as exc:
        raise click.ClickException(str(exc)) from exc


def _parse_spec(text: str, cfg: ProjectConfig):
    if text == "all":
        return ALL_PATHS
    if text == "short":
        return cfg.heuristics.short_spec
    if text == "long":
        if cfg.heuristics.long_spec is None:
            raise click.ClickException("no long spec configured")
        return cfg.heuristics.long_spec
    try:
        lower, upper = text.strip("[]").split(";")
        return Wildcard(int(lower), int(upper))
    except ValueError as exc:
        raise click.ClickException(
            f"bad path spec {text!r}; use all, short, long or [l;u]") from exc


config_option = click.option("--config", "-c", default=None,
                             help="Project config file (JSON); defaults to "
                                  f"${ENV_CONFIG} or ./project.json.")


@click.group()
def main():
    """Mine web-server access logs for navigation patterns and site-success
    measures."""


@main.command("prepare")
@config_option
def cmd_prepare(config):
    """Ingest logs, clean, sessionize, classify and write the session store."""
    cfg = _load_config(config)
    try:
        slog, report = prepare(cfg)
    except (OSError, ValueError, HierarchyError) as exc:
        raise click.ClickException(str(exc)) from exc
    counts = slog.counts()
    click.echo(f"parsed {report.input_records} records "
               f"({report.parse_errors} parse errors), "
               f"kept {report.output_records} after cleaning")
    click.echo(f"{counts['all']} sessions: {counts['customer']} customer, "
               f"{counts['noncustomer']} noncustomer, "
               f"{counts['inactive']} inactive")
    click.echo(f"session store written to {cfg.store_path}")


@main.command("aggregate")
@config_option
@click.option("--view", default="all", type=click.Choice(VIEW_NAMES))
@click.option("--output", "-o", default=None, help="Write JSON here instead "
              "of the default out/aggregate_<view>.json.")
def cmd_aggregate(config, view, output):
    """Build and store the prefix-merged aggregate tree of a log view."""
    snap = _snapshot(config)
    tree = snap.views[view].tree()
    text = aggtree.serialize(tree)
    out = Path(output) if output else snap.cfg.out_path / f"aggregate_{view}.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text + "\n", encoding="utf-8")
    click.echo(f"{tree.hits} sessions aggregated into "
               f"{sum(1 for _ in tree.walk()) - 1} nodes -> {out}")


@main.command("mine")
@config_option
@click.option("--query", "-q", default=None, help="MINT query text.")
@click.option("--query-file", "-f", type=click.Path(exists=True), default=None)
@click.option("--view", default="all", type=click.Choice(VIEW_NAMES))
def cmd_mine(config, query, query_file, view):
    """Evaluate a MINT query; print the result documents as JSON."""
    if (query is None) == (query_file is None):
        raise click.ClickException("provide exactly one of -q or -f")
    text = query if query is not None else Path(query_file).read_text(
        encoding="utf-8").strip()
    snap = _snapshot(config)
    try:
        docs = snap.query(text, view)
    except MintSyntaxError as exc:
        raise click.ClickException(f"query error: {exc}") from exc
    patterns_dir = snap.cfg.out_path / "patterns"
    patterns_dir.mkdir(parents=True, exist_ok=True)
    for doc in docs:
        (patterns_dir / f"{doc['id']}.json").write_text(
            json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n",
            encoding="utf-8")
    sys.stdout.write(json.dumps(docs, sort_keys=True, separators=(",", ":")))
    sys.stdout.write("\n")


@main.group("measure")
def cmd_measure():
    """Success measures as tables."""


def _emit_table(table, fmt):
    if fmt == "csv":
        click.echo(table.to_csv(), nl=False)
    else:
        click.echo(table.dumps())


@cmd_measure.command("contact")
@config_option
@click.option("--format", "fmt", default="csv", type=click.Choice(["csv", "json"]))
def cmd_measure_contact(config, fmt):
    """Contact and relative contact efficiency per action page."""
    snap = _snapshot(config)
    actions = snap.hierarchy.concepts_with_role("action")
    table = efficiency_table(snap.hierarchy, actions, None,
                             snap.views["all"], snap.views["active"],
                             exclude=snap.exclude)
    _emit_table(table, fmt)


@cmd_measure.command("conversion")
@config_option
@click.option("--target", "-t", default=None, help="Target page concept; "
              "defaults to the configured success concept.")
@click.option("--spec", default="short", help="Path group: all, short, long "
              "or [l;u].")
@click.option("--format", "fmt", default="csv", type=click.Choice(["csv", "json"]))
def cmd_measure_conversion(config, target, spec, fmt):
    """Conversion efficiency from each action page to a target page."""
    snap = _snapshot(config)
    cfg = snap.cfg
    target = target or cfg.session.success_relabel
    if target is None or target not in snap.hierarchy:
        raise click.ClickException(f"unknown target concept: {target!r}")
    actions = snap.hierarchy.concepts_with_role("action")
    table = efficiency_table(
        snap.hierarchy, actions, target,
        snap.views["all"], snap.views["active"],
        short_spec=_parse_spec(spec, cfg)
        if spec != "all" else cfg.heuristics.short_spec,
        exclude=snap.exclude)
    _emit_table(table, fmt)


@main.group("report")
def cmd_report():
    """Evaluation heuristics producing redesign-candidate findings."""


def _emit_findings(findings, fmt):
    if fmt == "md":
        click.echo(findings_to_markdown(findings), nl=False)
    else:
        click.echo(findings_to_json(findings))


def _heuristic_cfg(snap: AnalysisSnapshot):
    from dataclasses import replace
    return replace(snap.cfg.heuristics,
                   exclude_concepts=frozenset(snap.exclude))


@cmd_report.command("contact")
@config_option
@click.option("--format", "fmt", default="json", type=click.Choice(["json", "md"]))
def cmd_report_contact(config, fmt):
    """Entry-to-action patterns around low-contact action pages."""
    snap = _snapshot(config)
    _emit_findings(eval_contact(snap.views, snap.hierarchy,
                                _heuristic_cfg(snap)), fmt)


@cmd_report.command("conversion")
@config_option
@click.option("--format", "fmt", default="json", type=click.Choice(["json", "md"]))
def cmd_report_conversion(config, fmt):
    """Loss points inside low-conversion patterns."""
    snap = _snapshot(config)
    _emit_findings(eval_conversion(snap.views, snap.hierarchy,
                                   _heuristic_cfg(snap)), fmt)


@cmd_report.command("compare")
@config_option
@click.option("--format", "fmt", default="json", type=click.Choice(["json", "md"]))
def cmd_report_compare(config, fmt):
    """Customer vs non-customer contact shifts and divergent branches."""
    snap = _snapshot(config)
    _emit_findings(eval_comparison(snap.views["customer"],
                                   snap.views["noncustomer"],
                                   snap.hierarchy, _heuristic_cfg(snap)), fmt)


@main.command("export")
@config_option
@click.option("--format", "fmt", default="json", type=click.Choice(["json", "dot"]))
@click.argument("pattern_ref")
def cmd_export(config, fmt, pattern_ref):
    """Export a mined pattern (by id, as printed by 'mine') as JSON or DOT."""
    cfg = _load_config(config)
    path = cfg.out_path / "patterns" / f"{pattern_ref}.json"
    if not path.exists():
        raise click.ClickException(f"unknown pattern {pattern_ref!r}")
    doc = json.loads(path.read_text(encoding="utf-8"))
    if fmt == "json":
        sys.stdout.write(json.dumps(doc, sort_keys=True, separators=(",", ":")))
        sys.stdout.write("\n")
        return
    for i, tree_doc in enumerate(doc["trees"]):
        tree = aggtree.from_json(tree_doc)
        title = f"{doc['gsequence']} tree {i}"
        sys.stdout.write(aggtree.to_dot(tree, title=title))


@main.command("serve")
@config_option
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8000, type=int)
def cmd_serve(config, host, port):
    """Run the HTTP analysis service."""
    import uvicorn

    from .service import create_app
    cfg = _load_config(config)
    uvicorn.run(create_app(cfg), host=host, port=port, log_level="warning")


@main.command("synth")
@click.argument("scenario", type=click.Path(exists=True))
@click.option("--store", "-o", required=True, help="Session store to write.")
@click.option("--hierarchy-out", default=None,
              help="Write a matching concept hierarchy document here.")
@click.option("--truth-out", default=None,
              help="Write realized per-strategy counts here.")
def cmd_synth(scenario, store, hierarchy_out, truth_out):
    """Generate a deterministic synthetic session store from a scenario."""
    try:
        spec = ScenarioSpec.from_json(Path(scenario).read_text(encoding="utf-8"))
    except (KeyError, ValueError) as exc:
        raise click.ClickException(f"bad scenario: {exc}") from exc
    slog, truth = generate(spec)
    Path(store).parent.mkdir(parents=True, exist_ok=True)
    from .sessions import write_store
    write_store(slog, store)
    if hierarchy_out:
        h = scenario_hierarchy(spec)
        doc = {
            "concepts": [
                {"id": c.id,
                 **({"parent": c.parent} if c.parent else {}),
                 **({"role": c.role} if c.role else {})}
                for c in h.concepts.values()
            ],
            "rules": [],
            "default_concept": h.default_concept,
        }
        Path(hierarchy_out).write_text(json.dumps(doc, indent=2) + "\n",
                                       encoding="utf-8")
    if truth_out:
        Path(truth_out).write_text(json.dumps({
            "sessions": truth.sessions,
            "inactive": truth.inactive,
            "per_strategy": truth.per_strategy,
        }, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    counts = slog.counts()
    click.echo(f"wrote {counts['all']} sessions "
               f"({counts['customer']} customer, "
               f"{counts['noncustomer']} noncustomer, "
               f"{counts['inactive']} inactive) to {store}")


if __name__ == "__main__":
    main()

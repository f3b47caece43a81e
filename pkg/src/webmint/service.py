"""HTTP analysis service over a prepared session store."""

from __future__ import annotations

import json

from fastapi import FastAPI, HTTPException, Request, Response

from . import aggtree
from .gateway import AnalysisSnapshot, ProjectConfig
from .heuristics import comparable_patterns, pattern_divergences
from .measures import ALL_PATHS, efficiency_table
from .miner import evaluate_query
from .mintlang import MintSyntaxError, Wildcard, parse_query
from .postmine import PostMinerConfig, prune_and_merge
from .sessions import VIEW_NAMES


def _json_response(payload, status_code: int = 200) -> Response:
    # hand-serialized so CLI and HTTP emit byte-identical documents
    body = json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"
    return Response(content=body, status_code=status_code,
                    media_type="application/json")


def _bad_request(message: str, **extra) -> HTTPException:
    return HTTPException(status_code=400, detail={"error": message, **extra})


def _check_view(name: str) -> str:
    if name not in VIEW_NAMES:
        raise _bad_request(f"unknown view {name!r}", views=list(VIEW_NAMES))
    return name


def _parse_spec(text: str, snap: AnalysisSnapshot):
    if text == "all":
        return ALL_PATHS
    if text == "short":
        return snap.cfg.heuristics.short_spec
    if text == "long" and snap.cfg.heuristics.long_spec is not None:
        return snap.cfg.heuristics.long_spec
    try:
        lower, upper = text.strip("[]").split(";")
        return Wildcard(int(lower), int(upper))
    except ValueError:
        raise _bad_request(f"bad path spec {text!r}; use all, short or [l;u]")


def create_app(cfg: ProjectConfig) -> FastAPI:
    app = FastAPI(title="webmint", docs_url=None, redoc_url=None)
    state: dict = {"snapshot": None}

    def snapshot() -> AnalysisSnapshot:
        if state["snapshot"] is None:
            if not cfg.store_path.exists():
                raise HTTPException(
                    status_code=409,
                    detail={"error": f"session store {cfg.store_path} not "
                                     "found; run prepare first"})
            state["snapshot"] = AnalysisSnapshot(cfg)
        return state["snapshot"]

    @app.get("/api/summary")
    def summary():
        snap = snapshot()
        return _json_response({
            "counts": snap.counts(),
            "actions": [c for c in snap.hierarchy.concepts_with_role("action")
                        if c not in snap.exclude],
            "targets": [c for c in snap.hierarchy.concepts_with_role("target")
                        if c not in snap.exclude],
        })

    @app.post("/api/query")
    async def query(request: Request):
        snap = snapshot()
        body = await request.json()
        mint = body.get("mint")
        if not isinstance(mint, str):
            raise _bad_request("body must contain a 'mint' query string")
        view = _check_view(body.get("view", "all"))
        try:
            docs = snap.query(mint, view)
        except MintSyntaxError as exc:
            raise _bad_request(str(exc), line=exc.line, column=exc.column)
        return _json_response(docs)

    @app.get("/api/measures/contact")
    def measures_contact(view: str = "all"):
        snap = snapshot()
        _check_view(view)
        actions = snap.hierarchy.concepts_with_role("action")
        table = efficiency_table(snap.hierarchy, actions, None,
                                 snap.views[view], snap.views["active"],
                                 exclude=snap.exclude)
        return _json_response(table.to_json())

    @app.get("/api/measures/conversion")
    def measures_conversion(target: str = "", spec: str = "short"):
        snap = snapshot()
        target = target or snap.cfg.session.success_relabel or ""
        if target not in snap.hierarchy:
            raise _bad_request(f"unknown target concept {target!r}")
        resolved = _parse_spec(spec, snap)
        actions = snap.hierarchy.concepts_with_role("action")
        table = efficiency_table(
            snap.hierarchy, actions, target,
            snap.views["all"], snap.views["active"],
            short_spec=resolved if isinstance(resolved, Wildcard)
            else snap.cfg.heuristics.short_spec,
            exclude=snap.exclude)
        return _json_response(table.to_json())

    @app.post("/api/postmine")
    async def postmine(request: Request):
        snap = snapshot()
        body = await request.json()
        thr = body.get("thr")
        if not isinstance(thr, (int, float)) or isinstance(thr, bool):
            raise _bad_request("'thr' must be a number")
        pm = PostMinerConfig(thr)
        pattern = body.get("pattern")
        try:
            if isinstance(pattern, str):
                doc = snap.patterns.get(pattern)
                if doc is None:
                    raise HTTPException(status_code=404,
                                        detail={"error": f"unknown pattern "
                                                         f"{pattern!r}"})
                trees = [prune_and_merge(aggtree.from_json(t), pm)
                         for t in doc["trees"]]
                return _json_response({"id": pattern,
                                       "trees": [aggtree.to_json(t)
                                                 for t in trees]})
            if isinstance(pattern, dict):
                tree = prune_and_merge(aggtree.from_json(pattern), pm)
                return _json_response({"tree": aggtree.to_json(tree)})
        except (aggtree.TreeFormatError, ValueError) as exc:
            raise _bad_request(str(exc))
        raise _bad_request("'pattern' must be a stored pattern id or a "
                           "tree document")

    @app.post("/api/compare")
    async def compare(request: Request):
        snap = snapshot()
        body = await request.json()
        mint = body.get("query")
        if not isinstance(mint, str):
            raise _bad_request("body must contain a 'query' string")
        thr = body.get("thr", snap.cfg.heuristics.postminer_thr)
        if not isinstance(thr, (int, float)) or isinstance(thr, bool):
            raise _bad_request("'thr' must be a number")
        try:
            q = parse_query(mint)
        except MintSyntaxError as exc:
            raise _bad_request(str(exc), line=exc.line, column=exc.column)
        pm = PostMinerConfig(thr)
        cust = evaluate_query(q, snap.views["customer"])
        nonc = evaluate_query(q, snap.views["noncustomer"])
        by_gseq = {"customer": {str(r.gseq): r for r in cust},
                   "noncustomer": {str(r.gseq): r for r in nonc}}
        pairs = comparable_patterns([r.gseq for r in cust],
                                    [r.gseq for r in nonc])
        delta = snap.cfg.heuristics.divergence_delta
        out = []
        for pair in pairs:
            rc = by_gseq["customer"][str(pair.customer)]
            rn = by_gseq["noncustomer"][str(pair.noncustomer)]
            pruned_c = prune_and_merge(rc.pattern.trees[0], pm)
            pruned_n = prune_and_merge(rn.pattern.trees[0], pm)
            out.append({
                "customer": str(pair.customer),
                "noncustomer": str(pair.noncustomer),
                "mode": pair.mode,
                "divergences": pattern_divergences(pruned_c, pruned_n, delta),
                "trees": {"customer": aggtree.to_json(pruned_c),
                          "noncustomer": aggtree.to_json(pruned_n)},
            })
        return _json_response({"pairs": out})

    @app.get("/api/patterns/{pattern_id}")
    def get_pattern(pattern_id: str):
        snap = snapshot()
        doc = snap.patterns.get(pattern_id)
        if doc is None:
            raise HTTPException(status_code=404,
                                detail={"error": f"unknown pattern "
                                                 f"{pattern_id!r}"})
        return _json_response(doc)

    return app

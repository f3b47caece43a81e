// Query console state machine: submit a MINT query, pick a result, adjust
// the post-mining threshold, or switch to compare mode. Rendering only ever
// shows documents returned by the service.

import { ApiError, ExplorerClient } from "./api.js";
import { CompareView } from "./compareView.js";
import { TreeView, escapeHtml, renderPattern } from "./treeView.js";
import { ComparePair, PatternDoc, TreeDoc } from "./types.js";

export class QueryConsole {
    client: ExplorerClient;
    results: PatternDoc[] = [];
    selectedId: string | null = null;
    threshold: number | null = null;
    prunedTrees: TreeDoc[] | null = null;
    comparePairs: ComparePair[] | null = null;
    error: string | null = null;
    private treeViews = new Map<string, TreeView[]>();

    constructor(client: ExplorerClient) {
        this.client = client;
    }

    get selected(): PatternDoc | null {
        return this.results.find(r => r.id === this.selectedId) ?? null;
    }

    async submit(mint: string, view = "all"): Promise<PatternDoc[]> {
        this.error = null;
        this.comparePairs = null;
        this.prunedTrees = null;
        this.threshold = null;
        this.treeViews.clear();
        try {
            this.results = await this.client.query(mint, view);
        } catch (err) {
            this.results = [];
            this.selectedId = null;
            this.error = err instanceof ApiError ? err.message : String(err);
            return [];
        }
        this.selectedId = this.results.length ? this.results[0].id : null;
        return this.results;
    }

    select(id: string): void {
        if (!this.results.some(r => r.id === id)) {
            throw new Error(`unknown result ${id}`);
        }
        this.selectedId = id;
        this.prunedTrees = null;
        this.threshold = null;
    }

    // Threshold control: ask the service to prune-and-merge the selected
    // pattern; the re-rendered trees are exactly what it sends back.
    async setThreshold(thr: number): Promise<TreeDoc[]> {
        if (this.selectedId === null) throw new Error("no pattern selected");
        const doc = await this.client.postminePattern(this.selectedId, thr);
        this.threshold = thr;
        this.prunedTrees = doc.trees;
        this.treeViews.delete(this.selectedId);
        return doc.trees;
    }

    clearThreshold(): void {
        this.threshold = null;
        this.prunedTrees = null;
        if (this.selectedId !== null) this.treeViews.delete(this.selectedId);
    }

    async compare(query: string, thr?: number): Promise<ComparePair[]> {
        this.error = null;
        try {
            const doc = await this.client.compare(query, thr);
            this.comparePairs = doc.pairs;
        } catch (err) {
            this.comparePairs = [];
            this.error = err instanceof ApiError ? err.message : String(err);
        }
        return this.comparePairs;
    }

    // Expand/collapse survives re-selection of the same result.
    viewsFor(doc: PatternDoc, trees: TreeDoc[]): TreeView[] {
        let views = this.treeViews.get(doc.id);
        if (!views || views.length !== trees.length ||
            views.some((v, i) => v.tree !== trees[i])) {
            views = trees.map(t => new TreeView(t));
            this.treeViews.set(doc.id, views);
        }
        return views;
    }

    toggle(index: number, path: string): void {
        const doc = this.selected;
        if (!doc) return;
        const trees = this.prunedTrees ?? doc.trees;
        this.viewsFor(doc, trees)[index].toggle(path);
    }

    renderResultList(): string {
        const items = this.results.map(r => {
            const cls = r.id === this.selectedId ? "result selected" : "result";
            const supports = r.stats.map(s => s.support).join(", ");
            return `<li class="${cls}" data-id="${escapeHtml(r.id)}">` +
                `<code>${escapeHtml(r.gsequence)}</code>` +
                `<span class="supports">${supports}</span></li>`;
        });
        return `<ul class="results">${items.join("")}</ul>`;
    }

    renderSelected(): string {
        const doc = this.selected;
        if (!doc) {
            return this.error
                ? `<p class="error">${escapeHtml(this.error)}</p>`
                : `<p class="empty">no pattern selected</p>`;
        }
        const trees = this.prunedTrees ?? doc.trees;
        const body = renderPattern({ ...doc, trees },
                                   this.viewsFor(doc, trees));
        const thr = this.threshold !== null
            ? `<p class="threshold">threshold ${this.threshold}</p>` : "";
        return thr + body;
    }

    renderCompare(): string {
        if (this.comparePairs === null) return "";
        if (this.comparePairs.length === 0) {
            return this.error
                ? `<p class="error">${escapeHtml(this.error)}</p>`
                : `<p class="empty">no comparable pairs</p>`;
        }
        return this.comparePairs
            .map(p => new CompareView(p).render()).join("");
    }

    render(): string {
        return `<div class="console">${this.renderResultList()}` +
            `${this.renderSelected()}${this.renderCompare()}</div>`;
    }
}

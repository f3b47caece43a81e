// Thin fetch client for the webmint analysis service.

import {
    CompareDoc, PatternDoc, PostmineByIdDoc, PostmineTreeDoc, SummaryDoc,
    TreeDoc,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
    status: number;
    detail: unknown;

    constructor(status: number, detail: unknown) {
        const message = detail && typeof detail === "object" &&
            "error" in (detail as Record<string, unknown>)
            ? String((detail as Record<string, unknown>).error)
            : `request failed with status ${status}`;
        super(message);
        this.status = status;
        this.detail = detail;
    }
}

export class ExplorerClient {
    private baseUrl: string;
    private fetchFn: FetchLike;

    constructor(baseUrl: string, fetchFn?: FetchLike) {
        this.baseUrl = baseUrl.replace(/\/+$/, "");
        this.fetchFn = fetchFn ?? ((url, init) => fetch(url, init));
    }

    private async request<T>(method: string, path: string,
                             body?: unknown): Promise<T> {
        const init: RequestInit = { method };
        if (body !== undefined) {
            init.headers = { "Content-Type": "application/json" };
            init.body = JSON.stringify(body);
        }
        const resp = await this.fetchFn(this.baseUrl + path, init);
        const doc = await resp.json();
        if (!resp.ok) {
            // FastAPI wraps error payloads in {"detail": ...}
            throw new ApiError(resp.status, doc && doc.detail !== undefined
                ? doc.detail : doc);
        }
        return doc as T;
    }

    summary(): Promise<SummaryDoc> {
        return this.request("GET", "/api/summary");
    }

    query(mint: string, view = "all"): Promise<PatternDoc[]> {
        return this.request("POST", "/api/query", { mint, view });
    }

    pattern(id: string): Promise<PatternDoc> {
        return this.request("GET", `/api/patterns/${id}`);
    }

    postminePattern(id: string, thr: number): Promise<PostmineByIdDoc> {
        return this.request("POST", "/api/postmine", { pattern: id, thr });
    }

    postmineTree(tree: TreeDoc, thr: number): Promise<PostmineTreeDoc> {
        return this.request("POST", "/api/postmine", { pattern: tree, thr });
    }

    compare(query: string, thr?: number): Promise<CompareDoc> {
        const body: Record<string, unknown> = { query };
        if (thr !== undefined) body.thr = thr;
        return this.request("POST", "/api/compare", body);
    }
}

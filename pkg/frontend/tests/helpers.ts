import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

export const testsDir = dirname(fileURLToPath(import.meta.url));
export const repoRoot = join(testsDir, "..", "..");

export function fixture<T>(name: string): T {
    return JSON.parse(
        readFileSync(join(testsDir, "fixtures", name), "utf-8")) as T;
}

// Minimal in-memory service double: routes to canned response documents.
export function stubFetch(routes: Record<string, unknown>) {
    const calls: { url: string; body: unknown }[] = [];
    const fetchFn = async (url: string, init?: RequestInit) => {
        const path = new URL(url).pathname;
        calls.push({
            url,
            body: init?.body ? JSON.parse(String(init.body)) : undefined,
        });
        if (!(path in routes)) {
            return new Response(JSON.stringify({ detail: { error: "not found" } }),
                                { status: 404 });
        }
        const doc = routes[path];
        return new Response(JSON.stringify(doc), {
            status: 200,
            headers: { "Content-Type": "application/json" },
        });
    };
    return { fetchFn, calls };
}

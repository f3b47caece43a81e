// End-to-end run against a real service instance serving the bundled
// three-session example store.

import { ChildProcess, spawn } from "node:child_process";
import { join } from "node:path";
import { afterAll, beforeAll, expect, test } from "vitest";

import { ExplorerClient } from "../src/api.js";
import { QueryConsole } from "../src/console.js";
import { PostmineTreeDoc, TreeDoc } from "../src/types.js";
import { fixture, repoRoot } from "./helpers.js";

const PORT = 8900 + (process.pid % 100);
const BASE = `http://127.0.0.1:${PORT}`;
const RUNNER =
    "import sys, uvicorn\n" +
    "from webmint.gateway import ProjectConfig\n" +
    "from webmint.service import create_app\n" +
    "app = create_app(ProjectConfig.load(sys.argv[1]))\n" +
    "uvicorn.run(app, host='127.0.0.1', port=int(sys.argv[2]), " +
    "log_level='warning')\n";

let server: ChildProcess;

beforeAll(async () => {
    server = spawn("python3",
        ["-c", RUNNER, join(repoRoot, "demo", "example_project.json"),
         String(PORT)],
        { stdio: ["ignore", "ignore", "inherit"] });
    const deadline = Date.now() + 20000;
    for (;;) {
        try {
            const resp = await fetch(`${BASE}/api/summary`);
            if (resp.ok) break;
        } catch {
            // not listening yet
        }
        if (Date.now() > deadline) throw new Error("service did not start");
        await new Promise(r => setTimeout(r, 200));
    }
}, 25000);

afterAll(() => {
    server?.kill();
});

test("summary reports the example store composition", async () => {
    const client = new ExplorerClient(BASE);
    const summary = await client.summary();
    expect(summary.counts).toEqual(
        { all: 3, active: 3, inactive: 0, customer: 2, noncustomer: 1 });
});

test("query console renders the served pattern with badges 3 and 2",
     async () => {
    const con = new QueryConsole(new ExplorerClient(BASE));
    const results = await con.submit(
        'select t from node as x y, template # x [0;3] y as t ' +
        'where y.url contains "Descr" and y.occurrence = 1');
    expect(results).toHaveLength(1);
    expect(results[0].gsequence).toBe("# (ParamA,1) [0;3] (TextOnlyDescr,1)");
    expect(results[0].stats.map(s => s.support)).toEqual([3, 2]);
    const html = con.render();
    expect(html).toContain('<span class="label">ParamA,1</span>' +
                           '<span class="badge">3</span>');
    expect(html).toContain('<span class="label">TextOnlyDescr,1</span>' +
                           '<span class="badge">2</span>');
});

test("threshold control reproduces the dashed merged node", async () => {
    const client = new ExplorerClient(BASE);
    const input = fixture<TreeDoc>("postmine_input.json");
    const doc: PostmineTreeDoc = await client.postmineTree(input, 2);
    const children = doc.tree.children.map(
        c => [c.concept, c.hits, Boolean(c.merged)]);
    expect(children).toContainEqual(["T", 2, true]);
    expect(children).toContainEqual(["C", 8, false]);
    const { TreeView } = await import("../src/treeView.js");
    const html = new TreeView(doc.tree).render();
    expect(html).toContain('class="node merged dashed"');
    expect(html).toContain('<span class="label">T,1</span>' +
                           '<span class="badge">2</span>');
});

test("threshold slider on a mined pattern re-renders pruned trees",
     async () => {
    const con = new QueryConsole(new ExplorerClient(BASE));
    await con.submit(
        'select t from node as x y, template # x [0;3] y as t ' +
        'where y.url contains "Descr" and y.occurrence = 1');
    const before = con.render();
    await con.setThreshold(2);
    const after = con.render();
    expect(after).toContain("threshold 2");
    expect(after).not.toBe(before);
    // branches below the threshold are gone or merged server-side
    expect(after).not.toContain("ButtonX,1");
});

test("syntax errors come back with a position", async () => {
    const con = new QueryConsole(new ExplorerClient(BASE));
    await con.submit("select t frm node as x, template x as t");
    expect(con.results).toEqual([]);
    expect(con.error).toMatch(/line \d+/);
});

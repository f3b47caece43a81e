// Collapsible rendering of aggregated navigation-pattern trees. Badge values
// are the hit counts from the service document, verbatim.

import { PatternDoc, TreeDoc } from "./types.js";

export function escapeHtml(text: string): string {
    return text
        .replace(/&/g, "&amp;")
        .replace(/</g, "&lt;")
        .replace(/>/g, "&gt;")
        .replace(/"/g, "&quot;");
}

export function nodeKey(concept: string, occ: number): string {
    return `${concept},${occ}`;
}

export function pathKey(path: [string, number][]): string {
    return path.map(([c, o]) => nodeKey(c, o)).join("/");
}

// Divergence paths from the service are relative to the first real node of
// a tree; prefix them with that node's key to address rendered nodes.
export function anchoredPathKey(tree: TreeDoc,
                                path: [string, number][]): string {
    const first = tree.concept === null && tree.children.length
        ? tree.children[0] : tree;
    const head = nodeKey(first.concept ?? "", first.occ);
    return path.length ? `${head}/${pathKey(path)}` : head;
}

export class TreeView {
    tree: TreeDoc;
    private collapsed = new Set<string>();
    private highlighted = new Set<string>();

    constructor(tree: TreeDoc) {
        this.tree = tree;
    }

    toggle(path: string): void {
        if (this.collapsed.has(path)) this.collapsed.delete(path);
        else this.collapsed.add(path);
    }

    isCollapsed(path: string): boolean {
        return this.collapsed.has(path);
    }

    highlight(pathKeys: Iterable<string>): void {
        this.highlighted = new Set(pathKeys);
    }

    render(): string {
        // the synthetic root is not a page; render its children as a forest
        const roots = this.tree.concept === null
            ? this.tree.children : [this.tree];
        return `<ul class="pattern-tree">` +
            `${roots.map(r => this.renderNode(r, "")).join("")}</ul>`;
    }

    private renderNode(node: TreeDoc, parentPath: string): string {
        const key = nodeKey(node.concept ?? "", node.occ);
        const path = parentPath ? `${parentPath}/${key}` : key;
        const classes = ["node"];
        if (node.merged) classes.push("merged", "dashed");
        if (this.highlighted.has(path)) classes.push("divergent");
        const collapsed = this.collapsed.has(path);
        const hasChildren = node.children.length > 0;
        const toggle = hasChildren
            ? `<span class="toggle" data-path="${escapeHtml(path)}">` +
              `${collapsed ? "+" : "-"}</span>`
            : "";
        const completed = node.completed
            ? `<span class="completed" title="paths completed here">` +
              `${node.completed}</span>`
            : "";
        let html = `<li data-path="${escapeHtml(path)}">` +
            `<span class="${classes.join(" ")}">${toggle}` +
            `<span class="label">${escapeHtml(key)}</span>` +
            `<span class="badge">${node.hits}</span>${completed}</span>`;
        if (hasChildren && !collapsed) {
            html += `<ul>${node.children
                .map(c => this.renderNode(c, path)).join("")}</ul>`;
        }
        return html + "</li>";
    }
}

export function renderPattern(doc: PatternDoc,
                              views?: TreeView[]): string {
    const trees = views ?? doc.trees.map(t => new TreeView(t));
    const parts = trees.map((tv, i) =>
        `<div class="fragment" data-index="${i}">${tv.render()}</div>`);
    return `<div class="pattern" data-id="${escapeHtml(doc.id)}">` +
        `<code class="gsequence">${escapeHtml(doc.gsequence)}</code>` +
        `${parts.join("")}</div>`;
}

// Side-by-side rendering of a customer vs non-customer pattern pair.
// Divergent branches reported by the service are highlighted in both trees
// and listed with their exact shares (no client-side arithmetic).

import { TreeView, anchoredPathKey, escapeHtml, pathKey } from "./treeView.js";
import { ComparePair, Rational } from "./types.js";

export function formatShare([num, den]: Rational): string {
    return `${num}/${den}`;
}

export class CompareView {
    pair: ComparePair;
    customerTree: TreeView;
    noncustomerTree: TreeView;

    constructor(pair: ComparePair) {
        this.pair = pair;
        this.customerTree = new TreeView(pair.trees.customer);
        this.noncustomerTree = new TreeView(pair.trees.noncustomer);
        const paths = pair.divergences.map(d => d.path);
        this.customerTree.highlight(
            paths.map(p => anchoredPathKey(pair.trees.customer, p)));
        this.noncustomerTree.highlight(
            paths.map(p => anchoredPathKey(pair.trees.noncustomer, p)));
    }

    renderDivergences(): string {
        if (this.pair.divergences.length === 0) {
            return `<p class="no-divergences">no divergent branches</p>`;
        }
        const rows = this.pair.divergences.map(d =>
            `<li class="divergence" data-path="${escapeHtml(pathKey(d.path))}">` +
            `<code>${escapeHtml(pathKey(d.path))}</code>` +
            `<span class="share customer">${formatShare(d.customer_share)}</span>` +
            `<span class="share noncustomer">` +
            `${formatShare(d.noncustomer_share)}</span>` +
            `<span class="delta">${formatShare(d.delta)}</span></li>`);
        return `<ul class="divergences">${rows.join("")}</ul>`;
    }

    render(): string {
        return `<div class="compare-pair" data-mode="${escapeHtml(this.pair.mode)}">` +
            `<div class="side customer">` +
            `<code class="gsequence">${escapeHtml(this.pair.customer)}</code>` +
            `${this.customerTree.render()}</div>` +
            `<div class="side noncustomer">` +
            `<code class="gsequence">${escapeHtml(this.pair.noncustomer)}</code>` +
            `${this.noncustomerTree.render()}</div>` +
            `${this.renderDivergences()}</div>`;
    }
}

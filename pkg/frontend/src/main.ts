// Browser wiring: connects the form controls to the console state machine.
// Serve the repository root over HTTP with the analysis service running on
// the same origin (or set ?api=http://host:port).

import { ExplorerClient } from "./api.js";
import { QueryConsole } from "./console.js";

function el<T extends HTMLElement>(id: string): T {
    const node = document.getElementById(id);
    if (!node) throw new Error(`missing element #${id}`);
    return node as T;
}

export function start(): void {
    const params = new URLSearchParams(window.location.search);
    const base = params.get("api") ?? window.location.origin;
    const con = new QueryConsole(new ExplorerClient(base));

    const queryBox = el<HTMLTextAreaElement>("query");
    const viewPick = el<HTMLSelectElement>("view");
    const slider = el<HTMLInputElement>("threshold");
    const sliderLabel = el<HTMLElement>("threshold-value");
    const compareBox = el<HTMLInputElement>("compare-mode");
    const output = el<HTMLElement>("output");

    const redraw = () => {
        output.innerHTML = compareBox.checked
            ? con.renderCompare() : con.render();
    };

    el<HTMLButtonElement>("run").addEventListener("click", async () => {
        if (compareBox.checked) {
            await con.compare(queryBox.value, Number(slider.value) || undefined);
        } else {
            await con.submit(queryBox.value, viewPick.value);
        }
        redraw();
    });

    slider.addEventListener("change", async () => {
        sliderLabel.textContent = slider.value;
        const thr = Number(slider.value);
        if (con.selectedId !== null) {
            if (thr > 1) await con.setThreshold(thr);
            else con.clearThreshold();
            redraw();
        }
    });

    output.addEventListener("click", ev => {
        const target = ev.target as HTMLElement;
        if (target.classList.contains("toggle")) {
            const fragment = target.closest<HTMLElement>(".fragment");
            const path = target.dataset.path;
            if (fragment && path) {
                con.toggle(Number(fragment.dataset.index), path);
                redraw();
            }
            return;
        }
        const result = target.closest<HTMLElement>(".result");
        if (result?.dataset.id) {
            con.select(result.dataset.id);
            redraw();
        }
    });
}

start();

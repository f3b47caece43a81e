// Document shapes as emitted by the webmint HTTP service. Every number the
// UI shows comes straight out of these documents; nothing is recomputed here.

export interface TreeDoc {
    concept: string | null;   // null marks the synthetic aggregate root
    occ: number;
    hits: number;
    ends: number;
    children: TreeDoc[];
    completed?: number;
    merged?: boolean;
}

export interface ConfidenceCell {
    vs: number | null;       // null = against the whole view
    hits: number;
    of: number;
}

export interface StatEntry {
    support: number;
    confidence: ConfidenceCell[];
}

export interface PatternDoc {
    id: string;
    gsequence: string;
    stats: StatEntry[];
    trees: TreeDoc[];
}

export interface SummaryDoc {
    counts: { [view: string]: number };
    actions: string[];
    targets: string[];
}

export type Rational = [number, number];   // exact numerator/denominator

export interface Divergence {
    path: [string, number][];
    customer_share: Rational;
    noncustomer_share: Rational;
    delta: Rational;
}

export interface ComparePair {
    customer: string;
    noncustomer: string;
    mode: string;
    divergences: Divergence[];
    trees: { customer: TreeDoc; noncustomer: TreeDoc };
}

export interface CompareDoc {
    pairs: ComparePair[];
}

export interface PostmineByIdDoc {
    id: string;
    trees: TreeDoc[];
}

export interface PostmineTreeDoc {
    tree: TreeDoc;
}

export { ApiError, ExplorerClient } from "./api.js";
export type { FetchLike } from "./api.js";
export { CompareView, formatShare } from "./compareView.js";
export { QueryConsole } from "./console.js";
export {
    TreeView, anchoredPathKey, escapeHtml, nodeKey, pathKey, renderPattern,
} from "./treeView.js";
export type {
    ComparePair, CompareDoc, ConfidenceCell, Divergence, PatternDoc,
    PostmineByIdDoc, PostmineTreeDoc, Rational, StatEntry, SummaryDoc,
    TreeDoc,
} from "./types.js";

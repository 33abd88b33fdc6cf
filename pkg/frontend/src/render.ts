/** DOM rendering: thin, stateless functions over the store's data. */

import { CandidateJson, FormulaDetail, FormulaItem } from "./api.js";
import { SessionState } from "./state.js";
import { flattenAst, layoutAst } from "./treeview.js";

const STATUS_LABEL: Record<string, string> = {
  unparsed: "unparsed",
  unambiguous: "auto",
  ambiguous: "choose",
  resolved: "resolved",
  skipped: "skipped",
};

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K, cls?: string, text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (cls) node.className = cls;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderFormulaList(
  store: SessionState,
  container: HTMLElement,
  onOpen: (id: number) => void,
): void {
  container.textContent = "";
  if (store.items.length === 0) {
    container.append(el("p", "empty", "No formulas in this document."));
    return;
  }
  const progress = store.progress();
  const bar = el("div", "progress",
    `${progress.resolved} / ${progress.total} ambiguous formulas resolved`);
  container.append(bar);
  const list = el("ul", "formula-list");
  for (const item of store.items) {
    const row = el("li", `formula status-${item.status}`);
    if (item.id === store.openId) row.classList.add("open");
    row.dataset.id = String(item.id);
    const badge = el("span", "badge", STATUS_LABEL[item.status] ?? item.status);
    const raw = el("code", "raw", `$${item.raw}$`);
    const count = el("span", "count",
      item.status === "unparsed" ? "—" : `${item.candidate_count}`);
    count.title = `${item.candidate_count} candidate parse(s)`;
    row.append(badge, raw, count);
    row.addEventListener("click", () => onOpen(item.id));
    list.append(row);
  }
  container.append(list);
}

export function renderCandidatePanel(
  store: SessionState,
  container: HTMLElement,
  detail: FormulaDetail | null,
  svgMode: boolean,
  collapsed: Set<string>,
  handlers: {
    onSelect: (id: number, index: number) => void;
    onSkip: (id: number) => void;
    onToggleSvg: () => void;
    onToggleRow: (key: string) => void;
  },
): void {
  container.textContent = "";
  if (!detail) {
    container.append(el("p", "empty", "Pick a formula on the left."));
    return;
  }
  const item = store.item(detail.id);
  const head = el("div", "panel-head");
  head.append(el("code", "raw big", `$${detail.raw}$`));
  const toggle = el("button", "toggle", svgMode ? "outline view" : "tree view");
  toggle.addEventListener("click", handlers.onToggleSvg);
  head.append(toggle);
  if (item.status !== "unparsed" && item.status !== "unambiguous") {
    const skip = el("button", "skip", "skip this formula");
    skip.addEventListener("click", () => handlers.onSkip(detail.id));
    head.append(skip);
  }
  container.append(head);

  if (item.status === "unparsed") {
    const note = el("div", "unparsed-note");
    note.append(el("p", undefined, "This formula did not parse:"));
    note.append(el("pre", "reason", item.reason ?? "unknown failure"));
    const at = item.reason?.match(/position (\d+)/);
    if (at) {
      const pos = Number(at[1]);
      const mark = el("pre", "highlight");
      mark.append(
        document.createTextNode(detail.raw.slice(0, pos)),
        el("mark", undefined, detail.raw.slice(pos, pos + 1) || "⟂"),
        document.createTextNode(detail.raw.slice(pos + 1)),
      );
      note.append(mark);
    }
    container.append(note);
    return;
  }

  if (item.status === "unambiguous") {
    container.append(el("div", "banner", "Only one reading; resolved automatically."));
  }

  for (const candidate of detail.candidates) {
    container.append(renderCandidate(
      detail, item, candidate, svgMode, collapsed, handlers,
    ));
  }
}

function renderCandidate(
  detail: FormulaDetail,
  item: FormulaItem,
  candidate: CandidateJson,
  svgMode: boolean,
  collapsed: Set<string>,
  handlers: {
    onSelect: (id: number, index: number) => void;
    onToggleRow: (key: string) => void;
  },
): HTMLElement {
  const isChosen = item.status === "resolved"
    ? item.choice === candidate.index
    : item.status === "unambiguous";
  const card = el("div", "candidate" + (isChosen ? " chosen" : ""));
  const head = el("div", "candidate-head");
  const label = `${candidate.index + 1}`;
  if (item.status === "ambiguous" || item.status === "resolved") {
    const pick = el("button", "pick", isChosen ? `✓ ${label}` : label);
    pick.title = `select candidate ${label} (key ${label})`;
    pick.addEventListener("click",
      () => handlers.onSelect(detail.id, candidate.index));
    head.append(pick);
  } else {
    head.append(el("span", "pick static", label));
  }
  head.append(el("code", "preview", candidate.preview));
  card.append(head);

  const body = el("div", "candidate-body");
  if (svgMode) {
    body.append(renderSvgTree(candidate));
  } else {
    body.append(renderOutline(candidate, collapsed, handlers.onToggleRow));
  }
  card.append(body);
  return card;
}

function renderOutline(
  candidate: CandidateJson,
  collapsed: Set<string>,
  onToggleRow: (key: string) => void,
): HTMLElement {
  const tree = el("div", "outline");
  const prefix = `c${candidate.index}:`;
  const scoped = new Set(
    [...collapsed].filter((k) => k.startsWith(prefix))
      .map((k) => k.slice(prefix.length)),
  );
  for (const row of flattenAst(candidate.ast, scoped)) {
    const line = el("div", "row");
    line.style.paddingLeft = `${row.depth * 18}px`;
    if (row.hasChildren) {
      const caret = el("span", "caret", row.collapsed ? "▸" : "▾");
      caret.addEventListener("click", () => onToggleRow(prefix + row.key));
      line.append(caret);
    } else {
      line.append(el("span", "caret leaf", "·"));
    }
    line.append(el("span", "name", row.name));
    if (row.lexeme !== undefined) {
      line.append(el("span", "lexeme", row.lexeme));
    }
    tree.append(line);
  }
  return tree;
}

function renderSvgTree(candidate: CandidateJson): SVGSVGElement {
  const layout = layoutAst(candidate.ast);
  const ns = "http://www.w3.org/2000/svg";
  const svg = document.createElementNS(ns, "svg");
  svg.setAttribute("viewBox", `0 0 ${layout.width} ${layout.height}`);
  svg.setAttribute("width", String(Math.min(layout.width, 640)));
  svg.classList.add("tree-svg");
  for (const edge of layout.edges) {
    const line = document.createElementNS(ns, "line");
    line.setAttribute("x1", String(edge.x1));
    line.setAttribute("y1", String(edge.y1));
    line.setAttribute("x2", String(edge.x2));
    line.setAttribute("y2", String(edge.y2));
    svg.append(line);
  }
  for (const box of layout.boxes) {
    const g = document.createElementNS(ns, "g");
    const rect = document.createElementNS(ns, "rect");
    rect.setAttribute("x", String(box.x));
    rect.setAttribute("y", String(box.y));
    rect.setAttribute("width", String(box.width));
    rect.setAttribute("height", String(box.height));
    g.append(rect);
    const text = document.createElementNS(ns, "text");
    text.setAttribute("x", String(box.x + box.width / 2));
    text.setAttribute("y", String(box.y + box.height / 2 + 4));
    text.setAttribute("text-anchor", "middle");
    text.textContent = box.lexeme !== undefined
      ? `${box.label} ${box.lexeme}` : box.label;
    g.append(text);
    svg.append(g);
  }
  return svg;
}

export function renderExportBar(
  store: SessionState,
  container: HTMLElement,
  onExport: () => void,
): void {
  container.textContent = "";
  const button = el("button", "export", "Export rewritten copy");
  const pending = store.pendingIds();
  button.disabled = !store.exportable();
  if (pending.length) {
    button.title = `still ambiguous: formulas ${pending.join(", ")}`;
  } else if (store.items.length === 0) {
    button.title = "nothing to export";
  }
  button.addEventListener("click", onExport);
  container.append(button);
  if (store.lastExport) {
    container.append(el("span", "export-note",
      `${store.lastExport.output_path} — ${store.lastExport.replaced} replaced`));
  }
}

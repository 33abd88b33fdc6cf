/** Page bootstrap and event wiring. */

import { Api, FormulaDetail } from "./api.js";
import { renderCandidatePanel, renderExportBar, renderFormulaList } from "./render.js";
import { SessionState } from "./state.js";

async function resolveSessionId(api: Api): Promise<string> {
  const fromQuery = new URLSearchParams(location.search).get("session");
  if (fromQuery) return fromQuery;
  const sessions = await api.listSessions();
  if (!sessions.length) throw new Error("no sessions on this server");
  return sessions[0].session_id;
}

function toast(kind: "info" | "error", message: string): void {
  const host = document.getElementById("toasts")!;
  const node = document.createElement("div");
  node.className = `toast ${kind}`;
  node.textContent = message;
  host.append(node);
  setTimeout(() => node.remove(), kind === "error" ? 6000 : 4000);
}

async function boot(): Promise<void> {
  const api = new Api("");
  const sessionId = await resolveSessionId(api);
  const listHost = document.getElementById("list")!;
  const panelHost = document.getElementById("panel")!;
  const exportHost = document.getElementById("exportbar")!;

  let svgMode = false;
  let detail: FormulaDetail | null = null;
  const collapsedRows = new Set<string>();

  const store = new SessionState(api, sessionId, {
    changed: draw,
    toast,
  });

  async function openFormula(id: number): Promise<void> {
    detail = await store.open(id);
    draw();
  }

  function draw(): void {
    if (detail && store.details.has(detail.id)) {
      detail = store.details.get(detail.id)!;
    }
    renderFormulaList(store, listHost, (id) => void openFormula(id));
    renderCandidatePanel(store, panelHost, detail, svgMode, collapsedRows, {
      onSelect: (id, index) => void store.select(id, index),
      onSkip: (id) => void store.skip(id),
      onToggleSvg: () => {
        svgMode = !svgMode;
        draw();
      },
      onToggleRow: (key) => {
        if (collapsedRows.has(key)) collapsedRows.delete(key);
        else collapsedRows.add(key);
        draw();
      },
    });
    renderExportBar(store, exportHost, () => void store.export());
  }

  document.addEventListener("keydown", (event) => {
    if (event.target instanceof HTMLInputElement) return;
    const digit = Number(event.key);
    if (!detail || !Number.isInteger(digit) || digit < 1 || digit > 9) return;
    const item = store.item(detail.id);
    if (item.status !== "ambiguous" && item.status !== "resolved") return;
    if (digit <= detail.candidates.length) {
      void store.select(detail.id, digit - 1);
    }
  });

  await store.refresh();
  document.getElementById("doc")!.textContent =
    store.summary?.document_path ?? "";
}

boot().catch((err) => {
  document.getElementById("list")!.textContent = `failed to load: ${err}`;
});

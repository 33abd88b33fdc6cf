/** Server-authoritative session state with optimistic selection.
 *
 * Every mutation maps to exactly one API call.  Selections update the local
 * list immediately and roll back if the server refuses; requests are
 * deduplicated per formula so rapid clicks cannot interleave.
 */

import { Api, ApiError, FormulaDetail, FormulaItem, SessionSummary } from "./api.js";

export interface StoreEvents {
  changed?: () => void;
  toast?: (kind: "info" | "error", message: string) => void;
}

export class SessionState {
  summary: SessionSummary | null = null;
  items: FormulaItem[] = [];
  details = new Map<number, FormulaDetail>();
  openId: number | null = null;
  lastExport: { output_path: string; replaced: number } | null = null;

  private inflight = new Map<number, Promise<unknown>>();

  constructor(
    private api: Api,
    public sessionId: string,
    private events: StoreEvents = {},
  ) {}

  private emit() {
    this.events.changed?.();
  }

  private toast(kind: "info" | "error", message: string) {
    this.events.toast?.(kind, message);
  }

  /** Fetch list + summary; also used to rebuild state after a reload. */
  async refresh(): Promise<void> {
    const [summary, items] = await Promise.all([
      this.api.summary(this.sessionId),
      this.api.formulas(this.sessionId),
    ]);
    this.summary = summary;
    this.items = items;
    this.emit();
  }

  item(id: number): FormulaItem {
    const found = this.items.find((x) => x.id === id);
    if (!found) throw new Error(`no formula ${id}`);
    return found;
  }

  async open(id: number): Promise<FormulaDetail> {
    this.openId = id;
    const cached = this.details.get(id);
    if (cached) {
      this.emit();
      return cached;
    }
    const detail = await this.dedup(id, () => this.api.formula(this.sessionId, id));
    this.details.set(id, detail);
    this.emit();
    return detail;
  }

  /** Ambiguity progress: resolved selections / formulas needing one. */
  progress(): { resolved: number; total: number } {
    let resolved = 0;
    let total = 0;
    for (const item of this.items) {
      if (item.status === "resolved") {
        resolved += 1;
        total += 1;
      } else if (item.status === "ambiguous") {
        total += 1;
      }
    }
    return { resolved, total };
  }

  exportable(): boolean {
    return this.items.length > 0 &&
      this.items.every((x) => x.status !== "ambiguous");
  }

  pendingIds(): number[] {
    return this.items.filter((x) => x.status === "ambiguous").map((x) => x.id);
  }

  async select(id: number, index: number): Promise<void> {
    const item = this.item(id);
    const before = { status: item.status, choice: item.choice };
    item.status = "resolved";
    item.choice = index;
    this.emit();
    try {
      const detail = await this.dedup(id, () =>
        this.api.select(this.sessionId, id, index));
      this.applyEntry(detail);
    } catch (err) {
      item.status = before.status;
      item.choice = before.choice;
      this.emit();
      this.toast("error", this.describe(err));
    }
  }

  async skip(id: number): Promise<void> {
    const item = this.item(id);
    const before = { status: item.status, choice: item.choice };
    item.status = "skipped";
    item.choice = null;
    this.emit();
    try {
      const detail = await this.dedup(id, () =>
        this.api.skip(this.sessionId, id));
      this.applyEntry(detail);
    } catch (err) {
      item.status = before.status;
      item.choice = before.choice;
      this.emit();
      this.toast("error", this.describe(err));
    }
  }

  async export(style?: string): Promise<boolean> {
    try {
      this.lastExport = await this.api.export(this.sessionId, style);
      this.toast("info",
        `wrote ${this.lastExport.output_path} (${this.lastExport.replaced} formulas replaced)`);
      this.emit();
      return true;
    } catch (err) {
      this.toast("error", this.describe(err));
      return false;
    }
  }

  private applyEntry(detail: FormulaDetail) {
    const pos = this.items.findIndex((x) => x.id === detail.id);
    if (pos >= 0) {
      const { candidates, ...item } = detail;
      this.items[pos] = item;
      if (candidates?.length) this.details.set(detail.id, detail);
    }
    this.emit();
  }

  /** One in-flight request per formula; later calls wait for the earlier. */
  private async dedup<T>(id: number, run: () => Promise<T>): Promise<T> {
    const pending = this.inflight.get(id);
    if (pending) await pending.catch(() => undefined);
    const task = run();
    this.inflight.set(id, task);
    try {
      return await task;
    } finally {
      if (this.inflight.get(id) === task) this.inflight.delete(id);
    }
  }

  private describe(err: unknown): string {
    if (err instanceof ApiError) return `${err.code}: ${err.message}`;
    return String(err);
  }
}

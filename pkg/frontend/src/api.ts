/** Typed client for the stexify session API. */

export type Status = "unparsed" | "unambiguous" | "ambiguous" | "resolved" | "skipped";

export interface AstJson {
  name: string;
  lexeme?: string;
  children?: AstJson[];
  flexary?: number[];
}

export interface FormulaItem {
  id: number;
  raw: string;
  kind: string;
  status: Status;
  candidate_count: number;
  choice: number | null;
  reason: string | null;
}

export interface CandidateJson {
  index: number;
  ast: AstJson;
  preview: string;
}

export interface FormulaDetail extends FormulaItem {
  candidates: CandidateJson[];
}

export interface SessionSummary {
  session_id: string;
  document_path: string;
  grammar: string;
  total: number;
  counts: Record<Status, number>;
  pending: number[];
  exportable: boolean;
}

export interface ExportResult {
  output_path: string;
  replaced: number;
}

export class ApiError extends Error {
  constructor(public code: string, message: string, public status: number) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class Api {
  constructor(
    private base: string = "",
    private fetcher: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetcher(this.base + path, init);
    const body = await response.json().catch(() => null);
    if (!response.ok) {
      const err = body?.error ?? { code: "http", message: response.statusText };
      throw new ApiError(err.code, err.message, response.status);
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  listSessions(): Promise<SessionSummary[]> {
    return this.request("/sessions");
  }

  summary(sessionId: string): Promise<SessionSummary> {
    return this.request(`/sessions/${sessionId}`);
  }

  formulas(sessionId: string): Promise<FormulaItem[]> {
    return this.request(`/sessions/${sessionId}/formulas`);
  }

  formula(sessionId: string, formulaId: number): Promise<FormulaDetail> {
    return this.request(`/sessions/${sessionId}/formulas/${formulaId}`);
  }

  select(sessionId: string, formulaId: number, index: number): Promise<FormulaDetail> {
    return this.post(`/sessions/${sessionId}/formulas/${formulaId}/selection`, { index });
  }

  skip(sessionId: string, formulaId: number): Promise<FormulaDetail> {
    return this.post(`/sessions/${sessionId}/formulas/${formulaId}/skip`, {});
  }

  export(sessionId: string, dobracketsStyle?: string): Promise<ExportResult> {
    const payload = dobracketsStyle ? { dobrackets_style: dobracketsStyle } : {};
    return this.post(`/sessions/${sessionId}/export`, payload);
  }
}

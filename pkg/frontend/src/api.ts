/** Typed client for the trial service HTTP API.
 *
 * The service only ever exposes side labels A and B for the compared
 * algorithms; nothing in these payloads identifies a scorer.
 */

export interface Demographics {
  nationality: string;
  education: string;
  age_band: string;
  gender: string;
  rs_familiarity: boolean;
}

export interface ElicitationItem {
  item: string;
  name: string;
}

export interface ComparisonEntry {
  recommended: string;
  recommended_name: string;
  sentence_a: string;
  sentence_b: string;
}

export interface Question {
  question_id: number;
  goal: string;
  text: string;
}

export interface ComparisonBundle {
  session_id: string;
  entries: ComparisonEntry[];
  questions: Question[];
}

export type LikertAnswer = "MuchMoreA" | "MoreA" | "Equal" | "MoreB" | "MuchMoreB";

export interface LikertResponse {
  question_id: number;
  answer: LikertAnswer;
}

export type SessionState = "created" | "profiled" | "completed";

export interface QuestionAggregate {
  question_id: number;
  goal: string;
  text: string;
  counts: Record<string, number>;
}

export interface ExportPayload {
  completed_sessions: number;
  scorers: string[];
  rows: unknown[];
  aggregation: QuestionAggregate[];
  empty: boolean;
}

/** Error carrying enough context for the retry affordance. */
export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number | null,
    readonly retryable: boolean,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function request<T>(base: string, path: string, init?: RequestInit): Promise<T> {
  let response: Response;
  try {
    response = await fetch(base + path, {
      headers: { "Content-Type": "application/json", ...(init?.headers ?? {}) },
      ...init,
    });
  } catch (err) {
    throw new ApiError(`network failure: ${String(err)}`, null, true);
  }
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = (await response.json()) as { detail?: unknown };
      if (body.detail) detail = typeof body.detail === "string" ? body.detail : JSON.stringify(body.detail);
    } catch {
      // keep the status text
    }
    throw new ApiError(detail, response.status, response.status >= 500);
  }
  return (await response.json()) as T;
}

export class TrialApi {
  constructor(readonly base: string = "") {}

  createSession(demographics: Demographics): Promise<{ session_id: string }> {
    return request(this.base, "/sessions", { method: "POST", body: JSON.stringify(demographics) });
  }

  sessionState(sessionId: string): Promise<{ session_id: string; state: SessionState }> {
    return request(this.base, `/sessions/${encodeURIComponent(sessionId)}`);
  }

  elicitation(sessionId: string): Promise<{ session_id: string; items: ElicitationItem[] }> {
    return request(this.base, `/sessions/${encodeURIComponent(sessionId)}/elicitation`);
  }

  submitProfile(sessionId: string, items: string[]): Promise<ComparisonBundle> {
    return request(this.base, `/sessions/${encodeURIComponent(sessionId)}/profile`, {
      method: "POST",
      body: JSON.stringify({ items }),
    });
  }

  comparison(sessionId: string): Promise<ComparisonBundle> {
    return request(this.base, `/sessions/${encodeURIComponent(sessionId)}/comparison`);
  }

  submitResponses(sessionId: string, responses: LikertResponse[]): Promise<{ state: string }> {
    return request(this.base, `/sessions/${encodeURIComponent(sessionId)}/responses`, {
      method: "POST",
      body: JSON.stringify({ responses }),
    });
  }

  exportResults(secret: string): Promise<ExportPayload> {
    return request(this.base, "/export", { headers: { "X-Results-Secret": secret } });
  }
}

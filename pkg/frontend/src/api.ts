// Thin typed client for the session API. Server-reported problems surface as
// ApiError (code + message straight from the error body); transport-level
// failures surface as NetworkError so the UI can offer a retry without
// losing state.

import type {
  ChoiceResponse,
  CreateSessionResponse,
  FamilySummary,
  QuestionResponse,
  SpecResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export class NetworkError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "NetworkError";
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  let response: Response;
  try {
    response = await fetch(url, {
      headers: { "Content-Type": "application/json" },
      ...init,
    });
  } catch (err) {
    throw new NetworkError(err instanceof Error ? err.message : String(err));
  }
  let body: unknown = null;
  try {
    body = await response.json();
  } catch {
    // fall through; shape checked below
  }
  if (!response.ok) {
    const error = (body as { error?: { code?: string; message?: string } })?.error;
    throw new ApiError(
      response.status,
      error?.code ?? "http_error",
      error?.message ?? `HTTP ${response.status}`,
    );
  }
  return body as T;
}

/** The slice of the session API the wizard consumes; fakes implement this. */
export interface SessionApi {
  createSession(body: {
    family_id?: string;
    vision?: string;
    mode?: string;
  }): Promise<CreateSessionResponse>;
  getQuestion(sessionId: string): Promise<QuestionResponse>;
  submitChoice(sessionId: string, selectedIds: string[]): Promise<ChoiceResponse>;
  getSpec(sessionId: string): Promise<SpecResponse>;
}

export class ApiClient implements SessionApi {
  constructor(public baseUrl: string) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  listFamilies(): Promise<{ families: FamilySummary[] }> {
    return request(this.url("/families"));
  }

  createSession(body: {
    family_id?: string;
    vision?: string;
    mode?: string;
  }): Promise<CreateSessionResponse> {
    return request(this.url("/sessions"), {
      method: "POST",
      body: JSON.stringify({ mode: "interactive", ...body }),
    });
  }

  getQuestion(sessionId: string): Promise<QuestionResponse> {
    return request(this.url(`/sessions/${sessionId}/question`));
  }

  submitChoice(sessionId: string, selectedIds: string[]): Promise<ChoiceResponse> {
    return request(this.url(`/sessions/${sessionId}/choice`), {
      method: "POST",
      body: JSON.stringify({ selected_ids: selectedIds }),
    });
  }

  getSpec(sessionId: string): Promise<SpecResponse> {
    return request(this.url(`/sessions/${sessionId}/spec`));
  }

  getAudit(sessionId: string): Promise<{ records: unknown[] }> {
    return request(this.url(`/sessions/${sessionId}/audit`));
  }
}

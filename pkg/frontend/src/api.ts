// Thin typed client for the session service. All network data flows
// through these endpoints; the UI never touches files directly.

import type {
  ExpansionRequest, Frame, FrameParams, PublicationDetails,
  PublicationList, SelectionRequest, SessionState,
} from "./types.js";

export class ServiceError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private base: string = "/v1",
    private fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { "content-type": "application/json" } };
    if (body !== undefined) init.body = JSON.stringify(body);
    const resp = await this.fetchImpl(`${this.base}${path}`, init);
    const text = await resp.text();
    if (!resp.ok) {
      let message = text;
      try {
        message = JSON.parse(text).error ?? text;
      } catch {
        // non-JSON error body, keep the raw text
      }
      throw new ServiceError(resp.status, message);
    }
    return JSON.parse(text) as T;
  }

  createSessionFromPairs(publications: string, citations: string) {
    return this.request<SessionState & { session_id: string }>(
      "POST", "/sessions", { format: "pairs", publications, citations });
  }

  createSessionFromExport(wos: string, incompleteMinCitations = 10) {
    return this.request<SessionState & { session_id: string }>(
      "POST", "/sessions",
      { format: "wos", wos, incomplete_min_citations: incompleteMinCitations });
  }

  state(sid: string) {
    return this.request<SessionState>("GET", `/sessions/${sid}/state`);
  }

  publication(sid: string, pid: string) {
    return this.request<PublicationDetails>(
      "GET", `/sessions/${sid}/publications/${encodeURIComponent(pid)}`);
  }

  publications(sid: string, query: string | null, offset = 0, limit = 100) {
    const params = new URLSearchParams({ offset: String(offset), limit: String(limit) });
    if (query) params.set("query", query);
    return this.request<PublicationList>("GET", `/sessions/${sid}/publications?${params}`);
  }

  frame(sid: string, params: FrameParams = {}) {
    const search = new URLSearchParams();
    if (params.display_count !== undefined) search.set("display_count", String(params.display_count));
    if (params.transitive_reduction !== undefined) {
      search.set("transitive_reduction", String(params.transitive_reduction));
    }
    if (params.seed !== undefined) search.set("seed", String(params.seed));
    const qs = search.toString();
    return this.request<Frame>("GET", `/sessions/${sid}/frame${qs ? "?" + qs : ""}`);
  }

  mark(sid: string, ids: string[], marked: boolean) {
    return this.request<SessionState>("POST", `/sessions/${sid}/mark`, { ids, marked });
  }

  select(sid: string, selection: SelectionRequest) {
    return this.request<SessionState & { selected: string[] }>(
      "POST", `/sessions/${sid}/select`, selection);
  }

  drill(sid: string, selection: SelectionRequest) {
    return this.request<SessionState>("POST", `/sessions/${sid}/drill`, selection);
  }

  expand(sid: string, spec: ExpansionRequest) {
    return this.request<SessionState>("POST", `/sessions/${sid}/expand`, spec);
  }

  cluster(sid: string, resolution: number, seed = 0) {
    return this.request<SessionState & { clusters: { id: number; size: number }[] }>(
      "POST", `/sessions/${sid}/cluster`, { resolution, seed });
  }

  cores(sid: string, k: number) {
    return this.request<SessionState & { core: string[] }>(
      "POST", `/sessions/${sid}/cores`, { k, action: "mark" });
  }

  back(sid: string) {
    return this.request<SessionState & { moved: boolean }>("POST", `/sessions/${sid}/back`);
  }

  forward(sid: string) {
    return this.request<SessionState & { moved: boolean }>("POST", `/sessions/${sid}/forward`);
  }
}

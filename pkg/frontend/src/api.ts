/** Thin typed client for the case service. All argument state shown in the
 * workbench originates from these responses; the client never computes
 * flags itself. */

import type {
  CaseDocument,
  ElementRecord,
  Envelope,
  InferenceResponse,
  QueryRow,
  RelationshipRecord,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly type: string,
    message: string,
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<Envelope<T>> {
    const response = await this.fetchImpl(this.base + path, init);
    const body = await response.json();
    if (!response.ok) {
      const err = body?.error ?? {};
      throw new ServiceError(response.status, err.type ?? "Error", err.message ?? "request failed");
    }
    return body as Envelope<T>;
  }

  getCase(layer: "settled" | "authored" = "settled"): Promise<Envelope<CaseDocument>> {
    return this.request(`/case?layer=${layer}`);
  }

  infer(): Promise<Envelope<InferenceResponse>> {
    return this.request("/infer", { method: "POST", body: "{}", headers: JSON_HEADERS });
  }

  postElement(element: ElementRecord): Promise<Envelope<{ id: string }>> {
    return this.request("/elements", {
      method: "POST",
      body: JSON.stringify(element),
      headers: JSON_HEADERS,
    });
  }

  postEdge(edge: RelationshipRecord): Promise<Envelope<{ id: string }>> {
    return this.request("/edges", {
      method: "POST",
      body: JSON.stringify(edge),
      headers: JSON_HEADERS,
    });
  }

  deleteElement(id: string): Promise<Envelope<{ removed: string }>> {
    return this.request(`/elements/${encodeURIComponent(id)}`, { method: "DELETE" });
  }

  runQuery(id: string, params: Record<string, string> = {}): Promise<Envelope<QueryRow[]>> {
    return this.request(`/queries/${encodeURIComponent(id)}`, {
      method: "POST",
      body: JSON.stringify({ params }),
      headers: JSON_HEADERS,
    });
  }

  runSelector(dsl: string): Promise<Envelope<QueryRow[]>> {
    return this.request("/selector", { method: "POST", body: dsl });
  }

  overlays(): Promise<Envelope<Record<string, string[]>>> {
    return this.request("/overlays");
  }
}

const JSON_HEADERS = { "content-type": "application/json" };

// Typed client over the retrieval service's JSON endpoints. The UI never
// computes OOV sets, scores, or ranks itself: every displayed value comes
// from one of these payloads. fetch is injectable so tests can replay
// recorded service fixtures.

export interface TopicSummary {
  topic_id: number;
  text: string;
}

export interface GeneratedImagePayload {
  png_base64: string;
  provenance_prompt: string;
  seed: number;
}

export interface SelectionInfo {
  candidate_index: number | null;
  edited_text: string | null;
  edited: boolean;
  text?: string;
  oov?: string[];
}

export interface OovReports {
  original?: string[];
  t2t?: string[][];
  i2t?: string[][];
}

export interface SessionPayload {
  session_id: string;
  created_at: number;
  topic_id: number;
  topic_text: string;
  t2t_texts: string[];
  t2i_images: GeneratedImagePayload[];
  i2t_captions: string[];
  warnings: string[];
  oov_reports: OovReports;
  selections: Record<string, SelectionInfo>;
}

export interface SearchHitPayload {
  shot_id: string;
  score: number;
}

export interface SearchResponse {
  k: number;
  channels: Record<string, SearchHitPayload[]>;
  fused: SearchHitPayload[];
}

export interface OovViolationPayload {
  topic_id: number;
  terms: string[];
}

export interface ServiceErrorPayload {
  error: string;
  detail: string;
  violations?: OovViolationPayload[];
}

export class ServiceError extends Error {
  constructor(
    public readonly status: number,
    public readonly payload: ServiceErrorPayload,
  ) {
    super(`${payload.error}: ${payload.detail}`);
  }
}

export type SelectionRequest =
  | { candidateIndex: number }
  | { editedText: string };

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class QueryStudioClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    if (!response.ok) {
      let payload: ServiceErrorPayload;
      try {
        payload = (await response.json()) as ServiceErrorPayload;
      } catch {
        payload = { error: `HTTP${response.status}`, detail: response.statusText };
      }
      throw new ServiceError(response.status, payload);
    }
    return response;
  }

  private async postJson<T>(path: string, body: unknown): Promise<T> {
    const response = await this.request(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    return (await response.json()) as T;
  }

  async listTopics(): Promise<TopicSummary[]> {
    const response = await this.request("/topics");
    return (await response.json()) as TopicSummary[];
  }

  async generateVariants(
    topicId: number,
    options: { seed?: number; nImages?: number; nT2t?: number } = {},
  ): Promise<SessionPayload> {
    return this.postJson(`/topics/${topicId}/variants`, {
      seed: options.seed ?? null,
      n_images: options.nImages ?? null,
      n_t2t: options.nT2t ?? null,
    });
  }

  async select(
    sessionId: string,
    channel: string,
    selection: SelectionRequest,
  ): Promise<SessionPayload> {
    const body =
      "candidateIndex" in selection
        ? { channel, candidate_index: selection.candidateIndex }
        : { channel, edited_text: selection.editedText };
    return this.postJson(`/sessions/${sessionId}/select`, body);
  }

  async searchSession(sessionId: string, k: number): Promise<SearchResponse> {
    return this.postJson("/search", { session_id: sessionId, k });
  }

  // Returns the service-produced run file verbatim; callers must not
  // transform it (the download is required to be byte-identical).
  async exportManualRun(sessionIds: string[], runTag: string): Promise<Uint8Array> {
    const response = await this.request("/runs/manual-export", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ session_ids: sessionIds, run_tag: runTag }),
    });
    return new Uint8Array(await response.arrayBuffer());
  }
}

import type {
  CorpusIndexEntry,
  CorpusItemDetail,
  EvaluateResponse,
  GenerateResponse,
  HealthResponse,
  StrategySlug,
  TranscriptsResponse,
} from "./types";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function asJson<T>(response: Response): Promise<T> {
  let body: unknown;
  try {
    body = await response.json();
  } catch {
    throw new ApiError(response.status, `service returned non-JSON (HTTP ${response.status})`);
  }
  if (!response.ok) {
    const detail =
      body && typeof body === "object" && "error" in body
        ? String((body as { error: unknown }).error)
        : `HTTP ${response.status}`;
    throw new ApiError(response.status, detail);
  }
  return body as T;
}

/** Thin typed client over the diagram service; baseUrl "" means same-origin. */
export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/+$/, "") + path;
  }

  private async post<T>(path: string, payload: unknown): Promise<T> {
    const response = await fetch(this.url(path), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
    return asJson<T>(response);
  }

  private async get<T>(path: string): Promise<T> {
    return asJson<T>(await fetch(this.url(path)));
  }

  health(): Promise<HealthResponse> {
    return this.get("/health");
  }

  generate(dh: string, strategy: StrategySlug, shots?: number): Promise<GenerateResponse> {
    const payload: Record<string, unknown> = { dh, strategy };
    if (shots !== undefined) payload.shots = shots;
    return this.post("/api/generate", payload);
  }

  evaluateAgainstItem(generatedDigraph: string, truthId: string): Promise<EvaluateResponse> {
    return this.post("/api/evaluate", {
      generated_digraph: generatedDigraph,
      truth_id: truthId,
    });
  }

  corpus(): Promise<{ items: CorpusIndexEntry[] }> {
    return this.get("/api/corpus");
  }

  corpusItem(id: string): Promise<CorpusItemDetail> {
    return this.get(`/api/corpus/${encodeURIComponent(id)}`);
  }

  transcripts(id: string): Promise<TranscriptsResponse> {
    return this.get(`/api/transcripts/${encodeURIComponent(id)}`);
  }
}

import type {
  DiaryAddResponse,
  DiaryEntryWire,
  DiaryListResponse,
  EditRequest,
  FoodsResponse,
  HealthResponse,
  MaskDoc,
  PredictResponse,
} from "./wire.js";

/** Error carrying the HTTP status and the server's detail string. */
export class ApiError extends Error {
  constructor(readonly status: number, readonly detail: string) {
    super(`HTTP ${status}: ${detail}`);
  }
}

/** The backend was unreachable (network failure, not an HTTP error). */
export class BackendUnreachable extends Error {}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

async function readDetail(response: Response): Promise<string> {
  try {
    const body = (await response.json()) as { detail?: unknown };
    if (typeof body.detail === "string") return body.detail;
    return JSON.stringify(body);
  } catch {
    return response.statusText || "request failed";
  }
}

/**
 * Thin typed client over the service's HTTP+JSON API. The fetch function is
 * injectable so tests can point it at a stub backend.
 */
export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(this.baseUrl + path, init);
    } catch (err) {
      throw new BackendUnreachable(String(err));
    }
    if (!response.ok) {
      throw new ApiError(response.status, await readDetail(response));
    }
    return (await response.json()) as T;
  }

  health(): Promise<HealthResponse> {
    return this.request<HealthResponse>("/health");
  }

  foods(): Promise<FoodsResponse> {
    return this.request<FoodsResponse>("/foods");
  }

  /** Upload raw image bytes; the server sniffs the format itself. */
  predict(imageBytes: Uint8Array | ArrayBuffer): Promise<PredictResponse> {
    const body = imageBytes instanceof Uint8Array ? new Uint8Array(imageBytes) : imageBytes;
    return this.request<PredictResponse>("/predict", {
      method: "POST",
      headers: { "content-type": "application/octet-stream" },
      body,
    });
  }

  /** Log a mask (usually a predict response verbatim) as a diary entry. */
  diaryAdd(mask: MaskDoc, imageRef = "", edits: EditRequest[] = []): Promise<DiaryAddResponse> {
    const body: Record<string, unknown> = { ...mask, image_ref: imageRef };
    if (edits.length > 0) body.edits = edits;
    return this.request<DiaryAddResponse>("/diary", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  diaryList(fromTs?: string, toTs?: string): Promise<DiaryListResponse> {
    const params = new URLSearchParams();
    if (fromTs) params.set("from", fromTs);
    if (toTs) params.set("to", toTs);
    const query = params.size > 0 ? `?${params.toString()}` : "";
    return this.request<DiaryListResponse>(`/diary${query}`);
  }

  diaryPatch(entryId: string, edits: EditRequest[]): Promise<{ entry: DiaryEntryWire }> {
    return this.request<{ entry: DiaryEntryWire }>(`/diary/${entryId}`, {
      method: "PATCH",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ edits }),
    });
  }
}

import type {
  ApiErrorBody,
  BlockPayload,
  ClassifyResponse,
  DatasetPayload,
  HeatmapResponse,
  LinguisticResponse,
  MergeResponse,
  QuantilesResponse,
  SeedResponse,
  SessionPayload,
  ViewSettings,
  WireModel,
} from "./types.js";

export class ApiRequestError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly detail: unknown = null,
  ) {
    super(message);
    this.name = "ApiRequestError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Thin typed client over the /api/v1 endpoints; no caching, no retries. */
export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const resp = await this.fetchFn(`${this.baseUrl}/api/v1${path}`, init);
    if (!resp.ok) {
      let parsed: Partial<ApiErrorBody> = {};
      try {
        parsed = (await resp.json()) as ApiErrorBody;
      } catch {
        // non-JSON error body; fall through with the status alone
      }
      throw new ApiRequestError(
        resp.status,
        parsed.code ?? "http_error",
        parsed.message ?? `request failed with status ${resp.status}`,
        parsed.detail ?? null,
      );
    }
    if (resp.status === 204) {
      return undefined as T;
    }
    return (await resp.json()) as T;
  }

  dataset(): Promise<DatasetPayload> {
    return this.request("GET", "/dataset");
  }

  createSession(): Promise<SessionPayload> {
    return this.request("POST", "/session", {});
  }

  getSession(id: string): Promise<SessionPayload> {
    return this.request("GET", `/session/${id}`);
  }

  deleteSession(id: string): Promise<void> {
    return this.request("DELETE", `/session/${id}`);
  }

  seed(id: string, pointId: number, distance: number): Promise<SeedResponse> {
    return this.request("POST", `/session/${id}/seed`, { pointId, distance });
  }

  discover(id: string, threshold: number, mode = "envelope-M1"): Promise<SessionPayload> {
    return this.request("POST", `/session/${id}/discover`, { threshold, mode });
  }

  merge(id: string, blockIds: number[]): Promise<MergeResponse> {
    return this.request("POST", `/session/${id}/merge`, { blockIds });
  }

  coordinates(id: string, mask: boolean[]): Promise<SessionPayload> {
    return this.request("POST", `/session/${id}/coordinates`, { mask });
  }

  view(id: string, settings: Partial<ViewSettings>): Promise<SessionPayload> {
    return this.request("POST", `/session/${id}/view`, settings);
  }

  blocks(id: string): Promise<{ blocks: BlockPayload[]; refused: BlockPayload[] }> {
    return this.request("GET", `/session/${id}/blocks`);
  }

  heatmap(id: string): Promise<HeatmapResponse> {
    return this.request("GET", `/session/${id}/heatmap`);
  }

  linguistic(
    id: string,
    target: "all" | "class" | "block",
    block?: number,
    threshold?: number,
  ): Promise<LinguisticResponse> {
    const params = new URLSearchParams({ target });
    if (block !== undefined) params.set("block", String(block));
    if (threshold !== undefined) params.set("threshold", String(threshold));
    return this.request("GET", `/session/${id}/linguistic?${params}`);
  }

  quantiles(id: string, block: number, coord: number, q: number): Promise<QuantilesResponse> {
    const params = new URLSearchParams({
      block: String(block),
      coord: String(coord),
      q: String(q),
    });
    return this.request("GET", `/session/${id}/quantiles?${params}`);
  }

  classify(model: WireModel, points: number[][], units: "normalized" | "raw"): Promise<ClassifyResponse> {
    return this.request("POST", "/classify", { model, points, units });
  }
}

/** Strip session-only fields so a block payload round-trips as model JSON. */
export function blockToWire(b: BlockPayload): Omit<BlockPayload, "id" | "memberCount" | "impurity"> {
  return {
    bounds: b.bounds,
    members: b.members,
    classCounts: b.classCounts,
    dominant: b.dominant,
    kind: b.kind,
  };
}

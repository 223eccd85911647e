import type {
  ApiErrorBody,
  DesignReport,
  GapsResponse,
  GraphGroupsResponse,
  GroupsResponse,
  HealthInfo,
  NeighborsResponse,
  ProductDetail,
  ScoreRequest,
  StylesResponse,
} from "./types.js";

/** A non-2xx response, carrying the server's machine code and human detail. */
export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly detail: string;

  constructor(status: number, body: ApiErrorBody) {
    super(`${status} ${body.error}: ${body.detail}`);
    this.name = "ApiError";
    this.status = status;
    this.code = body.error;
    this.detail = body.detail;
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface RequestLogEntry {
  method: string;
  path: string;
}

/** Stamps outgoing requests so a panel can apply only its newest response.
 *
 * Concurrent requests are allowed; when responses land out of order the
 * stale ones are dropped (latest-response-wins per gate).
 */
export class RequestGate {
  private latest = 0;

  stamp(): number {
    this.latest += 1;
    return this.latest;
  }

  isCurrent(id: number): boolean {
    return id === this.latest;
  }
}

export class ApiClient {
  readonly baseUrl: string;
  private readonly fetchFn: FetchLike;
  private readonly onRequest?: (entry: RequestLogEntry) => void;

  constructor(
    baseUrl: string,
    fetchFn?: FetchLike,
    onRequest?: (entry: RequestLogEntry) => void,
  ) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    // bind so a bare window.fetch keeps its receiver
    const f = fetchFn ?? globalThis.fetch;
    this.fetchFn = (url, init) => f(url, init);
    this.onRequest = onRequest;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    this.onRequest?.({ method, path });
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(this.baseUrl + path, init);
    const payload = (await response.json()) as unknown;
    if (!response.ok) {
      throw new ApiError(response.status, payload as ApiErrorBody);
    }
    return payload as T;
  }

  health(): Promise<HealthInfo> {
    return this.request("GET", "/health");
  }

  styles(): Promise<StylesResponse> {
    return this.request("GET", "/styles");
  }

  groups(): Promise<GroupsResponse> {
    return this.request("GET", "/groups");
  }

  product(sku: string): Promise<ProductDetail> {
    return this.request("GET", `/products/${encodeURIComponent(sku)}`);
  }

  neighbors(sku: string, k?: number): Promise<NeighborsResponse> {
    const query = k === undefined ? "" : `?k=${k}`;
    return this.request("GET", `/products/${encodeURIComponent(sku)}/neighbors${query}`);
  }

  score(req: ScoreRequest): Promise<DesignReport> {
    return this.request("POST", "/score", req);
  }

  graphGroups(): Promise<GraphGroupsResponse> {
    return this.request("GET", "/graph/groups");
  }

  graphGaps(): Promise<GapsResponse> {
    return this.request("GET", "/graph/gaps");
  }
}

import type {
  Curve,
  DatasetEntry,
  JobBody,
  PrototypeResponse,
  ResolveRequest,
  ResolveResult,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

function isJobTicket(body: unknown): body is JobBody {
  return (
    typeof body === "object" &&
    body !== null &&
    (body as JobBody).status === "running" &&
    typeof (body as JobBody).job_id === "string"
  );
}

/**
 * Thin client for the /api routes. Slow computations come back as
 * 202 {status: "running", job_id}; those are polled transparently so
 * callers always get the final payload.
 */
export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchFn: FetchLike = (url, init) => fetch(url, init),
    private pollMs: number = 500,
  ) {}

  private async request(path: string, init?: RequestInit): Promise<unknown> {
    const res = await this.fetchFn(this.baseUrl + path, init);
    let body: unknown = null;
    try {
      body = await res.json();
    } catch {
      // non-JSON error bodies fall through to the status check below
    }
    if (!res.ok && res.status !== 202) {
      const detail = (body as { detail?: string } | null)?.detail;
      throw new Error(detail ?? `HTTP ${res.status} for ${path}`);
    }
    if (isJobTicket(body)) {
      return this.awaitJob(body.job_id);
    }
    return body;
  }

  private async awaitJob(jobId: string): Promise<unknown> {
    for (;;) {
      await sleep(this.pollMs);
      const res = await this.fetchFn(`${this.baseUrl}/api/jobs/${jobId}`);
      const body = (await res.json()) as JobBody & { detail?: string };
      if (!res.ok) throw new Error(body.detail ?? `HTTP ${res.status}`);
      if (body.status === "done") return body.result;
      if (body.status === "error") throw new Error(body.error ?? "job failed");
    }
  }

  datasets(): Promise<DatasetEntry[]> {
    return this.request("/api/datasets") as Promise<DatasetEntry[]>;
  }

  curve(params: {
    dataset: string;
    algorithm: string;
    classifier: string;
    seed: number;
    sample_size: number;
  }): Promise<Curve> {
    const q = new URLSearchParams({
      dataset: params.dataset,
      algorithm: params.algorithm,
      classifier: params.classifier,
      seed: String(params.seed),
      sample_size: String(params.sample_size),
    });
    return this.request(`/api/curve?${q}`) as Promise<Curve>;
  }

  resolveLoyalty(req: ResolveRequest): Promise<ResolveResult> {
    return this.request("/api/resolve-loyalty", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(req),
    }) as Promise<ResolveResult>;
  }

  prototypes(params: {
    dataset: string;
    k: number;
    algorithm: string;
    alpha_c: number;
    metric: string;
    seed: number;
  }): Promise<PrototypeResponse> {
    const q = new URLSearchParams({
      dataset: params.dataset,
      k: String(params.k),
      algorithm: params.algorithm,
      alpha_c: String(params.alpha_c),
      metric: params.metric,
      seed: String(params.seed),
    });
    return this.request(`/api/prototypes?${q}`) as Promise<PrototypeResponse>;
  }
}

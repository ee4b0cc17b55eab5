/**
 * Typed client for the steering service. Every view interface mirrors a
 * service response shape one-to-one; the UI never derives statistics of its
 * own, it only formats these fields.
 */

export interface BoxView {
  lo: string[]; // decimal strings; exactness matters for scaled bounds
  hi: string[];
}

export interface StatsView {
  mean: number;
  best: number;
  worst: number;
  median: number;
  st_dev: number;
  n_runs: number;
  wall_time_s: number;
}

export interface SubcubeSpecView {
  octant_index: number;
  scale_exponent: number;
  dim?: number;
}

export interface PhaseView {
  index: number;
  phase: "global" | "local";
  region: BoxView;
  subcube_spec: SubcubeSpecView | null;
  seed_base: number;
  stats: StatsView;
  best_values: number[];
}

export interface JobRef {
  job_id: string;
  completed: number;
  total: number;
}

export interface BestView {
  value: number;
  point: number[];
  phase_index: number;
}

export interface ExperimentView {
  experiment_id: string;
  fid: string;
  name: string;
  dim: number;
  status: "running" | "awaiting_decision" | "satisfied";
  search_cube: BoxView;
  phases: PhaseView[];
  active_job: JobRef | null;
  best?: BestView;
}

export interface ExperimentSummary {
  experiment_id: string;
  fid: string;
  name: string;
  dim: number;
  status: string;
  n_phases: number;
}

export interface OctantPhaseRef {
  phase_index: number;
  scale_exponent: number;
  stats: StatsView;
}

export interface OctantDescriptor {
  octant_index: number;
  bounds: BoxView;
  phases: OctantPhaseRef[];
}

export interface JobView {
  job_id: string;
  experiment_id: string;
  completed: number;
  total: number;
  status: "running" | "done" | "failed";
  phase_index?: number;
  error?: string;
}

export interface PreviewView {
  region: BoxView;
  scale_factor: number;
  subcube_spec: SubcubeSpecView | null;
}

export interface FunctionRow {
  id: string;
  name: string;
}

export interface ComparisonRow {
  id: string;
  name: string;
  HCTPS: Record<string, number>;
  GA: Record<string, number>;
  winning_phase_index: number;
}

export interface FinalReport {
  experiment_id: string;
  status: string;
  best_value: number;
  best_point: number[];
  phase_index: number;
  comparison?: ComparisonRow;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(detail);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class Client {
  constructor(
    private baseUrl: string = "",
    private fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchFn(this.baseUrl + path, init);
    let body: unknown = null;
    try {
      body = await resp.json();
    } catch {
      body = null;
    }
    if (!resp.ok) {
      const detail =
        body && typeof body === "object" && "detail" in body
          ? String((body as { detail: unknown }).detail)
          : `HTTP ${resp.status}`;
      throw new ApiError(resp.status, detail);
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  functions(): Promise<FunctionRow[]> {
    return this.request("/functions");
  }

  listExperiments(): Promise<ExperimentSummary[]> {
    return this.request("/experiments");
  }

  createExperiment(fid: string, dim = 30, seed = 42): Promise<{ id: string }> {
    return this.post("/experiments", { fid, dim, config: { seed } });
  }

  experiment(id: string): Promise<ExperimentView> {
    return this.request(`/experiments/${id}`);
  }

  startGlobal(id: string, nRuns: number): Promise<{ job_id: string }> {
    return this.post(`/experiments/${id}/global`, { n_runs: nRuns });
  }

  octants(id: string): Promise<OctantDescriptor[]> {
    return this.request(`/experiments/${id}/octants`);
  }

  localPreview(id: string, octantIndex: number, scaleExponent: number): Promise<PreviewView> {
    const params = `octant_index=${octantIndex}&scale_exponent=${scaleExponent}`;
    return this.request(`/experiments/${id}/local-preview?${params}`);
  }

  startLocal(
    id: string,
    octantIndex: number,
    scaleExponent: number,
    nRuns: number,
  ): Promise<{ job_id: string }> {
    return this.post(`/experiments/${id}/local`, {
      octant_index: octantIndex,
      scale_exponent: scaleExponent,
      n_runs: nRuns,
    });
  }

  job(jobId: string): Promise<JobView> {
    return this.request(`/jobs/${jobId}`);
  }

  markSatisfied(id: string): Promise<FinalReport> {
    return this.post(`/experiments/${id}/satisfied`, {});
  }
}

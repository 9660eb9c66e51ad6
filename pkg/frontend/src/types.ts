// Shapes of the JSON bodies served under /api. Field names mirror the
// server exactly; the UI never derives its own numbers from these.

export interface DatasetCharacteristics {
  stationary_fraction: number;
  stationarity: string;
  seasonal_fraction: number;
  seasonal: boolean;
  mean_entropy: number;
  entropy_bin: string;
}

export interface DatasetEntry {
  name: string;
  length?: number;
  classes?: number[];
  train_size?: number;
  test_size?: number;
  characteristics?: DatasetCharacteristics;
  error?: string;
}

export interface CurvePoint {
  alpha_c: number;
  mean_complexity: number;
  loyalty: number;
  kappa: number;
  mean_segments: number;
}

export interface Curve {
  dataset: string;
  algorithm: string;
  classifier: string;
  seed: number;
  points: CurvePoint[];
}

export interface ResolveRequest {
  dataset: string;
  algorithm: string;
  classifier: string;
  loyalty_target: number;
  seed: number;
  sample_size: number;
}

export interface ResolveResult {
  dataset: string;
  algorithm: string;
  classifier: string;
  seed: number;
  loyalty_target: number;
  alpha_c: number;
  achieved_loyalty: number;
  kappa: number;
  mean_segments: number;
  mean_complexity: number;
}

export interface PrototypeEntry {
  instance_id: number;
  label: number;
  raw: number[];
  kept_indices: number[];
  kept_values: number[];
  reconstruction: number[];
  segment_count: number;
}

export interface PrototypeClass {
  label: number;
  prototypes: PrototypeEntry[];
}

export interface PrototypeResponse {
  dataset: string;
  k_per_class: number;
  metric: string;
  algorithm: string;
  alpha_c: number;
  classes: PrototypeClass[];
}

export interface JobBody {
  status: "running" | "done" | "error";
  job_id: string;
  result?: unknown;
  error?: string;
}

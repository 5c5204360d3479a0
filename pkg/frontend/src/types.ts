// Wire types for the /v1 JSON API. Field names mirror the server payloads
// exactly; the UI renders these numbers verbatim and never derives its own.

export interface StageFlags {
  kmeans: boolean;
  som: boolean;
  scenario: boolean;
  prediction: boolean;
}

export interface SessionStatus {
  session_id: string;
  stages: StageFlags;
  has_dataset: boolean;
}

export interface UploadResponse {
  n_cases: number;
  n_features: number;
  feature_names: string[];
  preview: {
    case_ids: string[];
    feature_names: string[];
    values: number[][];
  };
}

export interface ClusterProfile {
  cluster: number;
  size: number;
  centroid: number[];
}

export interface KMeansResponse {
  k: number;
  seed: number;
  n_init: number;
  scale_data: boolean;
  feature_names: string[];
  profiles: ClusterProfile[];
  global_mean: number[];
  wss: number;
  pseudo_f: number | string | null;
  assignments: { case_id: string; cluster: number }[];
  silhouette?: {
    per_case: number[];
    cluster_means: number[];
    overall: number;
  };
  warnings: string[];
}

export interface SilhouetteResponse {
  defined: boolean;
  per_case?: { case_id: string; cluster: number; silhouette: number }[];
  cluster_means?: number[];
  cluster_sizes?: number[];
  overall?: number;
}

export interface AnovaRow {
  feature: string;
  f: number | string;
  p: number;
  df_between: number;
  df_within: number;
}

export interface SomResponse {
  parameters: {
    grid_rows: number;
    grid_cols: number;
    iterations: number;
    learning_rate: number;
    seed: number;
    scale_data: boolean;
    radius: number | null;
  };
  quantization_error: number;
  topographic_error: number;
  anova: AnovaRow[];
  warnings: string[];
}

export interface QuadrantProfile {
  neuron: number;
  row: number;
  col: number;
  weights_raw: number[];
  deviation: number[];
  case_count: number;
  empty: boolean;
}

export interface SomProfilesResponse {
  grid_rows: number;
  grid_cols: number;
  feature_names: string[];
  global_mean: number[];
  profiles: QuadrantProfile[];
}

export interface NamesPlotResponse {
  grid_rows: number;
  grid_cols: number;
  cells: string[][];
}

export interface ScenarioState {
  feature_names: string[];
  base_profiles: number[][];
  edited_profiles: number[][];
  base_bmu: number[];
  current_bmu: number[];
}

export interface ScenarioRunResponse {
  run: {
    cluster: number;
    edits: Record<string, number>;
    edited_profile: number[];
    old_bmu: number;
    new_bmu: number;
    moved: boolean;
    warnings: string[];
  };
  state: ScenarioState;
}

export interface SensitivityResponse {
  cluster: number;
  counts: Record<string, number>;
  n_samples: number;
  seed: number;
  deviation: Record<string, number>;
  warnings: string[];
}

export interface PredictionResponse {
  predictions: {
    case_id: string;
    best: number;
    second: number;
    best_distance: number;
    second_distance: number;
  }[];
}

export interface ApiErrorBody {
  code: string;
  message: string;
  stage?: string;
  missing?: string | string[];
  extra?: string[];
  row?: number;
  column?: string;
}

// Thin fetch client for the /v1 API. Every mutation awaits the server
// round trip; there is no optimistic state anywhere in the UI.

import type {
  KMeansResponse,
  NamesPlotResponse,
  PredictionResponse,
  ScenarioRunResponse,
  ScenarioState,
  SensitivityResponse,
  SessionStatus,
  SilhouetteResponse,
  SomProfilesResponse,
  SomResponse,
  UploadResponse,
  ApiErrorBody,
} from "./types.js";

export class ApiError extends Error {
  status: number;
  body: ApiErrorBody;

  constructor(status: number, body: ApiErrorBody) {
    super(body.message || `HTTP ${status}`);
    this.status = status;
    this.body = body;
  }

  get code(): string {
    return this.body.code;
  }
}

export interface UploadOptions {
  hasHeader?: boolean;
  separator?: "," | ";" | "tab";
  idColumn?: string;
  previewRows?: number;
  previewCols?: number;
}

export class ApiClient {
  base: string;

  constructor(base = "") {
    this.base = base.replace(/\/$/, "");
  }

  private async request<T>(method: string, path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(`${this.base}/v1${path}`, { method, ...init });
    if (!response.ok) {
      let body: ApiErrorBody = { code: "Unknown", message: response.statusText };
      try {
        const parsed = await response.json();
        if (parsed && parsed.error) body = parsed.error;
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(response.status, body);
    }
    return (await response.json()) as T;
  }

  private postJson<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>("POST", path, {
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  private postCsv<T>(path: string, csv: Blob | string, options: UploadOptions): Promise<T> {
    const params = new URLSearchParams();
    if (options.hasHeader === false) params.set("has_header", "false");
    if (options.separator) params.set("separator", options.separator);
    if (options.idColumn) params.set("id_column", options.idColumn);
    if (options.previewRows !== undefined) params.set("preview_rows", String(options.previewRows));
    if (options.previewCols !== undefined) params.set("preview_cols", String(options.previewCols));
    const query = params.toString();
    return this.request<T>("POST", `${path}${query ? `?${query}` : ""}`, {
      headers: { "content-type": "text/csv" },
      body: csv,
    });
  }

  createSession(): Promise<{ session_id: string }> {
    return this.request("POST", "/sessions");
  }

  sessionStatus(sid: string): Promise<SessionStatus> {
    return this.request("GET", `/sessions/${sid}`);
  }

  uploadData(sid: string, csv: Blob | string, options: UploadOptions = {}): Promise<UploadResponse> {
    return this.postCsv(`/sessions/${sid}/data`, csv, options);
  }

  runKmeans(
    sid: string,
    params: { k: number; seed?: number; n_init?: number; scale_data?: boolean },
  ): Promise<KMeansResponse> {
    return this.postJson(`/sessions/${sid}/kmeans`, params);
  }

  silhouette(sid: string): Promise<SilhouetteResponse> {
    return this.request("GET", `/sessions/${sid}/kmeans/silhouette`);
  }

  trainSom(
    sid: string,
    params: {
      grid_rows?: number;
      grid_cols?: number;
      iterations?: number;
      learning_rate?: number;
      seed?: number;
      scale_data?: boolean;
    },
  ): Promise<SomResponse> {
    return this.postJson(`/sessions/${sid}/som`, params);
  }

  somProfiles(sid: string): Promise<SomProfilesResponse> {
    return this.request("GET", `/sessions/${sid}/som/profiles`);
  }

  namesPlot(sid: string): Promise<NamesPlotResponse> {
    return this.request("GET", `/sessions/${sid}/som/names-plot`);
  }

  scenarioSetup(sid: string): Promise<ScenarioState> {
    return this.request("POST", `/sessions/${sid}/scenario/setup`);
  }

  scenarioRun(
    sid: string,
    cluster: number,
    edits: Record<string, number>,
  ): Promise<ScenarioRunResponse> {
    return this.postJson(`/sessions/${sid}/scenario/run`, { cluster, edits });
  }

  sensitivity(
    sid: string,
    params: { cluster: number; deviation: Record<string, number>; n_samples?: number; seed?: number },
  ): Promise<SensitivityResponse> {
    return this.postJson(`/sessions/${sid}/scenario/sensitivity`, params);
  }

  predict(sid: string, csv: Blob | string, options: UploadOptions = {}): Promise<PredictionResponse> {
    return this.postCsv(`/sessions/${sid}/predict`, csv, options);
  }

  reportUrl(sid: string, format: "json" | "zip"): string {
    return `${this.base}/v1/sessions/${sid}/report?format=${format}`;
  }
}

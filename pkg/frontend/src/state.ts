// Client mirror of one server session: the stage bitmap, cached stage
// summaries for rendering, and staleness marks. All analytics come from the
// API; this store only remembers what the server said and which downstream
// views became stale after an upstream rerun.

import type {
  KMeansResponse,
  NamesPlotResponse,
  PredictionResponse,
  ScenarioState,
  SensitivityResponse,
  SomProfilesResponse,
  SomResponse,
  StageFlags,
  UploadResponse,
} from "./types.js";
import type { GateState } from "./gating.js";

export type Stage = "data" | "kmeans" | "som" | "scenario" | "prediction";

// What a rerun of each stage invalidates (mirror of the server's rules).
const DOWNSTREAM: Record<Stage, Stage[]> = {
  data: ["kmeans", "som", "scenario", "prediction"],
  kmeans: ["scenario"],
  som: ["scenario", "prediction"],
  scenario: [],
  prediction: [],
};

export interface SessionView {
  sessionId: string;
  flags: GateState;
  stale: Set<Stage>;
  upload?: UploadResponse;
  kmeans?: KMeansResponse;
  som?: SomResponse;
  somProfiles?: SomProfilesResponse;
  namesPlot?: NamesPlotResponse;
  scenario?: ScenarioState;
  lastRun?: ScenarioRunInfo;
  sensitivity?: SensitivityResponse;
  prediction?: PredictionResponse;
}

export interface ScenarioRunInfo {
  cluster: number;
  oldBmu: number;
  newBmu: number;
  moved: boolean;
  warnings: string[];
}

export function newSessionView(sessionId: string): SessionView {
  return {
    sessionId,
    flags: { data: false, kmeans: false, som: false, scenario: false, prediction: false },
    stale: new Set(),
  };
}

export function fromServerFlags(sessionId: string, hasData: boolean, flags: StageFlags): SessionView {
  const view = newSessionView(sessionId);
  view.flags = { data: hasData, ...flags };
  return view;
}

function invalidateDownstream(view: SessionView, stage: Stage): void {
  for (const downstream of DOWNSTREAM[stage]) {
    if (view.flags[downstream]) view.stale.add(downstream);
    view.flags[downstream] = false;
    if (downstream === "kmeans") view.kmeans = undefined;
    if (downstream === "som") {
      view.som = undefined;
      view.somProfiles = undefined;
      view.namesPlot = undefined;
    }
    if (downstream === "scenario") {
      view.scenario = undefined;
      view.lastRun = undefined;
      view.sensitivity = undefined;
    }
    if (downstream === "prediction") view.prediction = undefined;
  }
  // the analyze views pair kmeans with the map; rerunning either stales them
  if (stage === "kmeans" || stage === "som") view.namesPlot = undefined;
}

export function applyUpload(view: SessionView, response: UploadResponse): void {
  invalidateDownstream(view, "data");
  view.upload = response;
  view.flags.data = true;
  view.stale.delete("data");
}

export function applyKmeans(view: SessionView, response: KMeansResponse): void {
  invalidateDownstream(view, "kmeans");
  view.kmeans = response;
  view.flags.kmeans = true;
  view.stale.delete("kmeans");
}

export function applySom(view: SessionView, response: SomResponse): void {
  invalidateDownstream(view, "som");
  view.som = response;
  view.somProfiles = undefined;
  view.flags.som = true;
  view.stale.delete("som");
}

export function applyScenarioSetup(view: SessionView, state: ScenarioState): void {
  view.scenario = state;
  view.lastRun = undefined;
  view.sensitivity = undefined;
  view.flags.scenario = true;
  view.stale.delete("scenario");
}

export function applyScenarioRun(
  view: SessionView,
  state: ScenarioState,
  run: ScenarioRunInfo,
): void {
  view.scenario = state;
  view.lastRun = run;
}

export function applyPrediction(view: SessionView, response: PredictionResponse): void {
  view.prediction = response;
  view.flags.prediction = true;
  view.stale.delete("prediction");
}

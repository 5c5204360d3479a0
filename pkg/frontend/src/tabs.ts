// The seven tab controllers. Each one renders its panel from the session
// view, posts to the API on user action, folds the response back into the
// view, and re-renders. Nothing is computed client-side; a tab whose
// upstream stage reran shows a stale notice until it is refreshed.

import { ApiClient, ApiError } from "./api.js";
import { gatePrompt, isAllowed, type Action } from "./gating.js";
import {
  applyKmeans,
  applyPrediction,
  applyScenarioRun,
  applyScenarioSetup,
  applySom,
  applyUpload,
  type SessionView,
  type Stage,
} from "./state.js";
import {
  anovaView,
  clusterTableView,
  gridView,
  histogramView,
  namesView,
  predictionView,
  previewView,
  scenarioTableView,
  silhouetteView,
} from "./views.js";
import {
  errorBanner,
  h,
  renderAnova,
  renderClusterTable,
  renderGrid,
  renderHistogram,
  renderNames,
  renderPrediction,
  renderPreviewTable,
  renderScenarioTable,
  renderSilhouette,
} from "./render.js";

export interface TabContext {
  api: ApiClient;
  view: SessionView;
  rerender: () => void;
}

export const TABS = [
  { id: "upload", label: "1. Upload data" },
  { id: "cluster", label: "2. Cluster cases" },
  { id: "train", label: "3. Train map" },
  { id: "analyze", label: "4. Compare results" },
  { id: "scenario", label: "5. Simulate scenarios" },
  { id: "predict", label: "6. Classify new cases" },
  { id: "report", label: "7. Generate report" },
] as const;

export type TabId = (typeof TABS)[number]["id"];

// stage whose staleness marks each tab
export const TAB_STAGE: Record<TabId, Stage | null> = {
  upload: "data",
  cluster: "kmeans",
  train: "som",
  analyze: "som",
  scenario: "scenario",
  predict: "prediction",
  report: null,
};

function describeError(error: unknown): HTMLElement {
  if (error instanceof ApiError) {
    const body = error.body;
    if (error.status === 409 && body.missing) {
      return errorBanner("Not yet available", `Run the ${body.missing} stage first.`);
    }
    if (body.code === "NonNumericCell") {
      return errorBanner(
        "Only numeric values can be analyzed",
        `Row ${body.row}, column "${body.column}" failed to parse.`,
      );
    }
    if (body.code === "SchemaMismatch") {
      const parts = [];
      if (Array.isArray(body.missing) && body.missing.length) {
        parts.push(`missing columns: ${body.missing.join(", ")}`);
      }
      if (body.extra && body.extra.length) {
        parts.push(`unexpected columns: ${body.extra.join(", ")}`);
      }
      return errorBanner(
        "New data must carry the training columns",
        parts.join("; ") || body.message,
      );
    }
    if (body.code === "NoEditsToPerturb") {
      return errorBanner(
        "Nothing to perturb",
        "Edit at least one profile element and press Run Clusters before running sensitivity.",
      );
    }
    return errorBanner(`${body.code}`, body.message);
  }
  return errorBanner("Request failed", String(error));
}

function gateNotice(action: Action, context: TabContext): HTMLElement | null {
  const prompt = gatePrompt(action, context.view.flags);
  return prompt ? h("p", { class: "gate-note" }, prompt) : null;
}

function staleNotice(stage: Stage, context: TabContext): HTMLElement | null {
  if (!context.view.stale.has(stage)) return null;
  return h("p", { class: "stale-note" },
    "An upstream stage was re-run; these results were cleared. Run this stage again.");
}

function numberInput(id: string, label: string, value: string): HTMLElement {
  return h("label", { class: "field" }, label,
    h("input", { id, type: "text", value }));
}

function readNumber(root: HTMLElement, id: string): number {
  const input = root.querySelector<HTMLInputElement>(`#${id}`)!;
  const value = Number(input.value);
  if (!Number.isFinite(value)) {
    input.classList.add("invalid");
    throw new Error(`"${input.value}" is not a number`);
  }
  input.classList.remove("invalid");
  return value;
}

async function guard(panel: HTMLElement, context: TabContext, work: () => Promise<void>) {
  panel.querySelectorAll(".error-banner").forEach((el) => el.remove());
  try {
    await work();
    context.rerender();
  } catch (error) {
    panel.prepend(describeError(error));
  }
}

// --- tab 1: upload ---------------------------------------------------------

export function uploadTab(context: TabContext): HTMLElement {
  const { view } = context;
  const panel = h("section", {},
    h("h2", {}, "Import your cases"),
    h("p", {}, "CSV only, rows as cases, columns as profile elements, numeric values."),
    h("form", { class: "controls", onsubmit: (e) => e.preventDefault() },
      h("label", { class: "field" }, "CSV file", h("input", { id: "csv-file", type: "file" })),
      h("label", { class: "field checkbox" },
        h("input", { id: "has-header", type: "checkbox", checked: "checked" }), "Header?"),
      h("label", { class: "field" }, "Separator",
        h("select", { id: "separator" },
          h("option", { value: "," }, "Comma"),
          h("option", { value: ";" }, "Semicolon"),
          h("option", { value: "tab" }, "Tab"))),
      numberInput("preview-rows", "Rows in preview", "20"),
      numberInput("preview-cols", "Columns in preview", "10"),
      h("label", { class: "field" }, "Case id column (optional)",
        h("input", { id: "id-column", type: "text", value: "" })),
      h("button", {
        class: "primary",
        onclick: () => guard(panel, context, async () => {
          const fileInput = panel.querySelector<HTMLInputElement>("#csv-file")!;
          const file = fileInput.files?.[0];
          if (!file) throw new Error("choose a CSV file first");
          const header = panel.querySelector<HTMLInputElement>("#has-header")!.checked;
          const separator = panel.querySelector<HTMLSelectElement>("#separator")!
            .value as "," | ";" | "tab";
          const idColumn = panel.querySelector<HTMLInputElement>("#id-column")!.value.trim();
          const response = await context.api.uploadData(view.sessionId, file, {
            hasHeader: header,
            separator,
            idColumn: idColumn || undefined,
            previewRows: readNumber(panel, "preview-rows"),
            previewCols: readNumber(panel, "preview-cols"),
          });
          applyUpload(view, response);
        }),
      }, "Build database")),
  );
  if (view.upload) {
    panel.append(renderPreviewTable(previewView(view.upload)));
    panel.append(h("p", { class: "hint" },
      "The preview is truncated; analyses always use the full dataset."));
  }
  return panel;
}

// --- tab 2: cluster ----------------------------------------------------------

export function clusterTab(context: TabContext): HTMLElement {
  const { view } = context;
  const panel = h("section", {},
    h("h2", {}, "Cluster your cases (k-means)"),
    gateNotice("kmeans", context),
    staleNotice("kmeans", context),
  );
  if (isAllowed("kmeans", view.flags)) {
    panel.append(
      h("form", { class: "controls", onsubmit: (e) => e.preventDefault() },
        numberInput("km-k", "Clusters (k)", "3"),
        numberInput("km-seed", "Seed", "0"),
        numberInput("km-ninit", "Restarts", "10"),
        h("label", { class: "field checkbox" },
          h("input", { id: "km-scale", type: "checkbox" }), "Standardize first"),
        h("button", {
          class: "primary",
          onclick: () => guard(panel, context, async () => {
            const response = await context.api.runKmeans(view.sessionId, {
              k: readNumber(panel, "km-k"),
              seed: readNumber(panel, "km-seed"),
              n_init: readNumber(panel, "km-ninit"),
              scale_data: panel.querySelector<HTMLInputElement>("#km-scale")!.checked,
            });
            applyKmeans(view, response);
          }),
        }, "Run k-means")),
    );
  }
  if (view.kmeans) {
    panel.append(h("h3", {}, "Cluster profiles"), renderClusterTable(clusterTableView(view.kmeans)));
    const sil = view.kmeans.silhouette
      ? silhouetteView({
          defined: true,
          per_case: view.kmeans.assignments.map((a, i) => ({
            case_id: a.case_id,
            cluster: a.cluster,
            silhouette: view.kmeans!.silhouette!.per_case[i],
          })),
          cluster_means: view.kmeans.silhouette.cluster_means,
          cluster_sizes: view.kmeans.profiles.map((p) => p.size),
          overall: view.kmeans.silhouette.overall,
        })
      : null;
    if (sil) panel.append(h("h3", {}, "Silhouette"), renderSilhouette(sil));
  }
  return panel;
}

// --- tab 3: train map ------------------------------------------------------------

export function trainTab(context: TabContext): HTMLElement {
  const { view } = context;
  const panel = h("section", {},
    h("h2", {}, "Train the self-organizing map"),
    gateNotice("som", context),
    staleNotice("som", context),
  );
  if (isAllowed("som", view.flags)) {
    panel.append(
      h("form", { class: "controls", onsubmit: (e) => e.preventDefault() },
        numberInput("som-rows", "Grid rows", "5"),
        numberInput("som-cols", "Grid columns", "5"),
        numberInput("som-iters", "Iterations", String(100 * (view.upload?.n_cases ?? 100))),
        numberInput("som-rate", "Learning rate", "0.5"),
        numberInput("som-seed", "Seed", "0"),
        h("label", { class: "field checkbox" },
          h("input", { id: "som-scale", type: "checkbox", checked: "checked" }),
          "Standardize first"),
        h("button", {
          class: "primary",
          onclick: () => guard(panel, context, async () => {
            const response = await context.api.trainSom(view.sessionId, {
              grid_rows: readNumber(panel, "som-rows"),
              grid_cols: readNumber(panel, "som-cols"),
              iterations: readNumber(panel, "som-iters"),
              learning_rate: readNumber(panel, "som-rate"),
              seed: readNumber(panel, "som-seed"),
              scale_data: panel.querySelector<HTMLInputElement>("#som-scale")!.checked,
            });
            applySom(view, response);
          }),
        }, "Train map")),
    );
  }
  if (view.som) {
    panel.append(
      h("p", {},
        `quantization error ${view.som.quantization_error.toPrecision(5)}, ` +
        `topographic error ${view.som.topographic_error.toPrecision(4)} ` +
        "(lower values close to zero are better)"),
      ...view.som.warnings.map((w) => h("p", { class: "warning" }, w)),
      h("h3", {}, "Which profile elements differ across quadrants (ANOVA)"),
      renderAnova(anovaView(view.som)),
    );
  }
  return panel;
}

// --- tab 4: analyze ---------------------------------------------------------------

export function analyzeTab(context: TabContext): HTMLElement {
  const { view } = context;
  const panel = h("section", {},
    h("h2", {}, "Compare and visualize"),
    gateNotice("som/profiles", context),
  );
  if (isAllowed("som/profiles", view.flags)) {
    const load = () => guard(panel, context, async () => {
      view.somProfiles = await context.api.somProfiles(view.sessionId);
      if (isAllowed("som/names-plot", view.flags)) {
        view.namesPlot = await context.api.namesPlot(view.sessionId);
      }
    });
    if (!view.somProfiles) {
      panel.append(h("button", { class: "primary", onclick: () => void load() }, "Load map views"));
    } else {
      panel.append(
        h("h3", {}, "Quadrant profiles (bars centered on the global mean)"),
        renderGrid(gridView(view.somProfiles)),
        h("p", { class: "hint" },
          "A bar reduced to the centre line sits exactly at the global mean; greyed quadrants have no cases."),
      );
      if (view.namesPlot) {
        panel.append(
          h("h3", {}, "Names plot (cluster id - case id)"),
          renderNames(namesView(view.namesPlot)),
        );
      } else if (!isAllowed("som/names-plot", view.flags)) {
        panel.append(h("p", { class: "gate-note" },
          "Run clustering to overlay cluster-case labels on the map."));
      }
      panel.append(h("button", { onclick: () => void load() }, "Refresh"));
    }
  }
  return panel;
}

// --- tab 5: scenario ---------------------------------------------------------------------

export function scenarioTab(context: TabContext): HTMLElement {
  const { view } = context;
  const pending = new Map<number, Record<string, number>>();
  const panel = h("section", {},
    h("h2", {}, "Simulate scenarios and interventions"),
    gateNotice("scenario/setup", context),
    staleNotice("scenario", context),
  );
  if (!isAllowed("scenario/setup", view.flags)) return panel;

  panel.append(
    h("div", { class: "controls" },
      h("button", {
        class: "primary",
        onclick: () => guard(panel, context, async () => {
          applyScenarioSetup(view, await context.api.scenarioSetup(view.sessionId));
        }),
      }, "Model Setup")),
  );
  if (!view.scenario) return panel;

  const table = renderScenarioTable(
    scenarioTableView(view.scenario),
    (cluster, feature, raw) => {
      const value = Number(raw);
      const input = panel.querySelector<HTMLInputElement>(
        `input[data-cluster="${cluster}"][data-feature="${feature}"]`,
      );
      if (!Number.isFinite(value)) {
        input?.classList.add("invalid");
        return;
      }
      input?.classList.remove("invalid");
      const edits = pending.get(cluster) ?? {};
      edits[feature] = value;
      pending.set(cluster, edits);
    },
  );
  panel.append(
    h("h3", {}, "Editable cluster profiles"),
    table,
    h("div", { class: "controls" },
      h("button", {
        class: "primary",
        onclick: () => guard(panel, context, async () => {
          const clusters = pending.size
            ? [...pending.keys()]
            : view.scenario!.base_profiles.map((_, c) => c);
          for (const cluster of clusters) {
            const response = await context.api.scenarioRun(
              view.sessionId, cluster, pending.get(cluster) ?? {},
            );
            applyScenarioRun(view, response.state, {
              cluster: response.run.cluster,
              oldBmu: response.run.old_bmu,
              newBmu: response.run.new_bmu,
              moved: response.run.moved,
              warnings: response.run.warnings,
            });
          }
          pending.clear();
        }),
      }, "Run Clusters")),
  );

  if (view.lastRun) {
    const run = view.lastRun;
    panel.append(
      h("p", { class: run.moved ? "moved-note" : "hint" },
        run.moved
          ? `Cluster ${run.cluster} moved: quadrant ${run.oldBmu} -> ${run.newBmu}.`
          : `Cluster ${run.cluster} stayed on quadrant ${run.newBmu} (no movement).`),
      ...run.warnings.map((w) => h("p", { class: "warning" }, w)),
    );
  }

  // sensitivity panel: deviation (0-100 %) for the edited elements of one cluster
  const scenario = view.scenario;
  const editedByCluster = scenario.base_profiles.map((base, c) =>
    scenario.feature_names.filter((_, j) => scenario.edited_profiles[c][j] !== base[j]));
  const sensPanel = h("div", { class: "sensitivity-panel" },
    h("h3", {}, "Sensitivity"),
    h("p", { class: "hint" },
      "Deviation, 0-100 % of each edited change, sampled in both directions."),
    h("label", { class: "field" }, "Cluster",
      h("select", { id: "sens-cluster" },
        ...scenario.base_profiles.map((_, c) =>
          h("option", { value: String(c) }, `cluster ${c}`)))),
    h("div", { id: "sens-deviations" }),
    numberInput("sens-samples", "Samples", "1000"),
    numberInput("sens-seed", "Seed", "0"),
    h("button", {
      class: "primary",
      onclick: () => guard(panel, context, async () => {
        const cluster = Number(
          panel.querySelector<HTMLSelectElement>("#sens-cluster")!.value);
        const deviation: Record<string, number> = {};
        for (const feature of editedByCluster[cluster]) {
          const percent = readNumber(panel, `dev-${feature}`);
          deviation[feature] = percent / 100;
        }
        view.sensitivity = await context.api.sensitivity(view.sessionId, {
          cluster,
          deviation,
          n_samples: readNumber(panel, "sens-samples"),
          seed: readNumber(panel, "sens-seed"),
        });
      }),
    }, "Run sensitivity"));
  panel.append(sensPanel);

  const deviationHolder = sensPanel.querySelector<HTMLElement>("#sens-deviations")!;
  const selectEl = sensPanel.querySelector<HTMLSelectElement>("#sens-cluster")!;
  const fillDeviationInputs = () => {
    deviationHolder.replaceChildren();
    const edited = editedByCluster[Number(selectEl.value)];
    if (!edited.length) {
      deviationHolder.append(h("p", { class: "hint" },
        "No edited elements on this cluster yet; edit the table and Run Clusters first."));
      return;
    }
    for (const feature of edited) {
      deviationHolder.append(numberInput(`dev-${feature}`, `${feature} deviation %`, "50"));
    }
  };
  selectEl.addEventListener("change", fillDeviationInputs);
  fillDeviationInputs();

  if (view.sensitivity) {
    panel.append(h("h3", {}, "Where the trend lands"), renderHistogram(histogramView(view.sensitivity)));
  }

  if (view.somProfiles) {
    const highlight = view.lastRun ? [view.lastRun.oldBmu, view.lastRun.newBmu] : [];
    panel.append(
      h("h3", {}, "Reference: quadrant profiles"),
      renderGrid(gridView(view.somProfiles), highlight),
    );
  } else {
    panel.append(h("button", {
      onclick: () => guard(panel, context, async () => {
        view.somProfiles = await context.api.somProfiles(view.sessionId);
      }),
    }, "Show reference map"));
  }
  return panel;
}

// --- tab 6: predict ---------------------------------------------------------------

export function predictTab(context: TabContext): HTMLElement {
  const { view } = context;
  const panel = h("section", {},
    h("h2", {}, "Classify new cases"),
    gateNotice("predict", context),
    staleNotice("prediction", context),
  );
  if (isAllowed("predict", view.flags)) {
    panel.append(
      h("form", { class: "controls", onsubmit: (e) => e.preventDefault() },
        h("label", { class: "field" }, "CSV of new cases",
          h("input", { id: "predict-file", type: "file" })),
        h("label", { class: "field" }, "Case id column (optional)",
          h("input", { id: "predict-id-column", type: "text", value: "" })),
        h("button", {
          class: "primary",
          onclick: () => guard(panel, context, async () => {
            const file = panel.querySelector<HTMLInputElement>("#predict-file")!.files?.[0];
            if (!file) throw new Error("choose a CSV file first");
            const idColumn = panel
              .querySelector<HTMLInputElement>("#predict-id-column")!.value.trim();
            const response = await context.api.predict(view.sessionId, file, {
              idColumn: idColumn || undefined,
            });
            applyPrediction(view, response);
          }),
        }, "Classify")),
      h("p", { class: "hint" },
        "The file must carry exactly the training columns (any order)."),
    );
  }
  if (view.prediction) {
    panel.append(
      h("h3", {}, "Best-fitting and second best-fitting quadrants"),
      renderPrediction(predictionView(view.prediction)),
    );
  }
  return panel;
}

// --- tab 7: report -----------------------------------------------------------------

export function reportTab(context: TabContext): HTMLElement {
  const { view } = context;
  const allowed = isAllowed("report", view.flags);
  const panel = h("section", {},
    h("h2", {}, "Generate your report"),
    h("p", {}, "Exports cover exactly the stages used in this session."),
  );
  if (!allowed) {
    panel.append(h("p", { class: "gate-note" },
      "Nothing to export yet: run at least one analysis stage."));
  }
  const jsonLink = h("a", {
    class: `download ${allowed ? "" : "disabled"}`,
    href: allowed ? context.api.reportUrl(view.sessionId, "json") : "#",
    download: "report.json",
  }, "Download JSON bundle");
  const zipLink = h("a", {
    class: `download ${allowed ? "" : "disabled"}`,
    href: allowed ? context.api.reportUrl(view.sessionId, "zip") : "#",
    download: "report.zip",
  }, "Download CSV archive (zip)");
  panel.append(h("div", { class: "controls" }, jsonLink, zipLink));
  const done = Object.entries(view.flags)
    .filter(([stage, on]) => on && stage !== "data")
    .map(([stage]) => stage);
  panel.append(h("p", { class: "hint" },
    done.length ? `Sections that will be included: ${done.join(", ")}.` : ""));
  return panel;
}

export const TAB_RENDERERS: Record<TabId, (context: TabContext) => HTMLElement> = {
  upload: uploadTab,
  cluster: clusterTab,
  train: trainTab,
  analyze: analyzeTab,
  scenario: scenarioTab,
  predict: predictTab,
  report: reportTab,
};

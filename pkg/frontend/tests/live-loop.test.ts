// Live integration: the Tab 5 steering loop (upload -> cluster -> train ->
// setup -> edit -> run -> sensitivity histogram) driven through the UI's own
// api/state/view modules against a real service process.

import assert from "node:assert/strict";
import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { after, before, test } from "node:test";

import { ApiClient } from "../src/api.js";
import {
  applyKmeans,
  applyScenarioRun,
  applyScenarioSetup,
  applySom,
  applyUpload,
  newSessionView,
} from "../src/state.js";
import { histogramView, scenarioTableView } from "../src/views.js";
import { fixtureText } from "./helpers.js";

const PORT = 8917;
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess | null = null;

async function waitForServer(timeoutMs = 30_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${BASE}/v1/sessions`, { method: "POST" });
      if (response.ok) return;
    } catch {
      /* not up yet */
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error("caseflow serve did not come up in time");
}

before(async () => {
  const sessionDir = mkdtempSync(join(tmpdir(), "caseflow-ui-test-"));
  server = spawn(
    "caseflow",
    ["serve", "--host", "127.0.0.1", "--port", String(PORT), "--session-dir", sessionDir],
    { stdio: "ignore" },
  );
  await waitForServer();
});

after(() => {
  server?.kill("SIGTERM");
});

test("live: edit -> run -> histogram loop completes against the service", async () => {
  const api = new ApiClient(BASE);
  const created = await api.createSession();
  const view = newSessionView(created.session_id);

  applyUpload(view, await api.uploadData(created.session_id, fixtureText("cases.csv"), {
    idColumn: "id",
  }));
  assert.equal(view.upload!.n_cases, 20);

  applyKmeans(view, await api.runKmeans(created.session_id, { k: 2, seed: 1, n_init: 5 }));
  assert.equal(view.kmeans!.profiles.length, 2);

  applySom(view, await api.trainSom(created.session_id, {
    grid_rows: 1, grid_cols: 2, iterations: 2000, seed: 3,
  }));
  assert.ok(view.som!.quantization_error >= 0);

  applyScenarioSetup(view, await api.scenarioSetup(created.session_id));
  const table = scenarioTableView(view.scenario!);
  assert.equal(table.clusters.length, 2);
  assert.notEqual(table.clusters[0].baseBmu, table.clusters[1].baseBmu);

  // steer cluster 0 onto cluster 1's profile: the edited table feeds the run
  const targetProfile = view.scenario!.base_profiles[1];
  const edits: Record<string, number> = {};
  view.scenario!.feature_names.forEach((feature, j) => {
    edits[feature] = targetProfile[j];
  });
  const runResponse = await api.scenarioRun(created.session_id, 0, edits);
  applyScenarioRun(view, runResponse.state, {
    cluster: runResponse.run.cluster,
    oldBmu: runResponse.run.old_bmu,
    newBmu: runResponse.run.new_bmu,
    moved: runResponse.run.moved,
    warnings: runResponse.run.warnings,
  });
  assert.equal(view.lastRun!.moved, true);
  assert.equal(view.lastRun!.newBmu, view.scenario!.base_bmu[1]);

  // edits persist in the table across runs
  const edited = scenarioTableView(view.scenario!).clusters[0];
  assert.ok(edited.cells.some((cell) => cell.changed));

  view.sensitivity = await api.sensitivity(created.session_id, {
    cluster: 0,
    deviation: { f1: 0.5, f2: 0.5 },
    n_samples: 400,
    seed: 7,
  });
  const histogram = histogramView(view.sensitivity);
  const total = histogram.bars.reduce((n, bar) => n + bar.count, 0);
  assert.equal(total, 400);
  assert.ok(histogram.bars.length >= 1);

  // the report now covers everything the loop ran
  const report = await fetch(api.reportUrl(created.session_id, "json")).then((r) => r.json());
  assert.ok(report.kmeans && report.som && report.scenario);
  assert.equal(report.scenario.runs.length, 1);
});

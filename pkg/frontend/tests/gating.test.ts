// The UI's stage gate must block exactly the requests the service rejects
// for ordering reasons. The matrix below was recorded from the real service
// (scripts/record-fixtures.py): a fresh session per probe, per state.

import assert from "node:assert/strict";
import { test } from "node:test";

import { isAllowed, missingPrerequisite, type Action, type GateState } from "../src/gating.js";
import { fixture } from "./helpers.js";

interface Probe {
  status: number;
  code?: string;
  missing?: string | null;
}

type Matrix = Record<string, Record<string, Probe>>;

const STATE_FLAGS: Record<string, GateState> = {
  empty: { data: false, kmeans: false, som: false, scenario: false, prediction: false },
  data: { data: true, kmeans: false, som: false, scenario: false, prediction: false },
  "data+kmeans": { data: true, kmeans: true, som: false, scenario: false, prediction: false },
  "data+som": { data: true, kmeans: false, som: true, scenario: false, prediction: false },
  "data+kmeans+som": { data: true, kmeans: true, som: true, scenario: false, prediction: false },
  "data+kmeans+som+scenario": {
    data: true, kmeans: true, som: true, scenario: true, prediction: false,
  },
};

// A probe is blocked by ORDERING when the server answered 409, or 422 with
// NothingToExport (the report gate). Other 422s are domain rejections that
// passed the gate (e.g. sensitivity with no edits).
function serverBlocked(probe: Probe): boolean {
  if (probe.status === 409) return true;
  return probe.status === 422 && probe.code === "NothingToExport";
}

test("gate verdict matches the recorded service behavior for every state and endpoint", () => {
  const matrix = fixture<Matrix>("gating");
  for (const [state, probes] of Object.entries(matrix)) {
    const flags = STATE_FLAGS[state];
    assert.ok(flags, `unknown recorded state ${state}`);
    for (const [endpoint, probe] of Object.entries(probes)) {
      const allowed = isAllowed(endpoint as Action, flags);
      assert.equal(
        allowed,
        !serverBlocked(probe),
        `${state} / ${endpoint}: UI says ${allowed ? "allow" : "block"}, ` +
          `server said ${probe.status}`,
      );
    }
  }
});

test("blocked actions name the same missing stage as the server's 409 body", () => {
  const matrix = fixture<Matrix>("gating");
  for (const [state, probes] of Object.entries(matrix)) {
    const flags = STATE_FLAGS[state];
    for (const [endpoint, probe] of Object.entries(probes)) {
      if (probe.status !== 409 || !probe.missing) continue;
      assert.equal(
        missingPrerequisite(endpoint as Action, flags),
        probe.missing,
        `${state} / ${endpoint}`,
      );
    }
  }
});

test("every recorded state blocks at least the empty-session actions it should", () => {
  const matrix = fixture<Matrix>("gating");
  const empty = matrix["empty"];
  for (const [endpoint, probe] of Object.entries(empty)) {
    assert.ok(serverBlocked(probe), `${endpoint} unexpectedly allowed on empty session`);
  }
});

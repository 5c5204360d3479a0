// Contract tests: every statistic a view model would render is exactly the
// corresponding field of a recorded API response. No number is invented,
// scaled (except layout fractions), or recomputed client-side.
import assert from "node:assert/strict";
import { test } from "node:test";
import { anovaView, clusterTableView, gridView, histogramView, namesView, predictionView, previewView, scenarioTableView, silhouetteView, } from "../src/views.js";
import { fixture } from "./helpers.js";
test("upload preview mirrors the API payload", () => {
    const payload = fixture("data");
    const view = previewView(payload);
    assert.equal(view.rows.length, payload.preview.case_ids.length);
    view.rows.forEach((row, i) => {
        assert.equal(row.caseId, payload.preview.case_ids[i]);
        assert.deepEqual(row.values, payload.preview.values[i]);
    });
    assert.ok(view.caption.includes(String(payload.n_cases)));
    assert.ok(view.caption.includes(String(payload.n_features)));
});
test("cluster table carries centroids, sizes, global mean, wss, pseudo-F verbatim", () => {
    const payload = fixture("kmeans");
    const view = clusterTableView(payload);
    payload.profiles.forEach((profile, i) => {
        assert.equal(view.rows[i].size, profile.size);
        assert.deepEqual(view.rows[i].values, profile.centroid);
    });
    const reference = view.rows[view.rows.length - 1];
    assert.equal(reference.label, "global mean");
    assert.deepEqual(reference.values, payload.global_mean);
    assert.equal(view.wss, payload.wss);
    assert.equal(view.pseudoF, payload.pseudo_f);
});
test("silhouette bars are the per-case values; averages are the API's", () => {
    const payload = fixture("silhouette");
    const view = silhouetteView(payload);
    assert.equal(view.overall, payload.overall);
    for (const cluster of view.clusters) {
        assert.equal(cluster.averageWidth, payload.cluster_means[cluster.cluster]);
        assert.equal(cluster.size, payload.cluster_sizes[cluster.cluster]);
        const apiValues = payload
            .per_case.filter((r) => r.cluster === cluster.cluster)
            .map((r) => r.silhouette)
            .sort((a, b) => a - b);
        const viewValues = cluster.bars.map((b) => b.value).sort((a, b) => a - b);
        assert.deepEqual(viewValues, apiValues);
        // bars are labeled by the right case: spot-check membership
        for (const bar of cluster.bars) {
            const row = payload.per_case.find((r) => r.case_id === bar.caseId);
            assert.equal(bar.value, row.silhouette);
            assert.equal(row.cluster, cluster.cluster);
        }
    }
});
test("anova table formats F and p from the API rows", () => {
    const payload = fixture("som");
    const view = anovaView(payload);
    assert.equal(view.rows.length, payload.anova.length);
    payload.anova.forEach((row, i) => {
        assert.equal(view.rows[i].feature, row.feature);
        assert.equal(view.rows[i].p, row.p);
        if (row.f === "Infinity") {
            assert.equal(view.rows[i].f, "∞");
        }
        else {
            assert.equal(view.rows[i].f, String(row.f));
        }
    });
});
test("grid cells carry quadrant deviations, weights, counts, empties verbatim", () => {
    const payload = fixture("som_profiles");
    const view = gridView(payload);
    assert.equal(view.rows, payload.grid_rows);
    assert.equal(view.cols, payload.grid_cols);
    payload.profiles.forEach((profile, i) => {
        const cell = view.cells[i];
        assert.equal(cell.neuron, profile.neuron);
        assert.equal(cell.empty, profile.empty);
        assert.equal(cell.caseCount, profile.case_count);
        cell.bars.forEach((bar, j) => {
            assert.equal(bar.feature, payload.feature_names[j]);
            assert.equal(bar.deviation, profile.deviation[j]);
            assert.equal(bar.weight, profile.weights_raw[j]);
        });
    });
    const allDevs = payload.profiles.flatMap((p) => p.deviation.map(Math.abs));
    assert.equal(view.maxAbsDeviation, Math.max(...allDevs));
});
test("names cells show the API labels with an exact overflow count", () => {
    const payload = fixture("names_plot");
    const view = namesView(payload, 3);
    payload.cells.forEach((labels, neuron) => {
        const cell = view.cells[neuron];
        assert.deepEqual(cell.shown, labels.slice(0, 3));
        assert.equal(cell.overflow, Math.max(0, labels.length - 3));
        assert.equal(cell.shown.length + cell.overflow, labels.length);
    });
    // every case appears exactly once across the grid
    const total = view.cells.reduce((n, c) => n + c.shown.length + c.overflow, 0);
    assert.equal(total, payload.cells.flat().length);
});
test("scenario table shows base and edited values verbatim and flags changes", () => {
    const state = fixture("scenario_run").state;
    const view = scenarioTableView(state);
    view.clusters.forEach((cluster, c) => {
        assert.equal(cluster.baseBmu, state.base_bmu[c]);
        assert.equal(cluster.currentBmu, state.current_bmu[c]);
        cluster.cells.forEach((cell, j) => {
            assert.equal(cell.base, state.base_profiles[c][j]);
            assert.equal(cell.edited, state.edited_profiles[c][j]);
            assert.equal(cell.changed, state.edited_profiles[c][j] !== state.base_profiles[c][j]);
        });
    });
});
test("histogram bars are the API counts and sum to n_samples", () => {
    const payload = fixture("sensitivity");
    const view = histogramView(payload);
    assert.equal(view.nSamples, payload.n_samples);
    let total = 0;
    for (const bar of view.bars) {
        assert.equal(bar.count, payload.counts[String(bar.neuron)]);
        total += bar.count;
    }
    assert.equal(total, payload.n_samples);
    assert.equal(view.bars.length, Object.keys(payload.counts).length);
});
test("prediction rows are the API rows verbatim", () => {
    const payload = fixture("prediction");
    const view = predictionView(payload);
    assert.equal(view.rows.length, payload.predictions.length);
    payload.predictions.forEach((p, i) => {
        assert.deepEqual(view.rows[i], {
            caseId: p.case_id,
            best: p.best,
            second: p.second,
            bestDistance: p.best_distance,
            secondDistance: p.second_distance,
        });
    });
});
test("recorded error payloads carry what the banners display", () => {
    const parseError = fixture("parse_error");
    assert.equal(parseError.error.code, "NonNumericCell");
    assert.equal(parseError.error.row, 1);
    assert.equal(parseError.error.column, "b");
    const schemaError = fixture("schema_error");
    assert.equal(schemaError.error.code, "SchemaMismatch");
    assert.deepEqual(schemaError.error.missing, ["f2"]);
    assert.deepEqual(schemaError.error.extra, ["intruder"]);
});

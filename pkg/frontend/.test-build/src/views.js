// Pure view-model builders: API payload in, renderable structure out.
// Every number in a view model is copied verbatim from the API response
// (sorting and layout scaling are the only transformations), which is what
// the contract tests pin against recorded fixtures.
export function previewView(response) {
    return {
        caption: `${response.n_cases} cases x ${response.n_features} profile elements`,
        columns: response.preview.feature_names,
        rows: response.preview.case_ids.map((caseId, i) => ({
            caseId,
            values: response.preview.values[i],
        })),
    };
}
export function clusterTableView(response) {
    const rows = response.profiles.map((p) => ({
        label: `cluster ${p.cluster}`,
        size: p.size,
        values: p.centroid,
    }));
    // global mean reference row, straight from the API
    rows.push({ label: "global mean", size: null, values: response.global_mean });
    return {
        featureNames: response.feature_names,
        rows,
        wss: response.wss,
        pseudoF: response.pseudo_f,
        warnings: response.warnings,
    };
}
export function silhouetteView(response) {
    if (!response.defined || !response.per_case)
        return null;
    const clusterIds = [...new Set(response.per_case.map((r) => r.cluster))].sort((a, b) => a - b);
    return {
        clusters: clusterIds.map((cluster) => {
            const members = response.per_case.filter((r) => r.cluster === cluster);
            members.sort((a, b) => b.silhouette - a.silhouette);
            return {
                cluster,
                size: response.cluster_sizes[cluster],
                averageWidth: response.cluster_means[cluster],
                bars: members.map((m) => ({ caseId: m.case_id, value: m.silhouette })),
            };
        }),
        overall: response.overall,
    };
}
export function anovaView(response) {
    return {
        rows: response.anova.map((row) => ({
            feature: row.feature,
            f: row.f === "Infinity" ? "∞" : String(row.f),
            p: row.p,
            dfs: `${row.df_between}, ${row.df_within}`,
        })),
    };
}
export function gridView(response) {
    let maxAbs = 0;
    for (const p of response.profiles) {
        for (const d of p.deviation)
            maxAbs = Math.max(maxAbs, Math.abs(d));
    }
    return {
        rows: response.grid_rows,
        cols: response.grid_cols,
        maxAbsDeviation: maxAbs,
        cells: response.profiles.map((p) => ({
            neuron: p.neuron,
            row: p.row,
            col: p.col,
            empty: p.empty,
            caseCount: p.case_count,
            bars: response.feature_names.map((feature, j) => ({
                feature,
                deviation: p.deviation[j],
                weight: p.weights_raw[j],
            })),
        })),
    };
}
export const NAMES_CELL_CAPACITY = 8;
export function namesView(response, capacity = NAMES_CELL_CAPACITY) {
    return {
        rows: response.grid_rows,
        cols: response.grid_cols,
        cells: response.cells.map((labels, neuron) => ({
            neuron,
            shown: labels.slice(0, capacity),
            overflow: Math.max(0, labels.length - capacity),
        })),
    };
}
export function scenarioTableView(state) {
    return {
        featureNames: state.feature_names,
        clusters: state.base_profiles.map((base, cluster) => ({
            cluster,
            baseBmu: state.base_bmu[cluster],
            currentBmu: state.current_bmu[cluster],
            cells: state.feature_names.map((feature, j) => ({
                feature,
                base: base[j],
                edited: state.edited_profiles[cluster][j],
                changed: state.edited_profiles[cluster][j] !== base[j],
            })),
        })),
    };
}
export function histogramView(response) {
    const bars = Object.entries(response.counts)
        .map(([neuron, count]) => ({
        neuron: Number(neuron),
        count,
        fraction: count / response.n_samples, // layout scale only; count is the label
    }))
        .sort((a, b) => a.neuron - b.neuron);
    return { nSamples: response.n_samples, bars, warnings: response.warnings };
}
export function predictionView(response) {
    return {
        rows: response.predictions.map((p) => ({
            caseId: p.case_id,
            best: p.best,
            second: p.second,
            bestDistance: p.best_distance,
            secondDistance: p.second_distance,
        })),
    };
}

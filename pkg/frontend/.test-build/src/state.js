// Client mirror of one server session: the stage bitmap, cached stage
// summaries for rendering, and staleness marks. All analytics come from the
// API; this store only remembers what the server said and which downstream
// views became stale after an upstream rerun.
// What a rerun of each stage invalidates (mirror of the server's rules).
const DOWNSTREAM = {
    data: ["kmeans", "som", "scenario", "prediction"],
    kmeans: ["scenario"],
    som: ["scenario", "prediction"],
    scenario: [],
    prediction: [],
};
export function newSessionView(sessionId) {
    return {
        sessionId,
        flags: { data: false, kmeans: false, som: false, scenario: false, prediction: false },
        stale: new Set(),
    };
}
export function fromServerFlags(sessionId, hasData, flags) {
    const view = newSessionView(sessionId);
    view.flags = { data: hasData, ...flags };
    return view;
}
function invalidateDownstream(view, stage) {
    for (const downstream of DOWNSTREAM[stage]) {
        if (view.flags[downstream])
            view.stale.add(downstream);
        view.flags[downstream] = false;
        if (downstream === "kmeans")
            view.kmeans = undefined;
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
        if (downstream === "prediction")
            view.prediction = undefined;
    }
    // the analyze views pair kmeans with the map; rerunning either stales them
    if (stage === "kmeans" || stage === "som")
        view.namesPlot = undefined;
}
export function applyUpload(view, response) {
    invalidateDownstream(view, "data");
    view.upload = response;
    view.flags.data = true;
    view.stale.delete("data");
}
export function applyKmeans(view, response) {
    invalidateDownstream(view, "kmeans");
    view.kmeans = response;
    view.flags.kmeans = true;
    view.stale.delete("kmeans");
}
export function applySom(view, response) {
    invalidateDownstream(view, "som");
    view.som = response;
    view.somProfiles = undefined;
    view.flags.som = true;
    view.stale.delete("som");
}
export function applyScenarioSetup(view, state) {
    view.scenario = state;
    view.lastRun = undefined;
    view.sensitivity = undefined;
    view.flags.scenario = true;
    view.stale.delete("scenario");
}
export function applyScenarioRun(view, state, run) {
    view.scenario = state;
    view.lastRun = run;
}
export function applyPrediction(view, response) {
    view.prediction = response;
    view.flags.prediction = true;
    view.stale.delete("prediction");
}

// Client-side mirror of the service's stage-order rules. The UI disables
// exactly the actions the server would reject with 409, and for a blocked
// action names the first missing prerequisite the same way the server does.
// Prerequisites in the order the server checks them.
const PREREQUISITES = {
    kmeans: ["data"],
    "kmeans/silhouette": ["kmeans"],
    som: ["data"],
    "som/profiles": ["som"],
    "som/names-plot": ["som", "kmeans"],
    "scenario/setup": ["kmeans", "som"],
    "scenario/run": ["kmeans", "som", "scenario"],
    "scenario/sensitivity": ["kmeans", "som", "scenario"],
    predict: ["som"],
    report: [],
};
/** First missing prerequisite for an action, or null when allowed. */
export function missingPrerequisite(action, state) {
    if (action === "report") {
        // the server rejects an export only when no stage has completed
        const anyStage = state.kmeans || state.som || state.scenario || state.prediction;
        return anyStage ? null : "any completed stage";
    }
    for (const stage of PREREQUISITES[action]) {
        if (!state[stage])
            return stage;
    }
    return null;
}
export function isAllowed(action, state) {
    return missingPrerequisite(action, state) === null;
}
export function gatePrompt(action, state) {
    const missing = missingPrerequisite(action, state);
    if (missing === null)
        return null;
    const labels = {
        data: "upload data",
        kmeans: "run clustering",
        som: "train the map",
        scenario: "press Model Setup",
        "any completed stage": "run at least one analysis stage",
    };
    return `Run the earlier stage first: ${labels[missing] ?? missing}.`;
}

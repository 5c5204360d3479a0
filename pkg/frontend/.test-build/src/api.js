// Thin fetch client for the /v1 API. Every mutation awaits the server
// round trip; there is no optimistic state anywhere in the UI.
export class ApiError extends Error {
    constructor(status, body) {
        super(body.message || `HTTP ${status}`);
        this.status = status;
        this.body = body;
    }
    get code() {
        return this.body.code;
    }
}
export class ApiClient {
    constructor(base = "") {
        this.base = base.replace(/\/$/, "");
    }
    async request(method, path, init) {
        const response = await fetch(`${this.base}/v1${path}`, { method, ...init });
        if (!response.ok) {
            let body = { code: "Unknown", message: response.statusText };
            try {
                const parsed = await response.json();
                if (parsed && parsed.error)
                    body = parsed.error;
            }
            catch {
                /* non-JSON error body */
            }
            throw new ApiError(response.status, body);
        }
        return (await response.json());
    }
    postJson(path, payload) {
        return this.request("POST", path, {
            headers: { "content-type": "application/json" },
            body: JSON.stringify(payload),
        });
    }
    postCsv(path, csv, options) {
        const params = new URLSearchParams();
        if (options.hasHeader === false)
            params.set("has_header", "false");
        if (options.separator)
            params.set("separator", options.separator);
        if (options.idColumn)
            params.set("id_column", options.idColumn);
        if (options.previewRows !== undefined)
            params.set("preview_rows", String(options.previewRows));
        if (options.previewCols !== undefined)
            params.set("preview_cols", String(options.previewCols));
        const query = params.toString();
        return this.request("POST", `${path}${query ? `?${query}` : ""}`, {
            headers: { "content-type": "text/csv" },
            body: csv,
        });
    }
    createSession() {
        return this.request("POST", "/sessions");
    }
    sessionStatus(sid) {
        return this.request("GET", `/sessions/${sid}`);
    }
    uploadData(sid, csv, options = {}) {
        return this.postCsv(`/sessions/${sid}/data`, csv, options);
    }
    runKmeans(sid, params) {
        return this.postJson(`/sessions/${sid}/kmeans`, params);
    }
    silhouette(sid) {
        return this.request("GET", `/sessions/${sid}/kmeans/silhouette`);
    }
    trainSom(sid, params) {
        return this.postJson(`/sessions/${sid}/som`, params);
    }
    somProfiles(sid) {
        return this.request("GET", `/sessions/${sid}/som/profiles`);
    }
    namesPlot(sid) {
        return this.request("GET", `/sessions/${sid}/som/names-plot`);
    }
    scenarioSetup(sid) {
        return this.request("POST", `/sessions/${sid}/scenario/setup`);
    }
    scenarioRun(sid, cluster, edits) {
        return this.postJson(`/sessions/${sid}/scenario/run`, { cluster, edits });
    }
    sensitivity(sid, params) {
        return this.postJson(`/sessions/${sid}/scenario/sensitivity`, params);
    }
    predict(sid, csv, options = {}) {
        return this.postCsv(`/sessions/${sid}/predict`, csv, options);
    }
    reportUrl(sid, format) {
        return `${this.base}/v1/sessions/${sid}/report?format=${format}`;
    }
}

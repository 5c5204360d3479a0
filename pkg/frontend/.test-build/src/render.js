// DOM and SVG builders for the view models. Declarative in the small:
// view model in, detached element out; callers swap it into the page.
export function h(tag, attrs = {}, ...children) {
    const el = document.createElement(tag);
    for (const [key, value] of Object.entries(attrs)) {
        if (typeof value === "function") {
            el.addEventListener(key.replace(/^on/, ""), value);
        }
        else {
            el.setAttribute(key, value);
        }
    }
    for (const child of children) {
        if (child === null || child === undefined)
            continue;
        el.append(child instanceof Node ? child : document.createTextNode(child));
    }
    return el;
}
const SVG_NS = "http://www.w3.org/2000/svg";
function svg(tag, attrs = {}, ...children) {
    const el = document.createElementNS(SVG_NS, tag);
    for (const [key, value] of Object.entries(attrs))
        el.setAttribute(key, value);
    el.append(...children);
    return el;
}
const fmt = (value) => (Number.isInteger(value) ? String(value) : value.toPrecision(5));
export function renderPreviewTable(view) {
    const head = h("tr", {}, h("th", {}, "case"), ...view.columns.map((c) => h("th", {}, c)));
    const body = view.rows.map((row) => h("tr", {}, h("td", { class: "case-id" }, row.caseId), ...row.values.map((v) => h("td", {}, fmt(v)))));
    return h("figure", {}, h("table", { class: "data-table" }, h("thead", {}, head), h("tbody", {}, ...body)), h("figcaption", {}, view.caption));
}
export function renderClusterTable(view) {
    const head = h("tr", {}, h("th", {}, ""), h("th", {}, "size"), ...view.featureNames.map((f) => h("th", {}, f)));
    const rows = view.rows.map((row) => h("tr", { class: row.size === null ? "reference-row" : "" }, h("td", {}, row.label), h("td", {}, row.size === null ? "" : String(row.size)), ...row.values.map((v) => h("td", {}, fmt(v)))));
    const pseudo = view.pseudoF === null ? "undefined (needs 2 <= k < n)" : String(view.pseudoF);
    return h("div", {}, h("table", { class: "data-table" }, h("thead", {}, head), h("tbody", {}, ...rows)), h("p", {}, `within-cluster scatter ${fmt(view.wss)}, pseudo-F ${pseudo}`), ...view.warnings.map((w) => h("p", { class: "warning" }, w)));
}
export function renderSilhouette(view) {
    const barHeight = 6;
    const gap = 14;
    const width = 460;
    const mid = width / 2;
    let y = 0;
    const groups = [];
    for (const cluster of view.clusters) {
        for (const bar of cluster.bars) {
            const length = Math.abs(bar.value) * (width / 2 - 80);
            const x = bar.value >= 0 ? mid : mid - length;
            groups.push(svg("rect", {
                x: String(x), y: String(y), width: String(Math.max(length, 0.5)),
                height: String(barHeight), class: `cluster-fill-${cluster.cluster % 8}`,
            }));
            y += barHeight;
        }
        groups.push(svg("text", {
            x: String(width - 4), y: String(y - (cluster.bars.length * barHeight) / 2 + 3),
            "text-anchor": "end", class: "chart-label",
        }, document.createTextNode(`cluster ${cluster.cluster} (n=${cluster.size}, avg ${cluster.averageWidth.toPrecision(4)})`)));
        y += gap;
    }
    const axis = svg("line", {
        x1: String(mid), y1: "0", x2: String(mid), y2: String(y), class: "chart-axis",
    });
    return h("figure", {}, svg("svg", { viewBox: `0 0 ${width} ${Math.max(y, 10)}`, class: "silhouette-chart" }, axis, ...groups), h("figcaption", {}, `overall average fit ${view.overall.toPrecision(4)} (range -1 to 1)`));
}
export function renderAnova(view) {
    const head = h("tr", {}, h("th", {}, "profile element"), h("th", {}, "F"), h("th", {}, "p"), h("th", {}, "df"));
    const rows = view.rows.map((r) => h("tr", {}, h("td", {}, r.feature), h("td", {}, r.f), h("td", {}, r.p.toPrecision(4)), h("td", {}, r.dfs)));
    return h("table", { class: "data-table" }, h("thead", {}, head), h("tbody", {}, ...rows));
}
/** Grid of quadrant bar-plots, bars centered on the global mean line. */
export function renderGrid(view, highlight = []) {
    const cellSize = 110;
    const cells = view.cells.map((cell) => {
        const barWidth = cellSize / Math.max(cell.bars.length, 1);
        const children = [
            svg("line", {
                x1: "0", y1: String(cellSize / 2), x2: String(cellSize), y2: String(cellSize / 2),
                class: "chart-axis",
            }),
        ];
        if (!cell.empty) {
            cell.bars.forEach((bar, j) => {
                const scale = view.maxAbsDeviation || 1;
                const height = (Math.abs(bar.deviation) / scale) * (cellSize / 2 - 6);
                const yTop = bar.deviation >= 0 ? cellSize / 2 - height : cellSize / 2;
                children.push(svg("rect", {
                    x: String(j * barWidth + 2), y: String(yTop),
                    width: String(Math.max(barWidth - 4, 1)), height: String(Math.max(height, 0.5)),
                    class: `feature-fill-${j % 8}`,
                }, svg("title", {}, document.createTextNode(`${bar.feature}: ${bar.weight.toPrecision(5)} (dev ${bar.deviation.toPrecision(4)})`))));
            });
        }
        const classes = ["grid-cell"];
        if (cell.empty)
            classes.push("empty-cell");
        if (highlight.includes(cell.neuron))
            classes.push("highlight-cell");
        return h("div", { class: classes.join(" "), "data-neuron": String(cell.neuron) }, svg("svg", { viewBox: `0 0 ${cellSize} ${cellSize}`, class: "cell-chart" }, ...children), h("span", { class: "cell-tag" }, cell.empty ? `${cell.neuron} (empty)` : `${cell.neuron} (n=${cell.caseCount})`));
    });
    const grid = h("div", { class: "som-grid" }, ...cells);
    grid.style.gridTemplateColumns = `repeat(${view.cols}, 1fr)`;
    return grid;
}
export function renderNames(view) {
    const cells = view.cells.map((cell) => h("div", { class: "grid-cell names-cell" }, ...cell.shown.map((label) => h("span", { class: "name-label" }, label)), cell.overflow > 0 ? h("span", { class: "overflow-tag" }, `+${cell.overflow} more`) : null));
    const grid = h("div", { class: "som-grid" }, ...cells);
    grid.style.gridTemplateColumns = `repeat(${view.cols}, 1fr)`;
    return grid;
}
export function renderScenarioTable(view, onEdit) {
    const head = h("tr", {}, h("th", {}, "cluster"), h("th", {}, "quadrant"), ...view.featureNames.map((f) => h("th", {}, f)));
    const rows = view.clusters.map((cluster) => h("tr", {}, h("td", {}, `cluster ${cluster.cluster}`), h("td", {}, cluster.baseBmu === cluster.currentBmu
        ? String(cluster.currentBmu)
        : `${cluster.baseBmu} -> ${cluster.currentBmu}`), ...cluster.cells.map((cell) => {
        const input = h("input", {
            type: "text",
            value: String(cell.edited),
            class: cell.changed ? "edited-cell" : "",
            "data-cluster": String(cluster.cluster),
            "data-feature": cell.feature,
            onchange: (event) => {
                const target = event.target;
                onEdit(cluster.cluster, cell.feature, target.value);
            },
        });
        input.title = `base value ${cell.base}`;
        return h("td", {}, input);
    })));
    return h("table", { class: "data-table scenario-table" }, h("thead", {}, head), h("tbody", {}, ...rows));
}
export function renderHistogram(view) {
    const width = 380;
    const height = 140;
    const barWidth = width / Math.max(view.bars.length, 1);
    const shapes = view.bars.flatMap((bar, i) => [
        svg("rect", {
            x: String(i * barWidth + 6), y: String(height - bar.fraction * (height - 24)),
            width: String(Math.max(barWidth - 12, 2)),
            height: String(Math.max(bar.fraction * (height - 24), 0.5)),
            class: "histogram-fill",
        }),
        svg("text", {
            x: String(i * barWidth + barWidth / 2), y: String(height + 12),
            "text-anchor": "middle", class: "chart-label",
        }, document.createTextNode(`q${bar.neuron}`)),
        svg("text", {
            x: String(i * barWidth + barWidth / 2),
            y: String(height - bar.fraction * (height - 24) - 4),
            "text-anchor": "middle", class: "chart-label",
        }, document.createTextNode(String(bar.count))),
    ]);
    return h("figure", {}, svg("svg", { viewBox: `0 0 ${width} ${height + 18}`, class: "histogram-chart" }, ...shapes), h("figcaption", {}, `quadrant frequencies over ${view.nSamples} samples`), ...view.warnings.map((w) => h("p", { class: "warning" }, w)));
}
export function renderPrediction(view) {
    const head = h("tr", {}, h("th", {}, "case"), h("th", {}, "best quadrant"), h("th", {}, "second best"), h("th", {}, "distance"), h("th", {}, "second distance"));
    const rows = view.rows.map((r) => h("tr", {}, h("td", {}, r.caseId), h("td", {}, String(r.best)), h("td", {}, String(r.second)), h("td", {}, r.bestDistance.toPrecision(5)), h("td", {}, r.secondDistance.toPrecision(5))));
    return h("table", { class: "data-table" }, h("thead", {}, head), h("tbody", {}, ...rows));
}
export function errorBanner(message, detail) {
    return h("div", { class: "error-banner" }, h("strong", {}, message), detail ? h("p", {}, detail) : null);
}

"""Static plot rendering for report exports (headless matplotlib).

Each renderer consumes report-section data, not live models, so anything a
plot shows is also in the exported tables.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

CLUSTER_CMAP = plt.get_cmap("tab10")
MAX_CELL_LABELS = 8


def silhouette_plot(kmeans_section: dict, path: str | Path) -> None:
    """Per-cluster horizontal silhouette bars with average widths."""
    sil = kmeans_section.get("silhouette")
    if sil is None:
        return
    values = np.asarray(sil["per_case"])
    clusters = np.asarray([a["cluster"] for a in kmeans_section["assignments"]])
    k = kmeans_section["k"]

    fig, ax = plt.subplots(figsize=(7, max(3, 0.18 * values.size + k * 0.4)))
    y = 0
    yticks, ylabels = [], []
    for c in range(k):
        member = np.sort(values[clusters == c])[::-1]
        ys = np.arange(y, y + member.size)
        ax.barh(ys, member, height=1.0, color=CLUSTER_CMAP(c % 10), edgecolor="none")
        yticks.append(y + member.size / 2)
        ylabels.append(
            f"cluster {c} (n={member.size}, avg {sil['cluster_means'][c]:.3f})"
        )
        y += member.size + 2
    ax.set_yticks(yticks, ylabels)
    ax.set_xlim(-1, 1)
    ax.axvline(0, color="grey", lw=0.8)
    ax.invert_yaxis()
    ax.set_xlabel(f"silhouette width (overall average {sil['overall']:.3f})")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def som_barplot(som_section: dict, path: str | Path) -> None:
    """Grid of per-quadrant bars, centered on the global feature means."""
    rows = som_section["parameters"]["grid_rows"]
    cols = som_section["parameters"]["grid_cols"]
    profiles = som_section["quadrant_profiles"]
    m = len(som_section["feature_names"])
    deviations = np.asarray([p["deviation"] for p in profiles])
    span = max(1e-9, float(np.abs(deviations).max()))

    fig, axes = plt.subplots(rows, cols, figsize=(2.2 * cols, 1.8 * rows), squeeze=False)
    for p in profiles:
        ax = axes[p["row"]][p["col"]]
        if p["empty"]:
            ax.set_facecolor("#dddddd")
        else:
            ax.bar(
                np.arange(m),
                p["deviation"],
                color=[CLUSTER_CMAP(j % 10) for j in range(m)],
            )
        ax.axhline(0, color="grey", lw=0.8)
        ax.set_ylim(-1.1 * span, 1.1 * span)
        ax.set_xticks([])
        ax.set_yticks([])
        ax.set_title(f"{p['neuron']} (n={p['case_count']})", fontsize=7)
    fig.suptitle("quadrant profiles, bars centered on global mean", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def som_names_plot(
    cells: list[list[str]], grid_rows: int, grid_cols: int, path: str | Path
) -> None:
    """Cluster-case labels placed on their BMU cells; long lists overflow
    into a "+N more" marker."""
    fig, ax = plt.subplots(figsize=(2.0 * grid_cols, 1.6 * grid_rows))
    ax.set_xlim(0, grid_cols)
    ax.set_ylim(0, grid_rows)
    for r in range(grid_rows + 1):
        ax.axhline(r, color="grey", lw=0.6)
    for c in range(grid_cols + 1):
        ax.axvline(c, color="grey", lw=0.6)
    for neuron, labels in enumerate(cells):
        r, c = divmod(neuron, grid_cols)
        shown = labels[:MAX_CELL_LABELS]
        if len(labels) > MAX_CELL_LABELS:
            shown.append(f"+{len(labels) - MAX_CELL_LABELS} more")
        ax.text(
            c + 0.5,
            grid_rows - r - 0.5,
            "\n".join(shown) if shown else "",
            ha="center",
            va="center",
            fontsize=6,
        )
    ax.set_xticks([])
    ax.set_yticks([])
    ax.set_title("cluster-case labels per quadrant", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def som_boxplot(som_section: dict, path: str | Path) -> None:
    """Per-feature boxplots of case values across nonempty quadrants
    (Tukey 1.5 IQR whiskers, precomputed)."""
    features = som_section["feature_names"]
    rows = som_section["boxplot"]
    fig, axes = plt.subplots(
        len(features), 1, figsize=(7, 2.2 * len(features)), squeeze=False
    )
    for j, feature in enumerate(features):
        ax = axes[j][0]
        stats = []
        for entry in rows:
            if entry["feature"] != feature:
                continue
            stats.append(
                {
                    "label": str(entry["neuron"]),
                    "med": entry["median"],
                    "q1": entry["q1"],
                    "q3": entry["q3"],
                    "whislo": entry["whisker_low"],
                    "whishi": entry["whisker_high"],
                    "fliers": entry["outliers"],
                }
            )
        ax.bxp(stats, showfliers=True)
        ax.set_ylabel(feature, fontsize=8)
        ax.set_xlabel("quadrant", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_report_plots(report_dict: dict, directory: str | Path) -> list[Path]:
    """Emit every plot supported by the report's present sections."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    km = report_dict.get("kmeans")
    if km is not None and km.get("silhouette"):
        target = directory / "silhouette.png"
        silhouette_plot(km, target)
        written.append(target)

    som = report_dict.get("som")
    if som is not None:
        target = directory / "som_barplot.png"
        som_barplot(som, target)
        written.append(target)
        target = directory / "som_boxplot.png"
        som_boxplot(som, target)
        written.append(target)

    if km is not None and som is not None:
        cells: list[list[str]] = [[] for _ in som["quadrant_profiles"]]
        cluster_by_case = {a["case_id"]: a["cluster"] for a in km["assignments"]}
        for a in som["assignments"]:
            cells[a["neuron"]].append(f"{cluster_by_case[a['case_id']]}-{a['case_id']}")
        target = directory / "som_names.png"
        som_names_plot(
            cells,
            som["parameters"]["grid_rows"],
            som["parameters"]["grid_cols"],
            target,
        )
        written.append(target)

    return written

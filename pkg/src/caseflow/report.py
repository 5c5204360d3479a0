"""Adaptive result export: a section per stage actually run, nothing else.

Two formats come out of one :class:`SessionReport`: a versioned JSON bundle
(strict JSON; non-finite statistics carried as "Infinity" markers) and a zip
archive with one CSV per table. The JSON round-trips float-exactly.
"""

from __future__ import annotations

import csv
import io
import json
import zipfile
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from ._json import encode_float
from .dataset import CaseDataset, dataset_fingerprint
from .errors import NothingToExport
from .kmeans import KMeansResult
from .session import Session
from .som import SomModel, quadrant_profiles

REPORT_VERSION = 1


@dataclass(frozen=True)
class SessionReport:
    """Plain-data report; sections are JSON-ready dicts or absent (None)."""

    metadata: dict
    kmeans: dict | None = None
    som: dict | None = None
    scenario: dict | None = None
    prediction: dict | None = None

    def sections_present(self) -> dict[str, bool]:
        return {
            "kmeans": self.kmeans is not None,
            "som": self.som is not None,
            "scenario": self.scenario is not None,
            "prediction": self.prediction is not None,
        }

    def to_dict(self) -> dict:
        out: dict = {"report_version": REPORT_VERSION, "metadata": self.metadata}
        for name in ("kmeans", "som", "scenario", "prediction"):
            section = getattr(self, name)
            if section is not None:
                out[name] = section
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "SessionReport":
        if d.get("report_version") != REPORT_VERSION:
            raise ValueError(f"unsupported report version: {d.get('report_version')}")
        return cls(
            metadata=d["metadata"],
            kmeans=d.get("kmeans"),
            som=d.get("som"),
            scenario=d.get("scenario"),
            prediction=d.get("prediction"),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=False)

    @classmethod
    def from_json(cls, text: str) -> "SessionReport":
        return cls.from_dict(json.loads(text))


# --- section builders ---------------------------------------------------------

def kmeans_section(result: KMeansResult, data: CaseDataset) -> dict:
    global_mean = [float(v) for v in data.values.mean(axis=0)]
    profiles = [
        {
            "cluster": c,
            "size": result.cluster_sizes[c],
            "centroid": list(result.centroids[c]),
        }
        for c in range(result.k)
    ]
    section = {
        "k": result.k,
        "seed": result.seed,
        "n_init": result.n_init,
        "scale_data": result.scale_data,
        "feature_names": list(data.feature_names),
        "profiles": profiles,
        "global_mean": global_mean,
        "wss": result.wss,
        "pseudo_f": encode_float(result.pseudo_f),
        "assignments": [
            {"case_id": cid, "cluster": c}
            for cid, c in zip(data.case_ids, result.assignments)
        ],
        "warnings": list(result.warnings),
    }
    if result.silhouette is not None:
        section["silhouette"] = {
            "per_case": list(result.silhouette),
            "cluster_means": list(result.silhouette_cluster_means),
            "overall": result.silhouette_overall,
        }
    return section


def _tukey_box(values: np.ndarray) -> dict:
    q1, med, q3 = (float(v) for v in np.percentile(values, [25, 50, 75]))
    iqr = q3 - q1
    lo_fence = q1 - 1.5 * iqr
    hi_fence = q3 + 1.5 * iqr
    inside = values[(values >= lo_fence) & (values <= hi_fence)]
    outliers = values[(values < lo_fence) | (values > hi_fence)]
    return {
        "q1": q1,
        "median": med,
        "q3": q3,
        "whisker_low": float(inside.min()),
        "whisker_high": float(inside.max()),
        "outliers": [float(v) for v in outliers],
    }


def som_section(model: SomModel, data: CaseDataset) -> dict:
    profiles = [p.to_dict() for p in quadrant_profiles(model)]
    assignments = np.asarray(model.assignments)
    boxplot = []
    for j, feature in enumerate(model.feature_names):
        for neuron in sorted(set(int(a) for a in assignments)):
            member = data.values[assignments == neuron, j]
            boxplot.append(
                {"feature": feature, "neuron": neuron, **_tukey_box(member)}
            )
    return {
        "parameters": model.config.to_dict(),
        "scaling": model.scaling.to_dict(),
        "feature_names": list(model.feature_names),
        "quantization_error": model.quantization_error,
        "topographic_error": model.topographic_error,
        "anova": [row.to_dict() for row in model.anova],
        "quadrant_profiles": profiles,
        "assignments": [
            {"case_id": cid, "neuron": int(n)}
            for cid, n in zip(model.case_ids, model.assignments)
        ],
        "barplot": {
            "global_mean": list(model.scaling.mean),
            "grid_rows": model.config.grid_rows,
            "grid_cols": model.config.grid_cols,
        },
        "boxplot": boxplot,
        "warnings": list(model.warnings),
    }


def _scenario_section(session: Session) -> dict:
    return {
        "state": session.scenario.to_dict(),
        "runs": [r.to_dict() for r in session.scenario_runs],
        "sensitivities": [h.to_dict() for h in session.sensitivities],
    }


def _prediction_section(session: Session) -> dict:
    return {
        "new_data": session.prediction_data.to_dict(),
        "predictions": session.prediction.to_dict()["predictions"],
    }


def generate_report(session: Session, *, timestamp: str | None = None) -> SessionReport:
    """Assemble a report containing exactly the sections whose stage ran."""
    flags = session.stage_flags()
    if not any(flags.values()):
        raise NothingToExport("no completed stage to export")
    from caseflow import __version__

    metadata = {
        "timestamp": timestamp
        or datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "tool_version": __version__,
        "dataset_fingerprint": (
            dataset_fingerprint(session.dataset) if session.dataset is not None else None
        ),
    }
    return SessionReport(
        metadata=metadata,
        kmeans=(
            kmeans_section(session.kmeans, session.dataset) if flags["kmeans"] else None
        ),
        som=som_section(session.som, session.dataset) if flags["som"] else None,
        scenario=_scenario_section(session) if flags["scenario"] else None,
        prediction=_prediction_section(session) if flags["prediction"] else None,
    )


# --- CSV archive ---------------------------------------------------------------

def _csv_bytes(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _archive_tables(report: SessionReport) -> dict[str, str]:
    """File name -> CSV text, one file per table. Names are part of the
    export contract (see README)."""
    tables: dict[str, str] = {}
    meta = report.metadata
    tables["metadata.csv"] = _csv_bytes(
        ["key", "value"], [[k, meta[k]] for k in sorted(meta)]
    )

    if report.kmeans is not None:
        km = report.kmeans
        features = km["feature_names"]
        rows = [
            [p["cluster"], p["size"], *p["centroid"]] for p in km["profiles"]
        ]
        rows.append(["global_mean", len(km["assignments"]), *km["global_mean"]])
        tables["kmeans_profiles.csv"] = _csv_bytes(["cluster", "size", *features], rows)
        sil = km.get("silhouette")
        tables["kmeans_assignments.csv"] = _csv_bytes(
            ["case_id", "cluster", "silhouette"],
            [
                [a["case_id"], a["cluster"], sil["per_case"][i] if sil else ""]
                for i, a in enumerate(km["assignments"])
            ],
        )
        quality_rows = [["wss", km["wss"]], ["pseudo_f", km["pseudo_f"]]]
        if sil:
            quality_rows.append(["silhouette_overall", sil["overall"]])
            for c, v in enumerate(sil["cluster_means"]):
                quality_rows.append([f"silhouette_cluster_{c}", v])
        tables["kmeans_quality.csv"] = _csv_bytes(["metric", "value"], quality_rows)

    if report.som is not None:
        som = report.som
        features = som["feature_names"]
        tables["som_parameters.csv"] = _csv_bytes(
            ["parameter", "value"],
            [[k, v] for k, v in som["parameters"].items()]
            + [["scaling_enabled", som["scaling"]["enabled"]]],
        )
        tables["som_quality.csv"] = _csv_bytes(
            ["metric", "value"],
            [
                ["quantization_error", som["quantization_error"]],
                ["topographic_error", som["topographic_error"]],
            ],
        )
        tables["som_anova.csv"] = _csv_bytes(
            ["feature", "f", "p", "df_between", "df_within"],
            [
                [r["feature"], r["f"], r["p"], r["df_between"], r["df_within"]]
                for r in som["anova"]
            ],
        )
        tables["som_quadrant_profiles.csv"] = _csv_bytes(
            ["neuron", "row", "col", "case_count", "empty",
             *features, *[f"deviation_{f}" for f in features]],
            [
                [p["neuron"], p["row"], p["col"], p["case_count"], p["empty"],
                 *p["weights_raw"], *p["deviation"]]
                for p in som["quadrant_profiles"]
            ],
        )
        tables["som_assignments.csv"] = _csv_bytes(
            ["case_id", "neuron"],
            [[a["case_id"], a["neuron"]] for a in som["assignments"]],
        )
        tables["som_boxplot.csv"] = _csv_bytes(
            ["feature", "neuron", "q1", "median", "q3",
             "whisker_low", "whisker_high", "outliers"],
            [
                [b["feature"], b["neuron"], b["q1"], b["median"], b["q3"],
                 b["whisker_low"], b["whisker_high"],
                 ";".join(str(v) for v in b["outliers"])]
                for b in som["boxplot"]
            ],
        )

    if report.scenario is not None:
        sc = report.scenario
        features = sc["state"]["feature_names"]
        rows = []
        for c, (base, edited) in enumerate(
            zip(sc["state"]["base_profiles"], sc["state"]["edited_profiles"])
        ):
            rows.append([c, "base", sc["state"]["base_bmu"][c], *base])
            rows.append([c, "edited", sc["state"]["current_bmu"][c], *edited])
        tables["scenario_profiles.csv"] = _csv_bytes(
            ["cluster", "kind", "bmu", *features], rows
        )
        tables["scenario_runs.csv"] = _csv_bytes(
            ["run", "cluster", "old_bmu", "new_bmu", "moved", "edits"],
            [
                [i, r["cluster"], r["old_bmu"], r["new_bmu"], r["moved"],
                 ";".join(f"{k}={v}" for k, v in r["edits"].items())]
                for i, r in enumerate(sc["runs"])
            ],
        )
        tables["scenario_sensitivity.csv"] = _csv_bytes(
            ["analysis", "cluster", "n_samples", "seed", "neuron", "count"],
            [
                [i, h["cluster"], h["n_samples"], h["seed"], neuron, count]
                for i, h in enumerate(sc["sensitivities"])
                for neuron, count in h["counts"].items()
            ],
        )

    if report.prediction is not None:
        tables["prediction.csv"] = _csv_bytes(
            ["case_id", "best", "second", "best_distance", "second_distance"],
            [
                [p["case_id"], p["best"], p["second"],
                 p["best_distance"], p["second_distance"]]
                for p in report.prediction["predictions"]
            ],
        )

    return tables


def report_zip_bytes(report: SessionReport) -> bytes:
    """Zip of one CSV per table, plus the JSON bundle itself."""
    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w", zipfile.ZIP_DEFLATED) as zf:
        for name, text in _archive_tables(report).items():
            zf.writestr(name, text)
        zf.writestr("report.json", report.to_json())
    return buf.getvalue()

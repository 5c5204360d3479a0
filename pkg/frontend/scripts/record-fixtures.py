#!/usr/bin/env python3
"""Record real API responses as test fixtures for the UI contract tests.

Drives the actual service app end-to-end on the two-clouds dataset and
captures every payload the UI renders, plus the observed stage-gating
matrix (one fresh session per probe, so successful calls cannot leak state
between probes). Rerun after any API change:

    python3 scripts/record-fixtures.py
"""

import json
import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[2] / "tests"))

from fastapi.testclient import TestClient

from caseflow.dataset import serialize_csv
from caseflow.service import create_app
from conftest import make_clouds

FIXTURES = Path(__file__).resolve().parents[1] / "tests" / "fixtures"

KMEANS = {"k": 2, "seed": 1, "n_init": 5}
SOM = {"grid_rows": 1, "grid_cols": 2, "iterations": 2000, "seed": 3}

ENDPOINTS = [
    ("kmeans", "POST", "/kmeans", KMEANS),
    ("kmeans/silhouette", "GET", "/kmeans/silhouette", None),
    ("som", "POST", "/som", SOM),
    ("som/profiles", "GET", "/som/profiles", None),
    ("som/names-plot", "GET", "/som/names-plot", None),
    ("scenario/setup", "POST", "/scenario/setup", None),
    ("scenario/run", "POST", "/scenario/run", {"cluster": 0, "edits": {}}),
    ("scenario/sensitivity", "POST", "/scenario/sensitivity",
     {"cluster": 0, "deviation": {}, "n_samples": 10, "seed": 0}),
    ("predict", "POST", "/predict", "csv"),
    ("report", "GET", "/report", None),
]

STATES = ["empty", "data", "data+kmeans", "data+som", "data+kmeans+som",
          "data+kmeans+som+scenario"]


def prepare(client: TestClient, csv: str, state: str) -> str:
    sid = client.post("/v1/sessions").json()["session_id"]
    if state == "empty":
        return sid
    client.post(f"/v1/sessions/{sid}/data", content=csv,
                params={"id_column": "id"}, headers={"content-type": "text/csv"})
    if "kmeans" in state:
        client.post(f"/v1/sessions/{sid}/kmeans", json=KMEANS)
    if "som" in state:
        client.post(f"/v1/sessions/{sid}/som", json=SOM)
    if "scenario" in state:
        client.post(f"/v1/sessions/{sid}/scenario/setup")
    return sid


def probe(client: TestClient, sid: str, method: str, path: str, payload, csv: str):
    url = f"/v1/sessions/{sid}{path}"
    if method == "GET":
        return client.get(url)
    if payload == "csv":
        return client.post(url, content=csv, params={"id_column": "id"},
                           headers={"content-type": "text/csv"})
    if payload is None:
        return client.post(url)
    return client.post(url, json=payload)


def record_gating(client: TestClient, csv: str) -> dict:
    matrix = {}
    for state in STATES:
        rows = {}
        for name, method, path, payload in ENDPOINTS:
            sid = prepare(client, csv, state)  # fresh session per probe
            response = probe(client, sid, method, path, payload, csv)
            entry = {"status": response.status_code}
            if response.status_code in (409, 422):
                error = response.json().get("error", {})
                entry["code"] = error.get("code")
                entry["missing"] = error.get("missing")
            rows[name] = entry
        matrix[state] = rows
    return matrix


def record_payloads(client: TestClient, csv: str) -> dict:
    sid = client.post("/v1/sessions").json()["session_id"]
    out = {}
    out["data"] = client.post(
        f"/v1/sessions/{sid}/data", content=csv,
        params={"id_column": "id", "preview_rows": 5},
        headers={"content-type": "text/csv"},
    ).json()
    out["kmeans"] = client.post(f"/v1/sessions/{sid}/kmeans", json=KMEANS).json()
    out["silhouette"] = client.get(f"/v1/sessions/{sid}/kmeans/silhouette").json()
    out["som"] = client.post(f"/v1/sessions/{sid}/som", json=SOM).json()
    out["som_profiles"] = client.get(f"/v1/sessions/{sid}/som/profiles").json()
    out["names_plot"] = client.get(f"/v1/sessions/{sid}/som/names-plot").json()
    out["scenario_state"] = client.post(f"/v1/sessions/{sid}/scenario/setup").json()
    out["scenario_run"] = client.post(
        f"/v1/sessions/{sid}/scenario/run",
        json={"cluster": 0, "edits": {"f1": 9.0, "f2": 9.5}},
    ).json()
    out["sensitivity"] = client.post(
        f"/v1/sessions/{sid}/scenario/sensitivity",
        json={"cluster": 0, "deviation": {"f1": 0.5, "f2": 0.5},
              "n_samples": 300, "seed": 7},
    ).json()
    out["prediction"] = client.post(
        f"/v1/sessions/{sid}/predict",
        content="id,f1,f2\nn1,9.5,10.2\nn2,0.3,-0.4\n",
        params={"id_column": "id"},
        headers={"content-type": "text/csv"},
    ).json()
    out["session_status"] = client.get(f"/v1/sessions/{sid}").json()

    # error payloads the UI must explain, on a throwaway session
    sid2 = prepare(client, csv, "data+som")
    out["parse_error"] = client.post(
        f"/v1/sessions/{sid2}/data", content="a,b\n1,x\n3,4",
        headers={"content-type": "text/csv"},
    ).json()
    sid3 = prepare(client, csv, "data+som")
    out["schema_error"] = client.post(
        f"/v1/sessions/{sid3}/predict",
        content="id,f1,intruder\nn1,1,2\n",
        params={"id_column": "id"},
        headers={"content-type": "text/csv"},
    ).json()
    return out


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    csv = serialize_csv(make_clouds())
    with tempfile.TemporaryDirectory() as tmp:
        with TestClient(create_app(session_dir=tmp)) as client:
            gating = record_gating(client, csv)
            payloads = record_payloads(client, csv)
    for name, payload in payloads.items():
        (FIXTURES / f"{name}.json").write_text(json.dumps(payload, indent=2))
    (FIXTURES / "gating.json").write_text(json.dumps(gating, indent=2))
    (FIXTURES / "cases.csv").write_text(csv)
    print(f"recorded {len(payloads) + 1} fixtures into {FIXTURES}")


if __name__ == "__main__":
    main()

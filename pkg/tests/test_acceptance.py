"""Acceptance suite: every exit criterion at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS/FAIL line
per criterion.
"""

import itertools
import json
import math
import time
from contextlib import contextmanager

import numpy as np
import pytest
from fastapi.testclient import TestClient

from caseflow.anova import f_sf, one_way_f
from caseflow.cli import main as cli_main
from caseflow.dataset import CaseDataset, serialize_csv
from caseflow.errors import SchemaMismatch
from caseflow.kmeans import run_kmeans
from caseflow.predict import classify, validate_schema
from caseflow.report import SessionReport, generate_report
from caseflow.scaling import ScalingParams
from caseflow.scenario import SensitivitySpec, run_scenario, sensitivity, setup
from caseflow.service import create_app
from caseflow.session import Session
from caseflow.som import SomConfig, SomModel, topographic_error, train_som

from conftest import make_clouds, random_dataset
from oracles import (
    brute_pseudo_f,
    brute_silhouette,
    exhaustive_min_wss,
    f_upper_tail_by_quadrature,
)


@contextmanager
def criterion(name: str):
    try:
        yield
    except Exception:
        print(f"ACCEPTANCE {name}: FAIL")
        raise
    print(f"ACCEPTANCE {name}: PASS")


def dataset_from(values, names=None):
    values = np.asarray(values, dtype=float)
    return CaseDataset(
        case_ids=tuple(str(i + 1) for i in range(values.shape[0])),
        feature_names=tuple(names or (f"v{j}" for j in range(values.shape[1]))),
        values=values,
    )


FOUR_POINTS = dataset_from(
    [[0.0, 0.0], [0.0, 1.0], [10.0, 0.0], [10.0, 1.0]], names=("x", "y")
)


def test_kmeans_optimality_oracle():
    """25 random desk-scale datasets: best-of-20 restarts hits the exhaustive
    global minimum within 1e-9, in under 5 seconds total."""
    with criterion("kmeans-optimality-oracle"):
        rng = np.random.default_rng(12345)
        started = time.perf_counter()
        for trial in range(25):
            n = int(rng.integers(4, 9))
            m = int(rng.integers(1, 4))
            k = int(rng.integers(1, min(3, n) + 1))
            ds = random_dataset(rng, n, m)
            result = run_kmeans(ds, k=k, seed=trial, n_init=20)
            assert abs(result.wss - exhaustive_min_wss(ds.values, k)) <= 1e-9
        elapsed = time.perf_counter() - started
        assert elapsed < 5.0, f"took {elapsed:.2f}s"


def test_silhouette_correctness():
    """Fixture value 0.9002 +-1e-4 vs the hand/oracle computation; range and
    averaging semantics on 100 random datasets."""
    with criterion("silhouette-correctness"):
        result = run_kmeans(FOUR_POINTS, k=2, seed=7, n_init=10)
        oracle = brute_silhouette(FOUR_POINTS.values, result.assignments)
        hand = ((10 + math.sqrt(101)) / 2 - 1) / ((10 + math.sqrt(101)) / 2)
        for s, o in zip(result.silhouette, oracle):
            assert abs(s - o) <= 1e-12
            assert abs(s - hand) <= 1e-4
            assert abs(s - 0.9002) <= 1e-4

        rng = np.random.default_rng(777)
        for _ in range(100):
            n = int(rng.integers(4, 16))
            k = int(rng.integers(2, min(4, n) + 1))
            ds = random_dataset(rng, n, int(rng.integers(1, 4)))
            r = run_kmeans(ds, k=k, seed=int(rng.integers(10_000)), n_init=5)
            s = np.asarray(r.silhouette)
            assert np.all(s >= -1.0) and np.all(s <= 1.0)
            labels = np.asarray(r.assignments)
            # per-cluster average width and overall average derive exactly
            # from the per-case values
            for c in range(k):
                assert r.silhouette_cluster_means[c] == s[labels == c].mean()
            assert r.silhouette_overall == s.mean()


def test_pseudo_f_oracle():
    """Fixture value 200 +-1e-9; brute-force scatter agreement on 25 random
    datasets."""
    with criterion("pseudo-f-oracle"):
        result = run_kmeans(FOUR_POINTS, k=2, seed=7, n_init=10)
        assert abs(result.pseudo_f - 200.0) <= 1e-9

        rng = np.random.default_rng(4242)
        for _ in range(25):
            n = int(rng.integers(5, 14))
            k = int(rng.integers(2, min(4, n - 1) + 1))
            ds = random_dataset(rng, n, int(rng.integers(1, 4)))
            r = run_kmeans(ds, k=k, seed=int(rng.integers(10_000)), n_init=5)
            assert r.pseudo_f == pytest.approx(
                brute_pseudo_f(ds.values, r.assignments), rel=1e-12
            )


def test_som_behavior():
    """(a) seed determinism, (b) degenerate convergence, (c) 1-D ordering,
    (d) topographic error on constructed fixtures."""
    with criterion("som-behavior"):
        clouds = make_clouds()
        config = SomConfig(grid_rows=2, grid_cols=2, iterations=2000, seed=9)
        assert train_som(clouds, config).to_json() == train_som(clouds, config).to_json()

        identical = dataset_from([[3.0, -2.0]] * 8)
        model = train_som(
            identical, SomConfig(grid_rows=2, grid_cols=2, iterations=80, seed=1)
        )
        assert model.quantization_error < 1e-6

        ordered = 0
        for seed in range(10):
            rng = np.random.default_rng(900 + seed)
            t = rng.uniform(0, 10, 50)
            ds = dataset_from(np.column_stack([t, 2 * t + 1.0]))
            m = train_som(
                ds, SomConfig(grid_rows=1, grid_cols=5, iterations=5000, seed=seed)
            )
            proj = m.weights @ np.array([1.0, 2.0])
            d = np.diff(proj)
            ordered += bool(np.all(d > 0) or np.all(d < 0))
        assert ordered >= 9, f"ordering held for {ordered}/10 seeds"

        def handmade(weights, rows, cols, cases):
            weights = np.asarray(weights, dtype=float)
            cases = np.asarray(cases, dtype=float)
            m = weights.shape[1]
            diff = cases[:, None, :] - weights[None, :, :]
            assignments = tuple(
                int(a) for a in np.argmin((diff**2).sum(axis=2), axis=1)
            )
            return SomModel(
                config=SomConfig(grid_rows=rows, grid_cols=cols,
                                 iterations=max(len(cases), 2)),
                scaling=ScalingParams((0.0,) * m, (1.0,) * m, enabled=False),
                weights=weights,
                case_ids=tuple(str(i) for i in range(len(cases))),
                feature_names=tuple(f"v{j}" for j in range(m)),
                assignments=assignments,
                quantization_error=0.0,
                topographic_error=0.0,
                anova=(),
                feature_min=tuple(cases.min(axis=0)),
                feature_max=tuple(cases.max(axis=0)),
            )

        # 1x2 grid: the only two neurons are adjacent -> error 0
        zero_model = handmade([[0.0], [1.0]], 1, 2, [[0.2], [0.9]])
        zero_data = dataset_from([[0.2], [0.9]])
        te0 = topographic_error(zero_model, zero_data)
        assert te0 == 0.0

        # 5x5 grid, two nearest neurons at opposite corners -> error 1
        corner_weights = np.full((25, 2), 100.0)
        corner_weights[0] = [0.0, 0.0]
        corner_weights[24] = [1.0, 1.0]
        one_model = handmade(corner_weights, 5, 5, [[0.4, 0.4]])
        te1 = topographic_error(one_model, dataset_from([[0.4, 0.4]]))
        assert te1 == 1.0

        # 1 of 4 cases lands on a non-adjacent pair -> error 0.25
        quarter_weights = np.full((25, 2), 100.0)
        quarter_weights[0] = [0.0, 0.0]
        quarter_weights[1] = [1.0, 0.0]
        quarter_weights[24] = [3.0, 0.0]
        cases = [[0.1, 0.0], [0.2, 0.0], [0.9, 0.0], [1.9, 0.0]]
        quarter_model = handmade(quarter_weights, 5, 5, cases)
        te25 = topographic_error(quarter_model, dataset_from(cases))
        assert te25 == 0.25
        for te in (te0, te25, te1):
            assert 0.0 <= te <= 1.0


def test_anova_criteria():
    """Fixture F=8/p~0.1056; constant feature F=0/p=1; quadrature agreement
    on 10 (df_b, df_w, F) triples to 1e-6."""
    with criterion("anova"):
        f, p, df_b, df_w = one_way_f(
            np.array([1.0, 2.0, 3.0, 4.0]), np.array([0, 0, 1, 1])
        )
        assert f == pytest.approx(8.0, abs=1e-12)
        assert abs(p - 0.1056) <= 1e-4
        assert (df_b, df_w) == (1, 2)

        f, p, *_ = one_way_f(np.array([7.0] * 6), np.array([0, 0, 0, 1, 1, 1]))
        assert f == 0.0 and p == 1.0

        triples = [
            (1, 2, 8.0), (2, 10, 3.5), (3, 20, 2.0), (5, 5, 1.0), (1, 1, 4.0),
            (4, 40, 2.5), (2, 2, 99.0), (6, 12, 0.5), (10, 30, 1.7), (3, 3, 5.0),
        ]
        for d1, d2, fv in triples:
            assert abs(f_sf(fv, d1, d2) - f_upper_tail_by_quadrature(fv, d1, d2)) <= 1e-6


def test_scenario_semantics():
    """d=0 concentration, count conservation, fixture BMU movement, seed
    reproducibility."""
    with criterion("scenario-semantics"):
        clouds = make_clouds()
        model = train_som(clouds, SomConfig(grid_rows=1, grid_cols=2,
                                            iterations=2000, seed=3))
        clustering = run_kmeans(clouds, k=2, seed=1, n_init=5)
        state = setup(model, clustering)
        assert set(state.base_bmu) == {0, 1}

        # cross-cluster edit: cluster 0 pushed onto cluster 1's profile
        target = dict(zip(state.feature_names, state.base_profiles[1]))
        run, state = run_scenario(state, model, cluster=0, edits=target)
        assert run.moved is True
        assert run.new_bmu == state.base_bmu[1]

        spec0 = SensitivitySpec(
            cluster=0, deviation={"f1": 0.0, "f2": 0.0}, n_samples=1000, seed=5
        )
        h0 = sensitivity(state, model, spec0)
        assert h0.counts == {run.new_bmu: 1000}

        for d, n_samples, seed in ((0.3, 257, 1), (0.8, 1000, 2), (1.0, 513, 3)):
            spec = SensitivitySpec(
                cluster=0, deviation={"f1": d, "f2": d}, n_samples=n_samples, seed=seed
            )
            h = sensitivity(state, model, spec)
            assert sum(h.counts.values()) == n_samples
            assert h == sensitivity(state, model, spec)


def test_prediction_criteria():
    """Training set classification reproduces assignments on 10 random
    datasets; schema mismatches rejected naming the offending columns."""
    with criterion("prediction"):
        rng = np.random.default_rng(31)
        for trial in range(10):
            ds = random_dataset(rng, int(rng.integers(8, 30)), int(rng.integers(1, 5)))
            model = train_som(
                ds,
                SomConfig(grid_rows=2, grid_cols=2, iterations=10 * ds.n_cases,
                          seed=trial),
            )
            result = classify(model, ds)
            assert tuple(p.best for p in result.predictions) == model.assignments

        clouds = make_clouds()
        model = train_som(clouds, SomConfig(grid_rows=1, grid_cols=2,
                                            iterations=2000, seed=3))
        renamed = CaseDataset(
            case_ids=clouds.case_ids,
            feature_names=("f1", "intruder"),
            values=clouds.values,
        )
        try:
            validate_schema(model, renamed)
            raise AssertionError("schema mismatch not rejected")
        except SchemaMismatch as exc:
            assert exc.missing == ["f2"] and exc.extra == ["intruder"]


def test_report_adaptivity():
    """Section bitmap equals the stage bitmap over all 15 nonempty subsets;
    JSON round trip is float-exact."""
    with criterion("report-adaptivity"):
        clouds = make_clouds()
        clustering = run_kmeans(clouds, k=2, seed=1, n_init=5)
        model = train_som(clouds, SomConfig(grid_rows=1, grid_cols=2,
                                            iterations=2000, seed=3))
        state = setup(model, clustering)
        run, state = run_scenario(state, model, cluster=0,
                                  edits={"f1": 9.0, "f2": 9.0})
        histogram = sensitivity(
            state, model,
            SensitivitySpec(cluster=0, deviation={"f1": 0.5, "f2": 0.5},
                            n_samples=100, seed=1),
        )
        prediction = classify(model, clouds)

        stages = ("kmeans", "som", "scenario", "prediction")
        for included in itertools.chain.from_iterable(
            itertools.combinations(stages, r) for r in range(1, 5)
        ):
            session = Session(id="matrix", dataset=clouds)
            if "kmeans" in included:
                session.kmeans = clustering
            if "som" in included:
                session.som = model
            if "scenario" in included:
                session.scenario = state
                session.scenario_runs = [run]
                session.sensitivities = [histogram]
            if "prediction" in included:
                session.prediction = prediction
                session.prediction_data = clouds
            report = generate_report(session)
            assert report.sections_present() == session.stage_flags()
            restored = SessionReport.from_json(report.to_json())
            assert restored == report
            assert restored.to_json() == report.to_json()


def test_end_to_end_cli_and_http(tmp_path):
    """CLI happy path completes in under 10 s; a scripted HTTP client run
    with the same seeds yields an identical report modulo timestamps."""
    with criterion("end-to-end"):
        clouds = make_clouds()
        data_csv = tmp_path / "cases.csv"
        data_csv.write_text(serialize_csv(clouds))
        new_csv = tmp_path / "new.csv"
        new_csv.write_text("id,f1,f2\nn1,9.5,10.2\nn2,0.3,-0.4\n")
        scenario_file = tmp_path / "scenario.json"
        scenario_plan = {
            "runs": [{"cluster": 0, "edits": {"f1": 9.0, "f2": 9.5}}],
            "sensitivity": [
                {"cluster": 0, "deviation": {"f1": 0.5, "f2": 0.5},
                 "n_samples": 300, "seed": 7}
            ],
        }
        scenario_file.write_text(json.dumps(scenario_plan))

        out = tmp_path / "out"
        started = time.perf_counter()
        code = cli_main([
            "run", "--data", str(data_csv), "--id-column", "id",
            "--kmeans", "k=2,seed=1,n_init=5",
            "--som", "grid=1x2,iterations=2000,seed=3",
            "--scenario", str(scenario_file), "--predict", str(new_csv),
            "--seed", "1", "--out", str(out),
        ])
        elapsed = time.perf_counter() - started
        assert code == 0
        assert elapsed < 10.0, f"CLI run took {elapsed:.2f}s"
        cli_report = json.loads((out / "report.json").read_text())
        assert set(cli_report) == {
            "report_version", "metadata", "kmeans", "som", "scenario", "prediction",
        }

        app = create_app(session_dir=tmp_path / "sessions")
        with TestClient(app) as client:
            sid = client.post("/v1/sessions").json()["session_id"]
            client.post(
                f"/v1/sessions/{sid}/data",
                content=data_csv.read_bytes(),
                params={"id_column": "id"},
                headers={"content-type": "text/csv"},
            )
            client.post(f"/v1/sessions/{sid}/kmeans",
                        json={"k": 2, "seed": 1, "n_init": 5})
            client.post(
                f"/v1/sessions/{sid}/som",
                json={"grid_rows": 1, "grid_cols": 2, "iterations": 2000, "seed": 3},
            )
            client.post(f"/v1/sessions/{sid}/scenario/setup")
            client.post(f"/v1/sessions/{sid}/scenario/run",
                        json=scenario_plan["runs"][0])
            client.post(f"/v1/sessions/{sid}/scenario/sensitivity",
                        json=scenario_plan["sensitivity"][0])
            client.post(
                f"/v1/sessions/{sid}/predict",
                content=new_csv.read_bytes(),
                params={"id_column": "id"},
                headers={"content-type": "text/csv"},
            )
            http_report = client.get(f"/v1/sessions/{sid}/report").json()

        cli_report["metadata"].pop("timestamp")
        http_report["metadata"].pop("timestamp")
        assert cli_report == http_report

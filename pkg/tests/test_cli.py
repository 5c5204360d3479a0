import json
from pathlib import Path

import pytest

from caseflow.cli import main
from caseflow.dataset import serialize_csv

from conftest import make_clouds


@pytest.fixture
def clouds_csv_file(tmp_path):
    path = tmp_path / "cases.csv"
    path.write_text(serialize_csv(make_clouds()))
    return path


def run_cli(*argv) -> int:
    return main([str(a) for a in argv])


def read_report(out_dir: Path) -> dict:
    return json.loads((out_dir / "report.json").read_text())


class TestRun:
    def test_happy_path_kmeans_som(self, tmp_path, clouds_csv_file, capsys):
        out = tmp_path / "out"
        code = run_cli(
            "run", "--data", clouds_csv_file, "--id-column", "id",
            "--kmeans", "k=2", "--som", "grid=1x2,iterations=2000",
            "--seed", "1", "--out", out,
        )
        assert code == 0
        report = read_report(out)
        assert "kmeans" in report and "som" in report
        assert "scenario" not in report and "prediction" not in report
        assert (out / "report.zip").exists()
        stdout = capsys.readouterr().out
        assert "kmeans:" in stdout and "som:" in stdout

    def test_missing_input_file_names_path(self, tmp_path, capsys):
        code = run_cli("run", "--data", tmp_path / "absent.csv", "--out", tmp_path / "o")
        assert code == 3
        assert "absent.csv" in capsys.readouterr().err

    def test_parse_error_exit_code(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b\n1,x\n")
        code = run_cli("run", "--data", bad, "--kmeans", "k=2", "--out", tmp_path / "o")
        assert code == 4

    def test_stage_order_error_exit_code(self, tmp_path, clouds_csv_file):
        scenario = tmp_path / "scenario.json"
        scenario.write_text(json.dumps({"runs": [{"cluster": 0, "edits": {"f1": 9}}]}))
        code = run_cli(
            "run", "--data", clouds_csv_file, "--id-column", "id",
            "--scenario", scenario, "--out", tmp_path / "o",
        )
        assert code == 5

    def test_deterministic_given_seed(self, tmp_path, clouds_csv_file):
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name
            assert run_cli(
                "run", "--data", clouds_csv_file, "--id-column", "id",
                "--kmeans", "k=2", "--som", "grid=1x2,iterations=2000",
                "--seed", "7", "--out", out, "--no-plots",
            ) == 0
            outs.append(read_report(out))
        for doc in outs:
            doc["metadata"].pop("timestamp")
        assert json.dumps(outs[0], sort_keys=True) == json.dumps(outs[1], sort_keys=True)

    def test_full_pipeline_all_sections_and_plots(self, tmp_path, clouds_csv_file):
        scenario = tmp_path / "scenario.json"
        scenario.write_text(
            json.dumps(
                {
                    "runs": [{"cluster": 0, "edits": {"f1": 9.0, "f2": 9.5}}],
                    "sensitivity": [
                        {"cluster": 0, "deviation": {"f1": 0.5, "f2": 0.5},
                         "n_samples": 200}
                    ],
                }
            )
        )
        new_cases = tmp_path / "new.csv"
        new_cases.write_text("id,f1,f2\nn1,9.5,10.2\nn2,0.3,-0.4\n")
        out = tmp_path / "out"
        code = run_cli(
            "run", "--data", clouds_csv_file, "--id-column", "id",
            "--kmeans", "k=2", "--som", "grid=1x2,iterations=2000",
            "--scenario", scenario, "--predict", new_cases,
            "--seed", "1", "--out", out,
        )
        assert code == 0
        report = read_report(out)
        assert {"kmeans", "som", "scenario", "prediction"} <= set(report)
        plots = {p.name for p in (out / "plots").glob("*.png")}
        assert plots == {
            "silhouette.png", "som_barplot.png", "som_boxplot.png", "som_names.png",
        }

    def test_subset_limits_features(self, tmp_path, clouds_csv_file):
        out = tmp_path / "out"
        code = run_cli(
            "run", "--data", clouds_csv_file, "--id-column", "id",
            "--subset", "f1", "--kmeans", "k=2", "--out", out, "--no-plots",
        )
        assert code == 0
        assert read_report(out)["kmeans"]["feature_names"] == ["f1"]

    def test_config_file_with_flag_override(self, tmp_path, clouds_csv_file):
        config = tmp_path / "run.json"
        config.write_text(
            json.dumps(
                {
                    "data": str(clouds_csv_file),
                    "id_column": "id",
                    "kmeans": "k=3",
                    "out": str(tmp_path / "from_config"),
                    "seed": 5,
                }
            )
        )
        # config alone
        assert run_cli("run", "--config", config, "--no-plots") == 0
        assert read_report(tmp_path / "from_config")["kmeans"]["k"] == 3
        # flag overrides config
        out = tmp_path / "override"
        assert run_cli(
            "run", "--config", config, "--kmeans", "k=2", "--out", out, "--no-plots"
        ) == 0
        assert read_report(out)["kmeans"]["k"] == 2

    def test_bad_kmeans_spec_is_usage_error(self, tmp_path, clouds_csv_file):
        with pytest.raises(SystemExit):
            run_cli(
                "run", "--data", clouds_csv_file, "--id-column", "id",
                "--kmeans", "clusters=2", "--out", tmp_path / "o",
            )


class TestOpenApi:
    def test_writes_schema(self, tmp_path):
        target = tmp_path / "openapi.json"
        assert run_cli("openapi", "--out", target) == 0
        spec = json.loads(target.read_text())
        assert "/v1/sessions" in spec["paths"]

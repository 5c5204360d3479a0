"""Batch CLI: run analysis pipelines, serve the HTTP API, dump the API schema.

`caseflow run` executes stages in dependency order against one CSV and
writes the report bundle (JSON + zip) and plot images to an output
directory. One `--seed` makes the whole run reproducible. Configuration
precedence everywhere: flags > environment variables > config file >
defaults.

Exit codes: 0 success, 2 usage, 3 missing input file, 4 data/parse error,
5 analysis error, 1 unexpected failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .dataset import parse_csv, subset_features
from .errors import (
    CaseflowError,
    DuplicateIds,
    EmptyInput,
    NonNumericCell,
    RaggedRows,
    StageOrderError,
    UnknownFeature,
)
from .kmeans import run_kmeans
from .predict import classify
from .report import generate_report, report_zip_bytes
from .scenario import SensitivitySpec, run_scenario, sensitivity
from .scenario import setup as scenario_setup
from .session import Session
from .som import SomConfig, train_som

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_MISSING_FILE = 3
EXIT_DATA_ERROR = 4
EXIT_ANALYSIS_ERROR = 5

_DATA_ERRORS = (EmptyInput, NonNumericCell, RaggedRows, DuplicateIds, UnknownFeature)
_SEPARATORS = {",": ",", ";": ";", "tab": "\t", "\t": "\t"}


def _parse_kv(text: str, flag: str) -> dict[str, str]:
    out = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise SystemExit(f"caseflow: bad {flag} option {part!r} (expected key=value)")
        key, value = part.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _parse_bool(value: str, flag: str) -> bool:
    lowered = value.lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise SystemExit(f"caseflow: bad boolean {value!r} in {flag}")


def _kmeans_args(spec: str, default_seed: int) -> dict:
    kv = _parse_kv(spec, "--kmeans")
    known = {"k", "seed", "n_init", "max_iter", "scale"}
    unknown = set(kv) - known
    if unknown:
        raise SystemExit(f"caseflow: unknown --kmeans keys: {sorted(unknown)}")
    if "k" not in kv:
        raise SystemExit("caseflow: --kmeans requires k=<int>")
    return {
        "k": int(kv["k"]),
        "seed": int(kv.get("seed", default_seed)),
        "n_init": int(kv.get("n_init", 10)),
        "max_iter": int(kv.get("max_iter", 100)),
        "scale_data": _parse_bool(kv.get("scale", "false"), "--kmeans scale"),
    }


def _som_config(spec: str, default_seed: int, n_cases: int) -> SomConfig:
    kv = _parse_kv(spec, "--som")
    known = {"grid", "iterations", "rate", "seed", "scale", "radius"}
    unknown = set(kv) - known
    if unknown:
        raise SystemExit(f"caseflow: unknown --som keys: {sorted(unknown)}")
    grid = kv.get("grid", "5x5")
    try:
        rows, cols = (int(v) for v in grid.lower().split("x"))
    except ValueError:
        raise SystemExit(f"caseflow: bad --som grid {grid!r} (expected RxC)") from None
    return SomConfig(
        grid_rows=rows,
        grid_cols=cols,
        iterations=int(kv.get("iterations", 100 * n_cases)),
        learning_rate=float(kv.get("rate", 0.5)),
        seed=int(kv.get("seed", default_seed)),
        scale_data=_parse_bool(kv.get("scale", "true"), "--som scale"),
        radius=float(kv["radius"]) if "radius" in kv else None,
    )


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    p = Path(path)
    if not p.exists():
        print(f"caseflow: config file not found: {p}", file=sys.stderr)
        raise SystemExit(EXIT_MISSING_FILE)
    return json.loads(p.read_text())


def _resolve(flag_value, env_name: str, config: dict, config_key: str, default):
    """flags > env > config file > default."""
    if flag_value is not None:
        return flag_value
    if env_name in os.environ:
        return os.environ[env_name]
    if config_key in config:
        return config[config_key]
    return default


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="caseflow",
        description="Case-based clustering workbench: cluster, map, steer, classify, report.",
    )
    parser.add_argument("--version", action="version", version=f"caseflow {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a batch pipeline and export the report")
    run.add_argument("--config", help="JSON config file (flags override its keys)")
    run.add_argument("--data", help="input CSV of cases")
    run.add_argument("--separator", choices=sorted(_SEPARATORS), default=None)
    run.add_argument("--no-header", action="store_true", help="CSV has no header row")
    run.add_argument("--id-column", default=None, help="name or 0-based index of the case id column")
    run.add_argument("--subset", default=None, help="comma-separated feature names to keep")
    run.add_argument("--kmeans", default=None, metavar="k=3[,seed=..,n_init=..,max_iter=..,scale=..]")
    run.add_argument("--som", default=None, metavar="grid=5x5[,iterations=..,rate=..,seed=..,scale=..,radius=..]")
    run.add_argument("--scenario", default=None, help="JSON file of scenario runs and sensitivity specs")
    run.add_argument("--predict", default=None, help="CSV of new cases to classify")
    run.add_argument("--seed", type=int, default=None, help="default seed for stages without an explicit one")
    run.add_argument("--out", help="output directory")
    run.add_argument("--no-plots", action="store_true", help="skip PNG rendering")

    serve = sub.add_parser("serve", help="serve the HTTP API")
    serve.add_argument("--config", help="JSON config file")
    serve.add_argument("--host", default=None)
    serve.add_argument("--port", type=int, default=None)
    serve.add_argument("--session-dir", default=None)
    serve.add_argument("--cors-origin", default=None)
    serve.add_argument("--static-dir", default=None, help="built web UI to serve at /")

    openapi = sub.add_parser("openapi", help="print the OpenAPI description")
    openapi.add_argument("--out", default=None, help="write to file instead of stdout")

    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    data_path = _resolve(args.data, "CASEFLOW_DATA", config, "data", None)
    out_dir = _resolve(args.out, "CASEFLOW_OUT", config, "out", None)
    if not data_path or not out_dir:
        print("caseflow: run requires --data and --out", file=sys.stderr)
        return EXIT_USAGE
    seed = args.seed if args.seed is not None else int(config.get("seed", 0))
    separator = _SEPARATORS[args.separator or config.get("separator", ",")]
    has_header = not (args.no_header or config.get("no_header", False))
    id_column = args.id_column if args.id_column is not None else config.get("id_column")
    if isinstance(id_column, str) and id_column.lstrip("-").isdigit():
        id_column = int(id_column)
    kmeans_spec = args.kmeans or config.get("kmeans")
    som_spec = args.som or config.get("som")
    scenario_path = args.scenario or config.get("scenario")
    predict_path = args.predict or config.get("predict")
    subset = args.subset or config.get("subset")

    source = Path(data_path)
    if not source.exists():
        print(f"caseflow: input file not found: {source}", file=sys.stderr)
        return EXIT_MISSING_FILE

    dataset = parse_csv(
        source.read_bytes(),
        has_header=has_header,
        separator=separator,
        id_column=id_column,
    )
    if subset:
        keep = [s.strip() for s in str(subset).split(",") if s.strip()]
        dataset = subset_features(dataset, keep)
    print(f"data: {dataset.n_cases} cases x {dataset.n_features} features")

    session = Session(id="cli")
    session.set_dataset(dataset)

    if kmeans_spec:
        result = run_kmeans(dataset, **_kmeans_args(str(kmeans_spec), seed))
        session.set_kmeans(result)
        pf = "undefined" if result.pseudo_f is None else f"{result.pseudo_f:.4f}"
        print(f"kmeans: k={result.k} wss={result.wss:.6f} pseudo_f={pf}")

    if som_spec:
        model = train_som(dataset, _som_config(str(som_spec), seed, dataset.n_cases))
        session.set_som(model)
        print(
            f"som: {model.config.grid_rows}x{model.config.grid_cols} "
            f"qe={model.quantization_error:.6f} te={model.topographic_error:.4f}"
        )

    if scenario_path:
        spec_file = Path(scenario_path)
        if not spec_file.exists():
            print(f"caseflow: scenario file not found: {spec_file}", file=sys.stderr)
            return EXIT_MISSING_FILE
        plan = json.loads(spec_file.read_text())
        state = scenario_setup(session.som, session.kmeans)
        session.set_scenario(state)
        for entry in plan.get("runs", []):
            run, state = run_scenario(
                session.scenario,
                session.som,
                cluster=int(entry["cluster"]),
                edits={str(k): float(v) for k, v in entry.get("edits", {}).items()},
            )
            session.update_scenario(state, run)
            print(
                f"scenario: cluster {run.cluster} quadrant "
                f"{run.old_bmu} -> {run.new_bmu} ({'moved' if run.moved else 'no move'})"
            )
        for entry in plan.get("sensitivity", []):
            spec = SensitivitySpec.from_dict({"seed": seed, **entry})
            histogram = sensitivity(session.scenario, session.som, spec)
            session.add_sensitivity(histogram)
            print(
                f"sensitivity: cluster {spec.cluster} n={spec.n_samples} "
                f"quadrants hit: {sorted(histogram.counts)}"
            )

    if predict_path:
        new_file = Path(predict_path)
        if not new_file.exists():
            print(f"caseflow: predict file not found: {new_file}", file=sys.stderr)
            return EXIT_MISSING_FILE
        new_data = parse_csv(
            new_file.read_bytes(), has_header=has_header, separator=separator,
            id_column=id_column,
        )
        result = classify(session.som, new_data)
        session.set_prediction(result, new_data)
        print(f"predict: classified {len(result.predictions)} new cases")

    report = generate_report(session)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(report.to_json())
    (out / "report.zip").write_bytes(report_zip_bytes(report))
    print(f"report: {out / 'report.json'} ({', '.join(k for k, v in report.sections_present().items() if v)})")

    if not args.no_plots:
        from .plots import render_report_plots

        for path in render_report_plots(report.to_dict(), out / "plots"):
            print(f"plot: {path}")
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import DEFAULT_SESSION_DIR, create_app

    config = _load_config(args.config)
    host = _resolve(args.host, "CASEFLOW_HOST", config, "host", "127.0.0.1")
    port = int(_resolve(args.port, "CASEFLOW_PORT", config, "port", 8000))
    session_dir = _resolve(
        args.session_dir, "CASEFLOW_SESSION_DIR", config, "session_dir", DEFAULT_SESSION_DIR
    )
    cors = _resolve(args.cors_origin, "CASEFLOW_CORS_ORIGIN", config, "cors_origin", None)
    static = _resolve(args.static_dir, "CASEFLOW_STATIC_DIR", config, "static_dir", None)

    app = create_app(session_dir=session_dir, cors_origin=cors, static_dir=static)
    uvicorn.run(app, host=host, port=port)
    return EXIT_OK


def _cmd_openapi(args: argparse.Namespace) -> int:
    from .service import create_app

    import tempfile

    with tempfile.TemporaryDirectory() as tmp:
        app = create_app(session_dir=tmp)
        text = json.dumps(app.openapi(), indent=2)
    if args.out:
        Path(args.out).write_text(text)
    else:
        print(text)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "serve":
            return _cmd_serve(args)
        if args.command == "openapi":
            return _cmd_openapi(args)
        return EXIT_USAGE
    except _DATA_ERRORS as exc:
        print(f"caseflow: data error [{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_DATA_ERROR
    except StageOrderError as exc:
        print(f"caseflow: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS_ERROR
    except CaseflowError as exc:
        print(f"caseflow: analysis error [{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS_ERROR


if __name__ == "__main__":
    sys.exit(main())

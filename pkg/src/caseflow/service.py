"""Session-oriented HTTP service exposing the full analysis workflow.

All endpoints live under ``/v1``. Mutating requests on one session are
serialized through a per-session lock; sessions persist as JSON snapshots so
a restart loses nothing. Error mapping: unknown session -> 404, stage-order
violations -> 409 naming the missing prerequisite, domain errors -> 422
carrying the core error code.
"""

from __future__ import annotations

import os
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from . import __version__
from .dataset import parse_csv
from .errors import CaseflowError, EmptyInput, StageOrderError, UnknownSession
from .kmeans import run_kmeans
from .predict import classify
from .report import generate_report, kmeans_section, report_zip_bytes
from .scenario import SensitivitySpec, run_scenario, sensitivity
from .scenario import setup as scenario_setup
from .session import SessionStore
from .som import SomConfig, names_plot_data, quadrant_profiles, train_som

DEFAULT_SESSION_DIR = os.path.join(os.path.expanduser("~"), ".caseflow", "sessions")

_SEPARATORS = {",": ",", ";": ";", "\t": "\t", "comma": ",", "semicolon": ";", "tab": "\t"}


def _bool_param(value: str | None, default: bool) -> bool:
    if value is None:
        return default
    return value.lower() in ("1", "true", "yes", "on")


async def _read_csv_body(request: Request) -> bytes:
    content_type = request.headers.get("content-type", "")
    if content_type.startswith("multipart/form-data"):
        form = await request.form()
        upload = form.get("file")
        if upload is None:
            raise EmptyInput("multipart upload must contain a 'file' field")
        return await upload.read()
    body = await request.body()
    if not body:
        raise EmptyInput("request body is empty")
    return body


def _parse_upload_options(request: Request) -> dict:
    q = request.query_params
    separator = _SEPARATORS.get(q.get("separator", ","), None)
    if separator is None:
        raise CaseflowError(f"unsupported separator {q.get('separator')!r}")
    id_column: str | int | None = q.get("id_column")
    if id_column is not None and id_column.lstrip("-").isdigit():
        id_column = int(id_column)
    return {
        "has_header": _bool_param(q.get("has_header"), True),
        "separator": separator,
        "id_column": id_column,
    }


def create_app(
    session_dir: str | Path | None = None,
    cors_origin: str | None = None,
    static_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="caseflow", version=__version__)
    store = SessionStore(session_dir or os.environ.get("CASEFLOW_SESSION_DIR", DEFAULT_SESSION_DIR))
    app.state.store = store

    cors_origin = cors_origin or os.environ.get("CASEFLOW_CORS_ORIGIN")
    if cors_origin:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=[o.strip() for o in cors_origin.split(",")],
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(UnknownSession)
    async def _unknown_session(request, exc):
        return JSONResponse(
            status_code=404, content={"error": {"code": exc.code, "message": str(exc)}}
        )

    @app.exception_handler(StageOrderError)
    async def _stage_order(request, exc):
        return JSONResponse(
            status_code=409,
            content={
                "error": {
                    "code": exc.code,
                    "message": str(exc),
                    "stage": exc.stage,
                    "missing": exc.missing,
                }
            },
        )

    @app.exception_handler(CaseflowError)
    async def _domain_error(request, exc):
        detail = {"code": exc.code, "message": str(exc)}
        for attr in ("row", "column", "missing", "extra"):
            if hasattr(exc, attr):
                detail[attr] = getattr(exc, attr)
        return JSONResponse(status_code=422, content={"error": detail})

    @app.exception_handler(ValueError)
    async def _value_error(request, exc):
        return JSONResponse(
            status_code=422,
            content={"error": {"code": "InvalidParameter", "message": str(exc)}},
        )

    @app.exception_handler(IndexError)
    async def _index_error(request, exc):
        return JSONResponse(
            status_code=422,
            content={"error": {"code": "InvalidParameter", "message": str(exc)}},
        )

    # --- sessions ----------------------------------------------------------

    @app.post("/v1/sessions")
    async def create_session():
        session = store.create()
        return {"session_id": session.id}

    @app.get("/v1/sessions/{session_id}")
    async def session_status(session_id: str):
        session = store.get(session_id)
        return {
            "session_id": session.id,
            "stages": session.stage_flags(),
            "has_dataset": session.dataset is not None,
            "created_at": session.created_at,
            "last_used": session.last_used,
        }

    # --- data upload ---------------------------------------------------------

    @app.post("/v1/sessions/{session_id}/data")
    async def upload_data(session_id: str, request: Request):
        raw = await _read_csv_body(request)
        options = _parse_upload_options(request)
        q = request.query_params
        preview_rows = int(q.get("preview_rows", 20))
        preview_cols = int(q.get("preview_cols", 10))
        dataset = parse_csv(raw, **options)
        with store.lock(session_id):
            session = store.get(session_id)
            session.set_dataset(dataset)
            store.save(session)
        return {
            "n_cases": dataset.n_cases,
            "n_features": dataset.n_features,
            "feature_names": list(dataset.feature_names),
            "preview": {
                "case_ids": list(dataset.case_ids[:preview_rows]),
                "feature_names": list(dataset.feature_names[:preview_cols]),
                "values": [
                    [float(v) for v in row[:preview_cols]]
                    for row in dataset.values[:preview_rows]
                ],
            },
        }

    # --- clustering -----------------------------------------------------------

    @app.post("/v1/sessions/{session_id}/kmeans")
    async def kmeans_endpoint(session_id: str, request: Request):
        payload = await request.json()
        with store.lock(session_id):
            session = store.get(session_id)
            session.require("kmeans", session.dataset is not None, "data")
            result = run_kmeans(
                session.dataset,
                k=int(payload["k"]),
                seed=int(payload.get("seed", 0)),
                n_init=int(payload.get("n_init", 10)),
                max_iter=int(payload.get("max_iter", 100)),
                scale_data=bool(payload.get("scale_data", False)),
            )
            session.set_kmeans(result)
            store.save(session)
            return kmeans_section(result, session.dataset)

    @app.get("/v1/sessions/{session_id}/kmeans/silhouette")
    async def silhouette_endpoint(session_id: str):
        session = store.get(session_id)
        session.require("kmeans/silhouette", session.kmeans is not None, "kmeans")
        result = session.kmeans
        if result.silhouette is None:
            return {"defined": False, "reason": "silhouette undefined for k=1"}
        return {
            "defined": True,
            "per_case": [
                {"case_id": cid, "cluster": c, "silhouette": s}
                for cid, c, s in zip(
                    session.dataset.case_ids, result.assignments, result.silhouette
                )
            ],
            "cluster_means": list(result.silhouette_cluster_means),
            "cluster_sizes": list(result.cluster_sizes),
            "overall": result.silhouette_overall,
        }

    # --- map training -----------------------------------------------------------

    @app.post("/v1/sessions/{session_id}/som")
    async def som_endpoint(session_id: str, request: Request):
        payload = await request.json()
        with store.lock(session_id):
            session = store.get(session_id)
            session.require("som", session.dataset is not None, "data")
            config = SomConfig(
                grid_rows=int(payload.get("grid_rows", 5)),
                grid_cols=int(payload.get("grid_cols", 5)),
                iterations=int(
                    payload.get("iterations", 100 * session.dataset.n_cases)
                ),
                learning_rate=float(payload.get("learning_rate", 0.5)),
                seed=int(payload.get("seed", 0)),
                scale_data=bool(payload.get("scale_data", True)),
                radius=(
                    None if payload.get("radius") is None else float(payload["radius"])
                ),
            )
            model = train_som(session.dataset, config)
            session.set_som(model)
            store.save(session)
            return {
                "parameters": model.config.to_dict(),
                "quantization_error": model.quantization_error,
                "topographic_error": model.topographic_error,
                "anova": [row.to_dict() for row in model.anova],
                "warnings": list(model.warnings),
            }

    @app.get("/v1/sessions/{session_id}/som/profiles")
    async def som_profiles(session_id: str):
        session = store.get(session_id)
        session.require("som/profiles", session.som is not None, "som")
        model = session.som
        return {
            "grid_rows": model.config.grid_rows,
            "grid_cols": model.config.grid_cols,
            "feature_names": list(model.feature_names),
            "global_mean": list(model.scaling.mean),
            "profiles": [p.to_dict() for p in quadrant_profiles(model)],
        }

    @app.get("/v1/sessions/{session_id}/som/names-plot")
    async def som_names_plot(session_id: str):
        session = store.get(session_id)
        session.require("som/names-plot", session.som is not None, "som")
        session.require("som/names-plot", session.kmeans is not None, "kmeans")
        cells = names_plot_data(session.som, session.kmeans)
        return {
            "grid_rows": session.som.config.grid_rows,
            "grid_cols": session.som.config.grid_cols,
            "cells": cells,
        }

    # --- scenario ------------------------------------------------------------------

    @app.post("/v1/sessions/{session_id}/scenario/setup")
    async def scenario_setup_endpoint(session_id: str):
        with store.lock(session_id):
            session = store.get(session_id)
            session.require("scenario", session.kmeans is not None, "kmeans")
            session.require("scenario", session.som is not None, "som")
            state = scenario_setup(session.som, session.kmeans)
            session.set_scenario(state)
            store.save(session)
            return state.to_dict()

    @app.post("/v1/sessions/{session_id}/scenario/run")
    async def scenario_run_endpoint(session_id: str, request: Request):
        payload = await request.json()
        with store.lock(session_id):
            session = store.get(session_id)
            session.require("scenario/run", session.kmeans is not None, "kmeans")
            session.require("scenario/run", session.som is not None, "som")
            session.require("scenario/run", session.scenario is not None, "scenario")
            run, new_state = run_scenario(
                session.scenario,
                session.som,
                cluster=int(payload["cluster"]),
                edits={str(k): float(v) for k, v in payload.get("edits", {}).items()},
            )
            session.update_scenario(new_state, run)
            store.save(session)
            return {"run": run.to_dict(), "state": new_state.to_dict()}

    @app.post("/v1/sessions/{session_id}/scenario/sensitivity")
    async def scenario_sensitivity_endpoint(session_id: str, request: Request):
        payload = await request.json()
        with store.lock(session_id):
            session = store.get(session_id)
            session.require("scenario/sensitivity", session.kmeans is not None, "kmeans")
            session.require("scenario/sensitivity", session.som is not None, "som")
            session.require(
                "scenario/sensitivity", session.scenario is not None, "scenario"
            )
            spec = SensitivitySpec.from_dict(payload)
            histogram = sensitivity(session.scenario, session.som, spec)
            session.add_sensitivity(histogram)
            store.save(session)
            return histogram.to_dict()

    # --- prediction --------------------------------------------------------------------

    @app.post("/v1/sessions/{session_id}/predict")
    async def predict_endpoint(session_id: str, request: Request):
        raw = await _read_csv_body(request)
        options = _parse_upload_options(request)
        with store.lock(session_id):
            session = store.get(session_id)
            session.require("prediction", session.som is not None, "som")
            new_data = parse_csv(raw, **options)
            result = classify(session.som, new_data)
            session.set_prediction(result, new_data)
            store.save(session)
            return result.to_dict()

    # --- report -------------------------------------------------------------------------

    @app.get("/v1/sessions/{session_id}/report")
    async def report_endpoint(session_id: str, format: str = "json"):
        session = store.get(session_id)
        report = generate_report(session)
        if format == "zip":
            return Response(
                content=report_zip_bytes(report),
                media_type="application/zip",
                headers={
                    "Content-Disposition": f'attachment; filename="report-{session_id}.zip"'
                },
            )
        if format != "json":
            raise CaseflowError(f"unsupported report format {format!r}")
        return Response(content=report.to_json(), media_type="application/json")

    if static_dir or os.environ.get("CASEFLOW_STATIC_DIR"):
        from fastapi.staticfiles import StaticFiles

        app.mount(
            "/",
            StaticFiles(
                directory=str(static_dir or os.environ["CASEFLOW_STATIC_DIR"]),
                html=True,
            ),
            name="ui",
        )

    return app

"""One analysis run's accumulated state, with stage ordering and persistence.

Stage rules: clustering and map training need data; scenario steering needs
both a clustering and a trained map; classification needs a trained map.
Re-running an upstream stage clears everything downstream of it so exports
never mix stale results.

Sessions snapshot to one JSON file each, keyed by id, and expire after an
idle TTL (default 24 h). A reloaded map re-serializes byte-identically.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from .dataset import CaseDataset
from .errors import StageOrderError, UnknownSession
from .kmeans import KMeansResult
from .predict import PredictionResult
from .scenario import ScenarioRun, ScenarioState, SensitivityHistogram
from .som import SomModel

STAGES = ("kmeans", "som", "scenario", "prediction")
DEFAULT_TTL_SECONDS = 24 * 3600


@dataclass
class Session:
    id: str
    dataset: CaseDataset | None = None
    kmeans: KMeansResult | None = None
    som: SomModel | None = None
    scenario: ScenarioState | None = None
    scenario_runs: list[ScenarioRun] = field(default_factory=list)
    sensitivities: list[SensitivityHistogram] = field(default_factory=list)
    prediction: PredictionResult | None = None
    prediction_data: CaseDataset | None = None
    created_at: float = field(default_factory=time.time)
    last_used: float = field(default_factory=time.time)

    def stage_flags(self) -> dict[str, bool]:
        return {
            "kmeans": self.kmeans is not None,
            "som": self.som is not None,
            "scenario": self.scenario is not None,
            "prediction": self.prediction is not None,
        }

    def touch(self) -> None:
        self.last_used = time.time()

    # --- stage transitions (each clears its downstream stages) -----------

    def require(self, stage: str, condition: bool, missing: str) -> None:
        if not condition:
            raise StageOrderError(stage, missing)

    def set_dataset(self, dataset: CaseDataset) -> None:
        self.dataset = dataset
        self.kmeans = None
        self.som = None
        self._clear_scenario()
        self.prediction = None
        self.prediction_data = None
        self.touch()

    def set_kmeans(self, result: KMeansResult) -> None:
        self.require("kmeans", self.dataset is not None, "data")
        self.kmeans = result
        self._clear_scenario()
        self.touch()

    def set_som(self, model: SomModel) -> None:
        self.require("som", self.dataset is not None, "data")
        self.som = model
        self._clear_scenario()
        self.prediction = None
        self.prediction_data = None
        self.touch()

    def set_scenario(self, state: ScenarioState) -> None:
        self.require("scenario", self.kmeans is not None, "kmeans")
        self.require("scenario", self.som is not None, "som")
        self.scenario = state
        self.scenario_runs = []
        self.sensitivities = []
        self.touch()

    def update_scenario(self, state: ScenarioState, run: ScenarioRun) -> None:
        self.require("scenario/run", self.kmeans is not None, "kmeans")
        self.require("scenario/run", self.som is not None, "som")
        self.require("scenario/run", self.scenario is not None, "scenario")
        self.scenario = state
        self.scenario_runs.append(run)
        self.touch()

    def add_sensitivity(self, histogram: SensitivityHistogram) -> None:
        self.require("scenario/sensitivity", self.scenario is not None, "scenario")
        self.sensitivities.append(histogram)
        self.touch()

    def set_prediction(self, result: PredictionResult, new_data: CaseDataset) -> None:
        self.require("prediction", self.som is not None, "som")
        self.prediction = result
        self.prediction_data = new_data
        self.touch()

    def _clear_scenario(self) -> None:
        self.scenario = None
        self.scenario_runs = []
        self.sensitivities = []

    # --- serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "dataset": None if self.dataset is None else self.dataset.to_dict(),
            "kmeans": None if self.kmeans is None else self.kmeans.to_dict(),
            "som": None if self.som is None else self.som.to_dict(),
            "scenario": None if self.scenario is None else self.scenario.to_dict(),
            "scenario_runs": [r.to_dict() for r in self.scenario_runs],
            "sensitivities": [h.to_dict() for h in self.sensitivities],
            "prediction": None if self.prediction is None else self.prediction.to_dict(),
            "prediction_data": (
                None if self.prediction_data is None else self.prediction_data.to_dict()
            ),
            "created_at": self.created_at,
            "last_used": self.last_used,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Session":
        return cls(
            id=d["id"],
            dataset=None if d["dataset"] is None else CaseDataset.from_dict(d["dataset"]),
            kmeans=None if d["kmeans"] is None else KMeansResult.from_dict(d["kmeans"]),
            som=None if d["som"] is None else SomModel.from_dict(d["som"]),
            scenario=(
                None if d["scenario"] is None else ScenarioState.from_dict(d["scenario"])
            ),
            scenario_runs=[ScenarioRun.from_dict(r) for r in d["scenario_runs"]],
            sensitivities=[
                SensitivityHistogram.from_dict(h) for h in d["sensitivities"]
            ],
            prediction=(
                None if d["prediction"] is None
                else PredictionResult.from_dict(d["prediction"])
            ),
            prediction_data=(
                None if d["prediction_data"] is None
                else CaseDataset.from_dict(d["prediction_data"])
            ),
            created_at=float(d["created_at"]),
            last_used=float(d["last_used"]),
        )


class SessionStore:
    """Disk-backed session registry with per-session write locks."""

    def __init__(self, directory: str | Path, ttl_seconds: float = DEFAULT_TTL_SECONDS):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.ttl_seconds = ttl_seconds
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def _path(self, session_id: str) -> Path:
        return self.directory / f"{session_id}.json"

    def lock(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(session_id, threading.Lock())

    def create(self) -> Session:
        session = Session(id=uuid.uuid4().hex)
        self.save(session)
        return session

    def save(self, session: Session) -> None:
        path = self._path(session.id)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(session.to_dict(), separators=(",", ":")))
        tmp.replace(path)

    def get(self, session_id: str) -> Session:
        path = self._path(session_id)
        if not path.exists():
            raise UnknownSession(f"unknown session {session_id!r}")
        session = Session.from_dict(json.loads(path.read_text()))
        if time.time() - session.last_used > self.ttl_seconds:
            path.unlink(missing_ok=True)
            raise UnknownSession(f"session {session_id!r} expired")
        return session

    def sweep(self) -> int:
        """Delete expired snapshots; returns how many were removed."""
        removed = 0
        now = time.time()
        for path in self.directory.glob("*.json"):
            try:
                last_used = json.loads(path.read_text()).get("last_used", 0)
            except (OSError, json.JSONDecodeError):
                continue
            if now - last_used > self.ttl_seconds:
                path.unlink(missing_ok=True)
                removed += 1
        return removed

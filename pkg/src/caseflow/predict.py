"""Classify new cases against a trained map.

New data must carry exactly the training feature set; columns may arrive in
any order and are canonicalized by name. Scaling always uses the frozen
training parameters, never a refit.
"""

from __future__ import annotations

from dataclasses import dataclass


from .dataset import CaseDataset, subset_features
from .errors import SchemaMismatch
from .scaling import apply_scaling_matrix
from .som import SomModel, two_nearest


@dataclass(frozen=True)
class Prediction:
    case_id: str
    best: int
    second: int
    best_distance: float
    second_distance: float

    def to_dict(self) -> dict:
        return {
            "case_id": self.case_id,
            "best": self.best,
            "second": self.second,
            "best_distance": self.best_distance,
            "second_distance": self.second_distance,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Prediction":
        return cls(
            case_id=str(d["case_id"]),
            best=int(d["best"]),
            second=int(d["second"]),
            best_distance=float(d["best_distance"]),
            second_distance=float(d["second_distance"]),
        )


@dataclass(frozen=True)
class PredictionResult:
    """Per-case best and second-best quadrant with scaled-space distances."""

    predictions: tuple[Prediction, ...]

    def to_dict(self) -> dict:
        return {"predictions": [p.to_dict() for p in self.predictions]}

    @classmethod
    def from_dict(cls, d: dict) -> "PredictionResult":
        return cls(
            predictions=tuple(Prediction.from_dict(p) for p in d["predictions"])
        )


def validate_schema(model: SomModel, new_data: CaseDataset) -> None:
    """Raise :class:`SchemaMismatch` naming missing/extra columns unless the
    new data's features are exactly the training features (any order)."""
    trained = set(model.feature_names)
    incoming = set(new_data.feature_names)
    missing = sorted(trained - incoming)
    extra = sorted(incoming - trained)
    if missing or extra:
        raise SchemaMismatch(missing, extra)


def classify(model: SomModel, new_data: CaseDataset) -> PredictionResult:
    """Assign each new case its best and second-best quadrant."""
    validate_schema(model, new_data)
    canonical = subset_features(new_data, list(model.feature_names))
    scaled = apply_scaling_matrix(model.scaling, canonical.values)
    rows = []
    for case_id, x in zip(canonical.case_ids, scaled):
        b, db, s, ds = two_nearest(model.weights, x)
        rows.append(
            Prediction(
                case_id=case_id, best=b, second=s, best_distance=db, second_distance=ds
            )
        )
    return PredictionResult(predictions=tuple(rows))

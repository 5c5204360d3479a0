"""caseflow: case-based clustering workbench.

Cluster cases with k-means, corroborate the solution with a self-organizing
map, steer cluster profiles through what-if scenarios with Monte Carlo
sensitivity, classify new cases against the trained map, and export adaptive
reports. Usable as a library, a CLI (``caseflow``), or an HTTP service.
"""

__version__ = "0.1.0"

from .dataset import CaseDataset, parse_csv, serialize_csv, subset_features
from .errors import CaseflowError
from .kmeans import CaseKMeans, KMeansResult, pseudo_f, run_kmeans, silhouette
from .predict import PredictionResult, classify, validate_schema
from .report import SessionReport, generate_report, report_zip_bytes
from .scaling import ProfileScaler, ScalingParams, apply_scaling, fit_scaling
from .scenario import (
    ScenarioRun,
    ScenarioState,
    SensitivityHistogram,
    SensitivitySpec,
    run_scenario,
    sensitivity,
)
from .scenario import setup as scenario_setup
from .session import Session, SessionStore
from .som import (
    SelfOrganizingMap,
    SomConfig,
    SomModel,
    anova_by_neuron,
    best_matching_unit,
    names_plot_data,
    quadrant_profiles,
    quantization_error,
    topographic_error,
    train_som,
)

__all__ = [
    "CaseDataset",
    "CaseKMeans",
    "CaseflowError",
    "KMeansResult",
    "PredictionResult",
    "ProfileScaler",
    "ScalingParams",
    "ScenarioRun",
    "ScenarioState",
    "SelfOrganizingMap",
    "SensitivityHistogram",
    "SensitivitySpec",
    "Session",
    "SessionReport",
    "SessionStore",
    "SomConfig",
    "SomModel",
    "anova_by_neuron",
    "apply_scaling",
    "best_matching_unit",
    "classify",
    "fit_scaling",
    "generate_report",
    "names_plot_data",
    "parse_csv",
    "pseudo_f",
    "quadrant_profiles",
    "quantization_error",
    "report_zip_bytes",
    "run_kmeans",
    "run_scenario",
    "scenario_setup",
    "sensitivity",
    "serialize_csv",
    "silhouette",
    "subset_features",
    "topographic_error",
    "train_som",
    "validate_schema",
]

import numpy as np
import pytest

from caseflow.dataset import CaseDataset, parse_csv, serialize_csv
from caseflow.errors import SchemaMismatch
from caseflow.predict import PredictionResult, classify, validate_schema
from caseflow.scaling import invert_scaling_matrix
from caseflow.som import SomConfig, train_som

from conftest import random_dataset


def rename_feature(data: CaseDataset, old: str, new: str) -> CaseDataset:
    names = tuple(new if f == old else f for f in data.feature_names)
    return CaseDataset(case_ids=data.case_ids, feature_names=names, values=data.values)


class TestValidateSchema:
    def test_identical_schema_ok(self, clouds_som, clouds_dataset):
        validate_schema(clouds_som, clouds_dataset)

    def test_renamed_column_named_in_error(self, clouds_som, clouds_dataset):
        renamed = rename_feature(clouds_dataset, "f2", "wrong")
        with pytest.raises(SchemaMismatch) as exc:
            validate_schema(clouds_som, renamed)
        assert exc.value.missing == ["f2"]
        assert exc.value.extra == ["wrong"]
        assert "f2" in str(exc.value) and "wrong" in str(exc.value)

    def test_reordered_columns_ok(self, clouds_som, clouds_dataset):
        reordered = CaseDataset(
            case_ids=clouds_dataset.case_ids,
            feature_names=("f2", "f1"),
            values=clouds_dataset.values[:, [1, 0]],
        )
        validate_schema(clouds_som, reordered)
        result = classify(clouds_som, reordered)
        assert tuple(p.best for p in result.predictions) == clouds_som.assignments


class TestClassify:
    def test_training_set_reproduces_assignments(self, clouds_som, clouds_dataset):
        result = classify(clouds_som, clouds_dataset)
        assert tuple(p.best for p in result.predictions) == clouds_som.assignments
        assert [p.case_id for p in result.predictions] == list(clouds_dataset.case_ids)

    def test_training_set_reproduced_on_random_datasets(self):
        rng = np.random.default_rng(21)
        for trial in range(10):
            ds = random_dataset(rng, int(rng.integers(8, 25)), int(rng.integers(1, 4)))
            model = train_som(
                ds,
                SomConfig(grid_rows=2, grid_cols=2, iterations=10 * ds.n_cases,
                          seed=trial),
            )
            result = classify(model, ds)
            assert tuple(p.best for p in result.predictions) == model.assignments

    def test_case_equal_to_neuron_weight(self, clouds_som):
        raw = invert_scaling_matrix(clouds_som.scaling, clouds_som.weights)
        ds = CaseDataset(
            case_ids=("n0", "n1"), feature_names=clouds_som.feature_names, values=raw
        )
        result = classify(clouds_som, ds)
        for j, p in enumerate(result.predictions):
            assert p.best == j
            assert p.best_distance == pytest.approx(0.0, abs=1e-9)

    def test_new_point_near_cloud_b(self, clouds_som):
        ds = CaseDataset(("new",), clouds_som.feature_names, np.array([[9.5, 10.2]]))
        result = classify(clouds_som, ds)
        assert result.predictions[0].best == clouds_som.assignments[10]

    def test_distance_ordering_and_distinct_neurons(self, clouds_som):
        rng = np.random.default_rng(3)
        ds = CaseDataset(
            case_ids=tuple(str(i) for i in range(30)),
            feature_names=clouds_som.feature_names,
            values=rng.uniform(-5, 15, (30, 2)),
        )
        for p in classify(clouds_som, ds).predictions:
            assert p.best != p.second
            assert p.best_distance <= p.second_distance

    def test_idempotent_and_pure(self, clouds_som, clouds_dataset):
        before = clouds_som.weights.tobytes()
        first = classify(clouds_som, clouds_dataset)
        second = classify(clouds_som, clouds_dataset)
        assert first == second
        assert clouds_som.weights.tobytes() == before

    def test_csv_round_trip_classifies_identically(self, clouds_som, clouds_dataset):
        text = serialize_csv(clouds_dataset)
        reparsed = parse_csv(text, id_column="id")
        assert classify(clouds_som, reparsed) == classify(clouds_som, clouds_dataset)

    def test_result_dict_round_trip(self, clouds_som, clouds_dataset):
        result = classify(clouds_som, clouds_dataset)
        assert PredictionResult.from_dict(result.to_dict()) == result

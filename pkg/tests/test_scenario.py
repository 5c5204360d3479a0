import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from caseflow.errors import (
    DatasetMismatch,
    InvalidDeviation,
    NoEditsToPerturb,
    NonFiniteValue,
    UnknownFeature,
)
from caseflow.kmeans import run_kmeans
from caseflow.scaling import invert_scaling_matrix
from caseflow.scenario import (
    ScenarioState,
    SensitivitySpec,
    run_scenario,
    sensitivity,
    setup,
)
from caseflow.som import best_matching_unit

from conftest import make_clouds
from oracles import independent_sensitivity_counts


@pytest.fixture
def steering(clouds_som, clouds_kmeans):
    return setup(clouds_som, clouds_kmeans)


def neuron_raw_weights(model):
    return invert_scaling_matrix(model.scaling, model.weights)


class TestSetup:
    def test_edited_starts_equal_to_base(self, steering):
        assert steering.edited_profiles == steering.base_profiles
        assert steering.current_bmu == steering.base_bmu

    def test_k_clusters_in_k_bmus_out(self, steering, clouds_kmeans):
        assert len(steering.base_bmu) == clouds_kmeans.k

    def test_clusters_map_to_distinct_neurons(self, steering):
        assert set(steering.base_bmu) == {0, 1}

    def test_centroid_equal_to_neuron_weight_maps_there(self, clouds_som, clouds_kmeans):
        state = setup(clouds_som, clouds_kmeans)
        raw = neuron_raw_weights(clouds_som)
        for cluster, bmu in enumerate(state.base_bmu):
            hit = best_matching_unit(clouds_som, raw[bmu])
            assert hit.bmu == bmu
            # sanity: the centroid itself resolves to the same neuron
            assert best_matching_unit(
                clouds_som, state.base_profiles[cluster]
            ).bmu == bmu

    def test_dataset_mismatch(self, clouds_som):
        other = run_kmeans(make_clouds(n_per_cloud=3, seed=9), k=2, seed=0)
        with pytest.raises(DatasetMismatch):
            setup(clouds_som, other)


class TestRunScenario:
    def test_empty_edits_do_not_move(self, steering, clouds_som):
        run, state = run_scenario(steering, clouds_som, cluster=0, edits={})
        assert run.new_bmu == run.old_bmu
        assert run.moved is False
        assert state.edited_profiles == steering.edited_profiles

    def test_cross_cluster_edit_moves(self, steering, clouds_som):
        target = steering.base_profiles[1]
        edits = dict(zip(steering.feature_names, target))
        run, state = run_scenario(steering, clouds_som, cluster=0, edits=edits)
        assert run.moved is True
        assert run.new_bmu == steering.base_bmu[1]
        assert run.old_bmu == steering.base_bmu[0]
        assert state.current_bmu[0] == steering.base_bmu[1]

    def test_edit_then_revert_reports_no_move(self, steering, clouds_som):
        away = dict(zip(steering.feature_names, steering.base_profiles[1]))
        _, state = run_scenario(steering, clouds_som, cluster=0, edits=away)
        back = dict(zip(steering.feature_names, steering.base_profiles[0]))
        run, state = run_scenario(state, clouds_som, cluster=0, edits=back)
        assert run.moved is False
        assert run.new_bmu == steering.base_bmu[0]

    def test_edits_accumulate_across_runs(self, steering, clouds_som):
        _, state = run_scenario(steering, clouds_som, cluster=0, edits={"f1": 3.0})
        run, state = run_scenario(state, clouds_som, cluster=0, edits={"f2": 4.0})
        assert run.edited_profile[0] == 3.0
        assert run.edited_profile[1] == 4.0

    def test_unknown_feature_and_non_finite(self, steering, clouds_som):
        with pytest.raises(UnknownFeature):
            run_scenario(steering, clouds_som, cluster=0, edits={"nope": 1.0})
        with pytest.raises(NonFiniteValue):
            run_scenario(steering, clouds_som, cluster=0, edits={"f1": float("nan")})

    def test_extrapolation_warning(self, steering, clouds_som):
        run, _ = run_scenario(steering, clouds_som, cluster=0, edits={"f1": 1e6})
        assert any("extrapolates" in w for w in run.warnings)

    def test_model_never_mutated(self, steering, clouds_som):
        before = clouds_som.weights.tobytes()
        run_scenario(steering, clouds_som, cluster=0, edits={"f1": 99.0})
        spec = SensitivitySpec(cluster=0, deviation={"f1": 1.0}, n_samples=50, seed=1)
        _, state = run_scenario(steering, clouds_som, cluster=0, edits={"f1": 99.0})
        sensitivity(state, clouds_som, spec)
        assert clouds_som.weights.tobytes() == before

    def test_state_dict_round_trip(self, steering, clouds_som):
        _, state = run_scenario(steering, clouds_som, cluster=1, edits={"f1": -2.0})
        assert ScenarioState.from_dict(state.to_dict()) == state


class TestSensitivity:
    def halfway_state(self, steering, model):
        """Cluster 0 edited exactly halfway toward cluster 1's neuron."""
        raw = neuron_raw_weights(model)
        base = np.asarray(steering.base_profiles[0])
        target = raw[steering.base_bmu[1]]
        midpoint = (base + target) / 2.0
        edits = dict(zip(steering.feature_names, midpoint))
        _, state = run_scenario(steering, model, cluster=0, edits=edits)
        return state

    def test_zero_deviation_concentrates_on_new_bmu(self, steering, clouds_som):
        _, state = run_scenario(
            steering, clouds_som, cluster=0,
            edits=dict(zip(steering.feature_names, steering.base_profiles[1])),
        )
        expected = state.current_bmu[0]
        spec = SensitivitySpec(
            cluster=0, deviation={"f1": 0.0, "f2": 0.0}, n_samples=500, seed=4
        )
        histogram = sensitivity(state, clouds_som, spec)
        assert histogram.counts == {expected: 500}

    def test_counts_sum_to_n_samples(self, steering, clouds_som):
        state = self.halfway_state(steering, clouds_som)
        spec = SensitivitySpec(
            cluster=0, deviation={"f1": 1.0, "f2": 1.0}, n_samples=777, seed=0
        )
        histogram = sensitivity(state, clouds_som, spec)
        assert sum(histogram.counts.values()) == 777

    def test_full_deviation_spreads_over_both_neurons(self, steering, clouds_som):
        state = self.halfway_state(steering, clouds_som)
        spec = SensitivitySpec(
            cluster=0, deviation={"f1": 1.0, "f2": 1.0}, n_samples=1000, seed=2
        )
        histogram = sensitivity(state, clouds_som, spec)
        assert set(histogram.counts) == {0, 1}
        assert min(histogram.counts.values()) > 100

    def test_matches_independent_sampler(self, steering, clouds_som):
        state = self.halfway_state(steering, clouds_som)
        deviation = {"f1": 1.0, "f2": 0.5}
        spec = SensitivitySpec(cluster=0, deviation=deviation, n_samples=400, seed=9)
        histogram = sensitivity(state, clouds_som, spec)
        expected = independent_sensitivity_counts(
            base_profile=state.base_profiles[0],
            edited_profile=state.edited_profiles[0],
            deviation=deviation,
            feature_names=state.feature_names,
            weights=clouds_som.weights,
            scaling_mean=clouds_som.scaling.mean,
            scaling_sd=clouds_som.scaling.sd,
            scaling_enabled=clouds_som.scaling.enabled,
            n_samples=400,
            seed=9,
        )
        assert histogram.counts == expected

    def test_distinct_neuron_count_monotone_in_deviation(self, steering, clouds_som):
        state = self.halfway_state(steering, clouds_som)
        reached = []
        for d in (0.0, 0.25, 0.5, 1.0):
            spec = SensitivitySpec(
                cluster=0, deviation={"f1": d, "f2": d}, n_samples=400, seed=11
            )
            reached.append(len(sensitivity(state, clouds_som, spec).counts))
        assert reached == sorted(reached)

    def test_same_seed_reproduces_exactly(self, steering, clouds_som):
        state = self.halfway_state(steering, clouds_som)
        spec = SensitivitySpec(cluster=0, deviation={"f1": 0.8}, n_samples=300, seed=5)
        assert sensitivity(state, clouds_som, spec) == sensitivity(state, clouds_som, spec)

    def test_no_edits_to_perturb(self, steering, clouds_som):
        spec = SensitivitySpec(cluster=0, deviation={}, n_samples=10, seed=0)
        with pytest.raises(NoEditsToPerturb):
            sensitivity(steering, clouds_som, spec)

    def test_invalid_deviation(self, steering, clouds_som):
        _, state = run_scenario(steering, clouds_som, cluster=0, edits={"f1": 5.0})
        with pytest.raises(InvalidDeviation):
            sensitivity(state, clouds_som, SensitivitySpec(0, {"f1": 1.5}, 10, 0))
        with pytest.raises(InvalidDeviation):
            # f2 was not edited
            sensitivity(state, clouds_som, SensitivitySpec(0, {"f2": 0.5}, 10, 0))

    @settings(max_examples=20, deadline=None)
    @given(
        n_samples=st.integers(1, 300),
        seed=st.integers(0, 2**31),
        d=st.floats(0.0, 1.0),
    )
    def test_counts_always_sum_property(self, clouds_som, clouds_kmeans, n_samples, seed, d):
        state = setup(clouds_som, clouds_kmeans)
        _, state = run_scenario(state, clouds_som, cluster=0, edits={"f1": 5.0})
        spec = SensitivitySpec(cluster=0, deviation={"f1": d}, n_samples=n_samples, seed=seed)
        histogram = sensitivity(state, clouds_som, spec)
        assert sum(histogram.counts.values()) == n_samples

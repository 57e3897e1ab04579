"""
Tests for point features, the affordance network, point picking and training.
"""

import math

import numpy as np
import pytest

from src.affordance.features import compute_features, pointcloud_from
from src.affordance.network import (
    BCE_EPS,
    bce_loss,
    forward,
    grad,
    init_model,
    mean_loss,
    step,
)
from src.affordance.selection import AffordanceMap, pick_retrieval_point
from src.affordance.training import (
    collect_scene,
    collect_training_data,
    dataset_arrays,
    evaluate_accuracy,
    majority_baseline,
    split_dataset,
    train,
)
from src.models.affordance_models import FEATURE_DIM, NetworkConfig, TrainHyper, TrainingExample
from src.models.perception_models import SegmenterConfig
from src.models.pile_models import BoundaryKind, OracleConfig, SceneGenConfig
from src.perception.masks import MaskSet
from src.perception.segmenter import segment
from src.sim.render import render_observation
from src.utils.errors import DomainError
from tests.helpers import BLUE, RED, garment, make_scene, rect


def numeric_gradient(model, x, y, h=1e-5):
    params = model.parameters()
    result = []
    for index, param in enumerate(params):
        numeric = np.zeros_like(param)
        for pos in np.ndindex(param.shape):
            shifted = [p.copy() for p in params]
            shifted[index][pos] += h
            plus = mean_loss(model.with_parameters(shifted), x, y)
            shifted[index][pos] -= 2 * h
            minus = mean_loss(model.with_parameters(shifted), x, y)
            numeric[pos] = (plus - minus) / (2 * h)
        result.append(numeric)
    return result


def with_random_biases(model, rng):
    params = model.parameters()
    for index in range(1, len(params), 2):
        shape = params[index].shape
        params[index] = rng.uniform(0.05, 0.2, size=shape) * rng.choice([-1.0, 1.0], size=shape)
    return model.with_parameters(params)


def small_scene():
    return make_scene([garment(0, rect(4, 4, 8, 8), RED), garment(1, rect(8, 8, 8, 8), BLUE)])


class TestLoss:
    """Test the binary cross entropy."""

    @pytest.mark.parametrize("label", [0, 1])
    def test_half_prediction_costs_ln2(self, label):
        assert bce_loss(0.5, label) == pytest.approx(math.log(2), abs=1e-12)

    def test_clamped_at_extremes(self):
        assert bce_loss(0.0, 1) == pytest.approx(-math.log(BCE_EPS))
        assert math.isfinite(bce_loss(1.0, 0))

    def test_elementwise(self):
        losses = bce_loss(np.array([0.9, 0.1]), np.array([1, 1]))
        assert losses.shape == (2,)
        assert losses[0] < losses[1]


class TestNetwork:
    """Test the forward pass and analytic gradient."""

    def test_forward_in_unit_interval(self):
        model = init_model(NetworkConfig().layer_widths, 0)
        scores = forward(model, np.random.default_rng(0).random((50, FEATURE_DIM)))
        assert scores.shape == (50,)
        assert ((scores > 0) & (scores < 1)).all()

    def test_forward_empty(self):
        model = init_model(NetworkConfig().layer_widths, 0)
        assert forward(model, np.zeros((0, FEATURE_DIM))).shape == (0,)

    def test_forward_rejects_wrong_width(self):
        model = init_model(NetworkConfig().layer_widths, 0)
        with pytest.raises(DomainError):
            forward(model, np.zeros((3, FEATURE_DIM + 1)))

    def test_widths_must_end_in_one(self):
        with pytest.raises(DomainError):
            init_model([FEATURE_DIM, 4, 2], 0)

    @pytest.mark.parametrize("seed", range(100))
    def test_gradient_matches_finite_differences(self, seed):
        rng = np.random.default_rng(seed)
        model = with_random_biases(init_model([FEATURE_DIM, 5, 4, 1], seed), rng)
        x = rng.random((8, FEATURE_DIM))
        y = rng.integers(0, 2, size=8).astype(np.float64)
        analytic = np.concatenate([p.ravel() for p in grad(model, x, y).parameters()])
        numeric = np.concatenate([p.ravel() for p in numeric_gradient(model, x, y)])
        assert np.linalg.norm(analytic - numeric) <= 1e-4 * max(np.linalg.norm(numeric), 1e-8)

    def test_gradient_needs_batch(self):
        model = init_model(NetworkConfig().layer_widths, 0)
        with pytest.raises(DomainError):
            grad(model, np.zeros((0, FEATURE_DIM)), np.zeros(0))

    def test_step_descends(self):
        rng = np.random.default_rng(1)
        model = init_model([FEATURE_DIM, 8, 1], 1)
        x = rng.random((32, FEATURE_DIM))
        y = (x[:, 0] > 0.5).astype(np.float64)
        after = step(model, grad(model, x, y), 0.1)
        assert mean_loss(after, x, y) < mean_loss(model, x, y)


class TestFeatures:
    """Test the point cloud and per-point features."""

    def test_pointcloud_covers_garments(self):
        scene = small_scene()
        cloud = pointcloud_from(render_observation(scene))
        assert len(cloud) == 64 + 64 - 16
        assert cloud.points[0] == pytest.approx([4.5 * 0.02, 4.5 * 0.02, 0.005])

    def test_feature_ranges_and_selection_channel(self):
        scene = small_scene()
        obs = render_observation(scene)
        masks = segment(obs, scene, SegmenterConfig.clean(), 0)
        features = compute_features(pointcloud_from(obs), obs, masks, 2, scene.boundary)
        assert features.values.shape == (112, FEATURE_DIM)
        assert ((features.values >= 0) & (features.values <= 1)).all()
        assert int(features.values[:, 0].sum()) == masks.get(2).area

    def test_points_outside_masks_are_dropped(self):
        scene = small_scene()
        obs = render_observation(scene)
        masks = segment(obs, scene, SegmenterConfig.clean(), 0)
        only_first = MaskSet.from_bitmaps([masks.get(1).bitmap], masks.shape)
        features = compute_features(pointcloud_from(obs), obs, only_first, 1, scene.boundary)
        assert len(features) == only_first.get(1).area


class TestPointSelection:
    """Test argmax grasp point selection."""

    def test_argmax_within_selected_mask(self):
        scene = small_scene()
        obs = render_observation(scene)
        masks = segment(obs, scene, SegmenterConfig.clean(), 0)
        cloud = pointcloud_from(obs)
        scores = np.zeros(len(cloud))
        scores[0] = 1.0
        target = np.flatnonzero((cloud.cells == [12, 12]).all(axis=1))[0]
        scores[target] = 0.9
        cell = pick_retrieval_point(AffordanceMap(scores, cloud.cells), masks, 2)
        assert cell == (12, 12)

    def test_ties_go_to_first_cell(self):
        scene = small_scene()
        obs = render_observation(scene)
        masks = segment(obs, scene, SegmenterConfig.clean(), 0)
        cloud = pointcloud_from(obs)
        cell = pick_retrieval_point(AffordanceMap(np.ones(len(cloud)), cloud.cells), masks, 2)
        assert cell == (8, 8)

    def test_mask_without_points(self):
        scene = small_scene()
        obs = render_observation(scene)
        masks = segment(obs, scene, SegmenterConfig.clean(), 0)
        empty = AffordanceMap(np.zeros(0), np.zeros((0, 2), dtype=np.int64))
        with pytest.raises(DomainError):
            pick_retrieval_point(empty, masks, 1)


class TestTraining:
    """Test data collection and training."""

    def example(self, value, label):
        return TrainingExample(features=(value,) * FEATURE_DIM, label=label, scene_seed=0, cell=(0, 0))

    def test_train_is_deterministic_and_learns(self):
        dataset = [self.example(v, int(v > 0.5)) for v in np.linspace(0.0, 1.0, 40)]
        hyper = TrainHyper(lr=0.5, epochs=200, batch_size=8, seed=3)
        widths = NetworkConfig(hidden_width=16, hidden_layers=1).layer_widths
        first = train(init_model(widths, 0), dataset, hyper)
        second = train(init_model(widths, 0), dataset, hyper)
        for a, b in zip(first.parameters(), second.parameters()):
            np.testing.assert_array_equal(a, b)
        x, y = dataset_arrays(dataset)
        assert evaluate_accuracy(first, x, y) >= 0.8

    @pytest.mark.parametrize("lr", [0.05, 5.0, 500.0])
    def test_final_loss_never_exceeds_start(self, lr):
        rng = np.random.default_rng(7)
        dataset = [self.example(float(v), int(rng.random() < 0.5)) for v in rng.random(60)]
        model = init_model(NetworkConfig(hidden_width=8, hidden_layers=2).layer_widths, 1)
        trained = train(model, dataset, TrainHyper(lr=lr, epochs=20, batch_size=4, seed=1))
        x, y = dataset_arrays(dataset)
        assert mean_loss(trained, x, y) <= mean_loss(model, x, y)

    def test_zero_epochs_returns_start_model(self):
        dataset = [self.example(0.2, 0), self.example(0.8, 1)]
        model = init_model(NetworkConfig(hidden_width=4, hidden_layers=1).layer_widths, 0)
        assert train(model, dataset, TrainHyper(epochs=0)) is model

    def test_train_empty(self):
        with pytest.raises(DomainError):
            train(init_model(NetworkConfig().layer_widths, 0), [], TrainHyper())

    def test_majority_baseline(self):
        assert majority_baseline(np.array([1, 0, 0, 0])) == 0.75
        with pytest.raises(DomainError):
            majority_baseline(np.array([]))

    def test_split_dataset(self):
        dataset = [self.example(0.5, i % 2) for i in range(10)]
        train_set, held_out = split_dataset(dataset, 0.2, 0)
        assert len(train_set) == 8 and len(held_out) == 2
        with pytest.raises(DomainError):
            split_dataset(dataset, 1.0, 0)

    def test_collect_scene_labels_with_oracle(self):
        config = SceneGenConfig.for_boundary(BoundaryKind.OPEN, 4, 6)
        examples = collect_scene(config, 5, 16, SegmenterConfig.clean(), OracleConfig())
        assert len(examples) == 16
        assert all(e.features[0] == 1.0 for e in examples)
        assert all(e.scene_seed == 5 for e in examples)

    def test_collection_independent_of_workers(self):
        config = SceneGenConfig.for_boundary(BoundaryKind.CLOSED)
        serial = collect_training_data(config, 3, 8, seed=1, workers=1)
        parallel = collect_training_data(config, 3, 8, seed=1, workers=2)
        assert serial == parallel
        assert len(serial) == 24

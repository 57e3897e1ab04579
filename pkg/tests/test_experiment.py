"""
Tests for the experiment runner and ablation sweeps.
"""

from unittest.mock import patch

import pytest

from src.affordance.network import init_model
from src.data.loaders.model_store import load_model, save_model
from src.harness.experiment import (
    ABLATION_VARIANTS,
    build_components,
    run_ablation_sweep,
    run_experiment,
    run_single_episode,
)
from src.models.affordance_models import NetworkConfig
from src.models.episode_models import Ablation
from src.models.experiment_models import ExperimentConfig
from src.models.pile_models import BoundaryKind
from src.models.reasoning_models import TargetDescriptor, TaskKind, TaskSpec
from src.reasoning.privileged import PrivilegedReasoner
from src.sim.pile import generate_scene
from src.utils.errors import ConfigError


def small_config(**overrides):
    values = dict(
        count_min=2,
        count_max=3,
        episodes=2,
        base_seed=5,
        ablations=frozenset({Ablation.AFFORDANCE}),
        reasoner="privileged",
    )
    values.update(overrides)
    return ExperimentConfig(**values)


@pytest.fixture
def model_path(tmp_path):
    path = tmp_path / "model.json"
    save_model(init_model(NetworkConfig().layer_widths, 0), path)
    return str(path)


class TestBuildComponents:
    """Test component construction from a config."""

    def test_model_required(self):
        with pytest.raises(ConfigError):
            build_components(small_config(ablations=frozenset()))

    def test_privileged_without_model(self):
        components = build_components(small_config())
        assert isinstance(components.reasoner, PrivilegedReasoner)
        assert components.model is None

    def test_loads_model(self, model_path):
        components = build_components(small_config(ablations=frozenset(), model_path=model_path))
        assert components.model.layer_widths == tuple(NetworkConfig().layer_widths)


class TestSceneConfig:
    """Test the scene settings an experiment hands to generation."""

    def test_wall_margin_reaches_generated_scenes(self):
        config = small_config(boundary=BoundaryKind.CLOSED, wall_margin=4)
        assert config.scene_config().wall_margin == 4
        assert generate_scene(config.scene_config(), 0).boundary.wall_margin == 4

    def test_default_wall_margin(self):
        assert small_config().scene_config().wall_margin == 2


class TestRunExperiment:
    """Test episode batches."""

    def test_episode_seeds(self):
        logs, report = run_experiment(small_config(episodes=3))
        assert [log.scene_seed for log in logs] == [5, 6, 7]
        assert report.episodes == 3
        assert report.loaded == sum(log.initial_garments for log in logs)

    def test_written_logs_are_reproducible(self, tmp_path):
        first, second = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        run_experiment(small_config(), first)
        run_experiment(small_config(), second)
        assert first.read_bytes() == second.read_bytes()
        assert first.read_text().count('"type":"episode"') == 2

    def test_independent_of_workers(self, tmp_path):
        serial, parallel = tmp_path / "serial.jsonl", tmp_path / "parallel.jsonl"
        run_experiment(small_config(boundary=BoundaryKind.CLOSED), serial)
        run_experiment(small_config(boundary=BoundaryKind.CLOSED, workers=2), parallel)
        assert serial.read_bytes() == parallel.read_bytes()

    def test_model_loaded_once_per_experiment(self, model_path):
        config = small_config(episodes=3, ablations=frozenset(), model_path=model_path)
        with patch("src.harness.experiment.load_model", wraps=load_model) as loader:
            logs, _ = run_experiment(config)
        assert len(logs) == 3
        assert loader.call_count == 1

    def test_single_episode_matches_batch(self):
        config = small_config(episodes=2)
        logs, _ = run_experiment(config)
        assert run_single_episode(config, 1) == logs[1]

    def test_task_b(self):
        task = TaskSpec(kind=TaskKind.B, target=TargetDescriptor(color="red"))
        logs, report = run_experiment(small_config(task=task))
        assert all(log.task.kind == TaskKind.B for log in logs)
        assert report.tasks == 2
        assert report.asr_a is None


class TestAblationSweep:
    """Test the named ablation variants."""

    def test_variant_table(self):
        assert len(ABLATION_VARIANTS) == 5
        assert ABLATION_VARIANTS["w/o affordance & dual arm"] == {Ablation.AFFORDANCE, Ablation.DUAL_ARM}

    def test_sweep_writes_one_file_per_variant(self, model_path, tmp_path):
        config = small_config(episodes=1, model_path=model_path)
        reports = run_ablation_sweep(config, include_full=True, out_dir=tmp_path)
        assert [r.label for r in reports] == ["full"] + list(ABLATION_VARIANTS)
        assert len(list(tmp_path.glob("*.jsonl"))) == 6
        assert (tmp_path / "wo-affordance-dual-arm.jsonl").exists()

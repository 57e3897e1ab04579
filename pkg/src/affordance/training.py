"""
Affordance training.

Labels come from the grasp oracle: every sampled point of the selected mask is
grasped once on an untouched copy of the scene and labelled 1 iff exactly one
garment comes out cleanly. Features use the whole featurized cloud so the
context channels see the global pile structure.
"""

from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np
import structlog

from src.affordance.features import compute_features, pointcloud_from
from src.affordance.network import AffordanceModel, forward, grad, mean_loss, step
from src.models.affordance_models import TrainHyper, TrainingExample
from src.models.perception_models import SegmenterConfig
from src.models.pile_models import GraspResult, OracleConfig, SceneGenConfig
from src.models.reasoning_models import TaskKind, TaskSpec
from src.perception.masks import filter_masks, nms
from src.perception.segmenter import segment
from src.reasoning.base import SceneView
from src.reasoning.privileged import PrivilegedReasoner
from src.reasoning.summaries import summarize_masks
from src.sim.oracle import simulate_single_grasp
from src.sim.pile import generate_scene
from src.sim.render import render_observation
from src.utils.errors import DomainError
from src.utils.seeding import derive_seed

logger = structlog.get_logger()

Dataset = List[TrainingExample]


def dataset_arrays(dataset: Sequence[TrainingExample]) -> Tuple[np.ndarray, np.ndarray]:
    x = np.array([e.features for e in dataset], dtype=np.float64).reshape(len(dataset), -1)
    y = np.array([e.label for e in dataset], dtype=np.float64)
    return x, y


def train(model: AffordanceModel, dataset: Sequence[TrainingExample], hyper: TrainHyper) -> AffordanceModel:
    """Mini-batch gradient descent with a seeded shuffle each epoch.

    Returns the parameters with the lowest full-dataset loss seen at an epoch
    boundary, so the result never scores worse than the starting model.
    """
    if not dataset:
        raise DomainError("Cannot train on an empty dataset")
    x, y = dataset_arrays(dataset)
    rng = np.random.default_rng(hyper.seed)
    start_loss = mean_loss(model, x, y)
    best, best_loss, best_epoch = model, start_loss, 0

    for epoch in range(hyper.epochs):
        order = rng.permutation(len(x))
        for begin in range(0, len(order), hyper.batch_size):
            batch = order[begin:begin + hyper.batch_size]
            model = step(model, grad(model, x[batch], y[batch]), hyper.lr)
        loss = mean_loss(model, x, y)
        if loss < best_loss:
            best, best_loss, best_epoch = model, loss, epoch + 1
        if (epoch + 1) % 10 == 0:
            logger.debug("Training epoch finished", epoch=epoch + 1, loss=loss)

    logger.info(
        "Affordance training finished",
        examples=len(x),
        epochs=hyper.epochs,
        best_epoch=best_epoch,
        start_loss=round(start_loss, 6),
        final_loss=round(best_loss, 6),
    )
    return best


def evaluate_accuracy(
    model: AffordanceModel, features: np.ndarray, labels: np.ndarray, threshold: float = 0.5
) -> float:
    if len(labels) == 0:
        raise DomainError("Cannot evaluate on an empty set")
    predictions = forward(model, features) >= threshold
    return float(np.mean(predictions == (np.asarray(labels) >= 0.5)))


def majority_baseline(labels: np.ndarray) -> float:
    """Accuracy of always predicting the more frequent label."""
    if len(labels) == 0:
        raise DomainError("Cannot compute a baseline on an empty set")
    positive = float(np.mean(np.asarray(labels) >= 0.5))
    return max(positive, 1.0 - positive)


def split_dataset(
    dataset: Sequence[TrainingExample], holdout: float, seed: int
) -> Tuple[Dataset, Dataset]:
    if not 0.0 < holdout < 1.0:
        raise DomainError("Holdout fraction must lie in (0, 1)")
    order = np.random.default_rng(seed).permutation(len(dataset))
    cut = len(dataset) - int(round(holdout * len(dataset)))
    return [dataset[i] for i in order[:cut]], [dataset[i] for i in order[cut:]]


def collect_scene(
    config: SceneGenConfig,
    scene_seed: int,
    samples: int,
    segmenter: SegmenterConfig,
    oracle: OracleConfig,
) -> Dataset:
    """Labelled examples from one generated scene."""
    scene = generate_scene(config, scene_seed)
    if not scene.stack:
        return []
    observation = render_observation(scene)
    raw = segment(observation, scene, segmenter, derive_seed(scene_seed, "segment"))
    masks = nms(
        filter_masks(raw, observation.depth, segmenter, observation.layer_thickness, observation.floor_offset),
        segmenter.nms_iou,
    )
    if len(masks) == 0:
        return []

    view = SceneView(observation, masks, summarize_masks(observation, masks), scene)
    selected = PrivilegedReasoner(l_arm=oracle.l_arm).select_target(view, TaskSpec(kind=TaskKind.A))
    features = compute_features(pointcloud_from(observation), observation, masks, selected, scene.boundary)
    in_mask = np.flatnonzero(features.values[:, 0] == 1.0)
    if len(in_mask) == 0:
        return []

    rng = np.random.default_rng(derive_seed(scene_seed, "samples"))
    examples = []
    for index in rng.choice(in_mask, size=samples, replace=True):
        cell = (int(features.cells[index, 0]), int(features.cells[index, 1]))
        outcome = simulate_single_grasp(scene, cell, oracle)
        examples.append(
            TrainingExample(
                features=tuple(float(v) for v in features.values[index]),
                label=int(outcome.result == GraspResult.SUCCESS),
                scene_seed=scene_seed,
                cell=cell,
            )
        )
    return examples


def _collect_job(job: Tuple[SceneGenConfig, int, int, SegmenterConfig, OracleConfig]) -> Dataset:
    return collect_scene(*job)


def collect_training_data(
    config: SceneGenConfig,
    n_scenes: int,
    samples_per_scene: int,
    seed: int,
    segmenter: Optional[SegmenterConfig] = None,
    oracle: Optional[OracleConfig] = None,
    workers: int = 1,
) -> Dataset:
    """Examples from n_scenes seeded scenes, in scene order regardless of worker count."""
    segmenter = segmenter or SegmenterConfig()
    oracle = oracle or OracleConfig()
    jobs = [
        (config, derive_seed(seed, "scene", i), samples_per_scene, segmenter, oracle)
        for i in range(n_scenes)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            per_scene = list(executor.map(_collect_job, jobs))
    else:
        per_scene = [_collect_job(job) for job in jobs]

    dataset = [example for examples in per_scene for example in examples]
    positives = sum(e.label for e in dataset)
    logger.info(
        "Training data collected",
        scenes=n_scenes,
        examples=len(dataset),
        positive_rate=round(positives / len(dataset), 4) if dataset else None,
    )
    return dataset

"""
Affordance Model and Dataset Files

- Model: JSON {layer_widths, weights (row-major per layer), biases, feature_version}
- Dataset: JSONL, one example per line {features, label, scene_seed, cell}
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Sequence, Union

import numpy as np
import structlog

from src.affordance.network import AffordanceModel
from src.models.affordance_models import FEATURE_VERSION, TrainingExample
from src.utils.errors import ConfigError

logger = structlog.get_logger()

PathLike = Union[str, Path]


def model_to_dict(model: AffordanceModel) -> Dict[str, Any]:
    return {
        "layer_widths": list(model.layer_widths),
        "weights": [w.ravel().tolist() for w in model.weights],
        "biases": [b.tolist() for b in model.biases],
        "feature_version": model.feature_version,
    }


def model_from_dict(data: Dict[str, Any]) -> AffordanceModel:
    if data.get("feature_version") != FEATURE_VERSION:
        raise ConfigError(
            f"Model features '{data.get('feature_version')}' do not match '{FEATURE_VERSION}'"
        )
    widths = tuple(int(w) for w in data["layer_widths"])
    return AffordanceModel(
        layer_widths=widths,
        weights=tuple(
            np.asarray(w, dtype=np.float64).reshape(widths[i], widths[i + 1])
            for i, w in enumerate(data["weights"])
        ),
        biases=tuple(np.asarray(b, dtype=np.float64) for b in data["biases"]),
        feature_version=data["feature_version"],
    )


def save_model(model: AffordanceModel, path: PathLike) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), sort_keys=True) + "\n")
    logger.info("Affordance model saved", path=str(path), layer_widths=list(model.layer_widths))


def load_model(path: PathLike) -> AffordanceModel:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Affordance model file not found: {path}")
    try:
        return model_from_dict(json.loads(path.read_text()))
    except (KeyError, ValueError, TypeError) as e:
        raise ConfigError(f"Invalid affordance model file {path}: {e}") from e


def save_dataset(dataset: Sequence[TrainingExample], path: PathLike) -> None:
    with Path(path).open("w") as handle:
        for example in dataset:
            handle.write(json.dumps(example.model_dump(mode="json"), sort_keys=True) + "\n")
    logger.info("Dataset saved", path=str(path), examples=len(dataset))


def load_dataset(path: PathLike) -> List[TrainingExample]:
    with Path(path).open() as handle:
        return [TrainingExample.model_validate_json(line) for line in handle if line.strip()]

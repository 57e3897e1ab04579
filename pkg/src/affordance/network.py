"""
Dense affordance network.

Rectifier hidden layers and a sigmoid head score every featurized point in
(0, 1). Training minimises the mean binary cross entropy of the scores against
grasp labels; gradients are computed analytically.
"""

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from scipy.special import expit

from src.models.affordance_models import FEATURE_VERSION
from src.utils.errors import DomainError

BCE_EPS = 1e-7
INIT_BIAS = 0.01


@dataclass(frozen=True, eq=False)
class AffordanceModel:
    layer_widths: Tuple[int, ...]
    weights: Tuple[np.ndarray, ...]
    biases: Tuple[np.ndarray, ...]
    feature_version: str = FEATURE_VERSION

    def __post_init__(self) -> None:
        widths = self.layer_widths
        if len(widths) < 2 or widths[-1] != 1:
            raise DomainError(f"Layer widths must end in a single output, got {list(widths)}")
        if len(self.weights) != len(widths) - 1 or len(self.biases) != len(widths) - 1:
            raise DomainError("One weight matrix and bias vector per layer")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.shape != (widths[i], widths[i + 1]) or b.shape != (widths[i + 1],):
                raise DomainError(f"Layer {i} parameters do not match widths {list(widths)}")

    @property
    def input_dim(self) -> int:
        return self.layer_widths[0]

    def parameters(self) -> List[np.ndarray]:
        return [p for pair in zip(self.weights, self.biases) for p in pair]

    def with_parameters(self, params: Sequence[np.ndarray]) -> "AffordanceModel":
        return AffordanceModel(
            layer_widths=self.layer_widths,
            weights=tuple(np.array(p, dtype=np.float64) for p in params[0::2]),
            biases=tuple(np.array(p, dtype=np.float64) for p in params[1::2]),
            feature_version=self.feature_version,
        )


@dataclass(frozen=True, eq=False)
class Gradient:
    weights: Tuple[np.ndarray, ...]
    biases: Tuple[np.ndarray, ...]

    def parameters(self) -> List[np.ndarray]:
        return [p for pair in zip(self.weights, self.biases) for p in pair]

    def norm(self) -> float:
        return float(np.sqrt(sum(float((p ** 2).sum()) for p in self.parameters())))


def init_model(layer_widths: Sequence[int], seed: int) -> AffordanceModel:
    """He-initialised weights, small positive biases so no unit starts on the ReLU kink."""
    rng = np.random.default_rng(seed)
    widths = tuple(int(w) for w in layer_widths)
    weights = tuple(
        rng.normal(0.0, np.sqrt(2.0 / widths[i]), size=(widths[i], widths[i + 1]))
        for i in range(len(widths) - 1)
    )
    biases = tuple(np.full(widths[i + 1], INIT_BIAS) for i in range(len(widths) - 1))
    return AffordanceModel(layer_widths=widths, weights=weights, biases=biases)


def _check_input(model: AffordanceModel, features: np.ndarray) -> np.ndarray:
    x = np.asarray(features, dtype=np.float64)
    if x.size == 0:
        return x.reshape(0, model.input_dim)
    if x.ndim != 2 or x.shape[1] != model.input_dim:
        raise DomainError(f"Expected features of width {model.input_dim}, got shape {x.shape}")
    return x


def _activations(model: AffordanceModel, x: np.ndarray) -> List[np.ndarray]:
    outputs = [x]
    last = len(model.weights) - 1
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        z = outputs[-1] @ w + b
        outputs.append(expit(z) if i == last else np.maximum(z, 0.0))
    return outputs


def forward(model: AffordanceModel, features: np.ndarray) -> np.ndarray:
    """Scores in (0, 1), one per feature row."""
    x = _check_input(model, features)
    if len(x) == 0:
        return np.zeros(0)
    return _activations(model, x)[-1][:, 0]


def bce_loss(pred, label):
    """Elementwise -(g log p + (1 - g) log(1 - p)) with p clamped to [eps, 1 - eps]."""
    p = np.clip(np.asarray(pred, dtype=np.float64), BCE_EPS, 1.0 - BCE_EPS)
    g = np.asarray(label, dtype=np.float64)
    loss = -(g * np.log(p) + (1.0 - g) * np.log1p(-p))
    return float(loss) if loss.ndim == 0 else loss


def mean_loss(model: AffordanceModel, features: np.ndarray, labels: np.ndarray) -> float:
    return float(np.mean(bce_loss(forward(model, features), labels)))


def grad(model: AffordanceModel, features: np.ndarray, labels: np.ndarray) -> Gradient:
    """Analytic gradient of the mean clamped BCE over a batch."""
    x = _check_input(model, features)
    if len(x) == 0:
        raise DomainError("Gradient needs a non-empty batch")
    g = np.asarray(labels, dtype=np.float64).reshape(-1)
    outputs = _activations(model, x)
    p = outputs[-1][:, 0]
    active = (p > BCE_EPS) & (p < 1.0 - BCE_EPS)
    delta = ((p - g) * active / len(x))[:, None]

    dw: List[np.ndarray] = []
    db: List[np.ndarray] = []
    for i in range(len(model.weights) - 1, -1, -1):
        dw.append(outputs[i].T @ delta)
        db.append(delta.sum(axis=0))
        if i > 0:
            delta = (delta @ model.weights[i].T) * (outputs[i] > 0.0)
    return Gradient(weights=tuple(reversed(dw)), biases=tuple(reversed(db)))


def step(model: AffordanceModel, gradient: Gradient, lr: float) -> AffordanceModel:
    return model.with_parameters(
        [p - lr * d for p, d in zip(model.parameters(), gradient.parameters())]
    )

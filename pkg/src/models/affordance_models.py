"""
Affordance Models

Training hyperparameters and persisted training examples.
"""

from typing import List, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

FEATURE_DIM = 7
FEATURE_VERSION = "handcrafted-v1"


class TrainHyper(BaseModel):
    model_config = ConfigDict(frozen=True)

    lr: float = Field(default=0.05, ge=0.0, description="Gradient descent step size")
    epochs: int = Field(default=50, ge=0, description="Passes over the dataset")
    batch_size: int = Field(default=64, ge=1, description="Mini-batch size")
    seed: int = Field(default=0, ge=0, description="Shuffling seed")


class NetworkConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    hidden_width: int = Field(default=32, ge=1, description="Width of each hidden layer")
    hidden_layers: int = Field(default=2, ge=0, description="Number of hidden layers")

    @property
    def layer_widths(self) -> List[int]:
        return [FEATURE_DIM] + [self.hidden_width] * self.hidden_layers + [1]


class TrainingExample(BaseModel):
    """One labelled point: features, grasp label and where it came from."""

    model_config = ConfigDict(frozen=True)

    features: Tuple[float, ...] = Field(..., description="Feature vector, components in [0, 1]")
    label: int = Field(..., ge=0, le=1, description="1 iff a single-arm grasp here retrieves one garment")
    scene_seed: int = Field(..., ge=0, description="Seed of the generated scene")
    cell: Tuple[int, int] = Field(..., description="Grasp cell (x, y)")

    @field_validator("features")
    @classmethod
    def validate_features(cls, v: Tuple[float, ...]) -> Tuple[float, ...]:
        if len(v) != FEATURE_DIM:
            raise ValueError(f"Expected {FEATURE_DIM} features, got {len(v)}")
        if any(not 0.0 <= f <= 1.0 for f in v):
            raise ValueError("Feature components must lie in [0, 1]")
        return v

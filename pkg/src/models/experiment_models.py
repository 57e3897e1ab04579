"""
Experiment Models

Experiment configuration and the metrics report of a batch of episodes.
"""

from typing import FrozenSet, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.models.episode_models import Ablation, PipelineConfig
from src.models.perception_models import SegmenterConfig
from src.models.pile_models import BoundaryKind, OracleConfig, SceneGenConfig
from src.models.reasoning_models import RuleReasonerConfig, TaskKind, TaskSpec

ReasonerKind = Literal["rule", "privileged", "remote"]


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    label: str = Field(default="full", description="Row label in reports")
    task: TaskSpec = Field(default_factory=lambda: TaskSpec(kind=TaskKind.A))
    boundary: BoundaryKind = Field(default=BoundaryKind.OPEN)
    wall_margin: int = Field(default=2, ge=0, description="Wall collision margin of closed scenes (cells)")
    count_min: Optional[int] = Field(None, ge=0, description="Defaults to the scenario range")
    count_max: Optional[int] = Field(None, ge=0, description="Defaults to the scenario range")
    episodes: int = Field(default=1, ge=1)
    base_seed: int = Field(default=0, ge=0)
    ablations: FrozenSet[Ablation] = Field(default_factory=frozenset)
    reasoner: ReasonerKind = Field(default="rule")
    reasoner_url: Optional[str] = None
    reasoner_timeout_ms: Optional[int] = Field(None, gt=0)
    model_path: Optional[str] = Field(None, description="Affordance model JSON")
    segmenter: SegmenterConfig = Field(default_factory=SegmenterConfig)
    oracle: OracleConfig = Field(default_factory=OracleConfig)
    rule: Optional[RuleReasonerConfig] = None
    workers: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def validate_counts(self) -> "ExperimentConfig":
        if self.count_min is not None and self.count_max is not None and self.count_min > self.count_max:
            raise ValueError("count_min must not exceed count_max")
        return self

    def scene_config(self) -> SceneGenConfig:
        return SceneGenConfig.for_boundary(
            self.boundary, self.count_min, self.count_max, wall_margin=self.wall_margin
        )

    def pipeline_config(self) -> PipelineConfig:
        return PipelineConfig(ablations=self.ablations, segmenter=self.segmenter, oracle=self.oracle)


class MetricsReport(BaseModel):
    """Ratios are None where their denominator is zero."""

    label: str = "full"
    asr_a: Optional[float] = None
    asr_b: Optional[float] = None
    ams: Optional[float] = None
    pdr: Optional[float] = None
    episodes: int = 0
    retrieved: int = 0
    loaded: int = 0
    completed: int = 0
    tasks: int = 0
    steps: int = 0
    dual_triggers: int = 0
    eligible_attempts: int = 0
    attempts: int = 0

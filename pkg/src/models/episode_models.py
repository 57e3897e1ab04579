"""
Episode Models

Pipeline configuration, phases and the records every attempt and episode
leave behind. These records are the unit of metrics and persistence.
"""

from enum import Enum
from typing import Dict, FrozenSet, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.models.perception_models import SegmenterConfig
from src.models.pile_models import GraspOutcome, OracleConfig
from src.models.reasoning_models import CoopAnswer, TaskSpec


class ArmId(str, Enum):
    LEFT = "Left"
    RIGHT = "Right"


class PipelinePhase(str, Enum):
    OBSERVE = "Observe"
    SEGMENT = "Segment"
    FINE_TUNE = "FineTune"
    SELECT = "Select"
    AFFORD = "Afford"
    GRASP_LIFT = "GraspLift"
    COOP_DECIDE = "CoopDecide"
    SINGLE_DELIVER = "SingleDeliver"
    DUAL_GRASP_DELIVER = "DualGraspDeliver"
    ABORT_ATTEMPT = "AbortAttempt"
    DONE = "Done"


class TerminalStatus(str, Enum):
    RETRIEVED = "Retrieved"
    ABORTED = "Aborted"
    FAILED = "Failed"


class Ablation(str, Enum):
    MASK_FINE_TUNING = "mask_fine_tuning"
    AFFORDANCE = "affordance"
    TRACKING_SELECTION = "tracking_selection"
    DUAL_ARM = "dual_arm"


class StepCosts(BaseModel):
    """Motion steps charged per attempt kind."""

    model_config = ConfigDict(frozen=True)

    single: int = Field(default=1, ge=1)
    dual: int = Field(default=2, ge=1)
    abort: int = Field(default=1, ge=1)
    fine_tune: int = Field(default=1, ge=0)


class PipelineConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    ablations: FrozenSet[Ablation] = Field(default_factory=frozenset, description="Disabled components")
    segmenter: SegmenterConfig = Field(default_factory=SegmenterConfig)
    oracle: OracleConfig = Field(default_factory=OracleConfig)
    step_costs: StepCosts = Field(default_factory=StepCosts)
    fine_tune_frames: int = Field(default=6, ge=2, description="Frames of the shake video")
    coop_quantile: float = Field(
        default=0.0, ge=0.0, le=1.0, description="Bottom z-quantile for the cooperative point; 0 takes the minimum"
    )
    max_attempts: Optional[int] = Field(None, ge=1, description="Defaults to 3x the initial garment count")

    def ablated(self, ablation: Ablation) -> bool:
        return ablation in self.ablations

    def snapshot(self) -> Dict[str, object]:
        return {"ablations": sorted(a.value for a in self.ablations)}


class AttemptRecord(BaseModel):
    """Full trace of one retrieval attempt."""

    model_config = ConfigDict(frozen=True)

    attempt: int = Field(..., ge=0, description="Attempt index within the episode")
    phases: List[PipelinePhase] = Field(default_factory=list, description="Phase trace")
    masks_before: int = Field(..., ge=0)
    masks_after: int = Field(..., ge=0)
    fine_tune_triggered: bool = False
    selected_id: Optional[int] = None
    grasp_cell: Optional[Tuple[int, int]] = None
    master_arm: Optional[ArmId] = None
    outcome: Optional[GraspOutcome] = Field(None, description="Outcome that was applied to the pile")
    coop: CoopAnswer = Field(default_factory=lambda: CoopAnswer(x_error=0, x_dual=0))
    coop_queried: bool = Field(False, description="Reasoner answered the cooperation query")
    coop_cell: Optional[Tuple[int, int]] = None
    steps: int = Field(..., ge=1)
    terminal_status: TerminalStatus
    retrieved_id: Optional[int] = Field(None, description="Garment delivered by this attempt")
    failure_reason: Optional[str] = None

    @model_validator(mode="after")
    def validate_coop_cell(self) -> "AttemptRecord":
        if self.coop_cell is not None and not (self.coop.x_dual == 1 and self.coop.x_error == 0):
            raise ValueError("coop_cell requires x_dual = 1 and x_error = 0")
        if (self.terminal_status == TerminalStatus.RETRIEVED) != (self.retrieved_id is not None):
            raise ValueError("retrieved_id is set exactly for Retrieved attempts")
        return self


class EpisodeLog(BaseModel):
    model_config = ConfigDict(frozen=True)

    task: TaskSpec
    scene_seed: int = Field(..., ge=0)
    initial_garments: int = Field(..., ge=0)
    config: Dict[str, object] = Field(default_factory=dict, description="Ablation flags and reasoner")
    attempts: List[AttemptRecord] = Field(default_factory=list)
    task_completed: bool = False
    total_steps: int = Field(default=0, ge=0)
    stopped_on_error: bool = False

    @model_validator(mode="after")
    def validate_steps(self) -> "EpisodeLog":
        if self.total_steps != sum(a.steps for a in self.attempts):
            raise ValueError("total_steps must equal the sum of attempt steps")
        return self

    @property
    def retrieved(self) -> int:
        return sum(1 for a in self.attempts if a.terminal_status == TerminalStatus.RETRIEVED)

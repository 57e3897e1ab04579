"""
Reasoning Models

Pydantic models for what the reasoner sees and answers, and for the
/decide wire protocol spoken by remote reasoners.
"""

from enum import Enum
from typing import List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.models.palette import PALETTE, nearest_palette_color
from src.models.pile_models import GarmentCategory

RGB = Tuple[int, int, int]


class DominantColor(BaseModel):
    model_config = ConfigDict(frozen=True)

    rgb: RGB = Field(..., description="Mean colour of the cluster")
    share: float = Field(..., ge=0.0, le=1.0, description="Fraction of mask pixels in the cluster")


class MaskSummary(BaseModel):
    """Observable description of one numbered mask."""

    model_config = ConfigDict(frozen=True)

    marker_id: int = Field(..., ge=1, description="Numeric marker of the mask")
    area: int = Field(..., ge=1, description="Mask area in cells")
    dominant_colors: List[DominantColor] = Field(..., max_length=3, description="Up to 3 colour clusters")
    raggedness: float = Field(..., gt=0.0, description="perimeter^2 / area")
    mean_depth: float = Field(..., ge=0.0, description="Mean depth over the mask (m)")
    bbox: Tuple[int, int, int, int] = Field(..., description="Inclusive (x0, y0, x1, y1)")
    overlap_ids: List[int] = Field(default_factory=list, description="Masks whose bbox intersects this one")

    @field_validator("dominant_colors")
    @classmethod
    def validate_shares(cls, v: List[DominantColor]) -> List[DominantColor]:
        if sum(c.share for c in v) > 1.0 + 1e-9:
            raise ValueError("Colour shares must sum to at most 1")
        return v


class TaskKind(str, Enum):
    A = "A"
    B = "B"


class TargetDescriptor(BaseModel):
    """Task B target: a palette colour (name or RGB) and optionally a category."""

    model_config = ConfigDict(frozen=True)

    color: Union[str, RGB] = Field(..., description="Palette colour name or RGB triple")
    category: Optional[GarmentCategory] = Field(None, description="Garment category, if known")

    @field_validator("color")
    @classmethod
    def validate_color(cls, v: Union[str, RGB]) -> Union[str, RGB]:
        if isinstance(v, str):
            name = v.strip().lower()
            if name not in PALETTE:
                raise ValueError(f"Unknown palette colour '{v}'")
            return name
        if any(c < 0 or c > 255 for c in v):
            raise ValueError("Colour components must lie in 0-255")
        return v

    @property
    def color_name(self) -> str:
        if isinstance(self.color, str):
            return self.color
        return nearest_palette_color(self.color)


class TaskSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: TaskKind = Field(..., description="A: retrieve everything, B: retrieve one target")
    target: Optional[TargetDescriptor] = Field(None, description="Required for Task B")

    @model_validator(mode="after")
    def validate_target(self) -> "TaskSpec":
        if self.kind == TaskKind.B and self.target is None:
            raise ValueError("Task B requires a target descriptor")
        return self


class CoopAnswer(BaseModel):
    model_config = ConfigDict(frozen=True)

    x_error: Literal[0, 1] = Field(..., description="1 when two or more garments are lifted")
    x_dual: Literal[0, 1] = Field(..., description="1 when the garment needs both arms")


class LiftSummary(BaseModel):
    """Observable description of the lift: picked mask, lifted region and their extents."""

    model_config = ConfigDict(frozen=True)

    grasp_cell: Tuple[int, int] = Field(..., description="Master grasp cell (x, y)")
    picked_area: int = Field(..., ge=0, description="Area of the tracked picked mask")
    lifted_area: int = Field(..., ge=0, description="Area of everything raised above the pile")
    selected_area: int = Field(..., ge=0, description="Area of the selected mask before lifting")
    lifted_colors: List[DominantColor] = Field(default_factory=list, description="Colours of the lifted region")
    hang_extent: float = Field(..., ge=0.0, description="Farthest picked cell from the grasp (m)")
    bbox_extent: float = Field(..., ge=0.0, description="Picked-mask bbox diagonal (m)")


class QueryKind(str, Enum):
    ADJUST = "adjust"
    SELECT = "select"
    COOPERATE = "cooperate"


class ImagePayload(BaseModel):
    border_ppm_b64: Optional[str] = None
    fill_ppm_b64: Optional[str] = None
    post_lift_ppm_b64: Optional[str] = None


class DecideRequest(BaseModel):
    query_kind: QueryKind = Field(..., description="Which decision is requested")
    task: Optional[TaskSpec] = Field(None, description="Task, for select queries")
    mask_summaries: List[MaskSummary] = Field(default_factory=list)
    images: Optional[ImagePayload] = None
    lift: Optional[LiftSummary] = Field(None, description="Lift description, for cooperate queries")


class AdjustResponse(BaseModel):
    model_config = ConfigDict(extra="forbid")

    adjust_ids: List[int]


class SelectResponse(BaseModel):
    model_config = ConfigDict(extra="forbid")

    selected_id: int


class CooperateResponse(CoopAnswer):
    model_config = ConfigDict(frozen=True, extra="forbid")


class RuleReasonerConfig(BaseModel):
    """Thresholds of the observable, rule-based reasoner."""

    model_config = ConfigDict(frozen=True)

    ragged_threshold: float = Field(default=60.0, gt=0.0, description="perimeter^2/area above which a mask is ragged")
    second_color_share: float = Field(
        default=0.25, gt=0.0, le=1.0, description="Share of the second colour that signals a merged mask"
    )
    merge_color_threshold: float = Field(default=40.0, gt=0.0, description="Colours farther apart are distinct")
    lift_color_share: float = Field(
        default=0.05, gt=0.0, le=1.0, description="Min share for a lifted colour to count"
    )
    error_area_ratio: float = Field(
        default=2.0, gt=1.0, description="Lifted area above this multiple of the selection is an error"
    )
    l_arm: float = Field(default=0.35, gt=0.0, description="Single-arm clearance length (m)")
    extent_mode: Literal["hang", "bbox"] = Field(default="bbox", description="How lifted extent is measured")

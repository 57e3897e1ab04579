"""
Perception Models

Configuration of the oracle segmenter and its corruption model.
"""

from pydantic import BaseModel, ConfigDict, Field


class SegmenterConfig(BaseModel):
    """Corruption and mask hygiene parameters."""

    model_config = ConfigDict(frozen=True)

    p_merge: float = Field(default=0.8, ge=0.0, le=1.0, description="Merge probability per candidate pair")
    merge_color_threshold: float = Field(
        default=40.0, gt=0.0, description="Max RGB L-infinity distance for similar colours"
    )
    merge_overlap_threshold: int = Field(
        default=3, gt=0, description="Min shared-boundary cell pairs for a merge candidate"
    )
    p_frag: float = Field(default=0.15, ge=0.0, le=1.0, description="Fragmentation probability per region")
    frag_pieces: int = Field(default=2, ge=2, le=4, description="Pieces a fragmented region splits into")
    min_area: int = Field(default=8, gt=0, description="Masks below this area are fragments")
    planar_eps: float = Field(default=0.002, gt=0.0, description="Depth std below which a mask is planar (m)")
    nms_iou: float = Field(default=0.5, ge=0.0, le=1.0, description="NMS suppression threshold")

    @classmethod
    def clean(cls, **overrides: object) -> "SegmenterConfig":
        """Corruption disabled."""
        return cls(p_merge=0.0, p_frag=0.0, **overrides)

"""
Simulated video tracking.

Each mask is associated on the first frame with the garment whose visible
region it overlaps best; the tracked mask is that garment's visible region
in the last frame.
"""

from typing import List, NamedTuple, Optional, Sequence

import numpy as np
import structlog

from src.models.pile_models import PileScene
from src.perception.masks import MaskSet, bitmap_iou
from src.sim.pile import visible_regions
from src.sim.render import Observation
from src.utils.errors import DomainError

logger = structlog.get_logger()


class Frame(NamedTuple):
    observation: Observation
    scene: PileScene


def associate(bitmap: np.ndarray, scene: PileScene) -> Optional[int]:
    """Garment id with maximal visible-region IoU; ties go to the lower id."""
    best_id: Optional[int] = None
    best_iou = 0.0
    for garment_id, region in sorted(visible_regions(scene).items()):
        iou = bitmap_iou(bitmap, region)
        if iou > best_iou:
            best_id, best_iou = garment_id, iou
    return best_id


def track_masks(frames: Sequence[Frame], masks: MaskSet) -> MaskSet:
    if not frames:
        raise DomainError("Tracking needs at least one frame")
    first, last = frames[0].scene, frames[-1].scene
    last_regions = visible_regions(last)

    tracked: List[np.ndarray] = []
    seen = set()
    for mask in masks:
        garment_id = associate(mask.bitmap, first)
        if garment_id is None or garment_id in seen:
            continue
        seen.add(garment_id)
        region = last_regions.get(garment_id)
        if region is None or not region.any():
            logger.debug("Tracked garment left the view", marker_id=mask.marker_id, garment_id=garment_id)
            continue
        tracked.append(region)
    return MaskSet.from_bitmaps(tracked, frames[-1].observation.shape)

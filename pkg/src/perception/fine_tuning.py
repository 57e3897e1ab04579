"""
Mask fine-tuning.

Masks the reasoner flags are repaired physically: pinch the pile at a random
point inside the flagged masks, lift, shake and release, then track the trusted
masks through the motion and prompt the segmenter again from the image centre
outwards wherever a garment is left uncovered.
"""

from typing import List, Optional, Sequence, Tuple

import numpy as np
import structlog

from src.models.perception_models import SegmenterConfig
from src.models.pile_models import OracleConfig, PileScene
from src.perception.masks import MaskSet, filter_masks, nms, renumber
from src.perception.segmenter import point_prompt_segment
from src.perception.tracking import Frame, track_masks
from src.sim.oracle import shake_perturb
from src.sim.pile import cells_of
from src.sim.render import render_observation
from src.utils.errors import DomainError
from src.utils.seeding import derive_seed

logger = structlog.get_logger()

DEFAULT_SHAKE_FRAMES = 6


def center_scan_order(shape: Tuple[int, int]) -> np.ndarray:
    """Flattened cell indices by distance from the image centre, then row, then column."""
    rows, cols = np.mgrid[0:shape[0], 0:shape[1]]
    distance = np.hypot(cols - (shape[1] - 1) / 2.0, rows - (shape[0] - 1) / 2.0)
    return np.lexsort((cols.ravel(), rows.ravel(), distance.ravel()))


def regenerate_from_center(
    frame: Frame, kept: MaskSet, cfg: SegmenterConfig, seed: int
) -> MaskSet:
    observation, scene = frame
    covered = kept.union()
    garments = observation.covered
    width = observation.shape[1]

    masks = list(kept.masks)
    for flat in center_scan_order(observation.shape):
        y, x = divmod(int(flat), width)
        if not garments[y, x] or covered[y, x]:
            continue
        mask = point_prompt_segment(observation, scene, (x, y), cfg, seed)
        masks.append(mask)
        covered |= mask.bitmap

    combined = renumber(masks, observation.shape)
    filtered = filter_masks(
        combined, observation.depth, cfg, observation.layer_thickness, observation.floor_offset
    )
    return nms(filtered, cfg.nms_iou)


def fine_tune(
    scene: PileScene,
    masks: MaskSet,
    flagged: Sequence[int],
    cfg: SegmenterConfig,
    seed: int,
    oracle: Optional[OracleConfig] = None,
    frames: int = DEFAULT_SHAKE_FRAMES,
) -> Tuple[PileScene, MaskSet]:
    """Shake the flagged region apart and rebuild the mask set on the last frame."""
    flagged_ids = sorted(set(flagged))
    if not flagged_ids:
        raise DomainError("Fine-tuning needs at least one flagged mask")

    region = np.zeros(masks.shape, dtype=bool)
    for marker_id in flagged_ids:
        region |= masks.get(marker_id).bitmap
    candidates = cells_of(region)
    rng = np.random.default_rng(derive_seed(seed, "pinch"))
    pinch = candidates[int(rng.integers(len(candidates)))]

    sequence = shake_perturb(scene, pinch, frames, derive_seed(seed, "shake"), oracle)
    video: List[Frame] = [Frame(render_observation(s), s) for s in sequence]
    trusted = renumber([m for m in masks if m.marker_id not in flagged_ids], masks.shape)
    tracked = track_masks(video, trusted)
    final = regenerate_from_center(video[-1], tracked, cfg, derive_seed(seed, "regenerate"))

    logger.info(
        "Mask fine-tuning finished",
        flagged=flagged_ids,
        pinch=pinch,
        masks_before=len(masks),
        masks_after=len(final),
    )
    return video[-1].scene, final

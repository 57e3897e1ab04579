"""
Observable summaries of masks and lifts.

These are everything the rule-based and remote reasoners get to see: colour
clusters over a fixed palette, shape raggedness, depth and bounding boxes.
"""

from typing import List, Optional, Tuple

import numpy as np

from src.models.palette import palette_indices
from src.models.reasoning_models import DominantColor, LiftSummary, MaskSummary
from src.perception.masks import Cell, MaskSet
from src.sim.render import Observation

MAX_COLORS = 3


def dominant_colors(pixels: np.ndarray, limit: int = MAX_COLORS) -> List[DominantColor]:
    """Palette-histogram clusters, largest first; ties go to the lower palette index."""
    pixels = np.asarray(pixels).reshape(-1, 3)
    if len(pixels) == 0:
        return []
    labels = palette_indices(pixels)
    counts = np.bincount(labels)
    order = sorted(np.flatnonzero(counts), key=lambda i: (-counts[i], i))[:limit]
    colors = []
    for index in order:
        mean = np.rint(pixels[labels == index].astype(np.float64).mean(axis=0)).astype(int)
        colors.append(
            DominantColor(rgb=tuple(int(c) for c in mean), share=float(counts[index]) / len(pixels))
        )
    return colors


def perimeter(bitmap: np.ndarray) -> int:
    """Cell edges between the mask and its outside, grid border included."""
    padded = np.pad(bitmap.astype(np.int8), 1)
    return int(np.abs(np.diff(padded, axis=0)).sum() + np.abs(np.diff(padded, axis=1)).sum())


def bbox_of(bitmap: np.ndarray) -> Tuple[int, int, int, int]:
    rows, cols = np.nonzero(bitmap)
    return (int(cols.min()), int(rows.min()), int(cols.max()), int(rows.max()))


def boxes_intersect(a: Tuple[int, int, int, int], b: Tuple[int, int, int, int]) -> bool:
    return a[0] <= b[2] and b[0] <= a[2] and a[1] <= b[3] and b[1] <= a[3]


def summarize_masks(observation: Observation, masks: MaskSet) -> List[MaskSummary]:
    boxes = [bbox_of(m.bitmap) for m in masks]
    summaries = []
    for index, mask in enumerate(masks):
        area = mask.area
        overlaps = [
            other.marker_id
            for j, other in enumerate(masks)
            if j != index and boxes_intersect(boxes[index], boxes[j])
        ]
        summaries.append(
            MaskSummary(
                marker_id=mask.marker_id,
                area=area,
                dominant_colors=dominant_colors(observation.color[mask.bitmap]),
                raggedness=perimeter(mask.bitmap) ** 2 / area,
                mean_depth=float(observation.depth[mask.bitmap].mean()),
                bbox=boxes[index],
                overlap_ids=overlaps,
            )
        )
    return summaries


def lifted_region(pre: Observation, post: Observation) -> np.ndarray:
    """Cells raised above everything the pile showed before the lift."""
    return post.depth > float(pre.depth.max(initial=0.0)) + 1e-9


def summarize_lift(
    pre: Observation,
    post: Observation,
    picked: np.ndarray,
    grasp_cell: Cell,
    selected_area: int,
    lifted: Optional[np.ndarray] = None,
) -> LiftSummary:
    lifted = lifted_region(pre, post) if lifted is None else lifted
    hang = 0.0
    diagonal = 0.0
    if picked.any():
        rows, cols = np.nonzero(picked)
        hang = float(np.hypot(cols - grasp_cell[0], rows - grasp_cell[1]).max()) * post.cell_size
        x0, y0, x1, y1 = bbox_of(picked)
        diagonal = float(np.hypot(x1 - x0, y1 - y0)) * post.cell_size
    return LiftSummary(
        grasp_cell=(int(grasp_cell[0]), int(grasp_cell[1])),
        picked_area=int(picked.sum()),
        lifted_area=int(lifted.sum()),
        selected_area=int(selected_area),
        lifted_colors=dominant_colors(post.color[lifted]),
        hang_extent=hang,
        bbox_extent=diagonal,
    )

"""Master arm choice and the slave arm's cooperative grasp point."""

import math
from typing import Optional, Tuple

import numpy as np
import structlog

from src.affordance.features import PointCloud
from src.models.episode_models import ArmId
from src.utils.errors import DomainError

logger = structlog.get_logger()


def choose_master_arm(grasp_cell: Tuple[int, int], workspace_midline_x: float) -> ArmId:
    """The arm on the closer side; the midline itself goes to the left arm."""
    return ArmId.RIGHT if grasp_cell[0] > workspace_midline_x else ArmId.LEFT


def select_coop_point(
    cloud: PointCloud,
    picked: np.ndarray,
    master_cell: Optional[Tuple[int, int]] = None,
    quantile: float = 0.0,
    rng: Optional[np.random.Generator] = None,
) -> Tuple[int, int]:
    """Cell from the bottom of the picked garment as it hangs from the master gripper.

    Points under the picked mask are sorted by z (ties by row-major index). With
    quantile 0 the lowest point is taken, otherwise a seeded draw from the bottom
    quantile. The master cell is avoided whenever another point exists.
    """
    cols, rows = cloud.cells[:, 0], cloud.cells[:, 1]
    under = np.flatnonzero(picked[rows, cols]) if len(cloud) else np.zeros(0, dtype=np.int64)
    if len(under) == 0:
        raise DomainError("Picked mask covers no points")

    flat = rows[under] * picked.shape[1] + cols[under]
    ordered = under[np.lexsort((flat, cloud.points[under, 2]))]
    cells = [(int(cols[i]), int(rows[i])) for i in ordered]
    if master_cell is not None and len(cells) > 1:
        cells = [c for c in cells if c != tuple(master_cell)]
    elif master_cell is not None and cells[0] == tuple(master_cell):
        logger.warning("Cooperative point coincides with the master grasp", cell=cells[0])

    if quantile > 0.0 and rng is not None:
        bottom = max(1, math.ceil(quantile * len(cells)))
        return cells[int(rng.integers(bottom))]
    return cells[0]

"""
Point cloud and per-point features.

Each featurized point carries the selection indicator plus six context
channels describing height, stacking, position inside its mask, wall
clearance and its relation to the selected mask.
"""

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from src.models.affordance_models import FEATURE_DIM
from src.models.pile_models import Boundary
from src.perception.masks import MaskSet
from src.reasoning.summaries import bbox_of
from src.sim.render import Observation
from src.utils.errors import DomainError

DENSITY_RADIUS = 3


@dataclass(frozen=True, eq=False)
class PointCloud:
    points: np.ndarray
    cells: np.ndarray

    def __len__(self) -> int:
        return int(self.points.shape[0])


@dataclass(frozen=True, eq=False)
class PointFeatures:
    """Feature rows aligned with the cells of the featurized points."""

    values: np.ndarray
    cells: np.ndarray

    def __len__(self) -> int:
        return int(self.values.shape[0])


def pointcloud_from(observation: Observation) -> PointCloud:
    """One point per covered cell, row-major: (x, y) at the cell centre, z = depth."""
    rows, cols = np.nonzero(observation.covered)
    cs = observation.cell_size
    points = np.column_stack(((cols + 0.5) * cs, (rows + 0.5) * cs, observation.depth[rows, cols]))
    cells = np.column_stack((cols, rows)).astype(np.int64)
    return PointCloud(points=points.astype(np.float64).reshape(-1, 3), cells=cells.reshape(-1, 2))


def _disk(radius: int) -> np.ndarray:
    r = np.arange(-radius, radius + 1)
    return (r[None, :] ** 2 + r[:, None] ** 2 <= radius ** 2).astype(np.float64)


def _wall_channel(boundary: Boundary, cols: np.ndarray, rows: np.ndarray) -> np.ndarray:
    if not boundary.is_closed or boundary.container is None:
        return np.ones(len(cols))
    x0, y0, x1, y1 = boundary.container
    distance = np.minimum.reduce([cols - x0, x1 - 1 - cols, rows - y0, y1 - 1 - rows])
    return distance / (0.5 * min(x1 - x0, y1 - y0))


def compute_features(
    cloud: PointCloud,
    observation: Observation,
    masks: MaskSet,
    n_selection: int,
    boundary: Boundary,
) -> PointFeatures:
    """Features for the cloud points lying under any mask."""
    selected = masks.get(n_selection).bitmap
    shape = masks.shape

    owner = np.zeros(shape, dtype=np.int64)
    for mask in reversed(masks.masks):
        owner[mask.bitmap] = mask.marker_id
    cols, rows = cloud.cells[:, 0], cloud.cells[:, 1]
    keep = owner[rows, cols] > 0
    cols, rows = cols[keep], rows[keep]
    z = cloud.points[keep, 2] if len(cloud) else np.zeros(0)

    inside = np.zeros(shape, dtype=np.float64)
    scale = np.ones(shape, dtype=np.float64)
    for mask in masks:
        padded = np.pad(mask.bitmap, 1, constant_values=False)
        edt = ndimage.distance_transform_edt(padded)[1:-1, 1:-1]
        region = owner == mask.marker_id
        x0, y0, x1, y1 = bbox_of(mask.bitmap)
        inside[region] = edt[region]
        scale[region] = np.hypot(x1 - x0, y1 - y0) + 1.0

    layers = np.rint((observation.depth - observation.floor_offset) / observation.layer_thickness)
    layers = np.clip(layers, 0, None)[rows, cols]
    max_z = float(z.max()) if len(z) else 0.0
    max_layers = float(layers.max()) if len(layers) else 0.0

    sx0, sy0, sx1, sy1 = bbox_of(selected)
    sel_rows, sel_cols = np.nonzero(selected)
    centroid_x, centroid_y = sel_cols.mean(), sel_rows.mean()
    density = ndimage.convolve(selected.astype(np.float64), _disk(DENSITY_RADIUS), mode="constant")
    density /= _disk(DENSITY_RADIUS).sum()

    values = np.column_stack(
        (
            selected[rows, cols].astype(np.float64),
            z / max_z if max_z > 0 else np.zeros(len(z)),
            layers / max_layers if max_layers > 0 else np.zeros(len(layers)),
            inside[rows, cols] / scale[rows, cols],
            _wall_channel(boundary, cols, rows),
            np.hypot(cols - centroid_x, rows - centroid_y) / (np.hypot(sx1 - sx0, sy1 - sy0) + 1.0),
            density[rows, cols],
        )
    ).reshape(-1, FEATURE_DIM)
    values = np.clip(values, 0.0, 1.0)
    if not np.isfinite(values).all():
        raise DomainError("Non-finite feature values")
    return PointFeatures(values=values, cells=np.column_stack((cols, rows)).astype(np.int64).reshape(-1, 2))

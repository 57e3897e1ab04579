"""
Instance masks and mask hygiene.

A MaskSet is the perception currency: binary masks over the image grid, each
carrying a numeric marker (1..N in list order) placed at its pole of
inaccessibility. Filtering, NMS and run-length encoding live here.
"""

from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

import numpy as np
from scipy import ndimage

from src.models.perception_models import SegmenterConfig
from src.utils.errors import DomainError

Cell = Tuple[int, int]

# Depth comparisons absorb float error from summing layer thicknesses.
DEPTH_EPS = 1e-9


@dataclass(frozen=True, eq=False)
class Mask:
    bitmap: np.ndarray
    marker_id: int
    marker_pixel: Cell

    def __post_init__(self) -> None:
        if not self.bitmap.any():
            raise DomainError("Mask bitmap must be non-empty")
        x, y = self.marker_pixel
        if not self.bitmap[y, x]:
            raise DomainError(f"Marker pixel {self.marker_pixel} lies outside mask {self.marker_id}")

    @property
    def area(self) -> int:
        return int(self.bitmap.sum())

    def contains(self, cell: Cell) -> bool:
        return bool(self.bitmap[cell[1], cell[0]])


@dataclass(frozen=True, eq=False)
class MaskSet:
    masks: Tuple[Mask, ...]
    shape: Tuple[int, int]

    def __post_init__(self) -> None:
        ids = [m.marker_id for m in self.masks]
        if ids != list(range(1, len(ids) + 1)):
            raise DomainError(f"Marker ids must be 1..N in order, got {ids}")
        for mask in self.masks:
            if mask.bitmap.shape != self.shape:
                raise DomainError("All masks in a set share the grid shape")

    def __len__(self) -> int:
        return len(self.masks)

    def __iter__(self):
        return iter(self.masks)

    def get(self, marker_id: int) -> Mask:
        if not 1 <= marker_id <= len(self.masks):
            raise DomainError(f"Unknown marker id {marker_id}")
        return self.masks[marker_id - 1]

    def union(self) -> np.ndarray:
        covered = np.zeros(self.shape, dtype=bool)
        for mask in self.masks:
            covered |= mask.bitmap
        return covered

    @classmethod
    def from_bitmaps(cls, bitmaps: Iterable[np.ndarray], shape: Tuple[int, int]) -> "MaskSet":
        """Number non-empty bitmaps 1..N in the given order and place their markers."""
        masks = [
            Mask(bitmap=b, marker_id=index, marker_pixel=place_marker(b))
            for index, b in enumerate((b for b in bitmaps if b.any()), start=1)
        ]
        return cls(masks=tuple(masks), shape=shape)

    @classmethod
    def empty(cls, shape: Tuple[int, int]) -> "MaskSet":
        return cls(masks=(), shape=shape)


def renumber(masks: Sequence[Mask], shape: Tuple[int, int]) -> MaskSet:
    """Re-number surviving masks 1..N keeping order and marker positions."""
    return MaskSet(
        masks=tuple(
            Mask(bitmap=m.bitmap, marker_id=i, marker_pixel=m.marker_pixel)
            for i, m in enumerate(masks, start=1)
        ),
        shape=shape,
    )


def row_major_key(bitmap: np.ndarray) -> int:
    """Flattened index of the first cell of a bitmap."""
    return int(np.flatnonzero(bitmap.ravel())[0])


def mask_iou(a: Mask, b: Mask) -> float:
    return bitmap_iou(a.bitmap, b.bitmap)


def bitmap_iou(a: np.ndarray, b: np.ndarray) -> float:
    if a.shape != b.shape:
        raise DomainError(f"Mask shapes differ: {a.shape} vs {b.shape}")
    union = int(np.logical_or(a, b).sum())
    if union == 0:
        return 0.0
    return int(np.logical_and(a, b).sum()) / union


def place_marker(bitmap: np.ndarray) -> Cell:
    """In-mask cell farthest from the complement; ties go to the lowest row, then column."""
    if not bitmap.any():
        raise DomainError("Cannot place a marker on an empty mask")
    padded = np.pad(bitmap.astype(bool), 1, constant_values=False)
    distance = ndimage.distance_transform_edt(padded)[1:-1, 1:-1]
    row, col = np.unravel_index(int(np.argmax(distance)), bitmap.shape)
    return (int(col), int(row))


def filter_masks(
    masks: MaskSet,
    depth: np.ndarray,
    cfg: SegmenterConfig,
    layer_thickness: float,
    floor_offset: float = 0.0,
) -> MaskSet:
    """Drop fragments (area < min_area) and nearly planar, background-like masks."""
    kept: List[Mask] = []
    for mask in masks:
        if mask.area < cfg.min_area:
            continue
        values = depth[mask.bitmap]
        planar = float(values.std()) < cfg.planar_eps
        if planar and float(values.mean()) < layer_thickness + floor_offset - DEPTH_EPS:
            continue
        kept.append(mask)
    return renumber(kept, masks.shape)


def nms(masks: MaskSet, iou_threshold: float) -> MaskSet:
    """Greedy suppression by descending area; a mask goes iff IoU with a kept mask > threshold."""
    order = sorted(masks.masks, key=lambda m: (-m.area, m.marker_id))
    kept: List[Mask] = []
    for mask in order:
        if all(mask_iou(mask, other) <= iou_threshold for other in kept):
            kept.append(mask)
    survivors = {m.marker_id for m in kept}
    return renumber([m for m in masks.masks if m.marker_id in survivors], masks.shape)


def rle_encode(bitmap: np.ndarray) -> List[int]:
    """Row-major run lengths, alternating background/foreground, starting with background."""
    flat = bitmap.astype(bool).ravel()
    changes = np.flatnonzero(np.diff(flat.astype(np.int8))) + 1
    bounds = np.concatenate(([0], changes, [flat.size]))
    runs = np.diff(bounds).tolist()
    if flat.size and flat[0]:
        runs = [0] + runs
    return [int(r) for r in runs]


def rle_decode(runs: Sequence[int], shape: Tuple[int, int]) -> np.ndarray:
    total = shape[0] * shape[1]
    if sum(runs) != total:
        raise DomainError(f"Run lengths cover {sum(runs)} cells, expected {total}")
    values = np.arange(len(runs)) % 2 == 1
    return np.repeat(values, runs).reshape(shape)

"""
Annotated images for the reasoner: mask borders drawn in white, or masks
tinted with distinct overlay colours, each labelled with its marker id.
"""

from dataclasses import dataclass
from enum import Enum
from typing import List, Tuple

import numpy as np

from src.models.palette import PALETTE_ARRAY
from src.perception.masks import Cell, MaskSet
from src.sim.render import Observation

WHITE = np.array([255, 255, 255], dtype=np.uint8)
FILL_ALPHA = 0.5


class OverlayKind(str, Enum):
    BORDER = "border"
    FILL = "fill"


@dataclass(frozen=True, eq=False)
class AnnotatedImage:
    image: np.ndarray
    overlay: OverlayKind
    labels: Tuple[Tuple[int, Cell], ...]


def boundary_cells(bitmap: np.ndarray) -> np.ndarray:
    """Mask cells with at least one 4-neighbour outside the mask (grid edges count as outside)."""
    padded = np.pad(bitmap.astype(bool), 1, constant_values=False)
    interior = (
        padded[:-2, 1:-1] & padded[2:, 1:-1] & padded[1:-1, :-2] & padded[1:-1, 2:]
    )
    return bitmap.astype(bool) & ~interior


def annotate(observation: Observation, masks: MaskSet) -> Tuple[AnnotatedImage, AnnotatedImage]:
    labels: List[Tuple[int, Cell]] = [(m.marker_id, m.marker_pixel) for m in masks]

    border = observation.color.copy()
    for mask in masks:
        border[boundary_cells(mask.bitmap)] = WHITE

    fill = observation.color.astype(np.float64)
    for mask in masks:
        tint = PALETTE_ARRAY[(mask.marker_id - 1) % len(PALETTE_ARRAY)]
        fill[mask.bitmap] = (1.0 - FILL_ALPHA) * fill[mask.bitmap] + FILL_ALPHA * tint
    fill_image = np.clip(np.rint(fill), 0, 255).astype(np.uint8)

    return (
        AnnotatedImage(image=border, overlay=OverlayKind.BORDER, labels=tuple(labels)),
        AnnotatedImage(image=fill_image, overlay=OverlayKind.FILL, labels=tuple(labels)),
    )


def to_ppm(image: np.ndarray) -> bytes:
    """Binary P6 encoding of an (rows, columns, 3) uint8 image."""
    height, width = image.shape[:2]
    header = f"P6\n{width} {height}\n255\n".encode("ascii")
    return header + np.ascontiguousarray(image, dtype=np.uint8).tobytes()

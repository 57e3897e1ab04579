"""
Garment catalogue and footprint templates.

Each category maps to a shape class and a size range; templates are boolean bitmaps
of shape (rows, columns) that are 4-connected by construction.
"""

from typing import Dict, NamedTuple, Tuple

import numpy as np

from src.models.pile_models import GarmentCategory, ShapeClass


class CategoryProfile(NamedTuple):
    shape_class: ShapeClass
    width: Tuple[int, int]
    height: Tuple[int, int]


CATALOGUE: Dict[GarmentCategory, CategoryProfile] = {
    GarmentCategory.DRESS: CategoryProfile(ShapeClass.TRAPEZOID, (8, 12), (14, 20)),
    GarmentCategory.TROUSERS: CategoryProfile(ShapeClass.LEGS, (8, 11), (15, 21)),
    GarmentCategory.TOPS: CategoryProfile(ShapeClass.T_SHAPE, (11, 15), (10, 13)),
    GarmentCategory.SKIRT: CategoryProfile(ShapeClass.TRAPEZOID, (8, 11), (6, 9)),
    GarmentCategory.SOCKS: CategoryProfile(ShapeClass.ELL, (3, 4), (6, 9)),
    GarmentCategory.GLOVE: CategoryProfile(ShapeClass.MITTEN, (4, 6), (5, 7)),
    GarmentCategory.HAT: CategoryProfile(ShapeClass.DISC, (5, 8), (5, 8)),
    GarmentCategory.SCARF: CategoryProfile(ShapeClass.STRIP, (2, 3), (18, 26)),
    GarmentCategory.UNDERPANTS: CategoryProfile(ShapeClass.BRIEF, (6, 9), (5, 7)),
}

CATEGORIES: Tuple[GarmentCategory, ...] = tuple(CATALOGUE)


def shape_bitmap(shape_class: ShapeClass, width: int, height: int) -> np.ndarray:
    """Template footprint of the given class and bounding size."""
    w, h = max(1, width), max(1, height)
    bitmap = np.zeros((h, w), dtype=bool)

    if shape_class == ShapeClass.STRIP:
        bitmap[:, :] = True
    elif shape_class == ShapeClass.T_SHAPE:
        sleeves = max(1, h // 3)
        body = max(1, w // 2)
        left = (w - body) // 2
        bitmap[:sleeves, :] = True
        bitmap[sleeves:, left:left + body] = True
    elif shape_class == ShapeClass.TRAPEZOID:
        top = max(1, w // 2)
        for row in range(h):
            span = top + int(round((w - top) * row / max(1, h - 1)))
            left = (w - span) // 2
            bitmap[row, left:left + span] = True
    elif shape_class == ShapeClass.LEGS:
        waist = max(1, h // 4)
        gap = max(1, w // 5)
        leg = max(1, (w - gap) // 2)
        bitmap[:waist, :] = True
        bitmap[waist:, :leg] = True
        bitmap[waist:, w - leg:] = True
    elif shape_class == ShapeClass.ELL:
        bar = max(1, (w + 1) // 2)
        foot = max(1, h // 4)
        bitmap[:, :bar] = True
        bitmap[h - foot:, :] = True
    elif shape_class == ShapeClass.MITTEN:
        bitmap[:, min(1, w - 1):] = True
        thumb_top = h // 3
        bitmap[thumb_top:thumb_top + max(1, h // 3), 0] = True
    elif shape_class == ShapeClass.DISC:
        cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
        ry, rx = max(h / 2.0, 0.5), max(w / 2.0, 0.5)
        rows, cols = np.mgrid[0:h, 0:w]
        bitmap = ((rows - cy) / ry) ** 2 + ((cols - cx) / rx) ** 2 <= 1.0
        bitmap[int(cy), :] = True
    elif shape_class == ShapeClass.BRIEF:
        bitmap[:, :] = True
        notch_rows = h // 3
        notch_cols = w // 3
        if notch_rows and notch_cols and w - 2 * notch_cols > 0:
            bitmap[h - notch_rows:, notch_cols:w - notch_cols] = False
    else:
        raise ValueError(f"Unknown shape class {shape_class}")

    return bitmap

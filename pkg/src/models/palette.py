"""
Named colour palette shared by scene generation, summaries and Task B targets.
"""

from typing import Dict, Sequence, Tuple

import numpy as np

RGB = Tuple[int, int, int]

PALETTE: Dict[str, RGB] = {
    "red": (200, 30, 40),
    "orange": (235, 130, 30),
    "yellow": (235, 215, 50),
    "green": (40, 160, 60),
    "cyan": (40, 190, 200),
    "blue": (35, 70, 190),
    "purple": (120, 50, 160),
    "pink": (235, 140, 180),
    "brown": (120, 75, 40),
    "black": (25, 25, 25),
    "white": (240, 240, 235),
    "gray": (130, 130, 130),
}

PALETTE_NAMES: Tuple[str, ...] = tuple(PALETTE)
PALETTE_ARRAY = np.array([PALETTE[name] for name in PALETTE_NAMES], dtype=np.float64)


def nearest_palette_index(rgb: Sequence[float]) -> int:
    diff = PALETTE_ARRAY - np.asarray(rgb, dtype=np.float64)
    return int(np.argmin(np.einsum("ij,ij->i", diff, diff)))


def nearest_palette_color(rgb: Sequence[float]) -> str:
    return PALETTE_NAMES[nearest_palette_index(rgb)]


def palette_indices(pixels: np.ndarray) -> np.ndarray:
    """Nearest palette index for every row of an (N, 3) pixel array."""
    pixels = np.asarray(pixels, dtype=np.float64).reshape(-1, 3)
    diff = pixels[:, None, :] - PALETTE_ARRAY[None, :, :]
    return np.argmin(np.einsum("ijk,ijk->ij", diff, diff), axis=1)


def color_distance(a: Sequence[float], b: Sequence[float]) -> float:
    """L-infinity RGB distance."""
    return float(np.max(np.abs(np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64))))

"""Grasp point selection from an affordance map."""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from src.perception.masks import MaskSet
from src.utils.errors import DomainError


@dataclass(frozen=True, eq=False)
class AffordanceMap:
    scores: np.ndarray
    cells: np.ndarray

    def __post_init__(self) -> None:
        if len(self.scores) != len(self.cells):
            raise DomainError("Scores and cells must align")


def pick_retrieval_point(affordance: AffordanceMap, masks: MaskSet, n_selection: int) -> Tuple[int, int]:
    """Highest-scoring point under the selected mask; ties go to the lowest row-major cell."""
    selected = masks.get(n_selection).bitmap
    cols, rows = affordance.cells[:, 0], affordance.cells[:, 1]
    inside = selected[rows, cols] if len(affordance.cells) else np.zeros(0, dtype=bool)
    if not inside.any():
        raise DomainError(f"Selected mask {n_selection} holds no featurized points")
    width = selected.shape[1]
    candidates = np.flatnonzero(inside)
    flat = rows[candidates] * width + cols[candidates]
    best = candidates[np.lexsort((flat, -affordance.scores[candidates]))[0]]
    return (int(cols[best]), int(rows[best]))

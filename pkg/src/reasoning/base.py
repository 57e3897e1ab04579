"""
Reasoner interface.

A reasoner answers the three decisions of a retrieval attempt: which masks
need fine-tuning, which mask to retrieve, and whether the lift went wrong or
needs a second arm.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from src.models.pile_models import GraspOutcome, PileScene
from src.models.reasoning_models import CoopAnswer, LiftSummary, MaskSummary, TaskSpec
from src.perception.annotate import AnnotatedImage
from src.perception.masks import MaskSet
from src.sim.render import Observation


@dataclass(frozen=True, eq=False)
class SceneView:
    observation: Observation
    masks: MaskSet
    summaries: List[MaskSummary]
    scene: PileScene
    annotated: Optional[Tuple[AnnotatedImage, AnnotatedImage]] = None


@dataclass(frozen=True, eq=False)
class LiftView:
    pre: Observation
    post: Observation
    picked: np.ndarray
    selected_id: int
    summaries: List[MaskSummary]
    lift: LiftSummary
    outcome: GraspOutcome
    scene: PileScene


class Reasoner(ABC):
    """The ground-truth scene travels in every view; only the privileged reasoner reads it."""

    name: str = "reasoner"

    @abstractmethod
    def decide_adjust(self, view: SceneView) -> List[int]:
        """Marker ids of masks that need fine-tuning."""

    @abstractmethod
    def select_target(self, view: SceneView, task: TaskSpec) -> int:
        """Marker id of the mask to retrieve next."""

    @abstractmethod
    def decide_cooperation(self, view: LiftView) -> CoopAnswer:
        """Multi-lift and dual-arm decisions after the master arm lifts."""

    def close(self) -> None:
        return None

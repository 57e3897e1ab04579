"""
Privileged reasoner.

Reads the ground-truth scene and grasp outcome, so its answers are exact. It is
the upper bound used by tests and for labelling during data collection.
"""

from typing import Dict, List, Optional

import numpy as np

from src.models.pile_models import PileScene
from src.models.reasoning_models import CoopAnswer, TaskKind, TaskSpec
from src.perception.masks import MaskSet
from src.reasoning.base import LiftView, Reasoner, SceneView
from src.reasoning.targets import target_matches
from src.sim.oracle import LENGTH_EPS
from src.sim.pile import layer_stack, visible_regions
from src.utils.errors import DomainError

MIN_REGION_COVERAGE = 0.6


def garment_masks(masks: MaskSet, scene: PileScene) -> Dict[int, int]:
    """Garment id -> marker id of the mask holding most of its visible region (ties: lower marker)."""
    best: Dict[int, tuple] = {}
    for garment_id, region in visible_regions(scene).items():
        for mask in masks:
            inter = int((region & mask.bitmap).sum())
            if inter and (garment_id not in best or inter > best[garment_id][0]):
                best[garment_id] = (inter, mask.marker_id)
    return {gid: marker for gid, (_, marker) in best.items()}


def covered_from_above(scene: PileScene) -> List[bool]:
    """Per stack index: does any later garment overlap it."""
    layers = layer_stack(scene)
    above = np.zeros(scene.shape, dtype=bool)
    result = [False] * len(scene.stack)
    for index in range(len(scene.stack) - 1, -1, -1):
        result[index] = bool((layers[index] & above).any())
        above |= layers[index]
    return result


class PrivilegedReasoner(Reasoner):
    name = "privileged"

    def __init__(self, l_arm: float = 0.35):
        self.l_arm = l_arm

    def decide_adjust(self, view: SceneView) -> List[int]:
        regions = visible_regions(view.scene)
        flagged = []
        for mask in view.masks:
            touched = [gid for gid, r in regions.items() if (r & mask.bitmap).any()]
            if len(touched) != 1:
                flagged.append(mask.marker_id)
                continue
            region = regions[touched[0]]
            if int((region & mask.bitmap).sum()) < MIN_REGION_COVERAGE * int(region.sum()):
                flagged.append(mask.marker_id)
        return flagged

    def _topmost_choice(self, scene: PileScene, owners: Dict[int, int]) -> Optional[int]:
        covered = covered_from_above(scene)
        ranked = sorted(
            (g for g in range(len(scene.stack)) if scene.stack[g].id in owners),
            key=lambda i: (covered[i], -i),
        )
        return owners[scene.stack[ranked[0]].id] if ranked else None

    def select_target(self, view: SceneView, task: TaskSpec) -> int:
        if len(view.masks) == 0:
            raise DomainError("Cannot select from an empty mask set")
        scene = view.scene
        owners = garment_masks(view.masks, scene)
        fallback = self._topmost_choice(scene, owners) or 1
        if task.kind == TaskKind.A or task.target is None:
            return fallback

        targets = [i for i, g in enumerate(scene.stack) if target_matches(g, task.target)]
        if not targets:
            return fallback
        index = targets[-1]
        target = scene.stack[index]
        footprint = set(target.cells)
        obstructors = [
            j for j in range(index + 1, len(scene.stack)) if footprint & set(scene.stack[j].cells)
        ]
        if not obstructors and target.id in owners:
            return owners[target.id]
        for j in sorted(obstructors, reverse=True):
            if scene.stack[j].id in owners:
                return owners[scene.stack[j].id]
        return owners.get(target.id, fallback)

    def decide_cooperation(self, view: LiftView) -> CoopAnswer:
        outcome = view.outcome
        return CoopAnswer(
            x_error=int(len(outcome.lifted_ids) >= 2),
            x_dual=int(outcome.sag > self.l_arm + LENGTH_EPS),
        )

"""
Rule-based reasoner working only from observable summaries.

Because it never touches the ground-truth scene, the same logic backs the
reference decision service.
"""

from typing import List, Optional, Sequence

import structlog

from src.models.palette import color_distance, nearest_palette_color
from src.models.reasoning_models import (
    CoopAnswer,
    LiftSummary,
    MaskSummary,
    RuleReasonerConfig,
    TaskKind,
    TaskSpec,
)
from src.reasoning.base import LiftView, Reasoner, SceneView
from src.reasoning.targets import fits_category
from src.utils.errors import DomainError

logger = structlog.get_logger()


def _topmost(summaries: Sequence[MaskSummary]) -> MaskSummary:
    return min(summaries, key=lambda s: (-s.mean_depth, s.marker_id))


class RuleReasoner(Reasoner):
    name = "rule"

    def __init__(self, config: Optional[RuleReasonerConfig] = None):
        self.config = config or RuleReasonerConfig()

    def adjust_ids(self, summaries: Sequence[MaskSummary]) -> List[int]:
        flagged = []
        for summary in summaries:
            colors = summary.dominant_colors
            two_colored = (
                len(colors) >= 2
                and colors[1].share >= self.config.second_color_share
                and color_distance(colors[0].rgb, colors[1].rgb) > self.config.merge_color_threshold
            )
            if two_colored or summary.raggedness > self.config.ragged_threshold:
                flagged.append(summary.marker_id)
        return flagged

    def selected_id(self, summaries: Sequence[MaskSummary], task: TaskSpec) -> int:
        if not summaries:
            raise DomainError("Cannot select from an empty mask set")
        if task.kind == TaskKind.A or task.target is None:
            return _topmost(summaries).marker_id

        wanted = task.target.color_name
        matches = [
            s
            for s in summaries
            if s.dominant_colors and nearest_palette_color(s.dominant_colors[0].rgb) == wanted
        ]
        if not matches:
            # Target not visible: clear the top of the pile.
            return _topmost(summaries).marker_id
        if task.target.category is not None:
            sized = [s for s in matches if fits_category(s.bbox, task.target.category)]
            matches = sized or matches
        target = _topmost(matches)
        by_id = {s.marker_id: s for s in summaries}
        obstructors = [
            by_id[i] for i in target.overlap_ids if i in by_id and by_id[i].mean_depth > target.mean_depth
        ]
        if not obstructors:
            return target.marker_id
        return _topmost(obstructors).marker_id

    def cooperation(self, lift: LiftSummary) -> CoopAnswer:
        colors = [c for c in lift.lifted_colors if c.share >= self.config.lift_color_share]
        distinct = any(
            color_distance(a.rgb, b.rgb) > self.config.merge_color_threshold
            for i, a in enumerate(colors)
            for b in colors[i + 1:]
        )
        oversized = lift.lifted_area > self.config.error_area_ratio * lift.selected_area
        extent = lift.hang_extent if self.config.extent_mode == "hang" else lift.bbox_extent
        return CoopAnswer(
            x_error=int(distinct or oversized),
            x_dual=int(extent > self.config.l_arm),
        )

    def decide_adjust(self, view: SceneView) -> List[int]:
        return self.adjust_ids(view.summaries)

    def select_target(self, view: SceneView, task: TaskSpec) -> int:
        return self.selected_id(view.summaries, task)

    def decide_cooperation(self, view: LiftView) -> CoopAnswer:
        return self.cooperation(view.lift)

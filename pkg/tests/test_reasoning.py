"""
Tests for observable summaries and the rule-based and privileged reasoners.
"""

import math

import numpy as np
import pytest

from src.models.perception_models import SegmenterConfig
from src.models.pile_models import GarmentCategory, GraspOutcome, GraspResult
from src.models.reasoning_models import (
    DominantColor,
    LiftSummary,
    MaskSummary,
    RuleReasonerConfig,
    TargetDescriptor,
    TaskKind,
    TaskSpec,
)
from src.perception.masks import MaskSet
from src.perception.segmenter import segment
from src.pipeline.attempt import scene_view
from src.reasoning.base import LiftView
from src.reasoning.factory import make_reasoner
from src.reasoning.privileged import PrivilegedReasoner, covered_from_above, garment_masks
from src.reasoning.remote import RemoteReasoner
from src.reasoning.rule import RuleReasoner
from src.reasoning.summaries import dominant_colors, perimeter, summarize_lift, summarize_masks
from src.reasoning.targets import fits_category, parse_target, target_matches
from src.sim.pile import visible_regions
from src.sim.render import render_observation
from src.utils.errors import ConfigError, DomainError
from tests.helpers import BLUE, GREEN, RED, garment, make_scene, rect

TASK_A = TaskSpec(kind=TaskKind.A)


def summary(
    marker_id, colors=((RED, 1.0),), depth=0.005, overlaps=(), raggedness=16.0, bbox=(0, 0, 3, 3)
):
    return MaskSummary(
        marker_id=marker_id,
        area=16,
        dominant_colors=[DominantColor(rgb=rgb, share=share) for rgb, share in colors],
        raggedness=raggedness,
        mean_depth=depth,
        bbox=bbox,
        overlap_ids=list(overlaps),
    )


def lift(colors=((RED, 1.0),), lifted_area=20, selected_area=20, hang=0.1, bbox=0.1):
    return LiftSummary(
        grasp_cell=(0, 0),
        picked_area=selected_area,
        lifted_area=lifted_area,
        selected_area=selected_area,
        lifted_colors=[DominantColor(rgb=rgb, share=share) for rgb, share in colors],
        hang_extent=hang,
        bbox_extent=bbox,
    )


def task_b(color, category=None):
    return TaskSpec(kind=TaskKind.B, target=TargetDescriptor(color=color, category=category))


class TestSummaries:
    """Test observable mask and lift summaries."""

    def test_dominant_colors_single_cluster(self):
        pixels = np.array([RED] * 10, dtype=np.uint8)
        colors = dominant_colors(pixels)
        assert len(colors) == 1
        assert colors[0].rgb == RED
        assert colors[0].share == 1.0

    def test_dominant_colors_ordered_by_share(self):
        pixels = np.array([BLUE] * 3 + [RED] * 7, dtype=np.uint8)
        colors = dominant_colors(pixels)
        assert [c.rgb for c in colors] == [RED, BLUE]
        assert [c.share for c in colors] == pytest.approx([0.7, 0.3])

    def test_perimeter(self):
        bitmap = np.zeros((6, 6), dtype=bool)
        bitmap[1:3, 1:3] = True
        assert perimeter(bitmap) == 8

    def test_summarize_masks(self):
        scene = make_scene([garment(0, rect(2, 2, 4, 4), RED), garment(1, rect(4, 4, 4, 4), BLUE)])
        obs = render_observation(scene)
        masks = segment(obs, scene, SegmenterConfig.clean(), 0)
        summaries = summarize_masks(obs, masks)
        assert [s.marker_id for s in summaries] == [1, 2]
        first, second = summaries
        assert first.area == 12
        assert first.bbox == (2, 2, 5, 5)
        assert first.dominant_colors[0].rgb == RED
        assert second.mean_depth > first.mean_depth
        assert first.overlap_ids == [2]
        assert second.raggedness == pytest.approx(16 ** 2 / 16)

    def test_summarize_lift_extents(self):
        scene = make_scene([garment(0, rect(2, 2, 4, 1))])
        obs = render_observation(scene)
        picked = visible_regions(scene)[0]
        result = summarize_lift(obs, obs, picked, (2, 2), 4, lifted=picked)
        assert result.hang_extent == pytest.approx(0.06)
        assert result.bbox_extent == pytest.approx(0.06)
        assert result.lifted_area == 4

    def test_large_garment_lifted_at_centre_needs_dual_arm(self):
        scene = make_scene([garment(0, rect(5, 5, 14, 14))])
        obs = render_observation(scene)
        picked = visible_regions(scene)[0]
        result = summarize_lift(obs, obs, picked, (12, 12), 196, lifted=picked)
        assert result.bbox_extent == pytest.approx(13 * math.sqrt(2) * 0.02)
        assert result.hang_extent < RuleReasonerConfig().l_arm
        answer = RuleReasoner().cooperation(result)
        assert (answer.x_error, answer.x_dual) == (0, 1)


class TestTargets:
    """Test Task B target parsing and matching."""

    def test_parse_color_and_category(self):
        target = parse_target("Blue:scarf")
        assert target.color == "blue"
        assert target.category == GarmentCategory.SCARF

    def test_parse_color_only(self):
        assert parse_target("green").category is None

    @pytest.mark.parametrize("text", ["teal", "blue:hoodie", ""])
    def test_parse_invalid(self, text):
        with pytest.raises(ConfigError):
            parse_target(text)

    def test_matches_nearest_palette_colour(self):
        g = garment(0, rect(0, 0, 2, 2), (45, 75, 180), GarmentCategory.HAT)
        assert target_matches(g, TargetDescriptor(color="blue"))
        assert target_matches(g, TargetDescriptor(color="blue", category=GarmentCategory.HAT))
        assert not target_matches(g, TargetDescriptor(color="blue", category=GarmentCategory.SOCKS))
        assert not target_matches(g, TargetDescriptor(color="red"))

    @pytest.mark.parametrize(
        "bbox, category, fits",
        [
            ((0, 0, 2, 25), GarmentCategory.SCARF, True),
            ((0, 0, 25, 2), GarmentCategory.SCARF, True),
            ((0, 0, 3, 25), GarmentCategory.SCARF, False),
            ((4, 4, 11, 11), GarmentCategory.HAT, True),
            ((0, 0, 12, 3), GarmentCategory.HAT, False),
        ],
    )
    def test_fits_category(self, bbox, category, fits):
        assert fits_category(bbox, category) == fits

    def test_task_b_needs_target(self):
        with pytest.raises(ValueError):
            TaskSpec(kind=TaskKind.B)


class TestRuleReasoner:
    """Test the observable rule-based reasoner."""

    def test_adjust_flags_two_coloured_masks(self):
        reasoner = RuleReasoner()
        summaries = [
            summary(1, colors=((RED, 0.6), (BLUE, 0.4))),
            summary(2, colors=((RED, 0.9), (BLUE, 0.1))),
            summary(3),
        ]
        assert reasoner.adjust_ids(summaries) == [1]

    def test_adjust_flags_ragged_masks(self):
        assert RuleReasoner().adjust_ids([summary(1, raggedness=80.0), summary(2)]) == [1]

    def test_task_a_selects_highest_mask(self):
        reasoner = RuleReasoner()
        summaries = [summary(1, depth=0.005), summary(2, depth=0.015), summary(3, depth=0.015)]
        assert reasoner.selected_id(summaries, TASK_A) == 2

    def test_task_b_selects_visible_target(self):
        summaries = [
            summary(1, colors=((RED, 1.0),), depth=0.005, overlaps=[2]),
            summary(2, colors=((BLUE, 1.0),), depth=0.010, overlaps=[1]),
        ]
        assert RuleReasoner().selected_id(summaries, task_b("blue")) == 2

    def test_task_b_clears_obstructor_first(self):
        summaries = [
            summary(1, colors=((RED, 1.0),), depth=0.015, overlaps=[2]),
            summary(2, colors=((BLUE, 1.0),), depth=0.010, overlaps=[1]),
        ]
        assert RuleReasoner().selected_id(summaries, task_b("blue")) == 1

    def test_task_b_prefers_mask_of_plausible_size(self):
        summaries = [
            summary(1, colors=((BLUE, 1.0),), depth=0.015, bbox=(0, 0, 19, 19)),
            summary(2, colors=((BLUE, 1.0),), depth=0.005, bbox=(30, 30, 35, 35)),
        ]
        assert RuleReasoner().selected_id(summaries, task_b("blue", GarmentCategory.HAT)) == 2
        assert RuleReasoner().selected_id(summaries, task_b("blue")) == 1

    def test_task_b_size_mismatch_falls_back_to_colour(self):
        summaries = [summary(1, colors=((BLUE, 1.0),), bbox=(0, 0, 19, 19))]
        assert RuleReasoner().selected_id(summaries, task_b("blue", GarmentCategory.HAT)) == 1

    def test_task_b_without_match_takes_top(self):
        summaries = [summary(1, depth=0.005), summary(2, colors=((GREEN, 1.0),), depth=0.01)]
        assert RuleReasoner().selected_id(summaries, task_b("blue")) == 2

    def test_empty_selection(self):
        with pytest.raises(DomainError):
            RuleReasoner().selected_id([], TASK_A)

    def test_cooperation_distinct_colours(self):
        answer = RuleReasoner().cooperation(lift(colors=((RED, 0.5), (BLUE, 0.5))))
        assert (answer.x_error, answer.x_dual) == (1, 0)

    def test_cooperation_ignores_small_colour_share(self):
        answer = RuleReasoner().cooperation(lift(colors=((RED, 0.97), (BLUE, 0.03))))
        assert answer.x_error == 0

    def test_cooperation_oversized_lift(self):
        assert RuleReasoner().cooperation(lift(lifted_area=50, selected_area=20)).x_error == 1

    def test_cooperation_long_bbox(self):
        assert RuleReasoner().cooperation(lift(bbox=0.4)).x_dual == 1
        assert RuleReasoner().cooperation(lift(bbox=0.35)).x_dual == 0

    def test_cooperation_defaults_to_bbox_diagonal(self):
        # 14x14 garment grasped at its centre: short hang, long diagonal
        answer = RuleReasoner().cooperation(lift(hang=0.18, bbox=0.368))
        assert (answer.x_error, answer.x_dual) == (0, 1)

    def test_cooperation_hang_mode(self):
        reasoner = RuleReasoner(RuleReasonerConfig(extent_mode="hang"))
        assert reasoner.cooperation(lift(hang=0.18, bbox=0.368)).x_dual == 0
        assert reasoner.cooperation(lift(hang=0.4, bbox=0.1)).x_dual == 1


class TestPrivilegedReasoner:
    """Test the ground-truth reasoner."""

    def test_flags_merged_mask(self):
        scene = make_scene([garment(0, rect(6, 6, 8, 8), RED), garment(1, rect(10, 10, 8, 8), RED)])
        obs = render_observation(scene)
        masks = segment(obs, scene, SegmenterConfig(p_merge=1.0, p_frag=0.0), 0)
        view = scene_view(obs, masks, scene)
        assert PrivilegedReasoner().decide_adjust(view) == [1]

    def test_clean_masks_not_flagged(self):
        scene = make_scene([garment(0, rect(6, 6, 8, 8), RED), garment(1, rect(10, 10, 8, 8), BLUE)])
        obs = render_observation(scene)
        view = scene_view(obs, segment(obs, scene, SegmenterConfig.clean(), 0), scene)
        assert PrivilegedReasoner().decide_adjust(view) == []

    def test_selects_uncovered_garment(self):
        scene = make_scene(
            [
                garment(0, rect(6, 6, 8, 8), RED),
                garment(1, rect(10, 10, 8, 8), BLUE),
                garment(2, rect(24, 24, 4, 4), GREEN),
            ]
        )
        obs = render_observation(scene)
        masks = segment(obs, scene, SegmenterConfig.clean(), 0)
        view = scene_view(obs, masks, scene)
        owners = garment_masks(masks, scene)
        assert covered_from_above(scene) == [True, False, False]
        assert PrivilegedReasoner().select_target(view, TASK_A) == owners[2]
        assert PrivilegedReasoner().select_target(view, task_b("red")) == owners[1]
        assert PrivilegedReasoner().select_target(view, task_b("blue")) == owners[1]

    def test_cooperation_from_outcome(self):
        scene = make_scene([garment(0, rect(2, 2, 4, 4))])
        obs = render_observation(scene)
        picked = visible_regions(scene)[0]
        multi = GraspOutcome(result=GraspResult.MULTI_LIFT, lifted_ids=(0, 1), garment_id=0, sag=0.5)
        view = LiftView(
            pre=obs,
            post=obs,
            picked=picked,
            selected_id=1,
            summaries=[],
            lift=summarize_lift(obs, obs, picked, (3, 3), 16, lifted=picked),
            outcome=multi,
            scene=scene,
        )
        answer = PrivilegedReasoner(l_arm=0.35).decide_cooperation(view)
        assert (answer.x_error, answer.x_dual) == (1, 1)

    def test_sag_at_arm_length_stays_single(self):
        """A sag equal to l_arm up to float noise is not a drop, so no second arm."""
        scene = make_scene([garment(0, rect(2, 2, 4, 4))])
        obs = render_observation(scene)
        picked = visible_regions(scene)[0]
        outcome = GraspOutcome(
            result=GraspResult.SUCCESS, lifted_ids=(0,), garment_id=0, sag=0.1 + 0.2
        )
        view = LiftView(
            pre=obs,
            post=obs,
            picked=picked,
            selected_id=1,
            summaries=[],
            lift=summarize_lift(obs, obs, picked, (3, 3), 16, lifted=picked),
            outcome=outcome,
            scene=scene,
        )
        assert outcome.sag > 0.3
        answer = PrivilegedReasoner(l_arm=0.3).decide_cooperation(view)
        assert (answer.x_error, answer.x_dual) == (0, 0)

    def test_empty_mask_set(self):
        scene = make_scene([garment(0, rect(2, 2, 4, 4))])
        view = scene_view(render_observation(scene), MaskSet.empty(scene.shape), scene)
        with pytest.raises(DomainError):
            PrivilegedReasoner().select_target(view, TASK_A)


class TestFactory:
    """Test reasoner construction."""

    def test_kinds(self):
        assert isinstance(make_reasoner("rule"), RuleReasoner)
        assert isinstance(make_reasoner("privileged"), PrivilegedReasoner)

    def test_rule_uses_arm_length(self):
        assert make_reasoner("rule", l_arm=0.5).config.l_arm == 0.5

    def test_remote_needs_url(self, monkeypatch):
        monkeypatch.delenv("REASONER_URL", raising=False)
        with pytest.raises(ConfigError):
            make_reasoner("remote")

    def test_remote_with_url(self):
        reasoner = make_reasoner("remote", url="http://localhost:9999", timeout_ms=500)
        assert isinstance(reasoner, RemoteReasoner)
        reasoner.close()

    def test_unknown_kind(self):
        with pytest.raises(ConfigError):
            make_reasoner("oracle")

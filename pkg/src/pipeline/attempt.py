"""
Retrieval attempt.

One pass of the perceive, reason, afford, grasp and cooperate loop:
- Observe and segment the pile, fine-tuning masks the reasoner flags
- Select the mask to retrieve and pick the grasp point on it
- Lift with the master arm, track the picked garment and let the reasoner
  decide between aborting, single-arm delivery and dual-arm delivery
"""

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
import structlog

from src.affordance.features import compute_features, pointcloud_from
from src.affordance.network import AffordanceModel, forward
from src.affordance.selection import AffordanceMap, pick_retrieval_point
from src.models.episode_models import (
    Ablation,
    ArmId,
    AttemptRecord,
    PipelineConfig,
    PipelinePhase,
    TerminalStatus,
)
from src.models.pile_models import GraspOutcome, GraspResult, PileScene
from src.models.reasoning_models import CoopAnswer, TaskSpec
from src.perception.annotate import annotate
from src.perception.fine_tuning import fine_tune
from src.perception.masks import MaskSet, filter_masks, nms
from src.perception.segmenter import segment
from src.perception.tracking import Frame, track_masks
from src.pipeline.arms import choose_master_arm, select_coop_point
from src.reasoning.base import LiftView, Reasoner, SceneView
from src.reasoning.summaries import bbox_of, lifted_region, summarize_lift, summarize_masks
from src.sim.oracle import apply_retrieval, drop_back, simulate_dual_delivery, simulate_single_grasp
from src.sim.pile import cells_of
from src.sim.render import Observation, lift_scene, render_lift_observation, render_observation
from src.utils.errors import ConfigError, ReasonerError
from src.utils.seeding import derive_seed

logger = structlog.get_logger()

Cell = Tuple[int, int]


@dataclass
class PipelineComponents:
    reasoner: Reasoner
    model: Optional[AffordanceModel] = None

    def check(self, config: PipelineConfig) -> None:
        if self.model is None and not config.ablated(Ablation.AFFORDANCE):
            raise ConfigError("An affordance model is required unless affordance is ablated")


def perceive(scene: PileScene, config: PipelineConfig, seed: int) -> Tuple[Observation, MaskSet]:
    observation = render_observation(scene)
    cfg = config.segmenter
    raw = segment(observation, scene, cfg, seed)
    filtered = filter_masks(raw, observation.depth, cfg, observation.layer_thickness, observation.floor_offset)
    return observation, nms(filtered, cfg.nms_iou)


def scene_view(observation: Observation, masks: MaskSet, scene: PileScene) -> SceneView:
    return SceneView(
        observation=observation,
        masks=masks,
        summaries=summarize_masks(observation, masks),
        scene=scene,
        annotated=annotate(observation, masks),
    )


def _uniform_cell(bitmap: np.ndarray, rng: np.random.Generator) -> Cell:
    cells = cells_of(bitmap)
    return cells[int(rng.integers(len(cells)))]


class _Attempt:
    """Mutable bookkeeping while an attempt runs."""

    def __init__(self, index: int, config: PipelineConfig):
        self.index = index
        self.config = config
        self.phases: List[PipelinePhase] = [PipelinePhase.OBSERVE]
        self.masks_before = 0
        self.masks_after = 0
        self.fine_tuned = False
        self.selected_id: Optional[int] = None
        self.grasp_cell: Optional[Cell] = None
        self.master_arm: Optional[ArmId] = None
        self.outcome: Optional[GraspOutcome] = None
        self.coop = CoopAnswer(x_error=0, x_dual=0)
        self.coop_queried = False
        self.coop_cell: Optional[Cell] = None

    def enter(self, phase: PipelinePhase) -> None:
        self.phases.append(phase)

    def record(
        self,
        base_cost: int,
        status: TerminalStatus,
        failure_reason: Optional[str] = None,
    ) -> AttemptRecord:
        costs = self.config.step_costs
        outcome = self.outcome
        retrieved = outcome.lifted_ids[0] if status == TerminalStatus.RETRIEVED and outcome else None
        return AttemptRecord(
            attempt=self.index,
            phases=self.phases,
            masks_before=self.masks_before,
            masks_after=self.masks_after,
            fine_tune_triggered=self.fine_tuned,
            selected_id=self.selected_id,
            grasp_cell=self.grasp_cell,
            master_arm=self.master_arm,
            outcome=outcome,
            coop=self.coop,
            coop_queried=self.coop_queried,
            coop_cell=self.coop_cell,
            steps=base_cost + (costs.fine_tune if self.fine_tuned else 0),
            terminal_status=status,
            retrieved_id=retrieved,
            failure_reason=failure_reason,
        )


def run_attempt(
    scene: PileScene,
    task: TaskSpec,
    components: PipelineComponents,
    config: PipelineConfig,
    seed: int,
    attempt_index: int = 0,
) -> Tuple[AttemptRecord, PileScene]:
    """Run one attempt and return its record with the evolved pile."""
    state = _Attempt(attempt_index, config)
    reasoner = components.reasoner
    oracle = config.oracle
    costs = config.step_costs

    state.enter(PipelinePhase.SEGMENT)
    observation, masks = perceive(scene, config, derive_seed(seed, "segment"))
    state.masks_before = state.masks_after = len(masks)

    try:
        view = scene_view(observation, masks, scene)
        if len(masks) and not config.ablated(Ablation.MASK_FINE_TUNING):
            flagged = reasoner.decide_adjust(view)
            if flagged:
                state.enter(PipelinePhase.FINE_TUNE)
                state.fine_tuned = True
                scene, masks = fine_tune(
                    scene,
                    masks,
                    flagged,
                    config.segmenter,
                    derive_seed(seed, "fine-tune"),
                    oracle,
                    config.fine_tune_frames,
                )
                state.enter(PipelinePhase.SEGMENT)
                observation = render_observation(scene)
                state.masks_after = len(masks)
                view = scene_view(observation, masks, scene)

        if len(masks) == 0:
            state.enter(PipelinePhase.ABORT_ATTEMPT)
            return state.record(costs.abort, TerminalStatus.FAILED, "no usable masks"), scene

        state.enter(PipelinePhase.SELECT)
        state.selected_id = reasoner.select_target(view, task)
    except ReasonerError as e:
        logger.error("Reasoner failed", attempt=attempt_index, error=str(e))
        state.enter(PipelinePhase.ABORT_ATTEMPT)
        return state.record(costs.abort, TerminalStatus.FAILED, f"reasoner: {e}"), scene

    selected = masks.get(state.selected_id)
    state.enter(PipelinePhase.AFFORD)
    if config.ablated(Ablation.AFFORDANCE) or components.model is None:
        cell = _uniform_cell(selected.bitmap, np.random.default_rng(derive_seed(seed, "uniform-grasp")))
    else:
        features = compute_features(
            pointcloud_from(observation), observation, masks, state.selected_id, scene.boundary
        )
        scores = forward(components.model, features.values)
        cell = pick_retrieval_point(AffordanceMap(scores, features.cells), masks, state.selected_id)
    state.grasp_cell = cell
    state.master_arm = choose_master_arm(cell, scene.grid_width // 2)

    state.enter(PipelinePhase.GRASP_LIFT)
    lifted = simulate_single_grasp(scene, cell, oracle)
    state.outcome = lifted
    state.enter(PipelinePhase.COOP_DECIDE)
    if lifted.result in (GraspResult.EMPTY_GRASP, GraspResult.BOUNDARY_COLLISION):
        state.enter(PipelinePhase.SINGLE_DELIVER)
        return state.record(costs.single, TerminalStatus.FAILED, lifted.result.value), scene

    raised = lift_scene(scene, lifted)
    post = render_lift_observation(scene, lifted, cell, oracle)
    tracked = track_masks(
        [Frame(observation, scene), Frame(post, raised)],
        MaskSet.from_bitmaps([selected.bitmap], masks.shape),
    )
    lifted_cells = lifted_region(observation, post)
    picked = tracked.masks[0].bitmap if len(tracked) else lifted_cells
    lift_view = LiftView(
        pre=observation,
        post=post,
        picked=picked,
        selected_id=state.selected_id,
        summaries=view.summaries,
        lift=summarize_lift(observation, post, picked, cell, selected.area, lifted_cells),
        outcome=lifted,
        scene=scene,
    )
    try:
        state.coop = reasoner.decide_cooperation(lift_view)
        state.coop_queried = True
    except ReasonerError as e:
        logger.error("Reasoner failed", attempt=attempt_index, error=str(e))
        state.enter(PipelinePhase.ABORT_ATTEMPT)
        scene = drop_back(scene, lifted.lifted_ids, derive_seed(seed, "drop-back"), oracle)
        return state.record(costs.abort, TerminalStatus.FAILED, f"reasoner: {e}"), scene

    if state.coop.x_error:
        state.enter(PipelinePhase.ABORT_ATTEMPT)
        scene = drop_back(scene, lifted.lifted_ids, derive_seed(seed, "drop-back"), oracle)
        return state.record(costs.abort, TerminalStatus.ABORTED), scene

    if not state.coop.x_dual or config.ablated(Ablation.DUAL_ARM):
        state.enter(PipelinePhase.SINGLE_DELIVER)
        status = TerminalStatus.RETRIEVED if lifted.result == GraspResult.SUCCESS else TerminalStatus.FAILED
        scene = apply_retrieval(scene, lifted, derive_seed(seed, "drop-back"), oracle)
        reason = None if status == TerminalStatus.RETRIEVED else lifted.result.value
        return state.record(costs.single, status, reason), scene

    state.enter(PipelinePhase.DUAL_GRASP_DELIVER)
    if config.ablated(Ablation.TRACKING_SELECTION):
        x0, y0, x1, y1 = bbox_of(lifted_cells if lifted_cells.any() else picked)
        rng = np.random.default_rng(derive_seed(seed, "coop-guess"))
        coop_cell = (int(rng.integers(x0, x1 + 1)), int(rng.integers(y0, y1 + 1)))
    else:
        coop_cell = select_coop_point(
            pointcloud_from(post),
            picked,
            cell,
            config.coop_quantile,
            np.random.default_rng(derive_seed(seed, "coop-point")),
        )
    state.coop_cell = coop_cell

    garment_id = lifted.garment_id
    footprint = set(scene.garment(garment_id).cells) if garment_id is not None else set()
    if lifted.result == GraspResult.MULTI_LIFT or coop_cell not in footprint or coop_cell == cell:
        final = lifted.model_copy(update={"steps": 2})
    else:
        final = simulate_dual_delivery(scene, garment_id, cell, coop_cell, oracle)
    state.outcome = final
    status = TerminalStatus.RETRIEVED if final.result == GraspResult.SUCCESS else TerminalStatus.FAILED
    if final.result == GraspResult.BOUNDARY_COLLISION:
        scene = drop_back(scene, lifted.lifted_ids, derive_seed(seed, "drop-back"), oracle)
    else:
        scene = apply_retrieval(scene, final, derive_seed(seed, "drop-back"), oracle)
    reason = None if status == TerminalStatus.RETRIEVED else final.result.value
    return state.record(costs.dual, status, reason), scene

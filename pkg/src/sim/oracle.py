"""
Grasp oracle and pile evolution.

Deterministic physics-lite rules decide what a grasp lifts, whether the garment
clears the pile, how failed retrievals fall back and how shaking moves garments.
"""

from typing import List, Optional, Sequence, Set, Tuple

import numpy as np
import structlog

from src.models.pile_models import GarmentSpec, GraspOutcome, GraspResult, OracleConfig, PileScene
from src.sim.pile import (
    layer_stack,
    overlap_area,
    placement_region,
    translate_garment,
    translation_bounds,
    with_stack,
)
from src.utils.errors import DomainError, NoGarmentError
from src.utils.seeding import derive_seed

logger = structlog.get_logger()

Cell = Tuple[int, int]

# Slack for comparing lengths computed from float cell sizes.
LENGTH_EPS = 1e-9


def _check_in_grid(scene: PileScene, point: Cell) -> None:
    x, y = point
    if not (0 <= x < scene.grid_width and 0 <= y < scene.grid_height):
        raise DomainError(f"Point {point} lies outside the {scene.grid_width}x{scene.grid_height} grid")


def _max_distance(cells: Sequence[Cell], anchors: Sequence[Cell]) -> float:
    """Max over cells of the distance to the nearest anchor, in cells."""
    pts = np.asarray(cells, dtype=np.float64)
    nearest = np.full(len(pts), np.inf)
    for ax, ay in anchors:
        nearest = np.minimum(nearest, np.hypot(pts[:, 0] - ax, pts[:, 1] - ay))
    return float(nearest.max())


def sag_length(scene: PileScene, garment_id: int, point: Cell) -> float:
    """Hanging length (m) of a garment held at one of its cells."""
    garment = scene.garment(garment_id)
    if tuple(point) not in set(garment.cells):
        raise DomainError(f"Point {point} is not on garment {garment_id}")
    return scene.cell_size * _max_distance(garment.cells, [tuple(point)])


def topmost_index(scene: PileScene, point: Cell) -> Optional[int]:
    """Stack index of the topmost garment covering a cell."""
    x, y = point
    for index in range(len(scene.stack) - 1, -1, -1):
        if (x, y) in set(scene.stack[index].cells):
            return index
    return None


def lifted_group(scene: PileScene, index: int, point: Cell, oracle: OracleConfig) -> List[int]:
    """Ids lifted together with the garment at stack index: dragged covers plus entangled partners."""
    layers = layer_stack(scene)
    garment = scene.stack[index]
    rows, cols = np.mgrid[0:scene.grid_height, 0:scene.grid_width]
    near = (cols - point[0]) ** 2 + (rows - point[1]) ** 2 <= oracle.r_drag ** 2
    own_near = layers[index] & near

    lifted = {garment.id}
    for above in range(index + 1, len(scene.stack)):
        if (layers[above] & own_near).any():
            lifted.add(scene.stack[above].id)
    for edge in scene.entanglement:
        if edge.w >= oracle.theta_ent and garment.id in (edge.a, edge.b):
            lifted.add(edge.b if edge.a == garment.id else edge.a)
    return sorted(lifted)


def simulate_single_grasp(
    scene: PileScene, point: Cell, oracle: Optional[OracleConfig] = None
) -> GraspOutcome:
    """Single-arm grasp at a cell, decided by an ordered rule cascade."""
    oracle = oracle or OracleConfig()
    _check_in_grid(scene, point)
    point = (int(point[0]), int(point[1]))

    index = topmost_index(scene, point)
    if index is None:
        return GraspOutcome(result=GraspResult.EMPTY_GRASP)

    garment = scene.stack[index]
    if scene.boundary.violates(*point):
        return GraspOutcome(result=GraspResult.BOUNDARY_COLLISION, garment_id=garment.id)

    lifted = lifted_group(scene, index, point, oracle)
    sag = sag_length(scene, garment.id, point)
    if len(lifted) >= 2:
        return GraspOutcome(
            result=GraspResult.MULTI_LIFT, lifted_ids=tuple(lifted), garment_id=garment.id, sag=sag
        )
    if sag > oracle.l_arm + LENGTH_EPS:
        return GraspOutcome(
            result=GraspResult.DROP, lifted_ids=(garment.id,), garment_id=garment.id, sag=sag
        )
    return GraspOutcome(
        result=GraspResult.SUCCESS, lifted_ids=(garment.id,), garment_id=garment.id, sag=sag
    )


def simulate_dual_delivery(
    scene: PileScene,
    garment_id: int,
    p1: Cell,
    p2: Cell,
    oracle: Optional[OracleConfig] = None,
) -> GraspOutcome:
    """Both arms hold the garment and deliver it horizontally."""
    oracle = oracle or OracleConfig()
    garment = scene.garment(garment_id)
    footprint = set(garment.cells)
    p1, p2 = (int(p1[0]), int(p1[1])), (int(p2[0]), int(p2[1]))
    if p1 not in footprint or p2 not in footprint:
        raise DomainError(f"Cooperative grasp points {p1}, {p2} must both lie on garment {garment_id}")
    if p1 == p2:
        raise DomainError("Cooperative grasp points must differ")

    hang = scene.cell_size * _max_distance(garment.cells, [p1, p2])
    if scene.boundary.violates(*p1) or scene.boundary.violates(*p2):
        return GraspOutcome(
            result=GraspResult.BOUNDARY_COLLISION, garment_id=garment_id, sag=hang, steps=2
        )
    result = GraspResult.SUCCESS if hang <= oracle.l_arm + LENGTH_EPS else GraspResult.DROP
    return GraspOutcome(
        result=result, lifted_ids=(garment_id,), garment_id=garment_id, sag=hang, steps=2
    )


def drop_back(
    scene: PileScene,
    garment_ids: Sequence[int],
    seed: int,
    oracle: Optional[OracleConfig] = None,
) -> PileScene:
    """Drop garments back on top of the pile at a small seeded offset, clamped to the boundary."""
    oracle = oracle or OracleConfig()
    dropped: Set[int] = set(garment_ids)
    if not dropped:
        return scene
    rng = np.random.default_rng(seed)
    region = placement_region(scene.boundary, scene.shape)

    rest: List[GarmentSpec] = []
    moved: List[GarmentSpec] = []
    for garment in scene.stack:
        if garment.id not in dropped:
            rest.append(garment)
            continue
        dx, dy = (int(v) for v in rng.integers(-oracle.drop_offset, oracle.drop_offset + 1, size=2))
        dx_min, dx_max, dy_min, dy_max = translation_bounds([garment], region)
        moved.append(
            translate_garment(garment, int(np.clip(dx, dx_min, dx_max)), int(np.clip(dy, dy_min, dy_max)))
        )
    return with_stack(scene, rest + moved)


def remove_garment(scene: PileScene, garment_id: int) -> PileScene:
    return scene.model_copy(
        update={
            "stack": tuple(g for g in scene.stack if g.id != garment_id),
            "entanglement": tuple(
                e for e in scene.entanglement if garment_id not in (e.a, e.b)
            ),
        }
    )


def apply_retrieval(
    scene: PileScene,
    outcome: GraspOutcome,
    seed: Optional[int] = None,
    oracle: Optional[OracleConfig] = None,
) -> PileScene:
    """Evolve the pile after an attempt: remove on success, drop back on failure."""
    if outcome.result == GraspResult.SUCCESS:
        return remove_garment(scene, outcome.lifted_ids[0])
    if outcome.result in (GraspResult.MULTI_LIFT, GraspResult.DROP):
        if seed is None:
            seed = derive_seed(scene.seed, "drop-back", len(scene.stack), *outcome.lifted_ids)
        return drop_back(scene, outcome.lifted_ids, seed, oracle)
    return scene


def shake_perturb(
    scene: PileScene,
    pinch: Cell,
    frames: int,
    seed: int,
    oracle: Optional[OracleConfig] = None,
) -> List[PileScene]:
    """Pinch, lift, shake and release.

    Returns `frames` scenes; frame 0 is the input. The pinched group follows a seeded
    random walk and is released at the visited position with the least overlap among
    those that do not increase any overlap with the rest of the pile.
    """
    oracle = oracle or OracleConfig()
    if frames < 2:
        raise DomainError("Shaking needs at least two frames")
    _check_in_grid(scene, pinch)
    pinch = (int(pinch[0]), int(pinch[1]))
    index = topmost_index(scene, pinch)
    if index is None:
        raise NoGarmentError(f"No garment covers pinch cell {pinch}")

    group_ids = set(lifted_group(scene, index, pinch, oracle))
    group = [g for g in scene.stack if g.id in group_ids]
    others = [g for g in scene.stack if g.id not in group_ids]
    baseline = {(m.id, o.id): overlap_area(m, o) for m in group for o in others}

    region = placement_region(scene.boundary, scene.shape)
    dx_min, dx_max, dy_min, dy_max = translation_bounds(group, region)
    rng = np.random.default_rng(seed)
    positions: List[Tuple[int, int]] = [(0, 0)]
    for _ in range(frames - 1):
        step = rng.integers(-oracle.shake_step, oracle.shake_step + 1, size=2)
        px, py = positions[-1]
        positions.append(
            (int(np.clip(px + step[0], dx_min, dx_max)), int(np.clip(py + step[1], dy_min, dy_max)))
        )

    def moved(offset: Tuple[int, int]) -> List[GarmentSpec]:
        return [translate_garment(g, offset[0], offset[1]) for g in group]

    best_position = (0, 0)
    best_total = sum(baseline.values())
    for position in positions[1:]:
        shifted = moved(position)
        overlaps = {(m.id, o.id): overlap_area(m, o) for m in shifted for o in others}
        if any(overlaps[key] > baseline[key] for key in overlaps):
            continue
        total = sum(overlaps.values())
        if total <= best_total:
            best_position, best_total = position, total

    sequence = [scene]
    for position in positions[1:-1]:
        sequence.append(with_stack(scene, others + moved(position)))
    if best_position == (0, 0):
        sequence.append(scene)
    else:
        sequence.append(with_stack(scene, others + moved(best_position)))

    logger.debug(
        "Shake finished",
        pinch=pinch,
        group=sorted(group_ids),
        displacement=best_position,
        overlap_before=sum(baseline.values()),
        overlap_after=best_total,
    )
    return sequence

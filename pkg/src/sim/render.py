"""
RGB-D rendering of a pile.

The colour image shows the topmost garment per cell; depth is the number of
covering layers times the layer thickness, plus the container floor offset.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from src.models.pile_models import GraspOutcome, OracleConfig, PileScene
from src.sim.pile import layer_stack, with_stack

BACKGROUND_RGB: Tuple[int, int, int] = (60, 60, 60)


@dataclass(frozen=True)
class Observation:
    color: np.ndarray
    depth: np.ndarray
    cell_size: float
    layer_thickness: float
    floor_offset: float = 0.0

    @property
    def shape(self) -> Tuple[int, int]:
        return (int(self.depth.shape[0]), int(self.depth.shape[1]))

    @property
    def covered(self) -> np.ndarray:
        """Cells showing a garment (anything other than the background colour)."""
        return np.any(self.color != np.array(BACKGROUND_RGB, dtype=np.uint8), axis=-1)


def _floor(scene: PileScene) -> np.ndarray:
    floor = np.zeros(scene.shape, dtype=np.float64)
    if scene.boundary.is_closed and scene.floor_offset > 0.0 and scene.boundary.container:
        x0, y0, x1, y1 = scene.boundary.container
        floor[y0:y1, x0:x1] = scene.floor_offset
    return floor


def floor_offset_of(scene: PileScene) -> float:
    """Effective floor height; open surfaces sit at zero."""
    return scene.floor_offset if scene.boundary.is_closed else 0.0


def render_observation(scene: PileScene) -> Observation:
    layers = layer_stack(scene)
    color = np.empty(scene.shape + (3,), dtype=np.uint8)
    color[:, :] = BACKGROUND_RGB
    for index, garment in enumerate(scene.stack):
        color[layers[index]] = garment.color
    counts = layers.sum(axis=0) if len(scene.stack) else np.zeros(scene.shape, dtype=np.int64)
    depth = counts * scene.layer_thickness + _floor(scene)
    return Observation(
        color=color,
        depth=depth,
        cell_size=scene.cell_size,
        layer_thickness=scene.layer_thickness,
        floor_offset=floor_offset_of(scene),
    )


def lift_scene(scene: PileScene, outcome: GraspOutcome) -> PileScene:
    """Scene with the lifted garments raised to the top; the grasped garment ends topmost."""
    if not outcome.lifted_ids:
        return scene
    lifted = set(outcome.lifted_ids)
    rest = [g for g in scene.stack if g.id not in lifted]
    raised = [g for g in scene.stack if g.id in lifted and g.id != outcome.garment_id]
    raised += [g for g in scene.stack if g.id == outcome.garment_id]
    return with_stack(scene, rest + raised)


def render_lift_observation(
    scene: PileScene,
    outcome: GraspOutcome,
    grasp_cell: Tuple[int, int],
    oracle: Optional[OracleConfig] = None,
) -> Observation:
    """Observation while the master arm holds the lifted garments above the pile.

    Lifted cells hang from the grasp point: their height falls with the distance
    to the grasp cell, so the farthest cell is the lowest one.
    """
    if not outcome.lifted_ids:
        return render_observation(scene)
    oracle = oracle or OracleConfig()
    lifted = set(outcome.lifted_ids)
    pile = with_stack(scene, [g for g in scene.stack if g.id not in lifted])
    base = render_observation(pile)

    raised = lift_scene(scene, outcome)
    layers = layer_stack(raised)
    lifted_layers = layers[len(pile.stack):]
    lifted_cover = lifted_layers.any(axis=0)

    color = base.color.copy()
    for offset, garment in enumerate(raised.stack[len(pile.stack):]):
        color[lifted_layers[offset]] = garment.color

    rows, cols = np.mgrid[0:scene.grid_height, 0:scene.grid_width]
    hang = np.hypot(cols - grasp_cell[0], rows - grasp_cell[1]) * scene.cell_size
    top = float(base.depth.max(initial=0.0)) + oracle.lift_clearance + float(hang[lifted_cover].max())
    depth = base.depth.copy()
    depth[lifted_cover] = top - hang[lifted_cover]
    return Observation(
        color=color,
        depth=depth,
        cell_size=scene.cell_size,
        layer_thickness=scene.layer_thickness,
        floor_offset=floor_offset_of(scene),
    )

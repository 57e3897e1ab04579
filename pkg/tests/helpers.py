"""
Scene builders shared by the test modules.
"""

from typing import Optional, Sequence, Tuple

from src.models.pile_models import (
    Boundary,
    BoundaryKind,
    EntanglementEdge,
    GarmentCategory,
    GarmentSpec,
    PileScene,
    ShapeClass,
)
from src.sim.pile import compute_entanglement

RED = (200, 30, 40)
GREEN = (40, 160, 60)
BLUE = (35, 70, 190)
YELLOW = (235, 215, 50)


def rect(x0: int, y0: int, w: int, h: int) -> Tuple[Tuple[int, int], ...]:
    return tuple((x, y) for y in range(y0, y0 + h) for x in range(x0, x0 + w))


def garment(
    garment_id: int,
    cells: Sequence[Tuple[int, int]],
    color: Tuple[int, int, int] = RED,
    category: GarmentCategory = GarmentCategory.TOPS,
) -> GarmentSpec:
    return GarmentSpec(
        id=garment_id,
        category=category,
        color=color,
        cells=tuple(cells),
        shape_class=ShapeClass.T_SHAPE,
    )


def make_scene(
    garments: Sequence[GarmentSpec],
    size: int = 32,
    container: Optional[Tuple[int, int, int, int]] = None,
    wall_margin: int = 2,
    entanglement: Optional[Sequence[EntanglementEdge]] = None,
    floor_offset: float = 0.0,
    seed: int = 0,
) -> PileScene:
    """Scene with the given stack; entanglement is computed unless given explicitly."""
    boundary = (
        Boundary(kind=BoundaryKind.CLOSED, container=container, wall_margin=wall_margin)
        if container is not None
        else Boundary()
    )
    edges = (
        tuple(entanglement)
        if entanglement is not None
        else compute_entanglement(garments, (size, size))
    )
    return PileScene(
        grid_width=size,
        grid_height=size,
        cell_size=0.02,
        layer_thickness=0.005,
        floor_offset=floor_offset,
        boundary=boundary,
        stack=tuple(garments),
        entanglement=edges,
        seed=seed,
    )

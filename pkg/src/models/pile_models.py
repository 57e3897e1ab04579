"""
Pile Models

Pydantic models for layered garment piles, the grasp oracle and scene generation.
"""

from collections import deque
from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

Cell = Tuple[int, int]


class GarmentCategory(str, Enum):
    DRESS = "dress"
    TROUSERS = "trousers"
    TOPS = "tops"
    SKIRT = "skirt"
    SOCKS = "socks"
    GLOVE = "glove"
    HAT = "hat"
    SCARF = "scarf"
    UNDERPANTS = "underpants"


class ShapeClass(str, Enum):
    T_SHAPE = "t_shape"
    TRAPEZOID = "trapezoid"
    LEGS = "legs"
    ELL = "ell"
    MITTEN = "mitten"
    DISC = "disc"
    STRIP = "strip"
    BRIEF = "brief"


class BoundaryKind(str, Enum):
    OPEN = "open"
    CLOSED = "closed"


def _is_four_connected(cells: Tuple[Cell, ...]) -> bool:
    remaining = set(cells)
    if not remaining:
        return False
    queue = deque([next(iter(remaining))])
    remaining.discard(queue[0])
    while queue:
        x, y = queue.popleft()
        for neighbor in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
            if neighbor in remaining:
                remaining.discard(neighbor)
                queue.append(neighbor)
    return not remaining


class Boundary(BaseModel):
    """Open floor or a walled container given as a half-open cell rectangle."""

    model_config = ConfigDict(frozen=True)

    kind: BoundaryKind = Field(default=BoundaryKind.OPEN, description="Open surface or closed container")
    container: Optional[Tuple[int, int, int, int]] = Field(
        None, description="Container rectangle (x0, y0, x1, y1), half-open"
    )
    wall_margin: int = Field(default=2, ge=0, description="Cells next to a wall that cause collisions")

    @model_validator(mode="after")
    def validate_container(self) -> "Boundary":
        if self.kind == BoundaryKind.CLOSED:
            if self.container is None:
                raise ValueError("Closed boundary requires a container rectangle")
            x0, y0, x1, y1 = self.container
            if x1 <= x0 or y1 <= y0 or x0 < 0 or y0 < 0:
                raise ValueError(f"Invalid container rectangle {self.container}")
        return self

    @property
    def is_closed(self) -> bool:
        return self.kind == BoundaryKind.CLOSED

    def wall_distance(self, x: int, y: int) -> int:
        """Cells between (x, y) and the nearest container wall; only meaningful for closed boundaries."""
        if self.container is None:
            raise ValueError("Open boundary has no walls")
        x0, y0, x1, y1 = self.container
        return min(x - x0, x1 - 1 - x, y - y0, y1 - 1 - y)

    def violates(self, x: int, y: int) -> bool:
        return self.is_closed and self.wall_distance(x, y) < self.wall_margin

    def contains(self, x: int, y: int) -> bool:
        if self.container is None:
            return True
        x0, y0, x1, y1 = self.container
        return x0 <= x < x1 and y0 <= y < y1


class GarmentSpec(BaseModel):
    """One garment: category, colour and a 4-connected footprint of grid cells."""

    model_config = ConfigDict(frozen=True)

    id: int = Field(..., ge=0, description="Garment id, unique within a scene")
    category: GarmentCategory = Field(..., description="Garment category")
    color: Tuple[int, int, int] = Field(..., description="RGB colour")
    cells: Tuple[Cell, ...] = Field(..., description="Footprint cells (x, y), row-major sorted")
    shape_class: ShapeClass = Field(..., description="Template used to generate the footprint")

    @field_validator("color")
    @classmethod
    def validate_color(cls, v: Tuple[int, int, int]) -> Tuple[int, int, int]:
        if any(c < 0 or c > 255 for c in v):
            raise ValueError("Colour components must lie in 0-255")
        return v

    @field_validator("cells")
    @classmethod
    def validate_cells(cls, v: Tuple[Cell, ...]) -> Tuple[Cell, ...]:
        unique = sorted(set(v), key=lambda c: (c[1], c[0]))
        if not unique:
            raise ValueError("Footprint must be non-empty")
        if not _is_four_connected(tuple(unique)):
            raise ValueError("Footprint must be 4-connected")
        return tuple(unique)

    @property
    def area(self) -> int:
        return len(self.cells)


class EntanglementEdge(BaseModel):
    model_config = ConfigDict(frozen=True)

    a: int = Field(..., description="Lower garment id of the pair")
    b: int = Field(..., description="Higher garment id of the pair")
    w: float = Field(..., gt=0.0, le=1.0, description="Coupling weight")

    @model_validator(mode="after")
    def validate_pair(self) -> "EntanglementEdge":
        if self.a >= self.b:
            raise ValueError("Entanglement edge requires a < b")
        return self


class PileScene(BaseModel):
    """The world state: stacked footprints (later entries lie on top), boundary and couplings."""

    model_config = ConfigDict(frozen=True)

    grid_width: int = Field(..., ge=1, description="Grid width in cells")
    grid_height: int = Field(..., ge=1, description="Grid height in cells")
    cell_size: float = Field(..., gt=0.0, description="Meters per cell")
    layer_thickness: float = Field(..., gt=0.0, description="Meters per garment layer")
    floor_offset: float = Field(default=0.0, ge=0.0, description="Container floor height in meters")
    boundary: Boundary = Field(default_factory=Boundary, description="Open or closed boundary")
    stack: Tuple[GarmentSpec, ...] = Field(default=(), description="Stacking order, bottom first")
    entanglement: Tuple[EntanglementEdge, ...] = Field(default=(), description="Coupled pairs")
    seed: int = Field(default=0, ge=0, description="Generation seed")

    @model_validator(mode="after")
    def validate_scene(self) -> "PileScene":
        ids = [g.id for g in self.stack]
        if len(ids) != len(set(ids)):
            raise ValueError("Garment ids must be unique within the stack")
        footprints: Dict[int, set] = {}
        for garment in self.stack:
            for x, y in garment.cells:
                if not (0 <= x < self.grid_width and 0 <= y < self.grid_height):
                    raise ValueError(f"Garment {garment.id} leaves the grid at {(x, y)}")
                if self.boundary.is_closed and not self.boundary.contains(x, y):
                    raise ValueError(f"Garment {garment.id} leaves the container at {(x, y)}")
            footprints[garment.id] = set(garment.cells)
        for edge in self.entanglement:
            if edge.a not in footprints or edge.b not in footprints:
                raise ValueError(f"Entanglement edge references unknown garment {(edge.a, edge.b)}")
            if not footprints[edge.a] & footprints[edge.b]:
                raise ValueError(f"Entangled garments {(edge.a, edge.b)} do not overlap")
        return self

    @property
    def shape(self) -> Tuple[int, int]:
        """Array shape (rows, columns)."""
        return (self.grid_height, self.grid_width)

    @property
    def ids(self) -> List[int]:
        return [g.id for g in self.stack]

    def garment(self, garment_id: int) -> GarmentSpec:
        for g in self.stack:
            if g.id == garment_id:
                return g
        raise KeyError(garment_id)

    def stack_index(self, garment_id: int) -> int:
        for index, g in enumerate(self.stack):
            if g.id == garment_id:
                return index
        raise KeyError(garment_id)

    def entanglement_weight(self, a: int, b: int) -> float:
        lo, hi = min(a, b), max(a, b)
        for edge in self.entanglement:
            if edge.a == lo and edge.b == hi:
                return edge.w
        return 0.0


class GraspResult(str, Enum):
    SUCCESS = "Success"
    MULTI_LIFT = "MultiLift"
    DROP = "Drop"
    BOUNDARY_COLLISION = "BoundaryCollision"
    EMPTY_GRASP = "EmptyGrasp"


class GraspOutcome(BaseModel):
    """Result of one grasp primitive as decided by the oracle."""

    model_config = ConfigDict(frozen=True)

    result: GraspResult = Field(..., description="Outcome class")
    lifted_ids: Tuple[int, ...] = Field(default=(), description="Sorted ids of lifted garments")
    garment_id: Optional[int] = Field(None, description="Garment under the grasp point")
    sag: float = Field(default=0.0, ge=0.0, description="Hanging length in meters")
    steps: int = Field(default=1, ge=1, description="Motion steps of this primitive")

    @model_validator(mode="after")
    def validate_result(self) -> "GraspOutcome":
        if list(self.lifted_ids) != sorted(set(self.lifted_ids)):
            raise ValueError("lifted_ids must be sorted and unique")
        count = len(self.lifted_ids)
        if self.result == GraspResult.SUCCESS and count != 1:
            raise ValueError("Success lifts exactly one garment")
        if self.result == GraspResult.MULTI_LIFT and count < 2:
            raise ValueError("MultiLift lifts two or more garments")
        if self.result == GraspResult.EMPTY_GRASP and count != 0:
            raise ValueError("EmptyGrasp lifts nothing")
        return self


class OracleConfig(BaseModel):
    """Constants of the grasp oracle."""

    model_config = ConfigDict(frozen=True)

    r_drag: float = Field(default=3.0, ge=0.0, description="Drag radius around the grasp point (cells)")
    theta_ent: float = Field(default=0.5, ge=0.0, le=1.0, description="Entanglement co-lift threshold")
    l_arm: float = Field(default=0.35, gt=0.0, description="Single-arm clearance length (m)")
    drop_offset: int = Field(default=2, ge=0, description="Drop-back offset bound per axis (cells)")
    shake_step: int = Field(default=3, ge=0, description="Random-walk step bound per frame (cells)")
    lift_clearance: float = Field(default=0.1, gt=0.0, description="Gripper height above the longest hang (m)")


class SceneGenConfig(BaseModel):
    """Parameters of procedural pile generation."""

    model_config = ConfigDict(frozen=True)

    boundary: BoundaryKind = Field(default=BoundaryKind.OPEN, description="Scenario kind")
    count_min: int = Field(default=6, ge=0, description="Minimum garment count")
    count_max: int = Field(default=16, ge=0, description="Maximum garment count")
    grid_width: int = Field(default=64, ge=32, description="Grid width in cells")
    grid_height: int = Field(default=64, ge=32, description="Grid height in cells")
    cell_size: float = Field(default=0.02, gt=0.0, description="Meters per cell")
    layer_thickness: float = Field(default=0.005, gt=0.0, description="Meters per layer")
    floor_offset: float = Field(default=0.0, ge=0.0, description="Container floor height")
    wall_margin: int = Field(default=2, ge=0, description="Wall collision margin in cells")
    container: Optional[Tuple[int, int, int, int]] = Field(
        None, description="Container rectangle; centred half-size box when omitted"
    )
    stack_capacity: int = Field(default=4, ge=1, description="Mean layers the region can hold")

    @model_validator(mode="after")
    def validate_counts(self) -> "SceneGenConfig":
        if self.count_min > self.count_max:
            raise ValueError("count_min must not exceed count_max")
        return self

    @classmethod
    def for_boundary(
        cls,
        boundary: BoundaryKind,
        count_min: Optional[int] = None,
        count_max: Optional[int] = None,
        **overrides: object,
    ) -> "SceneGenConfig":
        """Scenario defaults: 6-16 garments on open surfaces, 3-8 inside containers."""
        lo, hi = (6, 16) if boundary == BoundaryKind.OPEN else (3, 8)
        return cls(
            boundary=boundary,
            count_min=lo if count_min is None else count_min,
            count_max=hi if count_max is None else count_max,
            **overrides,
        )

    def resolved_container(self) -> Optional[Tuple[int, int, int, int]]:
        if self.boundary == BoundaryKind.OPEN:
            return None
        if self.container is not None:
            return self.container
        qx, qy = self.grid_width // 4, self.grid_height // 4
        return (qx, qy, self.grid_width - qx, self.grid_height - qy)

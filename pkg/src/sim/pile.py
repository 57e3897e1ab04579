"""
Pile generation and occupancy queries.

Scenes are generated procedurally from a seed: every garment gets a category,
a palette colour with a small jitter, a rotated template footprint and a uniform
position inside the allowed region. Later garments are stacked on top.
"""

from typing import Dict, List, Sequence, Tuple

import numpy as np
import structlog
from scipy import ndimage

from src.models.palette import PALETTE, PALETTE_NAMES
from src.models.pile_models import (
    Boundary,
    BoundaryKind,
    EntanglementEdge,
    GarmentSpec,
    PileScene,
    SceneGenConfig,
)
from src.sim.garments import CATALOGUE, CATEGORIES, shape_bitmap
from src.utils.errors import SceneGenerationError

logger = structlog.get_logger()

MIN_GARMENT_CELLS = 10
COLOR_JITTER = 8


def footprint_bitmap(garment: GarmentSpec, shape: Tuple[int, int]) -> np.ndarray:
    """Boolean (rows, columns) bitmap of a garment footprint."""
    bitmap = np.zeros(shape, dtype=bool)
    cells = np.asarray(garment.cells, dtype=np.int64)
    bitmap[cells[:, 1], cells[:, 0]] = True
    return bitmap


def layer_stack(scene: PileScene) -> np.ndarray:
    """(n, rows, columns) footprint bitmaps in stacking order."""
    layers = np.zeros((len(scene.stack),) + scene.shape, dtype=bool)
    for index, garment in enumerate(scene.stack):
        cells = np.asarray(garment.cells, dtype=np.int64)
        layers[index, cells[:, 1], cells[:, 0]] = True
    return layers


def owner_map(scene: PileScene) -> np.ndarray:
    """Stack index of the topmost garment per cell, -1 where uncovered."""
    owner = np.full(scene.shape, -1, dtype=np.int64)
    for index, layer in enumerate(layer_stack(scene)):
        owner[layer] = index
    return owner


def cover_count(scene: PileScene) -> np.ndarray:
    return layer_stack(scene).sum(axis=0)


def visible_regions(scene: PileScene) -> Dict[int, np.ndarray]:
    """Garment id -> bitmap of the cells where that garment is topmost.

    Regions are pairwise disjoint and their union is the covered-cell set.
    Fully occluded garments map to an empty bitmap.
    """
    owner = owner_map(scene)
    return {garment.id: owner == index for index, garment in enumerate(scene.stack)}


def cells_of(bitmap: np.ndarray) -> List[Tuple[int, int]]:
    """Cells (x, y) of a bitmap in row-major order."""
    rows, cols = np.nonzero(bitmap)
    return [(int(x), int(y)) for y, x in zip(rows, cols)]


def compute_entanglement(
    stack: Sequence[GarmentSpec], shape: Tuple[int, int]
) -> Tuple[EntanglementEdge, ...]:
    """Coupling weights for every overlapping pair.

    w = clamp(overlap / min(area_a, area_b) * f, 0, 1) with f = 1 when a third garment lies
    between the pair over their overlap and f = 0.5 otherwise.
    """
    layers = np.zeros((len(stack),) + shape, dtype=bool)
    for index, garment in enumerate(stack):
        cells = np.asarray(garment.cells, dtype=np.int64)
        layers[index, cells[:, 1], cells[:, 0]] = True

    edges: List[EntanglementEdge] = []
    for i in range(len(stack)):
        for j in range(i + 1, len(stack)):
            overlap = layers[i] & layers[j]
            overlap_area = int(overlap.sum())
            if overlap_area == 0:
                continue
            separated = j - i > 1 and bool((layers[i + 1:j].any(axis=0) & overlap).any())
            factor = 1.0 if separated else 0.5
            smaller = min(stack[i].area, stack[j].area)
            weight = float(np.clip(overlap_area / smaller * factor, 0.0, 1.0))
            a, b = sorted((stack[i].id, stack[j].id))
            edges.append(EntanglementEdge(a=a, b=b, w=weight))
    edges.sort(key=lambda e: (e.a, e.b))
    return tuple(edges)


def placement_region(boundary: Boundary, shape: Tuple[int, int]) -> Tuple[int, int, int, int]:
    """Half-open rectangle garments must stay inside: the container or the whole grid."""
    if boundary.container is not None and boundary.is_closed:
        return boundary.container
    return (0, 0, shape[1], shape[0])


def _random_footprint(
    rng: np.random.Generator,
    profile_index: int,
    region: Tuple[int, int, int, int],
) -> Tuple[np.ndarray, int, int]:
    category = CATEGORIES[profile_index]
    profile = CATALOGUE[category]
    width = int(rng.integers(profile.width[0], profile.width[1] + 1))
    height = int(rng.integers(profile.height[0], profile.height[1] + 1))
    bitmap = shape_bitmap(profile.shape_class, width, height)
    bitmap = np.rot90(bitmap, k=int(rng.integers(0, 4)))

    x0, y0, x1, y1 = region
    max_h, max_w = y1 - y0, x1 - x0
    bitmap = bitmap[:max_h, :max_w]
    labels, count = ndimage.label(bitmap)
    if count > 1:
        sizes = ndimage.sum(bitmap, labels, index=range(1, count + 1))
        bitmap = labels == (int(np.argmax(sizes)) + 1)

    h, w = bitmap.shape
    left = int(rng.integers(x0, x1 - w + 1))
    top = int(rng.integers(y0, y1 - h + 1))
    return bitmap, left, top


def generate_scene(config: SceneGenConfig, seed: int) -> PileScene:
    """Generate a layered pile; identical (config, seed) gives an identical scene."""
    container = config.resolved_container()
    boundary = Boundary(
        kind=config.boundary,
        container=container,
        wall_margin=config.wall_margin,
    )
    shape = (config.grid_height, config.grid_width)
    region = placement_region(boundary, shape)
    region_area = (region[2] - region[0]) * (region[3] - region[1])

    if config.count_max * MIN_GARMENT_CELLS > region_area * config.stack_capacity:
        raise SceneGenerationError(
            f"{config.count_max} garments exceed the capacity of a {region_area}-cell region"
        )

    rng = np.random.default_rng(seed)
    count = int(rng.integers(config.count_min, config.count_max + 1))

    stack: List[GarmentSpec] = []
    for garment_id in range(count):
        profile_index = int(rng.integers(0, len(CATEGORIES)))
        color_name = PALETTE_NAMES[int(rng.integers(0, len(PALETTE_NAMES)))]
        jitter = rng.integers(-COLOR_JITTER, COLOR_JITTER + 1, size=3)
        color = tuple(int(c) for c in np.clip(np.array(PALETTE[color_name]) + jitter, 0, 255))
        bitmap, left, top = _random_footprint(rng, profile_index, region)
        rows, cols = np.nonzero(bitmap)
        cells = tuple((int(x) + left, int(y) + top) for y, x in zip(rows, cols))
        category = CATEGORIES[profile_index]
        stack.append(
            GarmentSpec(
                id=garment_id,
                category=category,
                color=color,
                cells=cells,
                shape_class=CATALOGUE[category].shape_class,
            )
        )

    scene = PileScene(
        grid_width=config.grid_width,
        grid_height=config.grid_height,
        cell_size=config.cell_size,
        layer_thickness=config.layer_thickness,
        floor_offset=config.floor_offset,
        boundary=boundary,
        stack=tuple(stack),
        entanglement=compute_entanglement(stack, shape),
        seed=seed,
    )
    logger.debug(
        "Scene generated",
        seed=seed,
        boundary=config.boundary.value,
        garments=count,
        entangled_pairs=len(scene.entanglement),
    )
    return scene


def with_stack(scene: PileScene, stack: Sequence[GarmentSpec]) -> PileScene:
    """Copy of a scene with a new stack and recomputed entanglement."""
    return scene.model_copy(
        update={
            "stack": tuple(stack),
            "entanglement": compute_entanglement(stack, scene.shape),
        }
    )


def translate_garment(garment: GarmentSpec, dx: int, dy: int) -> GarmentSpec:
    if dx == 0 and dy == 0:
        return garment
    return garment.model_copy(update={"cells": tuple((x + dx, y + dy) for x, y in garment.cells)})


def translation_bounds(
    garments: Sequence[GarmentSpec], region: Tuple[int, int, int, int]
) -> Tuple[int, int, int, int]:
    """Allowed (dx_min, dx_max, dy_min, dy_max) keeping every garment inside the region."""
    xs = [x for g in garments for x, _ in g.cells]
    ys = [y for g in garments for _, y in g.cells]
    x0, y0, x1, y1 = region
    return (x0 - min(xs), x1 - 1 - max(xs), y0 - min(ys), y1 - 1 - max(ys))


def overlap_area(a: GarmentSpec, b: GarmentSpec) -> int:
    return len(set(a.cells) & set(b.cells))
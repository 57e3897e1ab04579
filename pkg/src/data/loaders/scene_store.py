"""
Scene and Mask Set Files

JSON persistence for piles and mask sets:
- Scenes: grid, physical constants, boundary, garments, stack order, couplings
- Mask sets: marker ids, marker pixels and run-length encoded bitmaps
"""

import json
from pathlib import Path
from typing import Any, Dict, Union

import structlog

from src.models.pile_models import Boundary, EntanglementEdge, GarmentSpec, PileScene
from src.perception.masks import Mask, MaskSet, rle_decode, rle_encode
from src.utils.errors import DomainError

logger = structlog.get_logger()

PathLike = Union[str, Path]


def scene_to_dict(scene: PileScene) -> Dict[str, Any]:
    return {
        "grid": {"width": scene.grid_width, "height": scene.grid_height},
        "cell_size": scene.cell_size,
        "layer_thickness": scene.layer_thickness,
        "floor_offset": scene.floor_offset,
        "boundary": scene.boundary.model_dump(mode="json"),
        "garments": [
            {
                "id": g.id,
                "category": g.category.value,
                "color": list(g.color),
                "shape_class": g.shape_class.value,
                "cells": [list(c) for c in g.cells],
            }
            for g in sorted(scene.stack, key=lambda g: g.id)
        ],
        "stack_order": scene.ids,
        "entanglement": [e.model_dump() for e in scene.entanglement],
        "seed": scene.seed,
    }


def scene_from_dict(data: Dict[str, Any]) -> PileScene:
    try:
        garments = {
            g["id"]: GarmentSpec(
                id=g["id"],
                category=g["category"],
                color=tuple(g["color"]),
                shape_class=g["shape_class"],
                cells=tuple(tuple(c) for c in g["cells"]),
            )
            for g in data["garments"]
        }
        return PileScene(
            grid_width=data["grid"]["width"],
            grid_height=data["grid"]["height"],
            cell_size=data["cell_size"],
            layer_thickness=data["layer_thickness"],
            floor_offset=data.get("floor_offset", 0.0),
            boundary=Boundary(**data["boundary"]),
            stack=tuple(garments[i] for i in data["stack_order"]),
            entanglement=tuple(EntanglementEdge(**e) for e in data["entanglement"]),
            seed=data["seed"],
        )
    except (KeyError, TypeError) as e:
        raise DomainError(f"Malformed scene document: {e}") from e


def write_scene(scene: PileScene, path: PathLike) -> None:
    Path(path).write_text(json.dumps(scene_to_dict(scene), sort_keys=True, indent=2) + "\n")
    logger.info("Scene written", path=str(path), garments=len(scene.stack))


def read_scene(path: PathLike) -> PileScene:
    return scene_from_dict(json.loads(Path(path).read_text()))


def maskset_to_dict(masks: MaskSet) -> Dict[str, Any]:
    height, width = masks.shape
    return {
        "grid": {"width": width, "height": height},
        "masks": [
            {"marker_id": m.marker_id, "marker_pixel": list(m.marker_pixel), "rle": rle_encode(m.bitmap)}
            for m in masks
        ],
    }


def maskset_from_dict(data: Dict[str, Any]) -> MaskSet:
    shape = (data["grid"]["height"], data["grid"]["width"])
    masks = [
        Mask(
            bitmap=rle_decode(m["rle"], shape).astype(bool),
            marker_id=m["marker_id"],
            marker_pixel=tuple(m["marker_pixel"]),
        )
        for m in data["masks"]
    ]
    return MaskSet(masks=tuple(masks), shape=shape)


def write_maskset(masks: MaskSet, path: PathLike) -> None:
    Path(path).write_text(json.dumps(maskset_to_dict(masks), sort_keys=True) + "\n")


def read_maskset(path: PathLike) -> MaskSet:
    return maskset_from_dict(json.loads(Path(path).read_text()))

"""
Oracle segmenter with a corruption model.

Masks start from the ground-truth visible regions of the scene and are then
corrupted the way a promptable segmenter fails on cluttered cloth:
- colour-similar touching regions fuse into one mask
- single regions break into ragged connected fragments
"""

from collections import deque
from typing import Dict, List, Sequence, Tuple

import numpy as np
import structlog

from src.models.palette import color_distance
from src.models.perception_models import SegmenterConfig
from src.models.pile_models import PileScene
from src.perception.masks import Cell, Mask, MaskSet, place_marker, row_major_key
from src.sim.pile import owner_map, visible_regions
from src.sim.render import Observation
from src.utils.errors import NoGarmentError
from src.utils.seeding import derive_seed

logger = structlog.get_logger()


def shared_boundary(a: np.ndarray, b: np.ndarray) -> int:
    """Number of 4-adjacent cell pairs with one cell in each bitmap."""
    return int(
        (a[:, :-1] & b[:, 1:]).sum()
        + (a[:, 1:] & b[:, :-1]).sum()
        + (a[:-1, :] & b[1:, :]).sum()
        + (a[1:, :] & b[:-1, :]).sum()
    )


def merge_candidates(
    scene: PileScene, regions: Dict[int, np.ndarray], cfg: SegmenterConfig
) -> List[Tuple[int, int]]:
    """Sorted id pairs of colour-similar regions sharing enough boundary."""
    ids = sorted(gid for gid, bitmap in regions.items() if bitmap.any())
    pairs: List[Tuple[int, int]] = []
    for i, a in enumerate(ids):
        for b in ids[i + 1:]:
            if color_distance(scene.garment(a).color, scene.garment(b).color) > cfg.merge_color_threshold:
                continue
            if shared_boundary(regions[a], regions[b]) >= cfg.merge_overlap_threshold:
                pairs.append((a, b))
    return pairs


def _find(parent: Dict[int, int], node: int) -> int:
    while parent[node] != node:
        parent[node] = parent[parent[node]]
        node = parent[node]
    return node


def fragment(bitmap: np.ndarray, pieces: int, rng: np.random.Generator) -> List[np.ndarray]:
    """Split a region into connected pieces grown from random seed cells by multi-source BFS."""
    rows, cols = np.nonzero(bitmap)
    seeds = rng.choice(len(rows), size=pieces, replace=False)
    label = np.full(bitmap.shape, -1, dtype=np.int64)
    queue = deque()
    for piece, index in enumerate(sorted(int(s) for s in seeds)):
        label[rows[index], cols[index]] = piece
        queue.append((int(rows[index]), int(cols[index])))
    height, width = bitmap.shape
    while queue:
        r, c = queue.popleft()
        for nr, nc in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
            if 0 <= nr < height and 0 <= nc < width and bitmap[nr, nc] and label[nr, nc] < 0:
                label[nr, nc] = label[r, c]
                queue.append((nr, nc))
    return [label == piece for piece in range(pieces)]


def segment(
    observation: Observation, scene: PileScene, cfg: SegmenterConfig, seed: int
) -> MaskSet:
    """Raw masks of the observed pile, before filtering."""
    regions = visible_regions(scene)
    ids = sorted(gid for gid, bitmap in regions.items() if bitmap.any())
    rng = np.random.default_rng(seed)

    parent = {gid: gid for gid in ids}
    for a, b in merge_candidates(scene, regions, cfg):
        if rng.random() < cfg.p_merge:
            ra, rb = _find(parent, a), _find(parent, b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)

    groups: Dict[int, List[int]] = {}
    for gid in ids:
        groups.setdefault(_find(parent, gid), []).append(gid)

    bitmaps: List[np.ndarray] = []
    merged = 0
    fragmented = 0
    for root in sorted(groups):
        members = groups[root]
        union = np.zeros(scene.shape, dtype=bool)
        for gid in members:
            union |= regions[gid]
        split = rng.random() < cfg.p_frag
        if len(members) > 1:
            merged += 1
            bitmaps.append(union)
        elif split and int(union.sum()) >= cfg.frag_pieces:
            fragmented += 1
            bitmaps.extend(fragment(union, cfg.frag_pieces, rng))
        else:
            bitmaps.append(union)

    bitmaps.sort(key=row_major_key)
    logger.debug(
        "Segmentation finished",
        regions=len(ids),
        masks=len(bitmaps),
        merged=merged,
        fragmented=fragmented,
    )
    return MaskSet.from_bitmaps(bitmaps, observation.shape)


def point_prompt_segment(
    observation: Observation,
    scene: PileScene,
    pixel: Cell,
    cfg: SegmenterConfig,
    seed: int,
) -> Mask:
    """Mask grown from a single point prompt.

    Returns the visible region of the topmost garment at the pixel, fused with a
    neighbouring region only while the merge condition still holds.
    """
    x, y = int(pixel[0]), int(pixel[1])
    owner = owner_map(scene)
    index = int(owner[y, x])
    if index < 0:
        raise NoGarmentError(f"Point prompt {pixel} hits the background")

    regions = visible_regions(scene)
    garment_id = scene.stack[index].id
    bitmap = regions[garment_id].copy()
    for a, b in merge_candidates(scene, regions, cfg):
        if garment_id not in (a, b):
            continue
        other = b if a == garment_id else a
        if np.random.default_rng(derive_seed(seed, "prompt-merge", a, b)).random() < cfg.p_merge:
            bitmap |= regions[other]
    return Mask(bitmap=bitmap, marker_id=1, marker_pixel=place_marker(bitmap))


def merged_garments(mask: Mask, scene: PileScene) -> Sequence[int]:
    """Ground-truth garments whose visible region the mask touches."""
    return [
        gid for gid, bitmap in sorted(visible_regions(scene).items()) if (bitmap & mask.bitmap).any()
    ]


def instance_iou_score(masks: MaskSet, scene: PileScene) -> float:
    """Mean over non-empty visible regions of the best IoU with any mask."""
    regions = [bitmap for _, bitmap in sorted(visible_regions(scene).items()) if bitmap.any()]
    if not regions:
        return 1.0
    scores = []
    for region in regions:
        best = 0.0
        for mask in masks:
            inter = int((region & mask.bitmap).sum())
            if inter:
                best = max(best, inter / int((region | mask.bitmap).sum()))
        scores.append(best)
    return float(np.mean(scores))

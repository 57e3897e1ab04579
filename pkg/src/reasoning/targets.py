"""Task B target descriptors: parsing, ground-truth matching and observable size fit."""

from typing import Tuple

from src.models.palette import nearest_palette_color
from src.models.pile_models import GarmentCategory, GarmentSpec
from src.models.reasoning_models import TargetDescriptor
from src.sim.garments import CATALOGUE
from src.utils.errors import ConfigError


def parse_target(text: str) -> TargetDescriptor:
    """Parse "COLOR[:CATEGORY]", e.g. "green" or "blue:scarf"."""
    color, _, category = text.strip().partition(":")
    try:
        return TargetDescriptor(
            color=color,
            category=GarmentCategory(category.strip().lower()) if category.strip() else None,
        )
    except ValueError as e:
        raise ConfigError(f"Invalid target '{text}': {e}") from e


def target_matches(garment: GarmentSpec, target: TargetDescriptor) -> bool:
    if nearest_palette_color(garment.color) != target.color_name:
        return False
    return target.category is None or garment.category == target.category


def fits_category(bbox: Tuple[int, int, int, int], category: GarmentCategory) -> bool:
    """Whether a mask's inclusive bbox fits the category's largest footprint in either orientation.

    Occlusion only shrinks a visible mask, so a lower bound on size says nothing.
    """
    profile = CATALOGUE[category]
    span = sorted((bbox[2] - bbox[0] + 1, bbox[3] - bbox[1] + 1))
    limit = sorted((profile.width[1], profile.height[1]))
    return span[0] <= limit[0] and span[1] <= limit[1]

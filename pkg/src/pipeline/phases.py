"""Phase transition table of a retrieval attempt."""

from typing import Dict, FrozenSet, Sequence

from src.models.episode_models import PipelinePhase as P

LEGAL_TRANSITIONS: Dict[P, FrozenSet[P]] = {
    P.OBSERVE: frozenset({P.SEGMENT}),
    P.SEGMENT: frozenset({P.FINE_TUNE, P.SELECT, P.ABORT_ATTEMPT}),
    P.FINE_TUNE: frozenset({P.SEGMENT, P.ABORT_ATTEMPT}),
    P.SELECT: frozenset({P.AFFORD, P.ABORT_ATTEMPT}),
    P.AFFORD: frozenset({P.GRASP_LIFT}),
    P.GRASP_LIFT: frozenset({P.COOP_DECIDE}),
    P.COOP_DECIDE: frozenset({P.ABORT_ATTEMPT, P.SINGLE_DELIVER, P.DUAL_GRASP_DELIVER}),
    P.ABORT_ATTEMPT: frozenset({P.OBSERVE, P.DONE}),
    P.SINGLE_DELIVER: frozenset({P.OBSERVE, P.DONE}),
    P.DUAL_GRASP_DELIVER: frozenset({P.OBSERVE, P.DONE}),
    P.DONE: frozenset(),
}


def is_legal_trace(phases: Sequence[P]) -> bool:
    """A trace starts at Observe and only takes legal transitions."""
    if not phases or phases[0] != P.OBSERVE:
        return False
    return all(b in LEGAL_TRANSITIONS[a] for a, b in zip(phases, phases[1:]))

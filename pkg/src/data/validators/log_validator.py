"""
Episode Log Validation

Checks recorded episodes against the pipeline's invariants:
- Phase traces only take legal transitions
- Cooperative cells appear exactly when dual-arm delivery was decided and enabled
- Step totals add up and task completion agrees with the recorded attempts
"""

from typing import Any, Dict, List, Sequence

import structlog

from src.models.episode_models import Ablation, EpisodeLog, PipelinePhase, TerminalStatus
from src.models.reasoning_models import TaskKind
from src.pipeline.phases import is_legal_trace

logger = structlog.get_logger()


def _attempt_anomalies(log: EpisodeLog, episode: int) -> List[Dict[str, Any]]:
    anomalies: List[Dict[str, Any]] = []
    dual_enabled = Ablation.DUAL_ARM.value not in log.config.get("ablations", [])
    for attempt in log.attempts:
        where = {"episode": episode, "scene_seed": log.scene_seed, "attempt": attempt.attempt}
        if not is_legal_trace(attempt.phases):
            anomalies.append({**where, "type": "illegal_phase_trace", "phases": [p.value for p in attempt.phases]})
        if attempt.phases and attempt.phases[-1] not in (PipelinePhase.OBSERVE, PipelinePhase.DONE):
            anomalies.append({**where, "type": "unterminated_trace", "last_phase": attempt.phases[-1].value})

        dual = PipelinePhase.DUAL_GRASP_DELIVER in attempt.phases
        expects_cell = dual and attempt.coop.x_dual == 1 and attempt.coop.x_error == 0 and dual_enabled
        if (attempt.coop_cell is not None) != expects_cell:
            anomalies.append(
                {
                    **where,
                    "type": "coop_cell_mismatch",
                    "coop": attempt.coop.model_dump(),
                    "coop_cell": attempt.coop_cell,
                }
            )
        if attempt.steps < 1:
            anomalies.append({**where, "type": "non_positive_steps", "steps": attempt.steps})
    return anomalies


def validate_logs(logs: Sequence[EpisodeLog]) -> Dict[str, Any]:
    """Validate a batch of episode logs; returns anomalies and an overall verdict."""
    results: Dict[str, Any] = {
        "episodes": len(logs),
        "attempts": sum(len(log.attempts) for log in logs),
        "anomalies": [],
        "validation_passed": True,
    }
    for episode, log in enumerate(logs):
        anomalies = _attempt_anomalies(log, episode)

        if log.total_steps != sum(a.steps for a in log.attempts):
            anomalies.append({"episode": episode, "type": "step_total_mismatch", "total_steps": log.total_steps})
        indices = [a.attempt for a in log.attempts]
        if indices != list(range(len(indices))):
            anomalies.append({"episode": episode, "type": "attempt_index_gap", "indices": indices})
        retrieved = sum(1 for a in log.attempts if a.terminal_status == TerminalStatus.RETRIEVED)
        if log.task.kind == TaskKind.A and log.task_completed and retrieved != log.initial_garments:
            anomalies.append(
                {
                    "episode": episode,
                    "type": "completion_mismatch",
                    "retrieved": retrieved,
                    "initial_garments": log.initial_garments,
                }
            )
        if retrieved > log.initial_garments:
            anomalies.append({"episode": episode, "type": "garment_count_increase", "retrieved": retrieved})
        if log.task_completed and log.task.kind == TaskKind.B and retrieved == 0:
            anomalies.append({"episode": episode, "type": "completion_without_retrieval"})

        if anomalies:
            results["anomalies"].extend(anomalies)
            results["validation_passed"] = False

    logger.info(
        "Episode log validation completed",
        episodes=results["episodes"],
        anomalies=len(results["anomalies"]),
        validation_passed=results["validation_passed"],
    )
    return results

"""
Benchmark metrics over episode logs.

- ASR_A: garments retrieved over garments loaded (sequential task)
- ASR_B: completed tasks over tasks (specific-garment task)
- AMS: motion steps per task (specific-garment task)
- PDR: share of non-error cooperation answers from the reasoner that called for both arms
"""

from typing import Sequence

from src.models.episode_models import EpisodeLog, TerminalStatus
from src.models.experiment_models import MetricsReport
from src.models.reasoning_models import TaskKind
from src.utils.errors import DomainError


def _of_kind(logs: Sequence[EpisodeLog], kind: TaskKind) -> list:
    return [log for log in logs if log.task.kind == kind]


def _counts(logs: Sequence[EpisodeLog]) -> dict:
    task_a = _of_kind(logs, TaskKind.A)
    task_b = _of_kind(logs, TaskKind.B)
    decided = [
        a
        for log in logs
        for a in log.attempts
        if a.coop_queried and a.coop.x_error == 0
    ]
    return {
        "retrieved": sum(
            1 for log in task_a for a in log.attempts if a.terminal_status == TerminalStatus.RETRIEVED
        ),
        "loaded": sum(log.initial_garments for log in task_a),
        "completed": sum(1 for log in task_b if log.task_completed),
        "tasks": len(task_b),
        "steps": sum(log.total_steps for log in task_b),
        "dual_triggers": sum(1 for a in decided if a.coop.x_dual == 1),
        "eligible_attempts": len(decided),
        "attempts": sum(len(log.attempts) for log in logs),
    }


def asr_a(logs: Sequence[EpisodeLog]) -> float:
    counts = _counts(logs)
    if counts["loaded"] == 0:
        raise DomainError("ASR_A is undefined without loaded garments")
    return counts["retrieved"] / counts["loaded"]


def asr_b(logs: Sequence[EpisodeLog]) -> float:
    counts = _counts(logs)
    if counts["tasks"] == 0:
        raise DomainError("ASR_B is undefined without Task B episodes")
    return counts["completed"] / counts["tasks"]


def ams(logs: Sequence[EpisodeLog]) -> float:
    counts = _counts(logs)
    if counts["tasks"] == 0:
        raise DomainError("AMS is undefined without Task B episodes")
    return counts["steps"] / counts["tasks"]


def pdr(logs: Sequence[EpisodeLog]) -> float:
    counts = _counts(logs)
    if counts["eligible_attempts"] == 0:
        raise DomainError("PDR is undefined without non-error cooperation decisions")
    return counts["dual_triggers"] / counts["eligible_attempts"]


def compute_report(logs: Sequence[EpisodeLog], label: str = "full") -> MetricsReport:
    counts = _counts(logs)

    def ratio(numerator: str, denominator: str):
        return counts[numerator] / counts[denominator] if counts[denominator] else None

    return MetricsReport(
        label=label,
        asr_a=ratio("retrieved", "loaded"),
        asr_b=ratio("completed", "tasks"),
        ams=ratio("steps", "tasks"),
        pdr=ratio("dual_triggers", "eligible_attempts"),
        episodes=len(logs),
        **counts,
    )

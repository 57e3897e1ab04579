"""Episode runner: attempts until the task completes or the attempt budget runs out."""

from typing import List, Optional

import structlog

from src.models.episode_models import (
    AttemptRecord,
    EpisodeLog,
    PipelineConfig,
    PipelinePhase,
    TerminalStatus,
)
from src.models.pile_models import PileScene
from src.models.reasoning_models import TaskKind, TaskSpec
from src.pipeline.attempt import PipelineComponents, run_attempt
from src.reasoning.targets import target_matches
from src.utils.seeding import derive_seed

logger = structlog.get_logger()

ATTEMPTS_PER_GARMENT = 3


def run_episode(
    scene: PileScene,
    task: TaskSpec,
    components: PipelineComponents,
    config: PipelineConfig,
    seed: Optional[int] = None,
) -> EpisodeLog:
    components.check(config)
    seed = scene.seed if seed is None else seed
    initial = len(scene.stack)
    max_attempts = config.max_attempts or ATTEMPTS_PER_GARMENT * initial

    attempts: List[AttemptRecord] = []
    completed = task.kind == TaskKind.A and initial == 0
    stopped_on_error = False
    index = 0
    while not completed and index < max_attempts:
        before = scene
        record, scene = run_attempt(
            scene, task, components, config, derive_seed(seed, "attempt", index), index
        )
        if record.terminal_status == TerminalStatus.RETRIEVED and record.retrieved_id is not None:
            if task.kind == TaskKind.B and task.target is not None:
                completed = target_matches(before.garment(record.retrieved_id), task.target)
        if task.kind == TaskKind.A:
            completed = not scene.stack
        stopped_on_error = bool(record.failure_reason and record.failure_reason.startswith("reasoner"))
        finished = completed or stopped_on_error or index + 1 >= max_attempts
        next_phase = PipelinePhase.DONE if finished else PipelinePhase.OBSERVE
        attempts.append(record.model_copy(update={"phases": record.phases + [next_phase]}))
        logger.info(
            "Attempt finished",
            scene_seed=scene.seed,
            attempt=index,
            status=record.terminal_status.value,
            steps=record.steps,
            remaining=len(scene.stack),
        )
        index += 1
        if stopped_on_error:
            break

    log = EpisodeLog(
        task=task,
        scene_seed=scene.seed,
        initial_garments=initial,
        config={**config.snapshot(), "reasoner": components.reasoner.name},
        attempts=attempts,
        task_completed=completed,
        total_steps=sum(a.steps for a in attempts),
        stopped_on_error=stopped_on_error,
    )
    logger.info(
        "Episode finished",
        scene_seed=log.scene_seed,
        task=task.kind.value,
        completed=completed,
        attempts=len(attempts),
        retrieved=log.retrieved,
        total_steps=log.total_steps,
    )
    return log

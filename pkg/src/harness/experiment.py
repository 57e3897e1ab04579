"""
Experiment runner.

Episodes use scene seeds base_seed + i and are gathered in episode order, so the
written JSONL is byte-identical across runs and worker counts.
"""

from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Dict, FrozenSet, List, Optional, Tuple, Union

import structlog

from src.data.loaders.episode_store import write_episode_logs
from src.data.loaders.model_store import load_model
from src.harness.metrics import compute_report
from src.models.episode_models import Ablation, EpisodeLog
from src.models.experiment_models import ExperimentConfig, MetricsReport
from src.pipeline.attempt import PipelineComponents
from src.pipeline.episode import run_episode
from src.reasoning.factory import make_reasoner
from src.sim.pile import generate_scene
from src.utils.errors import ConfigError

logger = structlog.get_logger()

ABLATION_VARIANTS: Dict[str, FrozenSet[Ablation]] = {
    "w/o mask fine tuning": frozenset({Ablation.MASK_FINE_TUNING}),
    "w/o affordance": frozenset({Ablation.AFFORDANCE}),
    "w/o tracking selection": frozenset({Ablation.TRACKING_SELECTION}),
    "w/o dual arm": frozenset({Ablation.DUAL_ARM}),
    "w/o affordance & dual arm": frozenset({Ablation.AFFORDANCE, Ablation.DUAL_ARM}),
}


def build_components(config: ExperimentConfig) -> PipelineComponents:
    model = None
    if Ablation.AFFORDANCE not in config.ablations:
        if not config.model_path:
            raise ConfigError("An affordance model path is required unless affordance is ablated")
        model = load_model(config.model_path)
    reasoner = make_reasoner(
        config.reasoner,
        rule_config=config.rule,
        l_arm=config.oracle.l_arm,
        url=config.reasoner_url,
        timeout_ms=config.reasoner_timeout_ms,
    )
    return PipelineComponents(reasoner=reasoner, model=model)


def run_single_episode(
    config: ExperimentConfig, index: int, components: Optional[PipelineComponents] = None
) -> EpisodeLog:
    """Run episode `index`; components are built (and closed) here unless shared by the caller."""
    if components is not None:
        scene = generate_scene(config.scene_config(), config.base_seed + index)
        return run_episode(scene, config.task, components, config.pipeline_config())
    owned = build_components(config)
    try:
        return run_single_episode(config, index, owned)
    finally:
        owned.reasoner.close()


# Per-process state of pool workers, set once by _init_worker.
_worker_state: Optional[Tuple[ExperimentConfig, PipelineComponents]] = None


def _init_worker(config: ExperimentConfig) -> None:
    global _worker_state
    _worker_state = (config, build_components(config))


def _worker_episode(index: int) -> EpisodeLog:
    assert _worker_state is not None, "worker not initialised"
    config, components = _worker_state
    return run_single_episode(config, index, components)


def run_experiment(
    config: ExperimentConfig, out: Optional[Union[str, Path]] = None
) -> Tuple[List[EpisodeLog], MetricsReport]:
    # Fails on a bad model or reasoner before any episode runs.
    components = build_components(config)
    logger.info(
        "Experiment started",
        label=config.label,
        task=config.task.kind.value,
        boundary=config.boundary.value,
        episodes=config.episodes,
        ablations=sorted(a.value for a in config.ablations),
        reasoner=config.reasoner,
    )
    indices = range(config.episodes)
    try:
        if config.workers > 1 and config.reasoner != "remote":
            with ProcessPoolExecutor(
                max_workers=config.workers, initializer=_init_worker, initargs=(config,)
            ) as executor:
                logs = list(executor.map(_worker_episode, indices))
        else:
            logs = [run_single_episode(config, i, components) for i in indices]
    finally:
        components.reasoner.close()

    if out is not None:
        write_episode_logs(logs, out)
    report = compute_report(logs, config.label)
    logger.info(
        "Experiment finished",
        label=config.label,
        asr_a=report.asr_a,
        asr_b=report.asr_b,
        ams=report.ams,
        pdr=report.pdr,
    )
    return logs, report


def run_ablation_sweep(
    config: ExperimentConfig,
    include_full: bool = False,
    out_dir: Optional[Union[str, Path]] = None,
) -> List[MetricsReport]:
    """One report per named ablation, optionally preceded by the full pipeline."""
    variants = ([("full", frozenset())] if include_full else []) + list(ABLATION_VARIANTS.items())
    reports = []
    for label, ablations in variants:
        variant = config.model_copy(update={"label": label, "ablations": ablations})
        out = None
        if out_dir is not None:
            slug = label.replace("w/o ", "wo-").replace(" & ", "-").replace(" ", "-")
            out = Path(out_dir) / f"{slug}.jsonl"
        _, report = run_experiment(variant, out)
        reports.append(report)
    return reports

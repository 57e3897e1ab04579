"""
Command-line entry point.

Usage: python -m src.cli <command> [options]

Commands:
- run: run retrieval episodes and write the JSONL episode log
- train-affordance: collect oracle-labelled grasps and train the affordance model
- report: aggregate one or more episode logs into the metrics table
- gen-scene: generate a pile scene and write it as JSON
- serve-reasoner: run the reference decision service

Exit codes: 0 on success, 2 on a configuration error, 3 on a reasoner error.
"""

import argparse
import sys
from pathlib import Path
from typing import FrozenSet, Optional, Sequence

import structlog
from pydantic import ValidationError

from src.affordance.network import init_model
from src.affordance.training import (
    collect_training_data,
    dataset_arrays,
    evaluate_accuracy,
    majority_baseline,
    split_dataset,
    train,
)
from src.data.loaders.episode_store import read_episode_logs
from src.data.loaders.model_store import save_dataset, save_model
from src.data.loaders.scene_store import write_scene
from src.harness.experiment import run_ablation_sweep, run_experiment
from src.harness.metrics import compute_report
from src.harness.report import report_table
from src.models.affordance_models import NetworkConfig, TrainHyper
from src.models.episode_models import Ablation
from src.models.experiment_models import ExperimentConfig
from src.models.pile_models import BoundaryKind, SceneGenConfig
from src.models.reasoning_models import TaskKind, TaskSpec
from src.reasoning.factory import REASONER_KINDS
from src.reasoning.targets import parse_target
from src.sim.pile import generate_scene
from src.utils import settings
from src.utils.errors import ConfigError, ReasonerError, SceneGenerationError
from src.utils.logging import configure_logging

logger = structlog.get_logger()

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_REASONER = 3


def parse_ablations(text: Optional[str]) -> FrozenSet[Ablation]:
    """Comma-separated ablation names; dashes and underscores are interchangeable."""
    if not text:
        return frozenset()
    ablations = set()
    for raw in text.split(","):
        name = raw.strip().lower().replace("-", "_")
        if not name:
            continue
        try:
            ablations.add(Ablation(name))
        except ValueError:
            valid = ", ".join(a.value for a in Ablation)
            raise ConfigError(f"Unknown ablation '{raw.strip()}' (expected one of: {valid})")
    return frozenset(ablations)


def _task_from_args(args: argparse.Namespace) -> TaskSpec:
    kind = TaskKind(args.task.upper())
    target = parse_target(args.target) if args.target else None
    if kind == TaskKind.A and target is not None:
        raise ConfigError("--target only applies to task b")
    if kind == TaskKind.B and target is None:
        raise ConfigError("Task b requires --target COLOR[:CATEGORY]")
    return TaskSpec(kind=kind, target=target)


def cmd_run(args: argparse.Namespace) -> int:
    config = ExperimentConfig(
        task=_task_from_args(args),
        boundary=BoundaryKind(args.boundary),
        wall_margin=args.wall_margin,
        count_min=args.count_min,
        count_max=args.count_max,
        episodes=args.episodes,
        base_seed=args.seed,
        ablations=parse_ablations(args.ablate),
        reasoner=args.reasoner,
        reasoner_url=args.reasoner_url or settings.reasoner_url(),
        reasoner_timeout_ms=args.reasoner_timeout_ms or settings.reasoner_timeout_ms(),
        model_path=args.model,
        workers=args.workers,
    )

    if args.sweep:
        out_dir = Path(args.out) if args.out else None
        if out_dir is not None:
            out_dir.mkdir(parents=True, exist_ok=True)
        reports = run_ablation_sweep(config, include_full=True, out_dir=out_dir)
        print(report_table(reports))
        return EXIT_OK

    logs, report = run_experiment(config, args.out)
    if args.out:
        print(f"Wrote {len(logs)} episodes to {args.out}")
    if args.report:
        print(report_table([report]))

    stopped = [log.scene_seed for log in logs if log.stopped_on_error]
    if stopped:
        logger.error("Episodes stopped on reasoner errors", scene_seeds=stopped)
        return EXIT_REASONER
    return EXIT_OK


def cmd_train_affordance(args: argparse.Namespace) -> int:
    scene_config = SceneGenConfig.for_boundary(BoundaryKind(args.boundary))
    network = NetworkConfig(hidden_width=args.hidden_width)
    hyper = TrainHyper(lr=args.lr, epochs=args.epochs, batch_size=args.batch_size, seed=args.seed)

    dataset = collect_training_data(
        scene_config, args.scenes, args.samples_per_scene, args.seed, workers=args.workers
    )
    if not dataset:
        raise ConfigError("No training examples were collected; increase --scenes")
    if args.dataset_out:
        save_dataset(dataset, args.dataset_out)

    train_set, held_out = split_dataset(dataset, args.holdout, args.seed)
    if not train_set or not held_out:
        train_set, held_out = dataset, dataset
    model = train(init_model(network.layer_widths, args.seed), train_set, hyper)
    save_model(model, args.out)

    x, y = dataset_arrays(held_out)
    accuracy = evaluate_accuracy(model, x, y)
    baseline = majority_baseline(y)
    print(f"Wrote model to {args.out}")
    print(f"examples={len(dataset)} held_out={len(held_out)}")
    print(f"held-out accuracy={accuracy:.3f} majority baseline={baseline:.3f}")
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    paths = [p.strip() for p in args.inputs.split(",") if p.strip()]
    if not paths:
        raise ConfigError("--in needs at least one episode log")
    reports = []
    for path in paths:
        logs = read_episode_logs([path])
        reports.append(compute_report(logs, label=Path(path).stem))
    if len(paths) > 1:
        reports.append(compute_report(read_episode_logs(paths), label="all"))
    print(report_table(reports))
    return EXIT_OK


def cmd_gen_scene(args: argparse.Namespace) -> int:
    config = SceneGenConfig.for_boundary(
        BoundaryKind(args.boundary), args.count_min, args.count_max, wall_margin=args.wall_margin
    )
    scene = generate_scene(config, args.seed)
    write_scene(scene, args.out)
    print(f"Wrote scene with {len(scene.stack)} garments to {args.out}")
    return EXIT_OK


def cmd_serve_reasoner(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("src.api.main:app", host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="garment-pile", description="Garment pile retrieval")
    parser.add_argument("--log-level", default=None, help="Overrides LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run retrieval episodes")
    run.add_argument("--task", choices=["a", "b"], default="a")
    run.add_argument("--target", default=None, help="COLOR[:CATEGORY], task b only")
    run.add_argument("--boundary", choices=[b.value for b in BoundaryKind], default="open")
    run.add_argument("--count-min", type=int, default=None)
    run.add_argument("--count-max", type=int, default=None)
    run.add_argument("--wall-margin", type=int, default=2, help="Wall collision margin (cells)")
    run.add_argument("--episodes", type=int, default=1)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--ablate", default=None, help="Comma-separated: " + ",".join(a.value for a in Ablation))
    run.add_argument("--reasoner", choices=list(REASONER_KINDS), default="rule")
    run.add_argument("--reasoner-url", default=None, help="Overrides REASONER_URL")
    run.add_argument("--reasoner-timeout-ms", type=int, default=None, help="Overrides REASONER_TIMEOUT_MS")
    run.add_argument("--model", default=None, help="Affordance model JSON")
    run.add_argument("--out", default=None, help="Episode log JSONL, or a directory with --sweep")
    run.add_argument("--report", action="store_true", help="Print the metrics table")
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--sweep", action="store_true", help="Run the full pipeline and every named ablation")
    run.set_defaults(handler=cmd_run)

    tr = sub.add_parser("train-affordance", help="Collect oracle labels and train the affordance model")
    tr.add_argument("--scenes", type=int, default=20)
    tr.add_argument("--samples-per-scene", type=int, default=64)
    tr.add_argument("--seed", type=int, default=0)
    tr.add_argument("--epochs", type=int, default=50)
    tr.add_argument("--lr", type=float, default=0.05)
    tr.add_argument("--batch-size", type=int, default=64)
    tr.add_argument("--hidden-width", type=int, default=32)
    tr.add_argument("--boundary", choices=[b.value for b in BoundaryKind], default="open")
    tr.add_argument("--holdout", type=float, default=0.2)
    tr.add_argument("--workers", type=int, default=1)
    tr.add_argument("--dataset-out", default=None, help="Also write the dataset as JSONL")
    tr.add_argument("--out", required=True, help="Model JSON path")
    tr.set_defaults(handler=cmd_train_affordance)

    rep = sub.add_parser("report", help="Metrics table for episode logs")
    rep.add_argument("--in", dest="inputs", required=True, help="FILE.jsonl[,FILE2...]")
    rep.set_defaults(handler=cmd_report)

    gen = sub.add_parser("gen-scene", help="Generate a pile scene")
    gen.add_argument("--boundary", choices=[b.value for b in BoundaryKind], default="open")
    gen.add_argument("--count-min", type=int, default=None)
    gen.add_argument("--count-max", type=int, default=None)
    gen.add_argument("--wall-margin", type=int, default=2, help="Wall collision margin (cells)")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)
    gen.set_defaults(handler=cmd_gen_scene)

    serve = sub.add_parser("serve-reasoner", help="Run the reference decision service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(handler=cmd_serve_reasoner)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level or settings.log_level())
    try:
        return args.handler(args)
    except (ConfigError, SceneGenerationError, ValidationError) as e:
        logger.error("Configuration error", command=args.command, error=str(e))
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except ReasonerError as e:
        logger.error("Reasoner error", command=args.command, error=str(e))
        print(f"error: {e}", file=sys.stderr)
        return EXIT_REASONER


if __name__ == "__main__":
    sys.exit(main())

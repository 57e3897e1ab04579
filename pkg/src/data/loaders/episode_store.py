"""
Episode Log Files

Episode logs are JSONL: per episode one header line {"type": "episode", ...}
followed by one {"type": "attempt", ...} line per attempt. Lines are canonical
JSON with sorted keys, so equal runs produce identical bytes.
"""

import json
from pathlib import Path
from typing import Iterable, List, Sequence, Union

import structlog
from pydantic import ValidationError

from src.models.episode_models import AttemptRecord, EpisodeLog
from src.utils.errors import DomainError

logger = structlog.get_logger()

PathLike = Union[str, Path]


def _dumps(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def episode_lines(log: EpisodeLog) -> List[str]:
    header = log.model_dump(mode="json", exclude={"attempts"})
    header["type"] = "episode"
    header["attempt_count"] = len(log.attempts)
    lines = [_dumps(header)]
    for attempt in log.attempts:
        line = attempt.model_dump(mode="json")
        line["type"] = "attempt"
        lines.append(_dumps(line))
    return lines


def dumps_logs(logs: Sequence[EpisodeLog]) -> str:
    return "".join(line + "\n" for log in logs for line in episode_lines(log))


def write_episode_logs(logs: Sequence[EpisodeLog], path: PathLike) -> None:
    Path(path).write_text(dumps_logs(logs))
    logger.info("Episode logs written", path=str(path), episodes=len(logs))


def parse_episode_lines(lines: Iterable[str]) -> List[EpisodeLog]:
    logs: List[EpisodeLog] = []
    header = None
    attempts: List[AttemptRecord] = []

    def flush() -> None:
        if header is None:
            return
        if len(attempts) != header.pop("attempt_count", len(attempts)):
            raise DomainError("Episode header attempt count does not match its attempt lines")
        try:
            logs.append(EpisodeLog.model_validate({**header, "attempts": attempts}))
        except ValidationError as e:
            raise DomainError(f"Invalid episode record: {e}") from e

    for number, raw in enumerate(lines, start=1):
        if not raw.strip():
            continue
        try:
            record = json.loads(raw)
        except json.JSONDecodeError as e:
            raise DomainError(f"Line {number} is not valid JSON: {e}") from e
        if not isinstance(record, dict):
            raise DomainError(f"Line {number} is not a JSON object")
        kind = record.pop("type", None)
        if kind == "episode":
            flush()
            header, attempts = record, []
        elif kind == "attempt":
            if header is None:
                raise DomainError(f"Attempt line {number} precedes any episode header")
            try:
                attempts.append(AttemptRecord.model_validate(record))
            except ValidationError as e:
                raise DomainError(f"Line {number} is not a valid attempt record: {e}") from e
        else:
            raise DomainError(f"Line {number} has unknown type {kind!r}")
    flush()
    return logs


def read_episode_logs(paths: Sequence[PathLike]) -> List[EpisodeLog]:
    logs: List[EpisodeLog] = []
    for path in paths:
        with Path(path).open() as handle:
            logs.extend(parse_episode_lines(handle))
    return logs

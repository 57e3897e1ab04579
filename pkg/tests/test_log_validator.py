"""
Tests for episode log validation.
"""

from src.data.validators import validate_logs
from src.models.episode_models import AttemptRecord, EpisodeLog, PipelinePhase, TerminalStatus
from src.models.reasoning_models import CoopAnswer, TaskKind, TaskSpec

P = PipelinePhase
SINGLE = [P.OBSERVE, P.SEGMENT, P.SELECT, P.AFFORD, P.GRASP_LIFT, P.COOP_DECIDE, P.SINGLE_DELIVER]
DUAL = [P.OBSERVE, P.SEGMENT, P.SELECT, P.AFFORD, P.GRASP_LIFT, P.COOP_DECIDE, P.DUAL_GRASP_DELIVER]


def record(index, phases, coop=(0, 0), coop_cell=None, retrieved=True):
    return AttemptRecord(
        attempt=index,
        phases=phases,
        masks_before=2,
        masks_after=2,
        coop=CoopAnswer(x_error=coop[0], x_dual=coop[1]),
        coop_cell=coop_cell,
        steps=2 if P.DUAL_GRASP_DELIVER in phases else 1,
        terminal_status=TerminalStatus.RETRIEVED if retrieved else TerminalStatus.FAILED,
        retrieved_id=index if retrieved else None,
    )


def log(attempts, initial=2, completed=True, ablations=()):
    return EpisodeLog(
        task=TaskSpec(kind=TaskKind.A),
        scene_seed=4,
        initial_garments=initial,
        config={"ablations": list(ablations), "reasoner": "rule"},
        attempts=attempts,
        task_completed=completed,
        total_steps=sum(a.steps for a in attempts),
    )


def anomaly_types(result):
    return [a["type"] for a in result["anomalies"]]


class TestValidateLogs:
    """Test the invariant checks over recorded episodes."""

    def test_valid_logs_pass(self):
        attempts = [
            record(0, SINGLE + [P.OBSERVE]),
            record(1, DUAL + [P.DONE], coop=(0, 1), coop_cell=(3, 4)),
        ]
        result = validate_logs([log(attempts)])
        assert result["validation_passed"]
        assert result["episodes"] == 1
        assert result["attempts"] == 2

    def test_empty_batch(self):
        result = validate_logs([])
        assert result["validation_passed"]
        assert result["episodes"] == 0

    def test_illegal_and_unterminated_trace(self):
        attempts = [record(0, [P.OBSERVE, P.SEGMENT, P.GRASP_LIFT, P.DONE]), record(1, SINGLE)]
        result = validate_logs([log(attempts)])
        assert not result["validation_passed"]
        assert anomaly_types(result) == ["illegal_phase_trace", "unterminated_trace"]

    def test_missing_coop_cell(self):
        attempts = [
            record(0, SINGLE + [P.OBSERVE]),
            record(1, DUAL + [P.DONE], coop=(0, 1)),
        ]
        result = validate_logs([log(attempts)])
        assert anomaly_types(result) == ["coop_cell_mismatch"]
        assert result["anomalies"][0]["attempt"] == 1

    def test_dual_arm_ablated_allows_no_coop_cell(self):
        attempts = [
            record(0, SINGLE + [P.OBSERVE], coop=(0, 1)),
            record(1, SINGLE + [P.DONE]),
        ]
        assert validate_logs([log(attempts, ablations=["dual_arm"])])["validation_passed"]

    def test_attempt_index_gap(self):
        attempts = [record(0, SINGLE + [P.OBSERVE]), record(2, SINGLE + [P.DONE])]
        assert "attempt_index_gap" in anomaly_types(validate_logs([log(attempts)]))

    def test_completion_mismatch(self):
        attempts = [record(0, SINGLE + [P.OBSERVE]), record(1, SINGLE + [P.DONE], retrieved=False)]
        assert "completion_mismatch" in anomaly_types(validate_logs([log(attempts)]))

    def test_more_retrieved_than_loaded(self):
        attempts = [record(0, SINGLE + [P.OBSERVE]), record(1, SINGLE + [P.DONE])]
        result = validate_logs([log(attempts, initial=1, completed=False)])
        assert anomaly_types(result) == ["garment_count_increase"]

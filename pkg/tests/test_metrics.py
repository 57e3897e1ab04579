"""
Tests for benchmark metrics and the report table.
"""

import random

import pytest

from src.harness.metrics import ams, asr_a, asr_b, compute_report, pdr
from src.harness.report import format_ratio, report_frame, report_table
from src.models.episode_models import AttemptRecord, EpisodeLog, PipelinePhase, TerminalStatus
from src.models.experiment_models import MetricsReport
from src.models.pile_models import GraspOutcome, GraspResult
from src.models.reasoning_models import CoopAnswer, TargetDescriptor, TaskKind, TaskSpec
from src.utils.errors import DomainError

P = PipelinePhase
TASK_A = TaskSpec(kind=TaskKind.A)
TASK_B = TaskSpec(kind=TaskKind.B, target=TargetDescriptor(color="blue"))


def attempt(index, retrieved=True, x_error=0, x_dual=0, last=P.OBSERVE):
    if x_error:
        tail, status = [P.ABORT_ATTEMPT], TerminalStatus.ABORTED
    elif x_dual:
        tail, status = [P.DUAL_GRASP_DELIVER], TerminalStatus.RETRIEVED if retrieved else TerminalStatus.FAILED
    else:
        tail, status = [P.SINGLE_DELIVER], TerminalStatus.RETRIEVED if retrieved else TerminalStatus.FAILED
    dual = x_dual and not x_error
    return AttemptRecord(
        attempt=index,
        phases=[P.OBSERVE, P.SEGMENT, P.SELECT, P.AFFORD, P.GRASP_LIFT, P.COOP_DECIDE] + tail + [last],
        masks_before=1,
        masks_after=1,
        coop=CoopAnswer(x_error=x_error, x_dual=x_dual),
        coop_queried=True,
        coop_cell=(1, 1) if dual else None,
        steps=2 if dual else 1,
        terminal_status=status,
        retrieved_id=index if status == TerminalStatus.RETRIEVED else None,
    )


def episode(task, initial, attempts, completed):
    return EpisodeLog(
        task=task,
        scene_seed=0,
        initial_garments=initial,
        attempts=attempts,
        task_completed=completed,
        total_steps=sum(a.steps for a in attempts),
    )


def task_a_logs():
    """Four piles of five garments; 19 of 20 retrieved."""
    logs = [episode(TASK_A, 5, [attempt(i) for i in range(5)], True) for _ in range(3)]
    logs.append(episode(TASK_A, 5, [attempt(i) for i in range(4)] + [attempt(4, retrieved=False)], False))
    return logs


def task_b_logs():
    """Ten Task B episodes; 9 complete."""
    logs = [episode(TASK_B, 4, [attempt(0, x_dual=1)], True) for _ in range(9)]
    logs.append(episode(TASK_B, 4, [attempt(0, x_error=1, x_dual=1), attempt(1, retrieved=False)], False))
    return logs


class TestMetrics:
    """Test the four benchmark metrics."""

    def test_asr_a(self):
        assert asr_a(task_a_logs()) == pytest.approx(0.95)

    def test_asr_b(self):
        assert asr_b(task_b_logs()) == pytest.approx(0.9)

    def test_ams(self):
        assert ams(task_b_logs()) == pytest.approx((9 * 2 + 2) / 10)

    def test_pdr_excludes_error_decisions(self):
        # 9 dual triggers out of 10 eligible decisions; the aborted attempt does not count
        assert pdr(task_b_logs()) == pytest.approx(0.9)
        assert pdr(task_a_logs()) == 0.0

    def test_pdr_counts_only_answered_queries(self):
        """Grasps that close on nothing or hit a wall never reach the reasoner."""
        unanswered = [
            AttemptRecord(
                attempt=i,
                phases=[P.OBSERVE, P.SEGMENT, P.SELECT, P.AFFORD, P.GRASP_LIFT, P.COOP_DECIDE,
                        P.SINGLE_DELIVER, P.OBSERVE],
                masks_before=1,
                masks_after=1,
                outcome=GraspOutcome(result=result),
                steps=1,
                terminal_status=TerminalStatus.FAILED,
                failure_reason=result.value,
            )
            for i, result in enumerate([GraspResult.EMPTY_GRASP, GraspResult.BOUNDARY_COLLISION])
        ]
        logs = [episode(TASK_B, 4, unanswered + [attempt(2, x_dual=1)], True)]
        report = compute_report(logs)
        assert report.eligible_attempts == 1
        assert pdr(logs) == 1.0

    def test_undefined_denominators(self):
        with pytest.raises(DomainError):
            asr_a(task_b_logs())
        with pytest.raises(DomainError):
            asr_b(task_a_logs())
        with pytest.raises(DomainError):
            ams([])
        with pytest.raises(DomainError):
            pdr([episode(TASK_B, 1, [attempt(0, x_error=1)], False)])

    def test_report_counts(self):
        report = compute_report(task_a_logs() + task_b_logs(), "mixed")
        assert report.label == "mixed"
        assert report.retrieved == 19 and report.loaded == 20
        assert report.completed == 9 and report.tasks == 10
        assert report.episodes == 14
        assert report.eligible_attempts == 20 + 9 + 1

    def test_report_leaves_undefined_ratios_empty(self):
        report = compute_report(task_a_logs())
        assert report.asr_b is None and report.ams is None
        assert report.asr_a == pytest.approx(0.95)

    def test_permutation_invariant(self):
        logs = task_a_logs() + task_b_logs()
        shuffled = list(logs)
        random.Random(7).shuffle(shuffled)
        assert compute_report(shuffled) == compute_report(logs)


class TestReport:
    """Test report formatting."""

    @pytest.mark.parametrize(
        "value, expected",
        [(0.8745, "0.874"), (0.8755, "0.876"), (0.95, "0.950"), (1.0, "1.000"), (None, "-")],
    )
    def test_format_ratio(self, value, expected):
        assert format_ratio(value) == expected

    def test_empty_table_is_header_only(self):
        assert report_table([]) == "method  ASR_A  ASR_B  AMS  PDR  episodes  attempts\n"

    def test_rows_in_input_order(self):
        reports = [
            MetricsReport(label="full", asr_a=0.95, pdr=0.25, episodes=4, attempts=20),
            MetricsReport(label="w/o dual arm", asr_a=0.8, episodes=4, attempts=22),
        ]
        frame = report_frame(reports)
        assert frame["method"].tolist() == ["full", "w/o dual arm"]
        assert frame["PDR"].tolist() == ["0.250", "-"]

        lines = report_table(reports).splitlines()
        assert len(lines) == 3
        assert lines[1].startswith("full ")
        assert lines[2].split()[-1] == "22"

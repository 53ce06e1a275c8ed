import pytest

from omg.events import Event, LogParseError, write_log
from omg.metrics import compute_metrics, median, nearest_rank_percentile
from omg.scenarios import run_scenario


def ev(tick, t, type_, **data):
    return Event(tick=tick, t=t, type=type_, data=data)


class TestComputeMetrics:
    def test_time_to_complete(self):
        log = [
            ev(0, 0.0, "session_start", version=1, scenario="panel", seed=0),
            ev(60, 1.0, "task_started", task="press_button"),
            ev(270, 4.5, "task_completed", task="press_button"),
        ]
        report = compute_metrics(log)
        assert report.tasks[0].time_to_complete_s == 3.5

    def test_error_count(self):
        log = [
            ev(0, 0.0, "session_start", version=1, scenario="juggle", seed=0),
            ev(1, 0.1, "task_started", task="pick_up"),
            ev(10, 0.6, "grab_failed", side="right", object="ball"),
            ev(30, 1.2, "grab_failed", side="right", object="ball"),
            ev(60, 2.0, "grasped", side="right", object="ball"),
            ev(60, 2.0, "task_completed", task="pick_up"),
        ]
        report = compute_metrics(log)
        assert report.tasks[0].error_count == 2
        assert report.total_errors == 2

    def test_latency_stats_nearest_rank(self):
        log = [ev(0, 0.0, "session_start", version=1, scenario="", seed=0)]
        for k, latency in enumerate((0.100, 0.150, 0.200, 0.900)):
            end = 1.0 + k
            log.append(ev(60 * k, end + latency, "recognition",
                          label="Cut", confidence=0.9,
                          emit_t=end + latency, gesture_end_t=end))
        report = compute_metrics(log)
        assert report.recognition.count == 4
        assert report.recognition.median_s == pytest.approx((0.150 + 0.200) / 2)
        assert report.recognition.p95_s == pytest.approx(0.900)

    def test_incomplete_task_reported(self):
        log = [
            ev(0, 0.0, "session_start", version=1, scenario="panel", seed=0),
            ev(1, 0.1, "task_started", task="press_button"),
        ]
        report = compute_metrics(log)
        assert report.tasks[0].time_to_complete_s is None
        assert not report.completed

    def test_pure_function_of_log(self):
        events = run_scenario("panel").events
        a = compute_metrics(events)
        b = compute_metrics(events)
        assert a.to_dict() == b.to_dict()

    def test_from_file_and_malformed_line(self, tmp_path):
        path = tmp_path / "log.jsonl"
        events = run_scenario("catch").events
        write_log(path, events)
        report = compute_metrics(path)
        assert report.scenario == "catch"
        assert report.completed

        bad = tmp_path / "bad.jsonl"
        bad.write_text('{"tick": 0, "t": 0.0, "type": "session_start", "data": {}}\nnot json\n')
        with pytest.raises(LogParseError) as err:
            compute_metrics(bad)
        assert err.value.line_number == 2

    def test_scenario_report_values(self):
        report = compute_metrics(run_scenario("panel").events)
        assert report.completed
        assert report.total_errors == 0
        assert [t.name for t in report.tasks] == ["press_button", "toggle_lever", "set_dial"]
        for task in report.tasks:
            assert task.time_to_complete_s is not None
            assert task.time_to_complete_s >= 0


class TestHelpers:
    def test_median(self):
        assert median([3.0, 1.0, 2.0]) == 2.0
        assert median([4.0, 1.0, 3.0, 2.0]) == 2.5

    def test_nearest_rank(self):
        values = [0.1, 0.15, 0.2, 0.9]
        assert nearest_rank_percentile(values, 95.0) == 0.9
        assert nearest_rank_percentile(values, 50.0) == 0.15
        assert nearest_rank_percentile([5.0], 95.0) == 5.0

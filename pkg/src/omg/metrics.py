"""Usability metrics extracted from session logs.

Throughput-style numbers (time to complete each task, error counts) and
recognition latency statistics, all recomputed purely from the log so the
report is reproducible from the artifact alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from .events import Event, read_log

ERROR_EVENT_TYPES = (
    "grab_failed",
    "catch_missed",
    "ball_dropped",
    "throw_missed",
    "tool_drop_premature",
)


@dataclass(frozen=True)
class TaskMetrics:
    name: str
    time_to_complete_s: float | None  # None when never completed
    error_count: int


@dataclass(frozen=True)
class LatencyStats:
    count: int
    median_s: float
    p95_s: float  # nearest-rank percentile


@dataclass
class MetricsReport:
    scenario: str
    tasks: list[TaskMetrics] = field(default_factory=list)
    total_time_s: float | None = None
    total_errors: int = 0
    completed: bool = False
    recognition: LatencyStats | None = None

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "completed": self.completed,
            "total_time_s": self.total_time_s,
            "total_errors": self.total_errors,
            "tasks": [
                {
                    "name": t.name,
                    "time_to_complete_s": t.time_to_complete_s,
                    "error_count": t.error_count,
                }
                for t in self.tasks
            ],
            "recognition": (
                None
                if self.recognition is None
                else {
                    "count": self.recognition.count,
                    "median_s": self.recognition.median_s,
                    "p95_s": self.recognition.p95_s,
                }
            ),
        }


def median(values: list[float]) -> float:
    s = sorted(values)
    mid = len(s) // 2
    return s[mid] if len(s) % 2 else 0.5 * (s[mid - 1] + s[mid])


def nearest_rank_percentile(values: list[float], pct: float) -> float:
    s = sorted(values)
    rank = math.ceil(pct / 100.0 * len(s))
    return s[max(rank, 1) - 1]


def compute_metrics(log: list[Event] | str | Path) -> MetricsReport:
    events = read_log(log) if isinstance(log, (str, Path)) else list(log)
    scenario = ""
    for e in events:
        if e.type == "session_start":
            scenario = e.data.get("scenario", "")
            break

    report = MetricsReport(scenario=scenario)
    task_start: dict[str, float] = {}
    order: list[str] = []
    spans: dict[str, tuple[float, float]] = {}
    for e in events:
        if e.type == "task_started":
            task_start[e.data["task"]] = e.t
            order.append(e.data["task"])
        elif e.type == "task_completed":
            name = e.data["task"]
            if name in task_start:
                spans[name] = (task_start[name], e.t)
        elif e.type == "scenario_completed":
            report.completed = True

    for name in order:
        span = spans.get(name)
        if span is None:
            errors = sum(
                1 for e in events
                if e.type in ERROR_EVENT_TYPES and e.t >= task_start[name]
            )
            report.tasks.append(TaskMetrics(name, None, errors))
        else:
            start, end = span
            errors = sum(
                1 for e in events
                if e.type in ERROR_EVENT_TYPES and start <= e.t <= end
            )
            report.tasks.append(TaskMetrics(name, end - start, errors))

    report.total_errors = sum(1 for e in events if e.type in ERROR_EVENT_TYPES)
    completions = [e.t for e in events if e.type == "task_completed"]
    if completions and report.completed:
        starts = [e.t for e in events if e.type == "task_started"]
        report.total_time_s = max(completions) - min(starts)

    latencies = [
        e.data["emit_t"] - e.data["gesture_end_t"]
        for e in events
        if e.type == "recognition"
        and "emit_t" in e.data
        and "gesture_end_t" in e.data
    ]
    if latencies:
        report.recognition = LatencyStats(
            count=len(latencies),
            median_s=median(latencies),
            p95_s=nearest_rank_percentile(latencies, 95.0),
        )
    return report

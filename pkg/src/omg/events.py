"""Canonical event records and the newline-delimited JSON log format.

One event per line, keys in the fixed order (tick, t, type, data), data
keys sorted, floats in shortest round-trip form. Logs are the determinism
substrate: identical runs must produce byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable


@dataclass(frozen=True)
class Event:
    tick: int
    t: float
    type: str
    data: dict


class LogParseError(ValueError):
    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


def event_line(event: Event) -> str:
    payload = {k: event.data[k] for k in sorted(event.data)}
    return json.dumps(
        {"tick": event.tick, "t": event.t, "type": event.type, "data": payload},
        separators=(", ", ": "),
    )


def write_log(path: str | Path, events: Iterable[Event]) -> None:
    with open(path, "w") as fh:
        for ev in events:
            fh.write(event_line(ev))
            fh.write("\n")


def parse_event(line: str, line_number: int = 0) -> Event:
    try:
        obj = json.loads(line)
        return Event(tick=int(obj["tick"]), t=float(obj["t"]),
                     type=str(obj["type"]), data=dict(obj["data"]))
    except (ValueError, KeyError, TypeError) as exc:
        raise LogParseError(line_number, str(exc)) from exc


def read_log(path: str | Path) -> list[Event]:
    events = []
    with open(path) as fh:
        for n, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            events.append(parse_event(line, n))
    return events

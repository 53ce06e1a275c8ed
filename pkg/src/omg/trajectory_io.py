"""Newline-delimited JSON trajectory files.

One record per tick:

    {"t": <seconds>, "hands": [{"side": "right", "landmarks": [[x,y,z], ...21],
     "confidence": [...21]}]}

Keys are emitted in exactly this order and floats use shortest round-trip
serialization, so files are byte-stable and safe to diff. Gesture dataset
files reuse the same record shape with trailing "label" and "sample" keys.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import IO, Iterable, Iterator

from .hand_model import HandFrame

TickRecord = tuple[float, list[HandFrame]]


def _hand_obj(frame: HandFrame) -> dict:
    return {
        "side": frame.side,
        "landmarks": [[p[0], p[1], p[2]] for p in frame.landmarks],
        "confidence": list(frame.confidence),
    }


def record_line(t: float, hands: list[HandFrame], extra: dict | None = None) -> str:
    obj: dict = {"t": t, "hands": [_hand_obj(h) for h in hands]}
    if extra:
        obj.update(extra)
    return json.dumps(obj, separators=(", ", ": "))


def _parse_hand(obj: dict, t: float) -> HandFrame:
    return HandFrame(
        side=obj["side"],
        landmarks=tuple((p[0], p[1], p[2]) for p in obj["landmarks"]),
        confidence=tuple(float(c) for c in obj["confidence"]),
        timestamp=t,
    )


def parse_record(line: str) -> tuple[float, list[HandFrame], dict]:
    obj = json.loads(line)
    t = float(obj["t"])
    hands = [_parse_hand(h, t) for h in obj["hands"]]
    extra = {k: v for k, v in obj.items() if k not in ("t", "hands")}
    return t, hands, extra


def write_trajectory(path: str | Path, records: Iterable[TickRecord]) -> None:
    with open(path, "w") as fh:
        for t, hands in records:
            fh.write(record_line(t, hands))
            fh.write("\n")


def read_trajectory(path: str | Path) -> list[TickRecord]:
    out: list[TickRecord] = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            t, hands, _ = parse_record(line)
            out.append((t, hands))
    return out


def iter_trajectory(fh: IO[str]) -> Iterator[TickRecord]:
    for line in fh:
        line = line.strip()
        if not line:
            continue
        t, hands, _ = parse_record(line)
        yield (t, hands)

#!/usr/bin/env python3
"""Regenerate the golden event logs from the shipped scenario scripts.

Run only after verifying a behavior change on purpose; the test suite
byte-compares fresh runs against these files.
"""

from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from omg.scenarios import SCENARIO_NAMES, run_scenario

OUT_DIR = Path(__file__).resolve().parents[1] / "tests" / "golden"


def main() -> None:
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    for name in SCENARIO_NAMES:
        first = run_scenario(name)
        second = run_scenario(name)
        if first.lines() != second.lines():
            raise SystemExit(f"{name}: two runs disagree; refusing to freeze a flaky log")
        if not first.completed:
            raise SystemExit(f"{name}: scenario did not complete; fix the script first")
        path = OUT_DIR / f"{name}.golden.jsonl"
        first.write(path)
        print(f"{name}: {len(first.events)} events -> {path}")


if __name__ == "__main__":
    main()

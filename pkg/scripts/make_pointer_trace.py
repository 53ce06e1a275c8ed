#!/usr/bin/env python3
"""Author the pointer trace that drives the Panel scenario in the browser UI.

Simulates the UI's pointer mapping exactly (aperture ramp on button hold,
pixel-to-world mapping, wheel depth) and plans palm positions so the index
fingertip presses the button, drags the lever, and turns the dial. The
output fixture feeds the frontend's deterministic-replay and e2e tests.
"""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from omg.geometry import quat_rotate, vsub
from omg.hand_model import template
from omg.pointer_input import PALM_DOWN_FORWARD, curl_for_aperture, palm_center_offset

OUT = Path(__file__).resolve().parents[1] / "frontend" / "test" / "fixtures" / "panel_pointer_trace.json"

CONFIG = {
    "originXPx": 400,
    "originYPx": 300,
    "metersPerPixel": 0.002,
    "centerY": 1.1,
    "baseDepth": 0.45,
    "metersPerWheel": -0.0001,
    "closeRate": 4.0,
    "frameRate": 60,
    "bounds": {"x": [-0.5, 0.6], "y": [0.8, 1.5], "z": [0.15, 0.7]},
}

_TPL = template()
_PC = palm_center_offset("right")


def tip_offset(aperture: float):
    curl = curl_for_aperture(aperture)
    chain = _TPL._finger_chain("index", curl, 1.0 - curl)
    return quat_rotate(PALM_DOWN_FORWARD, vsub(chain[3], _PC))


class TraceBuilder:
    def __init__(self):
        self.frames: list[dict] = []
        self.aperture = 1.0
        self.palm = (0.0, 1.15, 0.55)
        self.prev_wheel_z = CONFIG["baseDepth"]

    def _emit(self, palm, button: bool, drop: bool):
        # integrate the aperture ramp exactly as the UI does
        rate = CONFIG["closeRate"] / CONFIG["frameRate"]
        self.aperture = max(0.0, min(1.0, self.aperture + (-rate if button else rate)))
        px = CONFIG["originXPx"] + palm[0] / CONFIG["metersPerPixel"]
        py = CONFIG["originYPx"] - (palm[1] - CONFIG["centerY"]) / CONFIG["metersPerPixel"]
        wheel = (palm[2] - self.prev_wheel_z) / CONFIG["metersPerWheel"]
        self.prev_wheel_z = palm[2]
        self.frames.append({
            "px": px, "py": py, "wheelDelta": wheel,
            "buttonDown": button, "dropKey": drop,
        })
        self.palm = palm

    def move_palm(self, target, n, button=False):
        start = self.palm
        for k in range(1, n + 1):
            u = k / n
            s = u * u * (3.0 - 2.0 * u)
            palm = tuple(start[i] + (target[i] - start[i]) * s for i in range(3))
            self._emit(palm, button, False)

    def hold(self, n, button=False):
        for _ in range(n):
            self._emit(self.palm, button, False)

    def tip_to(self, tip_target, n, button=False):
        """Move so the index tip lands on target, compensating for the
        aperture ramp's effect on the fingertip position."""
        start_tip = tuple(self.palm[i] + tip_offset(self.aperture)[i] for i in range(3))
        for k in range(1, n + 1):
            u = k / n
            s = u * u * (3.0 - 2.0 * u)
            tip = tuple(start_tip[i] + (tip_target[i] - start_tip[i]) * s for i in range(3))
            # predict the aperture after this frame's ramp step
            rate = CONFIG["closeRate"] / CONFIG["frameRate"]
            next_ap = max(0.0, min(1.0, self.aperture + (-rate if button else rate)))
            off = tip_offset(next_ap)
            palm = tuple(tip[i] - off[i] for i in range(3))
            self._emit(palm, button, False)


def build() -> list[dict]:
    b = TraceBuilder()
    cap_top = 0.95 + 0.022 + 0.008

    # --- press the button: hover the tip over the cap, ramp closed to dip it
    b.tip_to((-0.15, cap_top + 0.03, 0.40), 45)
    b.hold(6)
    b.tip_to((-0.15, cap_top - 0.0065, 0.40), 8, button=True)
    b.hold(4, button=True)
    b.tip_to((-0.15, cap_top + 0.04, 0.40), 12)
    b.hold(20)

    # --- lever: drag the handle end upward through the detent midpoint
    b.tip_to((0.0, 0.952, 0.372), 40)
    b.hold(6)
    b.tip_to((0.0, 1.05, 0.368), 30)
    b.tip_to((0.0, 1.09, 0.45), 15)
    b.hold(6)

    # --- dial: tip into the knob face, sweep 120 degrees, let go
    dial = (0.15, 1.00, 0.30)
    b.tip_to((dial[0] + 0.026, dial[1], dial[2] + 0.006), 40)
    b.hold(6)
    start_tip = (dial[0] + 0.026, dial[1], dial[2] + 0.006)
    for k in range(1, 73):
        ang = math.radians(120.0 * k / 72.0)
        tip = (dial[0] + 0.026 * math.cos(ang), dial[1] + 0.026 * math.sin(ang),
               dial[2] + 0.006)
        b.tip_to(tip, 1)
    b.tip_to((dial[0] + 0.03, dial[1] + 0.03, dial[2] + 0.12), 15)
    b.hold(30)
    return b.frames


def main() -> None:
    frames = build()
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps({"config": CONFIG, "frames": frames}, indent=0))
    print(f"{len(frames)} pointer frames -> {OUT}")


if __name__ == "__main__":
    main()

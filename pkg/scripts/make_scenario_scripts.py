#!/usr/bin/env python3
"""Author the shipped scenario trajectory scripts.

Each scenario's choreography is built from palm/fingertip keyframe moves
sampled at 60 Hz through the canonical hand template, then written as
trajectory JSONL into src/omg/data/scenarios/. Rerun after touching the
hand template, scenario layouts, or interaction config, then regenerate
the golden logs.
"""

from __future__ import annotations

import math
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from omg.geometry import Quat, QUAT_IDENTITY, Vec3, quat_rotate, vadd, vlerp, vsub
from omg.hand_model import HandFrame, template
from omg.pointer_input import PALM_DOWN_FORWARD, palm_center_offset
from omg import trajectory_io

DT = 1.0 / 60.0
OUT_DIR = Path(__file__).resolve().parents[1] / "src" / "omg" / "data" / "scenarios"


def smoothstep(u: float) -> float:
    u = min(max(u, 0.0), 1.0)
    return u * u * (3.0 - 2.0 * u)


def slerp(a: Quat, b: Quat, u: float) -> Quat:
    dot = sum(x * y for x, y in zip(a, b))
    if dot < 0.0:
        b = tuple(-x for x in b)
        dot = -dot
    if dot > 0.9995:
        q = tuple(x + (y - x) * u for x, y in zip(a, b))
        n = math.sqrt(sum(x * x for x in q))
        return tuple(x / n for x in q)
    theta = math.acos(min(1.0, dot))
    sa = math.sin((1.0 - u) * theta) / math.sin(theta)
    sb = math.sin(u * theta) / math.sin(theta)
    return tuple(sa * x + sb * y for x, y in zip(a, b))


class Track:
    """Per-hand keyframe sampler: palm position, curl, orientation."""

    def __init__(self, side: str, palm: Vec3, curl: float, quat: Quat):
        self.side = side
        self.states: list[tuple[Vec3, float, Quat]] = [(palm, curl, quat)]
        self.tpl = template()
        self.pc_local = palm_center_offset(side)

    @property
    def palm(self) -> Vec3:
        return self.states[-1][0]

    @property
    def curl(self) -> float:
        return self.states[-1][1]

    @property
    def quat(self) -> Quat:
        return self.states[-1][2]

    def hold(self, duration: float) -> "Track":
        for _ in range(int(round(duration / DT))):
            self.states.append(self.states[-1])
        return self

    def move(self, duration: float, palm: Vec3 | None = None, curl: float | None = None,
             quat: Quat | None = None, ease=smoothstep) -> "Track":
        p0, c0, q0 = self.states[-1]
        p1 = palm if palm is not None else p0
        c1 = curl if curl is not None else c0
        q1 = quat if quat is not None else q0
        n = max(1, int(round(duration / DT)))
        for k in range(1, n + 1):
            u = ease(k / n)
            self.states.append((vlerp(p0, p1, u), c0 + (c1 - c0) * u, slerp(q0, q1, u)))
        return self

    def move_linear(self, duration: float, palm: Vec3 | None = None,
                    curl: float | None = None) -> "Track":
        """Constant-velocity move (for controlled release velocities)."""
        return self.move(duration, palm=palm, curl=curl, ease=lambda u: u)

    def _tip_offset(self, finger: str, curl: float) -> Vec3:
        chain = self.tpl._finger_chain(finger, curl, 1.0 - curl)
        tip_local = chain[3]
        if self.side == "left":
            tip_local = (-tip_local[0], tip_local[1], tip_local[2])
        return vsub(tip_local, self.pc_local)

    def tip_line(self, finger: str, tip_to: Vec3, duration: float,
                 curl_to: float | None = None, ease=smoothstep) -> "Track":
        """Drive a fingertip along a straight world path by moving the palm."""
        p0, c0, q0 = self.states[-1]
        c1 = curl_to if curl_to is not None else c0
        tip_from = vadd(p0, quat_rotate(q0, self._tip_offset(finger, c0)))
        n = max(1, int(round(duration / DT)))
        for k in range(1, n + 1):
            u = ease(k / n)
            c = c0 + (c1 - c0) * u
            tip = vlerp(tip_from, tip_to, u)
            palm = vsub(tip, quat_rotate(q0, self._tip_offset(finger, c)))
            self.states.append((palm, c, q0))
        return self

    def tip_arc(self, finger: str, center: Vec3, radius: float, depth_z: float,
                deg_from: float, deg_to: float, duration: float) -> "Track":
        """Sweep a fingertip along a circular arc in the x-y plane."""
        _, c0, q0 = self.states[-1]
        n = max(1, int(round(duration / DT)))
        for k in range(1, n + 1):
            u = k / n
            ang = math.radians(deg_from + (deg_to - deg_from) * u)
            tip = (center[0] + radius * math.cos(ang),
                   center[1] + radius * math.sin(ang),
                   center[2] + depth_z)
            palm = vsub(tip, quat_rotate(q0, self._tip_offset(finger, c0)))
            self.states.append((palm, c0, q0))
        return self

    def frames(self) -> list[HandFrame]:
        out = []
        for k, (palm, curl, quat) in enumerate(self.states):
            wrist = vsub(palm, quat_rotate(quat, self.pc_local))
            out.append(
                self.tpl.pose(curl=curl, spread=1.0 - curl, position=wrist,
                              orientation=quat, side=self.side, timestamp=k * DT)
            )
        return out


def merge_tracks(*tracks: Track) -> list[trajectory_io.TickRecord]:
    frame_lists = [t.frames() for t in tracks]
    n = max(len(f) for f in frame_lists)
    records = []
    for k in range(n):
        hands = []
        for frames in frame_lists:
            idx = min(k, len(frames) - 1)
            f = frames[idx]
            if idx < k:  # track exhausted: freeze in place with advancing time
                f = HandFrame(side=f.side, landmarks=f.landmarks,
                              confidence=f.confidence, timestamp=k * DT)
            hands.append(f)
        records.append((k * DT, hands))
    return records


# --- choreography -------------------------------------------------------------------


def panel_script() -> list[trajectory_io.TickRecord]:
    q = PALM_DOWN_FORWARD
    t = Track("right", palm=(0.0, 1.15, 0.55), curl=0.2, quat=q)

    # --- press the button: hover the index tip over the cap, curl to press
    cap_top = 0.95 + 0.022 + 0.008  # housing + cap offset + cap half-length
    t.tip_line("index", (-0.15, cap_top + 0.03, 0.40), 0.8)
    t.hold(0.1)
    t.tip_line("index", (-0.15, cap_top - 0.0065, 0.40), 0.4, curl_to=0.35)
    t.hold(0.15)
    t.tip_line("index", (-0.15, cap_top + 0.04, 0.40), 0.3, curl_to=0.2)
    t.hold(0.3)  # let the spring return fire button_released

    # --- toggle the lever: drag the handle end upward through the midpoint
    t.tip_line("index", (0.0, 0.955, 0.372), 0.7)
    t.hold(0.1)
    t.tip_line("index", (0.0, 1.05, 0.368), 0.5)
    t.hold(0.1)
    t.tip_line("index", (0.0, 1.09, 0.45), 0.3)
    t.hold(0.1)

    # --- set the dial: insert the tip at the rim, sweep 120 degrees
    dial = (0.15, 1.00, 0.30)
    t.tip_line("index", (dial[0] + 0.026, dial[1], dial[2] + 0.006), 0.6)
    t.hold(0.1)
    t.tip_arc("index", dial, radius=0.026, depth_z=0.006, deg_from=0.0, deg_to=120.0,
              duration=1.2)
    t.hold(0.05)
    t.tip_line("index", (dial[0] + 0.03, dial[1] + 0.02, dial[2] + 0.12), 0.3)
    t.hold(0.4)
    return merge_tracks(t)


def juggle_script() -> list[trajectory_io.TickRecord]:
    q = PALM_DOWN_FORWARD
    ball_top = (0.0, 0.95 + 0.0335, 0.40)
    right = Track("right", palm=(0.0, 1.25, 0.55), curl=0.15, quat=q)
    left = Track("left", palm=(-0.25, 1.20, 0.55), curl=0.15, quat=q)

    # pick up: descend onto the ball while closing
    right.move(0.5, palm=vadd(ball_top, (0.0, 0.10, 0.0)))
    right.move(0.6, palm=vadd(ball_top, (0.0, 0.005, 0.0)), curl=0.62)
    right.hold(0.2)
    # lift
    right.move(0.5, palm=(0.0, 1.25, 0.40))
    right.hold(0.2)
    # toss at 0.9 m/s, releasing mid-stroke; settle just above the ball's
    # apex, then creep down with the falling ball while re-closing so the
    # snap window spans several ticks
    right.move_linear(0.1, palm=(0.0, 1.34, 0.40), curl=0.15)
    right.move_linear(0.05, palm=(0.0, 1.315, 0.40))
    right.move_linear(0.1, palm=(0.0, 1.291, 0.40), curl=0.62)
    right.hold(0.4)
    # transfer: carry to the meeting point; the left hand waits underneath
    right.move(0.5, palm=(-0.12, 1.22, 0.45))
    right.hold(0.3)
    t_meet = 0.5 + 0.6 + 0.2 + 0.5 + 0.2 + 0.1 + 0.05 + 0.1 + 0.4 + 0.5 + 0.3  # 3.45 s
    left.hold(t_meet - 0.5)
    left.move(0.5, palm=(-0.12, 1.147, 0.45))
    # right lets go gently; the ball drops a few mm into the closing left hand
    left.hold(0.05)
    left.move_linear(0.15, curl=0.62)
    right.move_linear(0.3, curl=0.15)  # release as aperture passes 0.55
    left.hold(0.6)
    right.move(0.4, palm=(0.2, 1.3, 0.55))
    right.hold(1.0)
    return merge_tracks(right, left)


def catch_script() -> list[trajectory_io.TickRecord]:
    # pitch 1 arrives at (0, 1.274, 0) at t = 0.5 exactly
    intercept = (0.0, 1.27375, 0.0)
    t = Track("right", palm=(0.15, 1.05, 0.25), curl=0.15, quat=QUAT_IDENTITY)
    t.move(0.3, palm=intercept)
    t.hold(0.116)  # in position, hand open, by tick ~25
    t.move_linear(0.1, curl=0.7)  # aperture falls through 0.4 right at t=0.5
    t.hold(0.4)
    # wind up slightly, then throw: constant-velocity swing (0, 4, 10) m/s
    t.move(0.3, palm=(0.0, 1.20, 0.10))
    t.move_linear(0.1, palm=(0.0, 1.24, 0.20))  # lead-in
    t.move_linear(0.12, palm=vadd((0.0, 1.24, 0.20), (0.0, 4.0 * 0.12, 10.0 * 0.12)),
                  curl=0.05)
    t.hold(1.2)  # ball in flight to the pitcher plane
    return merge_tracks(t)


def medic_script() -> list[trajectory_io.TickRecord]:
    q = PALM_DOWN_FORWARD
    t = Track("right", palm=(0.0, 1.20, 0.58), curl=0.15, quat=q)

    # palpate near the wrist end of the forearm (well clear of the bandage):
    # at curl 0.35 the middle and ring tips hang ~0.075 below the palm
    t.move(0.5, palm=(0.0, 1.12, 0.58), curl=0.35)
    t.move(0.4, palm=(0.0, 1.020, 0.58))
    t.hold(0.25)
    t.move(0.3, palm=(0.0, 1.15, 0.58), curl=0.15)

    # grab the scissors (lying flat, handle toward +x at x ~ 0.275)
    t.move(0.6, palm=(0.275, 1.08, 0.40))
    t.move(0.5, palm=(0.275, 0.972, 0.40), curl=0.62)
    t.hold(0.25)
    # carry to the bandage and cut: blade tip lands near (0, 1.008, 0.43)
    t.move(0.6, palm=(0.0, 1.06, 0.585))
    t.hold(0.1)
    t.move(0.25, curl=0.95)  # actuation crosses the cut threshold
    t.hold(0.2)
    t.move(0.25, curl=0.3)
    # drop the scissors: palm-down spread pose held past the dwell
    t.move(0.3, curl=0.0)
    t.hold(0.35)

    # grab the syringe (upright at x=0.35) and inject
    t.move(0.5, palm=(0.35, 1.12, 0.40), curl=0.15)
    t.move(0.5, palm=(0.35, 1.035, 0.40), curl=0.62)
    t.hold(0.25)
    t.move(0.4, palm=(0.12, 1.10, 0.47))
    t.move(0.4, curl=0.97)  # full plunger depth
    t.hold(0.4)
    return merge_tracks(t)


BUILDERS = {
    "panel": panel_script,
    "juggle": juggle_script,
    "catch": catch_script,
    "medic": medic_script,
}


def main() -> None:
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    only = sys.argv[1:] or list(BUILDERS)
    for name in only:
        records = BUILDERS[name]()
        path = OUT_DIR / f"{name}.jsonl"
        trajectory_io.write_trajectory(path, records)
        print(f"{name}: {len(records)} ticks -> {path}")


if __name__ == "__main__":
    main()

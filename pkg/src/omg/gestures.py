"""Dynamic gesture vocabulary, synthetic trajectory generators and features.

The six classes follow the motion vocabulary the interaction style is built
around: wrapping (circular orbit about a limb axis), twisting (wrist roll),
cutting (straight line with scissor-like aperture oscillation), pushing
(palm-forward translation), waving (lateral oscillation) and a null class
of low-amplitude idle drift.

Features are translation-invariant by construction: finite-difference
velocities plus aperture, spread and palm normal, 11 values per step.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path

from .geometry import (
    Quat,
    Vec3,
    quat_mul,
    quat_rotate,
    vadd,
    vcross,
    vlerp,
    vnormalize,
    vscale,
    vsub,
)
from .hand_model import FINGERS, HandFrame, TIP, pose_metrics, template
from . import trajectory_io

FRAME_RATE = 60.0
DT = 1.0 / FRAME_RATE
FEATURE_DIM = 11


class GestureClass(IntEnum):
    NULL = 0
    WRAP = 1
    TWIST = 2
    CUT = 3
    PUSH = 4
    WAVE = 5


CLASS_NAMES = tuple(c.name.capitalize() for c in GestureClass)


class FeatureError(ValueError):
    pass


@dataclass(frozen=True)
class GestureSample:
    label: GestureClass
    frames: tuple[HandFrame, ...]
    speed: float
    amplitude: float
    seed: int

    def __post_init__(self) -> None:
        if not (60 <= len(self.frames) <= 180):
            raise ValueError(f"sample length {len(self.frames)} outside 60..180")
        for k in range(1, len(self.frames)):
            if self.frames[k].timestamp <= self.frames[k - 1].timestamp:
                raise ValueError("timestamps must be strictly increasing")


def _quat_axis_angle(axis: Vec3, angle: float) -> Quat:
    axis = vnormalize(axis)
    h = angle / 2.0
    s = math.sin(h)
    return (math.cos(h), axis[0] * s, axis[1] * s, axis[2] * s)


def _random_unit(rng: random.Random) -> Vec3:
    while True:
        v = (rng.gauss(0.0, 1.0), rng.gauss(0.0, 1.0), rng.gauss(0.0, 1.0))
        n = math.sqrt(sum(c * c for c in v))
        if n > 1e-6:
            return (v[0] / n, v[1] / n, v[2] / n)


def _wobble(rng: random.Random, max_angle: float) -> Quat:
    return _quat_axis_angle(_random_unit(rng), rng.uniform(-max_angle, max_angle))


def _smoothstep(x: float) -> float:
    x = min(max(x, 0.0), 1.0)
    return x * x * (3.0 - 2.0 * x)


@dataclass
class _MotionSpec:
    """Per-frame wrist position / orientation / curl callbacks."""

    n_frames: int
    position: callable
    orientation: callable
    curl: callable
    speed: float
    amplitude: float


_BASE_POS: Vec3 = (0.0, 1.1, 0.4)


def _generate(spec: _MotionSpec, label: GestureClass, seed: int, side: str) -> GestureSample:
    tpl = template()
    frames = []
    for k in range(spec.n_frames):
        u = k / (spec.n_frames - 1)
        frames.append(
            tpl.pose(
                curl=spec.curl(u),
                position=spec.position(u),
                orientation=spec.orientation(u),
                side=side,
                timestamp=k * DT,
            )
        )
    return GestureSample(
        label=label,
        frames=tuple(frames),
        speed=spec.speed,
        amplitude=spec.amplitude,
        seed=seed,
    )


def make_sample(label: GestureClass, seed: int, side: str = "right") -> GestureSample:
    """One synthetic labeled gesture trajectory, deterministic in the seed."""
    rng = random.Random((int(label) << 32) ^ seed)
    n = rng.randint(60, 180)
    duration = (n - 1) * DT
    center = vadd(_BASE_POS, (rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1), rng.uniform(-0.05, 0.05)))
    base_q = _wobble(rng, math.radians(35.0))

    if label == GestureClass.WRAP:
        # orbit about a limb-like axis; angular progress is monotone and >= 330 deg
        axis = quat_rotate(_wobble(rng, math.radians(40.0)), (1.0, 0.0, 0.0))
        radius = rng.uniform(0.06, 0.12)
        total = math.radians(rng.uniform(330.0, 540.0))
        u_ref = _random_unit(rng)
        e1 = vnormalize(vcross(axis, u_ref)) if abs(sum(a * b for a, b in zip(axis, u_ref))) < 0.95 else vnormalize(vcross(axis, (0.0, 1.0, 0.0)))
        e2 = vnormalize(vcross(axis, e1))
        phase = rng.uniform(0.0, 2.0 * math.pi)

        def position(u, c=center, r=radius, tt=total, ph=phase, a=e1, b=e2):
            ang = ph + tt * u
            return vadd(c, vadd(vscale(a, r * math.cos(ang)), vscale(b, r * math.sin(ang))))

        spec = _MotionSpec(n, position, lambda u, q=base_q: q, lambda u: 0.35, total / duration, radius)

    elif label == GestureClass.TWIST:
        # wrist roll about the forearm axis, position nearly still
        roll_total = math.radians(rng.uniform(120.0, 260.0)) * rng.choice((-1.0, 1.0))
        roll_axis = quat_rotate(base_q, (0.0, 1.0, 0.0))  # forearm ~ palm direction
        drift = vscale(_random_unit(rng), rng.uniform(0.0, 0.015))

        def position(u, c=center, d=drift):
            return vadd(c, vscale(d, math.sin(math.pi * u)))

        def orientation(u, q=base_q, ax=roll_axis, rt=roll_total):
            return quat_mul(_quat_axis_angle(ax, rt * _smoothstep(u)), q)

        spec = _MotionSpec(n, position, orientation, lambda u: 0.3, abs(roll_total) / duration, abs(roll_total))

    elif label == GestureClass.CUT:
        # straight line plus scissor-like aperture oscillation
        direction = _random_unit(rng)
        length = rng.uniform(0.15, 0.35)
        start = vsub(center, vscale(direction, length / 2.0))
        osc_hz = rng.uniform(2.0, 4.0)

        def position(u, s=start, d=direction, L=length):
            return vadd(s, vscale(d, L * u))

        def curl(u, f=osc_hz, T=duration):
            return 0.45 + 0.3 * math.sin(2.0 * math.pi * f * T * u)

        spec = _MotionSpec(n, position, lambda u, q=base_q: q, curl, length / duration, length)

    elif label == GestureClass.PUSH:
        # short palm-forward shove: palm normal leads the motion
        distance = rng.uniform(0.12, 0.28)
        direction = quat_rotate(base_q, (0.0, 0.0, 1.0))  # template palm normal
        start = vsub(center, vscale(direction, distance / 2.0))

        def position(u, s=start, d=direction, L=distance):
            return vadd(s, vscale(d, L * _smoothstep(u)))

        spec = _MotionSpec(n, position, lambda u, q=base_q: q, lambda u: 0.15, distance / duration, distance)

    elif label == GestureClass.WAVE:
        # lateral oscillation, fingers up
        amp = rng.uniform(0.08, 0.18)
        cycles = rng.uniform(2.0, 4.5)
        lateral = quat_rotate(base_q, (1.0, 0.0, 0.0))
        phase = rng.uniform(0.0, 2.0 * math.pi)

        def position(u, c=center, a=amp, k=cycles, ph=phase, d=lateral):
            return vadd(c, vscale(d, a * math.sin(ph + 2.0 * math.pi * k * u)))

        spec = _MotionSpec(n, position, lambda u, q=base_q: q, lambda u: 0.1, amp * cycles / duration, amp)

    elif label == GestureClass.NULL:
        # low-amplitude smooth drift through a few random waypoints
        waypoints = [center]
        for _ in range(3):
            waypoints.append(vadd(center, vscale(_random_unit(rng), rng.uniform(0.0, 0.02))))
        fixed_curl = rng.uniform(0.0, 0.7)

        def position(u, wp=waypoints):
            x = u * (len(wp) - 1)
            i = min(int(x), len(wp) - 2)
            return vlerp(wp[i], wp[i + 1], _smoothstep(x - i))

        spec = _MotionSpec(n, position, lambda u, q=base_q: q, lambda u, c=fixed_curl: c, 0.0, 0.02)

    else:
        raise ValueError(f"unknown gesture class {label}")

    return _generate(spec, label, seed, side)


def generate_dataset(seed: int, per_class_count: int = 200) -> list[GestureSample]:
    """Balanced synthetic dataset, byte-identical for a given seed."""
    if per_class_count < 1:
        raise ValueError("per_class_count must be >= 1")
    rng = random.Random(seed)
    samples: list[GestureSample] = []
    for label in GestureClass:
        for _ in range(per_class_count):
            samples.append(make_sample(label, seed=rng.getrandbits(48)))
    return samples


def hard_negative_sample(seed: int, side: str = "right") -> GestureSample:
    """Null-labeled transition motion for streaming robustness.

    Live windows straddle repositioning moves between gestures: straight
    glides in palm-unaligned directions, single out-and-back strokes, and
    hold-glide-hold patterns. None of these are gestures, but a model
    trained only on clean samples happily mistakes them for pushes or
    waves, so the trainer mixes these in as extra null-class data.
    """
    rng = random.Random(0x9E3779B9 ^ seed)
    n = rng.randint(70, 160)
    duration = (n - 1) * DT
    center = vadd(_BASE_POS, (rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1), rng.uniform(-0.05, 0.05)))
    base_q = _wobble(rng, math.radians(35.0))
    curl = rng.uniform(0.1, 0.6)
    flavor = rng.randrange(3)

    palm_normal = quat_rotate(base_q, (0.0, 0.0, 1.0))
    while True:
        direction = _random_unit(rng)
        if abs(sum(a * b for a, b in zip(direction, palm_normal))) < 0.6:
            break
    length = rng.uniform(0.10, 0.35)

    if flavor == 0:  # repositioning glide
        start = vsub(center, vscale(direction, length / 2.0))

        def position(u, s=start, d=direction, L=length):
            return vadd(s, vscale(d, L * _smoothstep(u)))

    elif flavor == 1:  # single out-and-back stroke (one cycle is not a wave)
        def position(u, c=center, d=direction, L=length):
            return vadd(c, vscale(d, L * math.sin(math.pi * u)))

    else:  # hold, glide, hold (the shape of an inter-gesture bridge)
        start = vsub(center, vscale(direction, length / 2.0))

        def position(u, s=start, d=direction, L=length):
            if u < 0.3:
                w = 0.0
            elif u > 0.7:
                w = 1.0
            else:
                w = _smoothstep((u - 0.3) / 0.4)
            return vadd(s, vscale(d, L * w))

    spec = _MotionSpec(n, position, lambda u, q=base_q: q, lambda u, c=curl: c,
                       length / duration, length)
    return _generate(spec, GestureClass.NULL, seed, side)


def featurize(frames) -> list[tuple[float, ...]]:
    """Per-step feature vectors: wrist velocity (3), wrist-relative mean
    fingertip velocity (3), aperture, spread, palm normal (3).

    Finite differences at the frame rate; length = len(frames) - 1. The
    output is invariant under global translation of the window.
    """
    frames = list(frames)
    if len(frames) < 2:
        raise FeatureError("featurize needs at least 2 frames")
    out: list[tuple[float, ...]] = []
    prev = frames[0]
    prev_rel = _mean_tip_offset(prev)
    for cur in frames[1:]:
        dt = cur.timestamp - prev.timestamp
        if dt <= 0.0:
            raise FeatureError("frame timestamps must be strictly increasing")
        w0, w1 = prev.landmarks[0], cur.landmarks[0]
        wv = ((w1[0] - w0[0]) / dt, (w1[1] - w0[1]) / dt, (w1[2] - w0[2]) / dt)
        rel = _mean_tip_offset(cur)
        rv = ((rel[0] - prev_rel[0]) / dt, (rel[1] - prev_rel[1]) / dt, (rel[2] - prev_rel[2]) / dt)
        m = pose_metrics(cur)
        out.append(
            (
                wv[0], wv[1], wv[2],
                rv[0], rv[1], rv[2],
                m.aperture, m.spread,
                m.palm_normal[0], m.palm_normal[1], m.palm_normal[2],
            )
        )
        prev, prev_rel = cur, rel
    return out


def _mean_tip_offset(frame: HandFrame) -> Vec3:
    w = frame.landmarks[0]
    sx = sy = sz = 0.0
    for f in FINGERS:
        p = frame.landmarks[TIP[f]]
        sx += p[0] - w[0]
        sy += p[1] - w[1]
        sz += p[2] - w[2]
    n = float(len(FINGERS))
    return (sx / n, sy / n, sz / n)


# --- dataset files ------------------------------------------------------------


def write_dataset(path: str | Path, samples: list[GestureSample]) -> None:
    """Trajectory JSONL with per-record "label" and "sample" keys."""
    with open(path, "w") as fh:
        for idx, sample in enumerate(samples):
            for frame in sample.frames:
                line = trajectory_io.record_line(
                    frame.timestamp, [frame],
                    extra={"label": CLASS_NAMES[sample.label], "sample": idx},
                )
                fh.write(line)
                fh.write("\n")


def read_dataset(path: str | Path) -> list[tuple[GestureClass, list[HandFrame]]]:
    groups: dict[int, tuple[GestureClass, list[HandFrame]]] = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            _, hands, extra = trajectory_io.parse_record(line)
            idx = int(extra["sample"])
            label = GestureClass[extra["label"].upper()]
            groups.setdefault(idx, (label, []))[1].extend(hands)
    return [groups[k] for k in sorted(groups)]

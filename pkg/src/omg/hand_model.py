"""Universal 21-landmark hand model.

Landmark layout: wrist = 0, then four per finger thumb -> little in the
order metacarpal-base, proximal, intermediate, tip. Positions are meters
in a canonical frame (x right, y up, z toward the default viewer).

The module owns frame normalization from arbitrary sensors, pose metrics
(aperture / spread / palm frame), a parametric pose generator built on
the canonical template, and a synthetic camera with a geometric occlusion
model.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from importlib import resources

from .geometry import (
    Quat,
    QUAT_IDENTITY,
    Vec3,
    clamp,
    quat_rotate,
    ray_box_intersect,
    vadd,
    vcross,
    vdist,
    vdot,
    vmean,
    vnorm,
    vnormalize,
    vscale,
    vsub,
)

WRIST = 0
FINGERS = ("thumb", "index", "middle", "ring", "little")
# base landmark index of each finger chain (base, proximal, intermediate, tip)
FINGER_BASE = {"thumb": 1, "index": 5, "middle": 9, "ring": 13, "little": 17}
TIP = {f: FINGER_BASE[f] + 3 for f in FINGERS}
MCP = {f: FINGER_BASE[f] for f in FINGERS}
NON_THUMB = ("index", "middle", "ring", "little")
LANDMARK_COUNT = 21

# landmarks belonging to the palm proper (never occluded by the palm slab)
_PALM_LANDMARKS = frozenset([WRIST] + [MCP[f] for f in FINGERS])
# intermediate + tip of the four non-thumb fingers, dropped when edge-on
_EDGE_ON_DROPPED = tuple(
    i for f in NON_THUMB for i in (FINGER_BASE[f] + 2, FINGER_BASE[f] + 3)
)

EDGE_ON_THRESHOLD = 0.2


class AdapterConfigError(ValueError):
    """Sensor adapter does not map the canonical landmark set."""


class FrameDecodeError(ValueError):
    """Raw frame cannot be decoded into a valid HandFrame."""


class DegenerateFrameError(ValueError):
    """Frame geometry is too degenerate for pose metrics."""


@dataclass(frozen=True)
class HandFrame:
    """One normalized hand observation."""

    side: str  # 'left' | 'right'
    landmarks: tuple[Vec3, ...]  # 21 positions, meters, canonical axes
    confidence: tuple[float, ...]  # 21 values in [0, 1]
    timestamp: float  # seconds

    def __post_init__(self) -> None:
        if self.side not in ("left", "right"):
            raise ValueError(f"side must be 'left' or 'right', got {self.side!r}")
        if len(self.landmarks) != LANDMARK_COUNT:
            raise ValueError(f"expected {LANDMARK_COUNT} landmarks, got {len(self.landmarks)}")
        if len(self.confidence) != LANDMARK_COUNT:
            raise ValueError("confidence length must match landmark count")
        for p in self.landmarks:
            if not (math.isfinite(p[0]) and math.isfinite(p[1]) and math.isfinite(p[2])):
                raise ValueError("non-finite landmark position")
        for c in self.confidence:
            if not (0.0 <= c <= 1.0):
                raise ValueError(f"confidence {c} outside [0, 1]")
        if not math.isfinite(self.timestamp):
            raise ValueError("non-finite timestamp")

    def landmark(self, index: int) -> Vec3:
        return self.landmarks[index]


@dataclass(frozen=True)
class PoseMetrics:
    aperture: float  # 0 fist .. 1 open
    spread: float  # 0 together .. 1 splayed
    palm_normal: Vec3  # unit, out of the palm
    palm_direction: Vec3  # unit, wrist -> middle mcp, orthogonal to normal
    palm_center: Vec3


@dataclass(frozen=True)
class RawSensorFrame:
    """Sensor-native landmark frame before normalization."""

    source_id: str
    side: str
    landmarks: tuple[Vec3, ...]  # source units and axes
    valid: tuple[bool, ...]
    timestamp: float

    def __post_init__(self) -> None:
        if len(self.valid) != len(self.landmarks):
            raise ValueError("validity flag count must equal landmark count")


@dataclass(frozen=True)
class SensorAdapter:
    """Unit/axis mapping plus landmark-index permutation into canonical order.

    canonical[i] = scale * (axes @ raw[index_map[i]])
    """

    scale: float = 1.0
    axes: tuple[Vec3, Vec3, Vec3] = ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0))
    index_map: tuple[int, ...] = tuple(range(LANDMARK_COUNT))

    def validate(self, landmark_count: int) -> None:
        if len(self.index_map) != LANDMARK_COUNT:
            raise AdapterConfigError(
                f"adapter must map all {LANDMARK_COUNT} canonical indices, got {len(self.index_map)}"
            )
        if len(set(self.index_map)) != LANDMARK_COUNT:
            raise AdapterConfigError("adapter index map contains duplicate entries")
        for j in self.index_map:
            if not (0 <= j < landmark_count):
                raise AdapterConfigError(f"adapter maps to out-of-range raw index {j}")
        if self.scale <= 0.0 or not math.isfinite(self.scale):
            raise AdapterConfigError(f"bad adapter scale {self.scale}")

    def decode_point(self, p: Vec3) -> Vec3:
        r0, r1, r2 = self.axes
        return (
            (r0[0] * p[0] + r0[1] * p[1] + r0[2] * p[2]) * self.scale,
            (r1[0] * p[0] + r1[1] * p[1] + r1[2] * p[2]) * self.scale,
            (r2[0] * p[0] + r2[1] * p[1] + r2[2] * p[2]) * self.scale,
        )

    def encode_point(self, p: Vec3) -> Vec3:
        # axes is orthonormal, so the inverse is the transpose
        q = (p[0] / self.scale, p[1] / self.scale, p[2] / self.scale)
        r0, r1, r2 = self.axes
        return (
            r0[0] * q[0] + r1[0] * q[1] + r2[0] * q[2],
            r0[1] * q[0] + r1[1] * q[1] + r2[1] * q[2],
            r0[2] * q[0] + r1[2] * q[1] + r2[2] * q[2],
        )


IDENTITY_ADAPTER = SensorAdapter()
MILLIMETER_ADAPTER = SensorAdapter(scale=0.001)


@dataclass(frozen=True)
class CameraPose:
    position: Vec3
    view_axis: Vec3  # unit
    preset: str = "custom"

    def __post_init__(self) -> None:
        n = vnorm(self.view_axis)
        if abs(n - 1.0) > 1e-9:
            raise ValueError(f"view axis must be unit length, |v| = {n}")


def camera_preset(name: str) -> CameraPose:
    """Stock sensor placements at desk scale (user near origin facing +z)."""
    if name == "head_mounted":
        # worn on the display, pitched steeply down at hands held low
        return CameraPose((0.0, 1.68, 0.08), vnormalize((0.0, -0.94, 0.34)), "head_mounted")
    if name == "chest_lanyard":
        return CameraPose((0.0, 1.35, 0.12), vnormalize((0.0, -0.35, 0.94)), "chest_lanyard")
    if name == "desktop":
        return CameraPose((0.0, 1.05, 0.95), (0.0, 0.0, -1.0), "desktop")
    raise ValueError(f"unknown camera preset {name!r}")


# --- canonical template -------------------------------------------------------


class HandTemplate:
    """Parametric skeleton loaded from the shipped template data.

    All pose metrics are calibrated against poses of this template
    (d_open / d_fist per finger, spread chord endpoints per pair), which
    makes aperture and spread independent of template edits as long as the
    calibration is rebuilt.
    """

    def __init__(self, spec: dict):
        self.mcp = {f: tuple(spec["mcp"][f]) for f in FINGERS}
        self.dir_spread = {f: vnormalize(tuple(spec["dir_spread"][f])) for f in FINGERS}
        self.dir_together = {f: vnormalize(tuple(spec["dir_together"][f])) for f in FINGERS}
        self.lengths = {f: tuple(spec["lengths"][f]) for f in FINGERS}
        self.curl_max = {
            f: tuple(math.radians(a) for a in spec["curl_max_deg"][f]) for f in FINGERS
        }
        self.curl_ease = float(spec["curl_ease"])
        self.palm_slab_half_extents: Vec3 = tuple(spec["palm_slab_half_extents"])
        self._calibrate()

    def _calibrate(self) -> None:
        open_lm = self._pose_landmarks(0.0, 1.0)
        fist_lm = self._pose_landmarks(1.0, 0.0)
        together_lm = self._pose_landmarks(0.0, 0.0)
        pc = _palm_center_of(open_lm)
        self.d_open = {f: vdist(open_lm[TIP[f]], pc) for f in NON_THUMB}
        self.d_fist = {f: vdist(fist_lm[TIP[f]], _palm_center_of(fist_lm)) for f in NON_THUMB}
        self.chord_open = _spread_chords(open_lm)
        self.chord_together = _spread_chords(together_lm)

    def _finger_chain(self, finger: str, curl: float, spread: float) -> tuple[Vec3, ...]:
        base = self.mcp[finger]
        d_t, d_s = self.dir_together[finger], self.dir_spread[finger]
        d = vnormalize(
            (
                d_t[0] + (d_s[0] - d_t[0]) * spread,
                d_t[1] + (d_s[1] - d_t[1]) * spread,
                d_t[2] + (d_s[2] - d_t[2]) * spread,
            )
        )
        # curl rotates successive phalanxes about the finger's flexion axis,
        # easing the schedule so tip-to-palm distance falls roughly linearly
        eased = clamp(curl, 0.0, 1.0) ** self.curl_ease
        normal = (0.0, 0.0, 1.0)
        axis = vnormalize(vcross(d, normal))
        angles = self.curl_max[finger]
        pts = [base]
        total = 0.0
        p = base
        for seg_len, max_angle in zip(self.lengths[finger], angles):
            total += max_angle * eased
            c, s = math.cos(total), math.sin(total)
            # rotate d about axis by total (Rodrigues; axis is unit, d _|_ axis)
            seg_dir = vadd(vscale(d, c), vscale(vcross(axis, d), s))
            p = vadd(p, vscale(seg_dir, seg_len))
            pts.append(p)
        return tuple(pts)

    def _pose_landmarks(self, curl: float, spread: float) -> list[Vec3]:
        lm: list[Vec3] = [(0.0, 0.0, 0.0)] * LANDMARK_COUNT
        for f in FINGERS:
            chain = self._finger_chain(f, curl, spread)
            for k in range(4):
                lm[FINGER_BASE[f] + k] = chain[k]
        return lm

    def pose(
        self,
        curl: float = 0.0,
        spread: float = 1.0,
        position: Vec3 = (0.0, 0.0, 0.0),
        orientation: Quat = QUAT_IDENTITY,
        side: str = "right",
        timestamp: float = 0.0,
        per_finger_curl: dict[str, float] | None = None,
    ) -> HandFrame:
        """Generate a posed hand frame from the template.

        curl: 0 = open, 1 = fist. spread: 0 = fingers together, 1 = splayed.
        The frame is mirrored across x for the left hand, then rotated and
        translated into the world.
        """
        lm: list[Vec3] = [(0.0, 0.0, 0.0)] * LANDMARK_COUNT
        for f in FINGERS:
            c = per_finger_curl.get(f, curl) if per_finger_curl else curl
            chain = self._finger_chain(f, c, spread)
            for k in range(4):
                lm[FINGER_BASE[f] + k] = chain[k]
        if side == "left":
            lm = [(-p[0], p[1], p[2]) for p in lm]
        world = tuple(vadd(position, quat_rotate(orientation, p)) for p in lm)
        return HandFrame(
            side=side,
            landmarks=world,
            confidence=(1.0,) * LANDMARK_COUNT,
            timestamp=timestamp,
        )


def _palm_center_of(landmarks) -> Vec3:
    return vmean(
        [landmarks[WRIST], landmarks[MCP["index"]], landmarks[MCP["middle"]],
         landmarks[MCP["ring"]], landmarks[MCP["little"]]]
    )


_SPREAD_PAIRS = (("index", "middle"), ("middle", "ring"), ("ring", "little"))


def _spread_chords(landmarks) -> dict[tuple[str, str], float]:
    chords = {}
    for a, b in _SPREAD_PAIRS:
        ua = vnormalize(vsub(landmarks[TIP[a]], landmarks[MCP[a]]))
        ub = vnormalize(vsub(landmarks[TIP[b]], landmarks[MCP[b]]))
        chords[(a, b)] = vdist(ua, ub)
    return chords


def _load_template() -> HandTemplate:
    text = resources.files("omg.data").joinpath("hand_template.json").read_text()
    return HandTemplate(json.loads(text))


_TEMPLATE: HandTemplate | None = None


def template() -> HandTemplate:
    global _TEMPLATE
    if _TEMPLATE is None:
        _TEMPLATE = _load_template()
    return _TEMPLATE


def open_hand(**kw) -> HandFrame:
    return template().pose(curl=0.0, spread=1.0, **kw)


def fist(**kw) -> HandFrame:
    return template().pose(curl=1.0, spread=0.0, **kw)


def curled_hand(curl: float, spread: float | None = None, **kw) -> HandFrame:
    """Hand at the given curl; spread defaults to tracking hand openness."""
    if spread is None:
        spread = 1.0 - curl
    return template().pose(curl=curl, spread=spread, **kw)


# --- operations ---------------------------------------------------------------


def pose_metrics(frame: HandFrame) -> PoseMetrics:
    """Aperture, spread and the palm frame of a normalized hand frame.

    Scalars depend only on relative geometry; the palm vectors co-rotate
    with the hand. Raises DegenerateFrameError when the palm triangle
    collapses (all landmarks coincident or collinear).
    """
    tpl = template()
    lm = frame.landmarks
    wrist = lm[WRIST]
    u = vsub(lm[MCP["index"]], wrist)
    v = vsub(lm[MCP["little"]], wrist)
    n_raw = vcross(u, v) if frame.side == "right" else vcross(v, u)
    if vnorm(n_raw) < 1e-12:
        raise DegenerateFrameError("palm triangle is degenerate")
    normal = vnormalize(n_raw)
    d_raw = vsub(lm[MCP["middle"]], wrist)
    d_ortho = vsub(d_raw, vscale(normal, vdot(d_raw, normal)))  # Gram-Schmidt
    if vnorm(d_ortho) < 1e-12:
        raise DegenerateFrameError("palm direction is degenerate")
    direction = vnormalize(d_ortho)

    pc = _palm_center_of(lm)
    total = 0.0
    for f in NON_THUMB:
        d = vdist(lm[TIP[f]], pc)
        total += (d - tpl.d_fist[f]) / (tpl.d_open[f] - tpl.d_fist[f])
    aperture = clamp(total / len(NON_THUMB), 0.0, 1.0)

    # angular separation between adjacent fingers, measured as the chord
    # between unit mcp->tip directions (monotone in the angle, and free of
    # platform-dependent transcendentals)
    s_total = 0.0
    for pair in _SPREAD_PAIRS:
        a, b = pair
        ta, tb = vsub(lm[TIP[a]], lm[MCP[a]]), vsub(lm[TIP[b]], lm[MCP[b]])
        na, nb = vnorm(ta), vnorm(tb)
        if na < 1e-12 or nb < 1e-12:
            raise DegenerateFrameError("fingertip coincides with its knuckle")
        chord = vdist(vscale(ta, 1.0 / na), vscale(tb, 1.0 / nb))
        c0, c1 = tpl.chord_together[pair], tpl.chord_open[pair]
        s_total += (chord - c0) / (c1 - c0)
    spread = clamp(s_total / len(_SPREAD_PAIRS), 0.0, 1.0)

    return PoseMetrics(
        aperture=aperture,
        spread=spread,
        palm_normal=normal,
        palm_direction=direction,
        palm_center=pc,
    )


def normalize_frame(
    raw: RawSensorFrame,
    adapter: SensorAdapter,
    prev: HandFrame | None = None,
) -> HandFrame:
    """Map a sensor-native frame into the canonical hand model.

    Invalid landmarks take the previous frame's position (wrist position
    if there is no previous frame), with confidence 0.
    """
    adapter.validate(len(raw.landmarks))
    if not math.isfinite(raw.timestamp):
        raise FrameDecodeError("non-finite timestamp")
    if prev is not None and raw.timestamp < prev.timestamp:
        raise FrameDecodeError(
            f"timestamp regression: {raw.timestamp} < {prev.timestamp}"
        )

    decoded: list[Vec3] = []
    valid: list[bool] = []
    for i in range(LANDMARK_COUNT):
        j = adapter.index_map[i]
        p = raw.landmarks[j]
        if not (math.isfinite(p[0]) and math.isfinite(p[1]) and math.isfinite(p[2])):
            raise FrameDecodeError(f"non-finite raw coordinates at source index {j}")
        decoded.append(adapter.decode_point(p))
        valid.append(bool(raw.valid[j]))

    wrist_fallback = prev.landmarks[WRIST] if (prev and not valid[WRIST]) else decoded[WRIST]
    landmarks: list[Vec3] = []
    confidence: list[float] = []
    for i in range(LANDMARK_COUNT):
        if valid[i]:
            landmarks.append(decoded[i])
            confidence.append(1.0)
        else:
            if prev is not None:
                landmarks.append(prev.landmarks[i])
            elif i == WRIST:
                landmarks.append(decoded[WRIST])
            else:
                landmarks.append(wrist_fallback)
            confidence.append(0.0)

    return HandFrame(
        side=raw.side,
        landmarks=tuple(landmarks),
        confidence=tuple(confidence),
        timestamp=raw.timestamp,
    )


def encode_frame(frame: HandFrame, adapter: SensorAdapter) -> RawSensorFrame:
    """Express a canonical frame in a sensor's native convention (test aid)."""
    adapter.validate(LANDMARK_COUNT)
    raw_landmarks: list[Vec3] = [(0.0, 0.0, 0.0)] * LANDMARK_COUNT
    for i in range(LANDMARK_COUNT):
        raw_landmarks[adapter.index_map[i]] = adapter.encode_point(frame.landmarks[i])
    return RawSensorFrame(
        source_id="encoded",
        side=frame.side,
        landmarks=tuple(raw_landmarks),
        valid=(True,) * LANDMARK_COUNT,
        timestamp=frame.timestamp,
    )


def observe(
    true_frame: HandFrame,
    camera: CameraPose,
    noise_sigma: float = 0.0,
    seed: int = 0,
) -> RawSensorFrame:
    """Simulate an optical sensor looking at a hand.

    A landmark is flagged invalid when the palm slab sits between it and
    the camera, or when the hand is edge-on to the view axis (the
    intermediate and tip landmarks of the non-thumb fingers drop out).
    Seeded Gaussian noise is added to landmarks that remain valid.
    """
    if noise_sigma < 0.0:
        raise ValueError("noise_sigma must be >= 0")
    lm = true_frame.landmarks
    valid = [True] * LANDMARK_COUNT

    try:
        metrics = pose_metrics(true_frame)
    except DegenerateFrameError:
        metrics = None

    if metrics is not None:
        if abs(vdot(metrics.palm_normal, camera.view_axis)) <= EDGE_ON_THRESHOLD:
            for i in _EDGE_ON_DROPPED:
                valid[i] = False

        # palm slab occlusion: ray from camera to landmark vs oriented box
        n = metrics.palm_normal
        d = metrics.palm_direction
        s = vcross(d, n)
        center = metrics.palm_center
        half = template().palm_slab_half_extents
        for i in range(LANDMARK_COUNT):
            if i in _PALM_LANDMARKS or not valid[i]:
                continue
            origin_w = vsub(camera.position, center)
            dir_w = vsub(lm[i], camera.position)
            origin = (vdot(origin_w, s), vdot(origin_w, d), vdot(origin_w, n))
            direction = (vdot(dir_w, s), vdot(dir_w, d), vdot(dir_w, n))
            hit = ray_box_intersect(origin, direction, half)
            if hit is None:
                continue
            t0, t1 = hit
            # occluded only when the slab sits strictly between camera and
            # landmark, with the landmark well past the slab exit (joints
            # brushing the palm edge are part of the hand, not hidden by it)
            clearance = (1.0 - t1) * vnorm(dir_w)
            if t1 > 0.0 and t0 < t1 and t0 < 1.0 and clearance > 0.015:
                valid[i] = False

    rng = random.Random(seed)
    out: list[Vec3] = []
    for i in range(LANDMARK_COUNT):
        if valid[i] and noise_sigma > 0.0:
            out.append(
                (
                    lm[i][0] + rng.gauss(0.0, noise_sigma),
                    lm[i][1] + rng.gauss(0.0, noise_sigma),
                    lm[i][2] + rng.gauss(0.0, noise_sigma),
                )
            )
        else:
            out.append(lm[i])

    return RawSensorFrame(
        source_id=camera.preset,
        side=true_frame.side,
        landmarks=tuple(out),
        valid=tuple(valid),
        timestamp=true_frame.timestamp,
    )

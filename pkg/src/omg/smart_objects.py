"""Articulated virtual objects with exact primitive geometry.

Each object is a composition of primitives (sphere, box, capsule, cylinder)
posed in the object frame. Signed distance, closest surface point and
outward normal are exact per primitive; compositions take the min-distance
union. Articulation (button travel, lever detents, dial angle, blade angle,
plunger depth, bandage stretch/wrap, limb lift) is per kind, clamped to its
declared range, and emits edge-triggered events.

Everything here runs on plain floats so stepped worlds serialize
byte-identically across platforms.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .geometry import (
    Quat,
    QUAT_IDENTITY,
    Vec3,
    clamp,
    closest_point_on_segment,
    datan2,
    quat_conj,
    quat_rotate,
    rotation_between,
    vadd,
    vdot,
    vnorm,
    vnorm2,
    vnormalize,
    vscale,
    vsub,
)

ANCHORED = math.inf

# object kinds
PUSH_BUTTON = "push_button"
LEVER_SWITCH = "lever_switch"
ROTARY_DIAL = "rotary_dial"
BALL = "ball"
BAT = "bat"
SCISSORS = "scissors"
SYRINGE = "syringe"
BANDAGE = "bandage"
PATIENT_LIMB = "patient_limb"

ALL_KINDS = (
    PUSH_BUTTON, LEVER_SWITCH, ROTARY_DIAL, BALL, BAT,
    SCISSORS, SYRINGE, BANDAGE, PATIENT_LIMB,
)

# kinds that turn the hand into an instrument when grasped
INSTRUMENT_KINDS = frozenset({SCISSORS, SYRINGE, BAT, BANDAGE})

BUTTON_TRAVEL_M = 0.006
BUTTON_SPRING_SPEED = 0.05  # m/s return when undriven
DIAL_MAX_DEG = 270.0
BLADE_MAX_DEG = 30.0
PLUNGER_MAX_M = 0.040
BANDAGE_STRETCH_MAX = 1.6
LIMB_LIFT_MAX_DEG = 45.0
LIMB_RELAX_DEG_S = 40.0  # settle rate when the supporting hand leaves
WRAP_FULL_TURNS = 2.0  # wrap progress 1.0 after two full turns

_DEG = 180.0 / 3.141592653589793


class UnknownKindError(KeyError):
    pass


@dataclass(frozen=True)
class SurfaceHit:
    distance: float  # signed, negative inside
    point: Vec3  # closest point on the surface, world frame
    normal: Vec3  # outward unit normal, world frame


# --- primitives ---------------------------------------------------------------


@dataclass(frozen=True)
class Sphere:
    radius: float

    def query(self, p: Vec3) -> tuple[float, Vec3, Vec3]:
        r = vnorm(p)
        if r < 1e-15:
            return -self.radius, (self.radius, 0.0, 0.0), (1.0, 0.0, 0.0)
        n = (p[0] / r, p[1] / r, p[2] / r)
        return r - self.radius, vscale(n, self.radius), n

    def bound(self) -> float:
        return self.radius


@dataclass(frozen=True)
class Box:
    half_extents: Vec3

    def query(self, p: Vec3) -> tuple[float, Vec3, Vec3]:
        h = self.half_extents
        q = (abs(p[0]) - h[0], abs(p[1]) - h[1], abs(p[2]) - h[2])
        if q[0] > 0.0 or q[1] > 0.0 or q[2] > 0.0:
            cp = (clamp(p[0], -h[0], h[0]), clamp(p[1], -h[1], h[1]), clamp(p[2], -h[2], h[2]))
            d = vsub(p, cp)
            dist = vnorm(d)
            return dist, cp, (d[0] / dist, d[1] / dist, d[2] / dist)
        # inside: nearest face wins (ties resolve to the lowest axis index)
        axis = 0
        best = q[0]
        if q[1] > best:
            axis, best = 1, q[1]
        if q[2] > best:
            axis, best = 2, q[2]
        sign = 1.0 if p[axis] >= 0.0 else -1.0
        cp = list(p)
        cp[axis] = sign * h[axis]
        n = [0.0, 0.0, 0.0]
        n[axis] = sign
        return best, (cp[0], cp[1], cp[2]), (n[0], n[1], n[2])

    def bound(self) -> float:
        return vnorm(self.half_extents)


@dataclass(frozen=True)
class Capsule:
    half_length: float  # along local y
    radius: float

    def query(self, p: Vec3) -> tuple[float, Vec3, Vec3]:
        a = (0.0, -self.half_length, 0.0)
        b = (0.0, self.half_length, 0.0)
        c = closest_point_on_segment(a, b, p)
        v = vsub(p, c)
        r = vnorm(v)
        if r < 1e-15:
            n = (1.0, 0.0, 0.0)
        else:
            n = (v[0] / r, v[1] / r, v[2] / r)
        return r - self.radius, vadd(c, vscale(n, self.radius)), n

    def bound(self) -> float:
        return self.half_length + self.radius


@dataclass(frozen=True)
class Cylinder:
    half_length: float  # along local y, flat caps
    radius: float

    def query(self, p: Vec3) -> tuple[float, Vec3, Vec3]:
        rxz = math.sqrt(p[0] * p[0] + p[2] * p[2])
        sy = 1.0 if p[1] >= 0.0 else -1.0
        dr = rxz - self.radius
        dy = abs(p[1]) - self.half_length
        if rxz > 1e-15:
            radial = (p[0] / rxz, 0.0, p[2] / rxz)
        else:
            radial = (1.0, 0.0, 0.0)
        if dr > 0.0 and dy > 0.0:  # rim region
            cp = vadd(vscale(radial, self.radius), (0.0, sy * self.half_length, 0.0))
            d = vsub(p, cp)
            dist = vnorm(d)
            return dist, cp, (d[0] / dist, d[1] / dist, d[2] / dist)
        if dr > 0.0:  # beside the wall
            return dr, vadd(vscale(radial, self.radius), (0.0, p[1], 0.0)), radial
        if dy > 0.0:  # above/below a cap
            return dy, (p[0], sy * self.half_length, p[2]), (0.0, sy, 0.0)
        # inside
        if dr >= dy:
            return dr, vadd(vscale(radial, self.radius), (0.0, p[1], 0.0)), radial
        return dy, (p[0], sy * self.half_length, p[2]), (0.0, sy, 0.0)

    def bound(self) -> float:
        return math.sqrt(self.half_length * self.half_length + self.radius * self.radius)


Shape = Sphere | Box | Capsule | Cylinder


@dataclass
class PlacedPrimitive:
    shape: Shape
    offset: Vec3 = (0.0, 0.0, 0.0)
    orientation: Quat = QUAT_IDENTITY

    def query(self, p_obj: Vec3) -> tuple[float, Vec3, Vec3]:
        local = quat_rotate(quat_conj(self.orientation), vsub(p_obj, self.offset))
        dist, cp, n = self.shape.query(local)
        return (
            dist,
            vadd(self.offset, quat_rotate(self.orientation, cp)),
            quat_rotate(self.orientation, n),
        )

    def bound(self) -> float:
        return vnorm(self.offset) + self.shape.bound()


# --- articulation states -------------------------------------------------------


@dataclass
class ButtonState:
    depression: float = 0.0  # 0..travel
    pressed: bool = False
    travel: float = BUTTON_TRAVEL_M


@dataclass
class LeverState:
    detent_dirs: tuple[Vec3, ...] = ()  # unit vectors in the object y-z plane
    index: int = 0
    handle_dir: Vec3 = (0.0, 0.0, 1.0)


@dataclass
class DialState:
    angle_deg: float = 0.0  # 0..270
    moved: bool = False
    driven_last_tick: bool = False


@dataclass
class ScissorsState:
    blade_deg: float = 0.0  # 0..30
    last_actuation: float = 0.0  # for cut edge detection


@dataclass
class SyringeState:
    plunger_m: float = 0.0  # 0..0.04
    inject_armed: bool = True


@dataclass
class BandageState:
    stretch: float = 1.0  # 1.0..1.6
    wrap_progress: float = 0.0  # 0..1
    cut: bool = False
    rest_length: float = 0.12


@dataclass
class LimbState:
    forearm_dir: Vec3 = (0.0, 0.0, 1.0)  # unit, object frame
    rest_dir: Vec3 = (0.0, 0.0, 1.0)
    lift_deg: float = 0.0  # 0..45
    lifted_armed: bool = True


@dataclass
class RigidState:
    """No articulated degree of freedom (ball, bat)."""


Articulation = (
    ButtonState | LeverState | DialState | ScissorsState | SyringeState
    | BandageState | LimbState | RigidState
)


# --- smart object ---------------------------------------------------------------


@dataclass
class SmartObject:
    id: str
    kind: str
    position: Vec3 = (0.0, 0.0, 0.0)
    orientation: Quat = QUAT_IDENTITY
    mass: float = ANCHORED  # kg; math.inf = anchored
    hardness: float = 1.0  # 0..1
    graspable: bool = False
    articulation: Articulation = field(default_factory=RigidState)
    geometry: list[PlacedPrimitive] = field(default_factory=list)
    linear_velocity: Vec3 = (0.0, 0.0, 0.0)
    angular_velocity: Vec3 = (0.0, 0.0, 0.0)
    # resting on a tray/stand: skips gravity until a hand disturbs it
    # (the engine has no object-object collision by design)
    asleep: bool = False

    def __post_init__(self) -> None:
        if not (self.mass > 0.0):
            raise ValueError(f"{self.id}: mass must be positive or anchored (inf)")
        if not (0.0 <= self.hardness <= 1.0):
            raise ValueError(f"{self.id}: hardness {self.hardness} outside [0, 1]")
        qn = math.sqrt(sum(c * c for c in self.orientation))
        if abs(qn - 1.0) > 1e-9:
            raise ValueError(f"{self.id}: orientation quaternion not unit (|q| = {qn})")

    @property
    def anchored(self) -> bool:
        return math.isinf(self.mass)

    def bounding_radius(self) -> float:
        return max((g.bound() for g in self.geometry), default=0.0)

    def to_local(self, world_point: Vec3) -> Vec3:
        return quat_rotate(quat_conj(self.orientation), vsub(world_point, self.position))

    def to_world(self, local_point: Vec3) -> Vec3:
        return vadd(self.position, quat_rotate(self.orientation, local_point))


def surface_query(obj: SmartObject, point: Vec3) -> SurfaceHit:
    """Signed distance / closest point / outward normal, min-union over primitives."""
    if not obj.geometry:
        raise ValueError(f"{obj.id}: object has no geometry")
    p_obj = obj.to_local(point)
    best: tuple[float, Vec3, Vec3] | None = None
    for prim in obj.geometry:
        hit = prim.query(p_obj)
        if best is None or hit[0] < best[0]:
            best = hit
    dist, cp, n = best
    return SurfaceHit(
        distance=dist,
        point=obj.to_world(cp),
        normal=quat_rotate(obj.orientation, n),
    )


def support_min_y(obj: SmartObject) -> float:
    """Lowest world-space y over the object's geometry (for ground contact)."""
    lowest = math.inf
    for prim in obj.geometry:
        center = obj.to_world(prim.offset)
        q = _compose_quat(obj.orientation, prim.orientation)
        shape = prim.shape
        if isinstance(shape, Sphere):
            lo = center[1] - shape.radius
        elif isinstance(shape, Capsule):
            axis = quat_rotate(q, (0.0, 1.0, 0.0))
            lo = center[1] - abs(axis[1]) * shape.half_length - shape.radius
        elif isinstance(shape, Cylinder):
            axis = quat_rotate(q, (0.0, 1.0, 0.0))
            ay = abs(axis[1])
            rad = math.sqrt(max(0.0, 1.0 - ay * ay))
            lo = center[1] - ay * shape.half_length - rad * shape.radius
        else:  # Box
            h = shape.half_extents
            ex = quat_rotate(q, (1.0, 0.0, 0.0))
            ey = quat_rotate(q, (0.0, 1.0, 0.0))
            ez = quat_rotate(q, (0.0, 0.0, 1.0))
            lo = center[1] - (abs(ex[1]) * h[0] + abs(ey[1]) * h[1] + abs(ez[1]) * h[2])
        if lo < lowest:
            lowest = lo
    return lowest


def _compose_quat(a: Quat, b: Quat) -> Quat:
    from .geometry import quat_mul

    return quat_mul(a, b)


# --- articulation ---------------------------------------------------------------

# literal sin/cos of the lever detent half-angle (25 deg), frozen so no libm
# call happens at runtime
_SIN25 = 0.42261826174069944
_COS25 = 0.9063077870366499


def _lever_detents() -> tuple[Vec3, ...]:
    return ((0.0, -_SIN25, _COS25), (0.0, _SIN25, _COS25))


def articulate(obj: SmartObject, drive, dt: float) -> list[tuple[str, dict]]:
    """Advance one object's articulation by one tick.

    `drive` is kind-specific (None means undriven this tick):
      button   axial press depth in meters
      lever    desired handle direction, object frame
      dial     angular delta in degrees
      scissors tool actuation in [0, 1]
      syringe  tool actuation in [0, 1]
      bandage  (stretch_ratio | None, wrap_delta_rad | None)
      limb     desired forearm direction, object frame

    Returns edge-triggered events as (type, data) pairs.
    """
    if dt <= 0.0:
        raise ValueError("dt must be > 0")
    st = obj.articulation
    events: list[tuple[str, dict]] = []

    if obj.kind == PUSH_BUTTON:
        assert isinstance(st, ButtonState)
        if drive is not None:
            st.depression = clamp(drive, 0.0, st.travel)
            if st.depression >= st.travel - 1e-12 and not st.pressed:
                st.pressed = True
                events.append(("button_pressed", {"object": obj.id}))
        else:
            if st.depression > 0.0:
                st.depression = max(0.0, st.depression - BUTTON_SPRING_SPEED * dt)
            if st.pressed and st.depression == 0.0:
                st.pressed = False
                events.append(("button_released", {"object": obj.id}))

    elif obj.kind == LEVER_SWITCH:
        assert isinstance(st, LeverState)
        if drive is not None:
            d = (0.0, drive[1], drive[2])  # project onto the rotation plane
            if vnorm2(d) > 1e-12:
                st.handle_dir = vnormalize(d)
                nearest = max(
                    range(len(st.detent_dirs)),
                    key=lambda k: vdot(st.handle_dir, st.detent_dirs[k]),
                )
                if nearest != st.index:
                    st.index = nearest
                    events.append(("lever_toggled", {"object": obj.id, "index": st.index}))
        else:
            st.handle_dir = st.detent_dirs[st.index]
        _rebuild_lever_geometry(obj)

    elif obj.kind == ROTARY_DIAL:
        assert isinstance(st, DialState)
        if drive is not None:
            new_angle = clamp(st.angle_deg + drive, 0.0, DIAL_MAX_DEG)
            if new_angle != st.angle_deg:
                st.moved = True
            st.angle_deg = new_angle
            st.driven_last_tick = True
        else:
            if st.driven_last_tick and st.moved:
                events.append(("dial_set", {"object": obj.id, "angle_deg": st.angle_deg}))
                st.moved = False
            st.driven_last_tick = False

    elif obj.kind == SCISSORS:
        assert isinstance(st, ScissorsState)
        if drive is not None:
            st.blade_deg = clamp(BLADE_MAX_DEG * (1.0 - drive), 0.0, BLADE_MAX_DEG)

    elif obj.kind == SYRINGE:
        assert isinstance(st, SyringeState)
        if drive is not None:
            st.plunger_m = clamp(PLUNGER_MAX_M * drive, 0.0, PLUNGER_MAX_M)
            if st.plunger_m >= PLUNGER_MAX_M - 1e-12 and st.inject_armed:
                st.inject_armed = False
                events.append(("syringe_injected", {"object": obj.id}))
            elif st.plunger_m < 0.5 * PLUNGER_MAX_M:
                st.inject_armed = True

    elif obj.kind == BANDAGE:
        assert isinstance(st, BandageState)
        stretch_ratio, wrap_delta = drive if drive is not None else (None, None)
        if stretch_ratio is not None:
            st.stretch = clamp(stretch_ratio, 1.0, BANDAGE_STRETCH_MAX)
        if wrap_delta is not None:
            full = WRAP_FULL_TURNS * 2.0 * 3.141592653589793
            st.wrap_progress = clamp(st.wrap_progress + wrap_delta / full, 0.0, 1.0)

    elif obj.kind == PATIENT_LIMB:
        assert isinstance(st, LimbState)
        if drive is not None:
            d = (0.0, drive[1], drive[2])
            if vnorm2(d) > 1e-12:
                d = vnormalize(d)
                lift = datan2(d[1], d[2]) * _DEG  # angle above the rest direction
                lift = clamp(lift, 0.0, LIMB_LIFT_MAX_DEG)
                st.lift_deg = lift
                _set_limb_dir_from_lift(st)
                if st.lift_deg >= 40.0 and st.lifted_armed:
                    st.lifted_armed = False
                    events.append(("limb_lifted", {"object": obj.id, "lift_deg": st.lift_deg}))
                elif st.lift_deg < 20.0:
                    st.lifted_armed = True
        elif st.lift_deg > 0.0:
            # unsupported arm settles back to rest
            st.lift_deg = max(0.0, st.lift_deg - LIMB_RELAX_DEG_S * dt)
            _set_limb_dir_from_lift(st)
            if st.lift_deg < 20.0:
                st.lifted_armed = True
        _rebuild_limb_geometry(obj)

    elif obj.kind in (BALL, BAT):
        pass

    else:
        raise UnknownKindError(obj.kind)

    return events


def _set_limb_dir_from_lift(st: LimbState) -> None:
    # direction in the y-z plane at lift_deg above +z, built without trig:
    # tan(lift) from the deterministic angle via the half-angle identity is
    # overkill here; clamp guarantees the stored angle matches the direction
    # used for geometry within datan2 accuracy
    rad = st.lift_deg / _DEG
    # small fixed-order series for sin/cos (|rad| <= pi/4), deterministic
    r2 = rad * rad
    s = rad * (1.0 - r2 / 6.0 * (1.0 - r2 / 20.0 * (1.0 - r2 / 42.0 * (1.0 - r2 / 72.0))))
    c = 1.0 - r2 / 2.0 * (1.0 - r2 / 12.0 * (1.0 - r2 / 30.0 * (1.0 - r2 / 56.0)))
    st.forearm_dir = vnormalize((0.0, s, c))


def _rebuild_lever_geometry(obj: SmartObject) -> None:
    st = obj.articulation
    assert isinstance(st, LeverState)
    # geometry[0] is the base, geometry[1] the handle capsule
    handle = obj.geometry[1]
    pivot = (0.0, 0.0, 0.012)
    half_len = handle.shape.half_length
    handle.orientation = rotation_between((0.0, 1.0, 0.0), st.handle_dir)
    handle.offset = vadd(pivot, vscale(st.handle_dir, half_len))


def _rebuild_limb_geometry(obj: SmartObject) -> None:
    st = obj.articulation
    assert isinstance(st, LimbState)
    # geometry[0] upper segment (fixed), geometry[1] forearm rotating at the elbow
    forearm = obj.geometry[1]
    elbow = (0.0, 0.0, 0.0)
    half_len = forearm.shape.half_length
    forearm.orientation = rotation_between((0.0, 1.0, 0.0), st.forearm_dir)
    forearm.offset = vadd(elbow, vscale(st.forearm_dir, half_len))


# --- catalog ---------------------------------------------------------------------


def make_object(kind: str, object_id: str | None = None, **overrides) -> SmartObject:
    """Instantiate one smart object of the given kind with default constants."""
    oid = object_id or kind
    if kind == BALL:
        obj = SmartObject(
            id=oid, kind=kind, mass=0.057, hardness=0.6, graspable=True,
            articulation=RigidState(),
            geometry=[PlacedPrimitive(Sphere(0.0335))],
        )
    elif kind == BAT:
        obj = SmartObject(
            id=oid, kind=kind, mass=0.9, hardness=0.9, graspable=True,
            articulation=RigidState(),
            geometry=[PlacedPrimitive(Capsule(half_length=0.35, radius=0.03))],
        )
    elif kind == SCISSORS:
        obj = SmartObject(
            id=oid, kind=kind, mass=0.05, hardness=1.0, graspable=True,
            articulation=ScissorsState(),
            geometry=[
                PlacedPrimitive(Box((0.008, 0.065, 0.004)), offset=(0.0, 0.065, 0.0)),
                PlacedPrimitive(Box((0.018, 0.030, 0.006)), offset=(0.0, -0.025, 0.0)),
            ],
        )
    elif kind == SYRINGE:
        obj = SmartObject(
            id=oid, kind=kind, mass=0.02, hardness=0.8, graspable=True,
            articulation=SyringeState(),
            geometry=[
                PlacedPrimitive(Cylinder(half_length=0.05, radius=0.009)),
                PlacedPrimitive(Cylinder(half_length=0.015, radius=0.004), offset=(0.0, 0.062, 0.0)),
            ],
        )
    elif kind == PUSH_BUTTON:
        obj = SmartObject(
            id=oid, kind=kind, mass=ANCHORED, hardness=1.0, graspable=False,
            articulation=ButtonState(),
            geometry=[
                PlacedPrimitive(Box((0.030, 0.010, 0.030))),
                PlacedPrimitive(Cylinder(half_length=0.008, radius=0.012), offset=(0.0, 0.022, 0.0)),
            ],
        )
    elif kind == LEVER_SWITCH:
        detents = _lever_detents()
        obj = SmartObject(
            id=oid, kind=kind, mass=ANCHORED, hardness=1.0, graspable=False,
            articulation=LeverState(detent_dirs=detents, index=0, handle_dir=detents[0]),
            geometry=[
                PlacedPrimitive(Box((0.025, 0.025, 0.012))),
                PlacedPrimitive(Capsule(half_length=0.035, radius=0.007)),
            ],
        )
        _rebuild_lever_geometry(obj)
    elif kind == ROTARY_DIAL:
        obj = SmartObject(
            id=oid, kind=kind, mass=ANCHORED, hardness=1.0, graspable=False,
            articulation=DialState(),
            geometry=[
                # knob faces +z (mounted on a vertical panel)
                PlacedPrimitive(
                    Cylinder(half_length=0.012, radius=0.035),
                    orientation=(0.7071067811865476, 0.7071067811865476, 0.0, 0.0),
                ),
            ],
        )
    elif kind == BANDAGE:
        obj = SmartObject(
            id=oid, kind=kind, mass=0.01, hardness=0.1, graspable=True,
            articulation=BandageState(),
            geometry=[PlacedPrimitive(Capsule(half_length=0.030, radius=0.018),
                                      orientation=(0.7071067811865476, 0.0, 0.0, 0.7071067811865476))],
        )
    elif kind == PATIENT_LIMB:
        obj = SmartObject(
            id=oid, kind=kind, mass=ANCHORED, hardness=0.3, graspable=False,
            articulation=LimbState(),
            geometry=[
                # upper arm along -z from the elbow, forearm rotates at the elbow
                PlacedPrimitive(
                    Capsule(half_length=0.13, radius=0.045),
                    offset=(0.0, 0.0, -0.13),
                    orientation=(0.7071067811865476, 0.7071067811865476, 0.0, 0.0),
                ),
                PlacedPrimitive(Capsule(half_length=0.12, radius=0.04)),
            ],
        )
        _rebuild_limb_geometry(obj)
    else:
        raise UnknownKindError(kind)

    for key, value in overrides.items():
        setattr(obj, key, value)
    return obj


def catalog() -> list[SmartObject]:
    """The nine stock smart objects with documented masses and hardness."""
    return [make_object(kind) for kind in ALL_KINDS]


# --- JSON object-spec loading -----------------------------------------------------


_SHAPE_PARSERS = {
    "sphere": lambda s: Sphere(float(s["radius"])),
    "box": lambda s: Box(tuple(float(v) for v in s["half_extents"])),
    "capsule": lambda s: Capsule(float(s["half_length"]), float(s["radius"])),
    "cylinder": lambda s: Cylinder(float(s["half_length"]), float(s["radius"])),
}


def object_from_spec(spec: dict) -> SmartObject:
    """Build a SmartObject from a JSON object-spec entry.

    Unspecified fields fall back to the kind's defaults, so scenario files
    can place stock objects by kind alone or override any field.
    """
    kind = spec["kind"]
    if kind not in ALL_KINDS:
        raise UnknownKindError(kind)
    obj = make_object(kind, object_id=spec.get("id"))
    pose = spec.get("pose", {})
    if "position" in pose:
        obj.position = tuple(float(v) for v in pose["position"])
    if "orientation" in pose:
        obj.orientation = tuple(float(v) for v in pose["orientation"])
    if "mass" in spec:
        obj.mass = ANCHORED if spec["mass"] is None else float(spec["mass"])
    if "hardness" in spec:
        obj.hardness = float(spec["hardness"])
    if "graspable" in spec:
        obj.graspable = bool(spec["graspable"])
    if "geometry" in spec:
        obj.geometry = [
            PlacedPrimitive(
                shape=_SHAPE_PARSERS[g["shape"]](g),
                offset=tuple(float(v) for v in g.get("offset", (0.0, 0.0, 0.0))),
                orientation=tuple(float(v) for v in g.get("orientation", QUAT_IDENTITY)),
            )
            for g in spec["geometry"]
        ]
    SmartObject.__post_init__(obj)  # re-check invariants after overrides
    return obj


def load_objects(path: str | Path) -> list[SmartObject]:
    with open(path) as fh:
        specs = json.load(fh)
    return [object_from_spec(s) for s in specs]

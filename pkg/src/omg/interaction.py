"""The mediation core: contacts, stickiness, tools, forces, world stepping.

Hands routinely violate a virtual world by passing through things, so the
engine interprets intent instead of applying raw poses: penetrating
fingertips are projected back to object surfaces, a closing hand that
overshoots a graspable object is placed onto its surface (with hysteresis
between attach and release), and grasping an instrument turns the hand
into that instrument, actuated by overall hand aperture.

step() is a fixed-order, fixed-timestep pipeline over plain floats; given
the same world and inputs it produces byte-identical event logs on any
platform. Contact quantities (approach speed, penetration) are measured
on the raw input frame before any correction.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .events import Event
from .geometry import (
    Quat,
    QUAT_IDENTITY,
    Vec3,
    clamp,
    datan2,
    quat_conj,
    quat_from_basis,
    quat_integrate,
    quat_mul,
    quat_rotate,
    vadd,
    vcross,
    vdist,
    vdot,
    vnorm,
    vscale,
    vsub,
)
from .hand_model import (
    FINGERS,
    HandFrame,
    PoseMetrics,
    TIP,
    DegenerateFrameError,
    pose_metrics,
)
from . import smart_objects as so
from .smart_objects import SmartObject, surface_query, support_min_y

DT = 1.0 / 60.0
GRAVITY = 9.81
GROUND_RESTITUTION = 0.3
REST_SPEED = 0.05  # m/s; slower vertical bounces settle
GROUND_DRAG = 0.95  # horizontal damping while resting on the ground
CONTACT_EXIT_MARGIN = 0.001  # m; hysteresis against contact-event chatter
BROAD_PHASE_MARGIN = 0.12  # m; skip objects beyond reach this tick

REGIONS = ("palm",) + FINGERS


@dataclass(frozen=True)
class InteractionConfig:
    snap_distance: float = 0.02
    release_distance: float = 0.06
    overshoot_tolerance: float = 0.10
    grab_aperture: float = 0.4
    ungrasp_aperture: float = 0.55  # open-hand release for non-instrument grasps
    # a grab decelerates onto its target; sweeps faster than this near an
    # object are deliberate pass-bys and must not stick
    grab_settle_speed: float = 0.25
    drop_normal_down: float = 0.8
    drop_aperture: float = 0.85
    drop_spread: float = 0.7
    drop_dwell_s: float = 0.15
    a_open: float = 0.8
    a_closed: float = 0.2

    def __post_init__(self) -> None:
        if not (self.snap_distance < self.release_distance < self.overshoot_tolerance):
            raise ValueError("config requires snap < release < overshoot")
        if not (self.a_closed < self.a_open):
            raise ValueError("config requires a_closed < a_open")


# --- attachment / tool state ------------------------------------------------------


@dataclass(frozen=True)
class Detached:
    pass


@dataclass(frozen=True)
class Stuck:
    object_id: str
    anchor_local: Vec3  # on the object surface, object frame


@dataclass(frozen=True)
class Grasped:
    object_id: str
    grip_position: Vec3  # object pose relative to the palm frame
    grip_orientation: Quat


AttachState = Detached | Stuck | Grasped


@dataclass(frozen=True)
class FreeHand:
    pass


@dataclass(frozen=True)
class Holding:
    instrument_id: str
    actuation: float = 0.0  # 0 open .. 1 closed


ToolState = FreeHand | Holding


@dataclass(frozen=True)
class ContactEvent:
    side: str
    region: str
    object_id: str
    point: Vec3
    normal: Vec3
    approach_speed: float  # m/s along -normal at first contact
    penetration: float  # depth before correction, m
    t: float

    def __post_init__(self) -> None:
        if self.approach_speed < 0.0 or self.penetration < 0.0:
            raise ValueError("approach speed and penetration must be >= 0")


@dataclass
class _Touch:
    """One probe inside an object this tick, measured pre-correction."""

    side: str
    region: str
    object_id: str
    point: Vec3  # raw probe position
    surface_point: Vec3
    normal: Vec3
    penetration: float
    velocity: Vec3  # raw probe velocity


@dataclass
class HandSlot:
    """Per-hand mutable interaction state owned by the world."""

    side: str
    attach: AttachState = field(default_factory=Detached)
    tool: ToolState = field(default_factory=FreeHand)
    metrics: PoseMetrics | None = None
    frame: HandFrame | None = None  # corrected frame as rendered
    raw_frame: HandFrame | None = None  # input frame this tick
    prev_probes: dict[str, Vec3] = field(default_factory=dict)
    prev_palm: Vec3 | None = None
    prev_aperture: float | None = None
    palm_velocity: Vec3 = (0.0, 0.0, 0.0)
    palm_shift: Vec3 = (0.0, 0.0, 0.0)
    render_shift: Vec3 = (0.0, 0.0, 0.0)  # accumulated whole-hand correction
    active_contacts: set[tuple[str, str]] = field(default_factory=set)  # (region, object)
    drop_dwell: float = 0.0
    drop_fired: bool = False
    closing: bool = False  # aperture decreasing this tick (grab intent)
    pass_through: set[str] = field(default_factory=set)  # objects swept through
    prev_touch_points: dict[tuple[str, str], Vec3] = field(default_factory=dict)


# canonical grip poses: object pose relative to the palm frame
# (palm frame: origin at palm center, x across the palm, y along the
# fingers, z out of the palm)
_CANONICAL_GRIPS: dict[str, tuple[Vec3, Quat]] = {
    so.SCISSORS: ((0.0, 0.02, 0.015), QUAT_IDENTITY),
    so.SYRINGE: ((0.0, 0.0, 0.012), QUAT_IDENTITY),
    so.BAT: ((0.0, 0.25, 0.036), QUAT_IDENTITY),
    so.BANDAGE: ((0.0, 0.01, 0.024), QUAT_IDENTITY),
}

_SCISSOR_CUT_REACH = 0.06  # blade tip to bandage surface
_SCISSOR_CUT_ACTUATION = 0.9
_DEG = 180.0 / 3.141592653589793


class World:
    """Single-owner simulation state, stepped at a fixed tick."""

    def __init__(
        self,
        objects: list[SmartObject],
        config: InteractionConfig | None = None,
        dt: float = DT,
    ):
        ids = [o.id for o in objects]
        if len(set(ids)) != len(ids):
            raise ValueError("object ids must be unique")
        self.objects: dict[str, SmartObject] = {o.id: o for o in objects}
        self.config = config or InteractionConfig()
        self.dt = dt
        self.tick = 0
        self.hands: dict[str, HandSlot] = {}
        self._events: list[Event] = []

    @property
    def time(self) -> float:
        return self.tick * self.dt

    def object_ids(self) -> list[str]:
        return sorted(self.objects)

    def hand(self, side: str) -> HandSlot:
        if side not in self.hands:
            self.hands[side] = HandSlot(side=side)
        return self.hands[side]

    def _emit(self, type_: str, data: dict) -> None:
        self._events.append(Event(tick=self.tick, t=self.time, type=type_, data=data))

    # --- tick pipeline ---------------------------------------------------------

    def step(self, frames: list[HandFrame]) -> list[Event]:
        """Advance one tick. Order: metrics, contacts, stickiness, tools,
        articulation, forces, integration; returns the tick's events."""
        self.tick += 1
        self._events = []
        sides = sorted(f.side for f in frames)
        if len(sides) != len(set(sides)):
            raise ValueError("at most one frame per hand side")
        by_side = {f.side: f for f in frames}

        touches: list[_Touch] = []
        for side in sides:
            slot = self.hand(side)
            slot.raw_frame = by_side[side]
            slot.frame = by_side[side]
            slot.render_shift = (0.0, 0.0, 0.0)
            try:
                slot.metrics = pose_metrics(slot.raw_frame)
            except DegenerateFrameError:
                pass  # hold the previous metrics
            if slot.metrics is None:
                continue
            self._update_palm_velocity(slot)
            self._update_drop_pose(slot)
            touches.extend(self._resolve_contacts(slot))

        for side in sides:
            slot = self.hand(side)
            if slot.metrics is None:
                continue
            self._stickiness_update(slot)
            self._tool_update(slot)

        self._articulate_all(touches)
        self._apply_hand_forces(touches)
        self._integrate()

        # objects may have moved since the contact pass (impulses, gravity);
        # re-correct the rendered hands so nothing ends the tick sunk into a
        # surface
        for side in sides:
            slot = self.hand(side)
            if slot.metrics is not None:
                self._final_correction(slot)

        for side in sides:  # bookkeeping for next tick's contact velocities
            slot = self.hand(side)
            slot.prev_touch_points = {
                (t.region, t.object_id): t.point for t in touches if t.side == side
            }

        events, self._events = self._events, []
        return events

    # --- contacts ----------------------------------------------------------------

    def _probe_points(self, frame: HandFrame, metrics: PoseMetrics) -> dict[str, Vec3]:
        probes = {"palm": metrics.palm_center}
        for f in FINGERS:
            probes[f] = frame.landmarks[TIP[f]]
        return probes

    def _excluded_object(self, slot: HandSlot) -> str | None:
        if isinstance(slot.attach, Grasped):
            return slot.attach.object_id
        if isinstance(slot.tool, Holding):
            return slot.tool.instrument_id
        return None

    def _near(self, point: Vec3, obj: SmartObject) -> bool:
        return vdist(point, obj.position) <= obj.bounding_radius() + BROAD_PHASE_MARGIN

    def _resolve_contacts(self, slot: HandSlot) -> list[_Touch]:
        """Detect probe penetrations on the raw frame, emit edge-triggered
        contact events, and build the corrected frame."""
        frame = slot.raw_frame
        probes = self._probe_points(frame, slot.metrics)
        prev = slot.prev_probes
        slot.prev_probes = dict(probes)
        excluded = self._excluded_object(slot)

        touches: list[_Touch] = []
        still_active: set[tuple[str, str]] = set()
        for region in REGIONS:
            p = probes[region]
            if region in prev:
                velocity = vscale(vsub(p, prev[region]), 1.0 / self.dt)
            else:
                velocity = (0.0, 0.0, 0.0)
            for oid in self.object_ids():
                if oid == excluded:
                    continue
                obj = self.objects[oid]
                if not self._near(p, obj):
                    continue
                hit = surface_query(obj, p)
                key = (region, oid)
                if hit.distance < CONTACT_EXIT_MARGIN and key in slot.active_contacts:
                    still_active.add(key)
                if hit.distance < 0.0:
                    touches.append(
                        _Touch(slot.side, region, oid, p, hit.point, hit.normal,
                               -hit.distance, velocity)
                    )
                    if key not in slot.active_contacts:
                        approach = max(0.0, -vdot(velocity, hit.normal))
                        self._emit(
                            "contact",
                            {
                                "side": slot.side,
                                "region": region,
                                "object": oid,
                                "point": list(hit.point),
                                "normal": list(hit.normal),
                                "approach_speed": approach,
                                "penetration": -hit.distance,
                            },
                        )
                    still_active.add(key)
        slot.active_contacts = still_active

        # corrections: palm penetration shifts the whole hand, then offending
        # fingertips are projected individually
        landmarks = list(frame.landmarks)
        palm_touches = [t for t in touches if t.region == "palm"]
        slot.palm_shift = (0.0, 0.0, 0.0)
        if palm_touches:
            deepest = max(palm_touches, key=lambda t: t.penetration)
            slot.palm_shift = vsub(deepest.surface_point, deepest.point)
            slot.render_shift = vadd(slot.render_shift, slot.palm_shift)
            landmarks = [vadd(p, slot.palm_shift) for p in landmarks]
        corrected = replace(frame, landmarks=tuple(landmarks))
        slot.frame = self._project_fingertips(corrected)
        return touches

    def _project_fingertips(self, frame: HandFrame) -> HandFrame:
        """Push penetrating fingertips back to the nearest surface.

        Applies to held objects as well: fingers wrap a grasped object's
        contours rather than sinking into it.
        """
        landmarks = list(frame.landmarks)
        changed = False
        for region in FINGERS:
            idx = TIP[region]
            p = landmarks[idx]
            for _ in range(2):  # a second pass settles multi-object overlaps
                worst = None
                for oid in self.object_ids():
                    obj = self.objects[oid]
                    if not self._near(p, obj):
                        continue
                    hit = surface_query(obj, p)
                    if hit.distance < 0.0 and (worst is None or hit.distance < worst.distance):
                        worst = hit
                if worst is None:
                    break
                p = worst.point
                changed = True
            landmarks[idx] = p
        if not changed:
            return frame
        return replace(frame, landmarks=tuple(landmarks))

    # --- stickiness ----------------------------------------------------------------

    def _update_palm_velocity(self, slot: HandSlot) -> None:
        pc = slot.metrics.palm_center
        if slot.prev_palm is not None:
            slot.palm_velocity = vscale(vsub(pc, slot.prev_palm), 1.0 / self.dt)

    def _update_drop_pose(self, slot: HandSlot) -> None:
        m = slot.metrics
        pose_ok = (
            vdot(m.palm_normal, (0.0, -1.0, 0.0)) >= self.config.drop_normal_down
            and m.aperture >= self.config.drop_aperture
            and m.spread >= self.config.drop_spread
        )
        fired = False
        if pose_ok:
            before = slot.drop_dwell
            slot.drop_dwell = before + self.dt
            fired = before < self.config.drop_dwell_s <= slot.drop_dwell
        else:
            slot.drop_dwell = 0.0
        slot.drop_fired = fired

    def _stickiness_update(self, slot: HandSlot) -> None:
        cfg = self.config
        attach = slot.attach
        m = slot.metrics
        palm = m.palm_center  # the true (uncorrected) palm path drives intent
        slot.closing = self._aperture_closing(slot)

        if isinstance(attach, Detached):
            if slot.closing:
                for oid in self.object_ids():
                    obj = self.objects[oid]
                    if not obj.graspable or self._held_by_other(oid, slot.side):
                        continue
                    entered, anchor = self._sweep_attach(slot, obj)
                    if anchor is not None:
                        slot.attach = Stuck(object_id=oid, anchor_local=obj.to_local(anchor))
                        slot.pass_through.discard(oid)
                        self._emit("stuck", {"side": slot.side, "object": oid})
                        self._place_hand_at(slot, anchor)
                        if m.aperture <= cfg.grab_aperture:
                            # hand is already closed enough: grab in the same tick
                            grip_p, grip_q = self._grip_transform(slot, obj)
                            slot.attach = Grasped(object_id=oid, grip_position=grip_p,
                                                  grip_orientation=grip_q)
                            obj.asleep = False
                            self._emit("grasped", {"side": slot.side, "object": oid})
                        break
                    if entered:
                        slot.pass_through.add(oid)
            # a closing sweep that went through/past an object and is now well
            # beyond it was a failed grab
            for oid in sorted(slot.pass_through):
                obj = self.objects.get(oid)
                if obj is None:
                    slot.pass_through.discard(oid)
                    continue
                d = surface_query(obj, palm).distance
                if d > cfg.release_distance:
                    slot.pass_through.discard(oid)
                    self._emit("grab_failed", {"side": slot.side, "object": oid,
                                               "beyond_m": d})

        elif isinstance(attach, Stuck):
            obj = self.objects.get(attach.object_id)
            if obj is None:
                slot.attach = Detached()
                self._emit("warning", {"side": slot.side,
                                       "message": f"attached object {attach.object_id} vanished"})
            else:
                anchor_world = obj.to_world(attach.anchor_local)
                if slot.drop_fired or vdist(palm, anchor_world) > cfg.release_distance:
                    slot.attach = Detached()
                    self._emit("released", {
                        "side": slot.side, "object": obj.id,
                        "reason": "drop_pose" if slot.drop_fired else "retreat",
                    })
                elif m.aperture <= cfg.grab_aperture:
                    grip_p, grip_q = self._grip_transform(slot, obj)
                    slot.attach = Grasped(object_id=obj.id, grip_position=grip_p,
                                          grip_orientation=grip_q)
                    obj.asleep = False
                    self._emit("grasped", {"side": slot.side, "object": obj.id})
                else:
                    self._place_hand_at(slot, anchor_world)

        elif isinstance(attach, Grasped):
            obj = self.objects.get(attach.object_id)
            if obj is None:
                slot.attach = Detached()
                self._emit("warning", {"side": slot.side,
                                       "message": f"grasped object {attach.object_id} vanished"})
            else:
                instrument = obj.kind in so.INSTRUMENT_KINDS
                open_release = (not instrument) and m.aperture >= cfg.ungrasp_aperture
                if slot.drop_fired or open_release:
                    self._release_object(slot, obj,
                                         "drop_pose" if slot.drop_fired else "hand_opened")
                elif not instrument:
                    # kinematic transport: the object rides the palm frame
                    palm_p, palm_q = self._palm_pose(slot)
                    obj.position = vadd(palm_p, quat_rotate(palm_q, attach.grip_position))
                    obj.orientation = quat_mul(palm_q, attach.grip_orientation)
                    obj.linear_velocity = slot.palm_velocity
                    obj.angular_velocity = (0.0, 0.0, 0.0)

        slot.prev_aperture = m.aperture
        slot.prev_palm = m.palm_center

    def _aperture_closing(self, slot: HandSlot) -> bool:
        return (
            slot.prev_aperture is not None
            and slot.metrics.aperture < slot.prev_aperture - 1e-9
        )

    def _sweep_attach(self, slot: HandSlot, obj: SmartObject):
        """Should this closing hand stick to this object right now?

        Returns (entered, anchor). The anchor is the surface point to place
        the hand onto; it is set when the palm has settled (slow) within the
        snap distance or inside the object up to the overshoot tolerance.
        `entered` reports that the palm is inside or swept through this tick
        (the makings of a failed grab when it never settles).
        """
        cfg = self.config
        palm = slot.metrics.palm_center
        reach = obj.bounding_radius() + cfg.overshoot_tolerance + 0.05
        near_now = vdist(palm, obj.position) <= reach
        near_prev = slot.prev_palm is not None and vdist(slot.prev_palm, obj.position) <= reach
        if not near_now and not near_prev:
            return False, None
        hit = surface_query(obj, palm)
        settled = vnorm(slot.palm_velocity) <= cfg.grab_settle_speed
        if 0.0 <= hit.distance <= cfg.snap_distance:
            return False, (hit.point if settled else None)
        if hit.distance < 0.0:
            depth = -hit.distance
            if depth <= cfg.overshoot_tolerance and settled:
                return True, hit.point
            return True, None
        if slot.prev_palm is None:
            return False, None
        # fast sweeps can tunnel straight through between ticks
        for k in range(1, 33):
            q = vadd(slot.prev_palm, vscale(vsub(palm, slot.prev_palm), k / 32.0))
            if surface_query(obj, q).distance < 0.0:
                return True, None
        return False, None

    def _held_by_other(self, object_id: str, side: str) -> bool:
        for other_side in sorted(self.hands):
            if other_side == side:
                continue
            other = self.hands[other_side].attach
            if isinstance(other, (Stuck, Grasped)) and other.object_id == object_id:
                return True
        return False

    def _palm_pose(self, slot: HandSlot) -> tuple[Vec3, Quat]:
        m = slot.metrics
        ex = vcross(m.palm_direction, m.palm_normal)
        q = quat_from_basis(ex, m.palm_direction, m.palm_normal)
        return m.palm_center, q

    def _grip_transform(self, slot: HandSlot, obj: SmartObject) -> tuple[Vec3, Quat]:
        palm_p, palm_q = self._palm_pose(slot)
        inv = quat_conj(palm_q)
        return (
            quat_rotate(inv, vsub(obj.position, palm_p)),
            quat_mul(inv, obj.orientation),
        )

    def _place_hand_at(self, slot: HandSlot, anchor_world: Vec3) -> None:
        """Translate the rendered hand so the palm center rests on the anchor."""
        rendered_pc = vadd(slot.metrics.palm_center, slot.render_shift)
        shift = vsub(anchor_world, rendered_pc)
        slot.render_shift = vadd(slot.render_shift, shift)
        frame = replace(
            slot.frame,
            landmarks=tuple(vadd(p, shift) for p in slot.frame.landmarks),
        )
        slot.frame = self._project_fingertips(frame)

    def _final_correction(self, slot: HandSlot) -> None:
        for _ in range(2):
            pc = vadd(slot.metrics.palm_center, slot.render_shift)
            deepest = None
            for oid in self.object_ids():
                obj = self.objects[oid]
                if not self._near(pc, obj):
                    continue
                hit = surface_query(obj, pc)
                if hit.distance < 0.0 and (deepest is None or hit.distance < deepest.distance):
                    deepest = hit
            if deepest is None:
                break
            shift = vsub(deepest.point, pc)
            slot.render_shift = vadd(slot.render_shift, shift)
            slot.frame = replace(
                slot.frame,
                landmarks=tuple(vadd(p, shift) for p in slot.frame.landmarks),
            )
        slot.frame = self._project_fingertips(slot.frame)

    def _release_object(self, slot: HandSlot, obj: SmartObject, reason: str) -> None:
        slot.attach = Detached()
        obj.asleep = False
        obj.linear_velocity = slot.palm_velocity
        self._emit("released", {"side": slot.side, "object": obj.id, "reason": reason,
                                "velocity": list(slot.palm_velocity)})
        if isinstance(slot.tool, Holding) and slot.tool.instrument_id == obj.id:
            slot.tool = FreeHand()
            self._emit("tool_dropped", {"side": slot.side, "object": obj.id,
                                        "reason": reason})

    # --- tool abstraction -------------------------------------------------------------

    def actuation_for(self, aperture: float) -> float:
        cfg = self.config
        return clamp((cfg.a_open - aperture) / (cfg.a_open - cfg.a_closed), 0.0, 1.0)

    def _tool_update(self, slot: HandSlot) -> None:
        attach = slot.attach
        if isinstance(slot.tool, FreeHand):
            if isinstance(attach, Grasped):
                obj = self.objects.get(attach.object_id)
                if obj is not None and obj.kind in so.INSTRUMENT_KINDS:
                    slot.tool = Holding(instrument_id=obj.id,
                                        actuation=self.actuation_for(slot.metrics.aperture))
                    self._emit("tool_held", {"side": slot.side, "object": obj.id,
                                             "kind": obj.kind})
                    self._track_instrument(slot, obj)
            return

        tool = slot.tool
        obj = self.objects.get(tool.instrument_id)
        still_attached = isinstance(attach, Grasped) and attach.object_id == tool.instrument_id
        if obj is None or not still_attached:
            slot.tool = FreeHand()
            return
        slot.tool = Holding(instrument_id=tool.instrument_id,
                            actuation=self.actuation_for(slot.metrics.aperture))
        self._track_instrument(slot, obj)

    def _track_instrument(self, slot: HandSlot, obj: SmartObject) -> None:
        # the instrument simply tracks hand position and orientation
        palm_p, palm_q = self._palm_pose(slot)
        grip_p, grip_q = _CANONICAL_GRIPS[obj.kind]
        obj.position = vadd(palm_p, quat_rotate(palm_q, grip_p))
        obj.orientation = quat_mul(palm_q, grip_q)
        obj.linear_velocity = slot.palm_velocity
        obj.angular_velocity = (0.0, 0.0, 0.0)

    # --- articulation drive -------------------------------------------------------------

    def _articulate_all(self, touches: list[_Touch]) -> None:
        by_object: dict[str, list[_Touch]] = {}
        for t in touches:
            by_object.setdefault(t.object_id, []).append(t)

        held_actuation: dict[str, float] = {}
        for side in sorted(self.hands):
            slot = self.hands[side]
            if isinstance(slot.tool, Holding):
                held_actuation[slot.tool.instrument_id] = slot.tool.actuation

        scissor_cut_checks: list[SmartObject] = []
        for oid in self.object_ids():
            obj = self.objects[oid]
            drive = None
            if obj.kind in (so.SCISSORS, so.SYRINGE):
                drive = held_actuation.get(oid)
                if obj.kind == so.SCISSORS and drive is not None:
                    st = obj.articulation
                    if st.last_actuation < _SCISSOR_CUT_ACTUATION <= drive:
                        scissor_cut_checks.append(obj)
                    st.last_actuation = drive
            elif obj.kind == so.PUSH_BUTTON:
                drive = self._button_drive(obj, by_object.get(oid, []))
            elif obj.kind == so.LEVER_SWITCH:
                drive = self._lever_drive(obj, by_object.get(oid, []))
            elif obj.kind == so.ROTARY_DIAL:
                drive = self._dial_drive(obj, by_object.get(oid, []))
            elif obj.kind == so.PATIENT_LIMB:
                drive = self._limb_drive(obj, by_object.get(oid, []))
            elif obj.kind == so.BANDAGE:
                drive = self._bandage_drive(obj)
            for type_, data in so.articulate(obj, drive, self.dt):
                self._emit(type_, data)

        for scissors in scissor_cut_checks:
            self._try_cut(scissors)

    def _button_drive(self, obj: SmartObject, touches: list[_Touch]) -> float | None:
        axis = quat_rotate(obj.orientation, (0.0, 1.0, 0.0))
        best = None
        for t in touches:
            depth = t.penetration * max(0.0, vdot(t.normal, axis))
            if depth > 0.0 and (best is None or depth > best):
                best = depth
        return best

    def _touch_mean_point(self, touches: list[_Touch]) -> Vec3 | None:
        if not touches:
            return None
        pts = [t.point for t in sorted(touches, key=lambda t: (t.side, t.region))]
        n = float(len(pts))
        return (
            sum(p[0] for p in pts) / n,
            sum(p[1] for p in pts) / n,
            sum(p[2] for p in pts) / n,
        )

    def _lever_drive(self, obj: SmartObject, touches: list[_Touch]):
        p = self._touch_mean_point(touches)
        if p is None:
            return None
        return vsub(obj.to_local(p), (0.0, 0.0, 0.012))  # direction from the pivot

    def _dial_drive(self, obj: SmartObject, touches: list[_Touch]) -> float | None:
        """Mean angular delta (degrees) of persisting touches about the knob axis."""
        if not touches:
            return None
        total = 0.0
        count = 0
        for t in sorted(touches, key=lambda t: (t.side, t.region)):
            slot = self.hands.get(t.side)
            prev = slot.prev_touch_points.get((t.region, t.object_id)) if slot else None
            if prev is None:
                continue
            p0 = obj.to_local(prev)
            p1 = obj.to_local(t.point)
            u0, u1 = (p0[0], p0[1]), (p1[0], p1[1])  # knob axis is object +z
            if (u0[0] ** 2 + u0[1] ** 2) < 1e-10 or (u1[0] ** 2 + u1[1] ** 2) < 1e-10:
                continue
            cross = u0[0] * u1[1] - u0[1] * u1[0]
            dot = u0[0] * u1[0] + u0[1] * u1[1]
            total += datan2(cross, dot) * _DEG
            count += 1
        if count == 0:
            return 0.0  # touched but not yet rotating still counts as driven
        return total / count

    def _limb_drive(self, obj: SmartObject, touches: list[_Touch]):
        # only supporting touches lift the arm: contact normal pointing down
        # means the finger is under the limb, not pressing on top of it
        supporting = [t for t in touches if t.normal[1] < -0.2]
        p = self._touch_mean_point(supporting)
        if p is None:
            return None
        local = obj.to_local(p)
        if local[2] < 0.02:  # touching the fixed upper segment, not the forearm
            return None
        return local  # desired forearm direction from the elbow at the origin

    def _bandage_drive(self, obj: SmartObject):
        holders = [
            self.hands[s] for s in sorted(self.hands)
            if isinstance(self.hands[s].attach, (Stuck, Grasped))
            and self.hands[s].attach.object_id == obj.id
            and self.hands[s].metrics is not None
        ]
        stretch = None
        wrap_delta = None
        if len(holders) == 2:
            d = vdist(holders[0].metrics.palm_center, holders[1].metrics.palm_center)
            stretch = d / obj.articulation.rest_length
        if holders:
            limb = next(
                (self.objects[oid] for oid in self.object_ids()
                 if self.objects[oid].kind == so.PATIENT_LIMB),
                None,
            )
            if limb is not None:
                slot = holders[0]
                if slot.prev_palm is not None:
                    p0 = limb.to_local(slot.prev_palm)
                    p1 = limb.to_local(slot.metrics.palm_center)
                    u0, u1 = (p0[0], p0[1]), (p1[0], p1[1])  # plane normal to the limb axis
                    if (u0[0] ** 2 + u0[1] ** 2) > 1e-10 and (u1[0] ** 2 + u1[1] ** 2) > 1e-10:
                        cross = u0[0] * u1[1] - u0[1] * u1[0]
                        dot = u0[0] * u1[0] + u0[1] * u1[1]
                        wrap_delta = abs(datan2(cross, dot))
        if stretch is None and wrap_delta is None:
            return None
        return (stretch, wrap_delta)

    def _try_cut(self, scissors: SmartObject) -> None:
        tip = scissors.to_world((0.0, 0.13, 0.0))
        for oid in self.object_ids():
            obj = self.objects[oid]
            if obj.kind != so.BANDAGE or obj.articulation.cut:
                continue
            if surface_query(obj, tip).distance <= _SCISSOR_CUT_REACH:
                obj.articulation.cut = True
                self._emit("bandage_cut", {"object": oid, "by": scissors.id})

    # --- forces and integration -----------------------------------------------------------

    def _held_object_ids(self) -> set[str]:
        held = set()
        for slot in self.hands.values():
            if isinstance(slot.attach, Grasped):
                held.add(slot.attach.object_id)
            if isinstance(slot.tool, Holding):
                held.add(slot.tool.instrument_id)
        return held

    def _apply_hand_forces(self, touches: list[_Touch]) -> None:
        """Impulse j = m * dv along the contact normal, pushing only."""
        held = self._held_object_ids()
        for t in sorted(touches, key=lambda t: (t.object_id, t.side, t.region)):
            obj = self.objects[t.object_id]
            if obj.anchored or obj.id in held:
                continue  # anchored objects absorb impulses as articulation drive
            slot = self.hands[t.side]
            attach = slot.attach
            if isinstance(attach, (Stuck, Grasped)) and attach.object_id == obj.id:
                continue  # a hand resting on its attached object does not kick it
            if slot.closing and obj.graspable:
                continue  # grab intent: a closing hand does not bat things away
            r = vsub(t.surface_point, obj.position)
            v_obj = vadd(obj.linear_velocity, vcross(obj.angular_velocity, r))
            closing = vdot(vsub(t.velocity, v_obj), vscale(t.normal, -1.0))
            if closing <= 0.0:
                continue  # pushing only, never pulling
            dv = vscale(t.normal, -closing)
            obj.asleep = False
            obj.linear_velocity = vadd(obj.linear_velocity, dv)
            # torque from off-center contact; bounding-sphere inertia
            radius = obj.bounding_radius()
            inertia = 0.4 * obj.mass * radius * radius
            if inertia > 0.0:
                torque = vcross(r, vscale(dv, obj.mass))
                obj.angular_velocity = vadd(
                    obj.angular_velocity, vscale(torque, 1.0 / inertia)
                )

    def _integrate(self) -> None:
        held = self._held_object_ids()
        dt = self.dt
        for oid in self.object_ids():
            obj = self.objects[oid]
            if obj.anchored or oid in held or obj.asleep:
                continue
            v = obj.linear_velocity
            # closed-form constant-acceleration step keeps ballistics exact
            obj.position = (
                obj.position[0] + v[0] * dt,
                obj.position[1] + v[1] * dt - 0.5 * GRAVITY * dt * dt,
                obj.position[2] + v[2] * dt,
            )
            obj.linear_velocity = (v[0], v[1] - GRAVITY * dt, v[2])
            if obj.angular_velocity != (0.0, 0.0, 0.0):
                obj.orientation = quat_integrate(obj.orientation, obj.angular_velocity, dt)
            low = support_min_y(obj)
            if low < 0.0:
                obj.position = (obj.position[0], obj.position[1] - low, obj.position[2])
                vy = obj.linear_velocity[1]
                if vy < 0.0:
                    vy = -GROUND_RESTITUTION * vy
                    if vy < REST_SPEED:
                        vy = 0.0
                obj.linear_velocity = (
                    obj.linear_velocity[0] * GROUND_DRAG,
                    vy,
                    obj.linear_velocity[2] * GROUND_DRAG,
                )
                obj.angular_velocity = vscale(obj.angular_velocity, GROUND_DRAG)

    # --- introspection -----------------------------------------------------------------

    def snapshot(self) -> dict:
        """World view for the session protocol (objects, hands, articulation)."""
        objects = []
        for oid in self.object_ids():
            obj = self.objects[oid]
            entry = {
                "id": obj.id,
                "kind": obj.kind,
                "position": list(obj.position),
                "orientation": list(obj.orientation),
            }
            art = obj.articulation
            if isinstance(art, so.ButtonState):
                entry["depression"] = art.depression
            elif isinstance(art, so.LeverState):
                entry["index"] = art.index
            elif isinstance(art, so.DialState):
                entry["angle_deg"] = art.angle_deg
            elif isinstance(art, so.ScissorsState):
                entry["blade_deg"] = art.blade_deg
            elif isinstance(art, so.SyringeState):
                entry["plunger_m"] = art.plunger_m
            elif isinstance(art, so.BandageState):
                entry["stretch"] = art.stretch
                entry["wrap_progress"] = art.wrap_progress
                entry["cut"] = art.cut
            elif isinstance(art, so.LimbState):
                entry["lift_deg"] = art.lift_deg
            objects.append(entry)
        hands = []
        for side in sorted(self.hands):
            slot = self.hands[side]
            if slot.frame is None or slot.metrics is None:
                continue
            attach = slot.attach
            tool = slot.tool
            hands.append(
                {
                    "side": side,
                    "landmarks": [list(p) for p in slot.frame.landmarks],
                    "aperture": slot.metrics.aperture,
                    "attach": type(attach).__name__.lower(),
                    "attached_object": getattr(attach, "object_id", None),
                    "tool": tool.instrument_id if isinstance(tool, Holding) else None,
                    "actuation": tool.actuation if isinstance(tool, Holding) else None,
                }
            )
        return {"tick": self.tick, "t": self.time, "objects": objects, "hands": hands}

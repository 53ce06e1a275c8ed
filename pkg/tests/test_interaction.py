import math
import random

import pytest

from omg import smart_objects as so
from omg.events import event_line
from omg.geometry import quat_rotate, vadd, vdist, vscale, vsub
from omg.hand_model import TIP, pose_metrics, template
from omg.interaction import (
    DT,
    Detached,
    Grasped,
    GRAVITY,
    Holding,
    Stuck,
    World,
)
from omg.pointer_input import PALM_DOWN_FORWARD, hand_from_pointer


def ease(u: float) -> float:
    u = min(max(u, 0.0), 1.0)
    return u * u * (3.0 - 2.0 * u)


def grab_script(surface_y, depth, n=30, close_to=0.5):
    """Decelerating descent ending `depth` below the surface, closing all along."""
    script = []
    for k in range(n):
        u = ease(k / (n - 1))
        y = surface_y + 0.08 - (0.08 + depth) * u
        aperture = 1.0 - (1.0 - close_to) * (k / (n - 1))
        script.append(((0.0, y, 0.4), aperture))
    return script


def palm_down_hand(palm, curl, t, aperture=None):
    """Hand posed palm-down with its palm center at `palm`."""
    if aperture is not None:
        return hand_from_pointer("right", palm, aperture, t,
                                 orientation=PALM_DOWN_FORWARD)
    from omg.pointer_input import palm_center_offset

    tpl = template()
    wrist = vsub(palm, quat_rotate(PALM_DOWN_FORWARD, palm_center_offset("right")))
    return tpl.pose(curl=curl, spread=1.0 - curl, position=wrist,
                    orientation=PALM_DOWN_FORWARD, timestamp=t)


class TestResolveContacts:
    def test_tip_projected_out_of_ball(self):
        ball = so.make_object(so.BALL, position=(0.0, 1.0, 0.4))
        ball.mass = so.ANCHORED  # hold it still so penetration is exact
        w = World([ball])
        # index tip placed 5 mm inside the ball
        tpl = template()
        frame0 = tpl.pose(curl=0.2, position=(0.0, 0.80, 0.4), timestamp=0.0)
        w.step([frame0])
        tip_target = (0.0, 1.0 - 0.0335 + 0.005, 0.4)
        base = tpl.pose(curl=0.2, position=(0.0, 0.8, 0.4), timestamp=DT)
        offset = vsub(tip_target, base.landmarks[TIP["index"]])
        frame = tpl.pose(curl=0.2, position=vadd((0.0, 0.8, 0.4), offset), timestamp=DT)
        events = w.step([frame])
        contacts = [e for e in events if e.type == "contact" and e.data["region"] == "index"]
        assert len(contacts) == 1
        assert contacts[0].data["penetration"] == pytest.approx(0.005, abs=1e-9)
        corrected = w.hands["right"].frame
        hit = so.surface_query(ball, corrected.landmarks[TIP["index"]])
        assert abs(hit.distance) <= 1e-9

    def test_no_contact_far_away(self):
        ball = so.make_object(so.BALL, position=(0.0, 1.0, 0.4))
        w = World([ball])
        frame = palm_down_hand((0.3, 1.3, 0.1), 0.2, DT)
        events = w.step([frame])
        assert [e for e in events if e.type == "contact"] == []
        assert w.hands["right"].frame.landmarks == frame.landmarks

    def test_approach_speed_measured(self):
        ball = so.make_object(so.BALL, position=(0.0, 1.0, 0.4))
        ball.mass = so.ANCHORED  # keep it still for the measurement
        w = World([ball])
        tpl = template()
        # drive the index tip straight down at 0.8 m/s onto the ball
        speed = 0.8
        start_tip_y = 1.0 + 0.0335 + 0.02
        t = 0.0
        event = None
        for k in range(30):
            t = k * DT
            tip_y = start_tip_y - speed * t
            base = tpl.pose(curl=0.2, timestamp=t)
            offset = vsub((0.0, tip_y, 0.4), base.landmarks[TIP["index"]])
            frame = tpl.pose(curl=0.2, position=offset, timestamp=t)
            for e in w.step([frame]):
                if e.type == "contact" and e.data["region"] == "index":
                    event = e
            if event:
                break
        assert event is not None
        assert event.data["approach_speed"] == pytest.approx(0.8, abs=GRAVITY / 60.0)

    def test_contact_edge_triggered(self):
        ball = so.make_object(so.BALL, position=(0.0, 1.0, 0.4))
        ball.mass = so.ANCHORED
        w = World([ball])
        tpl = template()
        count = 0
        for k in range(20):
            base = tpl.pose(curl=0.2, timestamp=k * DT)
            offset = vsub((0.0, 1.0 + 0.0335 - 0.004, 0.4), base.landmarks[TIP["index"]])
            frame = tpl.pose(curl=0.2, position=offset, timestamp=k * DT)
            count += sum(1 for e in w.step([frame])
                         if e.type == "contact" and e.data["region"] == "index")
        assert count == 1  # held contact reports once


class TestStickiness:
    def setup_method(self):
        self.ball = so.make_object(so.BALL, position=(0.0, 1.0, 0.4), asleep=True)
        self.world = World([self.ball])

    def drive(self, palm_targets_and_apertures):
        events = []
        for k, (palm, aperture) in enumerate(palm_targets_and_apertures):
            frame = hand_from_pointer("right", palm, aperture, k * DT,
                                      orientation=PALM_DOWN_FORWARD)
            events += self.world.step([frame])
        return events

    def test_overshoot_within_tolerance_attaches(self):
        # closing reach ends 1 cm past the ball surface
        surface_y = 1.0 + 0.0335
        events = self.drive(grab_script(surface_y, depth=0.01))
        assert any(e.type == "stuck" for e in events)
        slot = self.world.hands["right"]
        assert not isinstance(slot.attach, Detached)
        # the rendered hand is placed on the surface
        rendered_palm = pose_metrics(slot.frame).palm_center
        assert abs(so.surface_query(self.ball, rendered_palm).distance) <= 1e-6

    def test_pass_by_beyond_tolerance_never_attaches(self):
        # deliberate sweep passes 15 cm beyond the surface while closing
        surface_y = 1.0 + 0.0335
        script = []
        for k in range(28):
            u = k / 27.0
            y = surface_y + 0.08 - 0.23 * u  # 15 cm past the surface
            script.append(((0.0, y, 0.4), 1.0 - 0.55 * u))
        script += [(script[-1][0], 0.45)] * 10
        events = self.drive(script)
        assert not any(e.type in ("stuck", "grasped") for e in events)
        assert isinstance(self.world.hands["right"].attach, Detached)
        assert any(e.type == "grab_failed" for e in events)

    def test_release_hysteresis(self):
        surface_y = 1.0 + 0.0335
        self.drive(grab_script(surface_y, depth=0.01))
        slot = self.world.hands["right"]
        assert isinstance(slot.attach, (Stuck, Grasped))
        anchor_y = surface_y  # anchor is on top of the ball
        # retreat 4 cm: still attached (release threshold is 6 cm)
        self.drive([((0.0, anchor_y + 0.04, 0.4), 0.5)] * 10)
        assert isinstance(slot.attach, (Stuck, Grasped))
        # retreat 7 cm: detaches
        self.drive([((0.0, anchor_y + 0.07, 0.4), 0.55)] * 10)
        assert isinstance(slot.attach, Detached)

    def test_no_oscillation_under_jitter(self):
        # 1 mm jitter at the snap boundary: at most one transition
        surface_y = 1.0 + 0.0335
        events = self.drive(grab_script(surface_y, depth=0.005, close_to=0.55))
        rng = random.Random(3)
        jitter_script = []
        base_y = surface_y - 0.005
        for k in range(120):
            jitter_script.append(((0.0, base_y + rng.uniform(-0.001, 0.001), 0.4), 0.55))
        events += self.drive(jitter_script)
        transitions = [e for e in events if e.type in ("stuck", "released")]
        assert len(transitions) <= 1

    def test_missing_object_detaches_with_warning(self):
        self.drive(grab_script(1.0335, depth=0.005))
        assert not isinstance(self.world.hands["right"].attach, Detached)
        del self.world.objects["ball"]
        events = self.drive([((0.0, 1.0, 0.4), 0.5)])
        assert any(e.type == "warning" for e in events)
        assert isinstance(self.world.hands["right"].attach, Detached)


class TestToolAbstraction:
    def make_holding_world(self):
        scissors = so.make_object(so.SCISSORS, position=(0.0, 1.0, 0.4), asleep=True)
        w = World([scissors])
        slot = w.hand("right")
        frame = palm_down_hand((0.0, 1.1, 0.4), 0.5, 0.0)
        w.step([frame])
        # grab directly: force the attach state, then let tool_update promote
        m = pose_metrics(frame)
        slot.attach = Grasped(object_id="scissors", grip_position=(0, 0, 0),
                              grip_orientation=(1.0, 0.0, 0.0, 0.0))
        return w, scissors

    def test_actuation_endpoints_and_monotonicity(self):
        w, scissors = self.make_holding_world()
        assert w.actuation_for(0.8) == 0.0
        assert w.actuation_for(0.2) == 1.0
        assert w.actuation_for(0.9) == 0.0  # clamped outside
        assert w.actuation_for(0.1) == 1.0
        prev = -1.0
        blades = []
        for k in range(33):
            aperture = 0.9 - 0.8 * (k / 32.0)
            frame = hand_from_pointer("right", (0.0, 1.1, 0.4), aperture, (k + 1) * DT,
                                      orientation=PALM_DOWN_FORWARD)
            w.step([frame])
            slot = w.hands["right"]
            assert isinstance(slot.tool, Holding)
            assert slot.tool.actuation >= prev  # monotone as the hand closes
            prev = slot.tool.actuation
            blades.append(scissors.articulation.blade_deg)
        assert blades[0] == pytest.approx(30.0, abs=2.0)
        assert blades[-1] == 0.0
        assert all(b1 >= b2 - 1e-9 for b1, b2 in zip(blades, blades[1:]))

    def test_instrument_tracks_hand(self):
        w, scissors = self.make_holding_world()
        for k, x in enumerate((0.05, 0.1, 0.15)):
            frame = hand_from_pointer("right", (x, 1.1, 0.4), 0.3, (k + 1) * DT,
                                      orientation=PALM_DOWN_FORWARD)
            w.step([frame])
            m = pose_metrics(frame)
            assert vdist(scissors.position, m.palm_center) <= 0.05

    def test_drop_pose_releases_within_dwell_plus_tick(self):
        w, scissors = self.make_holding_world()
        # settle the grip with one closed-hand tick
        w.step([hand_from_pointer("right", (0.0, 1.1, 0.4), 0.3, DT,
                                  orientation=PALM_DOWN_FORWARD)])
        assert isinstance(w.hands["right"].tool, Holding)
        released_at = None
        t0 = w.time
        for k in range(40):
            t = DT * (k + 2)
            frame = hand_from_pointer("right", (0.0, 1.1, 0.4), 1.0, t,
                                      drop_pose=True)
            events = w.step([frame])
            if any(e.type == "tool_dropped" for e in events):
                released_at = w.time
                break
        assert released_at is not None
        assert released_at - t0 <= 0.15 + 2 * DT
        assert isinstance(w.hands["right"].tool, type(w.hand("left").tool))
        assert not scissors.asleep  # free body again

    def test_syringe_plunger_follows_actuation(self):
        syringe = so.make_object(so.SYRINGE, position=(0.0, 1.0, 0.4), asleep=True)
        w = World([syringe])
        frame = palm_down_hand((0.0, 1.1, 0.4), 0.5, 0.0)
        w.step([frame])
        w.hands["right"].attach = Grasped(object_id="syringe", grip_position=(0, 0, 0),
                                          grip_orientation=(1.0, 0.0, 0.0, 0.0))
        events = []
        for k in range(20):
            aperture = max(0.2, 0.8 - 0.05 * k)
            frame = hand_from_pointer("right", (0.0, 1.1, 0.4), aperture, (k + 1) * DT,
                                      orientation=PALM_DOWN_FORWARD)
            events += w.step([frame])
        assert syringe.articulation.plunger_m == pytest.approx(0.04)
        assert any(e.type == "syringe_injected" for e in events)


class TestForcesAndIntegration:
    def test_resting_ball_unchanged(self):
        ball = so.make_object(so.BALL, position=(0.0, 0.0335, 0.4))
        w = World([ball])
        for _ in range(100):
            w.step([])
        assert ball.position == (0.0, 0.0335, 0.4)
        assert ball.linear_velocity == (0.0, 0.0, 0.0)

    def test_palm_strike_transfers_normal_speed(self):
        ball = so.make_object(so.BALL, position=(0.0, 1.0, 0.4))
        ball.asleep = True
        w = World([ball])
        tpl = template()
        # palm sweeps +x at 1 m/s into the ball, hand wide open (not closing)
        for k in range(40):
            x = -0.15 + 1.0 * k * DT
            frame = tpl.pose(curl=0.0, spread=1.0,
                             position=(x, 1.0 - 0.073, 0.4 - 0.0), timestamp=k * DT)
            w.step([frame])
            if ball.linear_velocity != (0.0, 0.0, 0.0):
                break
        speed_along_x = ball.linear_velocity[0]
        assert 0.0 < speed_along_x <= 1.0 + 1e-9

    def test_ballistic_closed_form(self):
        ball = so.make_object(so.BALL, position=(0.0, 1.5, 8.0),
                              linear_velocity=(0.0, 2.0, -16.0))
        w = World([ball])
        for n in range(1, 31):
            w.step([])
            t = n * DT
            ref = (0.0,
                   1.5 + 2.0 * t - 0.5 * GRAVITY * t * t,
                   8.0 - 16.0 * t)
            for axis in range(3):
                scale = max(1.0, abs(ref[axis]))
                assert abs(ball.position[axis] - ref[axis]) <= 1e-9 * scale
        # t = 0.5 s lands at the documented intercept point
        assert ball.position[1] == pytest.approx(1.27375, abs=1e-9)
        assert abs(ball.position[2]) <= 1e-9

    def test_ground_bounce_restitution(self):
        ball = so.make_object(so.BALL, position=(0.0, 0.5, 0.4))
        w = World([ball])
        min_y = []
        vy_before = vy_after = None
        for _ in range(200):
            vy_prev = ball.linear_velocity[1]
            w.step([])
            if vy_prev < 0 and ball.linear_velocity[1] > 0 and vy_before is None:
                vy_before, vy_after = vy_prev, ball.linear_velocity[1]
            min_y.append(ball.position[1])
        assert vy_before is not None
        assert vy_after == pytest.approx(-0.3 * vy_before, rel=0.2)
        assert min(min_y) >= 0.0335 - 1e-9  # never below the ground plane

    def test_momentum_sanity_no_energy_injection(self):
        # post-impulse relative normal speed never increases
        ball = so.make_object(so.BALL, position=(0.0, 1.0, 0.4))
        ball.asleep = True
        w = World([ball])
        tpl = template()
        rng = random.Random(8)
        prev_ball_v = ball.linear_velocity
        for k in range(50):
            x = -0.12 + 0.9 * k * DT + rng.uniform(-0.002, 0.002)
            frame = tpl.pose(curl=0.0, spread=1.0, position=(x, 0.927, 0.4),
                             timestamp=k * DT)
            w.step([frame])
            # ball only ever gains speed along the push, bounded by hand speed
            assert ball.linear_velocity[0] <= 1.1
            assert ball.linear_velocity[0] >= prev_ball_v[0] - 1e-9 or ball.position[1] < 0.99
            prev_ball_v = ball.linear_velocity


class TestStepDeterminism:
    def test_empty_world_identity(self):
        w = World([so.make_object(so.PUSH_BUTTON, position=(0.0, 0.95, 0.4))])
        before = w.objects["push_button"].position
        for _ in range(1000):
            events = w.step([])
            assert events == []
        assert w.tick == 1000
        assert w.objects["push_button"].position == before

    def test_identical_runs_byte_identical_logs(self):
        def run():
            ball = so.make_object(so.BALL, position=(0.0, 0.95, 0.4), asleep=True)
            w = World([ball])
            lines = []
            rng = random.Random(17)
            for k in range(240):
                curl = 0.1 + 0.5 * abs(math.sin(k / 40.0))
                palm = (0.05 * math.sin(k / 25.0), 1.0 - 0.002 * k, 0.4)
                frame = hand_from_pointer("right", palm, 1.0 - curl, k * DT,
                                          orientation=PALM_DOWN_FORWARD)
                for e in w.step([frame]):
                    lines.append(event_line(e))
            return lines

        assert run() == run()

    def test_duplicate_side_rejected(self):
        w = World([])
        f = palm_down_hand((0.0, 1.0, 0.4), 0.2, DT)
        with pytest.raises(ValueError):
            w.step([f, f])


class TestNoPenetrationFuzz:
    def test_random_trajectories_respect_surfaces(self):
        # smaller cousin of the acceptance fuzz: 300 random trajectories
        objects = [
            so.make_object(so.BALL, position=(0.0, 0.95, 0.4), asleep=True),
            so.make_object(so.PUSH_BUTTON, "button", position=(-0.2, 0.95, 0.4)),
            so.make_object(so.PATIENT_LIMB, "limb", position=(0.25, 0.95, 0.35)),
        ]
        worst = 0.0
        for trial in range(300):
            rng = random.Random(trial)
            w = World([so.make_object(o.kind, o.id, position=o.position,
                                      asleep=o.asleep) for o in objects])
            palm = (rng.uniform(-0.3, 0.4), rng.uniform(0.85, 1.15), rng.uniform(0.2, 0.6))
            vel = (rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1))
            for k in range(12):
                palm = vadd(palm, vscale(vel, DT))
                aperture = 0.5 + 0.5 * math.sin(k / 3.0 + trial)
                frame = hand_from_pointer("right", palm, aperture, k * DT,
                                          orientation=PALM_DOWN_FORWARD)
                w.step([frame])
                slot = w.hands["right"]
                m = pose_metrics(slot.frame)
                probes = [m.palm_center] + [slot.frame.landmarks[TIP[f]]
                                            for f in ("thumb", "index", "middle",
                                                      "ring", "little")]
                for oid in w.object_ids():
                    obj = w.objects[oid]
                    for p in probes:
                        d = so.surface_query(obj, p).distance
                        worst = min(worst, d)
                        assert d >= -0.001, (trial, k, oid, d)
        assert worst >= -0.001

"""The four demonstration scenarios and the deterministic session engine.

Panel: press a button, toggle a lever, set a dial. Juggle: pick up a ball,
toss and re-catch it, pass it to the other hand. Catch: catch ballistic
pitches from a fixed virtual pitcher and throw one back. Medic: palpate a
limb, cut a bandage with scissors, inject with a syringe.

Every task has a completion predicate over the event log alone, so logs
are the single source of truth for progress, metrics and replays.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable

from .events import Event, event_line, read_log
from .geometry import vdist
from .hand_model import HandFrame
from .interaction import DT, Grasped, InteractionConfig, World
from . import smart_objects as so
from . import synesthesia
from . import trajectory_io

PROTOCOL_VERSION = 1

SCENARIO_NAMES = ("panel", "juggle", "catch", "medic")

# catch tuning (surfaced so tests and docs agree on one source)
CATCH_RADIUS = 0.06  # ball-to-palm distance that counts as "in hand"
CATCH_WINDOW_S = 0.1  # close-to-contact coincidence window
PITCHER_POS = (0.0, 1.5, 8.0)
FIRST_PITCH_VELOCITY = (0.0, 2.0, -16.0)  # later pitches vary by seeded factors
RETURN_TARGET_RADIUS = 1.0
PITCH_RESPAWN_DELAY_S = 1.5


@dataclass(frozen=True)
class Task:
    name: str
    done: Callable[[list[Event]], bool]  # predicate over the event log


def _has(events: list[Event], type_: str, **match) -> bool:
    return any(
        e.type == type_ and all(e.data.get(k) == v for k, v in match.items())
        for e in events
    )


def _panel_tasks() -> list[Task]:
    return [
        Task("press_button", lambda ev: _has(ev, "button_pressed")),
        Task("toggle_lever", lambda ev: _has(ev, "lever_toggled")),
        Task(
            "set_dial",
            lambda ev: any(
                e.type == "dial_set" and e.data.get("angle_deg", 0.0) >= 45.0 for e in ev
            ),
        ),
    ]


def _juggle_tasks() -> list[Task]:
    def tossed_and_caught(ev: list[Event]) -> bool:
        release_tick = None
        for e in ev:
            if e.type == "released" and e.data.get("object") == "ball":
                vel = e.data.get("velocity")
                if vel and vel[1] > 0.3:
                    release_tick = e.tick
            elif (
                e.type == "grasped"
                and e.data.get("object") == "ball"
                and release_tick is not None
                and e.tick > release_tick
            ):
                return True
        return False

    def transferred(ev: list[Event]) -> bool:
        first_side = None
        for e in ev:
            if e.type == "grasped" and e.data.get("object") == "ball":
                if first_side is None:
                    first_side = e.data["side"]
                elif e.data["side"] != first_side:
                    return True
        return False

    return [
        Task("pick_up", lambda ev: _has(ev, "grasped", object="ball")),
        Task("toss_and_catch", tossed_and_caught),
        Task("hand_transfer", transferred),
    ]


def _catch_tasks() -> list[Task]:
    return [
        Task("catch_pitch", lambda ev: _has(ev, "catch_success")),
        Task("return_throw", lambda ev: _has(ev, "throw_returned")),
    ]


def _medic_tasks() -> list[Task]:
    def palpated(ev: list[Event]) -> bool:
        regions = {
            (e.data["side"], e.data["region"])
            for e in ev
            if e.type == "contact" and e.data.get("object") == "limb"
        }
        return len(regions) >= 2

    return [
        Task("palpate_limb", palpated),
        Task("cut_bandage", lambda ev: _has(ev, "bandage_cut")),
        Task("inject", lambda ev: _has(ev, "syringe_injected")),
    ]


def build_objects(name: str) -> list[so.SmartObject]:
    if name == "panel":
        button = so.make_object(so.PUSH_BUTTON, "button", position=(-0.15, 0.95, 0.40))
        lever = so.make_object(so.LEVER_SWITCH, "lever", position=(0.0, 1.00, 0.30))
        dial = so.make_object(so.ROTARY_DIAL, "dial", position=(0.15, 1.00, 0.30))
        return [button, lever, dial]
    if name == "juggle":
        ball = so.make_object(so.BALL, "ball", position=(0.0, 0.95, 0.40), asleep=True)
        return [ball]
    if name == "catch":
        ball = so.make_object(so.BALL, "ball", position=PITCHER_POS,
                              linear_velocity=FIRST_PITCH_VELOCITY)
        return [ball]
    if name == "medic":
        limb = so.make_object(so.PATIENT_LIMB, "limb", position=(0.0, 0.95, 0.35))
        bandage = so.make_object(so.BANDAGE, "bandage",
                                 position=(0.0, 1.008, 0.43), asleep=True)
        # scissors lie flat on the tray, blades toward the patient (-x)
        scissors = so.make_object(so.SCISSORS, "scissors",
                                  position=(0.25, 0.958, 0.40), asleep=True,
                                  orientation=(0.7071067811865476, 0.0, 0.0,
                                               0.7071067811865476))
        syringe = so.make_object(so.SYRINGE, "syringe",
                                 position=(0.35, 0.95, 0.40), asleep=True)
        return [limb, bandage, scissors, syringe]
    raise ValueError(f"unknown scenario {name!r}")


_TASK_BUILDERS = {
    "panel": _panel_tasks,
    "juggle": _juggle_tasks,
    "catch": _catch_tasks,
    "medic": _medic_tasks,
}


class _CatchWatcher:
    """Pitch spawning plus catch / miss / return detection."""

    def __init__(self, seed: int):
        self.rng = random.Random(seed)
        self.pitch_index = 1
        self.phase = "in_flight"  # in_flight | held | thrown | waiting
        self.respawn_at: float | None = None
        self.near_time: dict[str, float] = {}
        self.close_time: dict[str, float] = {}
        self.prev_aperture: dict[str, float] = {}
        self.prev_z = PITCHER_POS[2]
        self.caught_this_pitch = False

    def after_step(self, world: World, events: list[Event]) -> list[Event]:
        out: list[Event] = []
        ball = world.objects.get("ball")
        if ball is None:
            return out
        t = world.time
        held = any(
            isinstance(s.attach, Grasped) and s.attach.object_id == "ball"
            for s in world.hands.values()
        )

        for side in sorted(world.hands):
            slot = world.hands[side]
            if slot.metrics is None:
                continue
            if vdist(ball.position, slot.metrics.palm_center) <= CATCH_RADIUS:
                self.near_time[side] = t
            prev = self.prev_aperture.get(side)
            if prev is not None and prev > 0.4 >= slot.metrics.aperture:
                self.close_time[side] = t
            self.prev_aperture[side] = slot.metrics.aperture

        if self.phase == "in_flight":
            for side in sorted(world.hands):
                near = self.near_time.get(side)
                close = self.close_time.get(side)
                if (
                    not self.caught_this_pitch
                    and near is not None
                    and close is not None
                    and abs(near - close) <= CATCH_WINDOW_S
                ):
                    self.caught_this_pitch = True
                    self.phase = "held"
                    out.append(Event(world.tick, t, "catch_success",
                                     {"side": side, "pitch": self.pitch_index}))
                    break
            if self.phase == "in_flight" and (
                ball.position[2] < -0.5
                or (ball.position[1] <= 0.05 and ball.linear_velocity[1] == 0.0)
            ):
                out.append(Event(world.tick, t, "catch_missed", {"pitch": self.pitch_index}))
                self._schedule_respawn(t)

        elif self.phase == "held":
            if not held:
                self.phase = "thrown"

        elif self.phase == "thrown":
            z = ball.position[2]
            if self.prev_z < PITCHER_POS[2] <= z:
                miss = max(
                    abs(ball.position[0] - PITCHER_POS[0]),
                    abs(ball.position[1] - PITCHER_POS[1]),
                )
                if miss <= RETURN_TARGET_RADIUS:
                    out.append(Event(world.tick, t, "throw_returned",
                                     {"pitch": self.pitch_index, "miss_distance": miss}))
                else:
                    out.append(Event(world.tick, t, "throw_missed",
                                     {"pitch": self.pitch_index, "miss_distance": miss}))
                self._schedule_respawn(t)
            elif ball.position[1] <= 0.05 and ball.linear_velocity[1] == 0.0 and not held:
                out.append(Event(world.tick, t, "throw_missed",
                                 {"pitch": self.pitch_index, "miss_distance": -1.0}))
                self._schedule_respawn(t)

        elif self.phase == "waiting" and self.respawn_at is not None and t >= self.respawn_at:
            self.pitch_index += 1
            # later pitches vary in speed; the first pitch is always canonical
            fy = self.rng.uniform(0.9, 1.1)
            fz = self.rng.uniform(0.9, 1.1)
            ball.position = PITCHER_POS
            ball.linear_velocity = (
                FIRST_PITCH_VELOCITY[0],
                FIRST_PITCH_VELOCITY[1] * fy,
                FIRST_PITCH_VELOCITY[2] * fz,
            )
            ball.angular_velocity = (0.0, 0.0, 0.0)
            ball.asleep = False
            self.phase = "in_flight"
            self.caught_this_pitch = False
            self.near_time.clear()
            self.close_time.clear()
            out.append(Event(world.tick, t, "pitch_launched",
                             {"pitch": self.pitch_index,
                              "velocity": list(ball.linear_velocity)}))
            self.respawn_at = None

        self.prev_z = ball.position[2]
        return out

    def _schedule_respawn(self, t: float) -> None:
        self.phase = "waiting"
        self.respawn_at = t + PITCH_RESPAWN_DELAY_S


class _JuggleWatcher:
    """Flags the ball hitting the floor as a drop error."""

    def __init__(self):
        self.ever_grasped = False
        self.grounded = False

    def after_step(self, world: World, events: list[Event]) -> list[Event]:
        out: list[Event] = []
        ball = world.objects.get("ball")
        if ball is None:
            return out
        if any(e.type == "grasped" and e.data.get("object") == "ball" for e in events):
            self.ever_grasped = True
            self.grounded = False
        on_ground = ball.position[1] <= 0.05 and not ball.asleep
        if self.ever_grasped and on_ground and not self.grounded:
            held = any(
                isinstance(s.attach, Grasped) and s.attach.object_id == "ball"
                for s in world.hands.values()
            )
            if not held:
                self.grounded = True
                out.append(Event(world.tick, world.time, "ball_dropped", {"object": "ball"}))
        return out


class _MedicWatcher:
    """Flags instrument drops that happen before their task is complete."""

    _NEEDS = {"cut_bandage": so.SCISSORS, "inject": so.SYRINGE}

    def __init__(self):
        self.active_task: str | None = None

    def after_step(self, world: World, events: list[Event]) -> list[Event]:
        out = []
        needed = self._NEEDS.get(self.active_task)
        if needed is None:
            return out
        for e in events:
            if e.type == "tool_dropped":
                obj = world.objects.get(e.data.get("object", ""))
                if obj is not None and obj.kind == needed:
                    out.append(Event(e.tick, e.t, "tool_drop_premature",
                                     {"object": obj.id, "task": self.active_task}))
        return out


class _NullWatcher:
    def after_step(self, world: World, events: list[Event]) -> list[Event]:
        return []


def _make_watcher(name: str, seed: int):
    if name == "catch":
        return _CatchWatcher(seed)
    if name == "juggle":
        return _JuggleWatcher()
    if name == "medic":
        return _MedicWatcher()
    return _NullWatcher()


@dataclass
class SessionLog:
    scenario: str
    seed: int
    events: list[Event] = field(default_factory=list)
    inputs: list[trajectory_io.TickRecord] = field(default_factory=list)
    completed: bool = False

    def lines(self) -> list[str]:
        return [event_line(e) for e in self.events]

    def write(self, path: str | Path) -> None:
        with open(path, "w") as fh:
            for line in self.lines():
                fh.write(line)
                fh.write("\n")

    def write_inputs(self, path: str | Path) -> None:
        trajectory_io.write_trajectory(path, self.inputs)

    def audio_events(self) -> list[synesthesia.AudioEvent]:
        out = []
        for e in self.events:
            if e.type == "audio":
                out.append(
                    synesthesia.AudioEvent(
                        frequency=e.data["frequency"],
                        attack_ms=e.data["attack_ms"],
                        decay_ms=e.data["decay_ms"],
                        amplitude=e.data["amplitude"],
                        start=e.t,
                    )
                )
        return out


class SessionEngine:
    """One scenario run: world + watcher + task tracker + event log.

    Scripted runs and live sessions share this class, so identical input
    sequences produce identical logs either way.
    """

    def __init__(
        self,
        scenario: str,
        seed: int = 0,
        dt: float = DT,
        config: InteractionConfig | None = None,
        tone_mapping: synesthesia.ToneMapping | None = None,
    ):
        if scenario not in SCENARIO_NAMES:
            raise ValueError(f"unknown scenario {scenario!r}")
        self.scenario = scenario
        self.seed = seed
        self.world = World(build_objects(scenario), config=config, dt=dt)
        self.tasks = _TASK_BUILDERS[scenario]()
        self.task_idx = 0
        self.watcher = _make_watcher(scenario, seed)
        self.tones = tone_mapping or synesthesia.default_mapping()
        self.log = SessionLog(scenario=scenario, seed=seed)
        self.completed = False
        start = Event(0, 0.0, "session_start",
                      {"version": PROTOCOL_VERSION, "scenario": scenario,
                       "seed": seed, "dt": dt})
        self.log.events.append(start)
        if self.tasks:
            self._set_active_task(0, tick=0, t=0.0)

    def _set_active_task(self, idx: int, tick: int, t: float) -> None:
        self.task_idx = idx
        if isinstance(self.watcher, _MedicWatcher):
            self.watcher.active_task = self.tasks[idx].name
        self.log.events.append(Event(tick, t, "task_started",
                                     {"task": self.tasks[idx].name}))

    def checklist(self) -> list[dict]:
        return [
            {"name": task.name, "done": i < self.task_idx or self.completed}
            for i, task in enumerate(self.tasks)
        ]

    def tick(self, hands: list[HandFrame]) -> list[Event]:
        """Advance one tick; returns every event appended to the log."""
        before = len(self.log.events)
        self.log.inputs.append((self.world.time + self.world.dt, list(hands)))
        events = self.world.step(hands)
        events.extend(self.watcher.after_step(self.world, events))
        for e in list(events):
            if e.type == "contact":
                obj = self.world.objects[e.data["object"]]
                tone = synesthesia.event_for_contact(
                    side=e.data["side"],
                    region=e.data["region"],
                    approach_speed=e.data["approach_speed"],
                    hardness=obj.hardness,
                    start=e.t,
                    mapping=self.tones,
                )
                events.append(Event(e.tick, e.t, "audio", {
                    "side": e.data["side"],
                    "region": e.data["region"],
                    "frequency": tone.frequency,
                    "attack_ms": tone.attack_ms,
                    "decay_ms": tone.decay_ms,
                    "amplitude": tone.amplitude,
                }))
        self.log.events.extend(events)

        while not self.completed and self.tasks[self.task_idx].done(self.log.events):
            done = Event(self.world.tick, self.world.time, "task_completed",
                         {"task": self.tasks[self.task_idx].name})
            self.log.events.append(done)
            if self.task_idx + 1 < len(self.tasks):
                self._set_active_task(self.task_idx + 1,
                                      tick=self.world.tick, t=self.world.time)
            else:
                self.completed = True
                self.log.completed = True
                self.log.events.append(Event(self.world.tick, self.world.time,
                                             "scenario_completed", {}))
        return self.log.events[before:]


def run_scenario(
    scenario: str,
    script: str | Path | Iterable[trajectory_io.TickRecord] | None = None,
    seed: int = 0,
    dt: float = DT,
    log_path: str | Path | None = None,
    audio_path: str | Path | None = None,
    max_ticks: int | None = None,
    stop_when_complete: bool = False,
) -> SessionLog:
    """Drive a scenario from a trajectory script to completion or exhaustion."""
    if script is None:
        script = shipped_script_path(scenario)
    if isinstance(script, (str, Path)):
        records = trajectory_io.read_trajectory(script)
    else:
        records = list(script)
    engine = SessionEngine(scenario, seed=seed, dt=dt)
    for n, (_, hands) in enumerate(records):
        if max_ticks is not None and n >= max_ticks:
            break
        engine.tick(hands)
        if stop_when_complete and engine.completed:
            break
    if log_path is not None:
        engine.log.write(log_path)
    if audio_path is not None:
        duration = engine.world.time + 0.5
        pcm = synesthesia.render_pcm(engine.log.audio_events(), duration)
        synesthesia.write_wav(audio_path, pcm)
    return engine.log


def shipped_script_path(scenario: str) -> Path:
    res = resources.files("omg.data").joinpath(f"scenarios/{scenario}.jsonl")
    with resources.as_file(res) as p:
        return Path(p)


class ReplayIncompatibleError(RuntimeError):
    pass


@dataclass
class ReplayResult:
    ok: bool
    first_divergent_line: int | None = None
    detail: str = ""


def replay_verify(
    log_path: str | Path,
    script: str | Path | None = None,
    scenario: str | None = None,
) -> ReplayResult:
    """Re-run a logged session from its script and byte-compare the logs."""
    with open(log_path) as fh:
        original = [line.rstrip("\n") for line in fh if line.strip()]
    if not original:
        raise ReplayIncompatibleError("empty log")
    head = read_log(log_path)[0]
    if head.type != "session_start":
        raise ReplayIncompatibleError("log does not begin with session_start")
    if head.data.get("version") != PROTOCOL_VERSION:
        raise ReplayIncompatibleError(
            f"log version {head.data.get('version')} != engine version {PROTOCOL_VERSION}"
        )
    scenario = scenario or head.data["scenario"]
    seed = int(head.data.get("seed", 0))
    dt = float(head.data.get("dt", DT))
    rerun = run_scenario(scenario, script=script, seed=seed, dt=dt)
    fresh = rerun.lines()
    for i, (a, b) in enumerate(zip(original, fresh), start=1):
        if a != b:
            return ReplayResult(False, i, f"expected {b!r}, found {a!r}")
    if len(original) != len(fresh):
        n = min(len(original), len(fresh)) + 1
        return ReplayResult(False, n, "log length differs")
    return ReplayResult(True)

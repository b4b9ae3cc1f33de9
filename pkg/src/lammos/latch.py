"""Motorized-screw latch state machine and trace simulation.

The latch cycle is a fixed seven-state loop: clockwise drive moves
Housed -> EngagingFlexNut -> Traversing -> Tightening -> Latched, and
counterclockwise drive moves Latched -> Loosening -> Retracting -> Housed.
Screw tip position is measured from the bracket's top plane (negative =
housed above the bracket). Dynamics are quasi-static: each fixed step the
motor sits on its torque-speed line for the load of the current state.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Optional

from .mechlib import (
    MotorSpec,
    ScrewSpec,
    SpringSpec,
    motor_operating_point,
    screw_back_drive_torque,
)


class LatchStateError(RuntimeError):
    """Operation called in a state where it is undefined."""


class LatchState(enum.Enum):
    HOUSED = "Housed"
    ENGAGING_FLEXNUT = "EngagingFlexNut"
    TRAVERSING = "Traversing"
    TIGHTENING = "Tightening"
    LATCHED = "Latched"
    LOOSENING = "Loosening"
    RETRACTING = "Retracting"


# States reached while driving clockwise (latching half of the cycle).
_LATCHING_STATES = frozenset({
    LatchState.HOUSED, LatchState.ENGAGING_FLEXNUT,
    LatchState.TRAVERSING, LatchState.TIGHTENING,
})
# States reached while driving counterclockwise (unlatching half).
_UNLATCHING_STATES = frozenset({LatchState.LOOSENING, LatchState.RETRACTING})

# Legal directed edges of the latch cycle (self-loops are always legal).
LEGAL_EDGES = frozenset({
    (LatchState.HOUSED, LatchState.ENGAGING_FLEXNUT),
    (LatchState.ENGAGING_FLEXNUT, LatchState.TRAVERSING),
    (LatchState.TRAVERSING, LatchState.TIGHTENING),
    (LatchState.TIGHTENING, LatchState.LATCHED),
    (LatchState.LATCHED, LatchState.LOOSENING),
    (LatchState.LOOSENING, LatchState.RETRACTING),
    (LatchState.RETRACTING, LatchState.HOUSED),
})


class Direction(enum.Enum):
    CLOCKWISE = "clockwise"
    COUNTERCLOCKWISE = "counterclockwise"
    OFF = "off"


@dataclass(frozen=True)
class DriveCommand:
    voltage: float
    direction: Direction = Direction.OFF


DRIVE_OFF = DriveCommand(voltage=0.0, direction=Direction.OFF)


@dataclass(frozen=True)
class LatchEvent:
    name: str


@dataclass(frozen=True)
class LatchFsm:
    """Immutable latch snapshot plus its fixed mechanism parameters."""

    motor: MotorSpec
    screw: ScrewSpec
    spring: SpringSpec
    state: LatchState = LatchState.HOUSED
    screw_tip_position: float = -0.003      # m, relative to bracket top plane
    flexnut_friction_torque: float = 0.02   # N*m, non-catalog default
    bracket_thickness: float = 0.009        # m
    tslot_gap: float = 0.003                # m, bracket underside to nut face
    tightening_current_threshold: float = 0.9  # fraction of stall current
    clamp_torque: float = 0.26              # N*m at full engagement
    breakaway_factor: float = 1.15          # unscrew breakaway vs clamp torque
    housed_rest_position: float = -0.003    # m, spring-seated tip position
    tightening_travel: float = 0.00125      # m of torque ramp past the nut face

    def __post_init__(self):
        if self.housed_rest_position >= 0:
            raise ValueError("housed rest position must be above the bracket plane")
        if self.bracket_thickness <= 0 or self.tslot_gap < 0:
            raise ValueError("invalid bracket geometry")
        if not (0 < self.tightening_current_threshold <= 1):
            raise ValueError("tightening threshold must be in (0, 1]")
        if self.clamp_torque <= self.flexnut_friction_torque:
            raise ValueError("clamp torque must exceed flexnut friction")
        travel = (self.bracket_thickness + self.tslot_gap + self.tightening_travel
                  - self.housed_rest_position)
        if travel > self.screw.length:
            raise ValueError("latched travel exceeds screw length")
        if self.state is LatchState.HOUSED and self.screw_tip_position >= 0:
            raise ValueError("Housed requires the tip above the bracket plane")
        if (self.state is LatchState.LATCHED
                and self.screw_tip_position < self.tslot_engagement_position):
            raise ValueError("Latched requires the tip at the T-slot nut")

    @property
    def tslot_engagement_position(self) -> float:
        return self.bracket_thickness + self.tslot_gap


def _load_torque(fsm: LatchFsm, state: LatchState) -> float:
    """Resisting torque seen by the motor in a given state."""
    friction = fsm.flexnut_friction_torque
    if state in (LatchState.ENGAGING_FLEXNUT, LatchState.TRAVERSING,
                 LatchState.RETRACTING):
        return friction
    if state is LatchState.TIGHTENING:
        depth = fsm.screw_tip_position - fsm.tslot_engagement_position
        ramp = min(1.0, max(0.0, depth / fsm.tightening_travel))
        return friction + (fsm.clamp_torque - friction) * ramp
    if state is LatchState.LOOSENING:
        return fsm.breakaway_factor * fsm.clamp_torque
    return 0.0  # Housed / Latched: no motion commanded in-state


def drive_sample(fsm: LatchFsm, cmd: DriveCommand):
    """Operating point the motor would see this instant, or None if inactive."""
    if cmd.direction is Direction.OFF:
        return None
    if cmd.direction is Direction.CLOCKWISE:
        if fsm.state not in _LATCHING_STATES:
            return None
        state = (LatchState.ENGAGING_FLEXNUT if fsm.state is LatchState.HOUSED
                 else fsm.state)
    else:
        if fsm.state is LatchState.LATCHED:
            state = LatchState.LOOSENING
        elif fsm.state in _UNLATCHING_STATES:
            state = fsm.state
        else:
            return None
    return motor_operating_point(fsm.motor, cmd.voltage, _load_torque(fsm, state))


def step(fsm: LatchFsm, cmd: DriveCommand, dt: float):
    """Advance one fixed timestep. Returns (new fsm, event or None).

    At most one state transition fires per step; entry transitions
    (Housed->Engaging, Latched->Loosening) consume the step without motion,
    and positional transitions clamp the tip at the crossed boundary.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if cmd.direction is Direction.OFF:
        # Screw holds position by flexnut friction; no current drawn.
        return fsm, None

    if cmd.direction is Direction.CLOCKWISE:
        if fsm.state is LatchState.LATCHED:
            return fsm, LatchEvent("already-latched")
        if fsm.state in _UNLATCHING_STATES:
            return fsm, None  # reversal mid-unlatch is not part of the cycle
        if fsm.state is LatchState.HOUSED:
            return (replace(fsm, state=LatchState.ENGAGING_FLEXNUT),
                    LatchEvent("engaging"))
        op = motor_operating_point(fsm.motor, cmd.voltage,
                                   _load_torque(fsm, fsm.state))
        if fsm.state is LatchState.TIGHTENING:
            threshold = (fsm.tightening_current_threshold
                         * fsm.motor.stall_current(cmd.voltage))
            if op.current >= threshold:
                return replace(fsm, state=LatchState.LATCHED), LatchEvent("latched")
        pos = fsm.screw_tip_position + op.speed * fsm.screw.thread_pitch * dt
        if fsm.state is LatchState.ENGAGING_FLEXNUT and pos >= 0.0:
            return (replace(fsm, state=LatchState.TRAVERSING,
                            screw_tip_position=0.0),
                    LatchEvent("crossed-bracket-plane"))
        if (fsm.state is LatchState.TRAVERSING
                and pos >= fsm.tslot_engagement_position):
            return (replace(fsm, state=LatchState.TIGHTENING,
                            screw_tip_position=fsm.tslot_engagement_position),
                    LatchEvent("reached-tslot"))
        return replace(fsm, screw_tip_position=pos), None

    # Counterclockwise drive.
    if fsm.state is LatchState.LATCHED:
        return replace(fsm, state=LatchState.LOOSENING), LatchEvent("breakaway")
    if fsm.state not in _UNLATCHING_STATES:
        return fsm, None  # housed or mid-latching: hold position
    op = motor_operating_point(fsm.motor, cmd.voltage,
                               _load_torque(fsm, fsm.state))
    pos = fsm.screw_tip_position - op.speed * fsm.screw.thread_pitch * dt
    if (fsm.state is LatchState.LOOSENING
            and pos <= fsm.tslot_engagement_position):
        return (replace(fsm, state=LatchState.RETRACTING,
                        screw_tip_position=fsm.tslot_engagement_position),
                LatchEvent("screw-clear-of-tslot"))
    if fsm.state is LatchState.RETRACTING and pos <= fsm.housed_rest_position:
        # Spring re-seats the motor against the bracket base.
        return (replace(fsm, state=LatchState.HOUSED,
                        screw_tip_position=fsm.housed_rest_position),
                LatchEvent("housed"))
    return replace(fsm, screw_tip_position=pos), None


@dataclass(frozen=True)
class TraceSample:
    t: float
    current: float
    position: float
    state: LatchState


@dataclass(frozen=True)
class CurrentTrace:
    samples: tuple[TraceSample, ...]

    def to_csv(self) -> str:
        lines = ["t_s,current_A,position_m,state"]
        for s in self.samples:
            lines.append("{},{},{},{}".format(
                format(s.t, ".9g"), format(s.current, ".9g"),
                format(s.position, ".9g"), s.state.value))
        return "\n".join(lines) + "\n"

    @property
    def duration(self) -> float:
        return self.samples[-1].t if self.samples else 0.0

    def energy(self, voltage_for: Callable[[float], float], dt: float) -> float:
        """Integrate V*I*dt over the trace given a t -> V lookup."""
        return sum(voltage_for(s.t) * s.current * dt for s in self.samples)


def run_schedule(fsm: LatchFsm, schedule: Iterable[tuple[DriveCommand, float]],
                 dt: float, t0: float = 0.0):
    """Replay a command schedule. Returns (final fsm, trace, timed events)."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    samples: list[TraceSample] = []
    events: list[tuple[float, LatchEvent]] = []
    t = t0
    for cmd, duration in schedule:
        if duration <= 0:
            raise ValueError(f"non-positive segment duration at t={t}")
        for _ in range(int(round(duration / dt))):
            op = drive_sample(fsm, cmd)
            current = op.current if op is not None else 0.0
            fsm, event = step(fsm, cmd, dt)
            t += dt
            samples.append(TraceSample(t=t, current=current,
                                       position=fsm.screw_tip_position,
                                       state=fsm.state))
            if event is not None:
                events.append((t, event))
    return fsm, CurrentTrace(samples=tuple(samples)), events


def simulate_trace(fsm: LatchFsm, schedule, dt: float) -> CurrentTrace:
    """Deterministic trace of a command schedule (bit-identical on replay)."""
    _, trace, _ = run_schedule(fsm, schedule, dt)
    return trace


def run_until(fsm: LatchFsm, cmd: DriveCommand, dt: float,
              stop_state: LatchState, max_duration: float = 120.0,
              t0: float = 0.0):
    """Drive with one command until a state is reached (or time out)."""
    samples: list[TraceSample] = []
    events: list[tuple[float, LatchEvent]] = []
    t = t0
    steps_left = int(round(max_duration / dt))
    while fsm.state is not stop_state and steps_left > 0:
        op = drive_sample(fsm, cmd)
        current = op.current if op is not None else 0.0
        fsm, event = step(fsm, cmd, dt)
        t += dt
        steps_left -= 1
        samples.append(TraceSample(t=t, current=current,
                                   position=fsm.screw_tip_position,
                                   state=fsm.state))
        if event is not None:
            events.append((t, event))
    return fsm, CurrentTrace(samples=tuple(samples)), events


def holds_housed_without_power(fsm: LatchFsm) -> bool:
    """True iff flexnut friction beats the spring-induced back-drive torque."""
    if fsm.state is not LatchState.HOUSED:
        raise LatchStateError("holds_housed_without_power requires Housed state")
    backdrive = screw_back_drive_torque(fsm.screw, fsm.spring.max_load)
    return backdrive < fsm.flexnut_friction_torque


def static_power(fsm: LatchFsm, cmd: Optional[DriveCommand] = None) -> float:
    """Electrical power drawn; exactly zero whenever no drive is active."""
    if cmd is None or cmd.direction is Direction.OFF:
        return 0.0
    op = drive_sample(fsm, cmd)
    if op is None:
        return 0.0
    return cmd.voltage * op.current

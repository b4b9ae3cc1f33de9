"""Scenario engine tests: canonical procedure, ordering, abort, round trip."""

import dataclasses

import pytest

from lammos import sequence
from lammos.dewalop import default_unit, leg_load_path
from lammos.latch import LatchState
from lammos.sequence import (
    Scenario,
    StepSpec,
    build_scenario,
    canonical_scenario,
    reverse_scenario,
    run_scenario,
    snapshot_hash,
    validate,
)

# Coarser timestep keeps full-procedure runs fast; behavior is dt-robust.
FAST_DT = 0.005


def run_canonical(dt=FAST_DT):
    return run_scenario(canonical_scenario(dt=dt))


class TestCanonicalScenario:
    def test_succeeds_with_all_latches_engaged(self):
        unit, log, verdict, traces = run_canonical()
        assert verdict.passed
        assert unit.in_pipe and unit.centered
        for leg in unit.legs:
            assert leg.angle_latch.state is LatchState.LATCHED
            assert leg.flat_latch.state is LatchState.LATCHED

    def test_final_state_routes_load_to_structure(self):
        unit, _, verdict, _ = run_canonical()
        assert verdict.passed
        path = leg_load_path(unit.legs[0], 2000.0)
        assert path.structure_share == 2000.0
        assert path.actuator_share == 0.0
        assert path.ok

    def test_event_log_timestamps_non_decreasing(self):
        _, log, _, _ = run_canonical()
        times = [e.t for e in log.entries]
        assert times == sorted(times)

    def test_every_latch_transition_has_one_drive_actor(self):
        _, log, _, _ = run_canonical()
        latched_events = [e for e in log.entries if e.event == "latched"]
        assert len(latched_events) == 2  # one angle drive, one flat drive
        assert {e.actor for e in latched_events} == {"latch_angle",
                                                     "latch_flat"}


class TestOrderingAndAbort:
    def test_skipping_raise_fails_at_latch_angle(self):
        scenario = build_scenario({
            "name": "broken", "type": "dewalop",
            "pipe": {"inner_diameter_m": 0.800}, "dt_s": FAST_DT,
            "steps": [
                {"action": "lower_legs"},
                {"action": "move_into_pipe"},
                {"action": "latch_angle"},
            ],
        })
        unit, log, verdict, _ = run_scenario(scenario)
        assert not verdict.passed
        assert verdict.failed_action == "latch_angle"
        assert verdict.reason == "hinge not perpendicular"
        assert verdict.offending_leg is not None

    def test_abort_returns_pre_step_snapshot(self):
        scenario = build_scenario({
            "name": "aborting", "type": "dewalop",
            "pipe": {"inner_diameter_m": 0.800}, "dt_s": FAST_DT,
            "steps": [
                {"action": "lower_legs"},
                {"action": "move_into_pipe"},
                {"action": "latch_angle"},  # fails: legs still lowered
            ],
        })
        unit, _, verdict, _ = run_scenario(scenario)
        assert not verdict.passed
        # State equals what the first two (successful) steps produced.
        prefix = build_scenario({
            "name": "prefix", "type": "dewalop",
            "pipe": {"inner_diameter_m": 0.800}, "dt_s": FAST_DT,
            "steps": [
                {"action": "lower_legs"},
                {"action": "move_into_pipe"},
            ],
        })
        prefix_unit, _, prefix_verdict, _ = run_scenario(prefix)
        assert prefix_verdict.passed
        assert unit == prefix_unit

    def test_unlatch_flat_requires_engaged_latch(self):
        scenario = build_scenario({
            "name": "premature-unlatch", "type": "dewalop",
            "pipe": {"inner_diameter_m": 0.800}, "dt_s": FAST_DT,
            "steps": [{"action": "unlatch_flat"}],
        })
        _, _, verdict, _ = run_scenario(scenario)
        assert not verdict.passed
        assert verdict.reason == "flat latch not engaged"


class TestRoundTrip:
    def test_forward_then_reverse_restores_initial_state(self):
        initial = default_unit()
        unit, _, verdict, _ = run_canonical()
        assert verdict.passed
        rev = reverse_scenario(dt=FAST_DT, robot=unit)
        restored, _, rev_verdict, _ = run_scenario(rev)
        assert rev_verdict.passed
        assert restored == initial
        assert snapshot_hash(restored) == snapshot_hash(initial)

    def test_reverse_final_posture(self):
        unit, _, _, _ = run_canonical()
        restored, _, verdict, _ = run_scenario(
            reverse_scenario(dt=FAST_DT, robot=unit))
        assert verdict.passed
        assert not restored.in_pipe
        for leg in restored.ring_legs("top"):
            assert leg.hinge_angle != 0.0
        for leg in restored.legs:
            assert leg.angle_latch.state is LatchState.HOUSED
            assert leg.flat_latch.state is LatchState.HOUSED


class TestDeterminism:
    def test_identical_scenarios_identical_logs(self):
        _, log_a, _, _ = run_canonical()
        _, log_b, _, _ = run_canonical()
        assert log_a == log_b
        assert log_a.to_csv() == log_b.to_csv()


class TestValidate:
    def test_canonical_clean(self):
        diags = validate({
            "name": "ok", "type": "dewalop",
            "pipe": {"inner_diameter_m": 0.800}, "dt_s": 0.001,
            "steps": sequence.canonical_steps(),
        })
        assert diags == []

    def test_pipe_out_of_range(self):
        diags = validate({
            "name": "wide", "type": "dewalop",
            "pipe": {"inner_diameter_m": 1.200},
            "steps": sequence.canonical_steps(),
        })
        assert any("pipe out of operating range" in d for d in diags)

    def test_non_positive_timestep(self):
        diags = validate({
            "name": "frozen", "type": "dewalop",
            "pipe": {"inner_diameter_m": 0.800}, "dt_s": 0,
            "steps": sequence.canonical_steps(),
        })
        assert any("non-positive timestep" in d for d in diags)

    def test_unknown_action(self):
        diags = validate({
            "name": "odd", "type": "dewalop",
            "pipe": {"inner_diameter_m": 0.800},
            "steps": [{"action": "teleport"}],
        })
        assert any("unknown action" in d for d in diags)

    def test_empty_steps(self):
        diags = validate({
            "name": "empty", "type": "dewalop",
            "pipe": {"inner_diameter_m": 0.800}, "steps": [],
        })
        assert any("no steps" in d for d in diags)


class TestScenarioTypes:
    def test_step_spec_rejects_unknown_action(self):
        with pytest.raises(ValueError):
            StepSpec(action="fly")

    def test_scenario_requires_steps(self):
        with pytest.raises(ValueError):
            canonical = canonical_scenario()
            Scenario(name="x", robot=canonical.robot, pipe=canonical.pipe,
                     steps=())

    def test_manual_push_path_requires_acknowledgement(self):
        base = {
            "name": "raised-insertion", "type": "dewalop",
            "pipe": {"inner_diameter_m": 0.800}, "dt_s": FAST_DT,
        }
        refused = build_scenario({**base, "steps": [
            {"action": "raise_legs"},
            {"action": "move_into_pipe"},
        ]})
        _, _, verdict, _ = run_scenario(refused)
        assert not verdict.passed
        assert "acknowledged push force" in verdict.reason

        acknowledged = build_scenario({**base, "steps": [
            {"action": "raise_legs"},
            {"action": "move_into_pipe", "acknowledge_push_force": True},
        ]})
        _, log, verdict, _ = run_scenario(acknowledged)
        assert verdict.passed
        assert any("manual push 400 N" in e.event for e in log.entries)

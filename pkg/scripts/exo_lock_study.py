#!/usr/bin/env python3
"""Sweep hold duration and report when engaging the joint lock pays off.

For each duration the joint holds half of its 3 V stall torque; the script
compares continuous motor holding against latching at t=0 and prints the
break-even point.
"""

from lammos import defaults
from lammos.exo import ExoJoint, LoadTimeline, energy_comparison, hold_power


def main():
    motor = defaults.default_motor()
    joint = ExoJoint(motor=motor, lock=defaults.default_latch_fsm(),
                     supply_voltage=defaults.LATCH_VOLTAGE,
                     standby_power=defaults.EXO_STANDBY_POWER)
    load = motor.stall_torque(joint.supply_voltage) / 2

    import dataclasses
    p_hold = hold_power(dataclasses.replace(joint, load_torque=load))
    print(f"holding {load:.3f} N*m continuously: {p_hold:.3f} W")
    print(f"locked standby: {joint.standby_power:.3f} W")
    print()
    print("duration_s,savings_J")
    breakeven = None
    for duration in (1, 5, 10, 30, 60, 120, 300, 600, 1800):
        timeline = LoadTimeline(points=((0.0, load),), end_time=float(duration))
        result = energy_comparison(joint, timeline, lock_at=0.0)
        print(f"{duration},{result.savings:.3f}")
        if breakeven is None and result.savings > 0:
            breakeven = duration
    print()
    if breakeven is not None:
        print(f"locking pays off for holds of roughly {breakeven} s or longer")


if __name__ == "__main__":
    main()

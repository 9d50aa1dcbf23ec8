"""Vehicle states, constant-acceleration stepping and rectangle gap/overlap tests.

Conventions: longitudinal x grows in the travel direction, lateral y grows
leftward, positions refer to vehicle centers. Lane centers sit at
y = k * LANE_WIDTH_M.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidInputError

LANE_WIDTH_M = 3.75  # default highway lane width


def _require_finite(**values: float) -> None:
    for name, value in values.items():
        if not math.isfinite(value):
            raise InvalidInputError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class VehicleDims:
    """Bounding-box footprint of one vehicle."""

    width_m: float
    length_m: float

    def __post_init__(self) -> None:
        _require_finite(width_m=self.width_m, length_m=self.length_m)
        if self.width_m <= 0.0 or self.length_m <= 0.0:
            raise InvalidInputError("vehicle dimensions must be positive")


@dataclass(frozen=True)
class VehicleState:
    """Center position and velocity of one vehicle at one instant."""

    pos_long_m: float
    pos_lat_m: float
    vel_long_mps: float
    vel_lat_mps: float = 0.0

    def __post_init__(self) -> None:
        _require_finite(
            pos_long_m=self.pos_long_m,
            pos_lat_m=self.pos_lat_m,
            vel_long_mps=self.vel_long_mps,
            vel_lat_mps=self.vel_lat_mps,
        )
        if self.vel_long_mps < 0.0:
            raise InvalidInputError("vehicles do not reverse: vel_long_mps must be >= 0")


@dataclass(frozen=True)
class TraceSample:
    """One step of a scenario trace, as recorded by the simulation engine."""

    t_s: float
    ego: VehicleState
    other: VehicleState
    gap_long_m: float
    gap_lat_m: float
    ttc_s: float  # math.inf when not on a closing course
    safe: bool
    decel_cmd_mps2: float


def _advance_axis(
    pos: float, vel: float, accel: float, dt: float, clamp_at_zero: bool
) -> tuple[float, float]:
    """One constant-acceleration update of a single axis.

    With clamp_at_zero the velocity is floored at 0 and the position update is
    truncated at the stopping instant, so stopping distance does not depend on dt.
    """
    v_end = vel + accel * dt
    if clamp_at_zero and v_end < 0.0:
        t_stop = vel / -accel if accel < 0.0 else 0.0
        return pos + vel * t_stop + 0.5 * accel * t_stop * t_stop, 0.0
    return pos + vel * dt + 0.5 * accel * dt * dt, v_end


def step_vehicle(
    state: VehicleState,
    accel_long_mps2: float,
    accel_lat_mps2: float,
    dt_s: float,
) -> VehicleState:
    """Advance a vehicle by one constant-acceleration step.

    The longitudinal axis never reaches negative velocity; the lateral axis is
    unconstrained in sign (lane changes go both ways).
    """
    _require_finite(
        accel_long_mps2=accel_long_mps2, accel_lat_mps2=accel_lat_mps2, dt_s=dt_s
    )
    if dt_s <= 0.0:
        raise InvalidInputError(f"dt_s must be positive, got {dt_s}")
    x, vx = _advance_axis(state.pos_long_m, state.vel_long_mps, accel_long_mps2, dt_s, True)
    y, vy = _advance_axis(state.pos_lat_m, state.vel_lat_mps, accel_lat_mps2, dt_s, False)
    return VehicleState(pos_long_m=x, pos_lat_m=y, vel_long_mps=vx, vel_lat_mps=vy)


def gap_longitudinal(
    ego: VehicleState,
    other: VehicleState,
    ego_dims: VehicleDims,
    other_dims: VehicleDims,
) -> float:
    """Bumper-to-bumper longitudinal gap; negative when the footprints overlap in x."""
    return abs(ego.pos_long_m - other.pos_long_m) - (ego_dims.length_m + other_dims.length_m) / 2.0


def gap_lateral(
    ego: VehicleState,
    other: VehicleState,
    ego_dims: VehicleDims,
    other_dims: VehicleDims,
) -> float:
    """Side-to-side lateral gap; negative when the footprints overlap in y."""
    return abs(ego.pos_lat_m - other.pos_lat_m) - (ego_dims.width_m + other_dims.width_m) / 2.0


def overlaps(
    ego: VehicleState,
    other: VehicleState,
    ego_dims: VehicleDims,
    other_dims: VehicleDims,
) -> bool:
    """Axis-aligned rectangle intersection: the collision ground truth of the harness."""
    return (
        gap_longitudinal(ego, other, ego_dims, other_dims) < 0.0
        and gap_lateral(ego, other, ego_dims, other_dims) < 0.0
    )

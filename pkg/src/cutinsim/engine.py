"""Scenario construction, closed-loop simulation, parameter sweeps, classification."""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

from . import metrics, safety_models
from .errors import ConfigError
from .kinematics import (
    TraceSample,
    VehicleDims,
    VehicleState,
    gap_lateral,
    gap_longitudinal,
    step_vehicle,
)
from .safety_models import ModelParams, rba_velocity_update

SCENARIO_KINDS = ("cut_in", "cut_out", "car_following")
CRITICAL = "critical"
NON_CRITICAL = "non_critical"

DEFAULT_DIMS = VehicleDims(width_m=2.0, length_m=5.0)


@dataclass(frozen=True)
class ScenarioParams:
    """One two-vehicle scenario.

    d_x0_m is the initial bumper-to-bumper longitudinal gap and d_y0_m the
    initial center-to-center lateral offset. In cut_in the other vehicle merges
    from the adjacent lane into the ego lane over
    [lc_start_s, lc_start_s + lc_duration_s]; cut_out mirrors that in time;
    car_following keeps both vehicles in lane (d_y0_m must be 0) and allows a
    piecewise-constant speed profile for the other vehicle.
    """

    kind: str
    v_e0_mps: float
    v_o0_mps: float
    d_x0_m: float
    d_y0_m: float
    lc_start_s: float = 1.0
    lc_duration_s: float = 2.0
    duration_s: float = 12.0
    dt_s: float = 0.05
    other_speed_profile: tuple[tuple[float, float], ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in SCENARIO_KINDS:
            raise ConfigError(
                f"scenario.kind {self.kind!r} not one of {SCENARIO_KINDS}", key="scenario.kind"
            )
        if not self.d_x0_m > 0.0:
            raise ConfigError("scenario.d_x0 must be > 0", key="scenario.d_x0")
        if not self.dt_s > 0.0:
            raise ConfigError("scenario.dt_s must be > 0", key="scenario.dt_s")
        if not self.lc_duration_s > 0.0:
            raise ConfigError("scenario.lc_duration_s must be > 0", key="scenario.lc_duration_s")
        if self.lc_start_s < 0.0:
            raise ConfigError("scenario.lc_start_s must be >= 0", key="scenario.lc_start_s")
        if self.duration_s < self.lc_start_s + self.lc_duration_s:
            raise ConfigError(
                "scenario.duration_s must cover lc_start_s + lc_duration_s",
                key="scenario.duration_s",
            )
        if self.v_e0_mps < 0.0 or self.v_o0_mps < 0.0:
            raise ConfigError("scenario velocities must be >= 0", key="scenario.v_e0")
        if self.d_y0_m < 0.0:
            raise ConfigError("scenario.d_y0 must be >= 0", key="scenario.d_y0")
        if self.kind == "car_following" and self.d_y0_m != 0.0:
            raise ConfigError(
                "scenario.d_y0 must be 0 for car_following", key="scenario.d_y0"
            )
        if self.kind != "car_following" and self.other_speed_profile:
            raise ConfigError(
                "scenario.other_speed_profile is only valid for car_following",
                key="scenario.other_speed_profile",
            )
        last_t = 0.0
        for t, v in self.other_speed_profile:
            if t < last_t:
                raise ConfigError(
                    "scenario.other_speed_profile times must be nondecreasing",
                    key="scenario.other_speed_profile",
                )
            if v < 0.0:
                raise ConfigError(
                    "scenario.other_speed_profile velocities must be >= 0",
                    key="scenario.other_speed_profile",
                )
            last_t = t


@dataclass(frozen=True)
class SimResult:
    trace: tuple[TraceSample, ...]
    collided: bool
    min_gap_long_m: float
    min_ttc_s: float  # math.inf when the pair never closes
    classification: str
    model_name: str


@dataclass(frozen=True)
class ClassifyThresholds:
    ttc_critical_s: float = 2.0
    comfort_decel_mps2: float = 3.5


def _smoothstep(u: float) -> float:
    return u * u * (3.0 - 2.0 * u)


def _smoothstep_rate(u: float) -> float:
    return 6.0 * u * (1.0 - u)


@dataclass(frozen=True)
class Scenario:
    """Initial ego state plus the closed-form motion plan of the other vehicle."""

    params: ScenarioParams
    ego0: VehicleState
    ego_dims: VehicleDims
    other_dims: VehicleDims

    def lateral_offset(self, t_s: float) -> tuple[float, float]:
        """Lateral position of the other vehicle and its rate at time t."""
        p = self.params
        if p.kind == "car_following":
            return 0.0, 0.0
        u = (t_s - p.lc_start_s) / p.lc_duration_s
        if u <= 0.0:
            s, rate = 0.0, 0.0
        elif u >= 1.0:
            s, rate = 1.0, 0.0
        else:
            s = _smoothstep(u)
            rate = _smoothstep_rate(u) / p.lc_duration_s
        if p.kind == "cut_in":
            return p.d_y0_m * (1.0 - s), -p.d_y0_m * rate
        return p.d_y0_m * s, p.d_y0_m * rate  # cut_out

    def other_speed(self, t_s: float) -> float:
        v = self.params.v_o0_mps
        for t_change, v_new in self.params.other_speed_profile:
            if t_s >= t_change:
                v = v_new
            else:
                break
        return v

    def other_state(self, t_s: float) -> VehicleState:
        p = self.params
        x = p.d_x0_m + (self.ego_dims.length_m + self.other_dims.length_m) / 2.0
        t_prev, v = 0.0, p.v_o0_mps
        for t_change, v_new in p.other_speed_profile:
            if t_s < t_change:
                break
            x += v * (t_change - t_prev)
            t_prev, v = t_change, v_new
        x += v * (t_s - t_prev)
        y, vy = self.lateral_offset(t_s)
        return VehicleState(pos_long_m=x, pos_lat_m=y, vel_long_mps=v, vel_lat_mps=vy)


def build_scenario(
    p: ScenarioParams,
    ego_dims: VehicleDims = DEFAULT_DIMS,
    other_dims: VehicleDims = DEFAULT_DIMS,
) -> Scenario:
    """Initial states and other-vehicle motion plan for one scenario.

    The ego starts at the origin of its lane; the other vehicle starts d_x0
    (bumper gap) ahead with lateral offset per the scenario kind.
    """
    ego0 = VehicleState(
        pos_long_m=0.0, pos_lat_m=0.0, vel_long_mps=p.v_e0_mps, vel_lat_mps=0.0
    )
    return Scenario(params=p, ego0=ego0, ego_dims=ego_dims, other_dims=other_dims)


def classify_event(result: SimResult, thresholds: ClassifyThresholds) -> str:
    """Critical when the run collided, dipped under the TTC threshold, or braked
    harder than the comfort level; non-critical otherwise."""
    peak_decel = max((s.decel_cmd_mps2 for s in result.trace), default=0.0)
    if (
        result.collided
        or result.min_ttc_s < thresholds.ttc_critical_s
        or peak_decel > thresholds.comfort_decel_mps2
    ):
        return CRITICAL
    return NON_CRITICAL


def run_closed_loop(
    p: ScenarioParams,
    model_name: str,
    params: ModelParams = ModelParams(),
    thresholds: ClassifyThresholds = ClassifyThresholds(),
    ego_dims: VehicleDims = DEFAULT_DIMS,
    other_dims: VehicleDims = DEFAULT_DIMS,
) -> SimResult:
    """Simulate one scenario under one safety model.

    Each step: compute gaps and TTC, ask the model for a decision, apply the
    commanded deceleration to the ego, advance both vehicles. Stepping stops
    (and the collision flag latches) as soon as the footprints overlap.
    """
    scenario = build_scenario(p, ego_dims, other_dims)
    model = safety_models.create_model(model_name, params, dt_s=p.dt_s)
    model.reset()

    ego = scenario.ego0
    dt = p.dt_s
    n_steps = round(p.duration_s / dt)
    trace: list[TraceSample] = []
    collided = False

    for i in range(n_steps + 1):
        t = i * dt
        other = scenario.other_state(t)
        gap_long = gap_longitudinal(ego, other, ego_dims, other_dims)
        gap_lat = gap_lateral(ego, other, ego_dims, other_dims)
        if gap_long < 0.0 and gap_lat < 0.0:
            trace.append(
                TraceSample(t, ego, other, gap_long, gap_lat, 0.0, False, 0.0)
            )
            collided = True
            break
        closing = ego.vel_long_mps - other.vel_long_mps
        if gap_long >= 0.0:
            ttc = metrics.compute_features(gap_long, ego.vel_long_mps, closing).ttc_s
        else:
            # longitudinally alongside but laterally separated: no closing course
            ttc = math.inf
        decision, command = model.decide(ego, other, ego_dims, other_dims, ttc)
        trace.append(
            TraceSample(
                t, ego, other, gap_long, gap_lat, ttc, decision.safe, decision.decel_cmd_mps2
            )
        )
        if i == n_steps:
            break
        if model.per_step_decrement:
            v_next = rba_velocity_update(ego.vel_long_mps, command, model.params)
            accel = (v_next - ego.vel_long_mps) / dt
        else:
            accel = command
        ego = step_vehicle(ego, accel, 0.0, dt)

    min_gap = min(s.gap_long_m for s in trace)
    finite_ttcs = [s.ttc_s for s in trace if math.isfinite(s.ttc_s)]
    min_ttc = min(finite_ttcs) if finite_ttcs else math.inf
    result = SimResult(
        trace=tuple(trace),
        collided=collided,
        min_gap_long_m=min_gap,
        min_ttc_s=min_ttc,
        classification="",
        model_name=model_name,
    )
    return replace(result, classification=classify_event(result, thresholds))


@dataclass(frozen=True)
class SweepGrid:
    """Cartesian grid over the four scenario scalars."""

    v_e0_mps: tuple[float, ...]
    v_o0_mps: tuple[float, ...]
    d_x0_m: tuple[float, ...]
    d_y0_m: tuple[float, ...]

    def __post_init__(self) -> None:
        for key in ("v_e0_mps", "v_o0_mps", "d_x0_m", "d_y0_m"):
            if not getattr(self, key):
                raise ConfigError(f"sweep.{key} must be nonempty", key=f"sweep.{key}")

    def points(self) -> list[tuple[float, float, float, float]]:
        return list(
            itertools.product(self.v_e0_mps, self.v_o0_mps, self.d_x0_m, self.d_y0_m)
        )


@dataclass(frozen=True)
class SweepItem:
    """One grid point of a sweep: its coordinates plus the result or an error."""

    model_name: str
    grid_index: int
    point: tuple[float, float, float, float]  # (v_e0, v_o0, d_x0, d_y0)
    result: SimResult | None
    error: str | None = None


def _run_sweep_point(
    args: tuple[ScenarioParams, str, int, tuple[float, float, float, float], ModelParams, ClassifyThresholds]
) -> SweepItem:
    base, model_name, index, point, params, thresholds = args
    v_e0, v_o0, d_x0, d_y0 = point
    try:
        scenario = replace(base, v_e0_mps=v_e0, v_o0_mps=v_o0, d_x0_m=d_x0, d_y0_m=d_y0)
        result = run_closed_loop(scenario, model_name, params, thresholds)
        return SweepItem(model_name, index, point, result)
    except Exception as exc:  # recorded as an error row, never aborts the sweep
        return SweepItem(model_name, index, point, None, error=f"{type(exc).__name__}: {exc}")


def sweep(
    grid: SweepGrid,
    models: Sequence[str],
    base: ScenarioParams,
    params: ModelParams = ModelParams(),
    thresholds: ClassifyThresholds = ClassifyThresholds(),
    jobs: int = 1,
) -> list[SweepItem]:
    """Simulate the full grid for every model.

    Results come back ordered by (model, grid index) regardless of how many
    worker processes execute them.
    """
    if not models:
        raise ConfigError("comparison needs at least one model", key="models")
    points = grid.points()
    tasks = [
        (base, model_name, index, point, params, thresholds)
        for model_name in models
        for index, point in enumerate(points)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_sweep_point, tasks, chunksize=8))
    return [_run_sweep_point(task) for task in tasks]


def feasibility_bound(
    v_e0_mps: float, v_o0_mps: float, a_max_mps2: float, t_react_s: float
) -> float:
    """Minimum initial gap at which full braking after the reaction time avoids
    intercept, assuming the other vehicle holds speed."""
    if a_max_mps2 <= 0.0:
        raise ConfigError("a_max must be positive", key="a_max")
    dv = max(v_e0_mps - v_o0_mps, 0.0)
    return dv * t_react_s + dv * dv / (2.0 * a_max_mps2)

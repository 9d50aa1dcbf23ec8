"""Safety decision models behind one small interface.

The primary model ("rba") is a rules-based check: a lateral clearance gate
combined with a longitudinal gate that accepts either a raw distance margin or
a stopping-time margin, plus a proportional braking law driven by distance and
TTC shortfalls. The baselines (rss, reg157, cc_human, fsm, idm) are compact
parameterized stand-ins for the systems they are named after, not
full-fidelity ports of those systems.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import ConfigError, InvalidInputError
from .kinematics import VehicleDims, VehicleState, gap_lateral, gap_longitudinal
from .metrics import CLOSING_SPEED_FLOOR_MPS

MODEL_NAMES = ("rba", "rss", "reg157", "cc_human", "fsm", "idm", "none")

RATIONALE_SAFE = "safe"
RATIONALE_MARGIN_PASS = "margin-pass"
RATIONALE_LATERAL_FAIL = "lateral-fail"
RATIONALE_LONGITUDINAL_FAIL = "longitudinal-fail"
RATIONALE_LANE_CHANGE_ADVISED = "lane-change-advised"


@dataclass(frozen=True)
class Decision:
    """Outcome of one safety evaluation."""

    safe: bool
    decel_cmd_mps2: float = 0.0
    rationale: str = RATIONALE_SAFE

    def __post_init__(self) -> None:
        if self.decel_cmd_mps2 < 0.0:
            raise InvalidInputError("decel_cmd_mps2 must be >= 0")
        if self.safe and self.decel_cmd_mps2 != 0.0:
            raise InvalidInputError("a safe decision must not command braking")


@dataclass(frozen=True)
class RbaParams:
    """Thresholds and constants of the rules-based check and braking law.

    ttc_safe_s sets where proportional braking starts to engage: below ~5 s the
    controller cannot shed closing speeds above roughly 14 m/s in time, so the
    default is deliberately conservative.

    step_freq_hz scales the per-step velocity decrement and must equal 1/dt of
    the simulation loop; the engine enforces that.
    """

    d_lat_safe_m: float = 0.5
    d_safe_m: float = 10.0
    a_max_mps2: float = 6.0
    t_react_s: float = 0.5
    v_min_mps: float = 0.0
    ttc_safe_s: float = 6.0
    safety_buffer_m: float = 2.0
    step_freq_hz: float = 20.0
    time_margin_s: float = 0.1
    headway_gain_s: float = 0.0  # speed-proportional growth of the safe distance

    def __post_init__(self) -> None:
        if self.a_max_mps2 <= 0.0:
            raise InvalidInputError("a_max_mps2 must be positive")
        if self.ttc_safe_s <= 0.0:
            raise InvalidInputError("ttc_safe_s must be positive")
        if self.step_freq_hz <= 0.0:
            raise InvalidInputError("step_freq_hz must be positive")
        if self.d_safe_m + self.safety_buffer_m <= 0.0:
            raise InvalidInputError("d_safe_m + safety_buffer_m must be positive")
        if self.v_min_mps < 0.0:
            raise InvalidInputError("v_min_mps must be >= 0")


def rba_is_safe(
    ego: VehicleState,
    cut: VehicleState,
    ego_dims: VehicleDims,
    cut_dims: VehicleDims,
    p: RbaParams,
) -> Decision:
    """Rules-based safety check for an ego/cut-in pair.

    Safe requires the lateral clearance gate AND the longitudinal gate, where
    the longitudinal gate accepts either a raw gap above the (speed-adjusted)
    safe distance or a stopping-time margin: gap / |dv| must exceed
    dv / (2 a_max) + reaction time + fixed time margin. Non-closing pairs pass
    the margin clause by definition.
    """
    lat_gap = gap_lateral(ego, cut, ego_dims, cut_dims)
    if not (lat_gap > p.d_lat_safe_m):
        return Decision(safe=False, rationale=RATIONALE_LATERAL_FAIL)
    long_gap = gap_longitudinal(ego, cut, ego_dims, cut_dims)
    d_safe_eff = p.d_safe_m + p.headway_gain_s * ego.vel_long_mps
    if long_gap > d_safe_eff:
        return Decision(safe=True, rationale=RATIONALE_SAFE)
    dv = ego.vel_long_mps - cut.vel_long_mps
    if dv < CLOSING_SPEED_FLOOR_MPS:
        # not closing: the stopping-time margin holds trivially
        return Decision(safe=True, rationale=RATIONALE_MARGIN_PASS)
    margin_s = dv / (2.0 * p.a_max_mps2) + p.t_react_s + p.time_margin_s
    if long_gap / abs(dv) > margin_s:
        return Decision(safe=True, rationale=RATIONALE_MARGIN_PASS)
    return Decision(safe=False, rationale=RATIONALE_LONGITUDINAL_FAIL)


def rba_decel(gap_long_m: float, ttc_s: float, p: RbaParams) -> float:
    """Per-step velocity decrement (m/s) commanded once the check reports unsafe.

    The decrement is the larger of the distance shortfall and the TTC shortfall
    (both normalized), scaled by a_max / step frequency, clamped to
    [0, a_max]. An infinite TTC contributes -inf and never dominates.
    """
    denom = p.d_safe_m + p.safety_buffer_m
    shortfall_gap = (denom - gap_long_m) / denom
    if math.isfinite(ttc_s):
        shortfall_ttc = (p.ttc_safe_s - ttc_s) / p.ttc_safe_s
    else:
        shortfall_ttc = -math.inf
    dv = max(shortfall_gap, shortfall_ttc) * p.a_max_mps2 / p.step_freq_hz
    return min(max(dv, 0.0), p.a_max_mps2)


def rba_velocity_update(v_ego_mps: float, dv_dec_mps: float, p: RbaParams) -> float:
    """Apply one braking decrement, never dropping below the configured floor."""
    if dv_dec_mps < 0.0:
        raise InvalidInputError("dv_dec_mps must be >= 0")
    return max(v_ego_mps - dv_dec_mps, p.v_min_mps)


# ---------------------------------------------------------------------------
# Baseline models (simplified stand-ins; each is a few lines by design)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RssParams:
    response_time_s: float = 0.75
    accel_max_response_mps2: float = 2.0
    ego_brake_min_mps2: float = 4.0
    other_brake_max_mps2: float = 6.0

    def __post_init__(self) -> None:
        if self.response_time_s <= 0.0:
            raise InvalidInputError("response_time_s must be positive")
        if self.ego_brake_min_mps2 <= 0.0 or self.other_brake_max_mps2 <= 0.0:
            raise InvalidInputError("braking levels must be positive")


def rss_min_gap(v_ego_mps: float, v_cut_mps: float, p: RssParams) -> float:
    """Minimum longitudinal distance of the responsibility-sensitive envelope."""
    rho = p.response_time_s
    d = (
        v_ego_mps * rho
        + 0.5 * p.accel_max_response_mps2 * rho * rho
        + (v_ego_mps + rho * p.accel_max_response_mps2) ** 2 / (2.0 * p.ego_brake_min_mps2)
        - v_cut_mps * v_cut_mps / (2.0 * p.other_brake_max_mps2)
    )
    return max(d, 0.0)


def rss_evaluate(
    ego: VehicleState,
    cut: VehicleState,
    ego_dims: VehicleDims,
    cut_dims: VehicleDims,
    p: RssParams,
) -> Decision:
    if gap_lateral(ego, cut, ego_dims, cut_dims) > 0.0:
        return Decision(safe=True)
    gap = gap_longitudinal(ego, cut, ego_dims, cut_dims)
    if gap < rss_min_gap(ego.vel_long_mps, cut.vel_long_mps, p):
        return Decision(
            safe=False,
            decel_cmd_mps2=p.ego_brake_min_mps2,
            rationale=RATIONALE_LONGITUDINAL_FAIL,
        )
    return Decision(safe=True)


@dataclass(frozen=True)
class Reg157Params:
    min_time_gap_s: float = 1.0
    min_standstill_gap_m: float = 2.0
    brake_mps2: float = 6.0

    def __post_init__(self) -> None:
        if self.min_time_gap_s <= 0.0:
            raise InvalidInputError("min_time_gap_s must be positive")
        if self.brake_mps2 <= 0.0:
            raise InvalidInputError("brake_mps2 must be positive")


def reg157_evaluate(
    ego: VehicleState,
    cut: VehicleState,
    ego_dims: VehicleDims,
    cut_dims: VehicleDims,
    p: Reg157Params,
) -> Decision:
    """Minimum following-distance threshold, a low-speed regulatory baseline."""
    if gap_lateral(ego, cut, ego_dims, cut_dims) > 0.0:
        return Decision(safe=True)
    gap = gap_longitudinal(ego, cut, ego_dims, cut_dims)
    threshold = max(p.min_standstill_gap_m, ego.vel_long_mps * p.min_time_gap_s)
    if gap < threshold:
        return Decision(
            safe=False, decel_cmd_mps2=p.brake_mps2, rationale=RATIONALE_LONGITUDINAL_FAIL
        )
    return Decision(safe=True)


@dataclass(frozen=True)
class CcHumanParams:
    lat_intrusion_trigger_m: float = 0.3
    perception_ttc_s: float = 2.0
    reaction_delay_s: float = 0.75
    brake_mps2: float = 6.0

    def __post_init__(self) -> None:
        if self.perception_ttc_s <= 0.0 or self.reaction_delay_s < 0.0:
            raise InvalidInputError("cc_human time constants must be positive")
        if self.brake_mps2 <= 0.0:
            raise InvalidInputError("brake_mps2 must be positive")


def cc_human_evaluate(
    ego: VehicleState,
    cut: VehicleState,
    ego_dims: VehicleDims,
    cut_dims: VehicleDims,
    p: CcHumanParams,
    timer_s: float,
    dt_s: float,
) -> tuple[Decision, float]:
    """One step of the cautious-driver state machine.

    Risk is perceived while the cut vehicle intrudes laterally beyond the
    trigger AND the TTC is below the perception threshold. timer_s is the time
    already spent perceiving (0 at scenario start, or when perception lapses);
    braking begins only once it reaches the reaction delay. Returns the
    decision plus the updated timer.
    """
    intrusion_m = -gap_lateral(ego, cut, ego_dims, cut_dims)
    gap = gap_longitudinal(ego, cut, ego_dims, cut_dims)
    dv = ego.vel_long_mps - cut.vel_long_mps
    if gap >= 0.0 and dv > CLOSING_SPEED_FLOOR_MPS:
        ttc = gap / dv
    elif gap < 0.0:
        ttc = 0.0
    else:
        ttc = math.inf
    perceived = intrusion_m > p.lat_intrusion_trigger_m and ttc < p.perception_ttc_s
    if not perceived:
        return Decision(safe=True), 0.0
    if timer_s >= p.reaction_delay_s:
        decision = Decision(
            safe=False, decel_cmd_mps2=p.brake_mps2, rationale=RATIONALE_LONGITUDINAL_FAIL
        )
    else:
        # still within the reaction delay: risk is seen but no braking yet
        decision = Decision(safe=False, rationale=RATIONALE_LONGITUDINAL_FAIL)
    return decision, timer_s + dt_s


@dataclass(frozen=True)
class FsmParams:
    proximity_scale_m: float = 20.0
    ttc_scale_s: float = 3.0
    braking_gain: float = 1.0
    a_max_mps2: float = 6.0

    def __post_init__(self) -> None:
        if self.proximity_scale_m <= 0.0 or self.ttc_scale_s <= 0.0:
            raise InvalidInputError("fsm scales must be positive")
        if self.a_max_mps2 <= 0.0:
            raise InvalidInputError("a_max_mps2 must be positive")


def fsm_risk(gap_long_m: float, ttc_s: float, p: FsmParams) -> float:
    """Unitless risk in [0, 1]: max of proximity and urgency indicators."""
    u_d = (p.proximity_scale_m - gap_long_m) / p.proximity_scale_m
    if math.isfinite(ttc_s):
        u_t = (p.ttc_scale_s - ttc_s) / p.ttc_scale_s
    else:
        u_t = -math.inf
    return max(min(max(u_d, 0.0), 1.0), min(max(u_t, 0.0), 1.0))


def fsm_evaluate(
    ego: VehicleState,
    cut: VehicleState,
    ego_dims: VehicleDims,
    cut_dims: VehicleDims,
    p: FsmParams,
) -> Decision:
    if gap_lateral(ego, cut, ego_dims, cut_dims) > 0.0:
        return Decision(safe=True)
    gap = gap_longitudinal(ego, cut, ego_dims, cut_dims)
    dv = ego.vel_long_mps - cut.vel_long_mps
    if gap < 0.0:
        ttc = 0.0
    elif dv > CLOSING_SPEED_FLOOR_MPS:
        ttc = gap / dv
    else:
        ttc = math.inf
    risk = fsm_risk(gap, ttc, p)
    if risk > 0.0:
        return Decision(
            safe=False,
            decel_cmd_mps2=risk * p.braking_gain * p.a_max_mps2,
            rationale=RATIONALE_LONGITUDINAL_FAIL,
        )
    return Decision(safe=True)


@dataclass(frozen=True)
class IdmParams:
    v_desired_mps: float = 30.0
    time_headway_s: float = 1.5
    min_spacing_m: float = 2.0
    a_max_mps2: float = 1.5
    b_comfort_mps2: float = 2.0
    delta: float = 4.0

    def __post_init__(self) -> None:
        if self.v_desired_mps <= 0.0 or self.time_headway_s <= 0.0:
            raise InvalidInputError("idm desired speed and headway must be positive")
        if self.a_max_mps2 <= 0.0 or self.b_comfort_mps2 <= 0.0:
            raise InvalidInputError("idm acceleration bounds must be positive")


def idm_acceleration(
    v_mps: float, gap_m: float, rel_vel_mps: float, p: IdmParams
) -> float:
    """Intelligent-driver-model acceleration; rel_vel_mps positive when closing.

    Clamped below at -2 b (emergency braking floor); gap_m may be math.inf for
    free flow but must be positive.
    """
    if not gap_m > 0.0:
        raise InvalidInputError(f"gap_m must be > 0, got {gap_m}")
    s_star = (
        p.min_spacing_m
        + v_mps * p.time_headway_s
        + v_mps * rel_vel_mps / (2.0 * math.sqrt(p.a_max_mps2 * p.b_comfort_mps2))
    )
    a = p.a_max_mps2 * (
        1.0 - (v_mps / p.v_desired_mps) ** p.delta - (s_star / gap_m) ** 2
    )
    return max(a, -2.0 * p.b_comfort_mps2)


@dataclass(frozen=True)
class ModelParams:
    """Parameter bundle holding one record per registered model."""

    rba: RbaParams = RbaParams()
    rss: RssParams = RssParams()
    reg157: Reg157Params = Reg157Params()
    cc_human: CcHumanParams = CcHumanParams()
    fsm: FsmParams = FsmParams()
    idm: IdmParams = IdmParams()


# ---------------------------------------------------------------------------
# Engine-facing adapters
# ---------------------------------------------------------------------------


class _Adapter:
    """Per-run wrapper turning a model into a step function for the engine.

    decide() returns (decision, command). For per_step_decrement adapters the
    command is a velocity decrement in m/s per step; otherwise it is a signed
    longitudinal acceleration in m/s^2.
    """

    name = "none"
    per_step_decrement = False

    def reset(self) -> None:
        pass

    def decide(
        self,
        ego: VehicleState,
        cut: VehicleState,
        ego_dims: VehicleDims,
        cut_dims: VehicleDims,
        ttc_s: float,
    ) -> tuple[Decision, float]:
        raise NotImplementedError


class NullModel(_Adapter):
    """Uncontrolled ego: never brakes. Used as the collision baseline."""

    name = "none"

    def decide(self, ego, cut, ego_dims, cut_dims, ttc_s):
        return Decision(safe=True), 0.0


class RbaModel(_Adapter):
    name = "rba"
    per_step_decrement = True

    def __init__(self, params: RbaParams, saturation_steps: int = 5):
        self.params = params
        self.saturation_steps = saturation_steps
        self._saturated_run = 0

    def reset(self) -> None:
        self._saturated_run = 0

    def decide(self, ego, cut, ego_dims, cut_dims, ttc_s):
        checked = rba_is_safe(ego, cut, ego_dims, cut_dims, self.params)
        if checked.safe:
            self._saturated_run = 0
            return checked, 0.0
        gap = gap_longitudinal(ego, cut, ego_dims, cut_dims)
        dv_step = rba_decel(gap, ttc_s, self.params)
        decel = dv_step * self.params.step_freq_hz
        # braking pinned at the physical limit for several consecutive steps
        # means braking alone is not enough; advise an evasive lane change
        if decel >= self.params.a_max_mps2 * (1.0 - 1e-9):
            self._saturated_run += 1
        else:
            self._saturated_run = 0
        rationale = checked.rationale
        if self._saturated_run >= self.saturation_steps:
            rationale = RATIONALE_LANE_CHANGE_ADVISED
        return Decision(safe=False, decel_cmd_mps2=decel, rationale=rationale), dv_step


class RssModel(_Adapter):
    name = "rss"

    def __init__(self, params: RssParams):
        self.params = params

    def decide(self, ego, cut, ego_dims, cut_dims, ttc_s):
        d = rss_evaluate(ego, cut, ego_dims, cut_dims, self.params)
        return d, -d.decel_cmd_mps2


class Reg157Model(_Adapter):
    name = "reg157"

    def __init__(self, params: Reg157Params):
        self.params = params

    def decide(self, ego, cut, ego_dims, cut_dims, ttc_s):
        d = reg157_evaluate(ego, cut, ego_dims, cut_dims, self.params)
        return d, -d.decel_cmd_mps2


class CcHumanModel(_Adapter):
    name = "cc_human"

    def __init__(self, params: CcHumanParams, dt_s: float):
        self.params = params
        self.dt_s = dt_s
        self._timer_s = 0.0

    def reset(self) -> None:
        self._timer_s = 0.0

    def decide(self, ego, cut, ego_dims, cut_dims, ttc_s):
        d, self._timer_s = cc_human_evaluate(
            ego, cut, ego_dims, cut_dims, self.params, self._timer_s, self.dt_s
        )
        return d, -d.decel_cmd_mps2


class FsmModel(_Adapter):
    name = "fsm"

    def __init__(self, params: FsmParams):
        self.params = params

    def decide(self, ego, cut, ego_dims, cut_dims, ttc_s):
        d = fsm_evaluate(ego, cut, ego_dims, cut_dims, self.params)
        return d, -d.decel_cmd_mps2


class IdmModel(_Adapter):
    name = "idm"

    def __init__(self, params: IdmParams):
        self.params = params

    def decide(self, ego, cut, ego_dims, cut_dims, ttc_s):
        if gap_lateral(ego, cut, ego_dims, cut_dims) > 0.0:
            # nothing in lane: free-flow acceleration toward the desired speed
            a = idm_acceleration(ego.vel_long_mps, math.inf, 0.0, self.params)
        else:
            gap = gap_longitudinal(ego, cut, ego_dims, cut_dims)
            dv = ego.vel_long_mps - cut.vel_long_mps
            if gap <= 0.0:
                a = -2.0 * self.params.b_comfort_mps2
            else:
                a = idm_acceleration(ego.vel_long_mps, gap, dv, self.params)
        if a >= 0.0:
            return Decision(safe=True), a
        return (
            Decision(safe=False, decel_cmd_mps2=-a, rationale=RATIONALE_LONGITUDINAL_FAIL),
            a,
        )


def create_model(name: str, params: ModelParams, dt_s: float) -> _Adapter:
    """Instantiate a model adapter by its canonical name.

    The rba adapter runs with step_freq_hz pinned to 1/dt_s so the per-step
    velocity decrement matches the simulation step.
    """
    if name == "rba":
        return RbaModel(replace(params.rba, step_freq_hz=1.0 / dt_s))
    if name == "rss":
        return RssModel(params.rss)
    if name == "reg157":
        return Reg157Model(params.reg157)
    if name == "cc_human":
        return CcHumanModel(params.cc_human, dt_s)
    if name == "fsm":
        return FsmModel(params.fsm)
    if name == "idm":
        return IdmModel(params.idm)
    if name == "none":
        return NullModel()
    raise ConfigError(f"unknown safety model {name!r}; expected one of {MODEL_NAMES}", key="model")

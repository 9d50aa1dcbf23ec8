"""Surrogate safety features (DHW, THW, TTC, ITTC) and analytic TTC sensitivities."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidInputError, UndefinedSensitivityError

# Closing speeds below this floor are treated as non-closing; keeps TTC
# deterministic instead of dividing by a near-zero velocity difference.
CLOSING_SPEED_FLOOR_MPS = 1e-6


@dataclass(frozen=True)
class SurrogateFeatures:
    dhw_m: float
    thw_s: float  # inf when the follower is stopped
    ttc_s: float  # inf when the pair is not closing
    ittc_per_s: float  # 0 when ttc_s is inf


@dataclass(frozen=True)
class SensitivityResult:
    s_long_s_per_m: float  # d TTC / d gap
    s_rel_s2_per_m: float  # d TTC / d closing speed


def compute_features(
    gap_long_m: float, follower_vel_mps: float, rel_vel_mps: float
) -> SurrogateFeatures:
    """Surrogate features for a leader/follower pair at one step.

    rel_vel_mps is follower velocity minus leader velocity (positive = closing).
    The caller must have ruled out overlap: a negative gap is rejected.
    """
    for name, value in (
        ("gap_long_m", gap_long_m),
        ("follower_vel_mps", follower_vel_mps),
        ("rel_vel_mps", rel_vel_mps),
    ):
        if not math.isfinite(value):
            raise InvalidInputError(f"{name} must be finite, got {value!r}")
    if gap_long_m < 0.0:
        raise InvalidInputError(
            f"negative gap ({gap_long_m}): detect overlap before computing features"
        )
    if follower_vel_mps > CLOSING_SPEED_FLOOR_MPS:
        thw = gap_long_m / follower_vel_mps
    else:
        thw = math.inf
    if rel_vel_mps > CLOSING_SPEED_FLOOR_MPS:
        ttc = gap_long_m / rel_vel_mps
        ittc = 1.0 / ttc if ttc > 0.0 else math.inf
    else:
        ttc = math.inf
        ittc = 0.0
    return SurrogateFeatures(dhw_m=gap_long_m, thw_s=thw, ttc_s=ttc, ittc_per_s=ittc)


def ttc_sensitivity(gap_long_m: float, rel_vel_mps: float) -> SensitivityResult:
    """Partial derivatives of TTC = gap / closing speed.

    d TTC / d gap = 1 / v_rel and d TTC / d v_rel = -gap / v_rel^2; both are
    undefined when the pair is not closing (TTC infinite).
    """
    if gap_long_m < 0.0:
        raise InvalidInputError(f"gap_long_m must be >= 0, got {gap_long_m}")
    if rel_vel_mps <= CLOSING_SPEED_FLOOR_MPS:
        raise UndefinedSensitivityError(
            f"closing speed {rel_vel_mps} at or below floor: TTC is infinite"
        )
    return SensitivityResult(
        s_long_s_per_m=1.0 / rel_vel_mps,
        s_rel_s2_per_m=-gap_long_m / (rel_vel_mps * rel_vel_mps),
    )


def finite_difference_sensitivity(
    gap_long_m: float, rel_vel_mps: float, h: float
) -> SensitivityResult:
    """Central-difference estimate of the TTC sensitivities (verification oracle)."""
    if h <= 0.0 or not math.isfinite(h):
        raise InvalidInputError(f"perturbation h must be positive, got {h!r}")
    if rel_vel_mps - h <= CLOSING_SPEED_FLOOR_MPS:
        raise UndefinedSensitivityError(
            f"perturbation h={h} crosses the closing-speed floor at v_rel={rel_vel_mps}"
        )

    def ttc(d: float, v: float) -> float:
        return d / v

    s_long = (ttc(gap_long_m + h, rel_vel_mps) - ttc(gap_long_m - h, rel_vel_mps)) / (2.0 * h)
    s_rel = (ttc(gap_long_m, rel_vel_mps + h) - ttc(gap_long_m, rel_vel_mps - h)) / (2.0 * h)
    return SensitivityResult(s_long_s_per_m=s_long, s_rel_s2_per_m=s_rel)

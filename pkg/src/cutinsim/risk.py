"""Gaussian TTC risk: distribution fit, tail probability, per-model summaries.

The normal CDF is computed from a self-contained port of W. J. Cody's rational
Chebyshev approximation of erf/erfc (Math. Comp. 23, 1969; the scheme most
libm implementations use), so reports do not depend on the platform math
library. Double-precision accuracy is ~1e-16 relative, far inside the 1e-7
absolute contract.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Protocol, Sequence

import numpy as np

from .errors import DegenerateDistributionError, InsufficientDataError

_THRESH = 0.46875
_XSMALL = 1.11e-16
_XBIG = 26.543
_SQRPI = 5.6418958354775628695e-1  # 1/sqrt(pi)

_A = (
    3.16112374387056560e0,
    1.13864154151050156e2,
    3.77485237685302021e2,
    3.20937758913846947e3,
    1.85777706184603153e-1,
)
_B = (
    2.36012909523441209e1,
    2.44024637934444173e2,
    1.28261652607737228e3,
    2.84423683343917062e3,
)
_C = (
    5.64188496988670089e-1,
    8.88314979438837594e0,
    6.61191906371416295e1,
    2.98635138197400131e2,
    8.81952221241769090e2,
    1.71204761263407058e3,
    2.05107837782607147e3,
    1.23033935479799725e3,
    2.15311535474403846e-8,
)
_D = (
    1.57449261107098347e1,
    1.17693950891312499e2,
    5.37181101862009858e2,
    1.62138957456669019e3,
    3.29079923573345963e3,
    4.36261909014324716e3,
    3.43936767414372164e3,
    1.23033935480374942e3,
)
_P = (
    3.05326634961232344e-1,
    3.60344899949804439e-1,
    1.25781726111229246e-1,
    1.60837851487422766e-2,
    6.58749161529837803e-4,
    1.63153871373020978e-2,
)
_Q = (
    2.56852019228982242e0,
    1.87295284992346047e0,
    5.27905102951428412e-1,
    6.05183413124413191e-2,
    2.33520497626869185e-3,
)


def _erf_small(x: float) -> float:
    """erf(x) for |x| <= 0.46875."""
    y = abs(x)
    ysq = y * y if y > _XSMALL else 0.0
    xnum = _A[4] * ysq
    xden = ysq
    for i in range(3):
        xnum = (xnum + _A[i]) * ysq
        xden = (xden + _B[i]) * ysq
    return x * (xnum + _A[3]) / (xden + _B[3])


def _exp_scaled(y: float, r: float) -> float:
    # exp(-y*y) * r, with the argument split to limit cancellation in y*y
    ysq = math.floor(y * 16.0) / 16.0
    delta = (y - ysq) * (y + ysq)
    return math.exp(-ysq * ysq) * math.exp(-delta) * r


def erfc(x: float) -> float:
    """Complementary error function, accurate to double precision."""
    y = abs(x)
    if y <= _THRESH:
        result = 1.0 - _erf_small(x)
        return result
    if y <= 4.0:
        xnum = _C[8] * y
        xden = y
        for i in range(7):
            xnum = (xnum + _C[i]) * y
            xden = (xden + _D[i]) * y
        result = _exp_scaled(y, (xnum + _C[7]) / (xden + _D[7]))
    elif y < _XBIG:
        ysq = 1.0 / (y * y)
        xnum = _P[5] * ysq
        xden = ysq
        for i in range(4):
            xnum = (xnum + _P[i]) * ysq
            xden = (xden + _Q[i]) * ysq
        r = ysq * (xnum + _P[4]) / (xden + _Q[4])
        result = _exp_scaled(y, (_SQRPI - r) / y)
    else:
        result = 0.0
    if x < 0.0:
        return 2.0 - result
    return result


def erf(x: float) -> float:
    if abs(x) <= _THRESH:
        return _erf_small(x)
    return 1.0 - erfc(x)


def normal_cdf(z: float) -> float:
    """Standard normal CDF via erfc; monotone, 0 at -inf, 1 at +inf."""
    return 0.5 * erfc(-z * math.sqrt(0.5))


@dataclass(frozen=True)
class GaussianRisk:
    """Fitted TTC distribution plus the probability mass under the threshold."""

    mean_s: float
    std_s: float
    ttc_crit_s: float
    prob_below: float
    n_samples: int
    n_excluded_infinite: int


def fit_gaussian(ttc_samples: Iterable[float]) -> tuple[float, float]:
    """Sample mean and standard deviation (n-1 denominator) over finite samples.

    Infinite (non-closing) samples are excluded; fewer than two finite samples
    or zero spread raise.
    """
    values = np.asarray(list(ttc_samples), dtype=float)
    finite = values[np.isfinite(values)]
    if finite.size < 2:
        raise InsufficientDataError(
            f"need >= 2 finite TTC samples, got {finite.size}"
        )
    mean = float(np.mean(finite))
    std = float(np.std(finite, ddof=1))
    if std == 0.0:
        raise DegenerateDistributionError("TTC samples have zero spread")
    return mean, std


def prob_below_threshold(mean_s: float, std_s: float, crit_s: float) -> float:
    """Probability that a N(mean, std) TTC falls below the critical threshold."""
    if std_s <= 0.0:
        raise DegenerateDistributionError(f"std must be positive, got {std_s}")
    return normal_cdf((crit_s - mean_s) / std_s)


def gaussian_risk(ttc_samples: Iterable[float], crit_s: float) -> GaussianRisk:
    values = [float(v) for v in ttc_samples]
    n_excluded = sum(1 for v in values if not math.isfinite(v))
    mean, std = fit_gaussian(values)
    return GaussianRisk(
        mean_s=mean,
        std_s=std,
        ttc_crit_s=crit_s,
        prob_below=prob_below_threshold(mean, std, crit_s),
        n_samples=len(values) - n_excluded,
        n_excluded_infinite=n_excluded,
    )


class RunLike(Protocol):
    min_ttc_s: float
    classification: str


@dataclass(frozen=True)
class ModelSummary:
    """One summary row: Gaussian fit of per-run minimum TTC plus event rates.

    Rows where the fit fails (too few finite samples, zero spread) stay in the
    table with available=False instead of aborting the summary.
    """

    model: str
    available: bool
    mean_ttc_s: float | None
    std_ttc_s: float | None
    prob_below: float | None
    critical_fraction: float | None
    n_finite: int
    n_excluded: int
    note: str = ""


def summarize_models(
    results: Mapping[str, Sequence[RunLike]], ttc_crit_s: float
) -> list[ModelSummary]:
    """One row per model over its runs' minimum finite TTC values, ordered by name."""
    rows: list[ModelSummary] = []
    for model in sorted(results):
        runs = results[model]
        samples = [r.min_ttc_s for r in runs]
        n_excluded = sum(1 for s in samples if not math.isfinite(s))
        n_finite = len(samples) - n_excluded
        critical_fraction = (
            sum(1 for r in runs if r.classification == "critical") / len(runs)
            if runs
            else None
        )
        try:
            risk = gaussian_risk(samples, ttc_crit_s)
        except (InsufficientDataError, DegenerateDistributionError) as exc:
            rows.append(
                ModelSummary(
                    model=model,
                    available=False,
                    mean_ttc_s=None,
                    std_ttc_s=None,
                    prob_below=None,
                    critical_fraction=critical_fraction,
                    n_finite=n_finite,
                    n_excluded=n_excluded,
                    note=str(exc),
                )
            )
            continue
        rows.append(
            ModelSummary(
                model=model,
                available=True,
                mean_ttc_s=risk.mean_s,
                std_ttc_s=risk.std_s,
                prob_below=risk.prob_below,
                critical_fraction=critical_fraction,
                n_finite=risk.n_samples,
                n_excluded=risk.n_excluded_infinite,
            )
        )
    return rows

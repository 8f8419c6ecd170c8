"""Index-of-difficulty formulations and the temporal adjustment factor.

Four difficulty models are supported:

* ``NA``  - log2(A/W + 1), the classical Shannon form, no adjustment.
* ``SA``  - spatially adjusted: the nominal width W is replaced by the
  effective width W_e derived from endpoint scatter (or from an assumed
  error rate when endpoints were not recorded).
* ``TA``  - temporally adjusted: W is raised to the power t, where t is
  the binary logarithm of temporal efficiency (ideal over observed
  movement time, ideal fixed at 1 s).
* ``TSA`` - both adjustments combined (W_e raised to the power t).

With the default factor parameters, t = 1 at an observed movement time
of 0.5 s, and the temporally adjusted indices reduce exactly to their
classical counterparts.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

# W_e = WE_SD_FACTOR * SD of endpoint scatter; the factor is 2 * 2.0665,
# the two-sided 96% normal span conventionally used for effective width.
WE_SD_FACTOR = 4.133
# z-score paired with WE_SD_FACTOR in the discrete-error method.
DISCRETE_Z_REF = 2.066

# Theoretical ideal movement time, seconds (fixed by convention).
IDEAL_MOVEMENT_TIME_S = 1.0


class Formulation(str, enum.Enum):
    NA = "NA"
    SA = "SA"
    TA = "TA"
    TSA = "TSA"


class WidthMethod(str, enum.Enum):
    STANDARD_DEVIATION = "standard_deviation"
    DISCRETE_ERROR = "discrete_error"


class WidthGrouping(str, enum.Enum):
    BY_PARTICIPANT_AND_WIDTH = "by_participant_and_width"
    BY_WIDTH = "by_width"
    GLOBAL = "global"


@dataclass(frozen=True)
class TemporalFactorParams:
    """Constants of the generic temporal factor t = -a*log2(MT + b) + c.

    The defaults (1, 0, 0) give t = log2(1/MT), i.e. the binary log of
    temporal efficiency with a 1-second ideal movement time.
    """

    a: float = 1.0
    b: float = 0.0
    c: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a > 0):
            raise ValueError(f"temporal factor coefficient a must be > 0, got {self.a}")
        if not (math.isfinite(self.b) and math.isfinite(self.c)):
            raise ValueError("temporal factor offsets must be finite")


@dataclass(frozen=True)
class EffectiveWidthConfig:
    """How the effective target width is derived for SA/TSA indices."""

    method: WidthMethod = WidthMethod.STANDARD_DEVIATION
    error_rate: float | None = None
    grouping: WidthGrouping = WidthGrouping.BY_PARTICIPANT_AND_WIDTH

    def __post_init__(self):
        if self.method is WidthMethod.DISCRETE_ERROR:
            if self.error_rate is None:
                raise ValueError("discrete_error method requires an error_rate")
            if not (0.0 < self.error_rate < 1.0):
                raise ValueError(f"error_rate must be in (0,1), got {self.error_rate}")


@dataclass(frozen=True)
class IdSample:
    """A single trial's difficulty under one formulation."""

    id_bits: float
    formulation: Formulation
    trial_ref: int


def temporal_factor(mt_observed: float, params: TemporalFactorParams | None = None) -> float:
    """Temporal adjustment factor t, in bits.

    t = -a * log2(mt_observed + b) + c.  Positive for fast trials,
    zero at 1 s, negative for slow ones (with default params).
    """
    if params is None:
        params = TemporalFactorParams()
    shifted = mt_observed + params.b
    if not (math.isfinite(shifted) and shifted > 0):
        raise ValueError(
            f"movement time {mt_observed} + offset {params.b} must be > 0"
        )
    return -params.a * math.log2(shifted) + params.c


def _shannon_id(amplitude: float, denom: float) -> float:
    # Single code path shared by all four formulations so that the
    # t == 1 reduction is exact to the last bit.
    ratio = amplitude / denom
    if not math.isfinite(ratio):
        raise ValueError(
            f"difficulty ratio overflowed: amplitude={amplitude}, width term={denom}"
        )
    return math.log2(ratio + 1.0)


def id_na(amplitude: float, width: float) -> float:
    """Unadjusted index of difficulty, log2(A/W + 1), in bits."""
    if amplitude < 0:
        raise ValueError(f"amplitude must be >= 0, got {amplitude}")
    if width <= 0:
        raise ValueError(f"width must be > 0, got {width}")
    return _shannon_id(amplitude, width)


def id_sa(amplitude: float, effective_width: float) -> float:
    """Spatially adjusted index, log2(A/W_e + 1), in bits."""
    if amplitude < 0:
        raise ValueError(f"amplitude must be >= 0, got {amplitude}")
    if effective_width <= 0:
        raise ValueError(f"effective width must be > 0, got {effective_width}")
    return _shannon_id(amplitude, effective_width)


def id_ta(amplitude: float, width: float, t: float) -> float:
    """Temporally adjusted index, log2(A/W**t + 1), in bits.

    Raises on overflow of the width term (extreme t on wide targets);
    see id_na for the t == 1 special case it reduces to.
    """
    if amplitude < 0:
        raise ValueError(f"amplitude must be >= 0, got {amplitude}")
    if width <= 0:
        raise ValueError(f"width must be > 0, got {width}")
    try:
        denom = width**t
    except OverflowError:
        denom = math.inf
    if denom == 0.0 or math.isinf(denom):
        raise ValueError(
            f"temporal width adjustment overflowed: W={width}, t={t} gives W**t={denom}"
        )
    return _shannon_id(amplitude, denom)


def id_tsa(amplitude: float, effective_width: float, t: float) -> float:
    """Temporally and spatially adjusted index, log2(A/W_e**t + 1), in bits."""
    if amplitude < 0:
        raise ValueError(f"amplitude must be >= 0, got {amplitude}")
    if effective_width <= 0:
        raise ValueError(f"effective width must be > 0, got {effective_width}")
    try:
        denom = effective_width**t
    except OverflowError:
        denom = math.inf
    if denom == 0.0 or math.isinf(denom):
        raise ValueError(
            "temporal width adjustment overflowed: "
            f"W_e={effective_width}, t={t} gives W_e**t={denom}"
        )
    return _shannon_id(amplitude, denom)


def effective_width_sd(axis_offsets) -> float:
    """Effective width from endpoint scatter: 4.133 * sample SD, pixels.

    ``axis_offsets`` are the signed endpoint errors along the task axis
    for one group of comparable trials; needs at least two offsets with
    nonzero spread.
    """
    offsets = np.asarray(axis_offsets, dtype=float)
    if offsets.size < 2:
        raise ValueError(f"need >= 2 endpoint offsets, got {offsets.size}")
    sd = float(np.std(offsets, ddof=1))
    if sd == 0.0:
        raise ValueError("zero endpoint scatter: effective width is degenerate")
    return WE_SD_FACTOR * sd


# --- standard normal machinery for the discrete-error method ------------
#
# The inverse CDF is a rational approximation (P. Acklam's coefficients)
# polished by one Newton step against the erf-based CDF, giving absolute
# error well below 1e-9 over (0, 1).

_ICDF_A = (
    -3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
    1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00,
)
_ICDF_B = (
    -5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
    6.680131188771972e01, -1.328068155288572e01,
)
_ICDF_C = (
    -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
    -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00,
)
_ICDF_D = (
    7.784695709041462e-03, 3.224671290700398e-01,
    2.445134137142996e00, 3.754408661907416e00,
)

_SQRT2 = math.sqrt(2.0)
_SQRT_2PI = math.sqrt(2.0 * math.pi)


def normal_cdf(x: float) -> float:
    """Standard normal CDF via erfc (keeps full precision in the tails)."""
    return 0.5 * math.erfc(-x / _SQRT2)


def _normal_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x) / _SQRT_2PI


def _ppf_lower_half(p: float) -> float:
    # Rational approximation for p <= 0.5 (x <= 0), then Newton polish.
    a, b, c, d = _ICDF_A, _ICDF_B, _ICDF_C, _ICDF_D
    if p < 0.02425:
        q = math.sqrt(-2.0 * math.log(p))
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / (
            (((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0
        )
    else:
        q = p - 0.5
        r = q * q
        x = (
            (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5])
            * q
            / (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0)
        )
    for _ in range(2):
        pdf = _normal_pdf(x)
        if pdf <= 0.0:
            break
        x -= (normal_cdf(x) - p) / pdf
    return x


def normal_ppf(p: float) -> float:
    """Inverse standard normal CDF, absolute error < 1e-9.

    Evaluated on the lower half and mirrored: for p in [0.5, 1] the
    complement 1 - p is exact, so both tails get full precision.
    """
    if not (0.0 < p < 1.0):
        raise ValueError(f"probability must be in (0,1), got {p}")
    if p > 0.5:
        return -_ppf_lower_half(1.0 - p)
    return _ppf_lower_half(p)


def z_from_error_rate(error_rate: float) -> float:
    """Two-sided z-score for a given endpoint error rate.

    Returns z such that a fraction ``error_rate`` of normally scattered
    endpoints falls outside +/- z standard deviations.
    """
    if not (0.0 < error_rate < 1.0):
        raise ValueError(f"error rate must be in (0,1), got {error_rate}")
    return normal_ppf(1.0 - error_rate / 2.0)


def discrete_width_scale(error_rate: float) -> float:
    """Per-trial W_e/W ratio under the discrete-error method: 2.066/z."""
    return DISCRETE_Z_REF / z_from_error_rate(error_rate)


def effective_width_discrete(widths, error_rate: float) -> float:
    """Mean effective width from nominal widths and an assumed error rate.

    Each trial contributes (2.066/z) * W_i; the per-trial values are
    just the nominal widths scaled by discrete_width_scale(error_rate).
    """
    arr = np.asarray(widths, dtype=float)
    if arr.size == 0:
        raise ValueError("need at least one width")
    return float(np.mean(arr)) * discrete_width_scale(error_rate)


def error_rate_for_unit_ratio() -> float:
    """The error rate at which the discrete-error W_e equals W.

    Solves 2.066/z(eps) = 1, i.e. eps = 2 * (1 - Phi(2.066)),
    approximately 3.88%.
    """
    return 2.0 * (1.0 - normal_cdf(DISCRETE_Z_REF))


# --- empirical calibration of the generic factor -------------------------


@dataclass(frozen=True)
class CalibrationBounds:
    """Inclusive search ranges for the generic factor constants."""

    a: tuple[float, float] = (0.25, 4.0)
    b: tuple[float, float] = (0.0, 0.0)
    c: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        for name, (lo, hi) in (("a", self.a), ("b", self.b), ("c", self.c)):
            if lo > hi:
                raise ValueError(f"empty bound for {name}: ({lo}, {hi})")
        if self.a[1] <= 0:
            raise ValueError("bounds must allow a > 0")


def _axis_grid(lo: float, hi: float, n: int) -> np.ndarray:
    if lo == hi:
        return np.array([lo])
    return np.linspace(lo, hi, n)


def _ta_fit_r2(amps, widths, mts, a: float, b: float, c: float) -> float:
    t = -a * np.log2(mts + b) + c
    denom = widths**t
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        ids = np.log2(amps / denom + 1.0)
    if not np.all(np.isfinite(ids)):
        return -np.inf
    var_id = np.var(ids)
    if var_id == 0.0:
        return -np.inf
    r = np.corrcoef(ids, mts)[0, 1]
    return float(r * r)


def calibrate_generic_t(
    amplitudes,
    widths,
    movement_times,
    bounds: CalibrationBounds | None = None,
    grid_points: int = 9,
    refinements: int = 3,
) -> TemporalFactorParams:
    """Fit the generic factor constants (a, b, c) by grid search.

    Maximizes the R^2 of the simple regression of observed movement
    time on the temporally adjusted index computed with those
    constants.  A coarse grid over the bounds is refined around the
    best point; exact ties go to the candidate nearest the defaults
    (1, 0, 0).  Deterministic for fixed bounds and resolution.
    """
    if bounds is None:
        bounds = CalibrationBounds()
    amps = np.asarray(amplitudes, dtype=float)
    ws = np.asarray(widths, dtype=float)
    mts = np.asarray(movement_times, dtype=float)
    if not (amps.shape == ws.shape == mts.shape):
        raise ValueError("amplitude, width and movement-time arrays must align")
    if amps.size < 10:
        raise ValueError(f"need >= 10 trials to calibrate, got {amps.size}")

    mt_min = float(np.min(mts))

    def feasible(a, b):
        return a > 0 and mt_min + b > 0

    spans = {"a": bounds.a, "b": bounds.b, "c": bounds.c}
    best = None  # (r2, dist_to_default, a, b, c)
    for _ in range(refinements + 1):
        grid_a = _axis_grid(*spans["a"], grid_points)
        grid_b = _axis_grid(*spans["b"], grid_points)
        grid_c = _axis_grid(*spans["c"], grid_points)
        round_best = None
        for a in grid_a:
            for b in grid_b:
                if not feasible(a, b):
                    continue
                for c in grid_c:
                    r2 = _ta_fit_r2(amps, ws, mts, a, b, c)
                    if r2 == -np.inf:
                        continue
                    dist = (a - 1.0) ** 2 + b * b + c * c
                    key = (-r2, dist)
                    if round_best is None or key < round_best[0]:
                        round_best = (key, a, b, c)
        if round_best is None:
            raise ValueError(
                "empty search space: no feasible (a, b) in bounds "
                f"(min movement time {mt_min})"
            )
        _, a0, b0, c0 = round_best
        if best is None or round_best[0] < best[0]:
            best = round_best
        # Shrink each span around the incumbent for the next pass.
        new_spans = {}
        for name, center in (("a", a0), ("b", b0), ("c", c0)):
            lo, hi = spans[name]
            half = (hi - lo) / (grid_points - 1) if hi > lo else 0.0
            new_spans[name] = (max(lo, center - half), min(hi, center + half))
        spans = new_spans

    _, a_fit, b_fit, c_fit = best
    return TemporalFactorParams(a=float(a_fit), b=float(b_fit), c=float(c_fit))

"""Statistical kernel: simple regression, ANOVA, F-tests, Tukey HSD.

Everything here is classical machinery; the formulations module supplies
the difficulty values these routines compare.  Regression follows the
textbook simple-OLS decomposition, the F distribution is evaluated
through the regularized incomplete beta, and the studentized range
(for Tukey's HSD) is integrated numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special
from scipy import stats as sps


@dataclass(frozen=True)
class RegressionResult:
    """Simple linear fit of movement time on difficulty."""

    intercept: float
    slope: float
    r_squared: float
    slope_std_error: float
    n: int
    f_stat: float
    dof: tuple[int, int]
    p_value: float
    residuals: np.ndarray

    def predict(self, x) -> np.ndarray:
        return self.intercept + self.slope * np.asarray(x, dtype=float)


@dataclass(frozen=True)
class ThroughputResult:
    mean_bits_per_s: float
    ci95_halfwidth: float
    n: int


@dataclass(frozen=True)
class PairwiseFResult:
    """Variance-ratio test, normalized so the larger variance is on top."""

    f_stat: float
    dof: tuple[int, int]
    p_value: float


@dataclass(frozen=True)
class TukeyPair:
    group_a: str
    group_b: str
    mean_diff: float
    q_stat: float
    adjusted_p: float


@dataclass(frozen=True)
class TukeyResult:
    pairs: tuple[TukeyPair, ...]


@dataclass(frozen=True)
class HistogramResult:
    bin_edges: np.ndarray
    counts: np.ndarray
    skewness: float


def ols_fit(x, y) -> RegressionResult:
    """Least-squares line y = intercept + slope * x with regression ANOVA.

    R^2 is defined as 0 when y is constant (zero total sum of squares);
    a perfect noise-free fit reports R^2 = 1 with an infinite F statistic.
    """
    xs = np.asarray(x, dtype=float)
    ys = np.asarray(y, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValueError("x and y must be 1-d arrays of equal length")
    n = xs.size
    if n < 3:
        raise ValueError(f"need >= 3 points to fit, got {n}")
    x_mean = float(np.mean(xs))
    y_mean = float(np.mean(ys))
    dx = xs - x_mean
    dy = ys - y_mean
    s_xx = float(np.dot(dx, dx))
    if s_xx == 0.0:
        raise ValueError("x is constant: slope is undefined")
    s_xy = float(np.dot(dx, dy))
    slope = s_xy / s_xx
    intercept = y_mean - slope * x_mean
    residuals = ys - (intercept + slope * xs)
    ss_res = float(np.dot(residuals, residuals))
    ss_tot = float(np.dot(dy, dy))
    dof = (1, n - 2)
    if ss_tot == 0.0:
        r_squared = 0.0
        f_stat = 0.0
        p_value = 1.0
        slope_se = 0.0
    elif ss_res == 0.0:
        r_squared = 1.0
        f_stat = math.inf
        p_value = 0.0
        slope_se = 0.0
    else:
        r_squared = min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
        ms_res = ss_res / (n - 2)
        f_stat = (ss_tot - ss_res) / ms_res
        p_value = f_sf(f_stat, 1, n - 2)
        slope_se = math.sqrt(ms_res) / math.sqrt(s_xx)
    return RegressionResult(
        intercept=intercept,
        slope=slope,
        r_squared=r_squared,
        slope_std_error=slope_se,
        n=n,
        f_stat=f_stat,
        dof=dof,
        p_value=p_value,
        residuals=residuals,
    )


def _check_f_args(x: float, d1: int, d2: int):
    if d1 < 1 or d2 < 1:
        raise ValueError(f"degrees of freedom must be >= 1, got ({d1}, {d2})")
    if not (math.isfinite(x) or x == math.inf) or x < 0:
        raise ValueError(f"F statistic must be >= 0, got {x}")


def f_cdf(x: float, d1: int, d2: int) -> float:
    """CDF of the Fisher F distribution via the regularized incomplete beta."""
    _check_f_args(x, d1, d2)
    if x == 0.0:
        return 0.0
    if x == math.inf:
        return 1.0
    return float(special.betainc(d1 / 2.0, d2 / 2.0, d1 * x / (d1 * x + d2)))


def f_sf(x: float, d1: int, d2: int) -> float:
    """Upper-tail probability of F, accurate for very small tails."""
    _check_f_args(x, d1, d2)
    if x == 0.0:
        return 1.0
    if x == math.inf:
        return 0.0
    # Complement through the swapped-parameter identity rather than
    # 1 - f_cdf, which would lose everything below ~1e-16.
    return float(special.betainc(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * x)))


def pairwise_f_test(sample_a, sample_b) -> PairwiseFResult:
    """Variance-ratio F test between two samples.

    Orientation is normalized: the larger sample variance goes in the
    numerator, so f_stat >= 1 and the result is symmetric in argument
    order.  The p-value is the one-sided upper tail.
    """
    a = np.asarray(sample_a, dtype=float)
    b = np.asarray(sample_b, dtype=float)
    for name, arr in (("A", a), ("B", b)):
        if arr.size < 2:
            raise ValueError(f"sample {name} needs >= 2 values, got {arr.size}")
    var_a = float(np.var(a, ddof=1))
    var_b = float(np.var(b, ddof=1))
    if var_a == 0.0 or var_b == 0.0:
        raise ValueError("zero variance sample: F ratio undefined")
    if var_a >= var_b:
        f = var_a / var_b
        dof = (a.size - 1, b.size - 1)
    else:
        f = var_b / var_a
        dof = (b.size - 1, a.size - 1)
    return PairwiseFResult(f_stat=f, dof=dof, p_value=f_sf(f, dof[0], dof[1]))


# --- studentized range ----------------------------------------------------

_GL_CACHE: dict[tuple[float, float, int, int], tuple[np.ndarray, np.ndarray]] = {}


def _gauss_nodes(lo: float, hi: float, panels: int, order: int):
    """Composite Gauss-Legendre nodes/weights on [lo, hi], cached."""
    key = (lo, hi, panels, order)
    cached = _GL_CACHE.get(key)
    if cached is not None:
        return cached
    base_x, base_w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, panels + 1)
    xs, ws = [], []
    for left, right in zip(edges[:-1], edges[1:]):
        half = 0.5 * (right - left)
        mid = 0.5 * (right + left)
        xs.append(mid + half * base_x)
        ws.append(half * base_w)
    result = (np.concatenate(xs), np.concatenate(ws))
    _GL_CACHE[key] = result
    return result


def _normal_range_cdf(w: np.ndarray, k: int) -> np.ndarray:
    """P(range of k iid standard normals <= w), vectorized over w."""
    u, uw = _gauss_nodes(-8.5, 8.5, 4, 48)
    phi_u = np.exp(-0.5 * u * u) / math.sqrt(2.0 * math.pi)
    # inner[i, j] = Phi(u_j) - Phi(u_j - w_i)
    span = special.ndtr(u[None, :]) - special.ndtr(u[None, :] - w[:, None])
    integrand = phi_u[None, :] * np.clip(span, 0.0, 1.0) ** (k - 1)
    return k * (integrand @ uw)


def studentized_range_sf(q: float, k: int, nu: float) -> float:
    """Upper-tail probability of the studentized range Q(k, nu).

    Integrates the scale-mixture representation numerically: the range
    CDF of k standard normals, averaged over the chi distribution of
    the pooled-SD estimate with nu degrees of freedom.  Absolute error
    is far below the 1e-4 target for the k and nu used here.
    """
    if k < 2:
        raise ValueError(f"need k >= 2 groups, got {k}")
    if nu < 1:
        raise ValueError(f"need nu >= 1, got {nu}")
    if q <= 0.0:
        return 1.0
    # Integration window for s = sqrt(chi2_nu / nu): essentially all of
    # the chi mass, robust from nu = 1 up to very large nu.
    lo = math.sqrt(sps.chi2.ppf(1e-13, nu) / nu)
    hi = math.sqrt(sps.chi2.isf(1e-13, nu) / nu)
    s, sw = _gauss_nodes(lo, hi, 6, 40)
    half_nu = 0.5 * nu
    log_norm = math.log(2.0) + half_nu * math.log(half_nu) - math.lgamma(half_nu)
    log_pdf = log_norm + (nu - 1.0) * np.log(s) - half_nu * s * s
    cdf = float(np.dot(np.exp(log_pdf) * _normal_range_cdf(q * s, k), sw))
    return min(1.0, max(0.0, 1.0 - cdf))


TUKEY_P_FLOOR = 1e-4


def tukey_hsd(groups) -> TukeyResult:
    """Tukey's HSD over labelled samples.

    ``groups`` is a sequence of (label, sample) pairs.  Adjusted
    p-values come from the studentized range with the pooled
    within-group error variance; they are floored at 1e-4, the
    resolution of the numerical integration.
    """
    labelled = [(str(label), np.asarray(sample, dtype=float)) for label, sample in groups]
    if len(labelled) < 2:
        raise ValueError(f"need >= 2 groups, got {len(labelled)}")
    for label, sample in labelled:
        if sample.size < 2:
            raise ValueError(f"group {label!r} needs >= 2 values, got {sample.size}")
    k = len(labelled)
    n_total = sum(sample.size for _, sample in labelled)
    nu = n_total - k
    ss_within = sum(
        float(np.dot(sample - sample.mean(), sample - sample.mean()))
        for _, sample in labelled
    )
    if ss_within == 0.0:
        raise ValueError("all groups are constant: within-group variance is zero")
    ms_within = ss_within / nu
    pairs = []
    for i in range(k):
        label_a, sample_a = labelled[i]
        for j in range(i + 1, k):
            label_b, sample_b = labelled[j]
            mean_diff = float(sample_a.mean() - sample_b.mean())
            se = math.sqrt(
                ms_within / 2.0 * (1.0 / sample_a.size + 1.0 / sample_b.size)
            )
            q = abs(mean_diff) / se
            p = max(TUKEY_P_FLOOR, studentized_range_sf(q, k, nu))
            pairs.append(
                TukeyPair(
                    group_a=label_a,
                    group_b=label_b,
                    mean_diff=mean_diff,
                    q_stat=q,
                    adjusted_p=p,
                )
            )
    return TukeyResult(pairs=tuple(pairs))


# --- descriptive helpers --------------------------------------------------


def pearson_r(x, y) -> float:
    """Sample Pearson correlation coefficient."""
    xs = np.asarray(x, dtype=float)
    ys = np.asarray(y, dtype=float)
    if xs.shape != ys.shape or xs.size < 2:
        raise ValueError("need two equal-length samples with >= 2 values")
    dx = xs - xs.mean()
    dy = ys - ys.mean()
    denom = math.sqrt(float(np.dot(dx, dx)) * float(np.dot(dy, dy)))
    if denom == 0.0:
        raise ValueError("zero variance: correlation undefined")
    return float(np.dot(dx, dy)) / denom


def throughput(ids, mts) -> ThroughputResult:
    """Mean of per-trial difficulty over movement time, bits per second.

    The 95% interval uses the normal 1.96 multiplier; all datasets this
    runs on are large.  Sums are accumulated with error-free (fsum)
    summation so 1e5-trial means stay exact to the last bit.
    """
    id_arr = np.asarray(ids, dtype=float)
    mt_arr = np.asarray(mts, dtype=float)
    if id_arr.shape != mt_arr.shape or id_arr.ndim != 1 or id_arr.size == 0:
        raise ValueError("ids and movement times must be equal-length, non-empty")
    if np.any(mt_arr <= 0):
        raise ValueError("movement times must be > 0")
    ratios = id_arr / mt_arr
    n = ratios.size
    mean = math.fsum(ratios) / n
    if n == 1:
        ci = 0.0
    else:
        var = math.fsum((r - mean) ** 2 for r in ratios) / (n - 1)
        ci = 1.96 * math.sqrt(var) / math.sqrt(n)
    return ThroughputResult(mean_bits_per_s=mean, ci95_halfwidth=ci, n=n)


def mean_ci(values) -> tuple[float, float]:
    """Arithmetic mean with a t-based 95% halfwidth (0 for a single value)."""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise ValueError("need at least one value")
    mean = math.fsum(arr) / arr.size
    if arr.size == 1:
        return mean, 0.0
    sd = math.sqrt(math.fsum((v - mean) ** 2 for v in arr) / (arr.size - 1))
    t_quant = float(sps.t.ppf(0.975, arr.size - 1))
    return mean, t_quant * sd / math.sqrt(arr.size)


def histogram(values, bin_count: int) -> HistogramResult:
    """Equal-width histogram over [min, max], plus sample skewness.

    A constant sample collapses to a single unit-width bin centered on
    the value.
    """
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise ValueError("need at least one value")
    if bin_count < 1:
        raise ValueError(f"bin count must be >= 1, got {bin_count}")
    lo = float(arr.min())
    hi = float(arr.max())
    if lo == hi:
        edges = np.array([lo - 0.5, lo + 0.5])
        counts = np.array([arr.size])
    else:
        counts, edges = np.histogram(arr, bins=bin_count, range=(lo, hi))
    mean = float(arr.mean())
    m2 = float(np.mean((arr - mean) ** 2))
    if m2 == 0.0:
        skew = 0.0
    else:
        skew = float(np.mean((arr - mean) ** 3)) / m2**1.5
    return HistogramResult(bin_edges=edges, counts=counts, skewness=skew)

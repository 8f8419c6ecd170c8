"""End-to-end analysis: cleanup, per-trial indices, fits, comparisons.

The pipeline is a straight line: outlier cleanup over movement times,
per-trial difficulty under all four formulations, one regression and
throughput per formulation, then the cross-formulation comparisons
(pairwise variance F tests, Tukey HSD) and the plot-data bundles.
Every formulation in a report consumes the identical post-cleanup
trial multiset.
"""

from __future__ import annotations

import enum
import hashlib
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from . import stats as st
from .formulations import (
    EffectiveWidthConfig,
    Formulation,
    IdSample,
    TemporalFactorParams,
    WidthGrouping,
    WidthMethod,
    discrete_width_scale,
    effective_width_sd,
    id_na,
    id_sa,
    id_ta,
    id_tsa,
    temporal_factor,
)
from .trials import (
    CleanupStageRecord,
    Dataset,
    LevelType,
    Trial,
    endpoint_axis_offset,
    movement_amplitude,
    trial_defects,
)


class PipelineError(RuntimeError):
    """Component failure tagged with the pipeline stage it came from."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


class CleanupStage(str, enum.Enum):
    ERROR_REMOVAL = "error_removal"
    L1 = "l1"
    L2 = "l2"


@dataclass(frozen=True)
class CleanupSpec:
    """Which cleanup stages run, and how wide the SD acceptance band is."""

    sd_multiplier: float = 3.0
    stages: tuple[CleanupStage, ...] = (
        CleanupStage.ERROR_REMOVAL,
        CleanupStage.L1,
        CleanupStage.L2,
    )

    def __post_init__(self):
        if not (math.isfinite(self.sd_multiplier) and self.sd_multiplier > 0):
            raise ValueError(f"sd_multiplier must be > 0, got {self.sd_multiplier}")


def filter_sd(trials, sd_multiplier: float) -> tuple[list[Trial], list[Trial]]:
    """Split trials into (accepted, rejected) by movement-time deviation.

    Mean and sample SD are computed once from the input as given (no
    re-iteration); a trial is kept when |MT - mean| <= multiplier * SD,
    boundary included.
    """
    trials = list(trials)
    if len(trials) < 2:
        raise ValueError(f"need >= 2 trials to filter, got {len(trials)}")
    if sd_multiplier <= 0:
        raise ValueError(f"sd_multiplier must be > 0, got {sd_multiplier}")
    mts = np.array([t.movement_time_s for t in trials])
    mean = float(np.mean(mts))
    sd = float(np.std(mts, ddof=1))
    bound = sd_multiplier * sd
    accepted, rejected = [], []
    for trial, mt in zip(trials, mts):
        (accepted if abs(mt - mean) <= bound else rejected).append(trial)
    return accepted, rejected


def _type_counts(trials) -> tuple[int, int]:
    n_hom = sum(1 for t in trials if t.level_type is LevelType.HOMOGENEOUS)
    return n_hom, len(trials) - n_hom


def _stage_record(stage: CleanupStage, n_input: int, accepted) -> CleanupStageRecord:
    n_hom, n_het = _type_counts(accepted)
    return CleanupStageRecord(
        stage=stage.value,
        n_input=n_input,
        n_accepted=len(accepted),
        n_rejected=n_input - len(accepted),
        n_homogeneous=n_hom,
        n_heterogeneous=n_het,
    )


def run_cleanup(dataset: Dataset, spec: CleanupSpec) -> Dataset:
    """Apply the configured cleanup stages in their canonical order.

    error_removal drops semantically defective trials; L1 filters by
    movement time within each (participant, session) group; L2 filters
    the pooled L1 survivors.  Groups too small to filter (a single
    trial) pass through L1 unchanged.  The returned dataset carries one
    ledger record per executed stage.
    """
    if len(dataset) == 0:
        raise PipelineError("cleanup", "dataset is empty")
    survivors = list(dataset.trials)
    history = list(dataset.cleanup_history)
    stages = [s for s in CleanupStage if s in spec.stages]
    for stage in stages:
        if not survivors:
            raise PipelineError("cleanup", f"no survivors left before stage {stage.value}")
        n_input = len(survivors)
        if stage is CleanupStage.ERROR_REMOVAL:
            survivors = [t for t in survivors if not trial_defects(t)]
        elif stage is CleanupStage.L1:
            groups: dict[tuple[str, str], list[Trial]] = {}
            order: list[tuple[str, str]] = []
            for t in survivors:
                key = (t.participant_id, t.session_id)
                if key not in groups:
                    groups[key] = []
                    order.append(key)
                groups[key].append(t)
            kept: list[Trial] = []
            for key in order:
                members = groups[key]
                if len(members) < 2:
                    kept.extend(members)
                else:
                    accepted, _ = filter_sd(members, spec.sd_multiplier)
                    kept.extend(accepted)
            survivors = kept
        else:  # L2: pooled pass
            if len(survivors) < 2:
                raise PipelineError("cleanup", "fewer than 2 survivors before L2")
            survivors, _ = filter_sd(survivors, spec.sd_multiplier)
        history.append(_stage_record(stage, n_input, survivors))
    return Dataset(
        trials=tuple(survivors),
        source_tag=dataset.source_tag,
        cleanup_history=tuple(history),
    )


@dataclass(frozen=True)
class IdTable:
    """Per-trial difficulty values for all four formulations.

    ``refs`` are indices into the post-cleanup dataset; all arrays are
    parallel.
    """

    refs: np.ndarray
    mt_s: np.ndarray
    amplitude_px: np.ndarray
    width_px: np.ndarray
    effective_width_px: np.ndarray
    t_bits: np.ndarray
    id_na: np.ndarray
    id_sa: np.ndarray
    id_ta: np.ndarray
    id_tsa: np.ndarray
    explosive_refs: tuple[int, ...] = field(default_factory=tuple)

    def values(self, formulation: Formulation) -> np.ndarray:
        return {
            Formulation.NA: self.id_na,
            Formulation.SA: self.id_sa,
            Formulation.TA: self.id_ta,
            Formulation.TSA: self.id_tsa,
        }[formulation]

    def samples(self, formulation: Formulation) -> list[IdSample]:
        ids = self.values(formulation)
        return [
            IdSample(id_bits=float(v), formulation=formulation, trial_ref=int(r))
            for r, v in zip(self.refs, ids)
        ]

    def __len__(self) -> int:
        return len(self.refs)


def _effective_widths(dataset: Dataset, config: EffectiveWidthConfig) -> np.ndarray:
    trials = dataset.trials
    if config.method is WidthMethod.DISCRETE_ERROR:
        scale = discrete_width_scale(config.error_rate)
        return np.array([scale * t.target_width_px for t in trials])

    def group_key(t: Trial):
        if config.grouping is WidthGrouping.BY_PARTICIPANT_AND_WIDTH:
            return (t.participant_id, t.target_width_px)
        if config.grouping is WidthGrouping.BY_WIDTH:
            return (t.target_width_px,)
        return ()

    groups: dict[tuple, list[int]] = {}
    for i, t in enumerate(trials):
        groups.setdefault(group_key(t), []).append(i)
    widths = np.empty(len(trials))
    for key, indices in groups.items():
        try:
            offsets = [endpoint_axis_offset(trials[i]) for i in indices]
            we = effective_width_sd(offsets)
        except ValueError as err:
            raise ValueError(
                f"cannot derive endpoint-scatter effective width for group {key}: {err}; "
                "use the discrete_error method with an error_rate if endpoints "
                "were not recorded"
            ) from err
        for i in indices:
            widths[i] = we
    return widths


def compute_ids(
    dataset: Dataset,
    we_config: EffectiveWidthConfig | None = None,
    t_params: TemporalFactorParams | None = None,
) -> IdTable:
    """Compute the per-trial difficulty quadruple (NA, SA, TA, TSA).

    Expects cleanup to have run already.  Effective widths come from
    endpoint scatter or from the configured discrete error rate; the
    temporal factor is evaluated per trial from its movement time.
    Sub-pixel effective widths combined with negative t make the
    adjusted width explode; such trials are kept (the values stay
    finite) but flagged and reported through a single summary warning.
    """
    if we_config is None:
        we_config = EffectiveWidthConfig()
    if t_params is None:
        t_params = TemporalFactorParams()
    trials = dataset.trials
    if not trials:
        raise ValueError("dataset is empty")

    w_eff = _effective_widths(dataset, we_config)
    n = len(trials)
    refs = np.arange(n)
    mt = np.array([t.movement_time_s for t in trials])
    amp = np.array([movement_amplitude(t) for t in trials])
    width = np.array([t.target_width_px for t in trials])
    t_bits = np.empty(n)
    na = np.empty(n)
    sa = np.empty(n)
    ta = np.empty(n)
    tsa = np.empty(n)
    explosive = []
    for i, trial in enumerate(trials):
        t_i = temporal_factor(trial.movement_time_s, t_params)
        t_bits[i] = t_i
        na[i] = id_na(amp[i], width[i])
        sa[i] = id_sa(amp[i], w_eff[i])
        ta[i] = id_ta(amp[i], width[i], t_i)
        tsa[i] = id_tsa(amp[i], w_eff[i], t_i)
        if w_eff[i] <= 1.0 and t_i < 0.0:
            explosive.append(i)
    if explosive:
        head = ", ".join(str(i) for i in explosive[:5])
        warnings.warn(
            f"{len(explosive)} trial(s) with effective width <= 1 px and negative "
            f"temporal factor (refs {head}{'...' if len(explosive) > 5 else ''}); "
            "adjusted widths are explosive there",
            RuntimeWarning,
            stacklevel=2,
        )
    return IdTable(
        refs=refs,
        mt_s=mt,
        amplitude_px=amp,
        width_px=width,
        effective_width_px=w_eff,
        t_bits=t_bits,
        id_na=na,
        id_sa=sa,
        id_ta=ta,
        id_tsa=tsa,
        explosive_refs=tuple(explosive),
    )


@dataclass(frozen=True)
class BoxplotStats:
    """Five-number summary with 1.5*IQR whiskers and an outlier count."""

    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float
    whisker_lo: float
    whisker_hi: float
    n_outliers: int


def boxplot_stats(values) -> BoxplotStats:
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise ValueError("need at least one value")
    q1, med, q3 = (float(q) for q in np.percentile(arr, [25.0, 50.0, 75.0]))
    iqr = q3 - q1
    lo_fence = q1 - 1.5 * iqr
    hi_fence = q3 + 1.5 * iqr
    inside = arr[(arr >= lo_fence) & (arr <= hi_fence)]
    return BoxplotStats(
        minimum=float(arr.min()),
        q1=q1,
        median=med,
        q3=q3,
        maximum=float(arr.max()),
        whisker_lo=float(inside.min()),
        whisker_hi=float(inside.max()),
        n_outliers=int(arr.size - inside.size),
    )


@dataclass(frozen=True)
class PairwiseFEntry:
    formulation_a: str
    formulation_b: str
    larger_variance: str
    result: st.PairwiseFResult


@dataclass(frozen=True)
class EffectiveWidthSummary:
    method: str
    grouping: str
    error_rate: float | None
    mean_width_px: float
    mean_effective_width_px: float


FORMULATION_ORDER = (Formulation.NA, Formulation.SA, Formulation.TA, Formulation.TSA)

# The four variance comparisons reported for every dataset.
PAIRWISE_PAIRS = (
    (Formulation.TSA, Formulation.NA),
    (Formulation.TSA, Formulation.SA),
    (Formulation.TA, Formulation.NA),
    (Formulation.TA, Formulation.SA),
)


@dataclass(frozen=True)
class AnalysisReport:
    source_tag: str
    cleanup: tuple[CleanupStageRecord, ...]
    n_trials: int
    trial_checksum: str
    effective_width: EffectiveWidthSummary
    temporal_params: TemporalFactorParams
    regressions: dict[Formulation, st.RegressionResult]
    throughputs: dict[Formulation, st.ThroughputResult]
    pairwise_f: tuple[PairwiseFEntry, ...]
    tukey: st.TukeyResult
    correlations: dict[str, float]
    histograms: dict[Formulation, st.HistogramResult]
    boxplots: dict[Formulation, BoxplotStats]
    id_table: IdTable


def _refs_checksum(refs: np.ndarray) -> str:
    payload = ",".join(str(int(r)) for r in refs)
    return hashlib.sha256(payload.encode("ascii")).hexdigest()[:16]


def analyze(
    dataset: Dataset,
    we_config: EffectiveWidthConfig | None = None,
    t_params: TemporalFactorParams | None = None,
    cleanup_spec: CleanupSpec | None = None,
    histogram_bins: int = 30,
) -> AnalysisReport:
    """Run the full comparison of all four formulations on one dataset."""
    if we_config is None:
        we_config = EffectiveWidthConfig()
    if t_params is None:
        t_params = TemporalFactorParams()
    if cleanup_spec is None:
        cleanup_spec = CleanupSpec()

    cleaned = run_cleanup(dataset, cleanup_spec)
    try:
        table = compute_ids(cleaned, we_config, t_params)
    except ValueError as err:
        raise PipelineError("compute_ids", str(err)) from err

    checksum = _refs_checksum(table.refs)
    regressions: dict[Formulation, st.RegressionResult] = {}
    throughputs: dict[Formulation, st.ThroughputResult] = {}
    histograms: dict[Formulation, st.HistogramResult] = {}
    boxplots: dict[Formulation, BoxplotStats] = {}
    for form in FORMULATION_ORDER:
        ids = table.values(form)
        # Every fit must consume the identical trial multiset.
        if ids.shape != table.mt_s.shape or _refs_checksum(table.refs) != checksum:
            raise PipelineError("regression", f"trial set mismatch for {form.value}")
        try:
            regressions[form] = st.ols_fit(ids, table.mt_s)
            throughputs[form] = st.throughput(ids, table.mt_s)
            histograms[form] = st.histogram(ids, histogram_bins)
            fit = regressions[form]
            boxplots[form] = boxplot_stats(fit.predict(ids))
        except ValueError as err:
            raise PipelineError("regression", f"{form.value}: {err}") from err

    pairwise = []
    for form_a, form_b in PAIRWISE_PAIRS:
        a_vals = table.values(form_a)
        b_vals = table.values(form_b)
        try:
            result = st.pairwise_f_test(a_vals, b_vals)
        except ValueError as err:
            raise PipelineError("pairwise_f", f"{form_a.value}/{form_b.value}: {err}") from err
        larger = form_a if np.var(a_vals, ddof=1) >= np.var(b_vals, ddof=1) else form_b
        pairwise.append(
            PairwiseFEntry(
                formulation_a=form_a.value,
                formulation_b=form_b.value,
                larger_variance=larger.value,
                result=result,
            )
        )

    try:
        tukey = st.tukey_hsd(
            [(f"ID_{form.value}", table.values(form)) for form in FORMULATION_ORDER]
        )
    except ValueError as err:
        raise PipelineError("tukey", str(err)) from err

    try:
        correlations = {
            "t_vs_mt0": st.pearson_r(table.t_bits, table.mt_s),
            "t_vs_predicted_mt_ta": st.pearson_r(
                table.t_bits, regressions[Formulation.TA].predict(table.id_ta)
            ),
            "t_vs_predicted_mt_tsa": st.pearson_r(
                table.t_bits, regressions[Formulation.TSA].predict(table.id_tsa)
            ),
        }
    except ValueError as err:
        raise PipelineError("correlation", str(err)) from err

    summary = EffectiveWidthSummary(
        method=we_config.method.value,
        grouping=we_config.grouping.value,
        error_rate=we_config.error_rate,
        mean_width_px=float(np.mean(table.width_px)),
        mean_effective_width_px=float(np.mean(table.effective_width_px)),
    )
    return AnalysisReport(
        source_tag=cleaned.source_tag.value,
        cleanup=cleaned.cleanup_history,
        n_trials=len(table),
        trial_checksum=checksum,
        effective_width=summary,
        temporal_params=t_params,
        regressions=regressions,
        throughputs=throughputs,
        pairwise_f=tuple(pairwise),
        tukey=tukey,
        correlations=correlations,
        histograms=histograms,
        boxplots=boxplots,
        id_table=table,
    )


@dataclass(frozen=True)
class SweepRow:
    sd_multiplier: float
    n_accepted: int
    r_squared: dict[Formulation, float] | None
    flagged: bool = False
    note: str = ""


def sd_sweep(
    dataset: Dataset,
    we_config: EffectiveWidthConfig | None = None,
    t_params: TemporalFactorParams | None = None,
    cleanup_spec: CleanupSpec | None = None,
    from_k: float = 1.5,
    to_k: float = 8.0,
    step: float = 0.25,
) -> list[SweepRow]:
    """Refit all four formulations at each SD-filter width in the grid.

    Each grid point restarts from the raw dataset, reruns the
    configured cleanup stages with that multiplier, and records the
    four R^2 values.  Grid points whose survivor set is too small to
    fit are flagged rather than fatal.
    """
    if cleanup_spec is None:
        cleanup_spec = CleanupSpec()
    if from_k > to_k:
        raise ValueError(f"empty sweep grid: from {from_k} > to {to_k}")
    if step <= 0:
        raise ValueError(f"step must be > 0, got {step}")
    rows = []
    i = 0
    while True:
        k = round(from_k + i * step, 10)
        if k > to_k + 1e-9:
            break
        i += 1
        spec_k = replace(cleanup_spec, sd_multiplier=k)
        try:
            cleaned = run_cleanup(dataset, spec_k)
            if len(cleaned) < 3:
                rows.append(
                    SweepRow(k, len(cleaned), None, flagged=True, note="survivor set < 3")
                )
                continue
            table = compute_ids(cleaned, we_config, t_params)
            r2 = {
                form: st.ols_fit(table.values(form), table.mt_s).r_squared
                for form in FORMULATION_ORDER
            }
            rows.append(SweepRow(k, len(table), r2))
        except (ValueError, PipelineError) as err:
            rows.append(SweepRow(k, 0, None, flagged=True, note=str(err)))
    return rows

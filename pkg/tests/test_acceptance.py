"""Acceptance suite: one test per exit criterion, with a printed verdict.

Each criterion appends a PASS/FAIL line that the terminal summary
prints after the run.  Criteria that depend on the public benchmark
dataset look for canonical conversions of it under the directory named
by ANTASID_BENCH_DIR (controlled.trials.jsonl, uncontrolled.trials.jsonl);
when those files are absent, the documented synthetic fallback runs
instead and the verdict line says so.
"""

import dataclasses
import json
import math
import os
from pathlib import Path

import numpy as np
import pytest

from antasid.cli import EXIT_OK, main
from antasid.formulations import (
    EffectiveWidthConfig,
    Formulation,
    WidthMethod,
    discrete_width_scale,
    error_rate_for_unit_ratio,
    z_from_error_rate,
)
from antasid.ingest import read_canonical
from antasid.pipeline import (
    CleanupSpec,
    CleanupStage,
    analyze,
    compute_ids,
    filter_sd,
    run_cleanup,
    sd_sweep,
)
from antasid.stats import mean_ci, ols_fit
from antasid.synth import SynthSpec, generate
from antasid.trials import Dataset, LevelType, Point2, SourceTag, Trial

RESULTS: list[str] = []

DISCRETE_REFERENCE = EffectiveWidthConfig(
    method=WidthMethod.DISCRETE_ERROR, error_rate=0.03883
)
L2_ONLY = CleanupSpec(stages=(CleanupStage.L2,))

# Published values this suite reproduces when the benchmark conversion
# is available: per formulation (intercept, slope, r_squared, throughput),
# and the four pairwise F statistics in report order TSA/NA, TSA/SA,
# TA/NA, TA/SA.
BENCH_EXPECTED = {
    "controlled": {
        "n_before": 8350,
        "n_accepted": 8230,
        "rows": {
            Formulation.NA: (0.3121, 0.1374, 0.4828, 4.28),
            Formulation.SA: (0.1939, 0.1902, 0.2307, 4.10),
            Formulation.TA: (0.3036, 0.0836, 0.8759, 6.77),
            Formulation.TSA: (0.2549, 0.0915, 0.9201, 6.94),
        },
        "pairwise_f": (1.9054, 3.9884, 1.8133, 3.7955),
    },
    "uncontrolled": {
        "n_before": 39050,
        "n_accepted": 38461,
        "rows": {
            Formulation.NA: (0.4166, 0.1344, 0.3233, 3.87),
            Formulation.SA: (0.3474, 0.1702, 0.1289, 3.69),
            Formulation.TA: (0.2455, 0.0988, 0.8539, 6.97),
            Formulation.TSA: (0.2011, 0.1042, 0.9059, 7.13),
        },
        "pairwise_f": (2.8038, 7.0272, 2.6414, 6.6203),
    },
}


def check(name: str, condition: bool, detail: str = ""):
    status = "PASS" if condition else "FAIL"
    RESULTS.append(f"{status}  {name}" + (f"  [{detail}]" if detail else ""))
    assert condition, f"{name}: {detail}"


def bench_dataset(kind: str):
    root = os.environ.get("ANTASID_BENCH_DIR")
    if not root:
        return None
    path = Path(root) / f"{kind}.trials.jsonl"
    if not path.exists():
        return None
    tag = (
        SourceTag.BENCHMARK_CONTROLLED
        if kind == "controlled"
        else SourceTag.BENCHMARK_UNCONTROLLED
    )
    return read_canonical(path, source_tag=tag, on_diagnostic=lambda _: None)


@pytest.fixture(scope="module")
def fallback_dataset():
    return generate(
        SynthSpec(
            n_trials=5000,
            intercept_s=0.3,
            slope_s_per_bit=0.1,
            mt_noise_sd=0.05,
            endpoint_scatter_sd=6.0,
            seed=1203,
        )
    )


@pytest.fixture(scope="module")
def fallback_report(fallback_dataset):
    return analyze(fallback_dataset, DISCRETE_REFERENCE, cleanup_spec=L2_ONLY)


def test_formula_reduction_at_half_second():
    ds = generate(SynthSpec(n_trials=10_000, endpoint_scatter_sd=6.0, seed=31))
    forced = Dataset(
        trials=tuple(dataclasses.replace(t, movement_time_s=0.5) for t in ds.trials),
        source_tag=ds.source_tag,
    )
    table = compute_ids(forced, EffectiveWidthConfig())
    check(
        "formula reduction: t=1 collapses TA->NA and TSA->SA bitwise on 1e4 trials",
        bool(
            np.array_equal(table.id_ta, table.id_na)
            and np.array_equal(table.id_tsa, table.id_sa)
        ),
        "0 tolerance",
    )


def test_f_r2_identity(fallback_report):
    spot = 0.3435 / (1 - 0.3435) * (2707 - 2)
    ok_spot = 1413 <= spot <= 1417
    ok_models = True
    for form, reg in fallback_report.regressions.items():
        if reg.r_squared < 1.0:
            implied = reg.r_squared / (1 - reg.r_squared) * (reg.n - 2)
            ok_models &= abs(reg.f_stat - implied) <= 1e-6 * implied
    check(
        "F/R^2 identity: F = R^2(n-2)/(1-R^2) for every fitted model",
        ok_spot and ok_models,
        f"spot F at R^2=0.3435, n=2707: {spot:.2f}",
    )


def test_error_rate_z_round_trip():
    z = z_from_error_rate(0.03883)
    eps = error_rate_for_unit_ratio()
    ratio = discrete_width_scale(0.03883)
    check(
        "error-rate/z round trip: z(0.03883)=2.066, unit-ratio rate ~3.88%, W_e/W ~ 1",
        abs(z - 2.066) <= 1e-3 and 0.0386 <= eps <= 0.0390 and abs(ratio - 1.0) <= 1e-4,
        f"z={z:.6f}, eps={eps:.6f}, ratio-1={ratio - 1:.2e}",
    )


def brute_force_ols(x, y):
    design = np.column_stack([np.ones_like(x), x])
    coeffs, *_ = np.linalg.lstsq(design, y, rcond=None)
    return float(coeffs[0]), float(coeffs[1])


def _na_ids_and_mts(dataset):
    from antasid.trials import movement_amplitude

    ids = np.array(
        [math.log2(movement_amplitude(t) / t.target_width_px + 1.0) for t in dataset]
    )
    mts = np.array([t.movement_time_s for t in dataset])
    return ids, mts


def test_oracle_recovery():
    ids, mts = _na_ids_and_mts(generate(SynthSpec(n_trials=500, seed=4)))
    clean_fit = ols_fit(ids, mts)
    ok_clean = (
        abs(clean_fit.intercept - 0.3) <= 1e-9
        and abs(clean_fit.slope - 0.1) <= 1e-9
        and clean_fit.r_squared >= 1.0 - 1e-12
    )
    ids, mts = _na_ids_and_mts(
        generate(SynthSpec(n_trials=5000, mt_noise_sd=0.05, seed=42))
    )
    noisy_fit = ols_fit(ids, mts)
    bf_intercept, bf_slope = brute_force_ols(ids, mts)
    ok_noisy = (
        abs(noisy_fit.intercept - 0.3) <= 0.02
        and abs(noisy_fit.slope - 0.1) <= 0.02
        and abs(noisy_fit.intercept - bf_intercept) <= 1e-9
        and abs(noisy_fit.slope - bf_slope) <= 1e-9
    )
    check(
        "oracle recovery: noise-free exact to 1e-9, noisy within 0.02 and "
        "matching brute-force OLS to 1e-9",
        ok_clean and ok_noisy,
        f"noisy (a,b)=({noisy_fit.intercept:.4f},{noisy_fit.slope:.4f})",
    )


def test_cleanup_counts():
    details = []
    bench_seen = False
    ok = True
    for kind in ("controlled", "uncontrolled"):
        ds = bench_dataset(kind)
        if ds is None:
            continue
        bench_seen = True
        expected = BENCH_EXPECTED[kind]
        cleaned = run_cleanup(ds, L2_ONLY)
        ok &= abs(len(ds) - expected["n_before"]) <= 5
        ok &= abs(len(cleaned) - expected["n_accepted"]) <= 5
        details.append(f"{kind}: {len(cleaned)}/{len(ds)}")
    if not bench_seen:
        # Fallback: one planted outlier 46.55 SD-units of raw MT away
        # from 19 identical inliers is removed, and only it.
        def trial(mt):
            return Trial(
                session_id="s",
                participant_id="p",
                level_type=LevelType.HETEROGENEOUS,
                level_label="1.5.1",
                target_width_px=32.0,
                start=Point2(0, 0),
                end=Point2(100, 0),
                target_center=Point2(100, 0),
                movement_time_s=mt,
                miss_clicks=0,
            )

        trials = [trial(1.0) for _ in range(19)] + [trial(50.0)]
        accepted, rejected = filter_sd(trials, 3.0)
        ok = len(accepted) == 19 and len(rejected) == 1 and rejected[0].movement_time_s == 50.0
        details.append("planted 46.55-unit outlier removed exactly")
    check(
        "cleanup counts: L2 acceptance matches the published 8230/8350 and "
        "38461/39050 within 5" if bench_seen else
        "cleanup counts: synthetic fallback (benchmark files not present)",
        ok,
        "; ".join(details),
    )


def test_regression_table_reproduction(fallback_dataset, fallback_report):
    bench_seen = False
    ok = True
    details = []
    for kind in ("controlled", "uncontrolled"):
        ds = bench_dataset(kind)
        if ds is None:
            continue
        bench_seen = True
        expected = BENCH_EXPECTED[kind]
        report = analyze(ds, DISCRETE_REFERENCE, cleanup_spec=L2_ONLY)
        for form, (a, b, r2, tp) in expected["rows"].items():
            reg = report.regressions[form]
            ok &= abs(reg.r_squared - r2) <= 0.02
            ok &= abs(reg.intercept - a) <= 0.03
            ok &= abs(reg.slope - b) <= 0.03
            ok &= abs(report.throughputs[form].mean_bits_per_s - tp) <= 0.15
        details.append(
            f"{kind} R^2: "
            + ", ".join(
                f"{f.value}={report.regressions[f].r_squared:.4f}" for f in Formulation
            )
        )
    if not bench_seen:
        # Fallback on the frozen synthetic dataset: the classical row
        # recovers its generating truth, and the temporally adjusted
        # fits dominate their classical counterparts in both fit and
        # throughput.
        report = fallback_report
        na = report.regressions[Formulation.NA]
        ok &= abs(na.intercept - 0.3) <= 0.02 and abs(na.slope - 0.1) <= 0.02
        r2 = {f: report.regressions[f].r_squared for f in Formulation}
        tp = {f: report.throughputs[f].mean_bits_per_s for f in Formulation}
        ok &= r2[Formulation.TA] >= 0.9 and r2[Formulation.TSA] >= 0.9
        ok &= r2[Formulation.TA] > r2[Formulation.NA]
        ok &= r2[Formulation.TSA] > r2[Formulation.SA]
        ok &= tp[Formulation.TA] > tp[Formulation.NA]
        ok &= tp[Formulation.TSA] > tp[Formulation.SA]
        details.append(
            "fallback R^2: " + ", ".join(f"{f.value}={r2[f]:.4f}" for f in Formulation)
        )
    check(
        "regression table: benchmark rows within published tolerances"
        if bench_seen
        else "regression table: synthetic fallback (truth recovered, adjusted "
        "formulations dominate)",
        ok,
        "; ".join(details),
    )


def test_pairwise_f_and_tukey(fallback_report):
    bench_seen = False
    ok = True
    details = []
    for kind in ("controlled", "uncontrolled"):
        ds = bench_dataset(kind)
        if ds is None:
            continue
        bench_seen = True
        report = analyze(ds, DISCRETE_REFERENCE, cleanup_spec=L2_ONLY)
        expected = BENCH_EXPECTED[kind]["pairwise_f"]
        for entry, f_expected in zip(report.pairwise_f, expected):
            ok &= abs(entry.result.f_stat - f_expected) <= 0.05
            ok &= entry.result.p_value < 0.001
        ok &= _tukey_antasid_pairs_significant(report)
        details.append(
            f"{kind} F: " + ", ".join(f"{e.result.f_stat:.4f}" for e in report.pairwise_f)
        )
    if not bench_seen:
        report = fallback_report
        for entry in report.pairwise_f:
            ok &= entry.result.f_stat > 1.0 and entry.result.p_value < 0.001
        ok &= _tukey_antasid_pairs_significant(report)
        details.append(
            "fallback F: " + ", ".join(f"{e.result.f_stat:.4f}" for e in report.pairwise_f)
        )
    check(
        "pairwise F within 0.05 of published values, Tukey adjusted p <= 0.001"
        if bench_seen
        else "pairwise F / Tukey: synthetic fallback (all pairs significant)",
        ok,
        "; ".join(details),
    )


def _tukey_antasid_pairs_significant(report) -> bool:
    classical = {"ID_NA", "ID_SA"}
    adjusted = {"ID_TA", "ID_TSA"}
    ok = True
    for pair in report.tukey.pairs:
        names = {pair.group_a, pair.group_b}
        if names & classical and names & adjusted:
            ok &= pair.adjusted_p <= 0.001
    return ok


def test_sd_sweep_band(fallback_dataset):
    bench_seen = False
    ok = True
    details = []
    datasets = []
    for kind in ("controlled", "uncontrolled"):
        ds = bench_dataset(kind)
        if ds is not None:
            bench_seen = True
            datasets.append((kind, ds))
    if not bench_seen:
        datasets.append(("fallback", fallback_dataset))
    for kind, ds in datasets:
        rows = sd_sweep(ds, DISCRETE_REFERENCE, cleanup_spec=L2_ONLY)
        ok &= len(rows) == 27
        for row in rows:
            if row.r_squared is None:
                ok = False
                continue
            r2 = row.r_squared
            ok &= 0.83 <= r2[Formulation.TA] <= 0.97
            ok &= 0.83 <= r2[Formulation.TSA] <= 0.97
            ok &= r2[Formulation.NA] <= r2[Formulation.TA] + 1e-12
            ok &= r2[Formulation.SA] <= r2[Formulation.TSA] + 1e-12
        ta_values = [row.r_squared[Formulation.TA] for row in rows if row.r_squared]
        details.append(f"{kind} TA range {min(ta_values):.4f}..{max(ta_values):.4f}")
    check(
        "SD sweep: 27 rows, adjusted R^2 in [0.83, 0.97], classical never surpasses"
        + ("" if bench_seen else " (synthetic fallback)"),
        ok,
        "; ".join(details),
    )


def test_correlation_signs(fallback_report):
    reports = []
    bench_seen = False
    for kind in ("controlled", "uncontrolled"):
        ds = bench_dataset(kind)
        if ds is not None:
            bench_seen = True
            reports.append((kind, analyze(ds, DISCRETE_REFERENCE, cleanup_spec=L2_ONLY)))
    if not bench_seen:
        reports.append(("fallback", fallback_report))
    ok = True
    details = []
    for kind, report in reports:
        c = report.correlations
        ok &= c["t_vs_mt0"] <= -0.9
        ok &= c["t_vs_predicted_mt_ta"] <= -0.9
        details.append(
            f"{kind}: r(t,MT)={c['t_vs_mt0']:.3f}, r(t,MT_TA)={c['t_vs_predicted_mt_ta']:.3f}"
        )
    check(
        "correlation signs: r(t, MT) <= -0.9 and r(t, predicted MT_TA) <= -0.9"
        + ("" if bench_seen else " (synthetic fallback)"),
        ok,
        "; ".join(details),
    )


def test_mean_model_fit_across_datasets():
    # Arithmetic identity over the three published TSA fit qualities.
    mean, _ = mean_ci([0.9043, 0.9201, 0.9059])
    check(
        "mean TSA R^2 across datasets equals 0.9101",
        abs(mean - 0.9101) <= 1e-4,
        f"mean={mean:.6f}",
    )


def test_cli_determinism(tmp_path):
    data = tmp_path / "data.trials.jsonl"
    synth_args = [
        "synth", "--n", "600", "--mt-noise-sd", "0.05", "--scatter-sd", "5",
        "--seed", "2024", "--out", str(data),
    ]
    assert main(synth_args) == EXIT_OK
    first_bytes = data.read_bytes()
    assert main(synth_args) == EXIT_OK
    ok_synth = data.read_bytes() == first_bytes

    bundles = []
    for tag in ("a", "b"):
        report = tmp_path / f"report_{tag}.json"
        plots = tmp_path / f"plots_{tag}"
        code = main(
            [
                "analyze",
                "--input", str(data),
                "--we-method", "discrete",
                "--error-rate", "0.03883",
                "--stages", "l2",
                "--out", str(report),
                "--plots", str(plots),
            ]
        )
        assert code == EXIT_OK
        bundle = {"report": report.read_bytes()}
        for path in sorted(plots.iterdir()):
            bundle[path.name] = path.read_bytes()
        bundles.append(bundle)
    ok_analyze = bundles[0] == bundles[1]
    check(
        "determinism: repeated synth and analyze runs are byte-identical",
        ok_synth and ok_analyze,
        f"report+{len(bundles[0]) - 1} plot files compared",
    )

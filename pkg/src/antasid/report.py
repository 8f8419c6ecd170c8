"""Report rendering: JSON document, plot-data CSV bundle, text summary.

Output bytes are deterministic for identical inputs: key order is
fixed, floats use their shortest round-trip representation, and
non-finite values are encoded as strings so the JSON stays standard.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

from .formulations import Formulation
from .pipeline import FORMULATION_ORDER, AnalysisReport, SweepRow


def _num(value):
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)  # 'inf', '-inf', 'nan'
    return value


def report_to_dict(report: AnalysisReport) -> dict:
    """Plain-dict rendering of a report with stable key order."""
    doc = {
        "source_tag": report.source_tag,
        "n_trials": report.n_trials,
        "trial_checksum": report.trial_checksum,
        "temporal_factor": {
            "a": report.temporal_params.a,
            "b": report.temporal_params.b,
            "c": report.temporal_params.c,
        },
        "effective_width": {
            "method": report.effective_width.method,
            "grouping": report.effective_width.grouping,
            "error_rate": report.effective_width.error_rate,
            "mean_width_px": report.effective_width.mean_width_px,
            "mean_effective_width_px": report.effective_width.mean_effective_width_px,
        },
        "cleanup": [
            {
                "stage": rec.stage,
                "n_input": rec.n_input,
                "n_accepted": rec.n_accepted,
                "n_rejected": rec.n_rejected,
                "n_homogeneous": rec.n_homogeneous,
                "n_heterogeneous": rec.n_heterogeneous,
            }
            for rec in report.cleanup
        ],
        "formulations": {},
        "pairwise_f": [],
        "tukey": [],
        "correlations": {k: _num(v) for k, v in report.correlations.items()},
    }
    for form in FORMULATION_ORDER:
        reg = report.regressions[form]
        tp = report.throughputs[form]
        hist = report.histograms[form]
        box = report.boxplots[form]
        doc["formulations"][form.value] = {
            "regression": {
                "intercept_s": _num(reg.intercept),
                "slope_s_per_bit": _num(reg.slope),
                "r_squared": _num(reg.r_squared),
                "slope_std_error": _num(reg.slope_std_error),
                "n": reg.n,
                "dof": list(reg.dof),
                "f_stat": _num(reg.f_stat),
                "p_value": _num(reg.p_value),
            },
            "throughput": {
                "mean_bits_per_s": _num(tp.mean_bits_per_s),
                "ci95_halfwidth": _num(tp.ci95_halfwidth),
                "n": tp.n,
            },
            "id_skewness": _num(hist.skewness),
            "predicted_mt_boxplot": {
                "min": _num(box.minimum),
                "q1": _num(box.q1),
                "median": _num(box.median),
                "q3": _num(box.q3),
                "max": _num(box.maximum),
                "whisker_lo": _num(box.whisker_lo),
                "whisker_hi": _num(box.whisker_hi),
                "n_outliers": box.n_outliers,
            },
        }
    for entry in report.pairwise_f:
        doc["pairwise_f"].append(
            {
                "a": entry.formulation_a,
                "b": entry.formulation_b,
                "larger_variance": entry.larger_variance,
                "f_stat": _num(entry.result.f_stat),
                "dof": list(entry.result.dof),
                "p_value": _num(entry.result.p_value),
            }
        )
    for pair in report.tukey.pairs:
        doc["tukey"].append(
            {
                "group_a": pair.group_a,
                "group_b": pair.group_b,
                "mean_diff": _num(pair.mean_diff),
                "q_stat": _num(pair.q_stat),
                "adjusted_p": _num(pair.adjusted_p),
            }
        )
    return doc


def write_report_json(report: AnalysisReport, path) -> None:
    payload = json.dumps(report_to_dict(report), indent=2, ensure_ascii=False)
    Path(path).write_text(payload + "\n", encoding="utf-8")


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_plot_data(report: AnalysisReport, directory) -> list[str]:
    """Emit the plot-data CSV bundle; returns the file names written.

    One scatter+fit file and one histogram file per formulation, the
    per-trial throughput scatter, the temporal-factor curve, and the
    predicted-movement-time boxplot table.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    table = report.id_table
    written = []

    for form in FORMULATION_ORDER:
        name = form.value.lower()
        ids = table.values(form)
        fit = report.regressions[form]
        pred = fit.predict(ids)
        fname = f"regression_scatter_{name}.csv"
        _write_csv(
            directory / fname,
            ["trial_ref", "id_bits", "mt_s", "predicted_mt_s"],
            zip(table.refs.tolist(), ids.tolist(), table.mt_s.tolist(), pred.tolist()),
        )
        written.append(fname)

        hist = report.histograms[form]
        fname = f"id_histogram_{name}.csv"
        _write_csv(
            directory / fname,
            ["bin_lo", "bin_hi", "count"],
            zip(
                hist.bin_edges[:-1].tolist(),
                hist.bin_edges[1:].tolist(),
                hist.counts.tolist(),
            ),
        )
        written.append(fname)

        fname = f"throughput_scatter_{name}.csv"
        tp_per_trial = ids / table.mt_s
        _write_csv(
            directory / fname,
            ["trial_ref", "id_bits", "tp_bits_per_s"],
            zip(table.refs.tolist(), ids.tolist(), tp_per_trial.tolist()),
        )
        written.append(fname)

    order = table.mt_s.argsort(kind="stable")
    pred_ta = report.regressions[Formulation.TA].predict(table.id_ta)
    pred_tsa = report.regressions[Formulation.TSA].predict(table.id_tsa)
    fname = "temporal_factor_vs_mt.csv"
    _write_csv(
        directory / fname,
        ["mt_s", "t_bits", "predicted_mt_ta_s", "predicted_mt_tsa_s"],
        zip(
            table.mt_s[order].tolist(),
            table.t_bits[order].tolist(),
            pred_ta[order].tolist(),
            pred_tsa[order].tolist(),
        ),
    )
    written.append(fname)

    fname = "predicted_mt_boxplot.csv"
    _write_csv(
        directory / fname,
        ["formulation", "min", "q1", "median", "q3", "max", "whisker_lo", "whisker_hi", "n_outliers"],
        (
            [
                form.value,
                box.minimum,
                box.q1,
                box.median,
                box.q3,
                box.maximum,
                box.whisker_lo,
                box.whisker_hi,
                box.n_outliers,
            ]
            for form, box in ((f, report.boxplots[f]) for f in FORMULATION_ORDER)
        ),
    )
    written.append(fname)
    return written


def write_sweep_csv(rows: list[SweepRow], path) -> None:
    def fmt(row: SweepRow, form: Formulation):
        if row.r_squared is None:
            return ""
        return row.r_squared[form]

    _write_csv(
        Path(path),
        ["sd_multiplier", "n_accepted", "r2_na", "r2_sa", "r2_ta", "r2_tsa", "flagged"],
        (
            [
                row.sd_multiplier,
                row.n_accepted,
                fmt(row, Formulation.NA),
                fmt(row, Formulation.SA),
                fmt(row, Formulation.TA),
                fmt(row, Formulation.TSA),
                int(row.flagged),
            ]
            for row in rows
        ),
    )


def _fmt_p(p: float) -> str:
    if p < 1e-12:
        return "<1e-12"
    return f"{p:.3g}"


def format_summary(report: AnalysisReport) -> str:
    """Human-readable regression table, one row per formulation."""
    lines = []
    lines.append(
        f"dataset: {report.source_tag}  trials: {report.n_trials}  "
        f"checksum: {report.trial_checksum}"
    )
    ew = report.effective_width
    if ew.error_rate is not None:
        lines.append(
            f"effective width: {ew.method} (error rate {ew.error_rate:.5f} -- an "
            f"approximation, not recorded data); mean W = {ew.mean_width_px:.4f} px, "
            f"mean W_e = {ew.mean_effective_width_px:.4f} px"
        )
    else:
        lines.append(
            f"effective width: {ew.method} ({ew.grouping}); mean W = "
            f"{ew.mean_width_px:.4f} px, mean W_e = {ew.mean_effective_width_px:.4f} px"
        )
    tf = report.temporal_params
    lines.append(f"temporal factor: t = -{tf.a:g}*log2(MT + {tf.b:g}) + {tf.c:g}")
    for rec in report.cleanup:
        lines.append(
            f"cleanup {rec.stage}: {rec.n_input} -> {rec.n_accepted} accepted "
            f"({rec.n_rejected} rejected)"
        )
    header = (
        f"{'ID':6} {'intercept':>9} {'slope':>8} {'R^2':>8} {'SE':>9} "
        f"{'TP+-95%CI':>16} {'DOF':>12} {'F':>12} {'p':>8}"
    )
    lines.append(header)
    for form in FORMULATION_ORDER:
        reg = report.regressions[form]
        tp = report.throughputs[form]
        tp_text = f"{tp.mean_bits_per_s:.2f}+-{tp.ci95_halfwidth:.2f}"
        lines.append(
            f"ID_{form.value:<3} {reg.intercept:9.4f} {reg.slope:8.4f} "
            f"{reg.r_squared:8.4f} {reg.slope_std_error:9.5f} {tp_text:>16} "
            f"{str(reg.dof):>12} {reg.f_stat:12.2f} {_fmt_p(reg.p_value):>8}"
        )
    lines.append("pairwise F (variance ratio, larger/smaller):")
    for entry in report.pairwise_f:
        lines.append(
            f"  {entry.formulation_a}/{entry.formulation_b}: F = "
            f"{entry.result.f_stat:.4f}, p = {_fmt_p(entry.result.p_value)}"
        )
    lines.append("Tukey HSD (adjusted p floored at 1e-4):")
    for pair in report.tukey.pairs:
        lines.append(
            f"  {pair.group_a} vs {pair.group_b}: diff = {pair.mean_diff:+.4f}, "
            f"q = {pair.q_stat:.3f}, p = {pair.adjusted_p:.4g}"
        )
    corr = report.correlations
    lines.append(
        "correlations: r(t, MT) = {:.4f}, r(t, MT_TA) = {:.4f}, r(t, MT_TSA) = {:.4f}".format(
            corr["t_vs_mt0"], corr["t_vs_predicted_mt_ta"], corr["t_vs_predicted_mt_tsa"]
        )
    )
    return "\n".join(lines)

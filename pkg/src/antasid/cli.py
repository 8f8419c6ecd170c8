"""Command-line interface: analyze, sweep, synth, convert, collect.

Options are resolved with precedence command line > config file >
built-in defaults.  The config file is JSON, pointed at by the
ANTASID_CONFIG environment variable, with one section per subcommand.

Exit codes: 0 success, 1 pipeline/runtime failure, 2 flag misuse.
"""

from __future__ import annotations

import argparse
import http.server
import json
import os
import re
import socketserver
import sys
import threading
from pathlib import Path

from . import report as rpt
from .formulations import (
    EffectiveWidthConfig,
    Formulation,
    TemporalFactorParams,
    WidthGrouping,
    WidthMethod,
)
from .ingest import (
    IngestError,
    load_mapping,
    parse_trial_lines,
    read_canonical,
    trial_to_record,
    convert,
    write_canonical,
)
from .pipeline import CleanupSpec, CleanupStage, PipelineError, analyze, sd_sweep
from .synth import SynthSpec, generate
from .trials import Dataset, SourceTag

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2

_WE_METHODS = {"sd": WidthMethod.STANDARD_DEVIATION, "discrete": WidthMethod.DISCRETE_ERROR}
_GROUPINGS = {
    "participant_width": WidthGrouping.BY_PARTICIPANT_AND_WIDTH,
    "width": WidthGrouping.BY_WIDTH,
    "global": WidthGrouping.GLOBAL,
}
_STAGE_ALIASES = {
    "error": CleanupStage.ERROR_REMOVAL,
    "error_removal": CleanupStage.ERROR_REMOVAL,
    "l1": CleanupStage.L1,
    "l2": CleanupStage.L2,
}

# Canonical reference error rate for the discrete-error width method;
# documented in --help, applied only when explicitly configured.
DEFAULT_ERROR_RATE = 0.03883


class UsageError(Exception):
    pass


def _load_config(subcommand: str) -> dict:
    path = os.environ.get("ANTASID_CONFIG")
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as handle:
            doc = json.load(handle)
    except (OSError, json.JSONDecodeError) as err:
        raise UsageError(f"cannot read config file {path}: {err}")
    section = doc.get(subcommand, {})
    if not isinstance(section, dict):
        raise UsageError(f"config section {subcommand!r} must be an object")
    return section


def _resolve(args: argparse.Namespace, config: dict, key: str, default):
    value = getattr(args, key, None)
    if value is not None:
        return value
    if key in config:
        return config[key]
    return default


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="antasid",
        description="Movement-time modeling for pointing tasks: classical and "
        "temporally adjusted difficulty indices, cleanup, regression, and "
        "statistical comparison.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_analysis_flags(p):
        p.add_argument("--input", help="canonical trial log (.trials.jsonl)")
        p.add_argument(
            "--we-method",
            choices=sorted(_WE_METHODS),
            help="effective-width method: endpoint scatter (sd) or assumed "
            "error rate (discrete) (default: sd)",
        )
        p.add_argument(
            "--error-rate",
            type=float,
            help="assumed error rate for --we-method discrete; required with it "
            f"(the canonical approximation is {DEFAULT_ERROR_RATE}, at which "
            "W_e equals W)",
        )
        p.add_argument(
            "--grouping",
            choices=sorted(_GROUPINGS),
            help="grouping for endpoint-scatter widths (default: participant_width)",
        )
        p.add_argument(
            "--sd-filter",
            type=float,
            help="SD multiplier for movement-time outlier removal (default: 3.0)",
        )
        p.add_argument(
            "--stages",
            help="comma-separated cleanup stages out of error,l1,l2 "
            "(default: error,l1,l2; empty string disables cleanup)",
        )
        p.add_argument("--t-a", type=float, help="temporal factor coefficient a (default: 1)")
        p.add_argument("--t-b", type=float, help="temporal factor time offset b, seconds (default: 0)")
        p.add_argument("--t-c", type=float, help="temporal factor offset c, bits (default: 0)")
        p.add_argument(
            "--source-tag",
            choices=[t.value for t in SourceTag],
            help="provenance tag for the dataset (default: collected)",
        )
        p.add_argument("--strict", action="store_true", default=None,
                       help="abort on the first invalid input line (default: off)")

    p_analyze = sub.add_parser("analyze", help="full four-formulation analysis of one trial log")
    add_analysis_flags(p_analyze)
    p_analyze.add_argument("--out", help="write the report JSON here (default: summary only)")
    p_analyze.add_argument("--plots", help="write plot-data CSVs into this directory")
    p_analyze.add_argument(
        "--histogram-bins", type=int, help="bins for the difficulty histograms (default: 30)"
    )

    p_sweep = sub.add_parser("sweep", help="R^2 of each formulation across SD-filter widths")
    add_analysis_flags(p_sweep)
    p_sweep.add_argument("--from", dest="from_k", type=float,
                         help="first SD multiplier (default: 1.5)")
    p_sweep.add_argument("--to", dest="to_k", type=float,
                         help="last SD multiplier, inclusive (default: 8.0)")
    p_sweep.add_argument("--step", type=float, help="grid step (default: 0.25)")
    p_sweep.add_argument("--out", help="write the per-multiplier CSV here")

    p_synth = sub.add_parser("synth", help="generate a seeded synthetic trial log")
    p_synth.add_argument("--n", type=int, help="number of trials (default: 1000)")
    p_synth.add_argument("--intercept", type=float, help="true intercept, seconds (default: 0.3)")
    p_synth.add_argument("--slope", type=float, help="true slope, s/bit (default: 0.1)")
    p_synth.add_argument("--widths", help="comma-separated widths, px (default: 32,64,96,128)")
    p_synth.add_argument("--amp-min", type=float, help="min amplitude, px (default: 100)")
    p_synth.add_argument("--amp-max", type=float, help="max amplitude, px (default: 900)")
    p_synth.add_argument("--mt-noise-sd", type=float, help="movement-time noise SD, s (default: 0)")
    p_synth.add_argument("--scatter-sd", type=float, help="endpoint scatter SD, px (default: 0)")
    p_synth.add_argument("--seed", type=int, help="RNG seed (default: 0)")
    p_synth.add_argument("--out", help="output trial log path (required)")

    p_convert = sub.add_parser("convert", help="convert a foreign dataset via a column mapping")
    p_convert.add_argument("--input", help="source file (csv or jsonl)")
    p_convert.add_argument("--mapping", help="column-mapping JSON file")
    p_convert.add_argument("--out", help="output canonical trial log")
    p_convert.add_argument("--strict", action="store_true", default=None,
                           help="abort on the first bad row (default: off)")

    p_collect = sub.add_parser("collect", help="run a local HTTP receiver for uploaded sessions")
    p_collect.add_argument("--port", type=int, help="TCP port to listen on (default: 8077)")
    p_collect.add_argument("--host", help="bind address (default: 127.0.0.1)")
    p_collect.add_argument("--out", help="directory for per-session trial logs (default: .)")
    p_collect.add_argument("--strict", action="store_true", default=None,
                           help="reject uploads at the first invalid line (default: off)")

    return parser


def _parse_stages(text: str) -> tuple[CleanupStage, ...]:
    if text.strip() == "":
        return ()
    stages = []
    for token in text.split(","):
        token = token.strip().lower()
        if token not in _STAGE_ALIASES:
            raise UsageError(f"unknown cleanup stage {token!r} (use error, l1, l2)")
        stage = _STAGE_ALIASES[token]
        if stage not in stages:
            stages.append(stage)
    return tuple(stages)


def _analysis_settings(args, config):
    input_path = _resolve(args, config, "input", None)
    if input_path is None:
        raise UsageError("missing required flag: --input")
    method_name = _resolve(args, config, "we_method", "sd")
    if method_name not in _WE_METHODS:
        raise UsageError(f"unknown --we-method {method_name!r}")
    method = _WE_METHODS[method_name]
    error_rate = _resolve(args, config, "error_rate", None)
    if method is WidthMethod.DISCRETE_ERROR and error_rate is None:
        raise UsageError("missing required flag: --error-rate (needed with --we-method discrete)")
    if method is WidthMethod.STANDARD_DEVIATION and error_rate is not None:
        raise UsageError("conflicting flags: --error-rate only applies to --we-method discrete")
    grouping_name = _resolve(args, config, "grouping", "participant_width")
    if grouping_name not in _GROUPINGS:
        raise UsageError(f"unknown --grouping {grouping_name!r}")
    try:
        we_config = EffectiveWidthConfig(
            method=method,
            error_rate=error_rate,
            grouping=_GROUPINGS[grouping_name],
        )
        t_params = TemporalFactorParams(
            a=_resolve(args, config, "t_a", 1.0),
            b=_resolve(args, config, "t_b", 0.0),
            c=_resolve(args, config, "t_c", 0.0),
        )
        cleanup = CleanupSpec(
            sd_multiplier=_resolve(args, config, "sd_filter", 3.0),
            stages=_parse_stages(_resolve(args, config, "stages", "error,l1,l2")),
        )
    except ValueError as err:
        raise UsageError(str(err))
    source_tag = SourceTag(_resolve(args, config, "source_tag", "collected"))
    strict = bool(_resolve(args, config, "strict", False))
    return input_path, we_config, t_params, cleanup, source_tag, strict


def _load_dataset(path, strict: bool, source_tag: SourceTag) -> Dataset:
    if not Path(path).exists():
        raise FileNotFoundError(f"input file not found: {path}")
    dataset = read_canonical(path, strict=strict, source_tag=source_tag)
    if len(dataset) == 0:
        raise ValueError("empty dataset")
    return dataset


def cmd_analyze(args) -> int:
    config = _load_config("analyze")
    input_path, we_config, t_params, cleanup, source_tag, strict = _analysis_settings(args, config)
    dataset = _load_dataset(input_path, strict, source_tag)
    bins = int(_resolve(args, config, "histogram_bins", 30))
    result = analyze(dataset, we_config, t_params, cleanup, histogram_bins=bins)
    out = _resolve(args, config, "out", None)
    if out:
        rpt.write_report_json(result, out)
    plots = _resolve(args, config, "plots", None)
    if plots:
        rpt.write_plot_data(result, plots)
    print(rpt.format_summary(result))
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = _load_config("sweep")
    input_path, we_config, t_params, cleanup, source_tag, strict = _analysis_settings(args, config)
    dataset = _load_dataset(input_path, strict, source_tag)
    from_k = float(_resolve(args, config, "from_k", 1.5))
    to_k = float(_resolve(args, config, "to_k", 8.0))
    step = float(_resolve(args, config, "step", 0.25))
    rows = sd_sweep(
        dataset, we_config, t_params, cleanup, from_k=from_k, to_k=to_k, step=step
    )
    out = _resolve(args, config, "out", None)
    if out:
        rpt.write_sweep_csv(rows, out)
    for row in rows:
        if row.r_squared is None:
            print(f"k={row.sd_multiplier:<5g} n={row.n_accepted:<6d} flagged: {row.note}")
        else:
            r2 = row.r_squared
            print(
                f"k={row.sd_multiplier:<5g} n={row.n_accepted:<6d} "
                f"R2_NA={r2[Formulation.NA]:.4f} R2_SA={r2[Formulation.SA]:.4f} "
                f"R2_TA={r2[Formulation.TA]:.4f} R2_TSA={r2[Formulation.TSA]:.4f}"
            )
    return EXIT_OK


def cmd_synth(args) -> int:
    config = _load_config("synth")
    out = _resolve(args, config, "out", None)
    if out is None:
        raise UsageError("missing required flag: --out")
    widths_text = _resolve(args, config, "widths", "32,64,96,128")
    try:
        widths = tuple(float(w) for w in str(widths_text).split(","))
        spec = SynthSpec(
            n_trials=int(_resolve(args, config, "n", 1000)),
            intercept_s=float(_resolve(args, config, "intercept", 0.3)),
            slope_s_per_bit=float(_resolve(args, config, "slope", 0.1)),
            width_set=widths,
            amplitude_range=(
                float(_resolve(args, config, "amp_min", 100.0)),
                float(_resolve(args, config, "amp_max", 900.0)),
            ),
            mt_noise_sd=float(_resolve(args, config, "mt_noise_sd", 0.0)),
            endpoint_scatter_sd=float(_resolve(args, config, "scatter_sd", 0.0)),
            seed=int(_resolve(args, config, "seed", 0)),
        )
    except ValueError as err:
        raise UsageError(str(err))
    dataset = generate(spec)
    write_canonical(dataset, out)
    print(f"wrote {len(dataset)} trials to {out} (seed {spec.seed})")
    return EXIT_OK


def cmd_convert(args) -> int:
    config = _load_config("convert")
    input_path = _resolve(args, config, "input", None)
    mapping_path = _resolve(args, config, "mapping", None)
    out = _resolve(args, config, "out", None)
    for name, value in (("--input", input_path), ("--mapping", mapping_path), ("--out", out)):
        if value is None:
            raise UsageError(f"missing required flag: {name}")
    if not Path(mapping_path).exists():
        raise UsageError(f"mapping file not found: {mapping_path}")
    try:
        mapping = load_mapping(mapping_path)
    except (ValueError, json.JSONDecodeError) as err:
        raise UsageError(f"bad mapping file {mapping_path}: {err}")
    strict = bool(_resolve(args, config, "strict", False))
    dataset = convert(input_path, mapping, strict=strict)
    write_canonical(dataset, out)
    print(f"wrote {len(dataset)} trials to {out}")
    return EXIT_OK


# --- collection endpoint ----------------------------------------------------

_SESSION_SAFE = re.compile(r"[^A-Za-z0-9._-]")


class CollectState:
    def __init__(self, out_dir: Path, strict: bool):
        self.out_dir = out_dir
        self.strict = strict
        self.lock = threading.Lock()

    def persist(self, body: str) -> tuple[int, dict]:
        """Parse an uploaded trial log and append per-session files."""
        lines = body.splitlines()
        n_lines = sum(1 for line in lines if line.strip())
        diagnostics: list[str] = []
        try:
            trials, _ = parse_trial_lines(
                lines, strict=self.strict, on_diagnostic=diagnostics.append
            )
        except IngestError as err:
            return 400, {"accepted": 0, "rejected": n_lines, "diagnostics": [str(err)]}
        by_session: dict[str, list] = {}
        for trial in trials:
            by_session.setdefault(trial.session_id, []).append(trial)
        # One lock serializes all appends: uploads never interleave
        # inside a session file.
        with self.lock:
            for session_id, session_trials in sorted(by_session.items()):
                safe = _SESSION_SAFE.sub("_", session_id) or "session"
                path = self.out_dir / f"{safe}.trials.jsonl"
                with open(path, "a", encoding="utf-8", newline="\n") as handle:
                    for trial in session_trials:
                        handle.write(json.dumps(trial_to_record(trial), ensure_ascii=False))
                        handle.write("\n")
        return 200, {
            "accepted": len(trials),
            "rejected": n_lines - len(trials),
            "diagnostics": diagnostics,
        }


class _CollectHandler(http.server.BaseHTTPRequestHandler):
    state: CollectState  # injected by make_collect_server

    def do_POST(self):
        if self.path != "/v1/sessions":
            self._reply(404, {"error": f"unknown path {self.path}"})
            return
        length = int(self.headers.get("Content-Length", 0))
        body = self.rfile.read(length).decode("utf-8", errors="replace")
        status, payload = self.state.persist(body)
        self._reply(status, payload)

    def do_GET(self):
        self._reply(405, {"error": "POST canonical trial logs to /v1/sessions"})

    def _reply(self, status: int, payload: dict):
        data = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, fmt, *log_args):
        print(f"collect: {fmt % log_args}", file=sys.stderr)


class _ThreadingHTTPServer(socketserver.ThreadingMixIn, http.server.HTTPServer):
    daemon_threads = True
    allow_reuse_address = True


def make_collect_server(host: str, port: int, out_dir, strict: bool) -> _ThreadingHTTPServer:
    out_path = Path(out_dir)
    out_path.mkdir(parents=True, exist_ok=True)
    state = CollectState(out_path, strict)
    handler = type("CollectHandler", (_CollectHandler,), {"state": state})
    return _ThreadingHTTPServer((host, port), handler)


def cmd_collect(args) -> int:
    config = _load_config("collect")
    host = str(_resolve(args, config, "host", "127.0.0.1"))
    port = int(_resolve(args, config, "port", 8077))
    out_dir = _resolve(args, config, "out", ".")
    strict = bool(_resolve(args, config, "strict", False))
    try:
        server = make_collect_server(host, port, out_dir, strict)
    except OSError as err:
        print(f"error: cannot bind {host}:{port}: {err}", file=sys.stderr)
        return EXIT_RUNTIME
    print(
        f"collecting on http://{host}:{server.server_address[1]}/v1/sessions -> {out_dir}",
        flush=True,
    )
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    print("collect: shut down cleanly")
    return EXIT_OK


_COMMANDS = {
    "analyze": cmd_analyze,
    "sweep": cmd_sweep,
    "synth": cmd_synth,
    "convert": cmd_convert,
    "collect": cmd_collect,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (PipelineError, IngestError, ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())

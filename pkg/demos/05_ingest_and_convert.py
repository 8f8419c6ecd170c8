"""
Trial logs, foreign datasets, and the collection endpoint
=========================================================

The canonical trial log is JSON-lines, one trial per line.  Foreign
delimited-text datasets come in through a column mapping; the same
format is what the browser experiment uploads to the `collect`
endpoint.
"""

import json
import tempfile
import threading
import urllib.request
from pathlib import Path

from antasid import SynthSpec, generate, read_canonical, write_canonical
from antasid.cli import make_collect_server
from antasid.ingest import convert, load_mapping

workdir = Path(tempfile.mkdtemp(prefix="antasid-demo-"))

# --- canonical round trip -------------------------------------------
log_path = workdir / "session.trials.jsonl"
write_canonical(generate(SynthSpec(n_trials=5, seed=1)), log_path)
print("canonical log, first line:")
print(" ", log_path.read_text().splitlines()[0][:120], "...")
dataset = read_canonical(log_path, strict=True)
print(f"  re-read {len(dataset)} trials, tag {dataset.source_tag.value}")

# --- column-mapped conversion ---------------------------------------
# A foreign file: movement time in milliseconds, one amplitude column,
# no endpoint coordinates (they are mapped as constants).
foreign = workdir / "foreign.csv"
foreign.write_text(
    "run,user,w,time_ms,a\n"
    "g1,u1,30,512,240\n"
    "g1,u1,48,430,180\n"
    "g1,u2,30,780,400\n"
)
mapping_doc = {
    "format": "csv",
    "mt_to_seconds": 0.001,
    "source_tag": "benchmark_controlled",
    "fields": {
        "session_id": {"column": "run"},
        "participant_id": {"column": "user"},
        "level_type": {"const": 1},
        "level_label": {"const": "1.5.1"},
        "target_width_px": {"column": "w"},
        "start_x": {"const": 0.0},
        "start_y": {"const": 0.0},
        "end_x": {"const": 0.0},
        "end_y": {"const": 0.0},
        "target_center_x": {"const": 0.0},
        "target_center_y": {"const": 0.0},
        "mt_s": {"column": "time_ms"},
        "miss_clicks": {"const": 0},
        "amplitude_px": {"column": "a"},
    },
}
mapping_path = workdir / "foreign.mapping.json"
mapping_path.write_text(json.dumps(mapping_doc, indent=2))
converted = convert(foreign, load_mapping(mapping_path), on_diagnostic=print)
print(f"\nconverted {len(converted)} foreign rows; first MT = "
      f"{converted.trials[0].movement_time_s} s")

# --- collection endpoint --------------------------------------------
# The browser experiment POSTs the same canonical lines to /v1/sessions.
server = make_collect_server("127.0.0.1", 0, workdir / "uploads", strict=False)
thread = threading.Thread(target=server.serve_forever, daemon=True)
thread.start()
port = server.server_address[1]

body = log_path.read_bytes()
request = urllib.request.Request(
    f"http://127.0.0.1:{port}/v1/sessions", data=body, method="POST"
)
with urllib.request.urlopen(request) as response:
    print("\ncollect endpoint replied:", json.loads(response.read()))
server.shutdown()
server.server_close()

uploaded = sorted((workdir / "uploads").glob("*.trials.jsonl"))
print("persisted session files:", [p.name for p in uploaded])

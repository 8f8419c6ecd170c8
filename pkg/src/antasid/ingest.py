"""Canonical trial-log I/O and a column-mapped adapter for foreign files.

The canonical format is JSON-lines, one trial object per line, extension
``.trials.jsonl``.  Foreign delimited-text or JSON-lines datasets are
ingested through a ColumnMapping that names, per canonical field, either
a source column or a constant, plus unit conversion for movement time.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .trials import Dataset, LevelType, Point2, SourceTag, Trial

CANONICAL_EXTENSION = ".trials.jsonl"

# Field order of a canonical record; also the exhaustive set of known keys.
_CANONICAL_FIELDS = (
    "session_id",
    "participant_id",
    "level_type",
    "level_label",
    "target_width_px",
    "start",
    "end",
    "target_center",
    "mt_s",
    "miss_clicks",
    "trajectory",
    "amplitude_px",
)
_OPTIONAL_FIELDS = {"trajectory", "amplitude_px"}


class IngestError(ValueError):
    """Unrecoverable ingest failure; carries the offending line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def _stderr_diagnostic(message: str) -> None:
    print(message, file=sys.stderr)


def _parse_point(value, name: str) -> Point2:
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        raise ValueError(f"field {name!r} must be a [x, y] pair of numbers")
    return Point2(float(value[0]), float(value[1]))


def trial_from_record(record: dict, warn=None) -> Trial:
    """Build a Trial from a decoded canonical JSON object.

    Unknown keys are ignored; each one triggers a warning through
    ``warn`` when given.
    """
    if not isinstance(record, dict):
        raise ValueError("record must be a JSON object")
    for key in record:
        if key not in _CANONICAL_FIELDS and warn is not None:
            warn(f"unknown field {key!r} ignored")
    missing = [
        f for f in _CANONICAL_FIELDS if f not in record and f not in _OPTIONAL_FIELDS
    ]
    if missing:
        raise ValueError(f"missing required fields: {', '.join(missing)}")
    trajectory = None
    if record.get("trajectory") is not None:
        raw = record["trajectory"]
        if not isinstance(raw, list):
            raise ValueError("field 'trajectory' must be a list of [x, y] pairs")
        trajectory = tuple(_parse_point(p, "trajectory") for p in raw)
    amplitude = record.get("amplitude_px")
    return Trial(
        session_id=str(record["session_id"]),
        participant_id=str(record["participant_id"]),
        level_type=LevelType(int(record["level_type"])),
        level_label=str(record["level_label"]),
        target_width_px=float(record["target_width_px"]),
        start=_parse_point(record["start"], "start"),
        end=_parse_point(record["end"], "end"),
        target_center=_parse_point(record["target_center"], "target_center"),
        movement_time_s=float(record["mt_s"]),
        miss_clicks=int(record["miss_clicks"]),
        trajectory=trajectory,
        amplitude_px=float(amplitude) if amplitude is not None else None,
    )


def trial_to_record(t: Trial) -> dict:
    """Canonical JSON object for a trial, with deterministic key order."""
    record = {
        "session_id": t.session_id,
        "participant_id": t.participant_id,
        "level_type": int(t.level_type),
        "level_label": t.level_label,
        "target_width_px": t.target_width_px,
        "start": [t.start.x, t.start.y],
        "end": [t.end.x, t.end.y],
        "target_center": [t.target_center.x, t.target_center.y],
        "mt_s": t.movement_time_s,
        "miss_clicks": t.miss_clicks,
    }
    if t.trajectory is not None:
        record["trajectory"] = [[p.x, p.y] for p in t.trajectory]
    if t.amplitude_px is not None:
        record["amplitude_px"] = t.amplitude_px
    return record


def parse_trial_lines(
    lines,
    strict: bool = False,
    on_diagnostic=None,
) -> tuple[list[Trial], list[str]]:
    """Parse an iterable of canonical JSON lines into trials.

    Lenient mode collects diagnostics ("line N: message") and keeps
    going; strict mode raises IngestError at the first bad line.
    Blank lines are skipped.
    """
    diagnostics: list[str] = []

    def emit(line_no: int, message: str):
        text = f"line {line_no}: {message}"
        diagnostics.append(text)
        (on_diagnostic or _stderr_diagnostic)(text)

    trials: list[Trial] = []
    for line_no, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped:
            continue
        try:
            record = json.loads(stripped)
        except json.JSONDecodeError as err:
            if strict:
                raise IngestError(line_no, f"invalid JSON: {err}") from err
            emit(line_no, f"invalid JSON: {err}")
            continue
        current = line_no
        try:
            trial = trial_from_record(record, warn=lambda m: emit(current, m))
        except (ValueError, TypeError) as err:
            if strict:
                raise IngestError(line_no, str(err)) from err
            emit(line_no, str(err))
            continue
        trials.append(trial)
    if not trials and not diagnostics:
        emit(0, "no trials found")
    return trials, diagnostics


def read_canonical(
    path,
    strict: bool = False,
    source_tag: SourceTag = SourceTag.COLLECTED,
    on_diagnostic=None,
) -> Dataset:
    """Read a canonical trial log into a Dataset.

    Invalid lines are reported (and skipped) in lenient mode; in strict
    mode the first one aborts with its line number.
    """
    with open(path, encoding="utf-8") as handle:
        trials, _ = parse_trial_lines(handle, strict=strict, on_diagnostic=on_diagnostic)
    return Dataset(trials=tuple(trials), source_tag=source_tag)


def write_canonical(dataset: Dataset, path) -> None:
    """Write a Dataset as a canonical trial log.

    Field order is fixed and floats use the shortest round-trip
    representation, so identical datasets always serialize to
    identical bytes.
    """
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for trial in dataset.trials:
            handle.write(json.dumps(trial_to_record(trial), ensure_ascii=False))
            handle.write("\n")


# --- column-mapped conversion ----------------------------------------------

# Canonical scalar fields a mapping must cover (point coordinates are
# mapped componentwise).
REQUIRED_MAPPED_FIELDS = (
    "session_id",
    "participant_id",
    "level_type",
    "level_label",
    "target_width_px",
    "start_x",
    "start_y",
    "end_x",
    "end_y",
    "target_center_x",
    "target_center_y",
    "mt_s",
    "miss_clicks",
)
OPTIONAL_MAPPED_FIELDS = ("amplitude_px",)

_NUMERIC_FIELDS = {
    "target_width_px",
    "start_x",
    "start_y",
    "end_x",
    "end_y",
    "target_center_x",
    "target_center_y",
    "mt_s",
    "amplitude_px",
}
_INT_FIELDS = {"level_type", "miss_clicks"}


@dataclass(frozen=True)
class FieldSource:
    """Either a source column name or a constant for one canonical field."""

    column: str | None = None
    const: object = None

    def __post_init__(self):
        if (self.column is None) == (self.const is None):
            raise ValueError("field source needs exactly one of 'column' or 'const'")


@dataclass(frozen=True)
class ColumnMapping:
    """Recipe for converting a foreign dataset to canonical trials."""

    fields: dict[str, FieldSource]
    source_format: str = "csv"  # "csv" or "jsonl"
    delimiter: str = ","
    skip_rows: int = 0
    mt_to_seconds: float = 1.0
    heterogeneous_only: bool = False
    source_tag: SourceTag = SourceTag.COLLECTED

    def __post_init__(self):
        if self.source_format not in ("csv", "jsonl"):
            raise ValueError(f"unsupported source format {self.source_format!r}")
        if self.mt_to_seconds <= 0:
            raise ValueError("mt_to_seconds multiplier must be > 0")
        missing = [f for f in REQUIRED_MAPPED_FIELDS if f not in self.fields]
        if missing:
            raise ValueError(f"unmapped required field: {', '.join(missing)}")
        unknown = [
            f
            for f in self.fields
            if f not in REQUIRED_MAPPED_FIELDS and f not in OPTIONAL_MAPPED_FIELDS
        ]
        if unknown:
            raise ValueError(f"unknown mapped field: {', '.join(unknown)}")


def load_mapping(path) -> ColumnMapping:
    """Load a ColumnMapping from its JSON document."""
    with open(path, encoding="utf-8") as handle:
        doc = json.load(handle)
    raw_fields = doc.get("fields")
    if not isinstance(raw_fields, dict):
        raise ValueError("mapping document needs a 'fields' object")
    fields = {}
    for name, source in raw_fields.items():
        if not isinstance(source, dict):
            raise ValueError(f"field {name!r}: source must be an object")
        fields[name] = FieldSource(
            column=source.get("column"), const=source.get("const")
        )
    return ColumnMapping(
        fields=fields,
        source_format=doc.get("format", "csv"),
        delimiter=doc.get("delimiter", ","),
        skip_rows=int(doc.get("skip_rows", 0)),
        mt_to_seconds=float(doc.get("mt_to_seconds", 1.0)),
        heterogeneous_only=bool(doc.get("heterogeneous_only", False)),
        source_tag=SourceTag(doc.get("source_tag", "collected")),
    )


def _iter_source_rows(path, mapping: ColumnMapping):
    """Yield (line_no, row_dict) from the foreign file."""
    text = Path(path).read_text(encoding="utf-8")
    if mapping.source_format == "jsonl":
        for line_no, line in enumerate(text.splitlines(), start=1):
            if line_no <= mapping.skip_rows or not line.strip():
                continue
            yield line_no, json.loads(line)
    else:
        lines = text.splitlines()
        reader = csv.DictReader(
            io.StringIO("\n".join(lines[mapping.skip_rows :])),
            delimiter=mapping.delimiter,
        )
        # DictReader consumed the header; data starts one line later.
        for offset, row in enumerate(reader):
            yield mapping.skip_rows + 2 + offset, row


def _extract(row: dict, name: str, source: FieldSource):
    if source.const is not None:
        return source.const
    if source.column not in row:
        raise KeyError(source.column)
    return row[source.column]


def convert(
    path,
    mapping: ColumnMapping,
    strict: bool = False,
    on_diagnostic=None,
) -> Dataset:
    """Convert a foreign dataset to a canonical Dataset.

    Movement times are multiplied by ``mapping.mt_to_seconds``.  Rows
    with unparseable cells yield per-row diagnostics (or abort in
    strict mode); a missing mapped column is always fatal.
    """
    diagnostics: list[str] = []

    def emit(line_no: int, message: str):
        text = f"line {line_no}: {message}"
        diagnostics.append(text)
        (on_diagnostic or _stderr_diagnostic)(text)

    trials: list[Trial] = []
    n_straight_line = 0
    for line_no, row in _iter_source_rows(path, mapping):
        values = {}
        try:
            for name in REQUIRED_MAPPED_FIELDS + OPTIONAL_MAPPED_FIELDS:
                source = mapping.fields.get(name)
                if source is None:
                    continue
                raw = _extract(row, name, source)
                if name in _NUMERIC_FIELDS:
                    raw = float(raw)
                elif name in _INT_FIELDS:
                    raw = int(float(raw))
                values[name] = raw
        except KeyError as err:
            raise ValueError(f"missing mapped column {err.args[0]!r} at line {line_no}")
        except (TypeError, ValueError) as err:
            if strict:
                raise IngestError(line_no, f"bad cell: {err}") from err
            emit(line_no, f"bad cell: {err}")
            continue
        try:
            trial = Trial(
                session_id=str(values["session_id"]),
                participant_id=str(values["participant_id"]),
                level_type=LevelType(values["level_type"]),
                level_label=str(values["level_label"]),
                target_width_px=values["target_width_px"],
                start=Point2(values["start_x"], values["start_y"]),
                end=Point2(values["end_x"], values["end_y"]),
                target_center=Point2(values["target_center_x"], values["target_center_y"]),
                movement_time_s=values["mt_s"] * mapping.mt_to_seconds,
                miss_clicks=values["miss_clicks"],
                amplitude_px=values.get("amplitude_px"),
            )
        except ValueError as err:
            if strict:
                raise IngestError(line_no, str(err)) from err
            emit(line_no, str(err))
            continue
        if mapping.heterogeneous_only and trial.level_type is not LevelType.HETEROGENEOUS:
            continue
        if trial.amplitude_px is None:
            n_straight_line += 1
        trials.append(trial)
    if n_straight_line:
        emit(
            0,
            f"{n_straight_line} trial(s) without trajectory or amplitude column; "
            "straight-line amplitude fallback in effect",
        )
    return Dataset(trials=tuple(trials), source_tag=mapping.source_tag)

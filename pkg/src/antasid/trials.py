"""Domain types and geometry for individual pointing trials.

A trial is one target acquisition: the cursor starts somewhere, travels
(optionally along a recorded trajectory), and ends with a click near the
target center.  Everything downstream (difficulty indices, regressions)
is built on the quantities computed here: Euclidean distance, movement
amplitude, path efficiency, and the signed endpoint offset along the
task axis.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field


class LevelType(enum.IntEnum):
    HOMOGENEOUS = 0
    HETEROGENEOUS = 1


class SourceTag(str, enum.Enum):
    INTERNAL = "internal"
    BENCHMARK_CONTROLLED = "benchmark_controlled"
    BENCHMARK_UNCONTROLLED = "benchmark_uncontrolled"
    SYNTHETIC = "synthetic"
    COLLECTED = "collected"


class AmplitudeSource(enum.Enum):
    """Where movement_amplitude() got its value for a given trial."""

    TRAJECTORY = "trajectory"
    PRECOMPUTED = "precomputed"
    STRAIGHT_LINE = "straight_line"


@dataclass(frozen=True)
class Point2:
    """Screen coordinate in pixels."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite coordinate: ({self.x}, {self.y})")


def euclidean_distance(p: Point2, q: Point2) -> float:
    """Euclidean distance between two points, in pixels."""
    return math.hypot(p.x - q.x, p.y - q.y)


@dataclass(frozen=True)
class Trial:
    """One pointing task, as recorded by the experiment.

    ``movement_time_s`` is the duration from target appearance to the
    successful click.  ``trajectory``, when present, is the sampled
    cursor path and must start at ``start``.  ``amplitude_px`` is a
    precomputed path length for sources that recorded no trajectory.
    """

    session_id: str
    participant_id: str
    level_type: LevelType
    level_label: str
    target_width_px: float
    start: Point2
    end: Point2
    target_center: Point2
    movement_time_s: float
    miss_clicks: int = 0
    trajectory: tuple[Point2, ...] | None = None
    amplitude_px: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.movement_time_s) and self.movement_time_s > 0):
            raise ValueError(f"movement_time_s must be > 0, got {self.movement_time_s}")
        if not (math.isfinite(self.target_width_px) and self.target_width_px > 0):
            raise ValueError(f"target_width_px must be > 0, got {self.target_width_px}")
        if self.miss_clicks < 0:
            raise ValueError(f"miss_clicks must be >= 0, got {self.miss_clicks}")
        if self.trajectory is not None:
            if len(self.trajectory) < 2:
                raise ValueError("trajectory must contain at least 2 points")
            if self.trajectory[0] != self.start:
                raise ValueError("trajectory must begin at the start coordinate")
        if self.amplitude_px is not None:
            if not (math.isfinite(self.amplitude_px) and self.amplitude_px > 0):
                raise ValueError(f"amplitude_px must be > 0, got {self.amplitude_px}")


@dataclass(frozen=True)
class CleanupStageRecord:
    """Accept/reject bookkeeping for one cleanup stage."""

    stage: str
    n_input: int
    n_accepted: int
    n_rejected: int
    n_homogeneous: int = 0
    n_heterogeneous: int = 0

    def __post_init__(self):
        if self.n_accepted + self.n_rejected != self.n_input:
            raise ValueError(
                f"stage {self.stage}: accepted {self.n_accepted} + rejected "
                f"{self.n_rejected} != input {self.n_input}"
            )


@dataclass(frozen=True)
class Dataset:
    """An ordered, immutable collection of trials with provenance."""

    trials: tuple[Trial, ...]
    source_tag: SourceTag = SourceTag.COLLECTED
    cleanup_history: tuple[CleanupStageRecord, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.trials)

    def __iter__(self):
        return iter(self.trials)


def amplitude_source(t: Trial) -> AmplitudeSource:
    """Which input movement_amplitude() will use for this trial.

    STRAIGHT_LINE means the path length is approximated by the
    start-to-end distance because neither a trajectory nor a
    precomputed amplitude was recorded.
    """
    if t.trajectory is not None:
        return AmplitudeSource.TRAJECTORY
    if t.amplitude_px is not None:
        return AmplitudeSource.PRECOMPUTED
    return AmplitudeSource.STRAIGHT_LINE


def movement_amplitude(t: Trial) -> float:
    """Total cursor path length of the trial, in pixels.

    Sums segment lengths over the trajectory when one was recorded,
    otherwise falls back to the precomputed amplitude and finally to
    the straight start-to-end distance (see amplitude_source()).
    """
    if t.trajectory is not None:
        return math.fsum(
            euclidean_distance(a, b) for a, b in zip(t.trajectory, t.trajectory[1:])
        )
    if t.amplitude_px is not None:
        return t.amplitude_px
    return euclidean_distance(t.start, t.end)


def path_efficiency(t: Trial) -> float:
    """Straight-line distance to the target center over the path length.

    Can exceed 1 when the click lands short of the center.
    """
    amp = movement_amplitude(t)
    if amp == 0:
        raise ValueError("degenerate trial: movement amplitude is zero")
    return euclidean_distance(t.start, t.target_center) / amp


def endpoint_axis_offset(t: Trial) -> float:
    """Signed endpoint error along the task axis, in pixels.

    Projects (end - target_center) onto the unit vector pointing from
    start to target_center; positive values are overshoots past the
    center, negative values undershoots.
    """
    ax = t.target_center.x - t.start.x
    ay = t.target_center.y - t.start.y
    norm = math.hypot(ax, ay)
    if norm == 0:
        raise ValueError("start coincides with target center: task axis undefined")
    ex = t.end.x - t.target_center.x
    ey = t.end.y - t.target_center.y
    return (ex * ax + ey * ay) / norm


def trial_defects(t: Trial) -> list[str]:
    """Semantic defects that make a trial unusable downstream.

    Construction already enforces the type invariants; this catches the
    degenerate-geometry cases (zero task axis, zero path length) that
    break axis projection and path efficiency.  Used by the
    error-removal cleanup stage.
    """
    defects = []
    if t.start == t.target_center:
        defects.append("start coincides with target center")
    if movement_amplitude(t) == 0:
        defects.append("zero movement amplitude")
    return defects

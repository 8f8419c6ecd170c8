"""Seeded synthetic trial generator with known ground truth.

Trials are drawn from the classical linear movement-time model: an
amplitude and width are sampled, the unadjusted difficulty computed,
and MT set to intercept + slope * ID plus optional Gaussian noise.
Endpoints scatter along the task axis.  Because the generating model is
the classical one, a regression of MT on the unadjusted index must
recover the configured intercept/slope, which makes generated datasets
an independent oracle for the whole analysis pipeline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .trials import Dataset, LevelType, Point2, SourceTag, Trial

# Session/participant block sizes mirror the pointing game's design:
# 90 trials per gameplay, 5 gameplays per participant.
TRIALS_PER_SESSION = 90
SESSIONS_PER_PARTICIPANT = 5


@dataclass(frozen=True)
class SynthSpec:
    n_trials: int
    intercept_s: float = 0.3
    slope_s_per_bit: float = 0.1
    width_set: tuple[float, ...] = (32.0, 64.0, 96.0, 128.0)
    amplitude_range: tuple[float, float] = (100.0, 900.0)
    mt_noise_sd: float = 0.0
    endpoint_scatter_sd: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.n_trials < 1:
            raise ValueError(f"n_trials must be >= 1, got {self.n_trials}")
        if self.slope_s_per_bit < 0:
            raise ValueError("slope must be >= 0")
        if self.mt_noise_sd < 0 or self.endpoint_scatter_sd < 0:
            raise ValueError("noise standard deviations must be >= 0")
        if not self.width_set or any(w <= 0 for w in self.width_set):
            raise ValueError("width_set must be non-empty with positive widths")
        lo, hi = self.amplitude_range
        if not (0 < lo <= hi):
            raise ValueError(f"amplitude_range must satisfy 0 < lo <= hi, got {lo, hi}")


MT_FLOOR_S = 0.01


def generate(spec: SynthSpec) -> Dataset:
    """Generate a deterministic synthetic Dataset from the spec.

    The sampled amplitude is stored on each trial as ``amplitude_px``,
    so downstream difficulty values are computed from exactly the
    quantity that generated the movement time.  Noisy movement times
    are clamped at 10 ms to keep trials valid in a single pass.
    """
    rng = np.random.default_rng(spec.seed)
    widths = np.asarray(spec.width_set, dtype=float)
    lo, hi = spec.amplitude_range

    amps = rng.uniform(lo, hi, spec.n_trials)
    width_idx = rng.integers(0, widths.size, spec.n_trials)
    angles = rng.uniform(0.0, 2.0 * math.pi, spec.n_trials)
    start_x = rng.uniform(0.0, 1920.0, spec.n_trials)
    start_y = rng.uniform(0.0, 1080.0, spec.n_trials)
    mt_noise = (
        rng.normal(0.0, spec.mt_noise_sd, spec.n_trials)
        if spec.mt_noise_sd > 0
        else np.zeros(spec.n_trials)
    )
    scatter = (
        rng.normal(0.0, spec.endpoint_scatter_sd, spec.n_trials)
        if spec.endpoint_scatter_sd > 0
        else np.zeros(spec.n_trials)
    )

    trials = []
    for i in range(spec.n_trials):
        amp = float(amps[i])
        width = float(widths[width_idx[i]])
        difficulty = math.log2(amp / width + 1.0)
        mt = max(MT_FLOOR_S, spec.intercept_s + spec.slope_s_per_bit * difficulty + float(mt_noise[i]))
        ux = math.cos(float(angles[i]))
        uy = math.sin(float(angles[i]))
        start = Point2(float(start_x[i]), float(start_y[i]))
        center = Point2(start.x + amp * ux, start.y + amp * uy)
        end = Point2(center.x + float(scatter[i]) * ux, center.y + float(scatter[i]) * uy)
        session = i // TRIALS_PER_SESSION
        participant = session // SESSIONS_PER_PARTICIPANT
        trials.append(
            Trial(
                session_id=f"synth{spec.seed}-s{session:03d}",
                participant_id=f"p{participant + 1:02d}",
                level_type=LevelType.HETEROGENEOUS,
                level_label="1.5.1",
                target_width_px=width,
                start=start,
                end=end,
                target_center=center,
                movement_time_s=mt,
                miss_clicks=0,
                amplitude_px=amp,
            )
        )
    return Dataset(trials=tuple(trials), source_tag=SourceTag.SYNTHETIC)

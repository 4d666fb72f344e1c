"""Gaze-based engagement decisions."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

LOOKING = "looking"
NOT_LOOKING = "not_looking"


class EmptyStream(ValueError):
    pass


@dataclass(frozen=True)
class GazeSample:
    gaze_angle_x: float  # radians, left-right
    gaze_angle_y: float  # radians, up-down
    t: float  # seconds


@dataclass(frozen=True)
class EngagementConfig:
    center: Tuple[float, float] = (0.0, 0.0)
    angle_threshold: float = 0.25
    duration_threshold: float = 3.0

    def __post_init__(self):
        if self.angle_threshold <= 0 or self.duration_threshold <= 0:
            raise ValueError("thresholds must be positive")


def engagement_decide(stream: Sequence[GazeSample],
                      cfg: EngagementConfig = EngagementConfig()) -> List[str]:
    """One decision per sample. The user counts as not looking once the gaze
    has strayed beyond the angle threshold continuously for the duration
    threshold, and as looking again at the first sample back inside it."""
    if not stream:
        raise EmptyStream("gaze stream is empty")
    x0, y0 = cfg.center
    decisions = []
    stray_since = None  # start time of the current out-of-bounds run
    looking_away = False
    for sample in stream:
        deviation = math.hypot(sample.gaze_angle_x - x0, sample.gaze_angle_y - y0)
        if deviation <= cfg.angle_threshold:
            stray_since = None
            looking_away = False
        else:
            if stray_since is None:
                stray_since = sample.t
            if sample.t - stray_since >= cfg.duration_threshold:
                looking_away = True
        decisions.append(NOT_LOOKING if looking_away else LOOKING)
    return decisions


def load_gaze_csv(path) -> List[GazeSample]:
    """CSV columns: t, gaze_angle_x, gaze_angle_y (header row required)."""
    samples = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            samples.append(GazeSample(
                gaze_angle_x=float(row["gaze_angle_x"]),
                gaze_angle_y=float(row["gaze_angle_y"]),
                t=float(row["t"]),
            ))
    return samples

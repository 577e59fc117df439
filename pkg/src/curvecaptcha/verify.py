"""Trace acceptance pipeline: point-count floor, geometric pre-check, optional
normality gating, and per-axis two-sample z tests.

Every stage is order-invariant in both point sets: a user may start drawing
from either end of the curve, and permuting trace points yields a
bit-identical verdict. All failures are verdicts, never exceptions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .curve import CanvasSpec, DEFAULT_CANVAS
from .stats import (
    DegenerateSampleError,
    SW_MAX_N,
    critical_z,
    shapiro_wilk,
    summarize,
    two_sample_z,
)


class Reason(str, Enum):
    OK = "ok"
    TOO_FEW_POINTS = "too-few-points"
    PRECHECK_DISTANCE = "precheck-distance"
    PRECHECK_COVERAGE = "precheck-coverage"
    NORMALITY_REJECT = "normality-reject"
    Z_REJECT_X = "z-reject-x"
    Z_REJECT_Y = "z-reject-y"
    SEGMENT_UNMATCHED = "segment-unmatched"
    EXPIRED = "expired"
    CONSUMED = "consumed"


@dataclass(frozen=True)
class TracePoint:
    x: float
    y: float
    t: float = 0.0


@dataclass(frozen=True)
class Trace:
    """User-drawn strokes: each stroke is an (n, 3) float array of x, y, t.

    Timestamps are captured for the wire format but never influence verdicts.
    """

    strokes: tuple[np.ndarray, ...]

    @classmethod
    def from_points(cls, strokes: Sequence[Sequence[TracePoint | tuple]]) -> "Trace":
        arrays = []
        for stroke in strokes:
            pts = [(p[0], p[1], p[2] if len(p) > 2 else 0.0) for p in stroke]
            arrays.append(np.asarray(pts, dtype=np.float64).reshape(-1, 3))
        return cls(strokes=tuple(arrays))

    @classmethod
    def from_xy(cls, xy: np.ndarray, t_step: float = 10.0) -> "Trace":
        """Single-stroke trace from an (n, 2) array, with synthetic timestamps."""
        xy = np.asarray(xy, dtype=np.float64)
        t = np.arange(len(xy), dtype=np.float64) * t_step
        return cls(strokes=(np.column_stack([xy, t]),))

    def points_xy(self) -> np.ndarray:
        if not self.strokes:
            return np.empty((0, 2), dtype=np.float64)
        return np.concatenate([s[:, :2] for s in self.strokes], axis=0)

    def total_points(self) -> int:
        return sum(len(s) for s in self.strokes)


@dataclass(frozen=True)
class VerifyConfig:
    """Verification thresholds; confidence adjusts hardness (0.90 is stricter
    than the default 0.99)."""

    confidence: float = 0.99
    precheck_mean_dist_max: float = 0.05  # fraction of the canvas diagonal
    coverage_radius: float = 20.0  # pixels
    coverage_min: float = 0.80
    min_trace_points: int = 31
    normality_gating: bool = False
    normality_alpha: float = 0.01
    precheck_enabled: bool = True  # disabled only for ablation studies
    trim_curve_ends: int = 0  # samples dropped from each curve end before comparison

    def __post_init__(self) -> None:
        if not 0.0 < self.confidence < 1.0:
            raise ValueError("confidence must be in (0, 1)")
        for name in ("precheck_mean_dist_max", "coverage_min", "normality_alpha"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} must be in (0, 1)")
        if self.coverage_radius <= 0:
            raise ValueError("coverage_radius must be positive")
        if self.trim_curve_ends < 0:
            raise ValueError("trim_curve_ends must be non-negative")


@dataclass(frozen=True)
class Verdict:
    passed: bool
    reason: Reason
    z_x: Optional[float] = None
    z_y: Optional[float] = None
    mean_dist: Optional[float] = None
    coverage: Optional[float] = None

    def __post_init__(self) -> None:
        if self.passed and self.reason is not Reason.OK:
            raise ValueError("a passing verdict must have reason ok")

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "reason": self.reason.value,
            "z_x": self.z_x,
            "z_y": self.z_y,
            "mean_dist": self.mean_dist,
            "coverage": self.coverage,
        }


def _nearest_distances(from_pts: np.ndarray, to_pts: np.ndarray) -> np.ndarray:
    """Per-point distance from each of from_pts to the nearest of to_pts."""
    diff = from_pts[:, None, :] - to_pts[None, :, :]
    return np.sqrt((diff**2).sum(axis=2)).min(axis=1)


def pre_check(
    curve: np.ndarray,
    trace_xy: np.ndarray,
    cfg: VerifyConfig,
    canvas: CanvasSpec = DEFAULT_CANVAS,
) -> tuple[float, float, bool]:
    """Cheap geometric screen rejecting careless attempts before statistics.

    Returns (mean_dist, coverage, ok): mean over trace points of the distance
    to the nearest curve point; the fraction of curve points with a trace
    point within the coverage radius; and whether both thresholds hold.
    """
    d_trace = np.sort(_nearest_distances(trace_xy, curve))
    mean_dist = float(d_trace.mean())
    d_curve = _nearest_distances(curve, trace_xy)
    coverage = float(np.count_nonzero(d_curve <= cfg.coverage_radius)) / len(curve)
    ok = mean_dist <= cfg.precheck_mean_dist_max * canvas.diagonal and coverage >= cfg.coverage_min
    return mean_dist, coverage, ok


def _axis_normality_ok(deviations: np.ndarray, alpha: float) -> bool:
    """Shapiro-Wilk screen on per-axis deviations; constant deviations carry
    no normality evidence and large samples are reduced to evenly spaced
    order statistics (order-invariant)."""
    d = np.sort(deviations)
    if d[0] == d[-1]:
        return True
    if len(d) > SW_MAX_N:
        d = d[np.linspace(0, len(d) - 1, SW_MAX_N).round().astype(int)]
    try:
        result = shapiro_wilk(d)
    except DegenerateSampleError:
        return True
    return result.p_value >= alpha


def evaluate(
    curve: np.ndarray,
    trace: Trace,
    cfg: VerifyConfig = VerifyConfig(),
    canvas: CanvasSpec = DEFAULT_CANVAS,
) -> Verdict:
    """Run the full pipeline for one curve against one trace.

    Pass requires |z| within the two-sided critical value on both axes, after
    the point-count floor, the geometric pre-check, and (if enabled) the
    normality gate.
    """
    curve = np.asarray(curve, dtype=np.float64)
    if cfg.trim_curve_ends > 0 and len(curve) > 2 * cfg.trim_curve_ends + 2:
        curve = curve[cfg.trim_curve_ends : -cfg.trim_curve_ends]

    flat = trace.points_xy()
    if len(flat) < cfg.min_trace_points:
        return Verdict(passed=False, reason=Reason.TOO_FEW_POINTS)

    mean_dist, coverage, precheck_ok = pre_check(curve, flat, cfg, canvas)

    zx = two_sample_z(summarize(curve[:, 0]), summarize(flat[:, 0]))
    zy = two_sample_z(summarize(curve[:, 1]), summarize(flat[:, 1]))
    crit = critical_z(cfg.confidence)

    def verdict(passed: bool, reason: Reason) -> Verdict:
        return Verdict(
            passed=passed,
            reason=reason,
            z_x=zx.z,
            z_y=zy.z,
            mean_dist=mean_dist,
            coverage=coverage,
        )

    if cfg.precheck_enabled and not precheck_ok:
        if mean_dist > cfg.precheck_mean_dist_max * canvas.diagonal:
            return verdict(False, Reason.PRECHECK_DISTANCE)
        return verdict(False, Reason.PRECHECK_COVERAGE)

    if cfg.normality_gating:
        nearest = _nearest_indices(flat, curve)
        dx = flat[:, 0] - curve[nearest, 0]
        dy = flat[:, 1] - curve[nearest, 1]
        if not (_axis_normality_ok(dx, cfg.normality_alpha) and _axis_normality_ok(dy, cfg.normality_alpha)):
            return verdict(False, Reason.NORMALITY_REJECT)

    if not zx.within_critical(crit):
        return verdict(False, Reason.Z_REJECT_X)
    if not zy.within_critical(crit):
        return verdict(False, Reason.Z_REJECT_Y)
    return verdict(True, Reason.OK)


def _nearest_indices(from_pts: np.ndarray, to_pts: np.ndarray) -> np.ndarray:
    diff = from_pts[:, None, :] - to_pts[None, :, :]
    return ((diff**2).sum(axis=2)).argmin(axis=1)


def _centroid(pts: np.ndarray) -> np.ndarray:
    return np.sort(pts, axis=0).mean(axis=0)


def evaluate_short(
    segments: Sequence[np.ndarray],
    trace: Trace,
    cfg: VerifyConfig = VerifyConfig(),
    canvas: CanvasSpec = DEFAULT_CANVAS,
) -> Verdict:
    """Short-variant pipeline: each stroke is assigned to the segment with the
    nearest centroid; every segment needs at least one stroke, and every
    segment must pass its own evaluation."""
    segments = [np.asarray(s, dtype=np.float64) for s in segments]
    if not segments:
        raise ValueError("segments must be non-empty")
    strokes = [s for s in trace.strokes if len(s) > 0]
    if not strokes:
        return Verdict(passed=False, reason=Reason.TOO_FEW_POINTS)

    seg_centroids = np.stack([_centroid(s) for s in segments])
    assigned: list[list[np.ndarray]] = [[] for _ in segments]
    for stroke in strokes:
        c = _centroid(stroke[:, :2])
        idx = int(np.argmin(((seg_centroids - c) ** 2).sum(axis=1)))
        assigned[idx].append(stroke)

    if any(not group for group in assigned):
        return Verdict(passed=False, reason=Reason.SEGMENT_UNMATCHED)

    worst_zx = worst_zy = 0.0
    worst_dist = 0.0
    worst_cov = 1.0
    for seg, group in zip(segments, assigned):
        sub = Trace(strokes=tuple(group))
        v = evaluate(seg, sub, cfg, canvas)
        if not v.passed:
            return v
        worst_zx = v.z_x if abs(v.z_x) > abs(worst_zx) else worst_zx
        worst_zy = v.z_y if abs(v.z_y) > abs(worst_zy) else worst_zy
        worst_dist = max(worst_dist, v.mean_dist)
        worst_cov = min(worst_cov, v.coverage)
    return Verdict(
        passed=True,
        reason=Reason.OK,
        z_x=worst_zx,
        z_y=worst_zy,
        mean_dist=worst_dist,
        coverage=worst_cov,
    )

"""Cubic Bezier challenge curves: generation, evaluation, sampling, segmentation.

All curve geometry lives in canvas pixel coordinates (x right, y down).
Point series are float64 arrays of shape (n, 2) so the statistical and
rendering layers can consume them without conversion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

# Sample sets feeding the statistical verifier need more than 30 elements.
MIN_SAMPLES = 31

# Defaults for the two challenge variants.
LONG_SAMPLES = 64
SEGMENT_SAMPLES = 40
SEGMENT_COUNT = 3
SEGMENT_GAP_FRACTION = 0.05

# Degeneracy rejection: the sampled curve must span at least this fraction
# of the canvas, and its length must stay within these multiples of the
# canvas width, so every emitted curve is drawable and non-trivial.
MIN_WIDTH_SPAN_FRACTION = 0.25
MIN_HEIGHT_SPAN_FRACTION = 0.15
LENGTH_BOUNDS = (0.5, 2.5)

_MAX_GENERATION_ATTEMPTS = 1000


class Point(NamedTuple):
    x: float
    y: float


class CanvasSpec(NamedTuple):
    """Challenge canvas dimensions in pixels (default mobile portrait)."""

    width: int = 480
    height: int = 800

    @property
    def diagonal(self) -> float:
        return math.hypot(self.width, self.height)


DEFAULT_CANVAS = CanvasSpec()


@dataclass(frozen=True)
class CubicBezier:
    """Four control points; the curve runs p0 -> p3, shaped by p1 and p2."""

    p0: Point
    p1: Point
    p2: Point
    p3: Point

    def __post_init__(self) -> None:
        for p in (self.p0, self.p1, self.p2, self.p3):
            if not (math.isfinite(p[0]) and math.isfinite(p[1])):
                raise ValueError("control points must be finite")
        if tuple(self.p0) == tuple(self.p3):
            raise ValueError("degenerate curve: p0 == p3")

    def as_array(self) -> np.ndarray:
        return np.array([self.p0, self.p1, self.p2, self.p3], dtype=np.float64)

    def reversed(self) -> "CubicBezier":
        return CubicBezier(self.p3, self.p2, self.p1, self.p0)


def eval_bezier(b: CubicBezier, t: float) -> Point:
    """Evaluate the cubic at parameter t in [0, 1], componentwise in x and y."""
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must be in [0, 1], got {t}")
    u = 1.0 - t
    w0 = u * u * u
    w1 = 3.0 * u * u * t
    w2 = 3.0 * u * t * t
    w3 = t * t * t
    x = w0 * b.p0[0] + w1 * b.p1[0] + w2 * b.p2[0] + w3 * b.p3[0]
    y = w0 * b.p0[1] + w1 * b.p1[1] + w2 * b.p2[1] + w3 * b.p3[1]
    return Point(x, y)


def _eval_many(b: CubicBezier, ts: np.ndarray) -> np.ndarray:
    u = 1.0 - ts
    w = np.stack([u**3, 3.0 * u**2 * ts, 3.0 * u * ts**2, ts**3], axis=1)
    return w @ b.as_array()


def sample_curve(b: CubicBezier, n_samples: int = LONG_SAMPLES) -> np.ndarray:
    """Sample the curve at uniform parameter spacing t = i/(n-1).

    The first point is exactly p0 and the last exactly p3.
    """
    if n_samples < MIN_SAMPLES:
        raise ValueError(
            f"n_samples must be >= {MIN_SAMPLES} for statistical use, got {n_samples}"
        )
    return _eval_many(b, np.linspace(0.0, 1.0, n_samples))


def segment_curve(
    b: CubicBezier,
    k: int = SEGMENT_COUNT,
    gap_fraction: float = SEGMENT_GAP_FRACTION,
    samples_per_segment: int = SEGMENT_SAMPLES,
) -> list[np.ndarray]:
    """Cut the curve into k disjoint sub-series over equal t-spans.

    Spans are separated by gaps of ``gap_fraction`` of the t-range, so for
    k=3, gap=0.05 the segments cover t in [0, 0.30], [0.35, 0.65], [0.70, 1.0].
    """
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if not 0.0 < gap_fraction < 1.0 / (2 * k):
        raise ValueError(f"gap_fraction must be in (0, {1.0 / (2 * k):g}), got {gap_fraction}")
    if samples_per_segment < MIN_SAMPLES:
        raise ValueError(f"samples_per_segment must be >= {MIN_SAMPLES}")
    span = (1.0 - (k - 1) * gap_fraction) / k
    segments = []
    for i in range(k):
        t0 = i * (span + gap_fraction)
        t1 = 1.0 if i == k - 1 else t0 + span
        segments.append(_eval_many(b, np.linspace(t0, t1, samples_per_segment)))
    return segments


def segment_spans(k: int = SEGMENT_COUNT, gap_fraction: float = SEGMENT_GAP_FRACTION) -> list[tuple[float, float]]:
    """The (t0, t1) parameter intervals segment_curve samples from."""
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if not 0.0 < gap_fraction < 1.0 / (2 * k):
        raise ValueError(f"gap_fraction must be in (0, {1.0 / (2 * k):g})")
    span = (1.0 - (k - 1) * gap_fraction) / k
    out = []
    for i in range(k):
        t0 = i * (span + gap_fraction)
        out.append((t0, 1.0 if i == k - 1 else t0 + span))
    return out


def polyline_length(series: np.ndarray) -> float:
    """Sum of Euclidean segment lengths along an ordered point series."""
    pts = np.asarray(series, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
        raise ValueError("series must be an (n, 2) array with n >= 2")
    return float(np.hypot(*np.diff(pts, axis=0).T).sum())


def accept_non_degenerate(b: CubicBezier, canvas: CanvasSpec, n_probe: int = LONG_SAMPLES) -> bool:
    """Degeneracy predicate: the sampled curve must span enough of the canvas
    and have a drawable total length."""
    pts = sample_curve(b, n_probe)
    spans = pts.max(axis=0) - pts.min(axis=0)
    if spans[0] < MIN_WIDTH_SPAN_FRACTION * canvas.width:
        return False
    if spans[1] < MIN_HEIGHT_SPAN_FRACTION * canvas.height:
        return False
    length = polyline_length(pts)
    lo, hi = LENGTH_BOUNDS
    return lo * canvas.width <= length <= hi * canvas.width


def gen_control_points(
    rng: np.random.Generator,
    canvas: CanvasSpec = DEFAULT_CANVAS,
    margin: float = 40.0,
) -> CubicBezier:
    """Draw four random control points inside the canvas margin, regenerating
    until the resulting curve passes the degeneracy predicate.

    Deterministic for a fixed generator state.
    """
    if margin < 0 or margin >= min(canvas.width, canvas.height) / 4:
        raise ValueError(
            f"margin must be in [0, {min(canvas.width, canvas.height) / 4:g}), got {margin}"
        )
    for _ in range(_MAX_GENERATION_ATTEMPTS):
        xs = rng.uniform(margin, canvas.width - margin, size=4)
        ys = rng.uniform(margin, canvas.height - margin, size=4)
        if xs[0] == xs[3] and ys[0] == ys[3]:
            continue
        b = CubicBezier(*(Point(float(x), float(y)) for x, y in zip(xs, ys)))
        if accept_non_degenerate(b, canvas):
            return b
    raise RuntimeError("control point generation failed to produce a usable curve")

"""Simulated solvers and attackers: honest tracing with jitter, no-effort
random strokes, the centroid cheat that probes the z-test's blind spot, and
binary morphology probes for the erosion/dilation robustness claim.

Human-survey results are not mechanically reproducible; the honest solver
with calibrated jitter stands in for them, and every report says so.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import ndimage

from . import raster
from .background import GlyphDatabase, build_synthetic_database
from .challenge import VARIANT_LONG, VARIANT_SHORT, AssembledChallenge, assemble_challenge
from .curve import CanvasSpec, DEFAULT_CANVAS, gen_control_points, sample_curve
from .raster import BLANK, INK
from .render import decode_challenge
from .verify import Trace, VerifyConfig, evaluate, evaluate_short

ATTACKER_HONEST = "honest"
ATTACKER_RANDOM_LINE = "random-line"
ATTACKER_RANDOM_CURVE = "random-curve"
ATTACKER_CENTROID_CHEAT = "centroid-cheat"
ATTACKER_KINDS = (
    ATTACKER_HONEST,
    ATTACKER_RANDOM_LINE,
    ATTACKER_RANDOM_CURVE,
    ATTACKER_CENTROID_CHEAT,
)

_RANDOM_LINE_POINTS = 40
_RANDOM_LINE_JITTER = 1.5
# The cheat emits the fewest points the verifier accepts and spreads them
# wide (canvas/2 per axis) to inflate the trace variance and fatten the z
# denominator; a tight blob would be rejected by the z test far more often
# than the statistic's blind spot suggests.
_CENTROID_BLOB_POINTS = 31
_CENTROID_SPREAD_DIVISOR = 2.0


@dataclass(frozen=True)
class AttackerSpec:
    kind: str
    jitter_sigma: float = 0.0
    trials: int = 1000

    def __post_init__(self) -> None:
        if self.kind not in ATTACKER_KINDS:
            raise ValueError(f"unknown attacker kind {self.kind!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.jitter_sigma < 0:
            raise ValueError("jitter_sigma must be non-negative")


@dataclass(frozen=True)
class BreakabilityReport:
    attacker: AttackerSpec
    variant: str
    confidence: float
    passes: int
    pass_rate: float
    wilson_interval: tuple[float, float]
    per_reason: dict[str, int]
    notes: tuple[str, ...] = field(default_factory=tuple)

    def to_json(self) -> str:
        return json.dumps(
            {
                "attacker": {
                    "kind": self.attacker.kind,
                    "jitter_sigma": self.attacker.jitter_sigma,
                    "trials": self.attacker.trials,
                },
                "variant": self.variant,
                "confidence": self.confidence,
                "passes": self.passes,
                "pass_rate": self.pass_rate,
                "wilson_95": list(self.wilson_interval),
                "per_reason": dict(sorted(self.per_reason.items())),
                "notes": list(self.notes),
            },
            sort_keys=True,
        )

    def format_table(self) -> str:
        lines = [
            f"attacker        : {self.attacker.kind} (jitter={self.attacker.jitter_sigma:g}px)",
            f"variant         : {self.variant} @ {self.confidence:.2%} confidence",
            f"trials          : {self.attacker.trials}",
            f"passes          : {self.passes}",
            f"pass rate       : {self.pass_rate:.4%}",
            f"wilson 95% CI   : [{self.wilson_interval[0]:.4%}, {self.wilson_interval[1]:.4%}]",
            "reasons         :",
        ]
        for reason, count in sorted(self.per_reason.items()):
            lines.append(f"  {reason:20s} {count}")
        for note in self.notes:
            lines.append(f"note: {note}")
        return "\n".join(lines)


def wilson_interval(successes: int, trials: int, z: float = 1.959964) -> tuple[float, float]:
    """95% Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    p = successes / trials
    denom = 1.0 + z**2 / trials
    center = (p + z**2 / (2 * trials)) / denom
    half = (z / denom) * math.sqrt(p * (1 - p) / trials + z**2 / (4 * trials**2))
    return (max(0.0, center - half), min(1.0, center + half))


def honest_solver(
    curves: Sequence[np.ndarray],
    rng: np.random.Generator,
    jitter_sigma: float = 0.0,
) -> Trace:
    """Trace the challenge the way a cooperative human would: the curve
    samples plus i.i.d. Gaussian jitter, drawn in a random direction."""
    if jitter_sigma < 0:
        raise ValueError("jitter_sigma must be non-negative")
    strokes = []
    for series in curves:
        pts = np.asarray(series, dtype=np.float64).copy()
        if jitter_sigma > 0:
            pts = pts + rng.normal(0.0, jitter_sigma, size=pts.shape)
        if rng.integers(2):
            pts = pts[::-1]
        t = np.arange(len(pts), dtype=np.float64) * 10.0
        strokes.append(np.column_stack([pts, t]))
    return Trace(strokes=tuple(strokes))


def _line_stroke(rng: np.random.Generator, canvas: CanvasSpec) -> np.ndarray:
    p = rng.uniform((0, 0), (canvas.width, canvas.height))
    q = rng.uniform((0, 0), (canvas.width, canvas.height))
    pts = np.linspace(p, q, _RANDOM_LINE_POINTS)
    pts = pts + rng.normal(0.0, _RANDOM_LINE_JITTER, size=pts.shape)
    pts[:, 0] = np.clip(pts[:, 0], 0, canvas.width - 1)
    pts[:, 1] = np.clip(pts[:, 1], 0, canvas.height - 1)
    t = np.arange(len(pts), dtype=np.float64) * 10.0
    return np.column_stack([pts, t])


def random_line_attacker(
    rng: np.random.Generator,
    canvas: CanvasSpec = DEFAULT_CANVAS,
    n_strokes: int = 1,
) -> Trace:
    """No-effort attack: straight jittered strokes between random points.

    Emits one stroke per expected segment so the short variant gets a fair
    (still effort-free) attempt."""
    return Trace(strokes=tuple(_line_stroke(rng, canvas) for _ in range(n_strokes)))


def random_curve_attacker(
    rng: np.random.Generator,
    canvas: CanvasSpec = DEFAULT_CANVAS,
    n_strokes: int = 1,
) -> Trace:
    """No-effort attack with curve-shaped guesses: random Bezier strokes."""
    strokes = []
    for _ in range(n_strokes):
        b = gen_control_points(rng, canvas, 40.0)
        pts = sample_curve(b, _RANDOM_LINE_POINTS)
        pts = pts + rng.normal(0.0, _RANDOM_LINE_JITTER, size=pts.shape)
        pts[:, 0] = np.clip(pts[:, 0], 0, canvas.width - 1)
        pts[:, 1] = np.clip(pts[:, 1], 0, canvas.height - 1)
        t = np.arange(len(pts), dtype=np.float64) * 10.0
        strokes.append(np.column_stack([pts, t]))
    return Trace(strokes=tuple(strokes))


def centroid_cheat_attacker(
    rng: np.random.Generator,
    canvas: CanvasSpec,
    challenge_image: bytes | np.ndarray,
) -> Trace:
    """Image-only attack on the z-test's blind spot: estimate the ink
    centroid and emit a wide blob of points centered there, inflating the
    trace variance so mean-comparison alone cannot tell it from a trace."""
    img = decode_challenge(challenge_image) if isinstance(challenge_image, bytes) else challenge_image
    ys, xs = np.nonzero(img == INK)
    if len(xs) == 0:
        center = np.array([canvas.width / 2.0, canvas.height / 2.0])
    else:
        center = np.array([xs.mean(), ys.mean()])
    spread = np.array([canvas.width, canvas.height]) / _CENTROID_SPREAD_DIVISOR
    pts = center + rng.normal(0.0, 1.0, size=(_CENTROID_BLOB_POINTS, 2)) * spread
    pts[:, 0] = np.clip(pts[:, 0], 0, canvas.width - 1)
    pts[:, 1] = np.clip(pts[:, 1], 0, canvas.height - 1)
    t = np.arange(len(pts), dtype=np.float64) * 5.0
    return Trace(strokes=(np.column_stack([pts, t]),))


def erode(bitmap: np.ndarray, kernel_radius: int) -> np.ndarray:
    """Binary erosion of the ink with a square structuring element."""
    raster.require_monochrome(bitmap)
    if kernel_radius < 1:
        raise ValueError("kernel_radius must be >= 1")
    size = 2 * kernel_radius + 1
    return ndimage.maximum_filter(bitmap, size=size, mode="nearest")


def dilate(bitmap: np.ndarray, kernel_radius: int) -> np.ndarray:
    """Binary dilation of the ink with a square structuring element."""
    raster.require_monochrome(bitmap)
    if kernel_radius < 1:
        raise ValueError("kernel_radius must be >= 1")
    size = 2 * kernel_radius + 1
    return ndimage.minimum_filter(bitmap, size=size, mode="nearest")


def complement(bitmap: np.ndarray) -> np.ndarray:
    raster.require_monochrome(bitmap)
    return (BLANK - bitmap).astype(np.uint8)


def _attack_trace(
    spec: AttackerSpec,
    challenge: AssembledChallenge,
    rng: np.random.Generator,
    cfg: VerifyConfig,
) -> Trace:
    n_strokes = len(challenge.curves)
    if spec.kind == ATTACKER_HONEST:
        return honest_solver(challenge.curves, rng, spec.jitter_sigma)
    if spec.kind == ATTACKER_RANDOM_LINE:
        return random_line_attacker(rng, challenge.canvas, n_strokes)
    if spec.kind == ATTACKER_RANDOM_CURVE:
        return random_curve_attacker(rng, challenge.canvas, n_strokes)
    if spec.kind == ATTACKER_CENTROID_CHEAT:
        return centroid_cheat_attacker(rng, challenge.canvas, challenge.image.raster)
    raise ValueError(f"unknown attacker kind {spec.kind!r}")


def measure_breakability(
    attacker: AttackerSpec,
    variant: str = VARIANT_LONG,
    cfg: Optional[VerifyConfig] = None,
    seed: int = 0,
    db: Optional[GlyphDatabase] = None,
    canvas: CanvasSpec = DEFAULT_CANVAS,
    min_trials: int = 100,
) -> BreakabilityReport:
    """Run attacker trials against fresh challenges and aggregate pass rates.

    Per-trial generators derive from (seed, trial index), so the report is
    identical no matter how trials would be scheduled.
    """
    if attacker.trials < min_trials:
        raise ValueError(f"trials must be >= {min_trials}")
    cfg = cfg or VerifyConfig()
    if db is None:
        db = build_synthetic_database(np.random.default_rng([seed, 0]))

    needs_image = attacker.kind == ATTACKER_CENTROID_CHEAT
    passes = 0
    reasons: Counter[str] = Counter()
    for trial in range(attacker.trials):
        rng = np.random.default_rng([seed, 1, trial])
        challenge = assemble_challenge(rng, db, variant, canvas, render=needs_image)
        trace = _attack_trace(attacker, challenge, rng, cfg)
        if challenge.is_short:
            verdict = evaluate_short(challenge.curves, trace, cfg, canvas)
        else:
            verdict = evaluate(challenge.curves[0], trace, cfg, canvas)
        passes += verdict.passed
        reasons[verdict.reason.value] += 1

    rate = passes / attacker.trials
    notes = (
        "honest-solver jitter stands in for human survey results; "
        "human preference and solve-time figures are not mechanically reproducible",
        f"no-effort attacker model: {ATTACKER_RANDOM_LINE} (assumed baseline for breakability)",
    )
    return BreakabilityReport(
        attacker=attacker,
        variant=variant,
        confidence=cfg.confidence,
        passes=passes,
        pass_rate=rate,
        wilson_interval=wilson_interval(passes, attacker.trials),
        per_reason=dict(reasons),
        notes=notes,
    )

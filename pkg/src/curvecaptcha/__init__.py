"""Curve-tracing CAPTCHA toolkit.

Generates cubic Bezier challenge curves over noisy monochrome backgrounds,
verifies human-drawn traces with geometric pre-checks and two-sample z tests,
measures attacker pass rates, and serves the challenge/verify protocol.
"""

__version__ = "0.1.0"

from .curve import (
    CanvasSpec,
    CubicBezier,
    DEFAULT_CANVAS,
    Point,
    eval_bezier,
    gen_control_points,
    polyline_length,
    sample_curve,
    segment_curve,
)
from .stats import (
    DegenerateSampleError,
    NormalityResult,
    SampleStats,
    ZTestResult,
    critical_z,
    shapiro_wilk,
    summarize,
    two_sample_z,
)
from .verify import Trace, TracePoint, Verdict, VerifyConfig, Reason, evaluate, evaluate_short

__all__ = [
    "CanvasSpec",
    "CubicBezier",
    "DEFAULT_CANVAS",
    "Point",
    "eval_bezier",
    "gen_control_points",
    "polyline_length",
    "sample_curve",
    "segment_curve",
    "DegenerateSampleError",
    "NormalityResult",
    "SampleStats",
    "ZTestResult",
    "critical_z",
    "shapiro_wilk",
    "summarize",
    "two_sample_z",
    "Trace",
    "TracePoint",
    "Verdict",
    "VerifyConfig",
    "Reason",
    "evaluate",
    "evaluate_short",
]

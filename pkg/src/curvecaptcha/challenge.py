"""Challenge assembly: tie background, curve, guard, and rendering together.

One assembled challenge owns everything the server needs to verify a trace
and everything the client is allowed to see (the encoded image). Rasterizing
is optional so large simulation runs can stay in geometry space.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .background import (
    DEFAULT_SLOTS,
    GlyphDatabase,
    compose_grid,
    layout_for_canvas,
    select_tiles,
)
from .curve import (
    CanvasSpec,
    CubicBezier,
    DEFAULT_CANVAS,
    LONG_SAMPLES,
    SEGMENT_SAMPLES,
    gen_control_points,
    sample_curve,
    segment_curve,
)
from .render import ChallengeImage, extreme_line_guard, make_challenge_image

VARIANT_LONG = "long"
VARIANT_SHORT = "short"
VARIANTS = (VARIANT_LONG, VARIANT_SHORT)

_MAX_GUARD_ATTEMPTS = 500


@dataclass(frozen=True)
class AssembledChallenge:
    variant: str
    canvas: CanvasSpec
    bezier: CubicBezier
    curves: tuple[np.ndarray, ...]  # one series (long) or k segments (short)
    background: Optional[np.ndarray]
    glyph_stroke_lengths: tuple[float, ...]
    stroke_width: int
    image: Optional[ChallengeImage]

    @property
    def is_short(self) -> bool:
        return self.variant == VARIANT_SHORT


def assemble_challenge(
    rng: np.random.Generator,
    db: GlyphDatabase,
    variant: str = VARIANT_LONG,
    canvas: CanvasSpec = DEFAULT_CANVAS,
    margin: float = 40.0,
    long_samples: int = LONG_SAMPLES,
    segment_samples: int = SEGMENT_SAMPLES,
    render: bool = True,
) -> AssembledChallenge:
    """Select tiles, generate a curve until the extreme-line rule holds, and
    (optionally) render and encode the challenge image.

    The background is chosen once; only the curve regenerates on guard
    failure, so backgrounds stay uniformly distributed.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    layout = layout_for_canvas(canvas, DEFAULT_SLOTS)
    if (layout.tile_width, layout.tile_height) != (db.tile_width, db.tile_height):
        raise ValueError(
            f"database tiles {db.tile_width}x{db.tile_height} do not fit canvas "
            f"{canvas.width}x{canvas.height} ({layout.cols}x{layout.rows} grid)"
        )
    tiles = select_tiles(rng, db, layout.slots)
    glyph_lengths = tuple(l for t in tiles for l in t.stroke_lengths)

    for _ in range(_MAX_GUARD_ATTEMPTS):
        bezier = gen_control_points(rng, canvas, margin)
        if variant == VARIANT_LONG:
            curves = (sample_curve(bezier, long_samples),)
        else:
            curves = tuple(segment_curve(bezier, samples_per_segment=segment_samples))
        if extreme_line_guard(curves, glyph_lengths):
            break
    else:
        raise RuntimeError("guard kept rejecting curves; database stroke lengths look wrong")

    background = image = None
    if render:
        background = compose_grid(tiles, layout)
        image = make_challenge_image(background, curves, db.stroke_width)
    return AssembledChallenge(
        variant=variant,
        canvas=canvas,
        bezier=bezier,
        curves=curves,
        background=background,
        glyph_stroke_lengths=glyph_lengths,
        stroke_width=db.stroke_width,
        image=image,
    )

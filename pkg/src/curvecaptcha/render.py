"""Challenge image assembly: curve overlay, lossless PNG encoding, and the
extreme-line rule that keeps the curve from being the longest or shortest
stroke in the image."""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from PIL import Image

from . import raster
from .curve import polyline_length
from .raster import INK

# Engineering budget for one encoded default challenge; a CI gate, not a
# guarantee of the protocol.
ENCODED_SIZE_BUDGET = 50 * 1024


@dataclass(frozen=True)
class ChallengeImage:
    raster: np.ndarray
    encoded_bytes: bytes
    curve_stroke_width: int


def render_challenge(
    background: np.ndarray,
    curves: Sequence[np.ndarray],
    stroke_width: int,
) -> np.ndarray:
    """Overlay each curve series as an ink polyline on a copy of the background.

    The output stays strictly two-valued. Curves must lie inside the canvas.
    """
    raster.require_monochrome(background)
    h, w = background.shape
    out = background.copy()
    for series in curves:
        pts = np.asarray(series, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
            raise ValueError("each curve must be an (n, 2) array with n >= 2")
        if (pts[:, 0] < 0).any() or (pts[:, 0] >= w).any() or (pts[:, 1] < 0).any() or (pts[:, 1] >= h).any():
            raise ValueError("curve extends outside the canvas")
        raster.draw_polyline(out, pts, stroke_width)
    return out


def encode_challenge(img: np.ndarray) -> bytes:
    """Losslessly encode a monochrome raster as a 1-bit PNG."""
    raster.require_monochrome(img)
    pil = Image.fromarray(img, mode="L").convert("1", dither=Image.Dither.NONE)
    buf = io.BytesIO()
    pil.save(buf, format="PNG")
    return buf.getvalue()


def decode_challenge(data: bytes) -> np.ndarray:
    arr = np.asarray(Image.open(io.BytesIO(data)).convert("L"), dtype=np.uint8)
    return raster.require_monochrome(arr)


def make_challenge_image(
    background: np.ndarray,
    curves: Sequence[np.ndarray],
    stroke_width: int,
) -> ChallengeImage:
    img = render_challenge(background, curves, stroke_width)
    return ChallengeImage(raster=img, encoded_bytes=encode_challenge(img), curve_stroke_width=stroke_width)


def extreme_line_guard(
    curves: Sequence[np.ndarray],
    glyph_stroke_lengths: Sequence[float],
) -> bool:
    """True iff every curve's length lies strictly between the shortest and
    longest background stroke. Challenge assembly regenerates the curve until
    this holds."""
    if not curves or not glyph_stroke_lengths:
        raise ValueError("curves and glyph stroke lengths must be non-empty")
    lo = min(glyph_stroke_lengths)
    hi = max(glyph_stroke_lengths)
    return all(lo < polyline_length(c) < hi for c in curves)


def ink_count(img: np.ndarray) -> int:
    return int(np.count_nonzero(img == INK))

"""Noisy monochrome backgrounds: grids of character-fragment tiles.

Tiles are procedurally generated stroke fragments (arcs and bars drawn at the
same stroke width as the challenge curve), so background and curve share
visual characteristics. A directory loader accepts user-supplied monochrome
tile images as an alternative to the synthetic generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from . import raster
from .curve import CanvasSpec, CubicBezier, Point, polyline_length
from .raster import BLANK, INK

DEFAULT_SLOTS = 8
DEFAULT_DB_SIZE = 12
DEFAULT_TILE_WIDTH = 240
DEFAULT_TILE_HEIGHT = 200
DEFAULT_STROKE_WIDTH = 4

INK_FRACTION_BOUNDS = (0.02, 0.25)

# Fragment length ranges, relative to tile geometry. Every tile carries one
# long winding fragment (relative to the tile diagonal) so that assembled
# backgrounds always contain strokes longer than a typical challenge curve,
# plus short fragments (relative to the smaller tile side) providing strokes
# shorter than any curve segment. Both are needed for the extreme-line rule.
_LONG_FRACTION = (1.6, 2.2)
_SHORT_FRACTION = (0.15, 0.6)

_MAX_TILE_ATTEMPTS = 200


@dataclass(frozen=True)
class GlyphTile:
    """One monochrome background tile plus the generator's stroke records."""

    bitmap: np.ndarray
    stroke_width: int
    tile_id: str
    stroke_lengths: tuple[float, ...]

    def __post_init__(self) -> None:
        raster.require_monochrome(self.bitmap)
        lo, hi = INK_FRACTION_BOUNDS
        frac = raster.ink_fraction(self.bitmap)
        if not lo <= frac <= hi:
            raise ValueError(f"tile ink fraction {frac:.4f} outside [{lo}, {hi}]")

    @property
    def height(self) -> int:
        return self.bitmap.shape[0]

    @property
    def width(self) -> int:
        return self.bitmap.shape[1]


@dataclass(frozen=True)
class GridLayout:
    rows: int
    cols: int
    tile_width: int
    tile_height: int

    def __post_init__(self) -> None:
        if self.rows < 1 or self.cols < 1:
            raise ValueError("rows and cols must be positive")

    @property
    def slots(self) -> int:
        return self.rows * self.cols


@dataclass(frozen=True)
class GlyphDatabase:
    tiles: tuple[GlyphTile, ...]

    def __post_init__(self) -> None:
        if not self.tiles:
            raise ValueError("database must contain at least one tile")
        first = self.tiles[0]
        for t in self.tiles:
            if (t.width, t.height) != (first.width, first.height):
                raise ValueError("all tiles must share dimensions")
            if t.stroke_width != first.stroke_width:
                raise ValueError("all tiles must share stroke width")

    def __len__(self) -> int:
        return len(self.tiles)

    @property
    def tile_width(self) -> int:
        return self.tiles[0].width

    @property
    def tile_height(self) -> int:
        return self.tiles[0].height

    @property
    def stroke_width(self) -> int:
        return self.tiles[0].stroke_width


def _winding_fragment(rng: np.random.Generator, width: int, height: int, margin: float, length_range: tuple[float, float]) -> np.ndarray:
    """One long wiggly fragment: chained cubic arcs trimmed to a target arc
    length drawn from length_range. Control points stay inside the margin box,
    so the whole path does (convex-hull property)."""
    lo, hi = length_range
    target = rng.uniform(lo, hi)
    for _ in range(_MAX_TILE_ATTEMPTS):
        pieces = []
        start = np.array([rng.uniform(margin, width - margin), rng.uniform(margin, height - margin)])
        for _ in range(3):
            ctrl = np.column_stack(
                [rng.uniform(margin, width - margin, size=3), rng.uniform(margin, height - margin, size=3)]
            )
            b = CubicBezier(
                Point(*start),
                Point(*ctrl[0]),
                Point(*ctrl[1]),
                Point(*ctrl[2]),
            )
            pts = _sample_fragment(b)
            pieces.append(pts if not pieces else pts[1:])
            start = ctrl[2]
        path = np.concatenate(pieces)
        seg_lens = np.hypot(*np.diff(path, axis=0).T)
        cum = np.concatenate([[0.0], np.cumsum(seg_lens)])
        if cum[-1] < target:
            continue
        cut = int(np.searchsorted(cum, target)) + 1
        if cut < 2:
            continue
        return path[:cut]
    raise RuntimeError("could not build a winding fragment of the requested length")


def _short_fragment(rng: np.random.Generator, width: int, height: int, margin: float, length_range: tuple[float, float]) -> np.ndarray:
    """One short bar/arc fragment on a random chord with mild perpendicular bows."""
    length = rng.uniform(*length_range)
    for _ in range(_MAX_TILE_ATTEMPTS):
        x0 = rng.uniform(margin, width - margin)
        y0 = rng.uniform(margin, height - margin)
        theta = rng.uniform(0.0, 2.0 * math.pi)
        x1 = x0 + length * math.cos(theta)
        y1 = y0 + length * math.sin(theta)
        if not (margin <= x1 <= width - margin and margin <= y1 <= height - margin):
            continue
        bow = rng.uniform(-length / 4.0, length / 4.0, size=2)
        nx, ny = -math.sin(theta), math.cos(theta)
        p1 = Point(x0 + (x1 - x0) / 3.0 + bow[0] * nx, y0 + (y1 - y0) / 3.0 + bow[0] * ny)
        p2 = Point(x0 + 2.0 * (x1 - x0) / 3.0 + bow[1] * nx, y0 + 2.0 * (y1 - y0) / 3.0 + bow[1] * ny)
        return _sample_fragment(CubicBezier(Point(x0, y0), p1, p2, Point(x1, y1)))
    raise RuntimeError("could not place a stroke fragment inside the tile")


def _sample_fragment(b: CubicBezier, n: int = 48) -> np.ndarray:
    ts = np.linspace(0.0, 1.0, n)
    u = 1.0 - ts
    w = np.stack([u**3, 3.0 * u**2 * ts, 3.0 * u * ts**2, ts**3], axis=1)
    return w @ b.as_array()


def gen_glyph_tile(
    rng: np.random.Generator,
    width: int = DEFAULT_TILE_WIDTH,
    height: int = DEFAULT_TILE_HEIGHT,
    stroke_width: int = DEFAULT_STROKE_WIDTH,
    tile_id: str = "",
) -> GlyphTile:
    """Generate one monochrome tile of 2-4 character-like stroke fragments."""
    if width < 32 or height < 32:
        raise ValueError("tile dimensions must be at least 32x32")
    if stroke_width < 1:
        raise ValueError("stroke_width must be >= 1")

    margin = stroke_width / 2.0 + 2.0
    diag = math.hypot(width, height)
    short_side = min(width, height)
    long_range = (_LONG_FRACTION[0] * diag, _LONG_FRACTION[1] * diag)
    short_range = (_SHORT_FRACTION[0] * short_side, _SHORT_FRACTION[1] * short_side)
    lo, hi = INK_FRACTION_BOUNDS

    for _ in range(_MAX_TILE_ATTEMPTS):
        bitmap = raster.new_blank(width, height)
        lengths: list[float] = []
        n_short = int(rng.integers(1, 4))
        fragments = [_winding_fragment(rng, width, height, margin, long_range)]
        for _ in range(n_short):
            fragments.append(_short_fragment(rng, width, height, margin, short_range))
        for pts in fragments:
            raster.draw_polyline(bitmap, pts, stroke_width)
            lengths.append(polyline_length(pts))
        if lo <= raster.ink_fraction(bitmap) <= hi:
            return GlyphTile(
                bitmap=bitmap,
                stroke_width=stroke_width,
                tile_id=tile_id or f"synthetic-{rng.integers(0, 2**31):08x}",
                stroke_lengths=tuple(lengths),
            )
    raise RuntimeError("tile generation failed to satisfy the ink-fraction bounds")


def build_synthetic_database(
    rng: np.random.Generator,
    size: int = DEFAULT_DB_SIZE,
    tile_width: int = DEFAULT_TILE_WIDTH,
    tile_height: int = DEFAULT_TILE_HEIGHT,
    stroke_width: int = DEFAULT_STROKE_WIDTH,
) -> GlyphDatabase:
    tiles = tuple(
        gen_glyph_tile(rng, tile_width, tile_height, stroke_width, tile_id=f"synthetic-{i:03d}")
        for i in range(size)
    )
    return GlyphDatabase(tiles=tiles)


def select_tiles(rng: np.random.Generator, db: GlyphDatabase, slots: int = DEFAULT_SLOTS) -> list[GlyphTile]:
    """Ordered selection without replacement, uniform over ordered arrangements."""
    if slots < 1:
        raise ValueError("slots must be positive")
    if slots > len(db):
        raise ValueError(f"cannot select {slots} tiles from a database of {len(db)}")
    idx = rng.choice(len(db), size=slots, replace=False)
    return [db.tiles[int(i)] for i in idx]


def compose_grid(tiles: list[GlyphTile], layout: GridLayout) -> np.ndarray:
    """Paste tiles into a single raster, row-major, with zero padding."""
    if len(tiles) != layout.slots:
        raise ValueError(f"need exactly {layout.slots} tiles, got {len(tiles)}")
    for t in tiles:
        if (t.width, t.height) != (layout.tile_width, layout.tile_height):
            raise ValueError("tile dimensions do not match the layout")
    out = np.empty((layout.rows * layout.tile_height, layout.cols * layout.tile_width), dtype=np.uint8)
    for i, t in enumerate(tiles):
        r, c = divmod(i, layout.cols)
        y0, x0 = r * layout.tile_height, c * layout.tile_width
        out[y0 : y0 + layout.tile_height, x0 : x0 + layout.tile_width] = t.bitmap
    return out


def layout_count(db_size: int, slots: int) -> int:
    """Number of ordered tile selections without replacement: n!/(n-k)!."""
    if slots < 0 or db_size < 0:
        raise ValueError("arguments must be non-negative")
    if slots > db_size:
        raise ValueError(f"cannot fill {slots} slots from {db_size} tiles")
    return math.perm(db_size, slots)


def layout_for_canvas(canvas: CanvasSpec, slots: int = DEFAULT_SLOTS) -> GridLayout:
    """Grid layout that exactly tiles the canvas with the given slot count.

    Portrait canvases split into 4 rows x 2 cols, landscape into 2 x 4;
    canvas dimensions must divide evenly.
    """
    if slots == 8:
        rows, cols = (4, 2) if canvas.height >= canvas.width else (2, 4)
    else:
        raise ValueError("only 8-slot layouts are auto-derived; build GridLayout directly")
    if canvas.width % cols or canvas.height % rows:
        raise ValueError(f"canvas {canvas.width}x{canvas.height} does not divide into a {rows}x{cols} grid")
    return GridLayout(rows=rows, cols=cols, tile_width=canvas.width // cols, tile_height=canvas.height // rows)


def load_tile_directory(path: str | Path, stroke_width: int = DEFAULT_STROKE_WIDTH) -> GlyphDatabase:
    """Load a database from a directory of monochrome raster images, one tile
    per file. Rejects non-monochrome or mixed-size inputs.

    Loaded tiles carry a single estimated stroke length (ink area divided by
    stroke width) since the original stroke records are unavailable.
    """
    path = Path(path)
    files = sorted(p for p in path.iterdir() if p.suffix.lower() in {".png", ".pgm", ".pbm", ".bmp"})
    if not files:
        raise ValueError(f"no tile images found in {path}")
    tiles = []
    for f in files:
        arr = np.asarray(Image.open(f).convert("L"), dtype=np.uint8)
        if not np.isin(arr, (INK, BLANK)).all():
            raise ValueError(f"{f.name}: tile is not monochrome (values other than 0/255)")
        est_length = float(np.count_nonzero(arr == INK)) / stroke_width
        tiles.append(
            GlyphTile(
                bitmap=arr,
                stroke_width=stroke_width,
                tile_id=f.stem,
                stroke_lengths=(est_length,),
            )
        )
    return GlyphDatabase(tiles=tuple(tiles))

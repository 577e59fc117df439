"""Strictly binary raster primitives shared by the background and render layers.

Rasters are uint8 arrays of shape (height, width) holding only INK (0) or
BLANK (255). Ink is laid down by distance thresholding against polyline
segments, with no anti-aliasing, so stroke width is exact and pixel-level
tests stay deterministic.
"""

from __future__ import annotations

import numpy as np

INK = 0
BLANK = 255


def new_blank(width: int, height: int) -> np.ndarray:
    return np.full((height, width), BLANK, dtype=np.uint8)


def is_monochrome(raster: np.ndarray) -> bool:
    if raster.ndim != 2 or raster.dtype != np.uint8:
        return False
    return bool(np.isin(raster, (INK, BLANK)).all())


def require_monochrome(raster: np.ndarray) -> np.ndarray:
    if not is_monochrome(raster):
        raise ValueError("raster must be a 2-D uint8 array with values in {0, 255}")
    return raster


def ink_fraction(raster: np.ndarray) -> float:
    return float(np.count_nonzero(raster == INK)) / raster.size


def draw_polyline(raster: np.ndarray, points: np.ndarray, stroke_width: float) -> None:
    """Stamp a connected polyline of the given stroke width into the raster.

    A pixel becomes ink when its center lies within stroke_width/2 of any
    segment of the polyline. Drawing is clipped at the raster bounds.
    """
    if stroke_width < 1:
        raise ValueError("stroke_width must be >= 1")
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
        raise ValueError("points must be an (n, 2) array with n >= 2")
    h, w = raster.shape
    radius = stroke_width / 2.0
    pad = radius + 1.0
    for (x0, y0), (x1, y1) in zip(pts[:-1], pts[1:]):
        xmin = max(int(np.floor(min(x0, x1) - pad)), 0)
        xmax = min(int(np.ceil(max(x0, x1) + pad)), w - 1)
        ymin = max(int(np.floor(min(y0, y1) - pad)), 0)
        ymax = min(int(np.ceil(max(y0, y1) + pad)), h - 1)
        if xmin > xmax or ymin > ymax:
            continue
        xs = np.arange(xmin, xmax + 1, dtype=np.float64)
        ys = np.arange(ymin, ymax + 1, dtype=np.float64)
        gx, gy = np.meshgrid(xs, ys)
        dx, dy = x1 - x0, y1 - y0
        seg_sq = dx * dx + dy * dy
        if seg_sq == 0.0:
            d2 = (gx - x0) ** 2 + (gy - y0) ** 2
        else:
            t = ((gx - x0) * dx + (gy - y0) * dy) / seg_sq
            t = np.clip(t, 0.0, 1.0)
            d2 = (gx - (x0 + t * dx)) ** 2 + (gy - (y0 + t * dy)) ** 2
        mask = d2 <= radius * radius
        block = raster[ymin : ymax + 1, xmin : xmax + 1]
        block[mask] = INK


def distance_to_polyline(points_xy: np.ndarray, polyline: np.ndarray) -> np.ndarray:
    """Euclidean distance from each query point to the nearest polyline segment."""
    q = np.asarray(points_xy, dtype=np.float64)
    p = np.asarray(polyline, dtype=np.float64)
    a = p[:-1]
    d = p[1:] - a
    seg_sq = np.einsum("ij,ij->i", d, d)
    seg_sq = np.where(seg_sq == 0.0, 1.0, seg_sq)
    # (nq, nseg) projection parameter, clamped to the segment.
    t = np.clip(
        ((q[:, None, :] - a[None, :, :]) * d[None, :, :]).sum(axis=2) / seg_sq[None, :],
        0.0,
        1.0,
    )
    closest = a[None, :, :] + t[:, :, None] * d[None, :, :]
    dist = np.linalg.norm(q[:, None, :] - closest, axis=2)
    return dist.min(axis=1)

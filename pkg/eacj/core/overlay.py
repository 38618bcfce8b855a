"""
Overlay rasters: junctions of a time window drawn over the event activity,
written as plain-text portable graymaps (PGM, "P2").
"""

import math

import numpy as np

from .errors import ParameterError
from .events import SENSOR_WIDTH, SENSOR_HEIGHT
from ..VERSION import AGENT


WHITE = 255
EVENT_GRAY = 160
INK = 0



def junctions_in_window(junctions, window, t_end=None):
    """Junctions with t in (t_end - window, t_end]; t_end defaults to the latest junction."""
    if not window > 0:
        raise ParameterError(f"Overlay window must be positive, got {window}")
    junctions = list(junctions)
    if not junctions:
        return []
    if t_end is None:
        t_end = max(j.t for j in junctions)
    return [j for j in junctions if t_end - window < j.t <= t_end]


def _plot(img, x, y, value):
    h, w = img.shape
    if 0 <= x < w and 0 <= y < h:
        img[y, x] = value


def draw_junction(img, j):
    """Mark the center with a small cross and draw every branch as a ray of length r along theta."""
    for dx, dy in ((0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)):
        _plot(img, j.x + dx, j.y + dy, INK)
    for b in j.branches:
        cos, sin = math.cos(b.theta), -math.sin(b.theta)
        steps = max(1, int(math.ceil(2 * b.r)))
        for k in range(steps + 1):
            s = b.r * k / steps
            _plot(img, int(round(j.x + s * cos)), int(round(j.y + s * sin)), INK)
    return img


def render_overlay(junctions, window=0.05, width=SENSOR_WIDTH, height=SENSOR_HEIGHT,
                   t_end=None, background=None):
    """Grayscale raster (height, width) of the junctions within the window.

    `background` is an optional boolean (height, width) mask of pixels that
    fired in the same window (see `GSAE.window_mask`); they are drawn mid-gray.
    """
    img = np.full((height, width), WHITE, dtype=np.uint8)
    if background is not None:
        img[np.asarray(background, dtype=bool)] = EVENT_GRAY
    for j in junctions_in_window(junctions, window, t_end):
        draw_junction(img, j)
    return img


def write_pgm(img, fpath, comment=None):
    """Write a uint8 raster as an ASCII PGM file."""
    h, w = img.shape
    with open(fpath, "w", encoding="ascii") as f:
        f.write("P2\n")
        if comment:
            f.write("# %s\n" % comment)
        f.write("%d %d\n%d\n" % (w, h, WHITE))
        for row in img:
            f.write(" ".join(str(int(v)) for v in row) + "\n")
    return fpath


def read_pgm(fpath):
    """Read an ASCII PGM file back into a uint8 array."""
    tokens = []
    with open(fpath, "r", encoding="ascii") as f:
        for line in f:
            line = line.split("#", 1)[0]
            tokens.extend(line.split())
    if not tokens or tokens[0] != "P2":
        raise ParameterError(f"`{fpath}` is not a plain PGM file")
    w, h = int(tokens[1]), int(tokens[2])
    values = np.array([int(v) for v in tokens[4:4 + w * h]], dtype=np.uint8)
    return values.reshape(h, w)


def write_overlay(junctions, window, width, height, fpath, t_end=None, background=None):
    """Render and save the overlay; returns the raster."""
    img = render_overlay(junctions, window, width, height, t_end, background)
    write_pgm(img, fpath, comment="%s overlay, window %gs" % (AGENT, window))
    return img

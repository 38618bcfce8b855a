"""
Binary patches and their Sobel gradient fields.

Angle convention shared with `eacj.core.sectors`: x grows rightwards, y grows
downwards in the patch arrays, and angles are measured counterclockwise from
the +x axis in the frame (x, -y), i.e. "up" on screen is pi/2.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .events import SENTINEL


@dataclass(eq=False)
class BinaryPatch:
    """Binarized patch: 1 for the newest cells, ``bits[dy + r, dx + r]``."""
    radius: int
    bits: np.ndarray

    @property
    def side(self):
        return 2 * self.radius + 1

    @property
    def ones(self):
        return int(self.bits.sum())


@dataclass(eq=False)
class GradientField:
    """Sobel response of a BinaryPatch.

    `norm` is True where the response is nonzero (never on the border ring);
    `phi` is the normal angle in [0, 2pi), meaningful only where `norm` is True.
    `gx`, `gy` are the raw integer responses, gy pointing up.
    """
    radius: int
    norm: np.ndarray
    phi: np.ndarray
    gx: np.ndarray
    gy: np.ndarray


def binary_count(r, factor=1.0):
    """Number of cells set to 1 at scale r: ceil(factor * (r + 1)^2)."""
    return int(math.ceil(factor * (r + 1) ** 2))


def binarize(patch, factor=1.0):
    """Set the newest ceil((r+1)^2) cells of a TimestampPatch to 1.

    Sentinel cells are never set. Ties at the cutoff timestamp are broken by
    row-major position, earlier cells first.
    """
    flat = patch.values.ravel()
    live = int(np.count_nonzero(flat > SENTINEL))
    take = min(binary_count(patch.radius, factor), live)
    bits = np.zeros(flat.size, dtype=np.uint8)
    if take:
        order = np.argsort(-flat, kind="stable")
        bits[order[:take]] = 1
    return BinaryPatch(radius=patch.radius, bits=bits.reshape(patch.values.shape))


def sobel(bits):
    """3x3 Sobel on the interior of a {0,1} grid; returns (gx, gy) with gy pointing up.

    The border ring of the outputs is 0.
    """
    I = np.asarray(bits, dtype=np.int32)
    if min(I.shape) < 3:
        return np.zeros(I.shape, dtype=np.int32), np.zeros(I.shape, dtype=np.int32)
    gx = ndimage.sobel(I, axis=1, mode="constant")
    gy = -ndimage.sobel(I, axis=0, mode="constant")
    for g in (gx, gy):
        g[0, :] = 0
        g[-1, :] = 0
        g[:, 0] = 0
        g[:, -1] = 0
    return gx, gy


def gradient_field(b):
    """Gradient presence and normal angle phi = (atan2(gy, gx) + pi/2) mod 2pi."""
    gx, gy = sobel(b.bits)
    norm = (gx != 0) | (gy != 0)
    phi = np.mod(np.arctan2(gy, gx) + 0.5 * np.pi, 2.0 * np.pi)
    phi[~norm] = 0.0
    return GradientField(radius=b.radius, norm=norm, phi=phi, gx=gx, gy=gy)


def gradient_fraction(g):
    """Fraction of interior pixels with a nonzero gradient."""
    interior = g.norm[1:-1, 1:-1]
    if interior.size == 0:
        return 0.0
    return float(interior.mean())

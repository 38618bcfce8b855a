"""
Sector geometry and branch strength.

A sector S(r, theta) around the patch center holds the offsets q != 0 with
|q| <= r whose direction lies within Delta(r) = tau / r of theta. Each member
contributes gamma(q) in [0, 1], the alignment between its gradient normal angle
and its own direction; the branch strength omega is the sum over the sector.

Angles follow the convention of `eacj.core.patches`: measured from +x,
counterclockwise in the (x, -y) frame.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import GeometryError, ParameterError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SectorSpec:
    r: int
    theta: float
    tau: float = 1.0

    @property
    def half_width(self):
        """Delta(r) = tau / r"""
        return self.tau / self.r

    def validate(self):
        if self.r < 1:
            raise ParameterError(f"Sector radius must be positive, got {self.r}")
        if not 0.0 < self.half_width < math.pi:
            raise ParameterError(f"Sector half width tau/r = {self.half_width} outside (0, pi)")
        return self


def offset_angle(dx, dy):
    """Direction of the offset (dx, dy) in [0, 2pi), with y pointing down."""
    return math.atan2(-dy, dx) % TWO_PI


def angular_distance(a, b):
    """Distance between two angles on the circle, in [0, pi]."""
    d = abs(a - b) % TWO_PI
    return min(d, TWO_PI - d)


def bin_angle(k, bins):
    return TWO_PI * k / bins


@lru_cache(maxsize=4096)
def _members(r, theta, tau):
    delta = tau / r
    out = []
    for dy in range(-r, r + 1):
        for dx in range(-r, r + 1):
            if (dx, dy) == (0, 0) or dx * dx + dy * dy > r * r:
                continue
            if angular_distance(offset_angle(dx, dy), theta) <= delta:
                out.append((dx, dy))
    return tuple(out)


def sector_members(spec, patch_radius):
    """Offsets (dx, dy) of the sector, row-major. Cached per (r, theta, tau)."""
    spec.validate()
    if spec.r > patch_radius:
        raise GeometryError(f"Sector radius {spec.r} exceeds the patch radius {patch_radius}")
    return list(_members(int(spec.r), float(spec.theta), float(spec.tau)))


def alignment(phi, alpha):
    """max(|cos(phi - alpha)| - |sin(phi - alpha)|, 0), elementwise."""
    d = np.asarray(phi) - np.asarray(alpha)
    return np.maximum(np.abs(np.cos(d)) - np.abs(np.sin(d)), 0.0)


def gamma(q, g, spec=None):
    """Alignment value of the pixel at offset q = (dx, dy) in the gradient field g."""
    dx, dy = q
    R = g.radius
    if not g.norm[R + dy, R + dx]:
        return 0.0
    d = g.phi[R + dy, R + dx] - offset_angle(dx, dy)
    return max(abs(math.cos(d)) - abs(math.sin(d)), 0.0)


def branch_strength(g, spec):
    """Return (omega, J): the summed alignment over the sector and its size."""
    members = sector_members(spec, g.radius)
    omega = 0.0
    for q in members:
        omega += gamma(q, g, spec)
    return omega, len(members)



###
#
# orientation profiles
#
###


@lru_cache(maxsize=256)
def sector_bank(r, bins, tau):
    """Flattened members of all `bins` sectors of radius r.

    Returns (dx, dy, alpha, bin_ids, sizes) as numpy arrays, ready for a single
    vectorized pass over a gradient field.
    """
    dxs, dys, ids = [], [], []
    sizes = np.zeros(bins, dtype=np.int64)
    for k in range(bins):
        members = _members(r, bin_angle(k, bins), tau)
        sizes[k] = len(members)
        for dx, dy in members:
            dxs.append(dx)
            dys.append(dy)
            ids.append(k)
    dx = np.array(dxs, dtype=np.int64)
    dy = np.array(dys, dtype=np.int64)
    alpha = np.mod(np.arctan2(-dy, dx), TWO_PI)
    return dx, dy, alpha, np.array(ids, dtype=np.int64), sizes


def orientation_profile(g, r, cfg=None):
    """Branch strength omega(r, theta_k) for every orientation bin.

    `cfg` provides `theta_bins` (default 64) and `tau` (default 1.0).
    Returns a pair of arrays (omega, J), both of length theta_bins.
    """
    bins = int(getattr(cfg, "theta_bins", 64))
    tau = float(getattr(cfg, "tau", 1.0))
    if r > g.radius:
        raise GeometryError(f"Scale {r} exceeds the gradient field radius {g.radius}")
    dx, dy, alpha, ids, sizes = sector_bank(int(r), bins, tau)
    R = g.radius
    norm = g.norm[R + dy, R + dx]
    values = np.where(norm, alignment(g.phi[R + dy, R + dx], alpha), 0.0)
    return np.bincount(ids, weights=values, minlength=bins), sizes.copy()


def semi_local_maxima(profile, window):
    """Bins strictly positive and stronger than every other bin within +-window (circular).

    Equal values inside the window are resolved in favour of the lowest bin index.

    Example
    -------
    >>> semi_local_maxima([0, 3, 1, 0, 0, 0, 0, 0], 2)
    [1]
    """
    if window < 1:
        raise ParameterError(f"Semi-local window must be at least 1, got {window}")
    values = np.asarray(profile, dtype=np.float64)
    n = len(values)
    out = []
    for i in range(n):
        v = values[i]
        if not v > 0:
            continue
        keep = True
        for step in range(1, window + 1):
            for j in ((i - step) % n, (i + step) % n):
                if j == i:
                    continue
                if values[j] > v or (values[j] == v and j < i):
                    keep = False
                    break
            if not keep:
                break
        if keep:
            out.append(i)
    return out

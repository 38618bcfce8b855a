"""
Arc-style corner prefilter on the local surface of active events.

Two tests are available, both evaluated on two discrete circles (radius 3 and
4) around the newest event. Only events passing both circles are handed to the
a-contrario detector.

* ``junction`` (default): the recently fired pixels of each circle are split
  into arcs. Arcs not linked to the center by a recent pixel halfway along the
  radius are dropped. One arc must have a corner-like length, two arcs must not
  be the two sides of a straight edge, three or more arcs always pass.
* ``arcstar``: the newest timestamp of the circle is grown into an arc, one
  neighbour at a time, and the arc (or its complement) must have a bounded
  length. This is the classic single-corner test: it rejects most crossings.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, GeometryError
from .events import SENTINEL


FILTER_METHODS = ("junction", "arcstar")

# two arcs whose centers are this close to diametrically opposite, with equal
# lengths, are the two sides of one straight edge
OPPOSITE_TOLERANCE = 1.0


# one quarter of each circle, clockwise on screen (x right, y down) from (r, 0);
# the other quarters are obtained by rotating by 90 degrees
_QUARTER_ARCS = {
    3: [(3, 0), (3, 1), (2, 2), (1, 3)],
    4: [(4, 0), (4, 1), (3, 2), (2, 3), (1, 4)],
}


def circle_offsets(radius):
    """Return the discrete circle of `radius` as (dx, dy) offsets.

    The traversal starts at (radius, 0) and runs clockwise on screen, i.e.
    towards positive y first. Radius 3 gives 16 offsets, radius 4 gives 20.

    Example
    -------
    >>> circle_offsets(3)[:4]
    [(3, 0), (3, 1), (2, 2), (1, 3)]
    """
    try:
        quarter = _QUARTER_ARCS[int(radius)]
    except KeyError:
        raise ConfigError(f"Unsupported circle radius {radius}: use one of {sorted(_QUARTER_ARCS)}")
    offsets = []
    arc = list(quarter)
    for _ in range(4):
        offsets.extend(arc)
        arc = [(-dy, dx) for dx, dy in arc]
    return offsets


def _half(v):
    # halves rounded away from zero
    return int(math.copysign(math.floor(abs(v) / 2.0 + 0.5), v))


def halfway_offsets(offsets):
    """The pixel halfway between the center and each circle offset.

    >>> halfway_offsets([(3, 0), (3, 1), (-2, -2)])
    [(2, 0), (2, 1), (-1, -1)]
    """
    return [(_half(dx), _half(dy)) for dx, dy in offsets]


@dataclass
class FilterConfig:
    inner_radius: int = 3
    outer_radius: int = 4
    inner_arc: tuple = (3, 6)
    outer_arc: tuple = (4, 8)
    method: str = "junction"
    recent_window: float = 0.008  # seconds

    def validate(self):
        for radius, bounds in ((self.inner_radius, self.inner_arc), (self.outer_radius, self.outer_arc)):
            size = len(circle_offsets(radius))
            lo, hi = bounds
            if lo < 1 or hi < 1 or lo > hi or hi > size:
                raise ConfigError(
                    f"Invalid arc bounds {list(bounds)} for circle radius {radius} ({size} pixels)")
        if self.method not in FILTER_METHODS:
            raise ConfigError(f"Unknown filter method '{self.method}': use one of {list(FILTER_METHODS)}")
        if not self.recent_window > 0:
            raise ConfigError(f"The filter recent window must be positive, got {self.recent_window}")
        return self



###
#
# Newest-arc expansion
#
###


def newest_arc_length(values, lo):
    """Grow an arc from the newest value of the circle and return its length.

    The arc first takes `lo` - 1 steps unconditionally, always towards the
    newer of its two neighbours. After that it keeps growing whenever the
    next neighbour is at least as new as the oldest value already inside.
    """
    n = len(values)
    newest = int(np.argmax(values))
    segmin = values[newest]
    li, ri = (newest - 1) % n, (newest + 1) % n
    lv, rv = values[li], values[ri]
    lmin, rmin = lv, rv
    size = lo
    for it in range(1, n):
        grow = it >= lo
        if rv > lv:
            if grow and rv >= segmin:
                size = it + 1
            if (not grow or rv >= segmin) and rmin < segmin:
                segmin = rmin
            ri = (ri + 1) % n
            rv = values[ri]
            rmin = min(rmin, rv)
        else:
            if grow and lv >= segmin:
                size = it + 1
            if (not grow or lv >= segmin) and lmin < segmin:
                segmin = lmin
            li = (li - 1) % n
            lv = values[li]
            lmin = min(lmin, lv)
    return size


def has_newest_arc(values, bounds):
    """True if the newest arc, or its complement, has a length within `bounds`."""
    n = len(values)
    lo, hi = bounds
    size = newest_arc_length(values, lo)
    return size <= hi or n - hi <= size <= n - lo



###
#
# Linked recent arcs
#
###


def recent_mask(values, t, window):
    """Cells that fired within `window` seconds before `t`."""
    return (values > SENTINEL) & (values >= t - window)


def linked_arcs(recent, linked):
    """Maximal circular runs of `recent` holding at least one `linked` cell.

    Returns (start, length) pairs in traversal order. A circle that is entirely
    recent is one run starting at 0.
    """
    n = len(recent)
    if recent.all():
        return [(0, n)] if linked.any() else []
    origin = int(np.argmin(recent))
    arcs = []
    i = 0
    while i < n:
        start = (origin + i) % n
        if not recent[start]:
            i += 1
            continue
        length = 0
        while recent[(start + length) % n]:
            length += 1
        if any(linked[(start + j) % n] for j in range(length)):
            arcs.append((start, length))
        i += length
    return arcs


def is_junction_arcs(arcs, n, bounds):
    """Decide whether the linked arcs of an n-cell circle look like a junction.

    >>> is_junction_arcs([(0, 4)], 16, (3, 6))
    True
    >>> is_junction_arcs([(0, 2), (8, 2)], 16, (3, 6))
    False
    """
    kept = sum(length for _, length in arcs)
    if kept == 0 or kept == n:
        return False
    if len(arcs) >= 3:
        return True
    lo, hi = bounds
    if len(arcs) == 1:
        length = arcs[0][1]
        return lo <= length <= hi or lo <= n - length <= hi
    (s0, l0), (s1, l1) = arcs
    d = abs((s1 + (l1 - 1) / 2.0) - (s0 + (l0 - 1) / 2.0)) % n
    d = min(d, n - d)
    return not (abs(d - n / 2.0) <= OPPOSITE_TOLERANCE and l0 == l1)


def _circle_values(patch, offsets):
    r = patch.radius
    return np.array([patch.values[r + dy, r + dx] for dx, dy in offsets], dtype=np.float64)


def has_junction_arcs(patch, offsets, bounds, window):
    """Run the linked-arc test of one circle on a patch centered on the newest event."""
    t = patch.center_value
    recent = recent_mask(_circle_values(patch, offsets), t, window)
    linked = recent_mask(_circle_values(patch, halfway_offsets(offsets)), t, window)
    return is_junction_arcs(linked_arcs(recent, linked), len(offsets), bounds)



def is_candidate(patch, cfg=None):
    """Run the two-circle test of `cfg.method` on a TimestampPatch centered on the newest event.

    Raises GeometryError when the patch is smaller than the outer circle.
    """
    return ArcFilter(cfg).is_candidate(patch)



class ArcFilter(object):
    """Stateless candidate filter bound to one configuration.

    Example
    -------
    >>> f = ArcFilter()
    >>> f.check(gsae, event)
    False
    """

    def __init__(self, cfg=None):
        self.cfg = (cfg or FilterConfig()).validate()
        self.radius = max(self.cfg.inner_radius, self.cfg.outer_radius)
        self._circles = [(circle_offsets(self.cfg.inner_radius), tuple(self.cfg.inner_arc)),
                         (circle_offsets(self.cfg.outer_radius), tuple(self.cfg.outer_arc))]

    def __repr__(self):
        return "<eacj.ArcFilter object #%s. Method: %s. Circles: %d/%d>" % (
            str(id(self)), self.cfg.method, self.cfg.inner_radius, self.cfg.outer_radius)

    def is_candidate(self, patch):
        if patch.radius < self.radius:
            raise GeometryError(
                f"Patch radius {patch.radius} is smaller than the filter circle radius {self.radius}")
        for offsets, bounds in self._circles:
            if self.cfg.method == "arcstar":
                ok = has_newest_arc(_circle_values(patch, offsets), bounds)
            else:
                ok = has_junction_arcs(patch, offsets, bounds, self.cfg.recent_window)
            if not ok:
                return False
        return True

    def check(self, gsae, e):
        """Test the event `e`, already applied to `gsae`."""
        return self.is_candidate(gsae.extract_patch((e.x, e.y), self.radius))

"""
Event representation, event file I/O and the global Surface of Active Events.

Conventions
-----------
* Pixel coordinates: x is the column (growing rightwards), y is the row
  (growing downwards).
* The surface is stored as a numpy array of shape (height, width), indexed
  ``cells[y, x]``. Use `GSAE.at(x, y)` to read a single cell.
* Pixels that never fired hold `SENTINEL`, a timestamp strictly older than any
  valid event, so that rankings by recency put them last.

>>> from eacj.core.events import GSAE, Event
>>> sae = GSAE(240, 180)
>>> sae.update(Event(t=0.5, x=10, y=20, p=1))
>>> sae.at(10, 20)
0.5

"""

from dataclasses import dataclass

import numpy as np

from .errors import EventParseError, BoundsError


SENSOR_WIDTH = 240
SENSOR_HEIGHT = 180

SENTINEL = -1.0  # never fired


@dataclass(frozen=True)
class Event:
    """One asynchronous camera event: timestamp (s), pixel column/row and polarity (+1/-1)."""
    t: float
    x: int
    y: int
    p: int = 1

    def to_line(self):
        return "%.9f %d %d %d" % (self.t, self.x, self.y, self.p)


@dataclass
class TimestampPatch:
    """A (2r+1)x(2r+1) window of the surface, ``values[dy + r, dx + r]``."""
    radius: int
    center: tuple
    values: np.ndarray

    @property
    def side(self):
        return 2 * self.radius + 1

    @property
    def center_value(self):
        return self.values[self.radius, self.radius]

    def live_mask(self):
        """Cells holding a real timestamp (not the sentinel)."""
        return self.values > SENTINEL

    def __repr__(self):
        return "<eacj.TimestampPatch object #%s. Radius: %d. Center: %s>" % (
            str(id(self)), self.radius, str(self.center))



###
#
# Event files
#
###


def check_bounds(x, y, width, height):
    """Raise a BoundsError unless (x, y) lies on a width x height sensor."""
    if x < 0 or y < 0 or x >= width or y >= height:
        raise BoundsError(f"Pixel ({x}, {y}) outside sensor {width}x{height}")


def _parse_polarity(token):
    value = int(token)
    if value == 0:
        return -1
    if value in (1, -1):
        return value
    raise ValueError(f"invalid polarity '{token}'")


def parse_event_line(line, lineno=None, width=None, height=None):
    """Parse one "t x y p" line of an event text file.

    Parameters
    ----------
    line: str
        Whitespace separated fields: timestamp in seconds, column, row, polarity.
        Polarity {0, 1} is mapped to {-1, +1}; {-1, +1} is kept verbatim.
    lineno: int, optional
        Line number used in error messages.
    width, height: int, optional
        Sensor geometry. When given, coordinates are bounds checked.

    Returns
    -------
    Event

    Example
    -------
    >>> parse_event_line("0.001 120 90 1")
    Event(t=0.001, x=120, y=90, p=1)
    >>> parse_event_line("2.5 0 0 0")
    Event(t=2.5, x=0, y=0, p=-1)
    """
    fields = line.split()
    if len(fields) != 4:
        raise EventParseError(f"expected 4 fields 't x y p', got {len(fields)}", lineno)
    try:
        t = float(fields[0])
        x = int(fields[1])
        y = int(fields[2])
        p = _parse_polarity(fields[3])
    except ValueError as e:
        raise EventParseError(f"cannot parse '{line.strip()}' ({e})", lineno)
    if not np.isfinite(t) or t < 0:
        raise EventParseError(f"invalid timestamp {fields[0]}", lineno)
    if x < 0 or y < 0:
        raise BoundsError(f"line {lineno}: negative pixel coordinate ({x}, {y})")
    if width is not None and height is not None:
        try:
            check_bounds(x, y, width, height)
        except BoundsError as e:
            raise BoundsError(f"line {lineno}: {e}")
    return Event(t=t, x=x, y=y, p=p)


def iter_events(lines, width=None, height=None, path=None):
    """Yield events from an iterable of text lines, skipping blanks and '#' comments.

    Timestamps must be non-decreasing.
    """
    last_t = None
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            e = parse_event_line(stripped, lineno, width, height)
        except EventParseError as err:
            if path:
                raise EventParseError(err.reason, err.lineno, path)
            raise
        if last_t is not None and e.t < last_t:
            raise EventParseError(
                f"timestamp {e.t} is older than the previous event ({last_t})", lineno, path)
        last_t = e.t
        yield e


def read_events(fpath, width=None, height=None):
    """Read a whole event text file into a list of Event objects."""
    with open(fpath, "r", encoding="utf-8") as f:
        return list(iter_events(f, width, height, path=fpath))


def write_events(fpath, events):
    """Write events as "t x y p" lines. Returns the number of events written."""
    n = 0
    with open(fpath, "w", encoding="utf-8") as f:
        for e in events:
            f.write(e.to_line() + "\n")
            n += 1
    return n


def arrays_to_events(t, x, y, p):
    """Events from parallel arrays of timestamps, columns, rows and polarities."""
    return [Event(t=float(a), x=int(b), y=int(c), p=int(d)) for a, b, c, d in zip(t, x, y, p)]



###
#
# Global Surface of Active Events
#
###


class GSAE(object):
    """Global Surface of Active Events: the latest timestamp of every pixel.

    A single surface is shared by both polarities. Updates must be applied in
    stream order by a single writer; patches returned by `extract_patch` are
    copies and can be handed to other workers.
    """

    def __init__(self, width=SENSOR_WIDTH, height=SENSOR_HEIGHT):
        if width < 1 or height < 1:
            raise BoundsError(f"Invalid sensor size {width}x{height}")
        self.width = int(width)
        self.height = int(height)
        self.cells = np.full((self.height, self.width), SENTINEL, dtype=np.float64)

    def __repr__(self):
        fired = int(np.count_nonzero(self.cells > SENTINEL))
        return "<eacj.GSAE object #%s. Size: %dx%d. Active pixels: %d>" % (
            str(id(self)), self.width, self.height, fired)

    @property
    def area(self):
        return self.width * self.height

    def at(self, x, y):
        return float(self.cells[y, x])

    def contains(self, x, y):
        return 0 <= x < self.width and 0 <= y < self.height

    def update(self, e):
        """Store the event timestamp at its pixel."""
        check_bounds(e.x, e.y, self.width, self.height)
        self.cells[e.y, e.x] = e.t

    def extract_patch(self, center, r):
        """Copy the (2r+1)x(2r+1) window around `center` = (x, y).

        Cells falling outside the sensor are filled with the sentinel.
        """
        cx, cy = int(center[0]), int(center[1])
        side = 2 * r + 1
        values = np.full((side, side), SENTINEL, dtype=np.float64)
        x0, x1 = max(cx - r, 0), min(cx + r + 1, self.width)
        y0, y1 = max(cy - r, 0), min(cy + r + 1, self.height)
        if x0 < x1 and y0 < y1:
            values[y0 - (cy - r):y1 - (cy - r), x0 - (cx - r):x1 - (cx - r)] = self.cells[y0:y1, x0:x1]
        return TimestampPatch(radius=r, center=(cx, cy), values=values)

    def window_mask(self, t, window):
        """Boolean (height, width) mask of pixels that fired within (t - window, t]."""
        return (self.cells > t - window) & (self.cells <= t)

    def as_array(self):
        return self.cells.copy()

    def copy(self):
        other = GSAE(self.width, self.height)
        other.cells = self.cells.copy()
        return other

    def reset(self):
        self.cells.fill(SENTINEL)



def gsae_update(gsae, e):
    """Apply one event to the surface (latest timestamp wins)."""
    gsae.update(e)


def extract_patch(gsae, center, r):
    """Return the TimestampPatch of radius `r` centered on pixel `center` = (x, y)."""
    return gsae.extract_patch(center, r)

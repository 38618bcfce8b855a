"""
Ground-truth matching and detection metrics.

Detections and non-detected events are labeled with two cylinders around the
tracked junction trajectories: within 3.5 px of a track a detection is a true
positive, between 3.5 and 5 px a false positive; non-detected events are false
negatives and true negatives under the same radii. Anything farther away, or
outside every track's time span, is ignored.

>>> from eacj.core.evaluation import TrackFile, evaluate, format_report
>>> tracks = TrackFile.from_file("tracks.txt")
>>> result = evaluate(junctions, tracks, events)
>>> print(format_report(result))

"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EventParseError, ParameterError


TP, FP, TN, FN, IGNORE = "TP", "FP", "TN", "FN", "ignore"

INNER_RADIUS = 3.5
OUTER_RADIUS = 5.0

CAVEAT = "corners are not necessarily junctions"



class TrackFile(object):
    """Tracked junction trajectories: track id => time sorted arrays (t, x, y).

    Positions between samples are interpolated linearly; a track has no
    position outside its own time span.
    """

    def __init__(self, tracks=None):
        self.tracks = {}
        for tid, samples in (tracks or {}).items():
            self.add(tid, samples)

    def __repr__(self):
        return "<eacj.TrackFile object #%s. Tracks: %d>" % (str(id(self)), len(self.tracks))

    def __len__(self):
        return len(self.tracks)

    def add(self, tid, samples):
        """Add a track from (t, x, y) samples, sorting them by time."""
        data = np.asarray(list(samples), dtype=np.float64).reshape(-1, 3)
        if not len(data):
            raise ParameterError(f"Track {tid} has no samples")
        data = data[np.argsort(data[:, 0], kind="stable")]
        self.tracks[tid] = (data[:, 0], data[:, 1], data[:, 2])

    def span(self, tid):
        t = self.tracks[tid][0]
        return float(t[0]), float(t[-1])

    def position_at(self, t):
        """Positions of every track alive at time t, as a list of (track id, x, y)."""
        out = []
        for tid, (ts, xs, ys) in self.tracks.items():
            if ts[0] <= t <= ts[-1]:
                out.append((tid, float(np.interp(t, ts, xs)), float(np.interp(t, ts, ys))))
        return out

    def nearest(self, x, y, t):
        """(distance, track id) of the closest track point at time t, or (None, None)."""
        best, best_id = None, None
        for tid, px, py in self.position_at(t):
            d = math.hypot(x - px, y - py)
            if best is None or d < best:
                best, best_id = d, tid
        return best, best_id

    @classmethod
    def from_file(cls, fpath):
        """Read "track_id t x y" lines. Blank lines and `#` comments are skipped."""
        samples = {}
        with open(fpath, "r", encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                fields = line.split()
                if not fields or fields[0].startswith("#"):
                    continue
                if len(fields) != 4:
                    raise EventParseError(f"expected 'track_id t x y', got '{line.strip()}'", lineno, fpath)
                try:
                    row = (float(fields[1]), float(fields[2]), float(fields[3]))
                except ValueError as e:
                    raise EventParseError(f"bad track sample ({e})", lineno, fpath)
                tid = int(fields[0]) if fields[0].lstrip("-").isdigit() else fields[0]
                samples.setdefault(tid, []).append(row)
        return cls(samples)

    def to_file(self, fpath):
        n = 0
        with open(fpath, "w", encoding="utf-8") as f:
            for tid, (ts, xs, ys) in self.tracks.items():
                for t, x, y in zip(ts, xs, ys):
                    f.write("%s %.9f %.4f %.4f\n" % (tid, t, x, y))
                    n += 1
        return n

    @classmethod
    def from_truth(cls, truth):
        """One track per synthetic junction, sampled at the truth instants."""
        samples = {}
        for record in truth:
            samples.setdefault(record.junction, []).append((record.t, record.center[0], record.center[1]))
        return cls(samples)


def truth_to_tracks(truth):
    return TrackFile.from_truth(truth)



@dataclass
class ConfusionCounts:
    TP: int = 0
    FP: int = 0
    TN: int = 0
    FN: int = 0

    def add(self, label):
        if label != IGNORE:
            setattr(self, label, getattr(self, label) + 1)

    def validate(self):
        for name in (TP, FP, TN, FN):
            if getattr(self, name) < 0:
                raise ParameterError(f"Negative {name} count: {getattr(self, name)}")
        return self


def _cylinder(d, inside, between):
    if d is None:
        return IGNORE, None
    if d <= INNER_RADIUS:
        return inside, d
    if d <= OUTER_RADIUS:
        return between, d
    return IGNORE, d


def label_detection(j, tracks):
    """TP within 3.5 px of the nearest track at j.t, FP up to 5 px, ignore otherwise."""
    d, _ = tracks.nearest(j.x, j.y, j.t)
    return _cylinder(d, TP, FP)[0]


def label_non_detection(e, tracks):
    """FN within 3.5 px of the nearest track at e.t, TN up to 5 px, ignore otherwise."""
    d, _ = tracks.nearest(e.x, e.y, e.t)
    return _cylinder(d, FN, TN)[0]


def metrics(c):
    """Return (fpr, accuracy); each is None when its denominator is zero.

    Example
    -------
    >>> metrics(ConfusionCounts(TP=72, FP=27))
    (1.0, 0.7272727272727273)
    """
    c.validate()
    fpr = c.FP / (c.FP + c.TN) if (c.FP + c.TN) else None
    accuracy = c.TP / (c.TP + c.FP) if (c.TP + c.FP) else None
    return fpr, accuracy



@dataclass
class EvaluationResult:
    """Counts plus per-item labels: (item, label, distance or None)."""
    counts: ConfusionCounts = field(default_factory=ConfusionCounts)
    detections: list = field(default_factory=list)
    events: list = field(default_factory=list)
    scene: str = "scene"

    @property
    def fpr(self):
        return metrics(self.counts)[0]

    @property
    def accuracy(self):
        return metrics(self.counts)[1]

    @property
    def ignored_detections(self):
        return sum(1 for item in self.detections if item[1] == IGNORE)

    @property
    def ignored_events(self):
        return sum(1 for item in self.events if item[1] == IGNORE)


def _event_key(t, x, y):
    return (int(x), int(y), round(float(t), 9))


def evaluate(junctions, tracks, events=None, scene="scene"):
    """Label every detection and, when `events` is given, every non-detected event.

    Events that triggered a junction are matched on (x, y, t). Without events
    no TN or FN are counted, so the FPR stays undefined unless FP > 0.
    """
    result = EvaluationResult(scene=scene)
    detected = set()
    for j in junctions:
        d, _ = tracks.nearest(j.x, j.y, j.t)
        label, dist = _cylinder(d, TP, FP)
        result.counts.add(label)
        result.detections.append((j, label, dist))
        detected.add(_event_key(j.t, j.x, j.y))
    for e in events or []:
        if _event_key(e.t, e.x, e.y) in detected:
            continue
        d, _ = tracks.nearest(e.x, e.y, e.t)
        label, dist = _cylinder(d, FN, TN)
        result.counts.add(label)
        result.events.append((e, label, dist))
    return result


def _fmt(value):
    return "undefined" if value is None else "%.4f" % value


def format_report(results):
    """Plain text report, one block per scene.

    `results` is an EvaluationResult or a list of them.
    """
    if isinstance(results, EvaluationResult):
        results = [results]
    lines = ["# eacj evaluation report", "# caveat: %s" % CAVEAT]
    for r in results:
        c = r.counts
        lines += [
            "",
            "[%s]" % r.scene,
            "detections = %d" % len(r.detections),
            "TP = %d" % c.TP,
            "FP = %d" % c.FP,
            "TN = %d" % c.TN,
            "FN = %d" % c.FN,
            "ignored_detections = %d" % r.ignored_detections,
            "ignored_events = %d" % r.ignored_events,
            "fpr = %s" % _fmt(r.fpr),
            "accuracy = %s" % _fmt(r.accuracy),
        ]
    return "\n".join(lines) + "\n"

"""
Synthetic event streams with analytic junction ground truth.

Each junction template is a set of straight edge segments (branches) sharing a
center, translated at constant velocity. Edges are short intensity ramps
quantized into brightness levels: a pixel fires one event each time a level
crosses its center, so a moving edge leaves a band of events a couple of pixels
wide. Uniform background noise is added as a Poisson process. Orientations use
the detector convention (counterclockwise from +x, y pointing down on the
sensor).

>>> from eacj.core.synth import x_junction_scene, generate
>>> events, truth = generate(x_junction_scene())
"""

import math
from dataclasses import dataclass, field
from typing import List

import numpy as np
from tqdm import tqdm

from .errors import ConfigError, RangeError, EventParseError
from .events import SENSOR_WIDTH, SENSOR_HEIGHT, arrays_to_events
from ..utils.misc_utils import printDebug


BRANCH_COUNTS = {"L": 2, "Y": 3, "T": 3, "X": 4}
DEFAULT_TRUTH_INTERVAL = 0.001
DEFAULT_LEVELS = 16
DEFAULT_RAMP = 2.0


@dataclass
class JunctionTemplate:
    kind: str
    center: tuple
    orientations: List[float]
    lengths: List[float]
    velocity: tuple = None  # px/s, None means the scene velocity

    def validate(self):
        kind = self.kind.upper()
        if kind not in BRANCH_COUNTS:
            raise ConfigError(f"Unknown junction type '{self.kind}': use one of {sorted(BRANCH_COUNTS)}")
        if len(self.orientations) != BRANCH_COUNTS[kind] or len(self.lengths) != BRANCH_COUNTS[kind]:
            raise ConfigError(
                f"A {kind} junction needs {BRANCH_COUNTS[kind]} branches, got "
                f"{len(self.orientations)} orientations and {len(self.lengths)} lengths")
        if min(self.lengths) < 3:
            raise ConfigError(f"Branch lengths must be at least 3 pixels, got {self.lengths}")
        return self


@dataclass
class SceneSpec:
    width: int = SENSOR_WIDTH
    height: int = SENSOR_HEIGHT
    junctions: List[JunctionTemplate] = field(default_factory=list)
    velocity: tuple = (0.0, 0.0)
    noise_rate: float = 0.0  # events / s / pixel
    duration: float = 0.1
    seed: int = 0
    truth_interval: float = DEFAULT_TRUTH_INTERVAL
    levels: int = DEFAULT_LEVELS
    ramp: float = DEFAULT_RAMP  # px

    def validate(self):
        if self.width < 1 or self.height < 1:
            raise ConfigError(f"Invalid sensor size {self.width}x{self.height}")
        if self.levels < 1:
            raise ConfigError(f"The number of brightness levels must be at least 1, got {self.levels}")
        if self.ramp < 0 or (self.levels > 1 and self.ramp == 0):
            raise ConfigError(f"Edge ramp must be positive when levels > 1, got {self.ramp}")
        if self.duration <= 0:
            raise ConfigError(f"Scene duration must be positive, got {self.duration}")
        if self.noise_rate < 0:
            raise ConfigError(f"Noise rate must be non-negative, got {self.noise_rate}")
        if self.truth_interval <= 0:
            raise ConfigError(f"Truth interval must be positive, got {self.truth_interval}")
        for j in self.junctions:
            j.validate()
        return self

    def velocity_of(self, template):
        return tuple(template.velocity) if template.velocity is not None else tuple(self.velocity)


@dataclass
class GroundTruthRecord:
    t: float
    center: tuple
    branches: list  # (length, orientation) pairs
    junction: int = 0

    @property
    def M(self):
        return len(self.branches)



def level_offsets(levels, ramp):
    """Normal offsets (px) of the brightness levels spread over the edge ramp, centered on the edge.

    >>> level_offsets(4, 2.0)
    [-0.75, -0.25, 0.25, 0.75]
    """
    if levels <= 1:
        return [0.0]
    return [ramp * ((k + 0.5) / levels - 0.5) for k in range(levels)]


def _branch_events(spec, template, branch_index, xs, ys):
    """Crossing times of one branch edge over all pixel centers.

    The edge is an intensity ramp of `spec.ramp` pixels: a pixel fires once per
    brightness level, when the level crosses its center.
    """
    theta = template.orientations[branch_index]
    length = template.lengths[branch_index]
    vx, vy = spec.velocity_of(template)
    cx, cy = template.center
    ux, uy = math.cos(theta), -math.sin(theta)
    nx, ny = -uy, ux
    speed = nx * vx + ny * vy
    if abs(speed) < 1e-12:
        return None
    contrast = 1 if branch_index % 2 == 0 else -1
    polarity = contrast * (1 if speed > 0 else -1)
    ts, hx, hy = [], [], []
    for off in level_offsets(spec.levels, spec.ramp):
        t_cross = (nx * (xs - cx) + ny * (ys - cy) - off) / speed
        along = ux * (xs - cx - vx * t_cross) + uy * (ys - cy - vy * t_cross)
        hit = (t_cross >= 0.0) & (t_cross < spec.duration) & (along >= 0.0) & (along <= length)
        ts.append(t_cross[hit])
        hx.append(xs[hit])
        hy.append(ys[hit])
    t = np.concatenate(ts)
    return t, np.concatenate(hx), np.concatenate(hy), np.full(len(t), polarity, dtype=np.int64)


def generate(spec, verbose=False):
    """Render the scene into an event stream and its ground truth.

    Returns
    -------
    (list of Event, list of GroundTruthRecord)
        Events are sorted by (t, y, x); truth is sampled every `truth_interval` seconds.
    """
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    ys, xs = np.mgrid[0:spec.height, 0:spec.width]
    xs = xs.ravel().astype(np.float64)
    ys = ys.ravel().astype(np.float64)

    parts = []
    moving = False
    for template in tqdm(spec.junctions, disable=not verbose, desc="rendering"):
        for i in range(len(template.orientations)):
            out = _branch_events(spec, template, i, xs, ys)
            if out is not None:
                moving = True
                parts.append(out)
    if spec.junctions and not moving:
        printDebug("Warning: the scene does not move, no structural events will fire.", "comment")

    if spec.noise_rate > 0:
        count = rng.poisson(spec.noise_rate * spec.width * spec.height * spec.duration)
        parts.append((rng.uniform(0.0, spec.duration, count),
                      rng.integers(0, spec.width, count).astype(np.float64),
                      rng.integers(0, spec.height, count).astype(np.float64),
                      rng.choice(np.array([-1, 1]), count)))

    if parts:
        t = np.concatenate([p[0] for p in parts])
        x = np.concatenate([p[1] for p in parts]).astype(np.int64)
        y = np.concatenate([p[2] for p in parts]).astype(np.int64)
        p = np.concatenate([p[3] for p in parts]).astype(np.int64)
        order = np.lexsort((x, y, t))
        events = arrays_to_events(t[order], x[order], y[order], p[order])
    else:
        events = []

    return events, sample_truth(spec)


def sample_truth(spec):
    """Ground truth of every template at t = 0, interval, 2 * interval, ... <= duration."""
    steps = int(math.floor(spec.duration / spec.truth_interval + 1e-9))
    records = []
    for k in range(steps + 1):
        t = k * spec.truth_interval
        for jid, template in enumerate(spec.junctions):
            vx, vy = spec.velocity_of(template)
            center = (template.center[0] + vx * t, template.center[1] + vy * t)
            branches = list(zip(template.lengths, template.orientations))
            records.append(GroundTruthRecord(t=t, center=center, branches=branches, junction=jid))
    return records


def truth_at(truth, t, junction=0):
    """Linearly interpolated record of one junction at time t.

    Raises RangeError when t lies outside the sampled span.
    """
    samples = sorted((r for r in truth if r.junction == junction), key=lambda r: r.t)
    if not samples or t < samples[0].t - 1e-12 or t > samples[-1].t + 1e-12:
        raise RangeError(f"Time {t} outside the ground truth span of junction {junction}")
    for a, b in zip(samples, samples[1:]):
        if a.t <= t <= b.t:
            if b.t == a.t:
                return a
            w = (t - a.t) / (b.t - a.t)
            center = (a.center[0] + w * (b.center[0] - a.center[0]),
                      a.center[1] + w * (b.center[1] - a.center[1]))
            return GroundTruthRecord(t=t, center=center, branches=a.branches, junction=junction)
    nearest = samples[0] if abs(t - samples[0].t) <= abs(t - samples[-1].t) else samples[-1]
    return GroundTruthRecord(t=t, center=nearest.center, branches=nearest.branches, junction=junction)



###
#
# bundled scenes
#
###


def x_junction_scene(seed=0, speed=50.0, length=12.0, noise_rate=0.0, duration=0.1):
    """A single X junction (two perpendicular edge pairs) in the middle of a 240x180 sensor.

    The motion direction is 30 degrees off the branches, so every branch sweeps.
    """
    heading = math.radians(30.0)
    template = JunctionTemplate(kind="X", center=(120.0, 90.0),
                                orientations=[0.0, 0.5 * math.pi, math.pi, 1.5 * math.pi],
                                lengths=[length] * 4)
    return SceneSpec(junctions=[template], velocity=(speed * math.cos(heading), -speed * math.sin(heading)),
                     noise_rate=noise_rate, duration=duration, seed=seed)


def textured_scene(seed=0, noise_rate=0.5, duration=0.1):
    """Several L/Y/T/X junctions moving together, plus background noise.

    Branches are long compared to the detector scales, so most of each
    junction's events come from its branches and not from its center.
    """
    q = 0.5 * math.pi
    templates = [
        JunctionTemplate("X", (50.0, 45.0), [0.3, 0.3 + q, 0.3 + 2 * q, 0.3 + 3 * q], [30.0] * 4),
        JunctionTemplate("L", (120.0, 45.0), [0.2, 0.2 + q], [35.0, 25.0]),
        JunctionTemplate("Y", (190.0, 45.0), [0.5, 2.0, 4.0], [28.0, 28.0, 28.0]),
        JunctionTemplate("T", (50.0, 130.0), [0.1, 0.1 + q, 0.1 + 2 * q], [30.0, 22.0, 30.0]),
        JunctionTemplate("X", (120.0, 130.0), [0.4, 0.4 + q, 0.4 + 2 * q, 0.4 + 3 * q], [25.0] * 4),
        JunctionTemplate("L", (190.0, 130.0), [1.0, 1.9], [32.0, 32.0]),
    ]
    return SceneSpec(junctions=templates, velocity=(40.0, 25.0), noise_rate=noise_rate,
                     duration=duration, seed=seed)


def noise_scene(rate=1.0, duration=0.1, seed=0, width=SENSOR_WIDTH, height=SENSOR_HEIGHT):
    """Uniform noise only."""
    return SceneSpec(width=width, height=height, noise_rate=rate, duration=duration, seed=seed)



###
#
# scene and truth files
#
###


def scene_from_dict(values):
    """Build a SceneSpec from flat `section.key` values (see `read_scene`)."""
    def get(key, default, cast=float):
        return cast(values[key]) if key in values else default

    try:
        spec = SceneSpec(
            width=get("sensor.width", SENSOR_WIDTH, int),
            height=get("sensor.height", SENSOR_HEIGHT, int),
            velocity=(get("motion.vx", 0.0), get("motion.vy", 0.0)),
            noise_rate=get("noise.rate", 0.0),
            duration=get("scene.duration", 0.1),
            seed=get("scene.seed", 0, int),
            truth_interval=get("truth.interval", DEFAULT_TRUTH_INTERVAL),
            levels=get("edge.levels", DEFAULT_LEVELS, int),
            ramp=get("edge.ramp", DEFAULT_RAMP),
        )
        names = sorted((k for k in values if k.startswith("junction.")),
                       key=lambda k: (len(k), k))
        for key in names:
            fields = values[key].split()
            if len(fields) not in (5, 7):
                raise ValueError(f"{key}: expected 'type cx cy thetas lengths [vx vy]'")
            template = JunctionTemplate(
                kind=fields[0].upper(),
                center=(float(fields[1]), float(fields[2])),
                orientations=[float(v) for v in fields[3].split(",")],
                lengths=[float(v) for v in fields[4].split(",")],
                velocity=(float(fields[5]), float(fields[6])) if len(fields) == 7 else None)
            spec.junctions.append(template)
    except ValueError as e:
        raise ConfigError(f"Invalid scene description: {e}")
    return spec.validate()


def read_scene(fpath):
    """Read a scene spec file of `section.key = value` lines, e.g.

    ```
    sensor.width = 240
    motion.vx = 43.3
    motion.vy = -25
    scene.duration = 0.1
    edge.levels = 16
    edge.ramp = 2
    junction.1 = X 120 90 0,1.5708,3.1416,4.7124 12,12,12,12
    ```
    """
    from .config import read_flat_file
    return scene_from_dict(read_flat_file(fpath))


def format_truth(record):
    """One line "t cx cy M len1 theta1 ... lenM thetaM"."""
    head = "%.9f %.4f %.4f %d" % (record.t, record.center[0], record.center[1], record.M)
    return head + "".join(" %.4f %.6f" % (length, theta) for length, theta in record.branches)


def write_truth(fpath, truth):
    with open(fpath, "w", encoding="utf-8") as f:
        for record in truth:
            f.write("%s\n" % format_truth(record))
    return len(truth)


def read_truth(fpath):
    """Read a truth file. Records of one sampling instant are numbered in file order."""
    records = []
    last_t, index = None, 0
    with open(fpath, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            fields = line.split()
            if not fields or fields[0].startswith("#"):
                continue
            try:
                t, cx, cy, M = float(fields[0]), float(fields[1]), float(fields[2]), int(fields[3])
                pairs = [(float(fields[4 + 2 * i]), float(fields[5 + 2 * i])) for i in range(M)]
            except (ValueError, IndexError) as e:
                raise EventParseError(f"bad truth record ({e})", lineno, fpath)
            index = index + 1 if t == last_t else 0
            last_t = t
            records.append(GroundTruthRecord(t=t, center=(cx, cy), branches=pairs, junction=index))
    return records

"""
The junction detector: per-scale binary patches, orientation search, scale
selection, NFA gating, and spatiotemporal refinement of the accepted junctions.

>>> from eacj.core.detector import Detector
>>> detector = Detector(width=240, height=180)
>>> junction = detector.detect(event, gsae)   # None when nothing is meaningful

"""

import math
from collections import deque
from dataclasses import dataclass, field
from typing import List, Optional

from .acontrario import (DEFAULT_P, DEFAULT_STEP, DEFAULT_MIXTURE_TOL, NfaConfig,
                         number_of_tests, cached_tail_table)
from .errors import ConfigError, EventParseError
from .events import SENSOR_WIDTH, SENSOR_HEIGHT
from .patches import binarize, gradient_field
from .sectors import (SectorSpec, TWO_PI, angular_distance, bin_angle, branch_strength,
                      orientation_profile, sector_bank, semi_local_maxima)
from ..utils.misc_utils import printDebug


JUNCTION_KINDS = {2: "L", 3: "Y", 4: "X"}


@dataclass
class DetectorConfig:
    p: float = DEFAULT_P
    epsilon: float = 1.0
    tau: float = 1.0
    r_min: int = 3
    r_max: int = 15
    theta_bins: int = 64
    window: Optional[int] = None  # semi-local maximum window, defaults to theta_bins // 16
    max_branches: int = 4
    grid_step: float = DEFAULT_STEP
    binarize_factor: float = 1.0
    mixture_tol: float = DEFAULT_MIXTURE_TOL

    @property
    def scales(self):
        return list(range(self.r_min, self.r_max + 1))

    @property
    def maxima_window(self):
        if self.window:
            return int(self.window)
        return max(1, self.theta_bins // 16)

    def validate(self):
        if not (1 <= self.r_min <= self.r_max):
            raise ConfigError(f"Invalid scale range [{self.r_min}, {self.r_max}]")
        if self.tau <= 0 or self.tau / self.r_min >= math.pi:
            raise ConfigError(f"Invalid sector width tau={self.tau}")
        if self.theta_bins < 2:
            raise ConfigError(f"Need at least 2 orientation bins, got {self.theta_bins}")
        if not 2 <= self.max_branches <= self.theta_bins:
            raise ConfigError(f"max_branches must lie in [2, {self.theta_bins}], got {self.max_branches}")
        if not self.epsilon > 0:
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")
        if not 0 < self.p < 1:
            raise ConfigError(f"p must lie in (0, 1), got {self.p}")
        if self.binarize_factor <= 0:
            raise ConfigError(f"binarize_factor must be positive, got {self.binarize_factor}")
        return self


@dataclass
class RefineConfig:
    r_d: float = 5.0
    T: float = 0.005

    def validate(self):
        if self.r_d < 0 or self.T < 0:
            raise ConfigError(f"Refinement radius and window must be non-negative, got {self.r_d}, {self.T}")
        return self


@dataclass
class Branch:
    r: int
    theta: float
    strength: float
    J: int
    tail: float
    nfa: float = float("nan")
    bin: int = -1


@dataclass
class Junction:
    x: int
    y: int
    t: float
    branches: List[Branch] = field(default_factory=list)
    strength: float = 0.0
    nfa: float = float("inf")

    @property
    def M(self):
        return len(self.branches)

    @property
    def kind(self):
        return JUNCTION_KINDS.get(self.M, "%d-branch" % self.M)

    def distance_to(self, other):
        return math.hypot(self.x - other.x, self.y - other.y)

    def __repr__(self):
        return "<eacj.Junction %s at (%d, %d) t=%.6f. NFA: %.3g. Branches: %s>" % (
            self.kind, self.x, self.y, self.t, self.nfa,
            ", ".join("(%d, %.3f)" % (b.r, b.theta) for b in self.branches))



def sector_sizes(cfg):
    """Every sector size J reachable at the configured scales and orientations."""
    sizes = set()
    for r in cfg.scales:
        sizes.update(int(J) for J in sector_bank(r, cfg.theta_bins, float(cfg.tau))[4] if J > 0)
    return sorted(sizes)


def _lookup(table, omega, J):
    # tails are read one grid step below the measured strength
    if J < 1:
        return 1.0
    return table.lookup(omega - table.step, J)


def best_scale(fields, theta, tables, cfg):
    """Pick the scale whose branch at `theta` has the smallest tail probability.

    Parameters
    ----------
    fields: dict
        Scale r => GradientField of the binary patch at that scale.
    theta: float
        Branch orientation in radians.
    tables: TailTable
        Must cover every sector size of the configured scales.
    cfg: DetectorConfig

    Returns
    -------
    Branch
        Ties go to the smaller scale. An all-zero field gives omega=0, tail=1
        at the smallest scale.
    """
    best = None
    for r in sorted(fields):
        omega, J = branch_strength(fields[r], SectorSpec(r, theta, cfg.tau))
        tail = _lookup(tables, omega, J)
        if best is None or tail < best.tail:
            best = Branch(r=r, theta=theta, strength=omega, J=J, tail=tail)
    return best


def _separated(a, b, tau):
    limit = 2.0 * max(tau / a.r, tau / b.r)
    return angular_distance(a.theta, b.theta) > limit



class Detector(object):
    """Junction detector bound to a configuration and its tail tables.

    Tables are loaded from `tail_cache` when it matches the configuration,
    otherwise computed (and saved there when a path is given).
    """

    def __init__(self, cfg=None, table=None, width=SENSOR_WIDTH, height=SENSOR_HEIGHT,
                 tail_cache=None, verbose=False):
        self.cfg = (cfg or DetectorConfig()).validate()
        self.width = width
        self.height = height
        self.nfa_cfg = NfaConfig(epsilon=self.cfg.epsilon, area=width * height,
                                 scale_count=len(self.cfg.scales),
                                 orientation_count=self.cfg.theta_bins,
                                 max_branches=self.cfg.max_branches).validate()
        if table is None:
            if verbose:
                printDebug("Preparing tail tables..", "comment")
            table = cached_tail_table(tail_cache, self.cfg.p, sector_sizes(self.cfg),
                                      self.cfg.grid_step, self.cfg.mixture_tol, verbose)
        self.table = table
        self.invocations = 0

    def __repr__(self):
        return "<eacj.Detector object #%s. Scales: %d-%d. Bins: %d. Epsilon: %g>" % (
            str(id(self)), self.cfg.r_min, self.cfg.r_max, self.cfg.theta_bins, self.cfg.epsilon)

    def fields(self, gsae, center):
        """Gradient field of the binarized patch at every scale."""
        out = {}
        for r in self.cfg.scales:
            patch = gsae.extract_patch(center, r)
            out[r] = gradient_field(binarize(patch, self.cfg.binarize_factor))
        return out

    def profiles(self, fields):
        return {r: orientation_profile(g, r, self.cfg) for r, g in fields.items()}

    def candidate_branches(self, profiles):
        """Best-scale branch for every bin that is a semi-local maximum of the profile at some scale.

        Bins are visited in increasing order. Short branches only peak at the
        small scales, long ones at the large scales.
        """
        cfg = self.cfg
        bins = set()
        for r in cfg.scales:
            bins.update(semi_local_maxima(profiles[r][0], cfg.maxima_window))
        out = []
        for k in sorted(bins):
            best = None
            for r in cfg.scales:
                omega, sizes = profiles[r]
                tail = _lookup(self.table, float(omega[k]), int(sizes[k]))
                if best is None or tail < best.tail:
                    best = Branch(r=r, theta=bin_angle(k, cfg.theta_bins), strength=float(omega[k]),
                                  J=int(sizes[k]), tail=tail, bin=k)
            out.append(best)
        return out

    def assemble(self, e, branches):
        """Largest M in [2, max_branches] whose strongest separated branches are meaningful."""
        ranked = sorted(branches, key=lambda b: (b.tail, -b.strength, b.bin))
        chosen = []
        for b in ranked:
            if all(_separated(b, c, self.cfg.tau) for c in chosen):
                chosen.append(b)
        for M in range(min(self.cfg.max_branches, len(chosen)), 1, -1):
            subset = chosen[:M]
            tests = number_of_tests(self.nfa_cfg, M)
            value = tests * max(b.tail for b in subset)
            if value <= self.cfg.epsilon:
                out = []
                for b in sorted(subset, key=lambda b: b.theta):
                    out.append(Branch(r=b.r, theta=b.theta, strength=b.strength, J=b.J,
                                      tail=b.tail, nfa=tests * b.tail, bin=b.bin))
                return Junction(x=e.x, y=e.y, t=e.t, branches=out,
                                strength=min(b.strength for b in out), nfa=value)
        return None

    def detect(self, e, gsae):
        """Run the full test on event `e`, already applied to `gsae`.

        Returns a Junction or None.
        """
        self.invocations += 1
        profiles = self.profiles(self.fields(gsae, (e.x, e.y)))
        return self.assemble(e, self.candidate_branches(profiles))


def detect(e, gsae, cfg=None, tables=None):
    """Functional form of `Detector.detect`.

    `tables` is required: building them takes seconds, so precompute once with
    `precompute_tail_tables` (or take `Detector.table`) and pass them on every call.
    """
    if tables is None:
        raise ConfigError("detect() needs precomputed tail tables, see precompute_tail_tables")
    return Detector(cfg, tables, gsae.width, gsae.height).detect(e, gsae)



###
#
# spatiotemporal refinement
#
###


@dataclass
class RefineResult:
    accepted: bool
    suppressed: list
    finalized: list


def refine(j, recent, r_d=5.0, T=0.005):
    """Apply the refinement rule to junction `j` against the `recent` buffer (a deque, time sorted).

    Among junctions within distance r_d and |dt| <= T of each other only the one
    with the smallest NFA survives; on equal NFA the earlier one stays. Entries
    older than j.t - T leave the buffer as finalized output.
    """
    finalized = []
    while recent and recent[0].t < j.t - T:
        finalized.append(recent.popleft())
    conflicts = [b for b in recent if abs(b.t - j.t) <= T and b.distance_to(j) <= r_d]
    if any(b.nfa <= j.nfa for b in conflicts):
        return RefineResult(accepted=False, suppressed=[], finalized=finalized)
    for b in conflicts:
        recent.remove(b)
    recent.append(j)
    return RefineResult(accepted=True, suppressed=conflicts, finalized=finalized)


class JunctionRefiner(object):
    """Serial refinement stage. Junctions must arrive in timestamp order.

    Example
    -------
    >>> refiner = JunctionRefiner()
    >>> out = []
    >>> for j in junctions:
    ...     out.extend(refiner.refine(j).finalized)
    >>> out.extend(refiner.flush())
    """

    def __init__(self, cfg=None):
        self.cfg = (cfg or RefineConfig()).validate()
        self.buffer = deque()
        self.suppressed = 0
        self.rejected = 0

    def refine(self, j):
        result = refine(j, self.buffer, self.cfg.r_d, self.cfg.T)
        self.suppressed += len(result.suppressed)
        if not result.accepted:
            self.rejected += 1
        return result

    def flush(self):
        out = list(self.buffer)
        self.buffer.clear()
        return out



###
#
# junction records
#
###


def format_junction(j):
    """One line "t x y nfa M r1 theta1 ... rM thetaM", angles with 6 decimals."""
    head = "%.9f %d %d %.6e %d" % (j.t, j.x, j.y, j.nfa, j.M)
    return head + "".join(" %d %.6f" % (b.r, b.theta) for b in j.branches)


def parse_junction(line, lineno=None):
    """Inverse of `format_junction`. Branch strengths are not stored and read back as nan."""
    fields = line.split()
    try:
        t, x, y, value, M = float(fields[0]), int(fields[1]), int(fields[2]), float(fields[3]), int(fields[4])
        if len(fields) != 5 + 2 * M:
            raise ValueError(f"expected {M} (r, theta) pairs")
        branches = []
        for i in range(M):
            r, theta = int(fields[5 + 2 * i]), float(fields[6 + 2 * i])
            branches.append(Branch(r=r, theta=theta % TWO_PI, strength=float("nan"), J=0,
                                   tail=float("nan")))
    except (ValueError, IndexError) as e:
        raise EventParseError(f"bad junction record '{line.strip()}' ({e})", lineno)
    return Junction(x=x, y=y, t=t, branches=branches, strength=float("nan"), nfa=value)


def write_junctions(fpath, junctions):
    n = 0
    with open(fpath, "w", encoding="utf-8") as f:
        for j in junctions:
            f.write(format_junction(j) + "\n")
            n += 1
    return n


def read_junctions(fpath):
    out = []
    with open(fpath, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if line.strip() and not line.lstrip().startswith("#"):
                try:
                    out.append(parse_junction(line, lineno))
                except EventParseError as e:
                    raise EventParseError(e.reason, lineno, fpath)
    return out

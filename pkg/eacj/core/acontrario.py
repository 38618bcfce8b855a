"""
a-contrario statistics for junction branches.

Under the noise model every pixel of a sector contributes an alignment value
``gamma`` which is 0 with probability 1 - p/2 and otherwise follows the
density 4 / (pi * sqrt(2 - z^2)) on [0, 1]. A branch strength ``omega`` is the
sum of J such values. This module computes the tail F(t; J) = P(omega >= t),
the number of tests and the resulting NFA, and estimates p from event data.

The point mass at zero is handled exactly: F is a Binomial(J, p/2) mixture over
the number of nonzero summands, and only the continuous part is convolved on a
uniform grid.

Public API
----------
`gamma_density(p, step) -> GammaDensity`
`tail_probability(t, J, density) -> float`
`precompute_tail_tables(p, j_values, step) -> TailTable`
`number_of_tests(cfg, M) -> float`
`nfa(t, J, M, table, cfg) -> float`
`estimate_p(events, gsae) -> float`
"""

import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import binom
from tqdm import tqdm

from .errors import ParameterError, RangeError
from .events import GSAE
from .patches import binarize, gradient_field, gradient_fraction
from ..utils.misc_utils import printDebug

__all__ = [
    "DEFAULT_P",
    "DEFAULT_STEP",
    "GammaDensity",
    "TailTable",
    "NfaConfig",
    "PEstimate",
    "gamma_density",
    "gamma_pdf",
    "closed_form_tail",
    "tail_probability",
    "precompute_tail_tables",
    "number_of_tests",
    "nfa",
    "sample_strength",
    "estimate_p",
    "estimate_p_datasets",
    "save_tail_table",
    "load_tail_table",
    "cached_tail_table",
]


DEFAULT_P = 0.21
DEFAULT_STEP = 1.0 / 512
DEFAULT_MIXTURE_TOL = 1e-12

MAX_J = 400
# mixture terms up to this many nonzero summands are always kept
EXACT_MIXTURE_TERMS = 64

TABLE_FORMAT_VERSION = 1



# ----------------------------------------------------------------------
# density of the alignment value
# ----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GammaDensity:
    """Point mass at zero plus a continuous part sampled on [0, 1].

    `masses[i]` is the continuous probability of the bin [i*step, (i+1)*step),
    `density[i]` the continuous density at the bin center `grid[i]`.
    """
    p: float
    step: float
    atom: float
    grid: np.ndarray
    density: np.ndarray
    masses: np.ndarray

    @property
    def continuous_mass(self):
        return float(self.masses.sum())

    @property
    def total_mass(self):
        return self.atom + self.continuous_mass

    def __repr__(self):
        return "<eacj.GammaDensity object #%s. p: %g. Step: %g. Atom: %g>" % (
            str(id(self)), self.p, self.step, self.atom)


def _check_p(p):
    if not (0.0 < p < 1.0):
        raise ParameterError(f"p must lie in (0, 1), got {p}")


def _grid_size(step):
    if not (0.0 < step <= 1e-2):
        raise ParameterError(f"Grid step must lie in (0, 0.01], got {step}")
    n = int(round(1.0 / step))
    if abs(n * step - 1.0) > 1e-9:
        raise ParameterError(f"Grid step {step} does not divide [0, 1]")
    return n


def gamma_pdf(z, p):
    """Continuous part of the alignment density, 2p / (pi * sqrt(2 - z^2)) on [0, 1]."""
    z = np.asarray(z, dtype=np.float64)
    inside = (z >= 0.0) & (z <= 1.0)
    out = np.zeros_like(z)
    out[inside] = 2.0 * p / (np.pi * np.sqrt(2.0 - z[inside] ** 2))
    return out


def _unit_cdf(z):
    """CDF of the nonzero alignment values: (4/pi) * arcsin(z / sqrt(2))."""
    return (4.0 / np.pi) * np.arcsin(np.asarray(z) / np.sqrt(2.0))


def gamma_density(p=DEFAULT_P, step=DEFAULT_STEP):
    """Build the alignment value density for the Bernoulli parameter `p`.

    Parameters
    ----------
    p: float
        Probability that a pixel has a nonzero gradient, in (0, 1). Default 0.21.
    step: float
        Grid step over [0, 1], at most 0.01. Default 1/512.

    Returns
    -------
    GammaDensity
        The atom mass is 1 - p/2; the continuous masses sum to p/2.

    Example
    -------
    >>> d = gamma_density(0.21)
    >>> d.atom
    0.895
    """
    _check_p(p)
    n = _grid_size(step)
    edges = np.linspace(0.0, 1.0, n + 1)
    masses = 0.5 * p * np.diff(_unit_cdf(edges))
    grid = 0.5 * (edges[:-1] + edges[1:])
    return GammaDensity(p=float(p), step=float(step), atom=1.0 - 0.5 * p,
                        grid=grid, density=gamma_pdf(grid, p), masses=masses)


def closed_form_tail(t, p):
    """P(gamma >= t) for a single sector pixel."""
    if t <= 0:
        return 1.0
    if t > 1:
        return 0.0
    return p * (0.5 - (2.0 / np.pi) * math.asin(t / math.sqrt(2.0)))



# ----------------------------------------------------------------------
# tails of sums of nonzero summands
# ----------------------------------------------------------------------

# step => {"pmf": last k-fold pmf, "curves": [None, (knots, survival), ...]}
_SURVIVAL_CACHE = {}


def _survival_curves(step, k_max):
    """Survival curves of the sum of k nonzero summands, k = 1..k_max.

    The k-fold pmf lives on bin-index sums m; its mass is spread uniformly over
    [(m + k/2 - 1/2) * step, (m + k/2 + 1/2) * step], so the survival function
    is piecewise linear with knots at those bounds. Curves depend on the grid
    step only, not on p.
    """
    entry = _SURVIVAL_CACHE.get(step)
    if entry is None:
        n = _grid_size(step)
        edges = np.linspace(0.0, 1.0, n + 1)
        entry = {"unit": np.diff(_unit_cdf(edges)), "pmf": np.array([1.0]), "curves": [None]}
        _SURVIVAL_CACHE[step] = entry
    curves = entry["curves"]
    while len(curves) <= k_max:
        k = len(curves)
        pmf = np.convolve(entry["pmf"], entry["unit"])
        entry["pmf"] = pmf
        knots = (np.arange(pmf.size + 1) + 0.5 * k - 0.5) * step
        survival = np.zeros(pmf.size + 1)
        survival[:-1] = np.cumsum(pmf[::-1])[::-1]
        curves.append((knots, np.minimum(survival, 1.0)))
    return curves


def _mixture_weights(J, p, tol):
    """Binomial(J, p/2) weights of the number of nonzero summands, truncated."""
    q = 0.5 * p
    k_max = J
    if J > EXACT_MIXTURE_TERMS:
        k_max = min(J, max(EXACT_MIXTURE_TERMS, int(binom.isf(tol, J, q)) + 1))
    return binom.pmf(np.arange(k_max + 1), J, q)


def _continuous_tail(t, J, p, step, tol):
    """Sum over k >= 1 of weight(k) * P(sum of k nonzero summands >= t)."""
    weights = _mixture_weights(J, p, tol)
    curves = _survival_curves(step, len(weights) - 1)
    t = np.asarray(t, dtype=np.float64)
    acc = np.zeros_like(t)
    for k in range(1, len(weights)):
        knots, survival = curves[k]
        acc = acc + weights[k] * np.interp(t, knots, survival, left=1.0, right=0.0)
    return acc


def _check_j(J, max_j=MAX_J):
    if int(J) != J or J < 1:
        raise ParameterError(f"Sector size J must be a positive integer, got {J}")
    if J > max_j:
        raise RangeError(f"Sector size J={J} exceeds the supported range (J <= {max_j})")
    return int(J)


def tail_probability(t, J, density, tol=DEFAULT_MIXTURE_TOL):
    """F(t; J) = P(omega >= t) for a sector of J pixels under the noise model.

    Parameters
    ----------
    t: float
        Branch strength, >= 0.
    J: int
        Sector size, 1 <= J <= 400.
    density: GammaDensity
        Provides p and the grid step.
    tol: float
        Binomial mass below which mixture terms beyond 64 nonzero summands are dropped.

    Returns
    -------
    float
        Tail probability in [0, 1]. 1 at t = 0, 0 for t > J.

    Example
    -------
    >>> d = gamma_density(0.21)
    >>> round(tail_probability(0.5, 1, d), 4)
    0.0567
    """
    J = _check_j(J)
    if t < 0:
        raise ParameterError(f"Strength must be non-negative, got {t}")
    if t == 0:
        return 1.0
    if t > J:
        return 0.0
    value = _continuous_tail(t, J, density.p, density.step, tol)
    return float(min(max(value, 0.0), 1.0))



@dataclass(eq=False)
class TailTable:
    """Precomputed F(t; J) on the grid t = 0, step, ..., J for a set of sector sizes.

    `tails[J]` holds the tail at every grid point; lookups interpolate
    linearly and clamp to [0, 1]. Tables are not modified after construction.
    """
    p: float
    step: float
    j_values: tuple
    tails: dict = field(default_factory=dict)

    def __repr__(self):
        return "<eacj.TailTable object #%s. p: %g. Step: %g. J: %d..%d>" % (
            str(id(self)), self.p, self.step, min(self.j_values), max(self.j_values))

    @property
    def max_j(self):
        return max(self.j_values)

    def grid(self, J):
        return np.arange(len(self.tails[J])) * self.step

    def covers(self, j_values):
        return set(j_values) <= set(self.j_values)

    def lookup(self, t, J):
        """Interpolated F(t; J). Raises RangeError when J is not in the table."""
        if J not in self.tails:
            raise RangeError(f"Sector size J={J} not covered by the tail table")
        if t <= 0:
            return 1.0
        if t > J:
            return 0.0
        values = self.tails[J]
        pos = t / self.step
        m = int(pos)
        if m >= len(values) - 1:
            return float(values[-1])
        w = pos - m
        value = values[m] * (1.0 - w) + values[m + 1] * w
        return float(min(max(value, 0.0), 1.0))


def precompute_tail_tables(p, j_values, step=DEFAULT_STEP, tol=DEFAULT_MIXTURE_TOL, verbose=False):
    """Tabulate F(t; J) for every J in `j_values` on a grid of `step`.

    Grid values equal `tail_probability` at the same t.
    """
    _check_p(p)
    _grid_size(step)
    j_values = tuple(sorted(set(_check_j(J) for J in j_values)))
    if not j_values:
        raise ParameterError("No sector sizes to tabulate")
    tails = {}
    for J in tqdm(j_values, disable=not verbose, desc="tail tables"):
        grid = np.arange(int(round(J / step)) + 1) * step
        values = _continuous_tail(grid, J, p, step, tol)
        values[0] = 1.0
        tails[J] = np.clip(values, 0.0, 1.0)
    return TailTable(p=float(p), step=float(step), j_values=j_values, tails=tails)



def save_tail_table(table, fpath):
    """Serialize a table to a numpy `.npz` file with its (p, step, J range) key."""
    arrays = {"tail_%d" % J: table.tails[J] for J in table.j_values}
    np.savez_compressed(fpath, version=np.array(TABLE_FORMAT_VERSION), p=np.array(table.p),
                        step=np.array(table.step), j_values=np.array(table.j_values, dtype=np.int64),
                        **arrays)
    return fpath


def load_tail_table(fpath):
    """Load a table saved with `save_tail_table`. Raises RangeError on a version mismatch."""
    with np.load(fpath) as data:
        version = int(data["version"])
        if version != TABLE_FORMAT_VERSION:
            raise RangeError(f"Tail cache {fpath} has format version {version}, expected {TABLE_FORMAT_VERSION}")
        j_values = tuple(int(J) for J in data["j_values"])
        tails = {J: np.array(data["tail_%d" % J]) for J in j_values}
        return TailTable(p=float(data["p"]), step=float(data["step"]), j_values=j_values, tails=tails)


def cached_tail_table(fpath, p, j_values, step=DEFAULT_STEP, tol=DEFAULT_MIXTURE_TOL, verbose=False):
    """Load the table at `fpath` if its key matches, else compute it and save it there."""
    if fpath and os.path.exists(fpath):
        try:
            table = load_tail_table(fpath)
        except (OSError, KeyError, ValueError) as e:
            printDebug(f"Ignoring unreadable tail cache `{fpath}` ({e})", "comment")
        else:
            if table.p == p and table.step == step and table.covers(j_values):
                if verbose:
                    printDebug(f"Loaded tail tables from `{fpath}`", "comment")
                return table
            if verbose:
                printDebug(f"Tail cache `{fpath}` does not match p={p}, step={step}: recomputing", "comment")
    table = precompute_tail_tables(p, j_values, step, tol, verbose)
    if fpath:
        save_tail_table(table, fpath)
        if verbose:
            printDebug(f"Saved tail tables to `{fpath}`", "comment")
    return table



# ----------------------------------------------------------------------
# number of tests and NFA
# ----------------------------------------------------------------------

@dataclass
class NfaConfig:
    epsilon: float = 1.0
    area: int = 240 * 180
    scale_count: int = 13
    orientation_count: int = 64
    max_branches: int = 4

    def validate(self):
        if not self.epsilon > 0:
            raise ParameterError(f"epsilon must be positive, got {self.epsilon}")
        for name in ("area", "scale_count", "orientation_count", "max_branches"):
            if getattr(self, name) < 1:
                raise ParameterError(f"{name} must be at least 1, got {getattr(self, name)}")
        return self


def number_of_tests(cfg, M):
    """Number of junctions with M branches that could be tested in one image.

    area x scale count x C(orientation count, M)

    Example
    -------
    >>> number_of_tests(NfaConfig(area=43200, scale_count=13, orientation_count=64), 2)
    1132185600.0
    """
    if M < 1 or M > cfg.max_branches:
        raise ParameterError(f"Branch count M={M} outside [1, {cfg.max_branches}]")
    if M > cfg.orientation_count:
        raise ParameterError(f"Branch count M={M} exceeds the orientation count {cfg.orientation_count}")
    return float(cfg.area * cfg.scale_count * math.comb(cfg.orientation_count, M))


def nfa(t, J, M, table, cfg):
    """NFA = number_of_tests(M) * F(t; J). Meaningful when <= cfg.epsilon."""
    return number_of_tests(cfg, M) * table.lookup(t, J)



# ----------------------------------------------------------------------
# Monte Carlo oracle
# ----------------------------------------------------------------------

def sample_strength(J, p, size, seed=None, chunk=100000):
    """Draw `size` branch strengths omega for a sector of J pixels under the noise model.

    Nonzero alignment values are sampled by inverting their CDF:
    z = sqrt(2) * sin(pi * u / 4).
    """
    _check_p(p)
    rng = np.random.default_rng(seed)
    out = np.empty(size, dtype=np.float64)
    for start in range(0, size, chunk):
        n = min(chunk, size - start)
        counts = rng.binomial(J, 0.5 * p, size=n)
        values = np.sqrt(2.0) * np.sin(0.25 * np.pi * rng.random(int(counts.sum())))
        owner = np.repeat(np.arange(n), counts)
        out[start:start + n] = np.bincount(owner, weights=values, minlength=n)
    return out



# ----------------------------------------------------------------------
# estimation of p
# ----------------------------------------------------------------------

@dataclass
class PEstimate:
    """Per-dataset mean gradient fractions and the selected (largest) p."""
    per_dataset: dict
    selected: float

    def __repr__(self):
        return "<eacj.PEstimate object #%s. Datasets: %d. Selected p: %.4f>" % (
            str(id(self)), len(self.per_dataset), self.selected)


def estimate_p(events, gsae=None, radius=15, sample_every=1, binarize_factor=1.0, verbose=False):
    """Mean fraction of interior pixels with a nonzero gradient in binarized patches.

    Events are replayed into `gsae` (a fresh 240x180 surface by default); every
    `sample_every`-th event has its radius-15 patch binarized and passed through
    the Sobel operator.

    Raises ParameterError on an empty sample.
    """
    if gsae is None:
        gsae = GSAE()
    total, count = 0.0, 0
    for i, e in enumerate(tqdm(events, disable=not verbose, desc="estimating p")):
        gsae.update(e)
        if i % sample_every:
            continue
        patch = gsae.extract_patch((e.x, e.y), radius)
        total += gradient_fraction(gradient_field(binarize(patch, binarize_factor)))
        count += 1
    if count == 0:
        raise ParameterError("Cannot estimate p from an empty event sample")
    return total / count


def estimate_p_datasets(streams, **kwargs):
    """Estimate p on several datasets and select the largest mean.

    Parameters
    ----------
    streams: dict
        Dataset name => iterable of events. Each dataset gets its own surface,
        sized by the `width` / `height` keywords when given.

    Returns
    -------
    PEstimate
    """
    width = kwargs.pop("width", None)
    height = kwargs.pop("height", None)
    if not streams:
        raise ParameterError("No datasets given")
    per_dataset = {}
    for name, events in streams.items():
        gsae = GSAE(width, height) if width and height else GSAE()
        per_dataset[name] = estimate_p(events, gsae, **kwargs)
    return PEstimate(per_dataset=per_dataset, selected=max(per_dataset.values()))

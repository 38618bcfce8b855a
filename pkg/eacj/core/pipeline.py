"""
The detection pipeline: G-SAE update, candidate filter, detector, refinement.

Events are processed strictly in timestamp order by a single loop; the
refinement stage releases junctions once no later detection can suppress them.

>>> from eacj.core.config import load_config
>>> from eacj.core.pipeline import run
>>> cfg = load_config()
>>> cfg.scene_path = "x.scene"
>>> report = run(cfg)
>>> report.detections

"""

from dataclasses import dataclass, field, replace

from tqdm import tqdm

from .acontrario import estimate_p
from .arcfilter import ArcFilter
from .detector import Detector, JunctionRefiner, write_junctions
from .errors import ConfigError, ParameterError
from .events import GSAE, read_events
from .overlay import write_overlay
from .synth import generate, read_scene
from ..utils.misc_utils import printDebug, stopwatch


STAGES = ("ingest", "filter", "detect", "refine")



@dataclass
class RunReport:
    """Counts and per-stage wall clock (seconds) of one pipeline run.

    `junctions` holds the refined output, `raw` every detection before refinement.
    """
    events: int = 0
    candidates: int = 0
    detections: int = 0
    accepted: int = 0
    suppressed: int = 0
    rejected: int = 0
    invocations: int = 0
    prefilter: bool = True
    p: float = None
    timings: dict = field(default_factory=dict)
    junctions: list = field(default_factory=list)
    raw: list = field(default_factory=list)

    def __repr__(self):
        return "<eacj.RunReport object #%s. Events: %d. Candidates: %d. Detections: %d. Accepted: %d>" % (
            str(id(self)), self.events, self.candidates, self.detections, self.accepted)

    @property
    def total_seconds(self):
        return sum(self.timings.values())

    def summary(self):
        lines = ["events      : %d" % self.events,
                 "candidates  : %d" % self.candidates,
                 "detections  : %d" % self.detections,
                 "accepted    : %d" % self.accepted,
                 "prefilter   : %s" % ("on" if self.prefilter else "off"),
                 "p           : %s" % ("-" if self.p is None else "%.4f" % self.p)]
        for stage in STAGES:
            lines.append("%-12s: %.3fs" % (stage, self.timings.get(stage, 0.0)))
        return "\n".join(lines)


@dataclass
class SpeedupReport:
    with_filter: RunReport
    without_filter: RunReport

    @property
    def invocation_ratio(self):
        """Full-detector invocations with the filter over invocations without it."""
        if not self.without_filter.invocations:
            return None
        return self.with_filter.invocations / self.without_filter.invocations

    @property
    def wallclock_ratio(self):
        """Wall clock without the filter over wall clock with it (the speed-up)."""
        if not self.with_filter.total_seconds:
            return None
        return self.without_filter.total_seconds / self.with_filter.total_seconds

    def summary(self):
        inv = self.invocation_ratio
        wall = self.wallclock_ratio
        return "\n".join([
            "detector invocations : %d (filter on) / %d (filter off)" % (
                self.with_filter.invocations, self.without_filter.invocations),
            "invocation ratio     : %s" % ("undefined" if inv is None else "%.3f" % inv),
            "wall clock           : %.3fs (filter on) / %.3fs (filter off)" % (
                self.with_filter.total_seconds, self.without_filter.total_seconds),
            "speed-up             : %s" % ("undefined" if wall is None else "%.2fx" % wall),
            "(wall clock figures depend on the hardware)",
        ])



def load_events(config, verbose=False):
    """Events of the configured input: an event file or a synthetic scene."""
    if config.events_path:
        if verbose:
            printDebug(f"Reading events from `{config.events_path}`", "comment")
        return read_events(config.events_path, config.width, config.height)
    if config.scene_path:
        if verbose:
            printDebug(f"Rendering scene `{config.scene_path}`", "comment")
        scene = read_scene(config.scene_path)
        if (scene.width, scene.height) != (config.width, config.height):
            raise ConfigError(f"Scene size {scene.width}x{scene.height} does not match the sensor "
                              f"{config.width}x{config.height}")
        events, _ = generate(scene, verbose)
        return events
    raise ConfigError("No input: set an event file or a scene file")


def resolve_p(config, events, verbose=False):
    """Gradient probability of a run.

    The configured `acj.p` is a floor: when `acj.estimate_p` is on, it is
    raised to the mean gradient fraction measured on the stream itself.
    `events` must be a sequence, it is replayed on a scratch surface.
    """
    p = config.detector.p
    if not config.estimate_p or not events:
        return p
    sample = estimate_p(events, GSAE(config.width, config.height), sample_every=config.p_sample_every,
                        binarize_factor=config.detector.binarize_factor, verbose=verbose)
    if verbose:
        printDebug("Stream gradient fraction: %.4f (floor %.4f)" % (sample, p), "comment")
    return max(sample, p)


def make_detector(config, p=None, verbose=False):
    detector_cfg = config.detector if p is None else replace(config.detector, p=p)
    return Detector(detector_cfg, width=config.width, height=config.height,
                    tail_cache=config.tail_cache, verbose=verbose)


def run(config, events=None, detector=None, verbose=False):
    """Process a whole stream and write the configured outputs.

    Parameters
    ----------
    config: PipelineConfig
        Validated before any event is processed.
    events: iterable of Event, optional
        Overrides the configured input.
    detector: Detector, optional
        Reuse a detector (and its tail tables) across runs. Its invocation
        counter is reset and p is not estimated again.
    verbose: bool

    Returns
    -------
    RunReport
    """
    config.validate()
    if events is None:
        events = load_events(config, verbose)
    if detector is None:
        if config.estimate_p:
            events = list(events)
        detector = make_detector(config, resolve_p(config, events, verbose), verbose)
    detector.invocations = 0

    gsae = GSAE(config.width, config.height)
    arcs = ArcFilter(config.filter) if config.prefilter else None
    refiner = JunctionRefiner(config.refine)
    report = RunReport(prefilter=config.prefilter, p=detector.cfg.p, timings={s: 0.0 for s in STAGES})
    timings = report.timings
    out = report.junctions
    last_t = None

    for e in tqdm(events, disable=not verbose, desc="events"):
        if last_t is not None and e.t < last_t:
            raise ParameterError(f"Events must arrive in timestamp order: {e.t} after {last_t}")
        last_t = e.t
        report.events += 1
        with stopwatch(timings, "ingest"):
            gsae.update(e)
        if arcs is not None:
            with stopwatch(timings, "filter"):
                keep = arcs.check(gsae, e)
            if not keep:
                continue
        report.candidates += 1
        with stopwatch(timings, "detect"):
            j = detector.detect(e, gsae)
        if j is None:
            continue
        report.detections += 1
        report.raw.append(j)
        with stopwatch(timings, "refine"):
            out.extend(refiner.refine(j).finalized)

    with stopwatch(timings, "refine"):
        out.extend(refiner.flush())
    out.sort(key=lambda j: j.t)
    report.accepted = len(out)
    report.suppressed = refiner.suppressed
    report.rejected = refiner.rejected
    report.invocations = detector.invocations

    if config.out_path:
        write_junctions(config.out_path, out)
        if verbose:
            printDebug(f"Saved {len(out)} junctions to `{config.out_path}`", "green")
    if config.overlay_path:
        t_end = out[-1].t if out else last_t
        background = gsae.window_mask(t_end, config.overlay_window) if t_end is not None else None
        write_overlay(out, config.overlay_window, config.width, config.height,
                      config.overlay_path, t_end=t_end, background=background)
        if verbose:
            printDebug(f"Saved overlay to `{config.overlay_path}`", "green")
    return report


def speedup_report(config, events=None, verbose=False):
    """Run the same input with and without the candidate filter and compare.

    Output paths of `config` are not written.
    """
    if events is None:
        events = list(load_events(config, verbose))
    else:
        events = list(events)
    base = replace(config, out_path=None, overlay_path=None)
    detector = make_detector(base, resolve_p(base, events, verbose), verbose)
    on = run(replace(base, prefilter=True), events, detector, verbose)
    off = run(replace(base, prefilter=False), events, detector, verbose)
    return SpeedupReport(with_filter=on, without_filter=off)

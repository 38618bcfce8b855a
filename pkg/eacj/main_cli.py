#!/usr/bin/python
# -*- coding: utf-8 -*-

import os
import sys
import click

from .VERSION import *
from .VERSION import __version__

from .core.acontrario import estimate_p_datasets
from .core.config import load_config, format_config, USER_CONFIG_FILE_PATH
from .core.dataframe_factory import DfFactory
from .core.detector import read_junctions
from .core.errors import EacjError
from .core.evaluation import TrackFile, evaluate as evaluate_junctions, format_report
from .core.events import read_events, write_events
from .core.pipeline import run, speedup_report
from .core.synth import generate, read_scene, write_truth, x_junction_scene
from .utils.misc_utils import printDebug, printInfo, save2Path


CONTEXT_SETTINGS = dict(help_option_names=['-h', '--help'])


def _fail(e):
    printDebug(str(e), "red")
    sys.exit(1)


def _pipeline_config(config, events, scene, verbose):
    if events and scene:
        raise click.UsageError("Use either --events or --scene, not both.")
    cfg = load_config(config, verbose=verbose)
    cfg.events_path = events or None
    cfg.scene_path = scene or None
    if not (cfg.events_path or cfg.scene_path):
        raise click.UsageError("An input is required: --events or --scene.")
    return cfg



@click.group(context_settings=CONTEXT_SETTINGS)
@click.version_option(__version__, "--version", "-v")
def main_cli():
    """
    eacj - event-based a-contrario junction detection.
    """
    pass



@main_cli.command(context_settings=CONTEXT_SETTINGS)
@click.option("--config", "config", type=click.Path(), help="Settings file (default: eacj.cfg lookup).")
@click.option("--events", type=click.Path(), help="Event text file, one 't x y p' per line.")
@click.option("--scene", type=click.Path(), help="Synthetic scene file rendered on the fly.")
@click.option("--out", required=True, type=click.Path(), help="Output junction file.")
@click.option("--no-prefilter", is_flag=True, help="Run the full detector on every event.")
@click.option("--overlay", type=click.Path(), help="Write a PGM overlay of the last window.")
@click.option("--tail-cache", type=click.Path(), help="Tail table cache (.npz), created when missing.")
@click.option("--report", type=click.Path(), help="Save the per-stage report as CSV.")
@click.option("--table", type=click.Path(), help="Save the junctions as CSV, one row per junction.")
@click.option("--branches", type=click.Path(), help="Save the junctions as CSV, one row per branch.")
@click.option("--verbose", is_flag=True, help="Progress bars and diagnostics.")
def detect(config, events, scene, out, no_prefilter, overlay, tail_cache, report, table, branches, verbose):
    """Detect junctions in an event stream."""
    click.secho("eacj (" + VERSION + ")", dim=True, err=True)
    try:
        cfg = _pipeline_config(config, events, scene, verbose)
        cfg.out_path = out
        cfg.overlay_path = overlay
        cfg.tail_cache = tail_cache or cfg.tail_cache
        if no_prefilter:
            cfg.prefilter = False
        result = run(cfg, verbose=verbose)
    except (EacjError, OSError) as e:
        _fail(e)
    printInfo(result.summary())
    if report:
        DfFactory().df_run_report(result).to_csv(report)
        printDebug(f"Saved report to `{report}`", "comment")
    if table:
        DfFactory().df_junctions(result.junctions).to_csv(table, index=False)
        printDebug(f"Saved {result.accepted} junctions to `{table}`", "comment")
    if branches:
        DfFactory().df_branches(result.junctions).to_csv(branches, index=False)
        printDebug(f"Saved branches to `{branches}`", "comment")



@main_cli.command(context_settings=CONTEXT_SETTINGS)
@click.option("--junctions", required=True, type=click.Path(), help="Junction file written by `detect`.")
@click.option("--tracks", required=True, type=click.Path(), help="Track file, 'track_id t x y' per line.")
@click.option("--report", required=True, type=click.Path(), help="Output metrics report.")
@click.option("--events", type=click.Path(), help="Event file, to label non-detected events (TN/FN).")
@click.option("--labels", type=click.Path(), help="Save per-item labels as CSV.")
@click.option("--metrics", type=click.Path(), help="Save counts, FPR and accuracy as CSV.")
def evaluate(junctions, tracks, report, events, labels, metrics):
    """Label detections against tracked junctions and compute FPR and accuracy."""
    try:
        found = read_junctions(junctions)
        track_file = TrackFile.from_file(tracks)
        stream = read_events(events) if events else None
        scene = os.path.splitext(os.path.basename(junctions))[0]
        result = evaluate_junctions(found, track_file, stream, scene=scene)
        text = format_report(result)
        save2Path(text, report)
    except (EacjError, OSError) as e:
        _fail(e)
    printInfo(text)
    if labels:
        DfFactory().df_labels(result).to_csv(labels, index=False)
    if metrics:
        DfFactory().df_metrics(result).to_csv(metrics, index=False)



@main_cli.command("estimate-p", context_settings=CONTEXT_SETTINGS)
@click.option("--events", required=True, multiple=True, type=click.Path(), help="Event file (repeatable).")
@click.option("--config", "config", type=click.Path(), help="Settings file, for the sensor size.")
@click.option("--sample-every", default=1, show_default=True, help="Use every n-th event.")
@click.option("--verbose", is_flag=True)
def estimate_p(events, config, sample_every, verbose):
    """Estimate the gradient probability p over one or more datasets (the largest mean wins)."""
    try:
        cfg = load_config(config, verbose=verbose)
        streams = {path: read_events(path, cfg.width, cfg.height) for path in events}
        estimate = estimate_p_datasets(streams, width=cfg.width, height=cfg.height,
                                       sample_every=sample_every,
                                       binarize_factor=cfg.detector.binarize_factor,
                                       verbose=verbose)
    except (EacjError, OSError) as e:
        _fail(e)
    for name, value in estimate.per_dataset.items():
        printInfo("%s\t%.6f" % (name, value))
    printInfo("selected p = %.6f" % estimate.selected, "important")



@main_cli.command(context_settings=CONTEXT_SETTINGS)
@click.option("--scene", type=click.Path(), help="Scene file (default: the bundled X junction scene).")
@click.option("--out-events", required=True, type=click.Path(), help="Output event file.")
@click.option("--out-truth", required=True, type=click.Path(), help="Output truth file.")
@click.option("--out-tracks", type=click.Path(), help="Also write the truth as a track file.")
@click.option("--verbose", is_flag=True)
def synth(scene, out_events, out_truth, out_tracks, verbose):
    """Render a synthetic scene into events and analytic ground truth."""
    try:
        spec = read_scene(scene) if scene else x_junction_scene()
        stream, truth = generate(spec, verbose)
        n = write_events(out_events, stream)
        write_truth(out_truth, truth)
        if out_tracks:
            TrackFile.from_truth(truth).to_file(out_tracks)
    except (EacjError, OSError) as e:
        _fail(e)
    printDebug(f"Saved {n} events to `{out_events}` and {len(truth)} truth records to `{out_truth}`", "green")



@main_cli.command(context_settings=CONTEXT_SETTINGS)
@click.option("--config", "config", type=click.Path(), help="Settings file (default: eacj.cfg lookup).")
@click.option("--events", type=click.Path(), help="Event text file.")
@click.option("--scene", type=click.Path(), help="Synthetic scene file.")
@click.option("--verbose", is_flag=True)
def speedup(config, events, scene, verbose):
    """Compare runs with and without the candidate filter."""
    try:
        cfg = _pipeline_config(config, events, scene, verbose)
        result = speedup_report(cfg, verbose=verbose)
    except (EacjError, OSError) as e:
        _fail(e)
    printInfo(result.summary())



@main_cli.command("config", context_settings=CONTEXT_SETTINGS)
@click.option("--config", "fpath", type=click.Path(), help="Settings file (default: eacj.cfg lookup).")
@click.option("--show", is_flag=True, help="Print the resolved settings.")
def config_cmd(fpath, show):
    """Show where settings come from and their resolved values."""
    try:
        cfg = load_config(fpath, verbose=False).validate()
    except (EacjError, OSError) as e:
        _fail(e)
    printDebug("Settings file: %s" % (cfg.source or "none, using defaults"), "comment")
    printDebug("User settings path: %s" % USER_CONFIG_FILE_PATH, "comment")
    if show:
        printInfo(format_config(cfg))



if __name__ == "__main__":
    main_cli()

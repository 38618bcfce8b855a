"""
eacj: event-based a-contrario junction detection.

The main objects are attached to the top level ``eacj`` module::

>>> import eacj
>>> events, truth = eacj.generate(eacj.x_junction_scene())
>>> detector = eacj.Detector()
>>> gsae = eacj.GSAE()
>>> for e in events:
...     gsae.update(e)
...     j = detector.detect(e, gsae)

"""

from .VERSION import __version__, VERSION

from .core.errors import (EacjError, EventParseError, BoundsError, GeometryError,
                          ConfigError, ParameterError, RangeError)
from .core.events import Event, GSAE, read_events, write_events, gsae_update, extract_patch
from .core.arcfilter import FilterConfig, ArcFilter, is_candidate
from .core.acontrario import (gamma_density, tail_probability, precompute_tail_tables,
                              number_of_tests, nfa, estimate_p, estimate_p_datasets)
from .core.detector import (DetectorConfig, RefineConfig, Detector, JunctionRefiner,
                            Junction, Branch, detect, refine, read_junctions, write_junctions)
from .core.synth import SceneSpec, JunctionTemplate, generate, truth_at, x_junction_scene
from .core.evaluation import TrackFile, evaluate, label_detection, label_non_detection, metrics
from .core.config import PipelineConfig, load_config
from .core.pipeline import run, speedup_report
from .core.overlay import write_overlay
from .utils.misc_utils import printDebug

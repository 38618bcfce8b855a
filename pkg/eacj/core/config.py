"""
eacj configuration files.

Settings are flat `section.key = value` lines, e.g.::

    # eacj.cfg
    sensor.width = 240
    sensor.height = 180
    filter.inner_arc = 3,6
    filter.method = junction
    acj.p = 0.21
    acj.estimate_p = yes
    acj.epsilon = 1
    refine.T = 0.005

Files with explicit ``[section]`` headers are accepted too (``[acj]`` followed
by ``p = 0.21``). When no file is passed, `eacj.cfg` is searched in the current
directory, then in ``~/.eacj/``, then in the parent directories.
"""

import configparser
import os
from dataclasses import dataclass, field, asdict

from .arcfilter import FilterConfig
from .detector import DetectorConfig, RefineConfig
from .errors import ConfigError
from .events import SENSOR_WIDTH, SENSOR_HEIGHT
from ..utils.misc_utils import walk_up, printDebug


USER_DIR = os.path.expanduser("~/.eacj/")
USER_CONFIG_FILE_NAME = "eacj.cfg"
USER_CONFIG_FILE_PATH = os.path.expanduser(USER_DIR + USER_CONFIG_FILE_NAME)

_FLAT_SECTION = "eacj"



@dataclass
class PipelineConfig:
    """Everything a pipeline run needs: sensor, stage configs, inputs and outputs."""
    width: int = SENSOR_WIDTH
    height: int = SENSOR_HEIGHT
    prefilter: bool = True
    filter: FilterConfig = field(default_factory=FilterConfig)
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    refine: RefineConfig = field(default_factory=RefineConfig)
    estimate_p: bool = True  # raise p to the stream's own gradient fraction
    p_sample_every: int = 25
    overlay_window: float = 0.05
    events_path: str = None
    scene_path: str = None
    out_path: str = None
    overlay_path: str = None
    tail_cache: str = None
    source: str = None  # config file the values came from

    def validate(self):
        if self.width < 1 or self.height < 1:
            raise ConfigError(f"Invalid sensor size {self.width}x{self.height}")
        if not self.overlay_window > 0:
            raise ConfigError(f"Overlay window must be positive, got {self.overlay_window}")
        if self.p_sample_every < 1:
            raise ConfigError(f"p_sample_every must be at least 1, got {self.p_sample_every}")
        for label, path in (("event file", self.events_path), ("scene file", self.scene_path)):
            if path and not os.path.exists(path):
                raise ConfigError(f"The {label} `{path}` does not exist")
        self.filter.validate()
        self.detector.validate()
        self.refine.validate()
        return self

    def as_dict(self):
        return asdict(self)



def _to_bool(value):
    v = value.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: '{value}'")


def _to_pair(value):
    parts = [p for p in value.strip().strip("[]()").replace(",", " ").split() if p]
    if len(parts) != 2:
        raise ValueError(f"expected two integers, got '{value}'")
    return (int(parts[0]), int(parts[1]))


def _to_word(value):
    return value.strip().lower()


def _to_float(value):
    v = value.strip()
    if "/" in v:
        num, den = v.split("/", 1)
        return float(num) / float(den)
    return float(v)


# key => (config part, attribute, parser)
KNOWN_KEYS = {
    "sensor.width": (None, "width", int),
    "sensor.height": (None, "height", int),
    "filter.enabled": (None, "prefilter", _to_bool),
    "filter.inner_radius": ("filter", "inner_radius", int),
    "filter.outer_radius": ("filter", "outer_radius", int),
    "filter.inner_arc": ("filter", "inner_arc", _to_pair),
    "filter.outer_arc": ("filter", "outer_arc", _to_pair),
    "filter.method": ("filter", "method", _to_word),
    "filter.recent_window": ("filter", "recent_window", _to_float),
    "acj.p": ("detector", "p", _to_float),
    "acj.estimate_p": (None, "estimate_p", _to_bool),
    "acj.p_sample_every": (None, "p_sample_every", int),
    "acj.epsilon": ("detector", "epsilon", _to_float),
    "acj.orientations": ("detector", "theta_bins", int),
    "acj.theta_bins": ("detector", "theta_bins", int),
    "acj.grid_step": ("detector", "grid_step", _to_float),
    "acj.tau": ("detector", "tau", _to_float),
    "acj.r_min": ("detector", "r_min", int),
    "acj.r_max": ("detector", "r_max", int),
    "acj.max_branches": ("detector", "max_branches", int),
    "acj.window": ("detector", "window", int),
    "acj.binarize_factor": ("detector", "binarize_factor", _to_float),
    "acj.mixture_tol": ("detector", "mixture_tol", _to_float),
    "refine.r_d": ("refine", "r_d", _to_float),
    "refine.t": ("refine", "T", _to_float),
    "output.overlay_window": (None, "overlay_window", _to_float),
}



def get_config_file():
    """Locate `eacj.cfg`: current directory, then the user folder, then parent folders.

    Returns None when no file is found.
    """
    if os.path.exists(os.path.join(os.getcwd(), USER_CONFIG_FILE_NAME)):
        return os.path.join(os.getcwd(), USER_CONFIG_FILE_NAME)
    elif os.path.exists(USER_CONFIG_FILE_PATH):
        return USER_CONFIG_FILE_PATH
    else:
        for c, d, f in walk_up(os.getcwd()):
            if USER_CONFIG_FILE_NAME in f:
                return os.path.join(c, USER_CONFIG_FILE_NAME)
    return None


def parse_flat_text(text, source="<string>"):
    """Parse `section.key = value` text into a dict with lower-case dotted keys."""
    config = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    stripped = text.lstrip()
    if not stripped.startswith("["):
        text = "[%s]\n%s" % (_FLAT_SECTION, text)
    try:
        config.read_string(text, source=source)
    except configparser.Error as e:
        raise ConfigError(f"Cannot parse config file `{source}`: {e}")
    values = {}
    for section in config.sections():
        for key, value in config.items(section, raw=True):
            dotted = key if section == _FLAT_SECTION else "%s.%s" % (section, key)
            values[dotted.lower()] = value
    return values


def read_flat_file(fpath):
    """Read a `section.key = value` file into a dict."""
    try:
        with open(fpath, "r", encoding="utf-8") as f:
            return parse_flat_text(f.read(), source=fpath)
    except OSError as e:
        raise ConfigError(f"Cannot read config file `{fpath}`: {e}")


def apply_values(cfg, values, source="<string>", verbose=True):
    """Set the recognized keys of `values` on a PipelineConfig. Unknown keys are reported and skipped."""
    for key, value in values.items():
        if key not in KNOWN_KEYS:
            if verbose:
                printDebug(f"Warning: unknown setting '{key}' in `{source}` ignored.", "comment")
            continue
        part, attr, parse = KNOWN_KEYS[key]
        try:
            parsed = parse(value)
        except ValueError as e:
            raise ConfigError(f"Invalid value for '{key}' in `{source}`: {e}")
        target = cfg if part is None else getattr(cfg, part)
        setattr(target, attr, parsed)
    return cfg


def load_config(fpath=None, search=True, verbose=True):
    """Build a PipelineConfig from a config file (or the defaults).

    Parameters
    ----------
    fpath: str, optional
        Explicit config file. When missing, `get_config_file` is used if `search` is True.
    search: bool
        Look for `eacj.cfg` in the default locations. Default: True.
    verbose: bool
        Report the file used and unknown keys. Default: True.

    Returns
    -------
    PipelineConfig
        Not yet validated: inputs and outputs are added by the caller.
    """
    cfg = PipelineConfig()
    if not fpath and search:
        fpath = get_config_file()
    if fpath:
        if not os.path.exists(fpath):
            raise ConfigError(f"Config file `{fpath}` not found")
        if verbose:
            printDebug(f"Using settings from `{fpath}`", "comment")
        apply_values(cfg, read_flat_file(fpath), fpath, verbose)
        cfg.source = fpath
    return cfg


def format_config(cfg):
    """Render the resolved settings as `section.key = value` lines."""
    lines = []
    for key, (part, attr, parse) in KNOWN_KEYS.items():
        if key in ("acj.orientations",):
            continue
        target = cfg if part is None else getattr(cfg, part)
        value = getattr(target, attr)
        if value is None:
            continue
        if isinstance(value, tuple):
            value = "%d,%d" % value
        lines.append("%s = %s" % (key if key != "refine.t" else "refine.T", value))
    return "\n".join(lines)

"""
eacj general purpose utilities for console output and files.
NOTE: these functions are attached to the top level ``eacj.utils`` module. So you can import them as follows:

>>> from eacj.utils import *

"""

import click
import os
import time
from contextlib import contextmanager



def save2File(contents, filename, path):
    """Save string contents to a file, creating the parent folder if it doesn't exist.

    Parameters
    ----------
    contents: str
        File contents
    filename: str
        Name of the file.
    path: str
        Folder where the file is saved. If not existing, it gets created. An
        empty string means the current directory.

    Returns
    -------
    str
        The file path with format  "file://..."

    """
    if path and not os.path.exists(path):
        os.makedirs(path)
    filename = os.path.abspath(os.path.join(path, filename))
    with open(filename, 'wb') as f:
        f.write(contents.encode())
    url = "file://" + filename
    return url


def save2Path(contents, fpath):
    """Same as `save2File` but taking a single file path."""
    folder, filename = os.path.split(fpath)
    return save2File(contents, filename, folder)



def walk_up(bottom):
    """Mimic os.walk, but walk 'up' instead of down the directory tree

    Example
    -------
    # look for a config file above the current directory
    >>> for c,d,f in walk_up(os.curdir):
    >>>    if 'eacj.cfg' in f:
    >>>        print(c)
    >>>        break
    """

    bottom = os.path.realpath(bottom)

    try:
        names = os.listdir(bottom)
    except Exception as e:
        printDebug(str(e), "comment")
        return

    dirs, nondirs = [], []
    for name in names:
        if os.path.isdir(os.path.join(bottom, name)):
            dirs.append(name)
        else:
            nondirs.append(name)

    yield bottom, dirs, nondirs

    new_path = os.path.realpath(os.path.join(bottom, '..'))

    # see if we are at the top
    if new_path == bottom:
        return

    for x in walk_up(new_path):
        yield x



@contextmanager
def stopwatch(timings, key):
    """Accumulate the wall clock spent inside the block into `timings[key]` (seconds).

    Example
    -------
    >>> timings = {}
    >>> with stopwatch(timings, "detect"):
    ...     run_detector()
    """
    start = time.perf_counter()
    try:
        yield
    finally:
        timings[key] = timings.get(key, 0.0) + (time.perf_counter() - start)



def printDebug(text, mystyle="", err=True, **kwargs):
    """Wrapper around click.secho() for printing in colors with various defaults.

    :kwargs = you can do printDebug("s", bold=True)

    By default print to standard error (err=True), so that junction records
    and reports written to stdout can be piped to other commands or files.

    Styles
    ------
    comment   => dim, for progress chatter
    important => bold
    red/error => red foreground
    green     => green foreground, for success messages

    Other click styling keywords (fg, bg, bold, dim, underline...) are passed through.
    """

    if mystyle == "comment":
        click.secho(text, dim=True, err=err)
    elif mystyle == "important":
        click.secho(text, bold=True, err=err)
    elif mystyle == "normal":
        click.secho(text, reset=True, err=err)
    elif mystyle == "red" or mystyle == "error":
        click.secho(text, fg='red', err=err)
    elif mystyle == "green":
        click.secho(text, fg='green', err=err)
    else:
        click.secho(text, err=err, **kwargs)




def printInfo(text, mystyle="", **kwargs):
    """Wrapper around printDebug for printing ALWAYS to stdout
    This means that the output can be grepped etc..
    NOTE this output will be picked up by pipes etc..
    """
    printDebug(text, mystyle, False, **kwargs)

"""
This module contains console and file utilities shared by the eacj commands.

NOTE: these functions are attached to the top level ``eacj.utils`` module. E.g.:

>>> from eacj.utils import printDebug
>>> printDebug("Loading events..", "comment")

"""

from .misc_utils import *

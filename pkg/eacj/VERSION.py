# !/usr/bin/env python
#  -*- coding: UTF-8 -*-

__version__ = "0.4.0"
__copyright__ = "CopyRight (C) 2021-2022 by the eacj contributors"
__license__ = "MIT"
__author__ = "eacj contributors"
__author_email__ = "eacj at users dot noreply dot github dot com"

USAGE = "eacj [command] [options]"
VERSION = "v" + __version__
AGENT = "eacj/%s" % __version__

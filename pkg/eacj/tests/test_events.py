# !/usr/bin/env python
#  -*- coding: UTF-8 -*-
"""
Unit tests for eacj - events and the G-SAE

python -m eacj.tests.test_events

"""

from __future__ import print_function

import unittest, os, sys, click
import tempfile

import numpy as np

from ..core.errors import EventParseError, BoundsError
from ..core.events import *

from .settings import SEED


class TestEvents(unittest.TestCase):

    """
    Tests
    """

    click.secho("**test_events.py**", fg="red")

    def test_001(self):
        click.secho("\nTEST 001: Parse event lines.", bg="green")
        # ----
        self.assertEqual(parse_event_line("0.001 120 90 1"), Event(t=0.001, x=120, y=90, p=1))
        self.assertEqual(parse_event_line("2.5 0 0 0"), Event(t=2.5, x=0, y=0, p=-1))
        self.assertEqual(parse_event_line("2.5 0 0 -1").p, -1)
        with self.assertRaises(EventParseError):
            parse_event_line("abc 1 2 3", lineno=7)
        with self.assertRaises(EventParseError) as ctx:
            parse_event_line("0.1 1 2", lineno=12)
        self.assertEqual(ctx.exception.lineno, 12)
        self.assertIn("line 12", str(ctx.exception))
        with self.assertRaises(BoundsError):
            parse_event_line("0.1 240 10 1", width=240, height=180)
        # polarity tokens are integers, never truncated
        for token in ("0.7", "1.0", "-0.5", "2", "+"):
            with self.assertRaises(EventParseError):
                parse_event_line("0.1 1 2 %s" % token)
        click.secho("Completed test succesfully", fg="green")

    def test_002(self):
        click.secho("\nTEST 002: G-SAE updates.", bg="green")
        # ----
        sae = GSAE(240, 180)
        gsae_update(sae, Event(t=1.0, x=3, y=4))
        self.assertEqual(sae.at(3, 4), 1.0)
        self.assertEqual(int(np.count_nonzero(sae.as_array() != SENTINEL)), 1)
        gsae_update(sae, Event(t=2.0, x=3, y=4))
        self.assertEqual(sae.at(3, 4), 2.0)
        gsae_update(sae, Event(t=2.5, x=10, y=4))
        self.assertEqual(sae.at(3, 4), 2.0)
        self.assertEqual(sae.at(10, 4), 2.5)
        with self.assertRaises(BoundsError):
            sae.update(Event(t=3.0, x=240, y=0))
        sae.reset()
        self.assertEqual(sae.at(10, 4), SENTINEL)
        click.secho("Completed test succesfully", fg="green")

    def test_003(self):
        click.secho("\nTEST 003: Replay equals the per-pixel maximum.", bg="green")
        # ----
        rng = np.random.default_rng(SEED)
        t = np.sort(rng.uniform(0, 1, 500))
        x = rng.integers(0, 8, 500)
        y = rng.integers(0, 6, 500)
        sae = GSAE(8, 6)
        expected = np.full((6, 8), SENTINEL)
        for e in arrays_to_events(t, x, y, np.ones(500, dtype=int)):
            sae.update(e)
            expected[e.y, e.x] = max(expected[e.y, e.x], e.t)
        self.assertTrue(np.array_equal(sae.as_array(), expected))
        click.secho("Completed test succesfully", fg="green")

    def test_004(self):
        click.secho("\nTEST 004: Patch extraction.", bg="green")
        # ----
        sae = GSAE(240, 180)
        for i, (x, y) in enumerate([(120, 90), (121, 90), (0, 0), (2, 1)]):
            sae.update(Event(t=0.1 * (i + 1), x=x, y=y))
        patch = extract_patch(sae, (120, 90), 3)
        self.assertEqual(patch.values.shape, (7, 7))
        self.assertEqual(patch.center_value, sae.at(120, 90))
        self.assertEqual(patch.values[3, 4], sae.at(121, 90))
        corner = sae.extract_patch((0, 0), 3)
        self.assertTrue(np.all(corner.values[:3, :] == SENTINEL))
        self.assertTrue(np.all(corner.values[:, :3] == SENTINEL))
        self.assertEqual(corner.center_value, sae.at(0, 0))
        self.assertEqual(corner.values[4, 5], sae.at(2, 1))
        self.assertEqual(sae.extract_patch((120, 90), 15).side, 31)
        click.secho("Completed test succesfully", fg="green")

    def test_005(self):
        click.secho("\nTEST 005: Event files.", bg="green")
        # ----
        events = [Event(t=0.001, x=1, y=2, p=1), Event(t=0.002, x=3, y=4, p=-1)]
        with tempfile.TemporaryDirectory() as tmp:
            fpath = os.path.join(tmp, "events.txt")
            self.assertEqual(write_events(fpath, events), 2)
            self.assertEqual(read_events(fpath, 240, 180), events)
            with open(fpath, "w") as f:
                f.write("# comment\n0.002 1 1 1\n\n0.001 1 1 1\n")
            try:
                read_events(fpath)
                self.fail("decreasing timestamps must be rejected")
            except EventParseError as e:
                self.assertEqual(e.lineno, 4)
                self.assertEqual(e.path, fpath)
        click.secho("Completed test succesfully", fg="green")

    def test_006(self):
        click.secho("\nTEST 006: Window mask.", bg="green")
        # ----
        sae = GSAE(10, 10)
        sae.update(Event(t=0.10, x=1, y=1))
        sae.update(Event(t=0.16, x=2, y=1))
        sae.update(Event(t=0.20, x=3, y=1))
        mask = sae.window_mask(0.2, 0.05)
        self.assertEqual(int(mask.sum()), 2)
        self.assertTrue(mask[1, 3] and mask[1, 2])
        self.assertFalse(mask[1, 1])
        self.assertEqual(int(sae.window_mask(0.2, 0.15).sum()), 3)
        click.secho("Completed test succesfully", fg="green")



if __name__ == "__main__":
    unittest.main()

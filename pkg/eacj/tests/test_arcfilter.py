# !/usr/bin/env python
#  -*- coding: UTF-8 -*-
"""
Unit tests for eacj - arc candidate filter

python -m eacj.tests.test_arcfilter

"""

from __future__ import print_function

import unittest, os, sys, click
import math

import numpy as np

from ..core.arcfilter import *
from ..core.errors import ConfigError, GeometryError
from ..core.events import Event, GSAE, TimestampPatch
from ..core.synth import generate, textured_scene, x_junction_scene

from .settings import SEED


def make_patch(inner_newest=(), outer_newest=(), radius=4, base=0.0, linked=True):
    """Patch with every cell at `base` and the listed circle positions set to 1.0.

    With `linked`, the pixel halfway to each listed position is set to 1.0 too.
    """
    values = np.full((2 * radius + 1, 2 * radius + 1), base)
    for circle, listed in ((3, inner_newest), (4, outer_newest)):
        offsets = circle_offsets(circle)
        halves = halfway_offsets(offsets)
        for i in listed:
            dx, dy = offsets[i]
            values[radius + dy, radius + dx] = 1.0
            if linked:
                hx, hy = halves[i]
                values[radius + hy, radius + hx] = 1.0
    values[radius, radius] = 1.0
    return TimestampPatch(radius=radius, center=(radius, radius), values=values)


def pass_rates(spec, near=2.0):
    """Replay a scene through the default filter.

    Returns (passed, events, passed near a junction center, events near a junction center).
    """
    events, _ = generate(spec)
    sae = GSAE(spec.width, spec.height)
    arcs = ArcFilter()
    passed = near_passed = near_total = 0
    for e in events:
        sae.update(e)
        ok = arcs.check(sae, e)
        passed += ok
        d = min(math.hypot(e.x - (j.center[0] + spec.velocity_of(j)[0] * e.t),
                           e.y - (j.center[1] + spec.velocity_of(j)[1] * e.t)) for j in spec.junctions)
        if d <= near:
            near_total += 1
            near_passed += ok
    return passed, len(events), near_passed, near_total


class TestArcFilter(unittest.TestCase):

    """
    Tests
    """

    click.secho("**test_arcfilter.py**", fg="red")

    def test_001(self):
        click.secho("\nTEST 001: Discrete circles.", bg="green")
        # ----
        for radius, size in ((3, 16), (4, 20)):
            offsets = circle_offsets(radius)
            self.assertEqual(len(offsets), size)
            self.assertEqual(len(set(offsets)), size)
            self.assertEqual(offsets[0], (radius, 0))
            self.assertEqual(set((-dy, dx) for dx, dy in offsets), set(offsets))
            halves = halfway_offsets(offsets)
            self.assertTrue(all(max(abs(hx), abs(hy)) <= 2 for hx, hy in halves))
            self.assertTrue(set(halves).isdisjoint(circle_offsets(3)))
        self.assertTrue(set(circle_offsets(3)).isdisjoint(circle_offsets(4)))
        self.assertEqual(halfway_offsets([(1, -3), (-1, 4), (0, 0)]), [(1, -2), (-1, 2), (0, 0)])
        with self.assertRaises(ConfigError):
            circle_offsets(5)
        click.secho("Completed test succesfully", fg="green")

    def test_002(self):
        click.secho("\nTEST 002: Arc verdicts on hand-built patches.", bg="green")
        # ----
        flat = TimestampPatch(radius=4, center=(4, 4), values=np.full((9, 9), 0.5))
        self.assertFalse(is_candidate(flat))
        corner = make_patch(inner_newest=range(4), outer_newest=range(6))
        self.assertTrue(is_candidate(corner))
        # the two sides of one straight edge
        split = make_patch(inner_newest=(0, 1, 8, 9), outer_newest=(0, 1, 10, 11))
        self.assertFalse(is_candidate(split))
        # the complement of an allowed arc is accepted too
        wide = make_patch(inner_newest=range(12), outer_newest=range(15))
        self.assertTrue(is_candidate(wide))
        # an X crossing: four short arcs on both circles
        cross = make_patch(inner_newest=(0, 4, 8, 12), outer_newest=(0, 5, 10, 15))
        self.assertTrue(is_candidate(cross))
        # arcs not linked to the center are ignored
        unlinked = make_patch(inner_newest=range(4), outer_newest=range(6), linked=False)
        self.assertFalse(is_candidate(unlinked))
        click.secho("Completed test succesfully", fg="green")

    def test_003(self):
        click.secho("\nTEST 003: Rotations keep the verdict.", bg="green")
        # ----
        for patch in (make_patch(range(4), range(6)), make_patch((0, 1, 8, 9), (0, 1, 10, 11)),
                      make_patch(range(3, 8), range(5, 11)), make_patch((0, 4, 8, 12), (0, 5, 10, 15)),
                      make_patch((2, 3, 9, 10), (2, 3, 4, 12, 13))):
            verdict = is_candidate(patch)
            values = patch.values
            for _ in range(3):
                values = np.rot90(values)
                rotated = TimestampPatch(radius=4, center=(4, 4), values=np.ascontiguousarray(values))
                self.assertEqual(is_candidate(rotated), verdict)
        click.secho("Completed test succesfully", fg="green")

    def test_004(self):
        click.secho("\nTEST 004: Configuration and geometry errors.", bg="green")
        # ----
        with self.assertRaises(ConfigError):
            FilterConfig(inner_arc=(7, 3)).validate()
        with self.assertRaises(ConfigError):
            FilterConfig(outer_arc=(4, 21)).validate()
        with self.assertRaises(ConfigError):
            FilterConfig(method="fast").validate()
        with self.assertRaises(ConfigError):
            FilterConfig(recent_window=0.0).validate()
        small = TimestampPatch(radius=3, center=(3, 3), values=np.zeros((7, 7)))
        with self.assertRaises(GeometryError):
            is_candidate(small)
        with self.assertRaises(GeometryError):
            ArcFilter().is_candidate(small)
        click.secho("Completed test succesfully", fg="green")

    def test_005(self):
        click.secho("\nTEST 005: Filter on the G-SAE.", bg="green")
        # ----
        sae = GSAE(40, 40)
        cx, cy = 20, 20
        t = 0.0
        # a quadrant swept just before the center fires
        for dy in range(0, 6):
            for dx in range(0, 6):
                t += 0.0001
                sae.update(Event(t=t, x=cx + dx, y=cy + dy))
        e = Event(t=t + 0.0001, x=cx, y=cy)
        sae.update(e)
        arcs = ArcFilter()
        self.assertEqual(arcs.check(sae, e), is_candidate(sae.extract_patch((cx, cy), 4)))
        self.assertTrue(arcs.check(sae, e))
        # the same quadrant long before the center fires
        late = Event(t=e.t + 0.5, x=cx, y=cy)
        sae.update(late)
        self.assertFalse(arcs.check(sae, late))
        # cells that never fired, or lie outside the sensor, are not recent
        edge = Event(t=late.t + 0.0001, x=0, y=0)
        sae.update(edge)
        self.assertFalse(arcs.check(sae, edge))
        click.secho("Completed test succesfully", fg="green")

    def test_006(self):
        click.secho("\nTEST 006: Linked arcs.", bg="green")
        # ----
        recent = np.zeros(16, dtype=bool)
        recent[[14, 15, 0, 1, 6, 7]] = True
        linked = np.zeros(16, dtype=bool)
        linked[[15, 7]] = True
        self.assertEqual(linked_arcs(recent, linked), [(6, 2), (14, 4)])
        linked[7] = False
        self.assertEqual(linked_arcs(recent, linked), [(14, 4)])
        self.assertEqual(linked_arcs(np.ones(16, dtype=bool), linked), [(0, 16)])
        self.assertEqual(linked_arcs(np.ones(16, dtype=bool), np.zeros(16, dtype=bool)), [])
        self.assertEqual(linked_arcs(np.zeros(16, dtype=bool), linked), [])
        values = np.array([0.5, 0.495, 0.49, -1.0])
        self.assertEqual(recent_mask(values, 0.5, 0.008).tolist(), [True, True, False, False])
        bounds = (3, 6)
        self.assertFalse(is_junction_arcs([], 16, bounds))
        self.assertFalse(is_junction_arcs([(0, 16)], 16, bounds))
        self.assertTrue(is_junction_arcs([(0, 3)], 16, bounds))
        self.assertTrue(is_junction_arcs([(0, 11)], 16, bounds))
        self.assertFalse(is_junction_arcs([(0, 2)], 16, bounds))
        self.assertFalse(is_junction_arcs([(0, 8)], 16, bounds))
        self.assertTrue(is_junction_arcs([(0, 1), (5, 1), (10, 1)], 16, bounds))
        # two arcs: opposite and equal is an edge, anything else is not
        self.assertFalse(is_junction_arcs([(0, 2), (8, 2)], 16, bounds))
        self.assertFalse(is_junction_arcs([(14, 3), (6, 3)], 16, bounds))
        self.assertTrue(is_junction_arcs([(0, 2), (8, 3)], 16, bounds))
        self.assertTrue(is_junction_arcs([(0, 2), (5, 2)], 16, bounds))
        self.assertFalse(is_junction_arcs([(0, 2), (11, 2)], 20, (4, 8)))
        click.secho("Completed test succesfully", fg="green")

    def test_007(self):
        click.secho("\nTEST 007: Newest-arc expansion.", bg="green")
        # ----
        values = np.zeros(16)
        values[:4] = 1.0
        self.assertEqual(newest_arc_length(values, 3), 4)
        self.assertTrue(has_newest_arc(values, (3, 6)))
        # growth stops at the first neighbour older than the arc
        ramp = np.array([0.9, 0.8, 0.7, 0.6, 0.5] + [0.0] * 11)
        self.assertEqual(newest_arc_length(ramp, 3), 3)
        bumpy = np.array([0.9, 0.7, 0.8, 0.75, 0.72] + [0.0] * 11)
        self.assertEqual(newest_arc_length(bumpy, 3), 5)
        self.assertEqual(newest_arc_length(np.full(16, 0.5), 3), 16)
        self.assertFalse(has_newest_arc(np.full(16, 0.5), (3, 6)))
        split = np.zeros(16)
        split[[0, 1, 8, 9]] = 1.0
        self.assertFalse(has_newest_arc(split, (3, 6)))
        cfg = FilterConfig(method="arcstar")
        self.assertTrue(is_candidate(make_patch(range(4), range(6)), cfg))
        self.assertFalse(is_candidate(make_patch((0, 1, 8, 9), (0, 1, 10, 11)), cfg))
        self.assertFalse(is_candidate(TimestampPatch(radius=4, center=(4, 4), values=np.full((9, 9), 0.5)), cfg))
        self.assertIn("arcstar", repr(ArcFilter(cfg)))
        click.secho("Completed test succesfully", fg="green")

    def test_008(self):
        click.secho("\nTEST 008: Junction events pass on the X junction scene.", bg="green")
        # ----
        passed, total, near_passed, near_total = pass_rates(x_junction_scene(seed=SEED), near=3.5)
        print(" ==> near the center: %d/%d, overall: %d/%d" % (near_passed, near_total, passed, total))
        self.assertGreater(near_total, 500)
        self.assertGreaterEqual(near_passed, 0.95 * near_total)
        click.secho("Completed test succesfully", fg="green")

    def test_009(self):
        click.secho("\nTEST 009: Textured scene: recall near junctions and pass ratio.", bg="green")
        # ----
        passed, total, near_passed, near_total = pass_rates(textured_scene(seed=SEED), near=2.0)
        print(" ==> near a center: %d/%d, overall: %d/%d" % (near_passed, near_total, passed, total))
        self.assertGreaterEqual(near_passed, 0.95 * near_total)
        self.assertLessEqual(passed, 0.30 * total)
        click.secho("Completed test succesfully", fg="green")



if __name__ == "__main__":
    unittest.main()

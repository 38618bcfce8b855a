# !/usr/bin/env python
#  -*- coding: UTF-8 -*-
"""
Unit tests for eacj - sectors and branch strength

python -m eacj.tests.test_sectors

"""

from __future__ import print_function

import unittest, os, sys, click
import math
import time

import numpy as np

from ..core.errors import GeometryError, ParameterError
from ..core.patches import BinaryPatch, GradientField, gradient_field
from ..core.sectors import *

from .settings import SEED


def brute_force_strength(g, r, theta, tau=1.0):
    """Independent enumeration of the sector and summation of the alignment values."""
    R = g.radius
    omega, size = 0.0, 0
    for dy in range(-r, r + 1):
        for dx in range(-r, r + 1):
            if dx == 0 and dy == 0:
                continue
            if math.hypot(dx, dy) > r:
                continue
            alpha = math.atan2(-dy, dx) % (2 * math.pi)
            d = abs(alpha - theta) % (2 * math.pi)
            if min(d, 2 * math.pi - d) > tau / r:
                continue
            size += 1
            if g.norm[R + dy, R + dx]:
                diff = g.phi[R + dy, R + dx] - alpha
                omega += max(abs(math.cos(diff)) - abs(math.sin(diff)), 0.0)
    return omega, size


def single_pixel_field(radius, q, phi):
    side = 2 * radius + 1
    norm = np.zeros((side, side), dtype=bool)
    angles = np.zeros((side, side))
    norm[radius + q[1], radius + q[0]] = True
    angles[radius + q[1], radius + q[0]] = phi
    zeros = np.zeros((side, side), dtype=np.int32)
    return GradientField(radius=radius, norm=norm, phi=angles, gx=zeros, gy=zeros)


class TestSectors(unittest.TestCase):

    """
    Tests
    """

    click.secho("**test_sectors.py**", fg="red")

    def test_001(self):
        click.secho("\nTEST 001: Sector membership.", bg="green")
        # ----
        members = sector_members(SectorSpec(3, 0.0), 3)
        self.assertIn((3, 0), members)
        self.assertNotIn((0, 0), members)
        for r in (3, 8, 15):
            east = set(sector_members(SectorSpec(r, 0.0), 15))
            west = set(sector_members(SectorSpec(r, math.pi), 15))
            self.assertTrue(east.isdisjoint(west))
            self.assertEqual(len(east), r)
        with self.assertRaises(GeometryError):
            sector_members(SectorSpec(5, 0.0), 3)
        with self.assertRaises(ParameterError):
            SectorSpec(3, 0.0, tau=0.0).validate()
        self.assertAlmostEqual(SectorSpec(3, 0.0).half_width, 1.0 / 3)
        click.secho("Completed test succesfully", fg="green")

    def test_002(self):
        click.secho("\nTEST 002: Alignment values.", bg="green")
        # ----
        spec = SectorSpec(3, 0.0)
        self.assertAlmostEqual(gamma((2, 0), single_pixel_field(3, (2, 0), 0.0), spec), 1.0)
        self.assertAlmostEqual(gamma((2, 0), single_pixel_field(3, (2, 0), math.pi / 4), spec), 0.0)
        self.assertAlmostEqual(gamma((2, 0), single_pixel_field(3, (2, 0), math.pi / 6), spec),
                               math.sqrt(3) / 2 - 0.5)
        self.assertAlmostEqual(gamma((2, 0), single_pixel_field(3, (2, 0), math.pi), spec), 1.0)
        self.assertEqual(gamma((1, 0), single_pixel_field(3, (2, 0), 0.0), spec), 0.0)
        self.assertAlmostEqual(float(alignment(math.pi / 6, 0.0)), math.sqrt(3) / 2 - 0.5)
        click.secho("Completed test succesfully", fg="green")

    def test_003(self):
        click.secho("\nTEST 003: Branch strength equals a brute-force sum on 1000 patches.", bg="green")
        # ----
        elapsed = 0.0
        rng = np.random.default_rng(SEED)
        for trial in range(1000):
            bits = rng.integers(0, 2, size=(7, 7)).astype(np.uint8)
            g = gradient_field(BinaryPatch(radius=3, bits=bits))
            profile, sizes = orientation_profile(g, 3)
            for k in range(64):
                theta = bin_angle(k, 64)
                start = time.perf_counter()
                omega, J = branch_strength(g, SectorSpec(3, theta))
                elapsed += time.perf_counter() - start
                expected, size = brute_force_strength(g, 3, theta)
                self.assertEqual(J, size)
                self.assertEqual(omega, expected)
                self.assertTrue(0.0 <= omega <= J)
                self.assertAlmostEqual(profile[k], omega, places=9)
                self.assertEqual(sizes[k], J)
        self.assertLess(elapsed, 10.0)
        click.secho("Completed test succesfully", fg="green")

    def test_004(self):
        click.secho("\nTEST 004: Orientation profiles.", bg="green")
        # ----
        empty = GradientField(radius=15, norm=np.zeros((31, 31), dtype=bool), phi=np.zeros((31, 31)),
                              gx=np.zeros((31, 31), dtype=np.int32), gy=np.zeros((31, 31), dtype=np.int32))
        profile, sizes = orientation_profile(empty, 15)
        self.assertEqual(len(profile), 64)
        self.assertFalse(profile.any())
        self.assertEqual(semi_local_maxima(profile, 4), [])
        # an edge along +x, rotated by quarter turns
        bits = np.zeros((31, 31), dtype=np.uint8)
        bits[15:, 15:] = 1
        for turn in range(4):
            g = gradient_field(BinaryPatch(radius=15, bits=np.ascontiguousarray(np.rot90(bits, turn))))
            profile, _ = orientation_profile(g, 15)
            self.assertAlmostEqual(profile[(16 * turn) % 64], 14.0, places=9)
            peaks = semi_local_maxima(profile, 4)
            self.assertIn((16 * turn) % 64, peaks)
            self.assertIn((16 * turn + 48) % 64, peaks)
        click.secho("Completed test succesfully", fg="green")

    def test_005(self):
        click.secho("\nTEST 005: Semi-local maxima.", bg="green")
        # ----
        self.assertEqual(semi_local_maxima(np.zeros(64), 4), [])
        single = np.zeros(64)
        single[10] = 2.0
        self.assertEqual(semi_local_maxima(single, 4), [10])
        antipodal = np.zeros(64)
        antipodal[0] = antipodal[32] = 3.0
        self.assertEqual(semi_local_maxima(antipodal, 4), [0, 32])
        self.assertEqual(semi_local_maxima([0, 3, 3, 0, 0, 0, 0, 0], 2), [1])
        self.assertEqual(semi_local_maxima([1, 0, 0, 0, 0, 0, 0, 2], 2), [7])
        with self.assertRaises(ParameterError):
            semi_local_maxima(single, 0)
        click.secho("Completed test succesfully", fg="green")



if __name__ == "__main__":
    unittest.main()

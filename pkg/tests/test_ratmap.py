"""Normalized quadratics and sphere geometry against independent oracles."""

import cmath
import math
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from quadmate.ratmap import (
    as_point,
    chordal,
    from_critical_values,
    from_sphere,
    stereographic,
)

finite_point = st.builds(
    complex,
    st.floats(min_value=-50, max_value=50, allow_nan=False),
    st.floats(min_value=-50, max_value=50, allow_nan=False),
)


def random_value(rng: random.Random):
    if rng.random() < 0.05:
        return None
    # log-uniform magnitude exercises both hemispheres evenly
    r = 10.0 ** rng.uniform(-3, 3)
    phi = rng.uniform(0, 2 * math.pi)
    return complex(r * math.cos(phi), r * math.sin(phi))


def oracle_preimages(F, w):
    """Solve (a - c w) z^2 + (b - d w) = 0 from the raw coefficients."""
    a, b, c, d = F.coeffs
    if w is None:
        lead, const = -c, -d
    else:
        lead, const = a - c * w, b - d * w
    roots = np.roots([lead, 0.0, const])
    out = [as_point(complex(z)) for z in roots]
    if len(out) == 1:  # degree dropped: one preimage escaped to infinity
        out = [out[0], None]
    if len(out) == 0:
        out = [None, None]
    return out


class TestConstruction:
    def test_example_map_coefficients(self):
        F = from_critical_values(1j, -1j)
        a, b, c, d = F.coeffs
        scale = a / (1 + 1j)
        assert abs(b / scale - (1j - 1)) < 1e-14
        assert abs(c / scale - (1j - 1)) < 1e-14
        assert abs(d / scale - (1 + 1j)) < 1e-14

    def test_normalization_at_the_three_probes(self):
        rng = random.Random(7)
        for _ in range(200):
            u, v = random_value(rng), random_value(rng)
            if u is None and v is None or u == v or u == 1 or v == 1:
                continue
            F = from_critical_values(u, v)
            assert chordal(F.eval(0j), u) < 1e-11
            assert chordal(F.eval(None), v) < 1e-11
            assert chordal(F.eval(1 + 0j), 1 + 0j) < 1e-11

    def test_degenerate_inputs_rejected(self):
        with pytest.raises(ValueError):
            from_critical_values(None, None)
        with pytest.raises(ValueError):
            from_critical_values(2j, 2j)
        with pytest.raises(ValueError):
            from_critical_values(1 + 0j, 2j)

    def test_infinite_critical_value(self):
        F = from_critical_values(None, 2j)
        assert F.eval(0j) is None
        assert chordal(F.eval(None), 2j) < 1e-12


class TestPreimages:
    def test_oracle_equivalence_bulk(self):
        # brute-force root solve from raw coefficients, 10^4 random instances
        rng = random.Random(20260823)
        checked = 0
        while checked < 10_000:
            u, v = random_value(rng), random_value(rng)
            if u is None and v is None or u == v or u == 1 or v == 1:
                continue
            F = from_critical_values(u, v)
            w = random_value(rng)
            mine = F.preimages(w)
            oracle = oracle_preimages(F, w)
            direct = chordal(mine[0], oracle[0]) + chordal(mine[1], oracle[1])
            swapped = chordal(mine[0], oracle[1]) + chordal(mine[1], oracle[0])
            assert min(direct, swapped) < 1e-10
            checked += 1

    def test_preimages_are_negatives(self):
        F = from_critical_values(2j, 0.5 - 0.25j)
        p, m = F.preimages(3 + 1j)
        assert abs(p + m) < 1e-12

    def test_critical_values_have_double_preimages(self):
        F = from_critical_values(2j, 0.5 - 0.25j)
        p, m = F.preimages(2j)
        assert chordal(p, 0j) < 1e-8 and chordal(m, 0j) < 1e-8
        p, m = F.preimages(0.5 - 0.25j)
        assert p is None and m is None

    def test_round_trip_through_eval(self):
        rng = random.Random(99)
        for _ in range(300):
            u, v = random_value(rng), random_value(rng)
            if u is None and v is None or u == v or u == 1 or v == 1:
                continue
            F = from_critical_values(u, v)
            w = random_value(rng)
            for z in F.preimages(w):
                assert chordal(F.eval(z), w) < 1e-9


class TestChordal:
    def test_known_values(self):
        assert chordal(0j, 0j) == 0.0
        assert chordal(None, None) == 0.0
        assert abs(chordal(0j, None) - 2.0) < 1e-15
        assert abs(chordal(1 + 0j, -1 + 0j) - 2.0) < 1e-15
        assert abs(chordal(0j, 1 + 0j) - math.sqrt(2)) < 1e-15

    @given(finite_point, finite_point)
    def test_matches_embedded_distance(self, a, b):
        assert abs(chordal(a, b) - math.dist(stereographic(a), stereographic(b))) < 1e-9

    @given(finite_point, finite_point)
    def test_symmetric_and_bounded(self, a, b):
        d = chordal(a, b)
        assert d == chordal(b, a)
        assert 0.0 <= d <= 2.0 + 1e-12

    def test_overflowing_input_treated_as_infinity(self):
        huge = complex(1e200, 1e200)
        assert chordal(huge * huge, None) == 0.0


class TestStereographic:
    def test_pole_conventions(self):
        assert stereographic(0j) == (0.0, 0.0, 1.0)
        assert stereographic(None) == (0.0, 0.0, -1.0)
        assert stereographic(1 + 0j) == (1.0, 0.0, 0.0)
        assert stereographic(1j) == (0.0, 1.0, 0.0)

    @given(finite_point)
    def test_lands_on_the_unit_sphere(self, z):
        p = stereographic(z)
        assert abs(sum(x * x for x in p) - 1.0) < 1e-12

    @given(finite_point)
    def test_round_trip(self, z):
        back = from_sphere(stereographic(z))
        assert chordal(back, z) < 1e-9

    def test_infinity_round_trip(self):
        assert from_sphere(stereographic(None)) is None


class TestEval:
    def test_pole_maps_to_infinity(self):
        F = from_critical_values(2j, 3 + 0j)
        zp = F.preimages(None)[0]
        # roundoff in the root can leave the image merely astronomically large
        assert chordal(F.eval(zp), None) < 1e-7

    def test_large_argument_stability(self):
        F = from_critical_values(2j, 3 + 0j)
        assert chordal(F.eval(complex(1e200, 1e150)), 3 + 0j) < 1e-9

    def test_squaring_symmetry(self):
        F = from_critical_values(2j, 3 + 0j)
        rng = random.Random(5)
        for _ in range(100):
            z = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
            assert chordal(F.eval(z), F.eval(-z)) < 1e-12

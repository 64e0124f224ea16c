"""Exact rational angle arithmetic."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from quadmate.angles import Angle, cyclic_between, in_open_arc, reduce
from quadmate.errors import AngleError

rational = st.builds(
    lambda p, q: reduce(p, q),
    st.integers(min_value=-500, max_value=500),
    st.integers(min_value=1, max_value=500),
)


class TestConstruction:
    def test_reduce_normalizes(self):
        assert reduce(2, 4) == Angle(1, 2)
        assert reduce(5, 4) == Angle(1, 4)
        assert reduce(-1, 4) == Angle(3, 4)
        assert reduce(8, 4) == Angle(0, 1)

    def test_parse(self):
        assert Angle.parse("3/8") == Angle(3, 8)
        assert Angle.parse(" 0 ") == Angle(0, 1)
        assert Angle.parse("9/6") == Angle(1, 2)

    @pytest.mark.parametrize("bad", ["", "x", "1/0", "1//2", "1/2/3", "0.5"])
    def test_parse_rejects(self, bad):
        with pytest.raises(AngleError):
            Angle.parse(bad)

    def test_raw_constructor_insists_on_canonical_form(self):
        with pytest.raises(AngleError):
            Angle(2, 4)
        with pytest.raises(AngleError):
            Angle(5, 4)
        with pytest.raises(AngleError):
            Angle(1, -2)
        with pytest.raises(AngleError):
            Angle(0, 2)

    @given(rational)
    def test_always_canonical(self, a):
        assert 0 <= a.num < a.den
        assert a.fraction == Fraction(a.num, a.den)


class TestDoubling:
    def test_known_orbit(self):
        # 1/8 -> 1/4 -> 1/2 -> 0 -> 0
        info = Angle(1, 8).orbit_info()
        assert info.preperiod == 3
        assert info.period == 1
        assert info.distinct == [Angle(1, 8), Angle(1, 4), Angle(1, 2), Angle(0, 1)]

    def test_periodic_orbit(self):
        # 1/6 -> 1/3 -> 2/3 -> 1/3
        info = Angle(1, 6).orbit_info()
        assert info.preperiod == 1
        assert info.period == 2

    @given(rational)
    def test_halves_invert_doubling(self, a):
        lo, hi = a.halves()
        assert lo.double() == a
        assert hi.double() == a
        assert lo != hi
        assert lo.fraction < Fraction(1, 2) <= hi.fraction

    @given(rational)
    def test_doubling_matches_fractions(self, a):
        assert a.double().fraction == (2 * a.fraction) % 1

    @given(rational)
    def test_preperiodic_iff_even_denominator(self, a):
        # walk the orbit directly as the oracle
        info = a.orbit_info()
        strictly = info.preperiod > 0
        assert a.is_preperiodic() == strictly
        assert strictly == (a.den % 2 == 0)

    @given(rational)
    def test_mirror_involution(self, a):
        assert a.mirror().mirror() == a
        assert (a.fraction + a.mirror().fraction) % 1 == 0


class TestOrdering:
    @given(rational, rational)
    def test_matches_fraction_order(self, a, b):
        assert (a < b) == (a.fraction < b.fraction)
        assert (a == b) == (a.fraction == b.fraction)

    @given(rational, rational, rational)
    def test_cyclic_between_oracle(self, a, b, c):
        if len({a, b, c}) < 3:
            with pytest.raises(AngleError):
                cyclic_between(a, b, c)
            return
        fa, fb, fc = a.fraction, b.fraction, c.fraction
        assert cyclic_between(a, b, c) == ((fb - fa) % 1 < (fc - fa) % 1)

    def test_open_arc_excludes_endpoints(self):
        lo, hi = Angle(1, 4), Angle(3, 4)
        assert in_open_arc(Angle(1, 2), lo, hi)
        assert not in_open_arc(lo, lo, hi)
        assert not in_open_arc(hi, lo, hi)
        assert not in_open_arc(Angle(7, 8), lo, hi)

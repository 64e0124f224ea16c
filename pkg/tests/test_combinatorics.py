"""Identification classes, structural gates, and mark schedules."""

import pytest

from quadmate.angles import Angle, reduce
from quadmate.combinatorics import (
    MarkKind,
    Side,
    SideAngle,
    base_schedule,
    essential_classes,
    fsr_valid,
    is_jordan,
    jordan_defect,
    postcritical_count,
    pullback_schedule,
)
from quadmate.errors import AngleError, StructuralError

A14, A18 = Angle(1, 4), Angle(1, 8)


def sa(side: str, text: str) -> SideAngle:
    return SideAngle(Side(side), Angle.parse(text))


class TestSideAngle:
    def test_param(self):
        assert sa("black", "1/4").param() == Angle(1, 4)
        assert sa("red", "1/8").param() == Angle(7, 8)
        assert sa("red", "0").param() == Angle(0, 1)

    def test_glue_partner_is_involutive(self):
        x = sa("black", "3/8")
        assert x.glue_partner() == sa("red", "5/8")
        assert x.glue_partner().glue_partner() == x

    def test_glued_pair_shares_its_parameter(self):
        x = sa("black", "5/16")
        assert x.param() == x.glue_partner().param()


class TestBaseSchedule:
    def test_five_postcritical_parameters(self):
        s = base_schedule(A14, A18)
        assert s.level == 0
        assert [str(m.parameter) for m in s.marks] == ["0", "1/4", "1/2", "3/4", "7/8"]
        assert all(m.kind is MarkKind.POSTCRITICAL for m in s.marks)
        assert s.black_value == Angle(1, 4)
        assert s.red_value == Angle(7, 8)
        assert postcritical_count(A14, A18) == 5

    def test_point_ids_ascend_anchor_last(self):
        s = base_schedule(A14, A18)
        assert dict(s.base_points) == {
            Angle(1, 4): 1,
            Angle(1, 2): 2,
            Angle(3, 4): 3,
            Angle(7, 8): 4,
            Angle(0, 1): 5,
        }

    def test_anchor_added_when_zero_not_postcritical(self):
        # both orbits of (1/6, 1/6) avoid parameter 0
        s = base_schedule(Angle(1, 6), Angle(1, 6))
        params = [str(m.parameter) for m in s.marks]
        assert "0" in params
        anchor = s.mark_at(Angle(0, 1))
        assert anchor.kind is MarkKind.ANCHOR
        assert anchor.point_id is None

    def test_identified_critical_values_rejected(self):
        with pytest.raises(StructuralError, match="critical values identified"):
            base_schedule(A14, Angle(3, 4))

    def test_periodic_rejected(self):
        with pytest.raises(AngleError):
            base_schedule(Angle(1, 3), A18)


class TestPullbackSchedule:
    def test_level_one_golden(self):
        s1 = pullback_schedule(base_schedule(A14, A18), A14, A18)
        table = [(str(m.parameter), m.kind) for m in s1.marks]
        assert table == [
            ("0", MarkKind.POSTCRITICAL),
            ("1/8", MarkKind.CRITICAL_POINT),
            ("1/4", MarkKind.POSTCRITICAL),
            ("3/8", MarkKind.PLUMBING),
            ("7/16", MarkKind.CRITICAL_POINT),
            ("1/2", MarkKind.POSTCRITICAL),
            ("5/8", MarkKind.CRITICAL_POINT),
            ("3/4", MarkKind.POSTCRITICAL),
            ("7/8", MarkKind.POSTCRITICAL),
            ("15/16", MarkKind.CRITICAL_POINT),
        ]
        black = {str(m.parameter) for m in s1.critical_marks(Side.BLACK)}
        red = {str(m.parameter) for m in s1.critical_marks(Side.RED)}
        assert black == {"1/8", "5/8"}
        assert red == {"7/16", "15/16"}

    def test_doubles_mark_count_each_level(self):
        s = base_schedule(A14, A18)
        for _ in range(4):
            s_next = pullback_schedule(s, A14, A18)
            assert len(s_next.marks) == 2 * len(s.marks)
            assert s_next.level == s.level + 1
            s = s_next

    def test_parameters_halve(self):
        s0 = base_schedule(A14, A18)
        s1 = pullback_schedule(s0, A14, A18)
        doubled = {m.parameter.double() for m in s1.marks}
        assert doubled == {m.parameter for m in s0.marks}

    def test_base_parameters_keep_their_ids(self):
        s0 = base_schedule(A14, A18)
        s1 = pullback_schedule(s0, A14, A18)
        base = dict(s0.base_points)
        for m in s1.marks:
            if m.parameter in base:
                assert m.point_id == base[m.parameter]


class TestEssentialClasses:
    def test_partition_covers_postcritical_angles(self):
        classes = essential_classes(A14, A18)
        members = [x for c in classes for x in c.members]
        assert len(members) == len(set(members))
        black = {a for a in A14.orbit_info().distinct}
        red = {a for a in A18.orbit_info().distinct}
        covered = set(members)
        for a in black:
            assert SideAngle(Side.BLACK, a) in covered
        for a in red:
            assert SideAngle(Side.RED, a) in covered

    def test_images_index_into_the_partition(self):
        classes = essential_classes(A14, A18)
        for c in classes:
            assert 0 <= c.image < len(classes)
            target = classes[c.image].members
            for x in c.members:
                assert x.double() in target


class TestGates:
    def test_example_pair_passes(self):
        assert is_jordan(A14, A18)
        assert fsr_valid(A14, A18)
        assert jordan_defect(A14, A18) is None

    def test_pinched_pair_fails_jordan(self):
        defect = jordan_defect(Angle(1, 6), Angle(13, 14))
        assert defect is not None
        assert defect == frozenset(
            {
                sa("black", "1/7"),
                sa("black", "2/7"),
                sa("black", "4/7"),
                sa("red", "3/7"),
                sa("red", "5/7"),
                sa("red", "6/7"),
            }
        )

    def test_subdivision_gate_regression(self):
        # frozen from a brute-force search: the curve stays Jordan, but a
        # ray class holds two distinct points whose images merge, forcing an
        # identification the previous level refuses
        assert is_jordan(reduce(1, 32), reduce(1, 12))
        assert not fsr_valid(reduce(1, 32), reduce(1, 12))

    def test_small_postcritical_counts(self):
        assert postcritical_count(A14, A14) == 4
        assert postcritical_count(Angle(1, 6), Angle(1, 6)) == 4

import pytest

from projknot import (
    AFTER,
    BEFORE,
    FORWARD,
    OVER,
    REVERSED,
    UNDER,
    DiagramError,
    PointRef,
    arc_distance,
    components_of,
    crossing_partition,
    crossings_between,
    first_pass,
    homology_class,
    local_writhe,
    net_of,
    self_crossings,
)

from fixtures import D_2LINES, D_CIRCLE, D_KINK, D_LINE


def test_components_of():
    assert components_of(D_LINE) == [("c1", 1, False)]
    assert components_of(D_CIRCLE) == [("c1", 1, True)]
    assert components_of(D_2LINES) == [("c1", 1, False), ("c2", 1, False)]


def test_homology_class():
    assert homology_class(D_CIRCLE, "c1") == 0
    assert homology_class(D_LINE, "c1") == 1
    assert homology_class(D_KINK, "c1") == 1
    with pytest.raises(DiagramError):
        homology_class(D_LINE, "nope")


def test_arc_distance_on_line():
    o = {"c1": FORWARD}
    after_entry = PointRef("c1", 0, AFTER)
    before_exit = PointRef("c1", 0, BEFORE)
    assert arc_distance(D_LINE, o, after_entry, before_exit) == 0
    assert arc_distance(D_LINE, o, before_exit, after_entry) == 1


def test_arc_distance_on_kink():
    o = {"c1": FORWARD}
    base = PointRef("c1", 0, AFTER)  # just inside after the boundary passage
    past_under = PointRef("c1", 2, AFTER)
    assert arc_distance(D_KINK, o, base, past_under) == 0
    assert arc_distance(D_KINK, {"c1": REVERSED}, base, past_under) == 1


def test_arc_distance_sum_property():
    # distances both ways around add up to the boundary passage count
    o = {"c1": FORWARD}
    p = PointRef("c1", 0, AFTER)
    q = PointRef("c1", 1, AFTER)
    assert arc_distance(D_KINK, o, p, q) + arc_distance(D_KINK, o, q, p) == 1


def test_arc_distance_rejects_mixed_components():
    with pytest.raises(DiagramError):
        arc_distance(D_2LINES, {"c1": FORWARD}, PointRef("c1", 0), PointRef("c2", 0))


def test_first_pass():
    base = PointRef("c1", 0, AFTER)
    assert first_pass(D_KINK, {"c1": FORWARD}, base, 1) == (OVER, 0)
    assert first_pass(D_KINK, {"c1": REVERSED}, base, 1) == (UNDER, 1)
    assert first_pass(D_2LINES, {"c1": FORWARD}, base, 1) == (OVER, 0)
    with pytest.raises(DiagramError):
        first_pass(D_2LINES, {"c2": FORWARD}, PointRef("c2", 0, AFTER), 7)


def test_crossing_partition():
    assert crossing_partition(D_KINK) == {1: ("c1", "c1")}
    assert self_crossings(D_KINK, "c1") == [1]
    assert crossing_partition(D_2LINES) == {1: ("c1", "c2")}
    assert self_crossings(D_2LINES, "c1") == []
    assert crossings_between(D_2LINES, "c1", "c2") == [1]


def test_local_writhe():
    assert local_writhe(D_2LINES, {"c1": FORWARD, "c2": FORWARD}, 1) == 1
    assert local_writhe(D_2LINES, {"c1": FORWARD, "c2": REVERSED}, 1) == -1
    assert local_writhe(D_2LINES, {"c1": REVERSED, "c2": REVERSED}, 1) == 1
    # a self-crossing is orientation independent
    assert local_writhe(D_KINK, {"c1": FORWARD}, 1) == local_writhe(D_KINK, {"c1": REVERSED}, 1)


def test_net_of():
    (line,) = net_of(D_LINE)
    assert line.infinity_passes() == 1
    (circle,) = net_of(D_CIRCLE)
    assert circle.infinity_passes() == 0
    (kink,) = net_of(D_KINK)
    assert kink.items == (("inf", 0), ("x", 1, OVER), ("x", 1, UNDER))

import pytest

from projknot import (
    AFTER,
    FORWARD,
    OVER,
    REVERSED,
    UNDER,
    CrossingPass,
    DescendError,
    PointRef,
    apply_plan,
    build_simplifying_set,
    check_descending,
    check_descending_knot,
    check_simple_descending,
    check_simplifying_set,
    classify_crossing,
    crossing_leq,
    dashed_part_of,
    default_data,
    extract_simple_diagram,
    label_simple_components,
    orientation_determined_by,
    parse_diagram,
    parse_plan,
    plan_descending,
    plan_descending_knot,
    serialize_plan,
)

from fixtures import D_2LINES, D_CIRCLE, D_KINK, D_LINE, double_kink, kink3


def test_orientation_determined_by():
    assert orientation_determined_by(D_KINK, "c1", 1) == FORWARD
    mirror = parse_diagram("boundary: 1\ncrossing 1 +\ncomponent c1: B0 C1u C1o\n")
    assert orientation_determined_by(mirror, "c1", 1) == REVERSED
    with pytest.raises(DescendError):
        orientation_determined_by(D_CIRCLE, "c1", 1)


def test_dashed_parts():
    assert dashed_part_of(D_KINK, "c1", 1).span == ()
    dp = dashed_part_of(kink3(), "c1", 1)
    assert len(dp.span) == 2  # the two boundary passes inside the kink


def test_crossing_leq():
    assert crossing_leq(D_KINK, "c1", 1, 1)
    d = double_kink()
    assert crossing_leq(d, "c1", 2, 1)  # inner below outer
    assert not crossing_leq(d, "c1", 1, 2)


def test_build_simplifying_set():
    assert build_simplifying_set(D_KINK, "c1").crossings == (1,)
    d = double_kink()
    m = build_simplifying_set(d, "c1").crossings
    assert check_simplifying_set(d, "c1", m) is None
    assert m == (1,)  # the outer kink dashes the inner one
    line = build_simplifying_set(D_LINE, "c1")
    assert line.crossings == ()


def test_check_simplifying_set():
    assert check_simplifying_set(D_KINK, "c1", [1]) is None
    verdict = check_simplifying_set(D_KINK, "c1", [])
    assert verdict is not None and "condition 1" in verdict


def test_extract_simple_diagram():
    data = default_data(D_KINK)
    simple, smap = extract_simple_diagram(D_KINK, data)
    assert simple == D_LINE
    assert smap.pair_map == {0: 0}

    data2 = default_data(D_2LINES)
    simple2, _ = extract_simple_diagram(D_2LINES, data2)
    assert simple2 == D_2LINES


def test_label_simple_components():
    lab = label_simple_components(D_2LINES, 0)
    assert lab.order == ("c1", "c2")
    assert lab.pairs == {"c1": 0, "c2": 1}
    lab2 = label_simple_components(D_2LINES, 1)
    assert lab2.order == ("c2", "c1")


def test_check_descending_knot():
    base = PointRef("c1", 0, AFTER)
    assert check_descending_knot(D_KINK, FORWARD, base) is None
    flipped = apply_plan(D_KINK, parse_plan("flip 1\n"))
    assert check_descending_knot(flipped, FORWARD, base) == 1
    assert check_descending_knot(D_LINE, FORWARD, base) is None


def _classical_descending_plan(events, base_gap=0):
    """Independent oracle for affine knot diagrams: walking from the
    basepoint, a crossing met first on its lower branch gets flipped."""
    n = len(events)
    seen = set()
    flips = []
    for t in range(1, n + 1):
        e = events[(base_gap + t) % n]
        if e.crossing in seen:
            continue
        seen.add(e.crossing)
        if e.role == UNDER:
            flips.append(e.crossing)
    return sorted(flips)


def test_plan_descending_knot_matches_classical_oracle_on_trefoil():
    # affine trefoil inside the disk: no boundary passes, distances all zero
    trefoil = parse_diagram(
        "boundary: 0\n"
        "crossing 1 -\ncrossing 2 -\ncrossing 3 -\n"
        "component c1: C1o C2u C3o C1u C2o C3u\n"
    )
    base = PointRef("c1", 0, AFTER)
    plan = plan_descending_knot(trefoil, FORWARD, base)
    oracle = _classical_descending_plan(trefoil.events("c1"))
    assert list(plan.flips) == oracle
    fixed = apply_plan(trefoil, plan)
    assert check_descending_knot(fixed, FORWARD, base) is None


def test_plan_descending_knot_kink():
    base = PointRef("c1", 0, AFTER)
    assert plan_descending_knot(D_KINK, FORWARD, base).flips == ()
    flipped = apply_plan(D_KINK, parse_plan("flip 1\n"))
    assert plan_descending_knot(flipped, FORWARD, base).flips == (1,)


def test_check_simple_descending():
    assert check_simple_descending(D_2LINES, 0) is None
    flipped = apply_plan(D_2LINES, parse_plan("flip 1\n"))
    assert check_simple_descending(flipped, 0) == 1


def test_classify_crossing():
    data = default_data(D_2LINES)
    assert classify_crossing(D_2LINES, data, 1).kind == "simple"
    kd = default_data(D_KINK)
    assert classify_crossing(D_KINK, kd, 1).kind == "unconstrained-M"


def test_classify_case1():
    # a contractible circle crossing a projective line twice
    d = parse_diagram(
        "boundary: 1\n"
        "crossing 1 +\ncrossing 2 -\n"
        "component c1: B0 C1u C2u\n"
        "component c2: C1o C2o\n"
    )
    data = default_data(d)
    rule = classify_crossing(d, data, 1)
    assert rule.kind == "case1" and rule.component == "c2"


def test_plan_then_check_descending():
    for d in (D_KINK, D_2LINES, kink3(), double_kink()):
        data = default_data(d)
        plan = plan_descending(d, data)
        fixed = apply_plan(d, plan)
        assert check_descending(fixed, data) is None
        # planning again on the fixed diagram is the empty plan
        assert plan_descending(fixed, data).flips == ()


def test_apply_plan_involution():
    plan = parse_plan("flip 1\n")
    assert apply_plan(apply_plan(D_KINK, plan), plan) == D_KINK
    d = apply_plan(D_KINK, plan)
    assert d.crossings[1] == -1
    assert [e.role for e in d.events("c1") if isinstance(e, CrossingPass)] == [UNDER, OVER]


def test_plan_never_flips_mset_crossings():
    for d in (D_KINK, double_kink(), kink3()):
        data = default_data(d)
        plan = plan_descending(d, data)
        for comp, mset in data.msets.items():
            assert not set(mset) & set(plan.flips)


def test_plan_serialization_round_trip():
    plan = plan_descending(apply_plan(D_2LINES, parse_plan("flip 1\n")))
    text = serialize_plan(plan)
    assert parse_plan(text).flips == plan.flips

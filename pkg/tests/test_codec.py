import pytest

from projknot import (
    DescendError,
    ParseError,
    parse_data,
    parse_diagram,
    serialize_data,
    serialize_diagram,
    validate_embedding,
    validate_structural,
)

from fixtures import D_2LINES, D_CIRCLE, D_KINK, D_LINE, double_kink, kink3


def test_parse_minimal():
    assert parse_diagram("boundary: 1\ncomponent c1: B0\n") == D_LINE
    assert parse_diagram("boundary: 0\ncomponent c1:\n") == D_CIRCLE


def test_parse_comments_and_blank_lines():
    text = "# a line\nboundary: 1\n\ncomponent c1: B0  # the only strand\n"
    assert parse_diagram(text) == D_LINE


def test_parse_rejects_half_used_crossing():
    with pytest.raises(ParseError, match="crossing 1"):
        parse_diagram("boundary: 1\ncrossing 1 +\ncomponent c1: B0 C1o\n")


def test_parse_rejects_duplicate_pair():
    with pytest.raises(ParseError, match="pair 0"):
        parse_diagram("boundary: 1\ncomponent c1: B0 B0\n")


def test_parse_rejects_unknown_token():
    with pytest.raises(ParseError, match="line 2"):
        parse_diagram("boundary: 1\ncomponent c1: Q9\n")


def test_serialize_examples():
    assert serialize_diagram(D_LINE) == "boundary: 1\ncomponent c1: B0\n"
    assert serialize_diagram(D_KINK) == "boundary: 1\ncrossing 1 +\ncomponent c1: B0 C1o C1u\n"


def test_round_trip():
    for d in (D_LINE, D_CIRCLE, D_KINK, D_2LINES, kink3(), double_kink()):
        assert parse_diagram(serialize_diagram(d)) == d


def test_validate_structural_parity_rule():
    # two disjoint projective lines never cross evenly
    from projknot.diagram import BoundaryPass, Diagram

    bad = Diagram(2, {}, {"c1": [BoundaryPass(0, 0)], "c2": [BoundaryPass(1, 0)]})
    problems = validate_structural(bad)
    assert any("parity" in p for p in problems)
    assert validate_structural(D_KINK) == []
    assert validate_structural(D_CIRCLE) == []


def test_validate_embedding_accepts_fixtures():
    for d in (D_LINE, D_CIRCLE, D_KINK, D_2LINES, kink3(), double_kink()):
        report = validate_embedding(d)
        assert report.ok, report.details


def test_validate_embedding_net_counts_for_line():
    report = validate_embedding(D_LINE)
    assert report.infinity_piece == (1, 2, 2)


def test_validate_embedding_both_kink_signs():
    flipped = parse_diagram("boundary: 1\ncrossing 1 -\ncomponent c1: B0 C1o C1u\n")
    assert validate_embedding(flipped).ok


def test_data_round_trip_kink():
    data = parse_data("mset c1: 1\npq B0\n", D_KINK)
    assert data.msets["c1"] == (1,)
    assert data.pq == 0
    assert parse_data(serialize_data(D_KINK, data), D_KINK) == data


def test_data_empty_mset_rejected_when_uncovered():
    with pytest.raises(DescendError, match="condition 1"):
        parse_data("mset c1:\npq B0\n", D_KINK)


def test_data_2lines_trivial():
    data = parse_data("pq B0\n", D_2LINES)
    assert data.pq == 0
    assert data.msets.get("c1", ()) == ()

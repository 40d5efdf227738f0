import pytest

from projknot import (
    DELTA,
    MU,
    ONE,
    BracketPolynomial,
    DiagramError,
    FORWARD,
    REVERSED,
    bracket,
    equivalent_up_to_unit,
    parse_diagram,
    poly,
    total_writhe,
)

from fixtures import D_2LINES, D_CIRCLE, D_KINK, D_LINE


def test_polynomial_arithmetic():
    assert poly(2) * poly(-2) == ONE
    assert DELTA == poly(2, coeff=-1) + poly(-2, coeff=-1)
    assert (MU + MU) == BracketPolynomial({(0, 1): 2})
    assert str(-poly(3) * MU) == "-A^3*u"
    assert str(DELTA) == "-A^2-A^-2"
    with pytest.raises(DiagramError):
        BracketPolynomial({(0, 2): 1})


def test_bracket_base_cases():
    assert bracket(D_CIRCLE) == DELTA
    assert bracket(D_LINE) == MU
    empty = parse_diagram("boundary: 0\n")
    assert bracket(empty) == ONE


def test_bracket_positive_kink():
    # A-state: loop plus line, weight A*delta*mu; B-state: line, weight 1/A*mu
    assert bracket(D_KINK) == -poly(3) * MU


def test_bracket_negative_kink():
    mirror = parse_diagram("boundary: 1\ncrossing 1 -\ncomponent c1: B0 C1o C1u\n")
    assert bracket(mirror) == -poly(-3) * MU


def test_bracket_two_lines():
    # either smoothing of the single crossing rejoins the two lines into one
    # loop through infinity twice, hence contractible: (A + 1/A) * delta
    expected = (poly(1) + poly(-1)) * DELTA
    assert bracket(D_2LINES) == expected
    assert bracket(D_2LINES).mu_degree() == 0


def test_writhe():
    assert total_writhe(D_2LINES, {"c1": FORWARD, "c2": FORWARD}) == 1
    assert total_writhe(D_CIRCLE, {"c1": FORWARD}) == 0
    assert total_writhe(D_KINK, {"c1": REVERSED}) == 1


def test_equivalent_up_to_unit():
    assert equivalent_up_to_unit(-poly(3) * MU, MU)
    assert not equivalent_up_to_unit(MU, DELTA)
    assert equivalent_up_to_unit(DELTA, DELTA)
    assert not equivalent_up_to_unit(poly(1), poly(2))
    assert equivalent_up_to_unit(poly(6), poly(0))

"""Shared small diagrams, written in the text format they are tested against."""

from projknot import parse_diagram

# one projective line
D_LINE = parse_diagram("boundary: 1\ncomponent c1: B0\n")

# one affine circle
D_CIRCLE = parse_diagram("boundary: 0\ncomponent c1:\n")

# projective line with a positive kink
D_KINK = parse_diagram("boundary: 1\ncrossing 1 +\ncomponent c1: B0 C1o C1u\n")

# two projective lines, first over second, one crossing
D_2LINES = parse_diagram(
    "boundary: 2\ncrossing 1 +\ncomponent c1: B0 C1o\ncomponent c2: B1 C1u\n"
)


def kink3():
    """Line whose kink straddles the line at infinity twice (3 arcs)."""
    from projknot import parse_diagram as p

    return p("boundary: 3\ncrossing 1 -\ncomponent c1: C1o B0 B1' C1u B2'\n")


def double_kink():
    """Kink nested inside another kink on one line."""
    from projknot import parse_diagram as p

    return p("boundary: 1\ncrossing 1 +\ncrossing 2 +\ncomponent c1: B0 C1o C2o C2u C1u\n")

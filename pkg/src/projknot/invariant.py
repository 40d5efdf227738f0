"""Bracket state sum for projective diagrams, the unlink certifier.

The bracket of a diagram is the sum over all smoothing states of

    A^(a-b) * delta^t * mu^n

where a and b count the two smoothing types, delta = -A^2 - A^-2, t is the
number of contractible loops of the state and n the number of
noncontractible ones.  Two disjoint noncontractible curves in the
projective plane would have to intersect, so n is 0 or 1 and mu has degree
at most one.  The empty diagram has bracket 1.  All arithmetic is exact
integer arithmetic.

The A-smoothing at a crossing joins each under-strand end to the
over-strand end that follows it counterclockwise; the B-smoothing joins
each over-strand end to the following under-strand end.  Together with the
sign convention of the diagram model this makes the bracket exactly
invariant under all moves that keep the crossing number and under the
boundary moves, and scales it by -A^(+-3) under kink moves.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from types import MappingProxyType
from typing import Mapping

from .diagram import (
    OVER,
    BoundaryPass,
    CrossingPass,
    Diagram,
    DiagramError,
)


@dataclass(frozen=True)
class BracketPolynomial:
    """Laurent polynomial in A with a mu variable of degree at most one.

    Terms map (A exponent, mu exponent) -> integer coefficient; zero
    coefficients are never stored.
    """

    terms: Mapping[tuple[int, int], int]

    def __post_init__(self):
        cleaned = {k: v for k, v in dict(self.terms).items() if v != 0}
        for (_, m) in cleaned:
            if m not in (0, 1):
                raise DiagramError("mu exponent must be 0 or 1")
        object.__setattr__(self, "terms", MappingProxyType(cleaned))

    def __eq__(self, other):
        if not isinstance(other, BracketPolynomial):
            return NotImplemented
        return dict(self.terms) == dict(other.terms)

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def __add__(self, other: "BracketPolynomial") -> "BracketPolynomial":
        t = dict(self.terms)
        for k, v in other.terms.items():
            t[k] = t.get(k, 0) + v
        return BracketPolynomial(t)

    def __mul__(self, other: "BracketPolynomial") -> "BracketPolynomial":
        t: dict[tuple[int, int], int] = {}
        for (a1, m1), v1 in self.terms.items():
            for (a2, m2), v2 in other.terms.items():
                k = (a1 + a2, m1 + m2)
                t[k] = t.get(k, 0) + v1 * v2
        return BracketPolynomial(t)

    def __neg__(self) -> "BracketPolynomial":
        return BracketPolynomial({k: -v for k, v in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def mu_degree(self) -> int:
        return max((m for (_, m) in self.terms), default=0)

    def shifted(self, a_shift: int) -> "BracketPolynomial":
        return BracketPolynomial({(a + a_shift, m): v for (a, m), v in self.terms.items()})

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (a, m) in sorted(self.terms, key=lambda km: (-km[1], -km[0])):
            coeff = self.terms[(a, m)]
            mag = abs(coeff)
            bits = []
            if mag != 1 or (a == 0 and m == 0):
                bits.append(str(mag))
            if a != 0:
                bits.append(f"A^{a}" if a != 1 else "A")
            if m == 1:
                bits.append("u")
            term = "*".join(bits)
            parts.append(("-" if coeff < 0 else "+") + term)
        out = "".join(parts)
        return out[1:] if out.startswith("+") else out

    __repr__ = __str__


def poly(a_exp: int = 0, mu_exp: int = 0, coeff: int = 1) -> BracketPolynomial:
    return BracketPolynomial({(a_exp, mu_exp): coeff})


ONE = poly()
MU = poly(mu_exp=1)
DELTA = BracketPolynomial({(2, 0): -1, (-2, 0): -1})


# ---------------------------------------------------------------------------
# state smoothing

def _ccw_ends(sign: int) -> list[tuple[str, str]]:
    """Strand ends at a crossing in counterclockwise order.

    Ends are (role, which): an "in" end is where the strand arrives in
    stored traversal order, an "out" end where it leaves.
    """
    if sign == 1:
        return [(OVER, "out"), ("under", "out"), (OVER, "in"), ("under", "in")]
    return [(OVER, "out"), ("under", "in"), (OVER, "in"), ("under", "out")]


def _smoothing(sign: int, kind: str) -> list[frozenset]:
    """The two end pairs joined by the A- or B-smoothing."""
    ends = _ccw_ends(sign)
    pairs = []
    first = "under" if kind == "A" else OVER
    for i, e in enumerate(ends):
        if e[0] == first:
            pairs.append(frozenset({e, ends[(i + 1) % 4]}))
    return pairs


@dataclass(frozen=True)
class SmoothingState:
    """One assignment of a smoothing type to every crossing, with the loop
    census of the smoothed diagram."""

    assignment: Mapping[int, str]
    contractible_loops: int
    noncontractible_loops: int

    def __post_init__(self):
        object.__setattr__(self, "assignment", MappingProxyType(dict(self.assignment)))


def _loop_census(d: Diagram, assignment: Mapping[int, str]) -> tuple[int, int]:
    """(contractible, noncontractible) loop counts of a smoothed diagram.

    Strand pieces between consecutive events are welded at boundary
    passages and rerouted at crossings per the state; loop class is the
    parity of boundary passages along the loop.
    """
    # piece t of component c runs from event t ("tail" end) to event t+1
    # ("head" end); a piece end is (comp, piece index, side)
    welds: dict[tuple, tuple] = {}

    def weld(a, b):
        welds[a] = b
        welds[b] = a

    for c, evs in d.components.items():
        n = len(evs)
        for i, e in enumerate(evs):
            if isinstance(e, BoundaryPass):
                weld((c, (i - 1) % n, "head"), (c, i, "tail"))
    ends_at: dict[tuple[int, tuple[str, str]], tuple] = {}
    for c, evs in d.components.items():
        n = len(evs)
        for i, e in enumerate(evs):
            if isinstance(e, CrossingPass):
                ends_at[(e.crossing, (e.role, "in"))] = (c, (i - 1) % n, "head")
                ends_at[(e.crossing, (e.role, "out"))] = (c, i, "tail")
    for x, sign in d.crossings.items():
        for pair in _smoothing(sign, assignment[x]):
            e1, e2 = sorted(pair)
            weld(ends_at[(x, e1)], ends_at[(x, e2)])

    def adjacent_event(end):
        comp, idx, side = end
        n = len(d.events(comp))
        return d.events(comp)[(idx + 1) % n if side == "head" else idx]

    contractible = sum(1 for evs in d.components.values() if not evs)
    noncontractible = 0
    done = set()
    for c, evs in d.components.items():
        for t in range(len(evs)):
            if (c, t) in done:
                continue
            done.add((c, t))
            infinity = 0
            start = (c, t, "head")
            cur = start
            while True:
                if isinstance(adjacent_event(cur), BoundaryPass):
                    infinity += 1
                partner = welds[cur]
                done.add((partner[0], partner[1]))
                cur = (partner[0], partner[1], "head" if partner[2] == "tail" else "tail")
                if cur == start:
                    break
            if infinity % 2 == 0:
                contractible += 1
            else:
                noncontractible += 1
    return contractible, noncontractible


def smoothing_state(d: Diagram, assignment: Mapping[int, str]) -> SmoothingState:
    t, n = _loop_census(d, assignment)
    if n > 1:
        raise DiagramError(
            "a state produced two disjoint noncontractible loops; "
            "the diagram cannot be embedded"
        )
    return SmoothingState(assignment, t, n)


def bracket(d: Diagram, max_crossings: int | None = None) -> BracketPolynomial:
    """Plain state sum over all smoothings; exact."""
    xs = sorted(d.crossings)
    if max_crossings is not None and len(xs) > max_crossings:
        raise DiagramError(
            f"{len(xs)} crossings exceed the state-sum cap of {max_crossings}"
        )
    total = BracketPolynomial({})
    for choice in product("AB", repeat=len(xs)):
        assignment = dict(zip(xs, choice))
        state = smoothing_state(d, assignment)
        a = sum(1 for k in choice if k == "A")
        weight = poly(a - (len(xs) - a))
        for _ in range(state.contractible_loops):
            weight = weight * DELTA
        if state.noncontractible_loops:
            weight = weight * MU
        total = total + weight
    return total


def equivalent_up_to_unit(p1: BracketPolynomial, p2: BracketPolynomial) -> bool:
    """Whether p1 = +-A^(3k) * p2 for some integer k."""
    if p1.is_zero() or p2.is_zero():
        return p1.is_zero() and p2.is_zero()
    lead1 = max(p1.terms, key=lambda km: (km[1], km[0]))
    lead2 = max(p2.terms, key=lambda km: (km[1], km[0]))
    if lead1[1] != lead2[1]:
        return False
    shift = lead1[0] - lead2[0]
    if shift % 3 != 0:
        return False
    moved = p2.shifted(shift)
    return p1 == moved or p1 == -moved

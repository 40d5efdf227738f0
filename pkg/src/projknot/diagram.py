"""Combinatorial model of link diagrams in the projective space.

A diagram is a disk with immersed arcs.  Arc endpoints sit on the boundary
circle in antipodal pairs; pair ``i`` of a diagram with ``k`` pairs occupies
boundary positions ``i`` and ``i + k`` in counterclockwise order (positions
``0 .. 2k-1``).  Each component is a cyclic sequence of events: passes
through crossings and passages through the boundary (the line at infinity
of the net).  A component with no events is a closed crossingless curve.

Everything here is a pure function of immutable values.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping

FORWARD = "forward"
REVERSED = "reversed"

OVER = "over"
UNDER = "under"

BEFORE = "before"
AFTER = "after"


class DiagramError(ValueError):
    """Structural misuse of a diagram value (bad ids, bad preconditions)."""


@dataclass(frozen=True)
class CrossingPass:
    """One of the two passes of a component through a crossing."""

    crossing: int
    role: str  # OVER or UNDER

    def __repr__(self):
        return f"C{self.crossing}{'o' if self.role == OVER else 'u'}"


@dataclass(frozen=True)
class BoundaryPass:
    """A single passage through the line at infinity.

    The strand exits the disk at position ``pair + side*k`` and re-enters
    at the antipodal position; the entry point is derived, never stored.
    """

    pair: int
    side: int  # 0 or 1

    def __repr__(self):
        return f"B{self.pair}{chr(39) if self.side else ''}"


Event = CrossingPass | BoundaryPass


def _natural_key(name: str):
    return tuple(int(p) if p.isdigit() else p for p in re.split(r"(\d+)", name))


@dataclass(frozen=True)
class Diagram:
    """A link diagram: pair count, signed crossing table, event cycles.

    ``crossings`` maps crossing id -> sign in {+1, -1} where +1 means the
    ordered frame (over-strand direction, under-strand direction) is
    counterclockwise in the disk, directions taken from the stored event
    order.
    """

    boundary_pairs: int
    crossings: Mapping[int, int]
    components: Mapping[str, tuple[Event, ...]]

    def __post_init__(self):
        object.__setattr__(self, "crossings", MappingProxyType(dict(self.crossings)))
        object.__setattr__(
            self,
            "components",
            MappingProxyType({c: tuple(ev) for c, ev in dict(self.components).items()}),
        )

    # MappingProxyType is unhashable; compare and hash by normalized content.
    def _key(self):
        return (
            self.boundary_pairs,
            tuple(sorted(self.crossings.items())),
            tuple(sorted(self.components.items(), key=lambda kv: _natural_key(kv[0]))),
        )

    def __eq__(self, other):
        if not isinstance(other, Diagram):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def component_ids(self) -> list[str]:
        return sorted(self.components, key=_natural_key)

    def events(self, comp: str) -> tuple[Event, ...]:
        try:
            return self.components[comp]
        except KeyError:
            raise DiagramError(f"unknown component {comp!r}") from None

    def component_of_pair(self, pair: int) -> tuple[str, int]:
        """(component, event index) of the passage using a boundary pair."""
        for c, evs in self.components.items():
            for i, e in enumerate(evs):
                if isinstance(e, BoundaryPass) and e.pair == pair:
                    return c, i
        raise DiagramError(f"boundary pair {pair} unused")


@dataclass(frozen=True)
class PointRef:
    """A point in the interior of an arc, adjacent to an event.

    ``offset`` is BEFORE or AFTER the event at ``index``.  When the event is
    a BoundaryPass this also designates the matching arc endpoint: the exit
    point for BEFORE, the entry point for AFTER; arc-distance computations
    nudge the point into the adjacent arc interior, which is exactly the
    endpoint extension of the distance.
    """

    component: str
    index: int
    offset: str = AFTER

    def gap(self, d: Diagram) -> int:
        n = len(d.events(self.component))
        if n == 0:
            raise DiagramError(f"component {self.component!r} has no events")
        if not 0 <= self.index < n:
            raise DiagramError(f"event index {self.index} out of range for {self.component!r}")
        return self.index % n if self.offset == AFTER else (self.index - 1) % n


Orientation = Mapping[str, str]


# ---------------------------------------------------------------------------
# slot bookkeeping: position s on the boundary circle belongs to pair s mod k

def exit_slot(d: Diagram, e: BoundaryPass) -> int:
    return e.pair + e.side * d.boundary_pairs


def entry_slot(d: Diagram, e: BoundaryPass) -> int:
    return e.pair + (1 - e.side) * d.boundary_pairs


def slot_table(d: Diagram) -> dict[int, tuple[str, int, str]]:
    """slot -> (component, event index, 'exit'|'entry') for every position."""
    table: dict[int, tuple[str, int, str]] = {}
    for c, evs in d.components.items():
        for i, e in enumerate(evs):
            if isinstance(e, BoundaryPass):
                table[exit_slot(d, e)] = (c, i, "exit")
                table[entry_slot(d, e)] = (c, i, "entry")
    return table


# ---------------------------------------------------------------------------
# primitive queries

def components_of(d: Diagram) -> list[tuple[str, int, bool]]:
    """Every component as (id, arc count, closed?).

    The arc count is the number of boundary passes when there is at least
    one, else 1: a crossingless or affine closed curve is a single arc.
    """
    out = []
    for c in d.component_ids():
        nb = sum(1 for e in d.events(c) if isinstance(e, BoundaryPass))
        out.append((c, nb if nb >= 1 else 1, nb == 0))
    return out


def homology_class(d: Diagram, comp: str) -> int:
    """0 for contractible components, 1 otherwise (parity of infinity passes)."""
    return sum(1 for e in d.events(comp) if isinstance(e, BoundaryPass)) % 2


def boundary_count(d: Diagram, comp: str) -> int:
    return sum(1 for e in d.events(comp) if isinstance(e, BoundaryPass))


def _check_orientation(o: Orientation, comp: str):
    if comp not in o:
        raise DiagramError(f"orientation not declared for component {comp!r}")
    if o[comp] not in (FORWARD, REVERSED):
        raise DiagramError(f"bad orientation {o[comp]!r}")


def _walk(d: Diagram, comp: str, start_gap: int, direction: str):
    """Yield event indices in traversal order starting just past start_gap."""
    n = len(d.events(comp))
    if direction == FORWARD:
        for t in range(1, n + 1):
            yield (start_gap + t) % n
    else:
        for t in range(n):
            yield (start_gap - t) % n


def arc_distance(d: Diagram, o: Orientation, p: PointRef, q: PointRef) -> int:
    """Times the line at infinity is crossed traveling from p to q along
    their common component in the direction given by ``o``.

    Two points in one gap are ordered by the event they are adjacent to:
    a point after event ``i`` precedes a point before event ``i+1``.
    """
    if p.component != q.component:
        raise DiagramError("arc distance needs both points on one component")
    _check_orientation(o, p.component)
    evs = d.events(p.component)
    g1, g2 = p.gap(d), q.gap(d)
    direction = o[p.component]
    if g1 == g2:
        s1 = 0 if p.offset == AFTER else 1
        s2 = 0 if q.offset == AFTER else 1
        ahead = s1 <= s2 if direction == FORWARD else s2 <= s1
        if ahead:
            return 0
        return sum(1 for e in evs if isinstance(e, BoundaryPass))
    dist = 0
    for i in _walk(d, p.component, g1, direction):
        # after crossing event i we stand in gap i (forward) or i-1 (reversed)
        if isinstance(evs[i], BoundaryPass):
            dist += 1
        here = i if direction == FORWARD else (i - 1) % len(evs)
        if here == g2:
            return dist
    raise AssertionError("unreachable: cyclic walk must hit the target gap")


def first_pass(d: Diagram, o: Orientation, p: PointRef, crossing: int) -> tuple[str, int]:
    """(role, arc distance) of the branch of ``crossing`` reached first when
    traveling from p in direction ``o``."""
    _check_orientation(o, p.component)
    evs = d.events(p.component)
    if not any(isinstance(e, CrossingPass) and e.crossing == crossing for e in evs):
        raise DiagramError(f"crossing {crossing} has no branch on {p.component!r}")
    dist = 0
    for i in _walk(d, p.component, p.gap(d), o[p.component]):
        e = evs[i]
        if isinstance(e, BoundaryPass):
            dist += 1
        elif e.crossing == crossing:
            return e.role, dist
    raise AssertionError("unreachable: branch exists on the component")


def crossing_partition(d: Diagram) -> dict[int, tuple[str, str]]:
    """crossing id -> (component of the over branch, component of the under branch)."""
    over: dict[int, str] = {}
    under: dict[int, str] = {}
    for c, evs in d.components.items():
        for e in evs:
            if isinstance(e, CrossingPass):
                (over if e.role == OVER else under)[e.crossing] = c
    return {x: (over[x], under[x]) for x in sorted(d.crossings)}


def self_crossings(d: Diagram, comp: str) -> list[int]:
    part = crossing_partition(d)
    return [x for x, (a, b) in part.items() if a == comp and b == comp]


def crossings_between(d: Diagram, c1: str, c2: str) -> list[int]:
    part = crossing_partition(d)
    return [x for x, (a, b) in part.items() if {a, b} == {c1, c2} and c1 != c2]


def local_writhe(d: Diagram, o: Orientation, crossing: int) -> int:
    """Stored sign adjusted by the parity of reversed strands at the crossing."""
    if crossing not in d.crossings:
        raise DiagramError(f"unknown crossing {crossing}")
    cover, cunder = crossing_partition(d)[crossing]
    _check_orientation(o, cover)
    _check_orientation(o, cunder)
    flips = (o[cover] == REVERSED) + (o[cunder] == REVERSED)
    return d.crossings[crossing] * (-1) ** flips


def total_writhe(d: Diagram, o: Orientation) -> int:
    return sum(local_writhe(d, o, x) for x in d.crossings)


# ---------------------------------------------------------------------------
# nets

@dataclass(frozen=True)
class NetCurve:
    """Image of one component in the net: crossing passes and passes of the
    line at infinity, with the antipodal identification resolved."""

    component: str
    items: tuple[tuple, ...]  # ("inf", pair) or ("x", crossing, role)

    def infinity_passes(self) -> int:
        return sum(1 for it in self.items if it[0] == "inf")


def net_of(d: Diagram) -> list[NetCurve]:
    curves = []
    for c in d.component_ids():
        items = []
        for e in d.events(c):
            if isinstance(e, BoundaryPass):
                items.append(("inf", e.pair))
            else:
                items.append(("x", e.crossing, e.role))
        curves.append(NetCurve(c, tuple(items)))
    return curves


# ---------------------------------------------------------------------------
# arcs

def arcs_of(d: Diagram, comp: str) -> list[tuple[int, int]]:
    """Arcs of a component as (boundary event index, next boundary event index).

    The arc starts at the entry point of the first passage and ends at the
    exit point of the second; its interior events are the crossing passes
    strictly between the two indices.  A component without boundary passes
    has no entries here (it is one closed arc).
    """
    evs = d.events(comp)
    b_idx = [i for i, e in enumerate(evs) if isinstance(e, BoundaryPass)]
    if not b_idx:
        return []
    return [(b_idx[t], b_idx[(t + 1) % len(b_idx)]) for t in range(len(b_idx))]


def arc_interior(d: Diagram, comp: str, arc: tuple[int, int]) -> list[int]:
    """Event indices strictly inside an arc, in traversal order."""
    evs = d.events(comp)
    n = len(evs)
    i, j = arc
    out = []
    t = (i + 1) % n
    while t != j:
        out.append(t)
        t = (t + 1) % n
    return out


# ---------------------------------------------------------------------------
# surgery helpers (new immutable values; optional gap-cursor remapping)

def replace_component(d: Diagram, comp: str, events: Iterable[Event]) -> Diagram:
    comps = dict(d.components)
    comps[comp] = tuple(events)
    return Diagram(d.boundary_pairs, dict(d.crossings), comps)


def with_crossings(d: Diagram, crossings: Mapping[int, int]) -> Diagram:
    return Diagram(d.boundary_pairs, dict(crossings), dict(d.components))


def insert_events(d: Diagram, comp: str, gap: int, new: list[Event],
                  hug: str = "left") -> tuple[Diagram, "IndexMap"]:
    """Insert events into a gap.  ``hug`` says which flanking event the new
    block is adjacent to; a cursor sitting in the gap stays on the other side."""
    evs = list(d.events(comp))
    pos = gap + 1
    evs[pos:pos] = new
    imap = IndexMap(comp, insert_at=pos, count=len(new), hug=hug, gap=gap)
    return replace_component(d, comp, evs), imap


def remove_events(d: Diagram, comp: str, idxs: set[int]) -> tuple[Diagram, "IndexMap"]:
    evs = [e for i, e in enumerate(d.events(comp)) if i not in idxs]
    imap = IndexMap(comp, removed=sorted(idxs))
    return replace_component(d, comp, evs), imap


@dataclass(frozen=True)
class IndexMap:
    """Remaps event indices / gap cursors across one surgery on one component."""

    component: str
    insert_at: int = -1
    count: int = 0
    hug: str = "left"
    gap: int = -1
    removed: tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "removed", tuple(self.removed))

    def map_index(self, comp: str, idx: int) -> int:
        if comp != self.component:
            return idx
        if self.removed:
            if idx in self.removed:
                raise DiagramError(f"event {idx} was removed")
            return idx - sum(1 for r in self.removed if r < idx)
        return idx + self.count if idx >= self.insert_at else idx

    def map_gap(self, comp: str, gap: int) -> int:
        if comp != self.component:
            return gap
        if self.removed:
            return gap - sum(1 for r in self.removed if r <= gap)
        if gap > self.gap or self.gap < 0:
            return gap + self.count if gap >= self.insert_at else gap
        if gap == self.gap:
            # cursor shares the split gap: it stays adjacent to the event the
            # insertion did NOT hug
            return gap + self.count if self.hug == "left" else gap
        return gap

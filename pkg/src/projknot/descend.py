"""Descending diagrams: simplifying sets, dashed parts, checks and planners.

A noncontractible component ``b`` orients itself at each self-crossing: the
unique direction in which the arc distance from the upper branch to the
lower one is even.  Traveling that way from the upper branch to the lower
branch dashes a part of ``b``.  An ordered simplifying set is a set of
self-crossings whose dashed parts cover all self-crossings and meet each
other only at crossing points.  Removing all dashed parts and all
contractible components leaves the simple diagram.  A diagram together
with the data (component order, orientations, basepoints, simplifying
sets, distinguished endpoint pair) is descending when every crossing obeys
the parity rule of its class, and a descending diagram is always a diagram
of the standard unlink; the planner flips exactly the crossings that
violate their rule.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

from .diagram import (
    AFTER,
    BEFORE,
    FORWARD,
    OVER,
    REVERSED,
    UNDER,
    BoundaryPass,
    CrossingPass,
    Diagram,
    DiagramError,
    PointRef,
    _walk,
    crossing_partition,
    first_pass,
    homology_class,
    self_crossings,
)


class DescendError(DiagramError):
    """Invalid descending data or unclassifiable crossing."""


# ---------------------------------------------------------------------------
# dashed parts and the partial order on self-crossings

@dataclass(frozen=True)
class DashedPart:
    """The part of a component dashed by one of its self-crossings."""

    component: str
    crossing: int
    orientation: str  # direction making the upper->lower span even
    span: tuple[int, ...]  # event indices from upper to lower branch, exclusive

    def __contains__(self, event_index: int) -> bool:
        return event_index in set(self.span)


def _pass_indices(d: Diagram, comp: str, crossing: int) -> tuple[int, int]:
    """(over index, under index) of a self-crossing on a component."""
    over = under = None
    for i, e in enumerate(d.events(comp)):
        if isinstance(e, CrossingPass) and e.crossing == crossing:
            if e.role == OVER:
                over = i
            else:
                under = i
    if over is None or under is None:
        raise DescendError(f"crossing {crossing} is not a self-crossing of {comp!r}")
    return over, under


def _span_between(d: Diagram, comp: str, start: int, stop: int, direction: str) -> list[int]:
    """Event indices strictly between two events in the given direction."""
    n = len(d.events(comp))
    out = []
    step = 1 if direction == FORWARD else -1
    t = (start + step) % n
    while t != stop:
        out.append(t)
        t = (t + step) % n
    return out


def orientation_determined_by(d: Diagram, comp: str, crossing: int) -> str:
    """The direction in which the arc distance from the upper branch of the
    crossing to the lower one is even; unique because the component is
    noncontractible."""
    if homology_class(d, comp) != 1:
        raise DescendError(f"component {comp!r} is contractible; no determined orientation")
    over, under = _pass_indices(d, comp, crossing)
    evs = d.events(comp)
    fwd = sum(1 for i in _span_between(d, comp, over, under, FORWARD)
              if isinstance(evs[i], BoundaryPass))
    return FORWARD if fwd % 2 == 0 else REVERSED


def dashed_part_of(d: Diagram, comp: str, crossing: int) -> DashedPart:
    direction = orientation_determined_by(d, comp, crossing)
    over, under = _pass_indices(d, comp, crossing)
    span = _span_between(d, comp, over, under, direction)
    evs = d.events(comp)
    bcount = sum(1 for i in span if isinstance(evs[i], BoundaryPass))
    assert bcount % 2 == 0, "dashed span must cross the line at infinity evenly"
    return DashedPart(comp, crossing, direction, tuple(span))


def crossing_leq(d: Diagram, comp: str, y: int, x: int) -> bool:
    """y <= x when both branches of y lie in the dashed part determined by x."""
    selfs = set(self_crossings(d, comp))
    if y not in selfs or x not in selfs:
        raise DescendError(f"{y} and {x} must be self-crossings of {comp!r}")
    if y == x:
        return True
    span = set(dashed_part_of(d, comp, x).span)
    oy, uy = _pass_indices(d, comp, y)
    return oy in span and uy in span


# ---------------------------------------------------------------------------
# simplifying sets

@dataclass(frozen=True)
class SimplifyingSet:
    component: str
    crossings: tuple[int, ...]  # construction order


def build_simplifying_set(d: Diagram, comp: str) -> SimplifyingSet:
    """Greedy construction: repeatedly take a maximal surviving self-crossing
    (smallest id among maximal ones) and remove its dashed block.

    Removing a block keeps relative order and the parity of every surviving
    stretch, so dashed parts and the partial order restricted to survivors
    agree with those computed on the original diagram; the loop therefore
    works with the original spans throughout.
    """
    if homology_class(d, comp) != 1:
        raise DescendError(f"component {comp!r} is contractible")
    survivors = set(self_crossings(d, comp))
    spans = {x: set(dashed_part_of(d, comp, x).span) for x in survivors}
    passes = {x: _pass_indices(d, comp, x) for x in survivors}
    chosen: list[int] = []
    while survivors:
        def leq(a: int, b: int) -> bool:
            return a == b or (passes[a][0] in spans[b] and passes[a][1] in spans[b])

        maximal = [x for x in survivors
                   if not any(z != x and leq(x, z) for z in survivors)]
        x = min(maximal)
        chosen.append(x)
        block = spans[x] | set(passes[x])
        survivors = {y for y in survivors
                     if y != x and passes[y][0] not in block and passes[y][1] not in block}
    return SimplifyingSet(comp, tuple(chosen))


def check_simplifying_set(d: Diagram, comp: str, crossings) -> str | None:
    """None when the set is simplifying, else a description of the violated
    condition: (1) every self-crossing is in the set or has a branch in a
    dashed part of a member; (2) dashed parts of members are disjoint except
    for crossing points."""
    mset = list(crossings)
    selfs = set(self_crossings(d, comp))
    for x in mset:
        if x not in selfs:
            raise DescendError(f"{x} is not a self-crossing of {comp!r}")
    spans = {x: set(dashed_part_of(d, comp, x).span) for x in mset}
    covered = set().union(*spans.values()) if spans else set()
    for y in sorted(selfs):
        if y in mset:
            continue
        oy, uy = _pass_indices(d, comp, y)
        if oy not in covered and uy not in covered:
            return f"condition 1: self-crossing {y} of {comp} is neither in the set nor dashed"
    for i, x1 in enumerate(mset):
        for x2 in mset[i + 1:]:
            common = spans[x1] & spans[x2]
            if common:
                return (f"condition 2: dashed parts of {x1} and {x2} on {comp} share "
                        f"arc material at events {sorted(common)}")
    return None


# ---------------------------------------------------------------------------
# descending data

@dataclass(frozen=True)
class DescendingData:
    """Input data for the general descending notion.

    ``order`` lists the contractible components in processing order;
    ``msets`` holds an ordered simplifying set per noncontractible
    component; ``pq`` is the distinguished endpoint pair, required whenever
    the diagram has a noncontractible component.
    """

    order: tuple[str, ...]
    orientations: Mapping[str, str]
    basepoints: Mapping[str, PointRef]
    msets: Mapping[str, tuple[int, ...]]
    pq: int | None

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(self.order))
        object.__setattr__(self, "orientations", MappingProxyType(dict(self.orientations)))
        object.__setattr__(self, "basepoints", MappingProxyType(dict(self.basepoints)))
        object.__setattr__(
            self, "msets",
            MappingProxyType({c: tuple(v) for c, v in dict(self.msets).items()}),
        )

    def mset(self, comp: str) -> tuple[int, ...]:
        return self.msets.get(comp, ())


def validate_data(d: Diagram, data: DescendingData) -> None:
    zero = [c for c in d.component_ids() if homology_class(d, c) == 0]
    one = [c for c in d.component_ids() if homology_class(d, c) == 1]
    if sorted(data.order) != sorted(zero):
        raise DescendError(
            f"order must list every contractible component exactly once "
            f"(expected {zero}, got {sorted(data.order)})"
        )
    for c in data.order:
        if c not in data.orientations or data.orientations[c] not in (FORWARD, REVERSED):
            raise DescendError(f"missing or bad orientation for {c!r}")
        bp = data.basepoints.get(c)
        if bp is None or bp.component != c:
            raise DescendError(f"missing basepoint for {c!r}")
        if d.events(c) and not 0 <= bp.index < len(d.events(c)):
            raise DescendError(f"basepoint index {bp.index} out of range for {c!r}")
    for c in data.msets:
        if c not in d.components:
            raise DescendError(f"mset names unknown component {c!r}")
        if homology_class(d, c) != 1:
            raise DescendError(f"mset on contractible component {c!r}")
    for c in one:
        verdict = check_simplifying_set(d, c, data.mset(c))
        if verdict is not None:
            raise DescendError(verdict)
    if one:
        if data.pq is None:
            raise DescendError("a distinguished pair pq is required")
        if not 0 <= data.pq < d.boundary_pairs:
            raise DescendError(f"pq pair {data.pq} out of range")
        comp, idx = d.component_of_pair(data.pq)
        if homology_class(d, comp) != 1:
            raise DescendError(f"pq pair {data.pq} is on a contractible component")
        for x in data.mset(comp):
            if idx in set(dashed_part_of(d, comp, x).span):
                raise DescendError(f"pq pair {data.pq} lies in the dashed part of crossing {x}")
    elif data.pq is not None:
        raise DescendError("pq given but the diagram has no noncontractible component")


def default_data(d: Diagram) -> DescendingData:
    """Canonical data: components in id order, forward orientations,
    basepoints after the first event, greedy simplifying sets, and the
    lowest surviving boundary pair as the distinguished pair."""
    zero = [c for c in d.component_ids() if homology_class(d, c) == 0]
    one = [c for c in d.component_ids() if homology_class(d, c) == 1]
    msets = {c: build_simplifying_set(d, c).crossings for c in one}
    pq = None
    if one:
        dashed_b: dict[str, set[int]] = {
            c: set().union(*(set(dashed_part_of(d, c, x).span) for x in msets[c]))
            if msets[c] else set()
            for c in one
        }
        surviving_pairs = []
        for c in one:
            for i, e in enumerate(d.events(c)):
                if isinstance(e, BoundaryPass) and i not in dashed_b[c]:
                    surviving_pairs.append(e.pair)
        pq = min(surviving_pairs)
    return DescendingData(
        order=tuple(zero),
        orientations={c: FORWARD for c in zero},
        basepoints={c: PointRef(c, 0, AFTER) for c in zero},
        msets=msets,
        pq=pq,
    )


# ---------------------------------------------------------------------------
# simple diagram extraction

@dataclass(frozen=True)
class SimpleMap:
    """How the simple diagram sits inside the original one."""

    event_origin: Mapping[tuple[str, int], tuple[str, int]]
    pair_map: Mapping[int, int]  # original pair -> simple pair

    def __post_init__(self):
        object.__setattr__(self, "event_origin", MappingProxyType(dict(self.event_origin)))
        object.__setattr__(self, "pair_map", MappingProxyType(dict(self.pair_map)))


def extract_simple_diagram(d: Diagram, data: DescendingData) -> tuple[Diagram, SimpleMap]:
    """Remove dashed parts and contractible components, joining the upper
    and lower remainders at each simplifying-set crossing."""
    one = [c for c in d.component_ids() if homology_class(d, c) == 1]
    dead_events: dict[str, set[int]] = {}
    for c in one:
        dead = set()
        for x in data.mset(c):
            dead |= set(dashed_part_of(d, c, x).span)
            dead |= set(_pass_indices(d, c, x))
        dead_events[c] = dead
    dead_crossings = set()
    for c, evs in d.components.items():
        gone_comp = homology_class(d, c) == 0
        for i, e in enumerate(evs):
            if isinstance(e, CrossingPass) and (gone_comp or i in dead_events.get(c, set())):
                dead_crossings.add(e.crossing)

    surviving_pairs = set()
    kept: dict[str, list[tuple[int, object]]] = {}
    for c in one:
        rows = []
        for i, e in enumerate(d.events(c)):
            if i in dead_events[c]:
                continue
            if isinstance(e, CrossingPass) and e.crossing in dead_crossings:
                continue
            rows.append((i, e))
            if isinstance(e, BoundaryPass):
                surviving_pairs.add(e.pair)
        kept[c] = rows

    pair_map = {p: rank for rank, p in enumerate(sorted(surviving_pairs))}
    comps = {}
    origin = {}
    for c, rows in kept.items():
        events = []
        for new_i, (old_i, e) in enumerate(rows):
            if isinstance(e, BoundaryPass):
                e = BoundaryPass(pair_map[e.pair], e.side)
            events.append(e)
            origin[(c, new_i)] = (c, old_i)
        comps[c] = tuple(events)
    crossings = {x: s for x, s in d.crossings.items() if x not in dead_crossings}
    simple = Diagram(len(surviving_pairs), crossings, comps)
    return simple, SimpleMap(origin, pair_map)


@dataclass(frozen=True)
class ComponentLabeling:
    """Components of a simple diagram in counterclockwise first-encounter
    order from the distinguished pair, with their endpoint pairs.

    Each component is oriented so that its labeled endpoint starts the arc
    it belongs to; only the parity of arc distances from the endpoint is
    ever consumed and that parity does not depend on which point of the
    couple is taken, so the stored orientation is the forward one.
    """

    order: tuple[str, ...]
    pairs: Mapping[str, int]

    def __post_init__(self):
        object.__setattr__(self, "pairs", MappingProxyType(dict(self.pairs)))

    def index(self, comp: str) -> int:
        return self.order.index(comp)

    def start(self, d: Diagram, comp: str) -> PointRef:
        """Interior point right past the labeled endpoint, forward."""
        c, idx = d.component_of_pair(self.pairs[comp])
        assert c == comp
        return PointRef(comp, idx, AFTER)


def _assert_simple(d: Diagram) -> None:
    for c in d.component_ids():
        if homology_class(d, c) != 1:
            raise DescendError(f"not simple: component {c!r} is contractible")
        if self_crossings(d, c):
            raise DescendError(f"not simple: component {c!r} has self-crossings")


def label_simple_components(d: Diagram, pq: int) -> ComponentLabeling:
    _assert_simple(d)
    k = d.boundary_pairs
    if not 0 <= pq < k:
        raise DescendError(f"pair {pq} out of range")
    order = []
    pairs = {}
    for t in range(k):
        p = (pq + t) % k
        comp, _ = d.component_of_pair(p)
        if comp not in pairs:
            order.append(comp)
            pairs[comp] = p
    return ComponentLabeling(tuple(order), pairs)


# ---------------------------------------------------------------------------
# descending checks

def check_descending_knot(d: Diagram, orientation: str, basepoint: PointRef) -> int | None:
    """For a one-component diagram: every crossing must be first passed over
    exactly when its arc distance from the basepoint is even.  Returns the
    first offending crossing along the traversal, or None."""
    if len(d.components) != 1:
        raise DescendError("knot check needs a one-component diagram")
    return _first_offender_on(d, basepoint.component, orientation, basepoint)


def _first_offender_on(d: Diagram, comp: str, orientation: str, basepoint: PointRef,
                       collect: list | None = None) -> int | None:
    """Walk a component from its basepoint; report or collect crossings whose
    first pass violates the parity rule."""
    evs = d.events(comp)
    if not evs:
        return None
    seen = set()
    dist = 0
    for i in _walk(d, comp, basepoint.gap(d), orientation):
        e = evs[i]
        if isinstance(e, BoundaryPass):
            dist += 1
            continue
        if e.crossing in seen:
            continue
        seen.add(e.crossing)
        want = OVER if dist % 2 == 0 else UNDER
        if e.role != want:
            if collect is None:
                return e.crossing
            collect.append(e.crossing)
    return None


def plan_descending_knot(d: Diagram, orientation: str, basepoint: PointRef) -> "CrossingChangePlan":
    if len(d.components) != 1:
        raise DescendError("knot planner needs a one-component diagram")
    comp = basepoint.component
    flips: list[int] = []
    _first_offender_on(d, comp, orientation, basepoint, collect=flips)
    return CrossingChangePlan(tuple(sorted(flips)), {x: "knot" for x in flips})


def check_simple_descending(d: Diagram, pq: int) -> int | None:
    """For each crossing of a simple diagram between earlier and later labeled
    components, the earlier branch must be over exactly when its arc distance
    from the earlier component's endpoint is even."""
    labeling = label_simple_components(d, pq)
    part = crossing_partition(d)
    for x in sorted(d.crossings):
        cover, cunder = part[x]
        i, j = sorted((labeling.index(cover), labeling.index(cunder)))
        comp_i = labeling.order[i]
        role, dist = first_pass(d, {comp_i: FORWARD}, labeling.start(d, comp_i), x)
        want = OVER if dist % 2 == 0 else UNDER
        if role != want:
            return x
    return None


# ---------------------------------------------------------------------------
# classification of crossings and the planner

@dataclass(frozen=True)
class Rule:
    kind: str  # "unconstrained-M" | "simple" | "case1" | "case2"
    component: str | None = None
    reference: int | None = None  # the simplifying-set crossing for case 2
    clause: int | None = None

    def text(self) -> str:
        if self.kind == "case1":
            return f"case1 {self.component}"
        if self.kind == "case2":
            return f"case2 {self.component} {self.reference} clause{self.clause}"
        return self.kind


@dataclass(frozen=True)
class _Context:
    """Derived structure shared by classification, checking and planning."""

    simple: Diagram
    smap: SimpleMap
    labeling: ComponentLabeling | None
    spans: Mapping[str, Mapping[int, frozenset]]  # comp -> mset crossing -> span


def _context(d: Diagram, data: DescendingData) -> _Context:
    validate_data(d, data)
    simple, smap = extract_simple_diagram(d, data)
    labeling = None
    if data.pq is not None:
        labeling = label_simple_components(simple, smap.pair_map[data.pq])
    spans = {}
    for c in d.component_ids():
        if homology_class(d, c) == 1:
            spans[c] = {x: frozenset(dashed_part_of(d, c, x).span) for x in data.mset(c)}
    return _Context(simple, smap, labeling, spans)


def classify_crossing(d: Diagram, data: DescendingData, x: int,
                      ctx: _Context | None = None) -> Rule:
    """Assign exactly one governing rule to a crossing."""
    ctx = ctx or _context(d, data)
    part = crossing_partition(d)
    if x not in part:
        raise DescendError(f"unknown crossing {x}")
    cover, cunder = part[x]
    if cover == cunder and x in data.mset(cover):
        return Rule("unconstrained-M", component=cover)
    zero_comps = [c for c in (cover, cunder) if homology_class(d, c) == 0]
    if zero_comps:
        best = min(zero_comps, key=data.order.index)
        return Rule("case1", component=best)
    if x in ctx.simple.crossings:
        return Rule("simple")
    # a branch lies in a dashed part; pick the governing reference
    branch_idx = {}
    for c, evs in d.components.items():
        for i, e in enumerate(evs):
            if isinstance(e, CrossingPass) and e.crossing == x:
                branch_idx.setdefault(c, []).append((i, e.role))
    candidates = []
    for c, hits in branch_idx.items():
        for i, _role in hits:
            for ref, span in ctx.spans.get(c, {}).items():
                if i in span:
                    pos = data.mset(c).index(ref)
                    lab = ctx.labeling.index(c)
                    candidates.append((lab, pos, ref, c, i))
    if not candidates:
        raise DescendError(f"crossing {x} is unclassifiable; the data is inconsistent")
    lab, pos, ref, comp, b_idx = min(candidates)
    # clause bookkeeping: locate the other branch
    other = [(c, i) for c, hits in branch_idx.items() for i, _r in hits
             if (c, i) != (comp, b_idx)]
    (oc, oi), = other
    if ctx.labeling.index(oc) > lab:
        clause = 1
    elif oc == comp and any(oi in span for span in ctx.spans.get(oc, {}).values()):
        clause = 3
    else:
        clause = 2
    return Rule("case2", component=comp, reference=ref, clause=clause)


def _rule_satisfied(d: Diagram, data: DescendingData, x: int, rule: Rule,
                    ctx: _Context) -> bool:
    if rule.kind == "unconstrained-M":
        return True
    if rule.kind == "simple":
        labeling = ctx.labeling
        cover, cunder = crossing_partition(ctx.simple)[x]
        i = min(labeling.index(cover), labeling.index(cunder))
        comp_i = labeling.order[i]
        role, dist = first_pass(ctx.simple, {comp_i: FORWARD},
                                labeling.start(ctx.simple, comp_i), x)
        return role == (OVER if dist % 2 == 0 else UNDER)
    if rule.kind == "case1":
        comp = rule.component
        bp = data.basepoints[comp]
        role, dist = first_pass(d, {comp: data.orientations[comp]}, bp, x)
        return role == (OVER if dist % 2 == 0 else UNDER)
    # case 2: travel from the upper branch of the reference crossing in the
    # orientation it determines
    comp, ref = rule.component, rule.reference
    direction = orientation_determined_by(d, comp, ref)
    over_idx, _ = _pass_indices(d, comp, ref)
    start = PointRef(comp, over_idx, AFTER if direction == FORWARD else BEFORE)
    role, dist = first_pass(d, {comp: direction}, start, x)
    return role == (OVER if dist % 2 == 0 else UNDER)


def check_descending(d: Diagram, data: DescendingData) -> tuple[int, Rule] | None:
    """None when descending; else the smallest offending crossing and its rule."""
    ctx = _context(d, data)
    for x in sorted(d.crossings):
        rule = classify_crossing(d, data, x, ctx)
        if not _rule_satisfied(d, data, x, rule, ctx):
            return x, rule
    return None


@dataclass(frozen=True)
class CrossingChangePlan:
    """Crossings to flip, with the rule that forced each flip."""

    flips: tuple[int, ...]
    rules: Mapping[int, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "flips", tuple(sorted(self.flips)))
        object.__setattr__(self, "rules", MappingProxyType(dict(self.rules)))


def plan_descending(d: Diagram, data: DescendingData | None = None) -> CrossingChangePlan:
    """Flip exactly the crossings whose rule is violated; simplifying-set
    crossings are never flipped."""
    data = data if data is not None else default_data(d)
    ctx = _context(d, data)
    flips = []
    rules = {}
    for x in sorted(d.crossings):
        rule = classify_crossing(d, data, x, ctx)
        if not _rule_satisfied(d, data, x, rule, ctx):
            flips.append(x)
            rules[x] = rule.text()
    return CrossingChangePlan(tuple(flips), rules)


def apply_plan(d: Diagram, plan: CrossingChangePlan) -> Diagram:
    """Swap over and under at each planned crossing and mirror its sign."""
    flips = set(plan.flips)
    unknown = flips - set(d.crossings)
    if unknown:
        raise DescendError(f"plan flips unknown crossings {sorted(unknown)}")
    comps = {}
    for c, evs in d.components.items():
        comps[c] = tuple(
            CrossingPass(e.crossing, UNDER if e.role == OVER else OVER)
            if isinstance(e, CrossingPass) and e.crossing in flips else e
            for e in evs
        )
    crossings = {x: (-s if x in flips else s) for x, s in d.crossings.items()}
    return Diagram(d.boundary_pairs, crossings, comps)


# ---------------------------------------------------------------------------
# plan text format

def serialize_plan(plan: CrossingChangePlan) -> str:
    lines = [f"flip {x} {plan.rules.get(x, '')}".rstrip() for x in plan.flips]
    return "\n".join(lines) + "\n" if lines else ""


def parse_plan(text: str) -> CrossingChangePlan:
    flips = []
    rules = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(maxsplit=2)
        if parts[0] != "flip" or len(parts) < 2 or not parts[1].isdigit():
            raise DescendError(f"plan line {ln}: expected 'flip <id> [rule]'")
        x = int(parts[1])
        flips.append(x)
        if len(parts) == 3:
            rules[x] = parts[2]
    return CrossingChangePlan(tuple(flips), rules)

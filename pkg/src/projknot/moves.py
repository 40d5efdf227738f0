"""Reidemeister move engine and the constructive simplification pipeline.

Moves on diagrams in the projective space:

* o1 adds or removes a kink (one crossing whose passes are adjacent),
* o2 adds or removes a clean bigon (two crossings adjacent along both
  strands, one strand on top at both, opposite signs),
* o3 slides a strand across a crossing: the three adjacent event pairs
  around a triangular face swap simultaneously,
* o4 detaches a crossing-free arc whose endpoint positions are adjacent on
  the boundary, deleting two boundary pairs (or attaches one),
* o5 transposes two adjacent boundary pairs; the two strands sweep past
  each other at both antipodal wedges, so exactly two crossings appear (or
  disappear), one of each handedness, the sliding strand passing under at
  one wedge and over at the antipodal one.  A transposition changing the
  crossing count by one would break the parity between pairwise crossing
  counts and homology classes, so the two-wedge form is the elementary
  move.

Two bookkeeping records, add-line and remove-line, materialize and remove
the helper line that the simple-diagram reduction stacks above everything;
they are not isotopy moves of the link but cancel each other inside every
trace that uses them.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Mapping

from .diagram import (
    OVER,
    UNDER,
    BoundaryPass,
    CrossingPass,
    Diagram,
    DiagramError,
    boundary_count,
    crossing_partition,
    entry_slot,
    exit_slot,
    slot_table,
)
from .faces import build_complex


class MoveError(DiagramError):
    """Stale or inapplicable move site, or an exceeded move budget."""


# ---------------------------------------------------------------------------
# sites

@dataclass(frozen=True)
class MoveSite:
    """One applicable move: kind, direction and kind-specific references."""

    kind: str  # "o1".."o5", "add-line", "remove-line"
    direction: str  # "reduce" | "expand" | "slide" | "insert" | "delete"
    refs: tuple = ()

    def token(self) -> str:
        bits = [self.kind, self.direction]
        for r in self.refs:
            bits.append(",".join(str(p) for p in r) if isinstance(r, tuple) else str(r))
        return " ".join(bits)

    @staticmethod
    def from_token(text: str) -> "MoveSite":
        bits = text.split()
        if len(bits) < 2:
            raise MoveError(f"bad site token {text!r}")
        kind, direction, raw = bits[0], bits[1], bits[2:]
        refs = []
        for r in raw:
            if "," in r:
                refs.append(tuple(int(p) if p.lstrip("-").isdigit() else p
                                  for p in r.split(",")))
            else:
                refs.append(int(r) if r.lstrip("-").isdigit() else r)
        return MoveSite(kind, direction, tuple(refs))


# ---------------------------------------------------------------------------
# reference remapping across one move

class RefMap:
    """Maps pair ids and gap cursors across one surgery."""

    def __init__(self):
        self.pairs: dict[int, int | None] | None = None  # None means identity
        self.gaps: dict[str, dict[int, int | None]] = {}  # full tables per comp

    def map_pair(self, pair: int) -> int | None:
        if self.pairs is None:
            return pair
        return self.pairs.get(pair)

    def map_gap(self, comp: str, gap: int) -> int:
        table = self.gaps.get(comp)
        if table is None:
            return gap
        out = table.get(gap)
        if out is None:
            raise MoveError(f"gap cursor ({comp},{gap}) destroyed by the move")
        return out

    @staticmethod
    def for_insert(comp: str, n_before: int, gap: int, count: int, hug: str) -> "RefMap":
        rm = RefMap()
        table = {}
        for g in range(max(n_before, 1)):
            if g < gap:
                table[g] = g
            elif g == gap:
                table[g] = gap + count if hug == "left" else gap
            else:
                table[g] = g + count
        rm.gaps[comp] = table
        return rm

    @staticmethod
    def for_removals(removals: Mapping[str, tuple[set, int]]) -> "RefMap":
        """removals: comp -> (removed event indices, old event count).

        A component emptied by the removal keeps a single conceptual gap 0.
        """
        rm = RefMap()
        for comp, (gone, n) in removals.items():
            table = {}
            n_new = n - len(gone)
            for g in range(n):
                shifted = g - sum(1 for r in gone if r <= g)
                table[g] = shifted % n_new if n_new else 0
            rm.gaps[comp] = table
        return rm

    def merge(self, other: "RefMap") -> "RefMap":
        out = RefMap()
        if self.pairs is None:
            out.pairs = None if other.pairs is None else dict(other.pairs)
        elif other.pairs is None:
            out.pairs = dict(self.pairs)
        else:
            out.pairs = {p: (None if q is None else other.pairs.get(q))
                         for p, q in self.pairs.items()}
        for c in set(self.gaps) | set(other.gaps):
            t1, t2 = self.gaps.get(c), other.gaps.get(c)
            if t1 is None:
                out.gaps[c] = dict(t2)
            elif t2 is None:
                out.gaps[c] = dict(t1)
            else:
                out.gaps[c] = {g: (None if v is None else t2.get(v))
                               for g, v in t1.items()}
        return out


# ---------------------------------------------------------------------------
# slot rebuilding for pair surgeries

def _slot_items(d: Diagram) -> list[tuple[str, int, str]]:
    table = slot_table(d)
    return [table[s] for s in range(2 * d.boundary_pairs)]


def _rewrite_pairs(d: Diagram, items: list[tuple[str, int, str]]) -> tuple[Diagram, dict[int, int]]:
    """Rebuild every boundary passage from a new slot occupancy list.

    ``items`` holds (component, post-surgery event index, end) per slot and
    must keep antipodal ends of one passage exactly half a turn apart.
    """
    n = len(items)
    assert n % 2 == 0
    k = n // 2
    assign = {}
    for s, (comp, idx, end) in enumerate(items):
        partner = items[(s + k) % n]
        if (partner[0], partner[1]) != (comp, idx):
            raise MoveError("slot list lost antipodal pairing")
        if end == "exit":
            assign[(comp, idx)] = (s % k, s // k)
    pair_map: dict[int, int] = {}
    comps = {}
    for c, evs in d.components.items():
        out = []
        for i, e in enumerate(evs):
            if isinstance(e, BoundaryPass):
                pair, side = assign[(c, i)]
                pair_map[e.pair] = pair
                out.append(BoundaryPass(pair, side))
            else:
                out.append(e)
        comps[c] = tuple(out)
    return Diagram(k, dict(d.crossings), comps), pair_map


# ---------------------------------------------------------------------------
# find_sites

def _adjacent_pass_pairs(d: Diagram):
    for c, evs in d.components.items():
        n = len(evs)
        for i in range(n):
            e, f = evs[i], evs[(i + 1) % n]
            if isinstance(e, CrossingPass) and isinstance(f, CrossingPass):
                yield c, i, e, f


def _o1_reduce_sites(d: Diagram) -> list[MoveSite]:
    found = set()
    for _c, _i, e, f in _adjacent_pass_pairs(d):
        if e.crossing == f.crossing:
            found.add(e.crossing)
    return [MoveSite("o1", "reduce", (x,)) for x in sorted(found)]


def _o2_reduce_sites(d: Diagram) -> list[MoveSite]:
    adj: dict[tuple[int, int], set[str]] = {}
    for _c, _i, e, f in _adjacent_pass_pairs(d):
        if e.crossing != f.crossing and e.role == f.role:
            key = (min(e.crossing, f.crossing), max(e.crossing, f.crossing))
            adj.setdefault(key, set()).add(e.role)
    sites = []
    for (x, y), roles in sorted(adj.items()):
        if roles == {OVER, UNDER} and d.crossings[x] == -d.crossings[y]:
            sites.append(MoveSite("o2", "reduce", (x, y)))
    return sites


def _face_edge_data(d: Diagram, face: tuple) -> list[tuple]:
    """(comp, gap, {crossing: role}) for each dart when all darts are arcs."""
    out = []
    for (edge, _end) in face:
        if edge[0] != "arc":
            return []
        _tag, comp, gap = edge
        evs = d.events(comp)
        flank = {}
        for j in (gap, (gap + 1) % len(evs)):
            e = evs[j]
            if isinstance(e, CrossingPass):
                flank[e.crossing] = e.role
        out.append((comp, gap, flank))
    return out


def _o3_sites(d: Diagram, cx=None) -> list[MoveSite]:
    cx = cx or build_complex(d)
    sites = []
    seen = set()
    for face in cx.faces:
        if len(face) != 3:
            continue
        data = _face_edge_data(d, face)
        if not data:
            continue
        verts = {cx.dart_vertex[dart] for dart in face}
        if len(verts) != 3 or any(v[0] != "x" for v in verts):
            continue
        if any(len(flank) != 2 for (_c, _g, flank) in data):
            continue
        # a legal slide needs one strand over at both its triangle crossings
        # and one under at both
        over_counts = sorted(sum(1 for r in flank.values() if r == OVER)
                             for _c, _g, flank in data)
        if over_counts != [0, 1, 2]:
            continue
        key = tuple(sorted((c, g) for c, g, _f in data))
        if key in seen:
            continue
        seen.add(key)
        sites.append(MoveSite("o3", "slide", key))
    return sorted(sites, key=MoveSite.token)


def _o4_reduce_sites(d: Diagram) -> list[MoveSite]:
    sites = []
    k = d.boundary_pairs
    for c, evs in d.components.items():
        n = len(evs)
        for i in range(n):
            e, f = evs[i], evs[(i + 1) % n]
            if isinstance(e, BoundaryPass) and isinstance(f, BoundaryPass) and n > 1:
                a = entry_slot(d, e)
                b = exit_slot(d, f)
                if (a - b) % (2 * k) in (1, 2 * k - 1):
                    sites.append(MoveSite("o4", "reduce", (e.pair, f.pair)))
    return sorted(sites, key=MoveSite.token)


def _o5_expand_sites(d: Diagram) -> list[MoveSite]:
    k = d.boundary_pairs
    if k < 2:
        return []
    sites = []
    for r in range(2 * k):
        for under in ("a", "b"):
            sites.append(MoveSite("o5", "expand", (r, under)))
    return sites


def _germ_adjacent_crossing(d: Diagram, slot_info) -> tuple[int, str] | None:
    """The crossing pass event-adjacent to a boundary germ, if any."""
    comp, idx, end = slot_info
    evs = d.events(comp)
    n = len(evs)
    j = (idx - 1) % n if end == "exit" else (idx + 1) % n
    e = evs[j]
    if isinstance(e, CrossingPass):
        return e.crossing, e.role
    return None


def _o5_sign(k: int, table, slot: int, under: str) -> int:
    """Sign of the crossing an o5 expand creates at wedge (slot, slot+1)."""
    s1, s2 = slot, (slot + 1) % (2 * k)
    over_is_b = under == "a"
    e1 = table[s1][2] == "exit"
    e2 = table[s2][2] == "exit"
    return (1 if over_is_b else -1) * (1 if e1 else -1) * (1 if e2 else -1)


def _o5_reduce_sites(d: Diagram) -> list[MoveSite]:
    k = d.boundary_pairs
    if k < 2:
        return []
    table = slot_table(d)
    n2 = 2 * k
    sites = []
    for r in range(n2):
        s1, s2, a1, a2 = r, (r + 1) % n2, (r + k) % n2, (r + k + 1) % n2
        w = [_germ_adjacent_crossing(d, table[s]) for s in (s1, s2, a1, a2)]
        if not all(w):
            continue
        if w[0][0] != w[1][0] or w[2][0] != w[3][0] or w[0][0] == w[2][0]:
            continue
        if {w[0][1], w[1][1]} != {OVER, UNDER} or {w[2][1], w[3][1]} != {OVER, UNDER}:
            continue
        if w[0][1] == w[2][1]:
            continue  # the strand of slot r must switch sides antipodally
        under = "a" if w[0][1] == UNDER else "b"
        anti_under = "b" if under == "a" else "a"
        # the crossings were created from the transposed configuration, so
        # the expected signs are the negated formula on the current one
        if d.crossings[w[0][0]] != -_o5_sign(k, table, r, under):
            continue
        if d.crossings[w[2][0]] != -_o5_sign(k, table, a1, anti_under):
            continue
        sites.append(MoveSite("o5", "reduce", (r, under)))
    return sites


def _o1_expand_sites(d: Diagram) -> list[MoveSite]:
    sites = []
    for c in d.component_ids():
        n = len(d.events(c))
        for gap in range(n if n else 1):
            for sign in (1, -1):
                for order in ("ou", "uo"):
                    sites.append(MoveSite("o1", "expand", ((c, gap), sign, order)))
    return sites


def _o2_expand_sites(d: Diagram, cx=None) -> list[MoveSite]:
    cx = cx or build_complex(d)
    sites = set()
    for face in cx.faces:
        arc_gaps = sorted({(dart[0][1], dart[0][2]) for dart in face
                           if dart[0][0] == "arc"})
        for i in range(len(arc_gaps)):
            for j in range(i + 1, len(arc_gaps)):
                for over in ("a", "b"):
                    sites.add(MoveSite("o2", "expand", (arc_gaps[i], arc_gaps[j], over)))
    return sorted(sites, key=MoveSite.token)


def _o4_expand_sites(d: Diagram, cx=None) -> list[MoveSite]:
    k = d.boundary_pairs
    sites = set()
    if k == 0:
        for c in d.component_ids():
            for gap in range(len(d.events(c))):
                sites.add(MoveSite("o4", "expand", ((c, gap), 0)))
        return sorted(sites, key=MoveSite.token)
    cx = cx or build_complex(d)
    for s in range(2 * k):
        edge = ("circle", s)
        for end in (0, 1):
            fi = cx.face_of[(edge, end)]
            for dart in cx.faces[fi]:
                if dart[0][0] == "arc":
                    _tag, c, g = dart[0]
                    sites.add(MoveSite("o4", "expand", ((c, g), (s + 1) % (2 * k))))
    return sorted(sites, key=MoveSite.token)


_KINDS = ("o1", "o2", "o3", "o4", "o5")


def find_sites(d: Diagram, kind: str, direction: str | None = None) -> list[MoveSite]:
    """All applicable sites of one move kind, optionally filtered by
    direction."""
    if kind not in _KINDS:
        raise MoveError(f"unknown move kind {kind!r}")
    out: list[MoveSite] = []
    if kind == "o1":
        if direction in (None, "reduce"):
            out += _o1_reduce_sites(d)
        if direction in (None, "expand"):
            out += _o1_expand_sites(d)
    elif kind == "o2":
        if direction in (None, "reduce"):
            out += _o2_reduce_sites(d)
        if direction in (None, "expand"):
            out += _o2_expand_sites(d)
    elif kind == "o3":
        out += _o3_sites(d)
    elif kind == "o4":
        if direction in (None, "reduce"):
            out += _o4_reduce_sites(d)
        if direction in (None, "expand"):
            out += _o4_expand_sites(d)
    elif kind == "o5":
        if direction in (None, "reduce"):
            out += _o5_reduce_sites(d)
        if direction in (None, "expand"):
            out += _o5_expand_sites(d)
    return out


# ---------------------------------------------------------------------------
# apply

def _new_crossing_id(d: Diagram, taken=()) -> int:
    used = set(d.crossings) | set(taken)
    return max(used, default=0) + 1


def _remove_crossings(d: Diagram, xs: set) -> tuple[Diagram, RefMap]:
    removals = {}
    comps = {}
    for c, evs in d.components.items():
        gone = {i for i, e in enumerate(evs)
                if isinstance(e, CrossingPass) and e.crossing in xs}
        if gone:
            removals[c] = (gone, len(evs))
        comps[c] = tuple(e for i, e in enumerate(evs) if i not in gone)
    crossings = {x: s for x, s in d.crossings.items() if x not in xs}
    return Diagram(d.boundary_pairs, crossings, comps), RefMap.for_removals(removals)


def _apply_o1_reduce(d: Diagram, x: int) -> tuple[Diagram, RefMap]:
    if not any(e.crossing == f.crossing == x for _c, _i, e, f in _adjacent_pass_pairs(d)):
        raise MoveError(f"no kink at crossing {x}")
    return _remove_crossings(d, {x})


def _apply_o1_expand(d: Diagram, ref, sign: int, order: str) -> tuple[Diagram, RefMap]:
    comp, gap = ref
    evs = list(d.events(comp))
    x = _new_crossing_id(d)
    roles = (OVER, UNDER) if order == "ou" else (UNDER, OVER)
    new = [CrossingPass(x, roles[0]), CrossingPass(x, roles[1])]
    n_before = len(evs)
    if evs:
        evs[gap + 1:gap + 1] = new
    else:
        evs, gap = new, 0
    crossings = dict(d.crossings)
    crossings[x] = sign
    out = Diagram(d.boundary_pairs, crossings, {**dict(d.components), comp: tuple(evs)})
    return out, RefMap.for_insert(comp, n_before, gap, 2, "left")


def _apply_o2_reduce(d: Diagram, x: int, y: int) -> tuple[Diagram, RefMap]:
    if MoveSite("o2", "reduce", (min(x, y), max(x, y))) not in _o2_reduce_sites(d):
        raise MoveError(f"no clean bigon at crossings {x},{y}")
    return _remove_crossings(d, {x, y})


def _apply_o2_expand(d: Diagram, ref_a, ref_b, over: str) -> tuple[Diagram, RefMap]:
    """Push the first gap's strand across a shared face across the second
    gap's strand; ordering and signs are fixed by validating candidates."""
    from .codec import validate_embedding, validate_structural

    (ca, ga), (cb, gb) = tuple(ref_a), tuple(ref_b)
    if (ca, ga) == (cb, gb):
        raise MoveError("cannot push a gap across itself")
    cx = build_complex(d)
    fa = {cx.face_of[(("arc", ca, ga), 0)], cx.face_of[(("arc", ca, ga), 1)]}
    fb = {cx.face_of[(("arc", cb, gb), 0)], cx.face_of[(("arc", cb, gb), 1)]}
    if not fa & fb:
        raise MoveError("the two gaps do not share a face")
    x = _new_crossing_id(d)
    y = _new_crossing_id(d, taken=(x,))
    role_a = OVER if over == "a" else UNDER
    role_b = UNDER if over == "a" else OVER
    for b_order in ((x, y), (y, x)):
        for sx in (1, -1):
            comps = {c: list(evs) for c, evs in d.components.items()}
            comps[ca][ga + 1:ga + 1] = [CrossingPass(x, role_a), CrossingPass(y, role_a)]
            gb_eff = gb + (2 if ca == cb and gb > ga else 0)
            comps[cb][gb_eff + 1:gb_eff + 1] = [CrossingPass(b_order[0], role_b),
                                                CrossingPass(b_order[1], role_b)]
            crossings = dict(d.crossings)
            crossings[x], crossings[y] = sx, -sx
            cand = Diagram(d.boundary_pairs, crossings,
                           {c: tuple(v) for c, v in comps.items()})
            if validate_structural(cand):
                continue
            if validate_embedding(cand).ok:
                rm = RefMap.for_insert(ca, len(d.events(ca)), ga, 2, "left")
                rm2 = RefMap.for_insert(
                    cb, len(d.events(cb)) + (2 if ca == cb else 0), gb_eff, 2, "left")
                return cand, rm.merge(rm2)
    raise MoveError("no embeddable bigon insertion at this site")


def _apply_o3(d: Diagram, refs) -> tuple[Diagram, RefMap]:
    """Swap the flanking event pairs of the three triangle gaps."""
    key = tuple(sorted(tuple(r) for r in refs))
    if MoveSite("o3", "slide", key) not in _o3_sites(d):
        raise MoveError(f"no slidable triangle at {refs}")
    comps = {c: list(evs) for c, evs in d.components.items()}
    for comp, gap in key:
        evs = comps[comp]
        n = len(evs)
        evs[gap], evs[(gap + 1) % n] = evs[(gap + 1) % n], evs[gap]
    out = Diagram(d.boundary_pairs, dict(d.crossings),
                  {c: tuple(v) for c, v in comps.items()})
    return out, RefMap()


def _apply_o4_reduce(d: Diagram, pair_a: int, pair_b: int) -> tuple[Diagram, RefMap]:
    if MoveSite("o4", "reduce", (pair_a, pair_b)) not in _o4_reduce_sites(d):
        raise MoveError(f"pairs {pair_a},{pair_b} do not bound a detachable arc")
    comp, i = d.component_of_pair(pair_a)
    evs = list(d.events(comp))
    n = len(evs)
    j = (i + 1) % n
    gone = {i, j}
    new_events = tuple(e for t, e in enumerate(evs) if t not in gone)
    comps = {**{c: tuple(v) for c, v in d.components.items()}, comp: new_events}
    mid = Diagram(d.boundary_pairs, dict(d.crossings), comps)
    rm = RefMap.for_removals({comp: (gone, n)})
    items = []
    for info in _slot_items(d):
        c0, i0, end0 = info
        if c0 == comp and i0 in gone:
            continue
        i1 = i0 - sum(1 for r in gone if r < i0) if c0 == comp else i0
        items.append((c0, i1, end0))
    out, pair_map = _rewrite_pairs(mid, items)
    rm.pairs = {p: pair_map.get(p) for p in range(d.boundary_pairs)}
    return out, rm


def _apply_o4_expand(d: Diagram, ref, slot_gap: int) -> tuple[Diagram, RefMap]:
    from .codec import validate_embedding, validate_structural

    comp, gap = tuple(ref)
    k = d.boundary_pairs
    n = len(d.events(comp))
    anti = (slot_gap + k) % (2 * k) if k else 0
    for flip in (0, 1):
        evs = list(d.events(comp))
        placeholder = [BoundaryPass(0, 0), BoundaryPass(0, 1)]
        if evs:
            evs[gap + 1:gap + 1] = placeholder
            b1_idx, b2_idx = gap + 1, gap + 2
        else:
            evs = placeholder
            b1_idx, b2_idx = 0, 1
        comps = {**{c: list(v) for c, v in d.components.items()}, comp: evs}
        old = _slot_items(d)

        def bump(s):
            c0, i0, e0 = s
            if c0 == comp and i0 > gap and n:
                return (c0, i0 + 2, e0)
            return s

        old = [bump(s) for s in old]
        near = [(comp, b1_idx, "exit"), (comp, b2_idx, "entry")]
        far = [(comp, b1_idx, "entry"), (comp, b2_idx, "exit")]
        if flip:
            near = near[::-1]
            far = far[::-1]
        if k == 0:
            items = near + far
        else:
            lo, hi = sorted((slot_gap, anti))
            items = old[:lo] + (near if lo == slot_gap else far) + old[lo:hi] + \
                (far if lo == slot_gap else near) + old[hi:]
        try:
            mid = Diagram(k + 2, dict(d.crossings),
                          {c: tuple(v) for c, v in comps.items()})
            out, pair_map = _rewrite_pairs(mid, items)
        except MoveError:
            continue
        if validate_structural(out):
            continue
        if validate_embedding(out).ok:
            rm = RefMap.for_insert(comp, n, gap if n else 0, 2, "left")
            rm.pairs = {p: pair_map.get(p) for p in range(k)}
            return out, rm
    raise MoveError("no embeddable boundary attachment at this site")


class _MarkedEvents:
    """Event list with gap markers, for surgeries that insert or remove
    events adjacent to existing ones while cursors sit in the gaps.

    Items are ("ev", original index or None, event) and ("gap", g); the gap
    marker g starts right after original event g, and ends up right after
    whatever event precedes it when the surgery is done.
    """

    def __init__(self, events):
        self.items = []
        for i, e in enumerate(events):
            self.items.append(["ev", i, e])
            self.items.append(["gap", i])

    def _ev_pos(self, orig_idx: int) -> int:
        for p, it in enumerate(self.items):
            if it[0] == "ev" and it[1] == orig_idx:
                return p
        raise MoveError("event vanished during surgery")

    def insert_adjacent(self, orig_idx: int, side: str, event) -> None:
        """Insert a new event hugging an original one (before or after it)."""
        p = self._ev_pos(orig_idx)
        at = p if side == "before" else p + 1
        self.items.insert(at, ["ev", None, event])

    def neighbor_event(self, orig_idx: int, side: str):
        p = self._ev_pos(orig_idx)
        n = len(self.items)
        step = -1 if side == "before" else 1
        q = (p + step) % n
        while self.items[q][0] != "ev":
            q = (q + step) % n
        return q

    def remove_neighbor(self, orig_idx: int, side: str, crossing: int) -> None:
        q = self.neighbor_event(orig_idx, side)
        e = self.items[q][2]
        if not (isinstance(e, CrossingPass) and e.crossing == crossing):
            raise MoveError("site is stale: expected an adjacent crossing pass")
        self.items.pop(q)

    def result(self) -> tuple[list, dict[int, int], dict[int, int]]:
        """(events, original event index map, gap marker map)."""
        events = []
        ev_map = {}
        new_pos = {}
        for it in self.items:
            if it[0] == "ev":
                if it[1] is not None:
                    ev_map[it[1]] = len(events)
                new_pos[id(it)] = len(events)
                events.append(it[2])
        gap_map = {}
        n = len(self.items)
        for p, it in enumerate(self.items):
            if it[0] != "gap":
                continue
            q = (p - 1) % n
            while self.items[q][0] != "ev":
                q = (q - 1) % n
                if q == p:
                    raise MoveError("gap lost its component")
            gap_map[it[1]] = new_pos[id(self.items[q])]
        return events, ev_map, gap_map


def _apply_o5(d: Diagram, r: int, under: str, expand: bool) -> tuple[Diagram, RefMap]:
    k = d.boundary_pairs
    if k < 2:
        raise MoveError("a transposition needs two distinct boundary pairs")
    n2 = 2 * k
    s1, s2, a1, a2 = r, (r + 1) % n2, (r + k) % n2, (r + k + 1) % n2
    table = slot_table(d)
    if table[s1][:2] == table[s2][:2]:
        raise MoveError("cannot transpose a passage with itself")
    sign1 = _o5_sign(k, table, r, under)
    anti_under = "b" if under == "a" else "a"
    sign2 = _o5_sign(k, table, a1, anti_under)

    marked = {c: _MarkedEvents(evs) for c, evs in d.components.items()}

    def germ_side(slot):
        comp, idx, end = table[slot]
        return comp, idx, ("before" if end == "exit" else "after")

    crossings = dict(d.crossings)
    if expand:
        x1 = _new_crossing_id(d)
        x2 = _new_crossing_id(d, taken=(x1,))
        role_s1 = UNDER if under == "a" else OVER
        other = OVER if role_s1 == UNDER else UNDER
        for slot, x, role in ((s1, x1, role_s1), (s2, x1, other),
                              (a1, x2, other), (a2, x2, role_s1)):
            comp, idx, side = germ_side(slot)
            marked[comp].insert_adjacent(idx, side, CrossingPass(x, role))
        crossings[x1], crossings[x2] = sign1, sign2
    else:
        c1 = _germ_adjacent_crossing(d, table[s1])
        c2 = _germ_adjacent_crossing(d, table[a1])
        if not c1 or not c2:
            raise MoveError("transposition site is stale")
        x1, x2 = c1[0], c2[0]
        for slot, x in ((s1, x1), (s2, x1), (a1, x2), (a2, x2)):
            comp, idx, side = germ_side(slot)
            marked[comp].remove_neighbor(idx, side, x)
        del crossings[x1], crossings[x2]

    comps = {}
    ev_maps = {}
    gap_maps = {}
    for c, m in marked.items():
        events, ev_map, gap_map = m.result()
        comps[c] = tuple(events)
        ev_maps[c], gap_maps[c] = ev_map, gap_map

    items = []
    for s in range(n2):
        src = {s1: s2, s2: s1, a1: a2, a2: a1}.get(s, s)
        comp, idx, end = table[src]
        items.append((comp, ev_maps[comp][idx], end))
    mid = Diagram(k, crossings, comps)
    out, pair_map = _rewrite_pairs(mid, items)

    rm = RefMap()
    rm.pairs = {p: pair_map.get(p) for p in range(k)}
    for c, gm in gap_maps.items():
        if len(d.events(c)):
            rm.gaps[c] = gm
    return out, rm


def _apply_add_line(d: Diagram, comp: str, before_pair: int) -> tuple[Diagram, RefMap]:
    """Insert a helper line above everything, its endpoints immediately
    preceding the given pair counterclockwise."""
    if comp in d.components:
        raise MoveError(f"component {comp!r} already exists")
    k = d.boundary_pairs
    if not 0 <= before_pair < k:
        raise MoveError(f"pair {before_pair} out of range")
    table = slot_table(d)
    marked = {c: _MarkedEvents(evs) for c, evs in d.components.items()}
    crossings = dict(d.crossings)

    guard_events: list = [BoundaryPass(0, 0)]
    sweep = [(before_pair + k + t) % (2 * k) for t in range(k)]
    taken = []
    for s in sweep:
        x = _new_crossing_id(d, taken=taken)
        taken.append(x)
        comp0, idx0, end0 = table[s]
        side = "before" if end0 == "exit" else "after"
        marked[comp0].insert_adjacent(idx0, side, CrossingPass(x, UNDER))
        crossings[x] = 1 if end0 == "exit" else -1
        guard_events.append(CrossingPass(x, OVER))

    comps = {}
    ev_maps = {}
    gap_maps = {}
    for c, m in marked.items():
        events, ev_map, gap_map = m.result()
        comps[c] = tuple(events)
        ev_maps[c], gap_maps[c] = ev_map, gap_map
    comps[comp] = tuple(guard_events)

    items = []
    lo, hi = before_pair, before_pair + k + 1
    for s in range(2 * k + 2):
        if s == lo:
            items.append((comp, 0, "exit"))
        elif s == hi:
            items.append((comp, 0, "entry"))
        else:
            shift = (1 if s > lo else 0) + (1 if s > hi else 0)
            c0, i0, e0 = table[s - shift]
            items.append((c0, ev_maps[c0][i0], e0))
    mid = Diagram(k + 1, crossings, comps)
    out, _pm = _rewrite_pairs(mid, items)
    rm = RefMap()
    # the guard's placeholder pair id may shadow a real one, so read the
    # new pair of every original passage off the rebuilt events
    rm.pairs = {}
    for c in d.components:
        for i, e in enumerate(d.events(c)):
            if isinstance(e, BoundaryPass):
                rm.pairs[e.pair] = out.events(c)[ev_maps[c][i]].pair
    for c, gm in gap_maps.items():
        if len(d.events(c)):
            rm.gaps[c] = gm
    return out, rm


def _apply_remove_line(d: Diagram, comp: str) -> tuple[Diagram, RefMap]:
    """Remove a single-arc component with its crossings and boundary pair."""
    evs = d.events(comp)
    bps = [e for e in evs if isinstance(e, BoundaryPass)]
    if len(bps) != 1:
        raise MoveError(f"component {comp!r} is not a single-arc line")
    xs = {e.crossing for e in evs if isinstance(e, CrossingPass)}
    mid, rm = _remove_crossings(d, xs)
    gone_pair = bps[0].pair
    items = [info for info in _slot_items(mid) if info[0] != comp]
    comps = {c: v for c, v in mid.components.items() if c != comp}
    mid2 = Diagram(mid.boundary_pairs, dict(mid.crossings), comps)
    out, pair_map = _rewrite_pairs(mid2, items)
    rm.pairs = {p: (pair_map.get(p) if p != gone_pair else None)
                for p in range(d.boundary_pairs)}
    rm.gaps.pop(comp, None)
    return out, rm


def apply_move_mapped(d: Diagram, site: MoveSite) -> tuple[Diagram, RefMap]:
    kind, direction = site.kind, site.direction
    if kind == "o1" and direction == "reduce":
        return _apply_o1_reduce(d, site.refs[0])
    if kind == "o1" and direction == "expand":
        return _apply_o1_expand(d, site.refs[0], site.refs[1], site.refs[2])
    if kind == "o2" and direction == "reduce":
        return _apply_o2_reduce(d, site.refs[0], site.refs[1])
    if kind == "o2" and direction == "expand":
        return _apply_o2_expand(d, site.refs[0], site.refs[1], site.refs[2])
    if kind == "o3":
        return _apply_o3(d, site.refs)
    if kind == "o4" and direction == "reduce":
        return _apply_o4_reduce(d, site.refs[0], site.refs[1])
    if kind == "o4" and direction == "expand":
        return _apply_o4_expand(d, site.refs[0], site.refs[1])
    if kind == "o5":
        return _apply_o5(d, site.refs[0], site.refs[1], direction == "expand")
    if kind == "add-line":
        return _apply_add_line(d, site.refs[0], site.refs[1])
    if kind == "remove-line":
        return _apply_remove_line(d, site.refs[0])
    raise MoveError(f"unknown move {kind} {direction}")


def apply_move(d: Diagram, site: MoveSite) -> Diagram:
    """Apply one move; outputs stay structurally valid and embeddable."""
    out, _rm = apply_move_mapped(d, site)
    return out


# ---------------------------------------------------------------------------
# hashing and traces

def canonical_form(d: Diagram) -> str:
    """Serialization with components renamed c1.. in id order and crossings
    renumbered by first appearance; the basis of trace hashes."""
    from .codec import serialize_diagram

    comp_names = {c: f"c{i + 1}" for i, c in enumerate(d.component_ids())}
    xmap: dict[int, int] = {}
    for c in d.component_ids():
        for e in d.events(c):
            if isinstance(e, CrossingPass) and e.crossing not in xmap:
                xmap[e.crossing] = len(xmap) + 1
    comps = {}
    for c in d.component_ids():
        comps[comp_names[c]] = tuple(
            CrossingPass(xmap[e.crossing], e.role) if isinstance(e, CrossingPass) else e
            for e in d.events(c)
        )
    crossings = {xmap[x]: s for x, s in d.crossings.items()}
    return serialize_diagram(Diagram(d.boundary_pairs, crossings, comps))


def diagram_hash(d: Diagram) -> str:
    """Stable 64-bit hash: the first 16 hex digits of the SHA-256 of the
    canonical serialization."""
    return hashlib.sha256(canonical_form(d).encode()).hexdigest()[:16]


@dataclass(frozen=True)
class MoveTrace:
    initial: Diagram
    steps: tuple[tuple[MoveSite, str], ...]  # (site, post-move hash)

    @property
    def final(self) -> Diagram:
        d = self.initial
        for site, _h in self.steps:
            d = apply_move(d, site)
        return d


def serialize_trace(trace: MoveTrace) -> str:
    lines = [f"initial {diagram_hash(trace.initial)}"]
    for site, h in trace.steps:
        lines.append(f"move {site.token()} {h}")
    return "\n".join(lines) + "\n"


def parse_trace(text: str) -> tuple[str, list[tuple[MoveSite, str]]]:
    initial = None
    steps = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "initial" and len(parts) == 2:
            initial = parts[1]
        elif parts[0] == "move" and len(parts) >= 4:
            steps.append((MoveSite.from_token(" ".join(parts[1:-1])), parts[-1]))
        else:
            raise MoveError(f"trace line {ln}: unrecognized record")
    if initial is None:
        raise MoveError("trace is missing its initial hash")
    return initial, steps


def replay_trace(d: Diagram, text: str) -> Diagram:
    """Re-apply a serialized trace, verifying every hash."""
    initial, steps = parse_trace(text)
    if diagram_hash(d) != initial:
        raise MoveError("trace does not start at this diagram")
    for i, (site, want) in enumerate(steps, start=1):
        d = apply_move(d, site)
        got = diagram_hash(d)
        if got != want:
            raise MoveError(f"trace step {i}: hash mismatch ({got} != {want})")
    return d


# ---------------------------------------------------------------------------
# recognizer

def recognize_standard_unlink(d: Diagram) -> tuple[int, int] | None:
    """(p, q) when the diagram is a canonical standard unlink: p crossingless
    closed curves plus q single-arc lines pairwise crossing once, with the
    below relation a total order consistent with the counterclockwise
    boundary order; None otherwise."""
    circles = []
    lines = []
    for c in d.component_ids():
        nb = boundary_count(d, c)
        if nb == 0:
            if any(isinstance(e, CrossingPass) for e in d.events(c)):
                return None
            circles.append(c)
        elif nb == 1:
            lines.append(c)
        else:
            return None
    q = len(lines)
    if d.boundary_pairs != q:
        return None
    part = crossing_partition(d)
    if len(part) != q * (q - 1) // 2:
        return None
    over_count = {c: 0 for c in lines}
    seen_pairs = set()
    for x, (co, cu) in part.items():
        if co == cu:
            return None
        key = frozenset((co, cu))
        if key in seen_pairs:
            return None
        seen_pairs.add(key)
        over_count[co] += 1
    if sorted(over_count.values()) != list(range(q)):
        return None
    if q == 0:
        return len(circles), 0
    pair_of = {}
    for c in lines:
        (bp,) = [e for e in d.events(c) if isinstance(e, BoundaryPass)]
        pair_of[c] = bp.pair
    line_at = {p: c for c, p in pair_of.items()}
    rank = {c: q - 1 - over_count[c] for c in lines}
    for r in range(q):
        if all(rank[line_at[(r + t) % q]] == t for t in range(q)):
            return len(circles), q
    return None


from ._simplify import (  # noqa: E402  (pipeline shares this module's surface)
    choose_eliminable_arc,
    eliminate_arc,
    erase_dashed,
    simplify_descending,
)

"""Generators: standard unlinks, the all-positive oriented unlink, seeded
random diagrams, and the exhaustive four-line enumeration.

The standard unlink stacks projective lines so that each one passes below
all earlier ones, each rotated a little further counterclockwise; the
transcription places line ``i`` along the direction (i-1)*pi/q, shifted a
hair along its left normal so that the pairwise crossings separate, and
reads the crossing order off that geometry.
"""

from __future__ import annotations

import math
import random as _random
from itertools import permutations, product

from .codec import validate_embedding, validate_structural
from .diagram import (
    FORWARD,
    OVER,
    REVERSED,
    UNDER,
    BoundaryPass,
    CrossingPass,
    Diagram,
    DiagramError,
    local_writhe,
)
from .moves import apply_move, canonical_form, find_sites


def standard_unlink(p: int, q: int) -> Diagram:
    """p crossingless closed curves plus q stacked projective lines, line i
    over line j whenever i < j, one crossing per pair."""
    if p < 0 or q < 0:
        raise DiagramError("component counts must be nonnegative")
    comps: dict[str, tuple] = {}
    for t in range(p):
        comps[f"c{t + 1}"] = ()
    if q == 0:
        return Diagram(0, {}, comps)
    delta = 1e-3
    xid = {}
    nxt = 1
    for i in range(1, q + 1):
        for j in range(i + 1, q + 1):
            xid[(i, j)] = nxt
            nxt += 1

    def direction(i):
        th = (i - 1) * math.pi / q
        return math.cos(th), math.sin(th)

    def normal(i):
        dx, dy = direction(i)
        return -dy, dx

    # parameter of the crossing with line j along line i
    def t_along(i, j):
        th = (i - j) * math.pi / q
        return delta * (j - i * math.cos(th)) / math.sin(th)

    crossings = {}
    for i in range(1, q + 1):
        events: list = [BoundaryPass(i - 1, 0)]
        others = sorted((t_along(i, j), j) for j in range(1, q + 1) if j != i)
        for _t, j in others:
            a, b = min(i, j), max(i, j)
            role = OVER if i < j else UNDER
            events.append(CrossingPass(xid[(a, b)], role))
            crossings[xid[(a, b)]] = 1
        comps[f"c{p + i}"] = tuple(events)
    return Diagram(q, crossings, comps)


def oriented_standard_unlink(q: int) -> tuple[Diagram, dict[str, str]]:
    """The q-line standard unlink with orientations making every local
    writhe +1; all signs are already +1, so the forward orientations do."""
    if q < 1:
        raise DiagramError("need at least one line")
    d = standard_unlink(0, q)
    o = {c: FORWARD for c in d.component_ids()}
    assert all(local_writhe(d, o, x) == 1 for x in d.crossings)
    return d, o


def random_diagram(max_crossings: int = 8, max_components: int = 3,
                   max_pairs: int = 6, seed: int = 0) -> Diagram:
    """A structurally valid, embeddable diagram grown from a standard unlink
    by random expanding moves and crossing flips; deterministic per seed."""
    if max_crossings < 0 or max_components < 1 or max_pairs < 0:
        raise DiagramError("bounds must be positive")
    rng = _random.Random(seed)
    q = rng.randint(0, min(max_components, max_pairs))
    p = rng.randint(0 if q else 1, max_components - q)
    d = standard_unlink(p, q)
    steps = rng.randint(0, 2 * max_crossings)
    for _ in range(steps):
        kind = rng.choice(["o1", "o1", "o2", "o4", "o5", "flip", "flip"])
        if kind == "flip":
            if d.crossings:
                x = rng.choice(sorted(d.crossings))
                d = _flip(d, x)
            continue
        if kind == "o1" and len(d.crossings) + 1 > max_crossings:
            continue
        if kind == "o2" and len(d.crossings) + 2 > max_crossings:
            continue
        if kind == "o5" and (len(d.crossings) + 2 > max_crossings or d.boundary_pairs < 2):
            continue
        if kind == "o4" and d.boundary_pairs + 2 > max_pairs:
            continue
        sites = find_sites(d, kind, "expand")
        if not sites:
            continue
        site = rng.choice(sites)
        try:
            d = apply_move(d, site)
        except DiagramError:
            continue
    assert not validate_structural(d)
    return d


def _flip(d: Diagram, x: int) -> Diagram:
    comps = {}
    for c, evs in d.components.items():
        comps[c] = tuple(
            CrossingPass(e.crossing, UNDER if e.role == OVER else OVER)
            if isinstance(e, CrossingPass) and e.crossing == x else e
            for e in evs
        )
    crossings = {y: (-s if y == x else s) for y, s in d.crossings.items()}
    return Diagram(d.boundary_pairs, crossings, comps)


def four_line_diagrams() -> list[tuple[Diagram, dict[str, str]]]:
    """All diagrams of four single-arc lines with exactly one crossing per
    pair, oriented so every local writhe is +1, up to renumbering of
    components and boundary rotation.

    Lines sit at pairs 0..3.  The enumeration ranges over the crossing
    order along each line and the geometric handedness of each crossing,
    keeps the embeddable immersions, then ranges over the over/under
    assignment of each pair, keeps those admitting an all-positive
    orientation, and deduplicates by the canonical form over boundary
    rotations.
    """
    q = 4
    pair_ids = {}
    pairs = []
    nxt = 1
    for i in range(1, q + 1):
        for j in range(i + 1, q + 1):
            pair_ids[(i, j)] = nxt
            pairs.append((i, j))
            nxt += 1
    results = []
    seen = set()
    partners = {i: [j for j in range(1, q + 1) if j != i] for i in range(1, q + 1)}
    orders = {i: list(permutations(partners[i])) for i in range(1, q + 1)}
    for combo in product(*(orders[i] for i in range(1, q + 1))):
        for bits in range(2 ** 6):
            # geometric handedness per crossing: the frame of the two
            # strand directions taken in increasing line order
            geo = {pair_ids[p]: (1 if (bits >> t) & 1 else -1)
                   for t, p in enumerate(pairs)}
            base = _four_line_build(q, pair_ids, combo, geo,
                                    {pair_ids[p]: p[0] for p in pairs})
            if validate_structural(base) or not validate_embedding(base).ok:
                continue
            for rbits in range(2 ** 6):
                over = {pair_ids[p]: (p[0] if (rbits >> t) & 1 else p[1])
                        for t, p in enumerate(pairs)}
                d = _four_line_build(q, pair_ids, combo, geo, over)
                o = _all_positive_orientation(d)
                if o is None:
                    continue
                key = _rotation_canonical(d)
                if key in seen:
                    continue
                seen.add(key)
                results.append((d, o))
    return results


def _four_line_build(q, pair_ids, combo, geo, over) -> Diagram:
    """Assemble a four-line diagram from visit orders, handedness and the
    over-line choice per crossing."""
    comps = {}
    crossings = {}
    for i in range(1, q + 1):
        events: list = [BoundaryPass(i - 1, 0)]
        for j in combo[i - 1]:
            a, b = min(i, j), max(i, j)
            x = pair_ids[(a, b)]
            events.append(CrossingPass(x, OVER if over[x] == i else UNDER))
            # stored sign is the frame (over direction, under direction):
            # equal to the handedness when the lower line is on top
            crossings[x] = geo[x] if over[x] == a else -geo[x]
        comps[f"c{i}"] = tuple(events)
    return Diagram(q, crossings, comps)


def _all_positive_orientation(d: Diagram) -> dict[str, str] | None:
    """Orientations making every local writhe +1, if they exist; the first
    component in id order is oriented forward."""
    comps = d.component_ids()
    eps = {comps[0]: 1}
    from .diagram import crossing_partition

    part = crossing_partition(d)
    edges = [(a, b, d.crossings[x]) for x, (a, b) in part.items()]
    changed = True
    while changed:
        changed = False
        for a, b, s in edges:
            if a in eps and b not in eps:
                eps[b] = s * eps[a]
                changed = True
            elif b in eps and a not in eps:
                eps[a] = s * eps[b]
                changed = True
            elif a in eps and b in eps and eps[a] * eps[b] != s:
                return None
    if len(eps) != len(comps):
        return None
    return {c: (FORWARD if v == 1 else REVERSED) for c, v in eps.items()}


def _rotation_canonical(d: Diagram) -> str:
    """Smallest canonical form over all boundary rotations."""
    k = d.boundary_pairs
    best = None
    for r in range(max(2 * k, 1)):
        comps = {}
        for c, evs in d.components.items():
            out = []
            for e in evs:
                if isinstance(e, BoundaryPass):
                    slot = (e.pair + e.side * k + r) % (2 * k)
                    out.append(BoundaryPass(slot % k, slot // k))
                else:
                    out.append(e)
            comps[c] = tuple(out)
        rotated = Diagram(k, dict(d.crossings), comps)
        form = canonical_form(rotated)
        if best is None or form < best:
            best = form
    return best or canonical_form(d)

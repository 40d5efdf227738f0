"""Rotation system and face tracing for the disk complex of a diagram.

The disk complex has a 4-valent vertex per crossing, a 3-valent vertex per
boundary position, one edge per arc gap, and one boundary-circle edge per
adjacent position pair.  Rotations are counterclockwise: at a crossing with
sign +1 the cyclic edge order is (over-out, under-out, over-in, under-in),
with sign -1 it is (over-out, under-in, over-in, under-out); at a boundary
position it is (circle toward the next position, arc germ, circle toward
the previous position).  Faces are the orbits of sigma∘alpha on darts; each
dart has its face on the right.

Crossingless closed components have no events and do not appear in the
complex.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagram import (
    OVER,
    BoundaryPass,
    CrossingPass,
    Diagram,
    entry_slot,
    exit_slot,
)

# vertex keys: ("x", crossing_id) | ("s", slot)
# edge keys:   ("arc", comp, gap) | ("circle", slot)   (circle edge slot -> slot+1)
# darts:       (edge_key, end) with end in {0, 1}; end 0 leaves the edge's
#              tail vertex, end 1 leaves its head vertex.


@dataclass
class Complex:
    vertices: list
    edges: dict  # edge_key -> (tail vertex, head vertex)
    sigma: dict  # dart -> next dart counterclockwise at the same vertex
    faces: list  # list of dart tuples (sigma∘alpha orbits)
    face_of: dict  # dart -> face index
    dart_vertex: dict  # dart -> vertex at which the dart is based

    def alpha(self, dart):
        edge, end = dart
        return (edge, 1 - end)

    def face_index(self, dart) -> int:
        return self.face_of[dart]


def _edge_endpoints(d: Diagram, comp: str, gap: int):
    """(tail vertex, head vertex) of the arc edge occupying a gap."""
    evs = d.events(comp)
    n = len(evs)
    e0, e1 = evs[gap], evs[(gap + 1) % n]
    tail = ("x", e0.crossing) if isinstance(e0, CrossingPass) else ("s", entry_slot(d, e0))
    head = ("x", e1.crossing) if isinstance(e1, CrossingPass) else ("s", exit_slot(d, e1))
    return tail, head


def build_complex(d: Diagram) -> Complex:
    k = d.boundary_pairs
    edges = {}
    # darts based at each vertex, keyed by port for rotation assembly
    ports: dict = {}  # vertex -> {port name: dart}

    def set_port(vertex, port, dart):
        ports.setdefault(vertex, {})[port] = dart

    for c, evs in d.components.items():
        n = len(evs)
        for gap in range(n):
            key = ("arc", c, gap)
            tail, head = _edge_endpoints(d, c, gap)
            edges[key] = (tail, head)
            out_dart, in_dart = (key, 0), (key, 1)
            e0, e1 = evs[gap], evs[(gap + 1) % n]
            if isinstance(e0, CrossingPass):
                set_port(tail, (e0.role, "out"), out_dart)
            else:
                set_port(tail, "arc", out_dart)
            if isinstance(e1, CrossingPass):
                set_port(head, (e1.role, "in"), in_dart)
            else:
                set_port(head, "arc", in_dart)
    if k > 0:
        for s in range(2 * k):
            key = ("circle", s)
            tail, head = ("s", s), ("s", (s + 1) % (2 * k))
            edges[key] = (tail, head)
            set_port(tail, "ccw", (key, 0))
            set_port(head, "cw", (key, 1))

    sigma = {}
    dart_vertex = {}
    for vertex, pm in ports.items():
        if vertex[0] == "x":
            sign = d.crossings[vertex[1]]
            if sign == 1:
                order = [(OVER, "out"), ("under", "out"), (OVER, "in"), ("under", "in")]
            else:
                order = [(OVER, "out"), ("under", "in"), (OVER, "in"), ("under", "out")]
        else:
            order = ["ccw", "arc", "cw"]
        cyc = [pm[p] for p in order if p in pm]
        for i, dart in enumerate(cyc):
            sigma[dart] = cyc[(i + 1) % len(cyc)]
            dart_vertex[dart] = vertex

    faces = []
    face_of = {}
    seen = set()
    for start in sorted(sigma, key=repr):
        if start in seen:
            continue
        orbit = []
        dart = start
        while dart not in seen:
            seen.add(dart)
            orbit.append(dart)
            edge, end = dart
            dart = sigma[(edge, 1 - end)]
        faces.append(tuple(orbit))
        for dd in orbit:
            face_of[dd] = len(faces) - 1

    vertices = sorted(ports, key=repr)
    return Complex(vertices, edges, sigma, faces, face_of, dart_vertex)


def connected_pieces(cx: Complex) -> list[set]:
    """Connected components of the complex, as sets of vertices."""
    adj: dict = {}
    for tail, head in cx.edges.values():
        adj.setdefault(tail, set()).add(head)
        adj.setdefault(head, set()).add(tail)
    pieces = []
    left = set(adj)
    while left:
        root = left.pop()
        piece = {root}
        stack = [root]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in piece:
                    piece.add(w)
                    stack.append(w)
        left -= piece
        pieces.append(piece)
    return pieces


def piece_euler(cx: Complex, piece: set) -> tuple[int, int, int]:
    """(V, E, F) of one connected piece, faces counted from the traced orbits."""
    V = len(piece)
    E = sum(1 for tail, head in cx.edges.values() if tail in piece)
    face_ids = set()
    for i, orbit in enumerate(cx.faces):
        if cx.dart_vertex[orbit[0]] in piece:
            face_ids.add(i)
    return V, E, len(face_ids)


def net_face_groups(cx: Complex, d: Diagram) -> list[set[int]]:
    """Faces of the net in the projective plane, as groups of disk faces.

    The line at infinity is not part of the link, so regions of the plane
    merge across circle edges: the inner faces of the circle segments at
    slots s and s+k are glued, and the outer face is dropped.
    """
    k = d.boundary_pairs
    if k == 0:
        return [{i} for i in range(len(cx.faces))]
    outer = None
    for i, orbit in enumerate(cx.faces):
        if all(e[0][0] == "circle" for e in orbit) and len(orbit) == 2 * k:
            outer = i
            break
    parent = list(range(len(cx.faces)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    def inner_face(slot):
        # the dart of circle edge `slot` whose face is not the outer one
        for end in (0, 1):
            f = cx.face_of[(("circle", slot), end)]
            if f != outer:
                return f
        return cx.face_of[(("circle", slot), 0)]

    for s in range(2 * k):
        union(inner_face(s), inner_face((s + k) % (2 * k)))
    groups: dict[int, set[int]] = {}
    for i in range(len(cx.faces)):
        if i == outer:
            continue
        groups.setdefault(find(i), set()).add(i)
    return list(groups.values())

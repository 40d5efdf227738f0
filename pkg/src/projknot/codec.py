"""Text format for diagrams and for the descending-data sidecar.

Diagram format, line oriented, UTF-8, ``#`` comments::

    boundary: <k>
    crossing <id> <+|->
    component <id>: <tokens>

Tokens are ``B<i>`` (boundary pair i, exit side 0), ``B<i>'`` (exit side 1),
``C<j>o`` and ``C<j>u``.  A component line with no tokens is a crossingless
closed curve.

Sidecar format::

    order <component> <forward|reversed> <event-index> <before|after>
    mset <component>: <crossing ids...>
    pq B<i>

``order`` lines give the 0-homologous components in order with orientation
and basepoint; ``mset`` lines give each 1-homologous component's ordered
simplifying set (components with no self-crossings may be omitted); ``pq``
names the distinguished endpoint pair and is required whenever the diagram
has a 1-homologous component.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import descend as _descend
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
    PointRef,
    boundary_count,
    crossings_between,
    homology_class,
)
from .faces import build_complex, connected_pieces, net_face_groups, piece_euler


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


_TOKEN = re.compile(r"^(?:B(\d+)(')?|C(\d+)([ou]))$")


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_diagram(text: str) -> Diagram:
    boundary = None
    crossings: dict[int, int] = {}
    components: dict[str, list] = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        if line.startswith("boundary:"):
            if boundary is not None:
                raise ParseError("duplicate boundary line", ln)
            body = line[len("boundary:"):].strip()
            if not body.isdigit():
                raise ParseError(f"bad boundary count {body!r}", ln)
            boundary = int(body)
        elif line.startswith("crossing "):
            parts = line.split()
            if len(parts) != 3 or not parts[1].isdigit() or parts[2] not in "+-":
                raise ParseError("expected: crossing <id> <+|->", ln)
            xid = int(parts[1])
            if xid in crossings:
                raise ParseError(f"duplicate crossing {xid}", ln)
            crossings[xid] = 1 if parts[2] == "+" else -1
        elif line.startswith("component "):
            head, sep, body = line.partition(":")
            if not sep:
                raise ParseError("component line needs a colon", ln)
            cid = head[len("component "):].strip()
            if not cid:
                raise ParseError("empty component id", ln)
            if cid in components:
                raise ParseError(f"duplicate component {cid!r}", ln)
            events = []
            col = len(head) + 2
            for tok in body.split():
                m = _TOKEN.match(tok)
                if not m:
                    raise ParseError(f"unknown token {tok!r}", ln, line.index(tok) + 1)
                if m.group(1) is not None:
                    events.append(BoundaryPass(int(m.group(1)), 1 if m.group(2) else 0))
                else:
                    events.append(CrossingPass(int(m.group(3)), OVER if m.group(4) == "o" else UNDER))
                col += len(tok) + 1
            components[cid] = events
        else:
            raise ParseError(f"unrecognized line {line!r}", ln)
    if boundary is None:
        raise ParseError("missing boundary line", 1)
    d = Diagram(boundary, crossings, components)
    problems = validate_structural(d)
    if problems:
        raise ParseError("; ".join(problems), 1)
    return d


def _event_token(e) -> str:
    if isinstance(e, BoundaryPass):
        return f"B{e.pair}" + ("'" if e.side else "")
    return f"C{e.crossing}" + ("o" if e.role == OVER else "u")


def serialize_diagram(d: Diagram) -> str:
    lines = [f"boundary: {d.boundary_pairs}"]
    for x in sorted(d.crossings):
        lines.append(f"crossing {x} {'+' if d.crossings[x] == 1 else '-'}")
    for c in d.component_ids():
        toks = " ".join(_event_token(e) for e in d.events(c))
        lines.append(f"component {c}: {toks}".rstrip())
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# validation

def validate_structural(d: Diagram) -> list[str]:
    """All structural invariants plus the homology-parity crossing rule.

    Returns a list of violations; empty means the diagram is valid.
    """
    problems = []
    if d.boundary_pairs < 0:
        problems.append("negative boundary pair count")
    roles: dict[int, list[str]] = {}
    pair_uses: dict[int, int] = {}
    for c, evs in d.components.items():
        for e in evs:
            if isinstance(e, CrossingPass):
                roles.setdefault(e.crossing, []).append(e.role)
                if e.crossing not in d.crossings:
                    problems.append(f"crossing {e.crossing} used but not declared")
            else:
                pair_uses[e.pair] = pair_uses.get(e.pair, 0) + 1
                if not 0 <= e.pair < d.boundary_pairs:
                    problems.append(f"boundary pair {e.pair} out of range")
                if e.side not in (0, 1):
                    problems.append(f"boundary pair {e.pair} has bad exit side")
    for x in d.crossings:
        rr = sorted(roles.get(x, []))
        if rr != [OVER, UNDER]:
            problems.append(f"crossing {x} must be used exactly twice with roles o,u (got {rr})")
    for p in range(d.boundary_pairs):
        if pair_uses.get(p, 0) != 1:
            problems.append(f"boundary pair {p} used {pair_uses.get(p, 0)} times, expected 1")
    if not problems:
        ids = d.component_ids()
        for i, c1 in enumerate(ids):
            for c2 in ids[i + 1:]:
                want = homology_class(d, c1) * homology_class(d, c2)
                got = len(crossings_between(d, c1, c2))
                if got % 2 != want % 2:
                    problems.append(
                        f"components {c1},{c2}: {got} crossings, parity must be "
                        f"{want % 2} (product of homology classes)"
                    )
    return problems


@dataclass(frozen=True)
class EmbeddingReport:
    status: str  # "ok" | "not-cellular" | "violation"
    details: tuple[str, ...] = ()
    # (V, E, F) of the net piece containing the line at infinity, in net
    # terms (pair points as vertices, infinity segments as edges), when the
    # diagram has boundary pairs
    infinity_piece: tuple[int, int, int] | None = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def validate_embedding(d: Diagram) -> EmbeddingReport:
    """Necessary test for realizability in the disk with antipodal boundary.

    The disk complex (arcs, crossings, boundary circle) is traced with the
    rotation system given by crossing signs and boundary order.  The piece
    containing the circle must be spherical in the disk model, which is the
    Euler characteristic 1 of the projective plane in net terms; pieces
    disjoint from the circle must be spherical outright.  Crossingless
    closed curves impose nothing.  Per-piece tracing leaves no disconnected
    configuration untestable, so the not-cellular verdict is never produced
    by this implementation; callers may still receive it from future
    strengthenings.
    """
    problems = validate_structural(d)
    if problems:
        return EmbeddingReport("violation", tuple(problems))
    cx = build_complex(d)
    details = []
    infinity_piece = None
    k = d.boundary_pairs
    for piece in connected_pieces(cx):
        V, E, F = piece_euler(cx, piece)
        chi = V - E + F
        has_circle = any(v[0] == "s" for v in piece)
        if chi != 2:
            where = "infinity piece" if has_circle else "affine piece"
            details.append(f"{where}: V={V} E={E} F={F} gives chi={chi}, expected 2")
        if has_circle:
            # net terms: slots fuse into pair points, circle edges halve,
            # the outer face disappears
            infinity_piece = (V - k, E - k, F - 1)
    if details:
        return EmbeddingReport("violation", tuple(details), infinity_piece)
    return EmbeddingReport("ok", (), infinity_piece)


# ---------------------------------------------------------------------------
# sidecar

def parse_data(text: str, d: Diagram) -> "_descend.DescendingData":
    order = []
    orientations = {}
    basepoints = {}
    msets: dict[str, tuple[int, ...]] = {}
    pq = None
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        parts = line.split()
        if parts[0] == "order":
            if len(parts) != 5 or parts[2] not in (FORWARD, REVERSED) or parts[4] not in (BEFORE, AFTER):
                raise ParseError("expected: order <component> <forward|reversed> <event-index> <before|after>", ln)
            comp = parts[1]
            if comp in orientations:
                raise ParseError(f"duplicate order line for {comp!r}", ln)
            if not parts[3].isdigit():
                raise ParseError(f"bad event index {parts[3]!r}", ln)
            order.append(comp)
            orientations[comp] = parts[2]
            basepoints[comp] = PointRef(comp, int(parts[3]), parts[4])
        elif parts[0] == "mset":
            head, sep, body = line.partition(":")
            if not sep:
                raise ParseError("mset line needs a colon", ln)
            comp = head[len("mset"):].strip()
            if comp in msets:
                raise ParseError(f"duplicate mset line for {comp!r}", ln)
            ids = []
            for tok in body.split():
                if not tok.isdigit():
                    raise ParseError(f"bad crossing id {tok!r}", ln)
                ids.append(int(tok))
            msets[comp] = tuple(ids)
        elif parts[0] == "pq":
            if len(parts) != 2 or not re.match(r"^B\d+$", parts[1]):
                raise ParseError("expected: pq B<i>", ln)
            if pq is not None:
                raise ParseError("duplicate pq line", ln)
            pq = int(parts[1][1:])
        else:
            raise ParseError(f"unrecognized line {line!r}", ln)
    data = _descend.DescendingData(
        order=tuple(order),
        orientations=orientations,
        basepoints=basepoints,
        msets=msets,
        pq=pq,
    )
    _descend.validate_data(d, data)
    return data


def serialize_data(d: Diagram, data: "_descend.DescendingData") -> str:
    lines = []
    for comp in data.order:
        bp = data.basepoints[comp]
        lines.append(f"order {comp} {data.orientations[comp]} {bp.index} {bp.offset}")
    for comp in sorted(data.msets, key=lambda c: ([int(p) if p.isdigit() else p for p in re.split(r'(\d+)', c)])):
        ids = " ".join(str(x) for x in data.msets[comp])
        lines.append(f"mset {comp}: {ids}".rstrip())
    if data.pq is not None:
        lines.append(f"pq B{data.pq}")
    return "\n".join(lines) + "\n" if lines else ""

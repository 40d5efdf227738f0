"""Command-line frontend.

Subcommands pipeline the library: validate, info, plan, apply, check,
simplify, replay, bracket, certify-unlink, and the gen family.  Output is
line oriented and stable; ``--json`` switches any subcommand to a single
JSON document.  Exit codes: 0 success or positive verdict, 1 negative
verdict, 2 usage or parse error, 3 internal invariant breach.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import (
    DescendError,
    DiagramError,
    MoveError,
    ParseError,
    apply_plan,
    bracket,
    check_descending,
    components_of,
    crossing_partition,
    default_data,
    equivalent_up_to_unit,
    four_line_diagrams,
    homology_class,
    oriented_standard_unlink,
    parse_data,
    parse_diagram,
    parse_plan,
    plan_descending,
    random_diagram,
    recognize_standard_unlink,
    replay_trace,
    serialize_data,
    serialize_diagram,
    serialize_plan,
    serialize_trace,
    simplify_descending,
    standard_unlink,
    total_writhe,
    validate_embedding,
    validate_structural,
)
from .invariant import BracketPolynomial
from .moves import diagram_hash

STATE_SUM_CAP = 20


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _load_diagram(path: str):
    return parse_diagram(_read(path))


def _emit(args, lines: list[str], payload: dict) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in lines:
            print(line)


def _data_for(args, d):
    if getattr(args, "data", None):
        return parse_data(_read(args.data), d)
    return default_data(d)


def cmd_validate(args) -> int:
    d = _load_diagram(args.diagram)
    problems = validate_structural(d)
    report = validate_embedding(d) if not problems else None
    lines = []
    ok = not problems and report.ok
    for p in problems:
        lines.append(f"violation {p}")
    if report is not None and not report.ok:
        for p in report.details:
            lines.append(f"violation {p}")
    lines.append("verdict ok" if ok else "verdict invalid")
    _emit(args, lines, {
        "structural": problems,
        "embedding": report.status if report else "skipped",
        "ok": ok,
    })
    return 0 if ok else 1


def cmd_info(args) -> int:
    d = _load_diagram(args.diagram)
    lines = [f"boundary-pairs {d.boundary_pairs}", f"crossings {len(d.crossings)}"]
    comps = []
    for c, arcs, closed in components_of(d):
        h = homology_class(d, c)
        lines.append(f"component {c} arcs={arcs} homology={h}"
                     + (" closed" if closed else ""))
        comps.append({"id": c, "arcs": arcs, "homology": h, "closed": closed})
    part = crossing_partition(d)
    for x in sorted(part):
        over, under = part[x]
        lines.append(f"crossing {x} over={over} under={under}")
    _emit(args, lines, {
        "boundary_pairs": d.boundary_pairs,
        "components": comps,
        "crossings": {str(x): {"over": a, "under": b} for x, (a, b) in part.items()},
    })
    return 0


def cmd_plan(args) -> int:
    d = _load_diagram(args.diagram)
    data = _data_for(args, d)
    plan = plan_descending(d, data)
    lines = serialize_plan(plan).splitlines()
    lines += ["# data used"] + ["# " + l for l in serialize_data(d, data).splitlines()]
    _emit(args, lines, {
        "flips": list(plan.flips),
        "rules": dict(plan.rules),
        "data": serialize_data(d, data),
    })
    if args.out:
        Path(args.out).write_text(serialize_plan(plan), encoding="utf-8")
    if args.data_out:
        Path(args.data_out).write_text(serialize_data(d, data), encoding="utf-8")
    return 0


def cmd_apply(args) -> int:
    d = _load_diagram(args.diagram)
    plan = parse_plan(_read(args.plan))
    out = apply_plan(d, plan)
    text = serialize_diagram(out)
    _emit(args, text.splitlines(), {"diagram": text})
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    return 0


def cmd_check(args) -> int:
    d = _load_diagram(args.diagram)
    data = _data_for(args, d)
    verdict = check_descending(d, data)
    if verdict is None:
        _emit(args, ["verdict descending"], {"descending": True})
        return 0
    x, rule = verdict
    _emit(args, [f"verdict not-descending offending={x} rule={rule.text()}"],
          {"descending": False, "offending": x, "rule": rule.text()})
    return 1


def cmd_simplify(args) -> int:
    d = _load_diagram(args.diagram)
    data = _data_for(args, d)
    trace = simplify_descending(d, data)
    final = trace.final
    rec = recognize_standard_unlink(final)
    text = serialize_trace(trace)
    lines = text.splitlines()
    lines.append(f"recognized p={rec[0]} q={rec[1]}")
    lines += ["# final diagram"] + ["# " + l for l in serialize_diagram(final).splitlines()]
    _emit(args, lines, {
        "trace": text,
        "final": serialize_diagram(final),
        "recognized": {"p": rec[0], "q": rec[1]},
        "moves": len(trace.steps),
    })
    if args.out:
        Path(args.out).write_text(serialize_diagram(final), encoding="utf-8")
    if args.trace_out:
        Path(args.trace_out).write_text(text, encoding="utf-8")
    return 0


def cmd_replay(args) -> int:
    d = _load_diagram(args.diagram)
    final = replay_trace(d, _read(args.trace))
    _emit(args, [f"replay ok final-hash {diagram_hash(final)}"],
          {"ok": True, "final_hash": diagram_hash(final)})
    return 0


def cmd_bracket(args) -> int:
    d = _load_diagram(args.diagram)
    b = bracket(d, max_crossings=STATE_SUM_CAP)
    _emit(args, [str(b)], {"bracket": str(b)})
    return 0


def cmd_certify_unlink(args) -> int:
    d = _load_diagram(args.diagram)
    data = _data_for(args, d)
    plan = plan_descending(d, data)
    fixed = apply_plan(d, plan)
    trace = simplify_descending(fixed, data)
    final = trace.final
    rec = recognize_standard_unlink(final)
    if rec is None:
        _emit(args, ["verdict failed simplification missed the standard unlink"],
              {"certified": False})
        return 3
    b_final = bracket(final, max_crossings=STATE_SUM_CAP)
    b_std = bracket(standard_unlink(*rec), max_crossings=STATE_SUM_CAP)
    ok = equivalent_up_to_unit(b_final, b_std)
    b_in = bracket(fixed, max_crossings=STATE_SUM_CAP)
    moves_ok = equivalent_up_to_unit(b_in, b_final)
    lines = [
        f"flips {len(plan.flips)}",
        f"moves {len(trace.steps)}",
        f"recognized p={rec[0]} q={rec[1]}",
        f"bracket-final {b_final}",
        f"bracket-standard {b_std}",
        "verdict certified" if ok and moves_ok else "verdict mismatch",
    ]
    _emit(args, lines, {
        "certified": bool(ok and moves_ok),
        "p": rec[0], "q": rec[1],
        "flips": list(plan.flips),
        "moves": len(trace.steps),
        "bracket_final": str(b_final),
        "bracket_standard": str(b_std),
    })
    if ok and moves_ok:
        return 0
    return 3


def cmd_gen(args) -> int:
    if args.what == "unlink":
        d = standard_unlink(args.p, args.q)
        print(serialize_diagram(d), end="")
    elif args.what == "oriented-unlink":
        d, o = oriented_standard_unlink(args.q)
        print(serialize_diagram(d), end="")
        for c in d.component_ids():
            print(f"# orient {c} {o[c]}")
        print(f"# writhe {total_writhe(d, o)}")
    elif args.what == "random":
        d = random_diagram(args.max_crossings, args.max_components,
                           args.max_pairs, args.seed)
        print(serialize_diagram(d), end="")
    elif args.what == "four-line":
        for i, (d, o) in enumerate(four_line_diagrams()):
            rec = recognize_standard_unlink(d)
            print(f"# member {i} {'standard' if rec else 'non-standard'}")
            print(serialize_diagram(d), end="")
            for c in d.component_ids():
                print(f"# orient {c} {o[c]}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="projknot",
        description="link diagrams in the projective space: descending data, "
                    "crossing-change planning, move simplification, bracket "
                    "certification",
    )
    ap.add_argument("--json", action="store_true", help="structured output")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("validate", help="structural and embedding checks")
    p.add_argument("diagram")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("info", help="components, homology, crossings")
    p.add_argument("diagram")
    p.set_defaults(fn=cmd_info)

    p = sub.add_parser("plan", help="crossing changes making the diagram descending")
    p.add_argument("diagram")
    p.add_argument("--data", help="descending-data sidecar")
    p.add_argument("--out", help="write the plan here")
    p.add_argument("--data-out", help="write the data used here")
    p.set_defaults(fn=cmd_plan)

    p = sub.add_parser("apply", help="apply a crossing-change plan")
    p.add_argument("diagram")
    p.add_argument("plan")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_apply)

    p = sub.add_parser("check", help="descending verdict")
    p.add_argument("diagram")
    p.add_argument("--data")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("simplify", help="move a descending diagram to canonical form")
    p.add_argument("diagram")
    p.add_argument("--data")
    p.add_argument("--out")
    p.add_argument("--trace-out")
    p.set_defaults(fn=cmd_simplify)

    p = sub.add_parser("replay", help="re-verify a move trace hash by hash")
    p.add_argument("diagram")
    p.add_argument("trace")
    p.set_defaults(fn=cmd_replay)

    p = sub.add_parser("bracket", help="print the bracket polynomial")
    p.add_argument("diagram")
    p.set_defaults(fn=cmd_bracket)

    p = sub.add_parser("certify-unlink",
                       help="plan, apply, simplify, compare brackets")
    p.add_argument("diagram")
    p.add_argument("--data")
    p.set_defaults(fn=cmd_certify_unlink)

    p = sub.add_parser("gen", help="generators")
    gsub = p.add_subparsers(dest="what", required=True)
    g = gsub.add_parser("unlink")
    g.add_argument("p", type=int)
    g.add_argument("q", type=int)
    g = gsub.add_parser("oriented-unlink")
    g.add_argument("q", type=int)
    g = gsub.add_parser("random")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--max-crossings", type=int, default=8)
    g.add_argument("--max-components", type=int, default=3)
    g.add_argument("--max-pairs", type=int, default=6)
    g = gsub.add_parser("four-line")
    p.set_defaults(fn=cmd_gen)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    try:
        return args.fn(args)
    except ParseError as e:
        print(f"error parse {e}", file=sys.stderr)
        return 2
    except FileNotFoundError as e:
        print(f"error file {e}", file=sys.stderr)
        return 2
    except MoveError as e:
        print(f"error internal {e}", file=sys.stderr)
        return 3
    except (DescendError, DiagramError) as e:
        print(f"error input {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())

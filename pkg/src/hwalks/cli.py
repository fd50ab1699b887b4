"""The `hwalks` command-line tool.

Exit codes for decision subcommands reflect the mathematical answer: 0 for a
positive answer (exists / valid / panchromatic / found), 1 for a negative
one, 2 for usage errors, guard violations, and exhausted budgets.  `--json`
swaps the human text for one stable JSON object with a top-level schema tag.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from hwalks.digraphs import (
    FormatError,
    GraphError,
    load_colored_digraph,
    parse_digraph,
    parse_graph,
    parse_pattern,
    serialize_colored_digraph,
    serialize_pattern,
)
from hwalks.kernels import (
    BudgetExhausted,
    find_kernel_backtracking,
    find_kernel_bruteforce,
    is_kernel_by_h_walks,
)
from hwalks.partitions import (
    ObstructionWitness,
    classify_pattern,
    minimal_obstruction_family,
)
from hwalks.reach import reach_by_h_walks
from hwalks.reductions import (
    parse_sidecar,
    reduce_all_red,
    reduce_edge_coloring,
    reduce_kcoloring,
    reduce_subdivision,
    serialize_sidecar,
    translate_to_source,
    translate_to_target,
    extract_coloring,
    kernel_from_coloring,
)
from hwalks.search import SearchSpec, search_kernel_free

SCHEMA = 1


def _sha256(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _emit_json(payload: dict) -> None:
    payload = {"schema": SCHEMA, **payload}
    print(json.dumps(payload, sort_keys=True))


def _split_set(text: str) -> list[str]:
    return [tok for tok in text.split(",") if tok]


def _read_vertex_set(path: str) -> list[str]:
    out = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        s = raw.strip()
        if not s or s.startswith("#"):
            continue
        out.extend(s.split())
    return out


def _read_coloring(path: str) -> dict[str, int]:
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        s = raw.strip()
        if not s or s.startswith("#"):
            continue
        tokens = s.split()
        if len(tokens) != 2:
            raise FormatError("expected `<vertex> <color>`", lineno)
        try:
            out[tokens[0]] = int(tokens[1])
        except ValueError:
            raise FormatError("color is not an integer", lineno) from None
    return out


def cmd_reach(args) -> int:
    cd = load_colored_digraph(args.colored)
    rs = reach_by_h_walks(cd, getattr(args, "from"), naive_seeding=args.naive_seeding)
    members = sorted(rs.members)
    if args.json:
        _emit_json(
            {
                "command": "reach",
                "source": rs.source,
                "members": members,
                "explored": rs.explored,
                "input_sha256": _sha256(args.colored),
            }
        )
    else:
        for v in members:
            print(v)
    return 0


def cmd_kernel_verify(args) -> int:
    cd = load_colored_digraph(args.colored)
    members = _split_set(args.set)
    check = is_kernel_by_h_walks(cd, members)
    if args.json:
        _emit_json(
            {
                "command": "kernel-verify",
                "valid": check.valid,
                "violation": list(check.violation) if check.violation else None,
                "members": sorted(set(members)),
                "input_sha256": _sha256(args.colored),
            }
        )
    elif check.valid:
        print("valid kernel by H-walks")
    else:
        kind, *rest = check.violation
        print(f"invalid: {kind} violated at {', '.join(rest)}")
    return 0 if check.valid else 1


def cmd_kernel_find(args) -> int:
    cd = load_colored_digraph(args.colored)
    if args.method == "brute":
        verdict = find_kernel_bruteforce(cd, "hwalks", threads=args.threads)
    else:
        verdict = find_kernel_backtracking(cd, budget=args.budget, threads=args.threads)
    payload = {
        "command": "kernel-find",
        "exists": verdict.exists,
        "method": verdict.method,
        "nodes": verdict.nodes,
        "elapsed": round(verdict.elapsed, 6),
        "certificate": sorted(verdict.certificate.members) if verdict.certificate else None,
        "input_sha256": _sha256(args.colored),
    }
    if args.json:
        _emit_json(payload)
    elif verdict.exists:
        print("exists: " + ",".join(sorted(verdict.certificate.members)))
        print(f"nodes {verdict.nodes}")
    else:
        print("not-exists")
        print(f"nodes {verdict.nodes}")
    return 0 if verdict.exists else 1


def _witness_payload(evidence):
    if isinstance(evidence, ObstructionWitness):
        return {
            "kind": "obstruction",
            "vertices": list(evidence.vertices),
            "family_index": evidence.family_index,
            "key": evidence.key.hex(),
        }
    return {"kind": "loopless-vertex", "vertex": evidence}


def cmd_pattern_classify(args) -> int:
    h = parse_pattern(Path(args.pattern).read_text(encoding="utf-8"))
    result = classify_pattern(h)
    if args.json:
        _emit_json(
            {
                "command": "pattern-classify",
                "answer": "panchromatic" if result.panchromatic else "not-panchromatic",
                "evidence": None if result.panchromatic else _witness_payload(result.evidence),
                "reduction_case": None
                if result.reduction_case is None
                else {"kind": result.reduction_case.kind, "roles": result.reduction_case.roles},
            }
        )
    elif result.panchromatic:
        print("panchromatic")
    else:
        print("not-panchromatic")
        if isinstance(result.evidence, ObstructionWitness):
            trip = ",".join(result.evidence.vertices)
            print(f"evidence: obstruction {{{trip}}} family #{result.evidence.family_index}")
        else:
            print(f"evidence: loopless vertex {result.evidence}")
        roles = ", ".join(f"{k}={v}" for k, v in result.reduction_case.roles.items())
        print(f"case: {result.reduction_case.kind} ({roles})")
    return 0 if result.panchromatic else 1


def cmd_obstructions(args) -> int:
    records = minimal_obstruction_family(args.max_n)
    if args.out_dir:
        from hwalks.report import save_obstruction_report

        tsv_path, fig_path = save_obstruction_report(records, args.out_dir)
        if not args.json:
            print(f"wrote {tsv_path}")
            print(f"wrote {fig_path}")
    if args.json:
        _emit_json(
            {
                "command": "obstructions",
                "max_n": args.max_n,
                "records": [
                    {
                        "n": r.digraph.n,
                        "family_index": r.family_index,
                        "classifications": sorted(r.classifications),
                        "arcs": [f"{u}>{v}" for u, v in r.digraph.sorted_arcs()],
                        "key": r.key.hex(),
                    }
                    for r in records
                ],
            }
        )
    else:
        for r in records:
            idx = f"#{r.family_index:02d}" if r.family_index is not None else "   "
            arcs = ";".join(f"{u}>{v}" for u, v in r.digraph.sorted_arcs()) or "-"
            print(f"n={r.digraph.n} {idx} {','.join(sorted(r.classifications))} {arcs}")
    return 0


def _write_artifact(art, out: str, pattern_text: str) -> tuple[Path, Path, Path]:
    out_path = Path(out)
    pat_path = out_path.with_suffix(out_path.suffix + ".pattern")
    side_path = out_path.with_suffix(out_path.suffix + ".prov")
    pat_path.write_text(pattern_text, encoding="utf-8")
    out_path.write_text(
        serialize_colored_digraph(art.colored, pat_path.name), encoding="utf-8"
    )
    side_path.write_text(serialize_sidecar(art), encoding="utf-8")
    return out_path, pat_path, side_path


def cmd_reduce(args) -> int:
    if args.construction == "all-red":
        d = parse_digraph(Path(args.digraph).read_text(encoding="utf-8"))
        h = parse_pattern(Path(args.pattern).read_text(encoding="utf-8"))
        art = reduce_all_red(d, h, args.red)
    elif args.construction == "subdivide":
        d = parse_digraph(Path(args.digraph).read_text(encoding="utf-8"))
        h = parse_pattern(Path(args.pattern).read_text(encoding="utf-8"))
        art = reduce_subdivision(d, h, args.red, args.green, args.blue)
    elif args.construction == "kcol":
        g = parse_graph(Path(args.graph).read_text(encoding="utf-8"))
        h = parse_pattern(Path(args.pattern).read_text(encoding="utf-8"))
        obstruction = load_colored_digraph(args.obstruction)
        part = _split_set(args.obstruction_part) if args.obstruction_part else None
        order = _split_set(args.orientation) if args.orientation else None
        art = reduce_kcoloring(
            g,
            args.k,
            h,
            args.red,
            args.green,
            args.blue,
            obstruction,
            bipartite=args.bipartite,
            obstruction_part=part,
            orientation_order=order,
        )
    else:  # edge-color
        d = parse_digraph(Path(args.digraph).read_text(encoding="utf-8"))
        art = reduce_edge_coloring(d)
    pattern_text = serialize_pattern(art.colored.pattern)
    out_path, pat_path, side_path = _write_artifact(art, args.out, pattern_text)
    if args.figure:
        from hwalks.report import save_colored_figure

        save_colored_figure(args.figure, art.colored, title=art.kind)
    payload = {
        "command": "reduce",
        "kind": art.kind,
        "vertices": art.colored.digraph.n,
        "arcs": len(art.colored.digraph.arcs),
        "out": str(out_path),
        "pattern": str(pat_path),
        "sidecar": str(side_path),
    }
    if args.json:
        _emit_json(payload)
    else:
        print(f"{art.kind}: {payload['vertices']} vertices, {payload['arcs']} arcs")
        print(f"wrote {out_path}, {pat_path}, {side_path}")
    return 0


def cmd_certify(args) -> int:
    art = parse_sidecar(Path(args.reduction).read_text(encoding="utf-8"))
    try:
        if art.kind == "kcoloring":
            if args.direction == "to-target":
                coloring = _read_coloring(args.certificate)
                members = sorted(kernel_from_coloring(art, coloring))
                result: dict = {"members": members}
                lines = members
            else:
                members = _read_vertex_set(args.certificate)
                coloring = extract_coloring(art, members)
                result = {"coloring": coloring}
                lines = [f"{v} {c}" for v, c in coloring.items()]
        else:
            members = _read_vertex_set(args.certificate)
            if args.direction == "to-target":
                out = translate_to_target(art, members)
            else:
                out = translate_to_source(art, members)
            result = {"members": sorted(out)}
            lines = sorted(out)
    except GraphError as exc:
        if args.json:
            _emit_json({"command": "certify", "valid": False, "error": str(exc)})
        else:
            print(f"invalid certificate: {exc}", file=sys.stderr)
        return 1
    valid = True
    if args.colored and args.direction == "to-target" and "members" in result:
        cd = load_colored_digraph(args.colored)
        valid = is_kernel_by_h_walks(cd, result["members"]).valid
    if args.json:
        _emit_json({"command": "certify", "direction": args.direction, "valid": valid, **result})
    else:
        for line in lines:
            print(line)
        if not valid:
            print("translated certificate failed re-verification", file=sys.stderr)
    return 0 if valid else 1


def cmd_search(args) -> int:
    h = parse_pattern(Path(args.pattern).read_text(encoding="utf-8"))
    colors = tuple(_split_set(args.colors)) if args.colors else None
    spec = SearchSpec(
        pattern=h,
        max_n=args.max_n,
        bipartite=args.bipartite,
        tournament=args.tournament,
        digon_free=args.digon_free,
        colors=colors,
    )
    found, rep = search_kernel_free(spec)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            for n in sorted(rep.candidates_by_size):
                fh.write(
                    json.dumps(
                        {
                            "schema": SCHEMA,
                            "event": "size",
                            "n": n,
                            "candidates": rep.candidates_by_size[n],
                        },
                        sort_keys=True,
                    )
                    + "\n"
                )
            fh.write(
                json.dumps(
                    {
                        "schema": SCHEMA,
                        "event": "outcome",
                        "outcome": rep.outcome,
                        "max_n": rep.max_n,
                        "total": rep.total,
                        "found_n": rep.found_n,
                    },
                    sort_keys=True,
                )
                + "\n"
            )
    if found is not None and args.out:
        out_path = Path(args.out)
        pat_path = out_path.with_suffix(out_path.suffix + ".pattern")
        pat_path.write_text(serialize_pattern(h), encoding="utf-8")
        out_path.write_text(serialize_colored_digraph(found, pat_path.name), encoding="utf-8")
    if found is not None and args.figure:
        from hwalks.report import save_colored_figure

        save_colored_figure(args.figure, found, title=f"kernel-free, n={found.digraph.n}")
    if args.json:
        _emit_json(
            {
                "command": "search-kernel-free",
                "outcome": rep.outcome,
                "found_n": rep.found_n,
                "total": rep.total,
                "candidates_by_size": {str(k): v for k, v in rep.candidates_by_size.items()},
            }
        )
    else:
        print(f"{rep.outcome} (examined {rep.total} candidates up to n={rep.max_n})")
        if found is not None:
            for u, v in found.digraph.sorted_arcs():
                print(f"arc {u} {v} {found.coloring[(u, v)]}")
    return 0 if rep.outcome == "found" else 1


def _add_common(p: argparse.ArgumentParser, root: bool = False) -> None:
    # Global flags work both before and after the subcommand; a later
    # occurrence overrides, absence leaves the root default in place.
    default = dict(json=False, seed=None, threads=1, budget=None)
    sup = argparse.SUPPRESS
    p.add_argument("--json", action="store_true", help="emit one JSON object",
                   default=default["json"] if root else sup)
    p.add_argument("--seed", type=int, help="seed for randomized corpora",
                   default=default["seed"] if root else sup)
    p.add_argument("--threads", type=int, help="worker cap for closure scans",
                   default=default["threads"] if root else sup)
    p.add_argument("--budget", type=int, help="node budget for backtracking search",
                   default=default["budget"] if root else sup)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hwalks", description=__doc__)
    _add_common(parser, root=True)
    sub = parser.add_subparsers(dest="command", required=True)
    leaves = []

    p = sub.add_parser("reach", help="vertices reached by H-walks from a source")
    p.add_argument("--colored", required=True)
    p.add_argument("--from", required=True)
    p.add_argument("--naive-seeding", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_reach)
    leaves.append(p)

    kern = sub.add_parser("kernel", help="verify or find kernels by H-walks")
    ksub = kern.add_subparsers(dest="action", required=True)
    p = ksub.add_parser("verify")
    p.add_argument("--colored", required=True)
    p.add_argument("--set", required=True, help="comma-separated vertex labels")
    p.set_defaults(func=cmd_kernel_verify)
    leaves.append(p)
    p = ksub.add_parser("find")
    p.add_argument("--colored", required=True)
    p.add_argument("--method", choices=("brute", "backtrack"), default="backtrack")
    p.set_defaults(func=cmd_kernel_find)
    leaves.append(p)

    pat = sub.add_parser("pattern", help="pattern classification")
    psub = pat.add_subparsers(dest="action", required=True)
    p = psub.add_parser("classify")
    p.add_argument("pattern")
    p.set_defaults(func=cmd_pattern_classify)
    leaves.append(p)

    p = sub.add_parser("obstructions", help="minimal obstruction census")
    p.add_argument("--max-n", type=int, default=3)
    p.add_argument("--out-dir", default=None, help="write TSV and figure here")
    p.set_defaults(func=cmd_obstructions)
    leaves.append(p)

    red = sub.add_parser("reduce", help="build a hardness-reduction instance")
    rsub = red.add_subparsers(dest="construction", required=True)
    p = rsub.add_parser("all-red")
    p.add_argument("--digraph", required=True)
    p.add_argument("--pattern", required=True)
    p.add_argument("--red", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--figure", default=None)
    p.set_defaults(func=cmd_reduce)
    leaves.append(p)
    p = rsub.add_parser("subdivide")
    p.add_argument("--digraph", required=True)
    p.add_argument("--pattern", required=True)
    p.add_argument("--red", required=True)
    p.add_argument("--green", required=True)
    p.add_argument("--blue", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--figure", default=None)
    p.set_defaults(func=cmd_reduce)
    leaves.append(p)
    p = rsub.add_parser("kcol")
    p.add_argument("--graph", required=True)
    p.add_argument("--pattern", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--red", required=True)
    p.add_argument("--green", required=True)
    p.add_argument("--blue", required=True)
    p.add_argument("--obstruction", required=True, help="kernel-free colored digraph file")
    p.add_argument("--bipartite", action="store_true")
    p.add_argument("--obstruction-part", default=None, help="one side of the obstruction bipartition")
    p.add_argument("--orientation", default=None, help="vertex order defining the acyclic orientation")
    p.add_argument("--out", required=True)
    p.add_argument("--figure", default=None)
    p.set_defaults(func=cmd_reduce)
    leaves.append(p)
    p = rsub.add_parser("edge-color")
    p.add_argument("--digraph", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--figure", default=None)
    p.set_defaults(func=cmd_reduce)
    leaves.append(p)

    p = sub.add_parser("certify", help="translate certificates across a reduction")
    p.add_argument("direction", choices=("to-target", "to-source"))
    p.add_argument("--reduction", required=True, help="sidecar provenance file")
    p.add_argument("--certificate", required=True)
    p.add_argument("--colored", default=None, help="target instance, to re-verify to-target output")
    p.set_defaults(func=cmd_certify)
    leaves.append(p)

    srch = sub.add_parser("search", help="exhaustive kernel-free search")
    ssub = srch.add_subparsers(dest="action", required=True)
    p = ssub.add_parser("kernel-free")
    p.add_argument("--pattern", required=True)
    p.add_argument("--max-n", type=int, required=True)
    p.add_argument("--bipartite", action="store_true")
    p.add_argument("--tournament", action="store_true")
    p.add_argument("--digon-free", action="store_true")
    p.add_argument("--colors", default=None, help="comma-separated color restriction")
    p.add_argument("--out", default=None, help="write the found instance here")
    p.add_argument("--report", default=None, help="JSON-lines search report")
    p.add_argument("--figure", default=None, help="render the found instance here")
    p.set_defaults(func=cmd_search)
    leaves.append(p)

    for leaf in leaves:
        _add_common(leaf)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExhausted as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return 2
    except (FormatError, GraphError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

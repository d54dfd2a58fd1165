"""Batch command-line front end.

Subcommands: load, reduce, cluster, cores, components, path, layout,
drill, expand, serve.  Outputs are UTF-8 tab-separated tables or versioned
JSON with LF endings and '.' decimal points, so runs are byte-reproducible
given identical inputs and seed.  The default seed can be set through the
CITNET_SEED environment variable.

Exit codes: 0 ok, 1 usage, 2 input format, 3 contract violation.  Errors
print a single machine-parseable line: ``citnet: error: <kind>: <message>``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import analytics, dagops, ingest, layout
from .errors import CitnetError, ContractError, InputFormatError, PreconditionError
from .explore import (ExpansionSpec, SelectionSpec, Session, drill_down, expand,
                      history_navigate, title_search)
from .model import BuildResult, build_network
from .svg import render_svg

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FORMAT = 2
EXIT_CONTRACT = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits 2; usage errors are 1 here
        self.print_usage(sys.stderr)
        print(f"citnet: error: usage: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _default_seed() -> int:
    try:
        return int(os.environ.get("CITNET_SEED", "0"))
    except ValueError:
        return 0


def build_arg_parser() -> _Parser:
    p = _Parser(prog="citnet", description="Citation network construction, analysis and layout.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_network_inputs(sp):
        sp.add_argument("--pubs", required=True, help="publications pair file (TSV)")
        sp.add_argument("--cites", required=True, help="citations pair file (TSV)")

    sp = sub.add_parser("load", help="parse + match bibliographic input, emit pair files")
    group = sp.add_mutually_exclusive_group(required=True)
    group.add_argument("--wos", help="tagged plain-text export")
    group.add_argument("--pubs", help="publications pair file (with --cites: validate and re-emit)")
    sp.add_argument("--cites", help="citations pair file (used with --pubs)")
    sp.add_argument("--min-citations", type=int, default=10,
                    help="citations required to keep an unmatched reference as an incomplete record")
    sp.add_argument("--out-pubs", required=True)
    sp.add_argument("--out-cites", required=True)
    sp.add_argument("--report", help="write the match report as JSON")

    sp = sub.add_parser("reduce", help="emit the transitive reduction edge list")
    add_network_inputs(sp)
    sp.add_argument("--out", help="output TSV (default stdout)")

    sp = sub.add_parser("cluster", help="cluster publications, emit id->cluster table")
    add_network_inputs(sp)
    sp.add_argument("--resolution", type=float, default=1.0)
    sp.add_argument("--min-cluster-size", type=int, default=1)
    sp.add_argument("--policy", choices=["merge", "discard"], default="merge")
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--out", help="output TSV (default stdout)")

    sp = sub.add_parser("cores", help="emit core publications (k-core members)")
    add_network_inputs(sp)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--out")

    sp = sub.add_parser("components", help="emit connected component per publication")
    add_network_inputs(sp)
    sp.add_argument("--out")

    sp = sub.add_parser("path", help="shortest or longest citation paths between two publications")
    add_network_inputs(sp)
    sp.add_argument("--from", dest="from_id", required=True)
    sp.add_argument("--to", dest="to_id", required=True)
    sp.add_argument("--kind", choices=["shortest", "longest"], default="shortest")
    sp.add_argument("--max-paths", type=int, default=100)
    sp.add_argument("--out")

    sp = sub.add_parser("layout", help="emit a historiograph layout frame (JSON, optional SVG)")
    add_network_inputs(sp)
    sp.add_argument("--display-count", type=int, default=40)
    sp.add_argument("--alpha", type=float, default=0.1)
    sp.add_argument("--beta", type=float, default=0.5)
    sp.add_argument("--grid-points", type=int, default=100)
    sp.add_argument("--min-separation", type=int, default=5)
    sp.add_argument("--max-per-layer", type=int, default=10)
    sp.add_argument("--reduction", action="store_true",
                    help="draw only transitive-reduction edges")
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--out", help="frame JSON (default stdout)")
    sp.add_argument("--svg", help="also render an SVG file")

    for name in ("drill", "expand"):
        sp = sub.add_parser(name, help="run a declarative selection/expansion pipeline")
        add_network_inputs(sp)
        sp.add_argument("--script", required=True, help="JSON pipeline script")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--out", help="step report JSON (default stdout)")

    sp = sub.add_parser("serve", help="start the local JSON session service")
    sp.add_argument("--port", type=int, default=8040)
    sp.add_argument("--host", default="127.0.0.1",
                    help="bind address (loopback by default; widen at your own risk)")

    return p


def _load_network(args) -> BuildResult:
    pubs, edges = ingest.parse_pair_files(Path(args.pubs), Path(args.cites))
    return build_network(pubs, edges)


def _emit(text: str, out: "str | None") -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _seed_of(args) -> int:
    return args.seed if getattr(args, "seed", None) is not None else _default_seed()


# -- pipeline scripts -----------------------------------------------------------

def run_pipeline(session: Session, steps: list[dict], seed: int = 0) -> dict:
    """Execute declarative drill/expand steps; returns the per-step report."""
    report: list[dict] = []
    for k, step in enumerate(steps):
        op = step.get("op")
        if op == "search_drill":
            hits = title_search(session.current, step["pattern"])
            if not hits:
                raise PreconditionError(f"step {k}: search matched no publications")
            session.push(session.current.with_members(hits))
        elif op == "drill":
            sel = step.get("selection", {})
            drill_down(session, SelectionSpec(**sel))
        elif op == "mark":
            session.replace_current(session.current.with_marked(step["ids"]))
        elif op == "keep_largest_component":
            members = analytics.largest_component_members(session.current)
            session.push(session.current.with_members(members))
        elif op == "expand":
            expand(session, ExpansionSpec(
                add_predecessors=bool(step.get("predecessors", False)),
                add_successors=bool(step.get("successors", False)),
                add_intermediates=bool(step.get("intermediates", False)),
                min_relations=int(step.get("min_relations", 1)),
            ))
        elif op == "remove":
            remaining = set(session.current.member_ids) - set(step["ids"])
            if not remaining:
                raise PreconditionError(f"step {k}: removal would empty the network")
            session.push(session.current.with_members(remaining))
        elif op == "cluster":
            part = analytics.cluster(
                session.current,
                resolution=float(step.get("resolution", 1.0)),
                min_cluster_size=int(step.get("min_cluster_size", 1)),
                small_cluster_policy=step.get("policy", "merge"),
                seed=int(step.get("seed", seed)),
            )
            session.replace_current(session.current.with_groups(part.as_dict()))
        elif op == "cores":
            core = analytics.core_publications(session.current, int(step["k"]))
            if step.get("drill", False):
                if not core:
                    raise PreconditionError(f"step {k}: no core publications at k={step['k']}")
                session.push(session.current.with_members(core))
            else:
                session.replace_current(session.current.with_marked(core))
        elif op == "back":
            history_navigate(session, "back")
        elif op == "forward":
            history_navigate(session, "forward")
        else:
            raise InputFormatError(f"step {k}: unknown pipeline op {op!r}")
        view = session.current
        report.append({
            "step": k,
            "op": op,
            "members": view.member_count,
            "edges": view.edge_count,
        })
    final = session.current
    return {
        "steps": report,
        "final_members": sorted(final.member_ids),
        "final_counts": final.counts(),
    }


# -- command implementations -------------------------------------------------------

def _cmd_load(args) -> int:
    if args.wos:
        parsed = ingest.parse_wos_export(Path(args.wos))
        result = ingest.match_citations(parsed, incomplete_min_citations=args.min_citations)
        pubs, edges = result.publications, result.edges
        report = result.report()
        report["parse_issues"] = [
            {"lines": [i.line_start, i.line_end], "message": i.message} for i in parsed.issues
        ]
    else:
        if not args.cites:
            raise InputFormatError("--pubs requires --cites")
        pubs, edges = ingest.parse_pair_files(Path(args.pubs), Path(args.cites))
        report = {"publications": len(pubs), "edges": len(edges)}
    built = build_network(pubs, edges)
    report["dropped_edges"] = [
        {"citing": d.citing, "cited": d.cited, "reason": d.reason} for d in built.dropped
    ]
    report["network"] = {
        "publications": built.network.n_publications,
        "citation_relations": built.network.n_edges,
    }
    ingest.write_pair_files(pubs, edges, args.out_pubs, args.out_cites)
    if args.report:
        Path(args.report).write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    print(f"publications={built.network.n_publications} "
          f"citation_relations={built.network.n_edges} dropped={len(built.dropped)}")
    return EXIT_OK


def _cmd_reduce(args) -> int:
    net = _load_network(args).network
    subset = dagops.transitive_reduction(net)
    lines = [f"{a}\t{b}" for a, b in subset.essential]
    _emit("\n".join(lines) + ("\n" if lines else ""), args.out)
    return EXIT_OK


def _cmd_cluster(args) -> int:
    net = _load_network(args).network
    part = analytics.cluster(
        net,
        resolution=args.resolution,
        min_cluster_size=args.min_cluster_size,
        small_cluster_policy=args.policy,
        seed=_seed_of(args),
    )
    rows = [f"{pid}\t{'' if c is None else c}" for pid, c in sorted(part.as_dict().items())]
    _emit("\n".join(rows) + "\n", args.out)
    return EXIT_OK


def _cmd_cores(args) -> int:
    net = _load_network(args).network
    core = analytics.core_publications(net, args.k)
    _emit("\n".join(sorted(core)) + ("\n" if core else ""), args.out)
    return EXIT_OK


def _cmd_components(args) -> int:
    net = _load_network(args).network
    comp = analytics.connected_components(net)
    rows = [f"{pid}\t{c}" for pid, c in sorted(comp.items())]
    _emit("\n".join(rows) + "\n", args.out)
    return EXIT_OK


def _cmd_path(args) -> int:
    net = _load_network(args).network
    result = analytics.extreme_path(net, args.from_id, args.to_id, args.kind, args.max_paths)
    doc = {
        "from": args.from_id,
        "to": args.to_id,
        "kind": args.kind,
        "reachable": result.reachable,
        "length": result.length,
        "truncated": result.truncated,
        "paths": [list(p) for p in result.paths],
    }
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return EXIT_OK


def _cmd_layout(args) -> int:
    net = _load_network(args).network
    params = layout.LayoutParams(
        display_count=args.display_count,
        alpha=args.alpha,
        beta=args.beta,
        grid_points=args.grid_points,
        min_separation=args.min_separation,
        max_per_layer=args.max_per_layer,
        use_transitive_reduction=args.reduction,
        seed=_seed_of(args),
    )
    frame = layout.compose_frame(net.full_view(), params)
    _emit(frame.to_json() + "\n", args.out)
    if args.svg:
        Path(args.svg).write_text(render_svg(frame), encoding="utf-8")
    return EXIT_OK


def _cmd_pipeline(args) -> int:
    net = _load_network(args).network
    try:
        script = json.loads(Path(args.script).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"pipeline script is not valid JSON: {exc}") from None
    steps = script.get("steps")
    if not isinstance(steps, list):
        raise InputFormatError('pipeline script must be {"steps": [...]}')
    session = Session.from_network(net)
    report = run_pipeline(session, steps, seed=_seed_of(args))
    _emit(json.dumps(report, indent=2) + "\n", args.out)
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="info")
    return EXIT_OK


_COMMANDS = {
    "load": _cmd_load,
    "reduce": _cmd_reduce,
    "cluster": _cmd_cluster,
    "cores": _cmd_cores,
    "components": _cmd_components,
    "path": _cmd_path,
    "layout": _cmd_layout,
    "drill": _cmd_pipeline,
    "expand": _cmd_pipeline,
    "serve": _cmd_serve,
}


def main(argv: "list[str] | None" = None) -> int:
    parser = build_arg_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except InputFormatError as exc:
        print(f"citnet: error: format: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except FileNotFoundError as exc:
        print(f"citnet: error: format: missing input file: {exc.filename}", file=sys.stderr)
        return EXIT_FORMAT
    except (ContractError, CitnetError) as exc:
        print(f"citnet: error: contract: {exc}", file=sys.stderr)
        return EXIT_CONTRACT


if __name__ == "__main__":
    sys.exit(main())

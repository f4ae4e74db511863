"""Command-line front end: ``congestlab [global flags] {gen,run,verify,bench,reduce} ...``.

Exit codes: 0 ok, 1 a verification failed, 2 bad usage or parameters,
3 bandwidth or broadcast violation, 4 non-termination.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

from . import detect
from .graphio import dumps_graph, read_graph, write_graph
from .graphs import (
    Coloring,
    Graph,
    GraphError,
    ScaleError,
    complete_graph,
    gnp_graph,
    path_graph,
    random_degenerate_graph,
)
from .instances import DisjointnessInput, all_inputs, random_input
from .lbgen import FAMILIES, gen_pattern_Hk, generate, load_instance, verify_lb_instance
from .mcis import DisconnectedTopology, InfeasibleBudget, induced_via_mcis, mcis_centralized, mcis_program, vc_kernel_program
from .oracles import oracle_mcis, oracle_multicolored, oracle_subgraph
from .reductions import (
    complement_instance,
    multicolored_blowup,
    reduce_clique_to_pattern,
    reduction_verdict,
    simulate_reduction_cc,
    strip_same_color_edges,
)
from .sim import BandwidthViolation, BroadcastViolation, ModelKind, NonTermination, SimModel, SimulationError, run
from .structure import complement

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_BANDWIDTH, EXIT_NONTERM = 0, 1, 2, 3, 4

SCHEMA_PATH = Path(__file__).with_name("schemas") / "record.schema.json"


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- output


def _scalar(value: Any) -> Any:
    if isinstance(value, (dict, list, tuple)):
        return json.dumps(value, sort_keys=True)
    if value is None:
        return ""
    if isinstance(value, bool):
        return "yes" if value else "no"
    return value


def format_record(record: dict, fmt: str) -> str:
    """Render one record; ``rows`` (if present) becomes the table body."""
    if fmt == "json":
        return json.dumps(record, sort_keys=True) + "\n"
    rows = record.get("rows")
    if rows is None:
        rows = [{k: v for k, v in record.items()}]
    keys: list[str] = []
    for row in rows:
        keys.extend(k for k in row if k not in keys)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(keys)
        for row in rows:
            w.writerow([_scalar(row.get(k)) for k in keys])
        return buf.getvalue()
    if "rows" not in record:
        width = max(len(k) for k in keys)
        return "".join(f"{k.ljust(width)}  {_scalar(record[k])}\n" for k in keys)
    cells = [[str(_scalar(row.get(k))) for k in keys] for row in rows]
    widths = [max(len(k), *(len(c[i]) for c in cells)) for i, k in enumerate(keys)]
    out = ["  ".join(k.ljust(w) for k, w in zip(keys, widths))]
    out += ["  ".join(c.ljust(w) for c, w in zip(line, widths)) for line in cells]
    return "\n".join(out) + "\n"


@dataclass
class Globals:
    model: str | None
    bandwidth: int | None
    seed: int
    max_rounds: int
    fmt: str
    out: str | None


def _emit(g: Globals, record: dict, to_file: bool = True) -> None:
    text = format_record(record, g.fmt)
    if g.out and to_file:
        Path(g.out).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- inputs


def _disj_from_args(args, n: int, shape: str, g: Globals) -> DisjointnessInput:
    if args.random:
        return random_input(n, shape, random.Random(g.seed), args.p)
    if args.x0 is None or args.x1 is None:
        raise UsageError("give --x0 and --x1 in hex, or --random")
    return DisjointnessInput.from_hex(args.x0, args.x1, n, shape)


def _read(path: str | None, what: str) -> Graph:
    if path is None:
        raise UsageError(f"--{what} is required")
    g, _ = read_graph(path)
    return g


def _model(g: Globals, program, n: int, default_kind: str, allowed: tuple[str, ...]) -> SimModel:
    kind = g.model or default_kind
    if kind not in allowed:
        raise UsageError(f"this algorithm runs under {', '.join(allowed)}, not {kind}")
    model = program.model_for(ModelKind(kind), n)
    if g.bandwidth is not None:
        model = SimModel(model.kind, g.bandwidth)
    return model


# ---------------------------------------------------------------- gen


def cmd_gen(args, g: Globals) -> int:
    if args.family == "hk":
        if args.k is None:
            raise UsageError("--k is required")
        h = gen_pattern_Hk(args.k, args.long).graph
        record = {"command": "gen", "family": "hk", "params": {"k": args.k, "long": args.long},
                  "n": h.node_count, "m": h.m}
        _write_graph_or_stdout(g, h, [], record)
        return EXIT_OK
    if args.N is None:
        raise UsageError("--N is required")
    shape, _ = FAMILIES[args.family]
    disj = _disj_from_args(args, args.N, shape, g)
    kw = {}
    if args.family == "even-cycle" and args.path_between:
        kw["path_between"] = args.path_between
    inst = generate(args.family, args.N, args.k, disj, **kw)
    h0, h1 = disj.hex()
    record = {
        "command": "gen",
        "family": args.family,
        "params": {k: v for k, v in inst.params.items() if k != "round_lower_bound"},
        "n": inst.graph.node_count,
        "m": inst.graph.m,
        "cut": len(inst.cut),
        "declared_cut": inst.declared_cut,
        "x0": h0,
        "x1": h1,
        "expected": inst.expected,
        "round_lower_bound": inst.params["round_lower_bound"],
    }
    _write_graph_or_stdout(g, inst.graph, inst.sidecar(), record)
    return EXIT_OK


def _write_graph_or_stdout(g: Globals, graph: Graph, extra: list[str], record: dict) -> None:
    if g.out:
        write_graph(g.out, graph, extra)
        record["file"] = g.out
        _emit(g, record, to_file=False)
    else:
        sys.stdout.write(dumps_graph(graph, extra))
        sys.stderr.write(format_record(record, g.fmt))


# ---------------------------------------------------------------- run


def _metrics(res) -> dict:
    m = res.metrics
    return {"rounds": m.rounds, "max_message_bits": m.max_message_bits, "total_bits": m.total_bits,
            "bandwidth": res.model.bandwidth_bits, "model": res.model.kind.value}


def _run_program(g: Globals, topo: Graph, program, default_kind: str, allowed, n_upper=None):
    model = _model(g, program, topo.node_count, default_kind, allowed)
    return run(topo, program, model, g.seed, g.max_rounds, n_upper_bound=n_upper)


def cmd_run(args, g: Globals) -> int:
    topo = _read(args.graph, "graph")
    algo = args.algorithm
    extra: dict[str, Any] = {}
    verdict: bool | None
    if algo == "induced-p2":
        res = _run_program(g, topo, detect.induced_p2_program(), "broadcast", ("broadcast", "congest"))
        verdict = detect.verdict(res.outputs)
    elif algo == "orientation":
        prog = detect.orientation_program(args.d, 1.0 if args.epsilon is None else args.epsilon)
        res = _run_program(g, topo, prog, "congest", ("congest", "broadcast"))
        sigma = detect.assemble_orientation(topo, res.outputs)
        verdict = None
        extra = {"max_out_degree": sigma.max_out_degree(), "phases": sigma.phases(),
                 "acyclic": sigma.is_acyclic(), "layers": list(sigma.layer)}
    elif algo in ("tree-detect", "tree-derandomized"):
        tree = _read(args.tree, "tree")
        if algo == "tree-detect":
            kw = {} if args.alpha is None else {"alpha": args.alpha}
            if args.epsilon is not None:
                kw["epsilon"] = args.epsilon
            prog = detect.induced_tree_random(tree, args.d, args.confidence, **kw)
            extra["trials"] = prog.trials
        else:
            if args.d is None:
                raise UsageError("--d is required for the derandomized detector")
            prog = detect.induced_tree_derandomized(tree, args.d, topo.node_count)
            extra["family_size"] = len(prog.family)
        res = _run_program(g, topo, prog, "congest", ("congest",))
        verdict = detect.verdict(res.outputs)
    elif algo == "mcis":
        h = _read(args.h, "h")
        res = _run_program(g, topo, mcis_program(h, _tau(args)), "congest", ("congest",))
        outs = [res.outputs[v] for v in sorted(res.outputs)]
        verdict = None
        extra = {"size": outs[0].size, "mapping": [o.line() for o in outs]}
    elif algo == "induced-mcis":
        h = _read(args.h, "h")
        res = _run_program(g, topo, induced_via_mcis(h, _tau(args)), "congest", ("congest",))
        verdict = detect.verdict(res.outputs)
    elif algo == "vc":
        res = _run_program(g, topo, vc_kernel_program(_tau(args)), "congest", ("congest",))
        verdict = None
        extra = {"cover": sorted(next(iter(res.outputs.values())).cover)}
    elif algo == "clique-cc":
        h = _read(args.h, "h")
        if args.s is None:
            raise UsageError("--s is required")
        prog = simulate_reduction_cc(h, args.s)
        res = _run_program(g, topo, prog, "clique", ("clique",))
        verdict = reduction_verdict(res.outputs)
        extra = {"overhead_bound": prog.overhead_bound}
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown algorithm {algo}")
    record = {"command": "run", "algorithm": algo, "seed": g.seed, "n": topo.node_count,
              "verdict": verdict, **_metrics(res), **extra}
    _emit(g, record)
    return EXIT_OK


def _tau(args) -> int:
    if args.tau is None:
        raise UsageError("--tau is required")
    return args.tau


# ---------------------------------------------------------------- verify


def _verify_family(args, g: Globals) -> tuple[list[dict], int]:
    shape, _ = FAMILIES[args.family]
    if args.N is None:
        raise UsageError("--N is required")
    if args.exhaustive:
        inputs = all_inputs(args.N, shape)
    else:
        rng = random.Random(g.seed)
        inputs = (random_input(args.N, shape, rng, args.p) for _ in range(args.samples))
    failures: dict[str, list[str]] = {}
    count = 0
    for disj in inputs:
        count += 1
        report = verify_lb_instance(generate(args.family, args.N, args.k, disj), override_scale=True)
        for name, ok, detail in report.clauses:
            failures.setdefault(name, [])
            if not ok:
                failures[name].append(f"x0={disj.hex()[0]} x1={disj.hex()[1]}: {detail}")
    return [{"name": k, "passed": not v, "detail": "; ".join(v[:3])} for k, v in failures.items()], count


def _verify_instance(args, g: Globals) -> tuple[list[dict], int]:
    graph, records = read_graph(args.instance)
    inst = load_instance(graph, records)
    report = verify_lb_instance(inst, override_scale=True)
    return [{"name": n, "passed": ok, "detail": d} for n, ok, d in report.clauses], 1


def _verify_reduction(args, g: Globals) -> tuple[list[dict], int]:
    rng = random.Random(g.seed)
    n = args.n or 6
    clauses: dict[str, list[str]] = {}

    def check(name: str, ok: bool, detail: str) -> None:
        clauses.setdefault(name, [])
        if not ok:
            clauses[name].append(detail)

    if args.reduction == "clique-to-pattern":
        h = read_graph(args.pattern)[0] if args.pattern else complement(path_graph(5))
        s = args.s or 3
        clique = complete_graph(s)
        for i in range(args.samples):
            host = gnp_graph(n, args.p, rng)
            red = reduce_clique_to_pattern(host, h, s)
            has = oracle_subgraph(host, clique, False, override_scale=True) is not None
            ind = oracle_subgraph(red.graph, h, True, override_scale=True) is not None
            sub = oracle_subgraph(red.graph, h, False, override_scale=True) is not None
            check("clique-iff-induced", has == ind, f"sample {i}: clique={has} induced={ind}")
            check("clique-iff-subgraph", has == sub, f"sample {i}: clique={has} subgraph={sub}")
            probs = red.rule_problems(host)
            check("construction", not probs, f"sample {i}: {probs[:1]}")
    elif args.reduction in ("blowup", "strip"):
        k = args.k or 3
        for i in range(args.samples):
            host = gnp_graph(n, args.p, rng)
            pattern = gnp_graph(k, 0.6, rng)
            if args.reduction == "blowup":
                big, chi = multicolored_blowup(host, k)
                check("node-count", big.node_count == k * n, f"sample {i}")
                plain = oracle_subgraph(host, pattern, False, override_scale=True) is not None
                colored = oracle_multicolored(big, pattern, chi, False, override_scale=True) is not None
                check("equivalence", plain == colored, f"sample {i}: plain={plain} colored={colored}")
            else:
                chi = Coloring(tuple(rng.randint(1, k) for _ in range(n)))
                stripped = strip_same_color_edges(host, chi)
                for induced in (False, True):
                    a = oracle_multicolored(host, pattern, chi, induced, override_scale=True) is not None
                    b = oracle_multicolored(stripped, pattern, chi, induced, override_scale=True) is not None
                    check(f"equivalence-{'induced' if induced else 'subgraph'}", a == b, f"sample {i}")
    elif args.reduction == "complement":
        h = read_graph(args.pattern)[0] if args.pattern else path_graph(3)
        for i in range(args.samples):
            host = gnp_graph(n, args.p, rng)
            cg, ch = complement_instance(host, h)
            a = oracle_subgraph(host, h, True, override_scale=True) is not None
            b = oracle_subgraph(cg, ch, True, override_scale=True) is not None
            check("equivalence", a == b, f"sample {i}")
    return [{"name": k, "passed": not v, "detail": "; ".join(v[:3])} for k, v in clauses.items()], args.samples


def _verify_algorithm(args, g: Globals) -> tuple[list[dict], int]:
    rng = random.Random(g.seed)
    n = args.n or 7
    bad: list[str] = []
    for i in range(args.samples):
        topo = gnp_graph(n, args.p, rng)
        if args.algorithm == "induced-p2":
            res = run(topo, detect.induced_p2_program(), seed=g.seed,
                      model=detect.induced_p2_program().model_for("broadcast", n))
            got = detect.verdict(res.outputs)
            want = oracle_subgraph(topo, path_graph(3), True) is not None
        else:
            h = gnp_graph(args.k or 4, 0.5, rng)
            want = oracle_mcis(topo, h, override_scale=True).size
            got = mcis_centralized(topo, h).size
        if got != want:
            bad.append(f"sample {i}: got {got}, oracle {want}")
    return [{"name": f"{args.algorithm}-vs-oracle", "passed": not bad, "detail": "; ".join(bad[:3])}], args.samples


def cmd_verify(args, g: Globals) -> int:
    chosen = [x for x in (args.family, args.instance, args.reduction, args.algorithm) if x]
    if len(chosen) != 1:
        raise UsageError("choose exactly one of --family, --instance, --reduction, --algorithm")
    if args.family:
        clauses, count = _verify_family(args, g)
        target = f"family:{args.family}"
    elif args.instance:
        clauses, count = _verify_instance(args, g)
        target = f"instance:{args.instance}"
    elif args.reduction:
        clauses, count = _verify_reduction(args, g)
        target = f"reduction:{args.reduction}"
    else:
        clauses, count = _verify_algorithm(args, g)
        target = f"algorithm:{args.algorithm}"
    passed = all(c["passed"] for c in clauses)
    _emit(g, {"command": "verify", "target": target, "checked": count, "passed": passed, "clauses": clauses})
    return EXIT_OK if passed else EXIT_VERIFY


# ---------------------------------------------------------------- bench


def cmd_bench(args, g: Globals) -> int:
    sizes = [int(x) for x in args.sizes.split(",") if x]
    rows = []
    if args.target == "families":
        for fam, (shape, _) in sorted(FAMILIES.items()):
            for n in sizes:
                disj = random_input(n, shape, random.Random(g.seed), args.p)
                inst = generate(fam, n, None, disj)
                rows.append({"family": fam, "N": n, "n": inst.graph.node_count, "m": inst.graph.m,
                             "cut": len(inst.cut), "expected": inst.expected})
    else:
        rng = random.Random(g.seed)
        # random tree detection repeats 2^(5dk) k^k times, so it is benched on edges with d = 1
        d = args.d or (1 if args.target == "tree-detect" else 2)
        for n in sizes:
            for sample in range(args.samples):
                topo = random_degenerate_graph(n, d, rng)
                seed = g.seed + sample
                if args.target == "induced-p2":
                    prog = detect.induced_p2_program()
                    kind = "broadcast"
                elif args.target == "orientation":
                    prog, kind = detect.orientation_program(d, args.epsilon or 1.0), "congest"
                else:
                    prog, kind = detect.induced_tree_random(path_graph(2), d, 0.9), "congest"
                model = _model(g, prog, n, kind, (kind,))
                res = run(topo, prog, model, seed, g.max_rounds)
                verdict = None if args.target == "orientation" else detect.verdict(res.outputs)
                rows.append({"algorithm": args.target, "n": n, "m": topo.m, "sample": sample,
                             "rounds": res.metrics.rounds, "max_message_bits": res.metrics.max_message_bits,
                             "total_bits": res.metrics.total_bits, "verdict": verdict})
    _emit(g, {"command": "bench", "target": args.target, "rows": rows})
    return EXIT_OK


# ---------------------------------------------------------------- reduce


def cmd_reduce(args, g: Globals) -> int:
    host = _read(args.graph, "graph")
    extra: list[str] = []
    if args.kind == "clique-to-pattern":
        h = _read(args.pattern, "pattern")
        if args.s is None:
            raise UsageError("--s is required")
        red = reduce_clique_to_pattern(host, h, args.s)
        out = red.graph
        record = {"c1": list(red.c1), "cover": [list(s) for s in red.cover.sets]}
    elif args.kind == "complement":
        h = _read(args.pattern, "pattern")
        out, ch = complement_instance(host, h)
        record = {"pattern_edges": [list(e) for e in ch.graph.sorted_edges()]}
    elif args.kind == "blowup":
        if args.k is None:
            raise UsageError("--k is required")
        out, chi = multicolored_blowup(host, args.k, args.target)
        extra.append("coloring " + " ".join(map(str, chi.color_of)))
        record = {"k": args.k}
    else:
        if args.coloring is None:
            raise UsageError("--coloring is required")
        chi = Coloring(tuple(int(c) for c in args.coloring.split(",")))
        out = strip_same_color_edges(host, chi)
        record = {}
    full = {"command": "reduce", "kind": args.kind, "source_n": host.node_count,
            "n": out.node_count, "m": out.m, **record}
    _write_graph_or_stdout(g, out, extra, full)
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    def global_flags(parser, defaults: bool):
        def d(value):
            return value if defaults else argparse.SUPPRESS
        parser.add_argument("--model", choices=[k.value for k in ModelKind], default=d(None))
        parser.add_argument("--bandwidth", type=int, default=d(None),
                            help="bits per message (default: the algorithm's b(n))")
        parser.add_argument("--seed", type=int, default=d(0))
        parser.add_argument("--max-rounds", type=int, default=d(1_000_000))
        parser.add_argument("--format", choices=["json", "csv", "table"], default=d("table"))
        parser.add_argument("--out", default=d(None))

    p = argparse.ArgumentParser(prog="congestlab", description=__doc__.splitlines()[0])
    global_flags(p, True)
    # the same flags are accepted after the command name
    common = argparse.ArgumentParser(add_help=False)
    global_flags(common, False)
    sub = p.add_subparsers(dest="command", required=True)
    _add = sub.add_parser

    def add_parser(name, **kw):
        return _add(name, parents=[common], **kw)

    sub.add_parser = add_parser  # type: ignore[method-assign]

    def disj_flags(sp):
        sp.add_argument("--x0", help="hex bit vector, bit i is input position i")
        sp.add_argument("--x1")
        sp.add_argument("--random", action="store_true", help="draw inputs from --seed")
        sp.add_argument("--p", type=float, default=0.3)

    gen = sub.add_parser("gen", help="build a lower-bound instance or pattern")
    gen.add_argument("family", choices=sorted(FAMILIES) + ["hk"])
    gen.add_argument("--N", type=int)
    gen.add_argument("--k", type=int)
    gen.add_argument("--long", action="store_true", help="hk: paths of length 5")
    gen.add_argument("--path-between", choices=["A1B1", "A2B2"])
    disj_flags(gen)

    r = sub.add_parser("run", help="simulate a distributed algorithm")
    r.add_argument("algorithm", choices=["induced-p2", "orientation", "tree-detect", "tree-derandomized",
                                         "mcis", "induced-mcis", "vc", "clique-cc"])
    r.add_argument("--graph")
    r.add_argument("--h", help="pattern graph file")
    r.add_argument("--tree", help="tree pattern file")
    r.add_argument("--tau", type=int)
    r.add_argument("--d", type=int)
    r.add_argument("--s", type=int)
    r.add_argument("--alpha", type=int)
    r.add_argument("--epsilon", type=float)
    r.add_argument("--confidence", type=float, default=0.99)

    v = sub.add_parser("verify", help="check a construction or algorithm against the oracles")
    v.add_argument("--family", choices=sorted(FAMILIES))
    v.add_argument("--instance")
    v.add_argument("--reduction", choices=["clique-to-pattern", "complement", "blowup", "strip"])
    v.add_argument("--algorithm", choices=["induced-p2", "mcis"])
    v.add_argument("--N", type=int)
    v.add_argument("--k", type=int)
    v.add_argument("--n", type=int, help="host size for sampled sweeps")
    v.add_argument("--s", type=int)
    v.add_argument("--pattern")
    v.add_argument("--exhaustive", action="store_true")
    v.add_argument("--samples", type=int, default=200)
    v.add_argument("--p", type=float, default=0.4)

    b = sub.add_parser("bench", help="emit a table of measurements")
    b.add_argument("target", choices=["induced-p2", "orientation", "tree-detect", "families"])
    b.add_argument("--sizes", default="8,16,32")
    b.add_argument("--samples", type=int, default=3)
    b.add_argument("--d", type=int)
    b.add_argument("--epsilon", type=float)
    b.add_argument("--p", type=float, default=0.3)

    red = sub.add_parser("reduce", help="apply a graph reduction")
    red.add_argument("kind", choices=["clique-to-pattern", "complement", "blowup", "strip"])
    red.add_argument("--graph")
    red.add_argument("--pattern")
    red.add_argument("--s", type=int)
    red.add_argument("--k", type=int)
    red.add_argument("--target", choices=["clique", "independent-set"], default="clique")
    red.add_argument("--coloring", help="comma-separated color per node")
    return p


COMMANDS: dict[str, Callable] = {
    "gen": cmd_gen, "run": cmd_run, "verify": cmd_verify, "bench": cmd_bench, "reduce": cmd_reduce,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    g = Globals(args.model, args.bandwidth, args.seed, args.max_rounds, args.format, args.out)
    try:
        return COMMANDS[args.command](args, g)
    except (BandwidthViolation, BroadcastViolation) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BANDWIDTH
    except NonTermination as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONTERM
    except SimulationError as exc:
        # budget problems are parameter errors; anything else is a failed run
        code = EXIT_USAGE if isinstance(exc, (InfeasibleBudget, DisconnectedTopology)) else EXIT_VERIFY
        print(f"error: {exc}", file=sys.stderr)
        return code
    except (UsageError, GraphError, ScaleError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()

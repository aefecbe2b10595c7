"""Command-line surface: run batches, generate queries, benchmark engines."""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .engine import BatchResult, EngineStats, basic_enumerate, batch_enumerate
from .graph import DirectedGraph, GraphParseError, load_edge_list
from .index import Query
from .oracle import GenerationError, GenSpec, brute_force_paths, generate_queries
from .sharing import InvariantError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_INTERNAL = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


class CliError(Exception):
    def __init__(self, message, code=EXIT_IO):
        super().__init__(message)
        self.code = code


def _load_graph(path: str) -> DirectedGraph:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return load_edge_list(fh)
    except OSError as exc:
        raise CliError(f"cannot read graph {path}: {exc}") from exc
    except GraphParseError as exc:
        raise CliError(f"graph {path}: {exc}") from exc


def _load_queries(path: str, g: DirectedGraph) -> list[Query]:
    """Query file: one `id s t k` line per query, endpoints in original labels."""
    queries = []
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.strip()
                if not line or line[0] in "#%":
                    continue
                parts = line.split()
                if len(parts) != 4:
                    raise CliError(f"queries {path} line {lineno}: expected `id s t k`")
                try:
                    qid, s_lab, t_lab, k = (int(x) for x in parts)
                    queries.append(Query(qid, g.id_of_label(s_lab), g.id_of_label(t_lab), k))
                except (ValueError, KeyError) as exc:
                    raise CliError(f"queries {path} line {lineno}: {exc}") from exc
    except OSError as exc:
        raise CliError(f"cannot read queries {path}: {exc}") from exc
    return queries


def _format_results(queries, result: BatchResult, g: DirectedGraph, output: str) -> str:
    lines = []
    for q, res in zip(queries, result.results):
        if result.count_only:
            count, paths = res, None
        else:
            paths = sorted(tuple(g.labels[v] for v in p) for p in res)
            count = len(paths)
        if output == "counts":
            lines.append(f"{q.id} {count}")
        else:
            lines.append(f"q {q.id} {count}")
            for p in paths:
                lines.append(" ".join(str(v) for v in p))
    return "\n".join(lines) + ("\n" if lines else "")


def _write_out(text: str, out_path: str | None):
    if out_path is None:
        sys.stdout.write(text)
    else:
        Path(out_path).write_text(text, encoding="utf-8")


def _run_mode(mode: str, g, queries, args) -> BatchResult:
    if mode == "batch":
        dots = []
        sink = (lambda graph: dots.append(graph.to_dot())) if args.dump_sharing_graph else None
        result = batch_enumerate(g, queries, args.gamma, threads=args.threads,
                                 count_only=(args.output == "counts"), dot_sink=sink)
        if args.dump_sharing_graph:
            Path(args.dump_sharing_graph).write_text("\n".join(dots) + "\n", encoding="utf-8")
        return result
    if mode == "basic":
        return basic_enumerate(g, queries, count_only=(args.output == "counts"))
    # oracle: per-query brute force, no index; failures skip the query only
    stats = EngineStats()
    t0 = time.perf_counter()
    results = []
    for q in queries:
        try:
            paths = brute_force_paths(g, q.s, q.t, q.k)
        except Exception as exc:  # noqa: BLE001 - per-query failures must not abort
            print(f"warning: query {q.id} failed: {exc}", file=sys.stderr)
            paths = []
        results.append(len(paths) if args.output == "counts" else paths)
    stats.enumerate_s = stats.total_s = time.perf_counter() - t0
    return BatchResult(results, stats, count_only=(args.output == "counts"))


def cmd_run(args) -> int:
    g = _load_graph(args.graph)
    queries = _load_queries(args.queries, g)
    if g.vertex_count > 100_000 and args.mode == "oracle":
        print("warning: oracle mode on a large graph may be very slow", file=sys.stderr)
    result = _run_mode(args.mode, g, queries, args)
    _write_out(_format_results(queries, result, g, args.output), args.out)
    return EXIT_OK


_BENCH_COLUMNS = ("mode", "group_count", "build_index_ms", "cluster_ms", "detect_ms",
                  "enumerate_ms", "total_ms", "dfs_expansions", "cache_peak_paths")


def cmd_bench(args) -> int:
    g = _load_graph(args.graph)
    queries = _load_queries(args.queries, g)
    rows = []
    for mode in ("basic", "batch"):
        acc = None
        for _ in range(args.bench_reps):
            if mode == "basic":
                res = basic_enumerate(g, queries, count_only=True)
            else:
                res = batch_enumerate(g, queries, args.gamma, threads=args.threads,
                                      count_only=True)
            st = res.stats
            row = [st.group_count, st.build_index_s, st.cluster_s, st.detect_s,
                   st.enumerate_s, st.total_s, st.expansions, st.cache_peak_paths]
            acc = row if acc is None else [a + b for a, b in zip(acc, row)]
        r = args.bench_reps
        rows.append([mode, acc[0] // r] + [v / r * 1000 for v in acc[1:6]]
                    + [acc[6] // r, acc[7] // r])
    lines = [",".join(_BENCH_COLUMNS)]
    for row in rows:
        lines.append(",".join(f"{v:.3f}" if isinstance(v, float) else str(v) for v in row))
    _write_out("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_gen(args) -> int:
    g = _load_graph(args.graph)
    spec = GenSpec(count=args.count, k_min=args.k_min, k_max=args.k_max,
                   seed=args.seed, dup_fraction=args.dup_fraction)
    try:
        queries = generate_queries(g, spec) if args.count else []
    except GenerationError as exc:
        raise CliError(str(exc)) from exc
    lines = [f"{q.id} {g.labels[q.s]} {g.labels[q.t]} {q.k}" for q in queries]
    _write_out("\n".join(lines) + ("\n" if lines else ""), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hopbatch",
                     description="Batch hop-constrained s-t simple path enumeration")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="answer a query file")
    run.add_argument("--graph", required=True)
    run.add_argument("--queries", required=True)
    run.add_argument("--gamma", type=float, default=0.5)
    run.add_argument("--mode", choices=("batch", "basic", "oracle"), default="batch")
    run.add_argument("--output", choices=("paths", "counts"), default="paths")
    run.add_argument("--out", default=None)
    run.add_argument("--threads", type=int, default=1)
    run.add_argument("--dump-sharing-graph", default=None, metavar="DOT_PATH")
    run.set_defaults(func=cmd_run)

    bench = sub.add_parser("bench", help="compare basic and batch engines (CSV)")
    bench.add_argument("--graph", required=True)
    bench.add_argument("--queries", required=True)
    bench.add_argument("--gamma", type=float, default=0.5)
    bench.add_argument("--threads", type=int, default=1)
    bench.add_argument("--bench-reps", type=int, default=1)
    bench.add_argument("--out", default=None)
    bench.set_defaults(func=cmd_bench)

    gen = sub.add_parser("gen", help="generate a reachability-valid query file")
    gen.add_argument("--graph", required=True)
    gen.add_argument("--count", type=int, required=True)
    gen.add_argument("--k-min", type=int, default=4)
    gen.add_argument("--k-max", type=int, default=7)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--dup-fraction", type=float, default=0.0)
    gen.add_argument("--out", default=None)
    gen.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (ValueError, GenerationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except InvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())

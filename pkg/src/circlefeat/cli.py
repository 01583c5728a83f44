"""Command-line interface: ``circlefeat {gen,features,attend,eval}``.

Exit status is 0 on success, 2 on usage or configuration errors and 1 on
runtime failures (unreadable input, parse errors, enumeration caps).
"""

from __future__ import annotations

import argparse
import functools
import logging
import sys
from contextlib import contextmanager

from . import __version__
from ._parallel import ordered_map
from .attention import (
    AttentionParams,
    PairFeatures,
    attention_forward,
    degree_onehot,
    pair_bias,
    prepare_example,
    score_example,
)
from .circles import CircleConfig
from .errors import CircleFeatError, ConfigError
from .experiment import MODES, ExperimentConfig, format_report, run_toy_experiment
from .graph import SYNTHETIC_KINDS, generate_synthetic, load_edge_list, read_pairs, write_edge_list

FEATURE_HEADER = "src,dst,dist,nsp,aa,jac,swing_plus,bridge"


def format_feature_row(pair, row: PairFeatures) -> str:
    return (
        f"{pair[0]},{pair[1]},{int(row.dist_bias)},{int(row.num_bias)},"
        f"{row.aa:.6f},{row.jac:.6f},{row.swing:.6f},{row.bridge:.6f}"
    )


def write_features(pairs, rows, path) -> None:
    """Write the feature table; ``path`` of ``"-"`` means standard output."""
    if len(pairs) != len(rows):
        raise ValueError(f"{len(pairs)} pairs but {len(rows)} feature rows")
    lines = [FEATURE_HEADER] + [format_feature_row(p, r) for p, r in zip(pairs, rows)]
    with _open_out(path) as fh:
        fh.write("\n".join(lines) + "\n")


@contextmanager
def _open_out(path):
    if path in (None, "-"):
        yield sys.stdout
        sys.stdout.flush()
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _add_circle_flags(p):
    p.add_argument("--alpha", type=float, default=1.0, help="swing-plus smoothing constant")
    p.add_argument(
        "--no-self-pairs", dest="include_self_pairs", action="store_false",
        help="drop u == v terms from the swing-plus double sum",
    )
    p.add_argument("--max-circle-len", type=int, default=6, help="longest circle (edges) considered")
    p.add_argument("--max-bridges", type=int, default=100_000, help="bridge enumeration cap per pair")
    p.add_argument("--d-max", type=int, default=10, help="distance clip; unreachable maps to d_max + 1")


def _add_graph_flags(p):
    p.add_argument("--graph", required=True, help="edge-list file")
    p.add_argument("--num-nodes", type=int, default=None, help="node count; inferred as 1 + max id when omitted")


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = _Parser(prog="circlefeat", description="Circle features and biased attention for link prediction.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="write a synthetic graph as an edge list", formatter_class=fmt)
    g.add_argument("--kind", choices=SYNTHETIC_KINDS, required=True, help="graph family")
    g.add_argument("--n", type=int, default=None, help="node count (path, cycle, complete, er, sbm2)")
    g.add_argument("--k", type=int, default=None, help="number of paths (theta)")
    g.add_argument("--len", type=int, default=None, help="path length (theta)")
    g.add_argument("--p", type=float, default=None, help="edge probability (er)")
    g.add_argument("--p-in", type=float, default=None, help="within-block probability (sbm2)")
    g.add_argument("--p-out", type=float, default=None, help="between-block probability (sbm2)")
    g.add_argument("--seed", type=int, default=0, help="random seed (er, sbm2)")
    g.add_argument("--out", default="-", help="output file, '-' for stdout")

    f = sub.add_parser("features", help="compute the six pair features", formatter_class=fmt)
    _add_graph_flags(f)
    f.add_argument("--pairs", default=None, help="pair file (edge-list format); every edge when omitted")
    _add_circle_flags(f)
    f.add_argument("--out", default="-", help="output CSV, '-' for stdout")

    a = sub.add_parser("attend", help="score pairs with an untrained biased attention layer", formatter_class=fmt)
    _add_graph_flags(a)
    a.add_argument("--pairs", required=True, help="pair file (edge-list format)")
    _add_circle_flags(a)
    a.add_argument("--hops", type=int, default=1, help="enclosing subgraph radius")
    a.add_argument("--dim", type=int, default=8, help="attention dimension")
    a.add_argument("--seed", type=int, default=0, help="parameter initialization seed")
    a.add_argument("--show-weights", action="store_true", help="also print each subgraph's attention weights")
    a.add_argument("--out", default="-", help="output file, '-' for stdout")

    e = sub.add_parser("eval", help="run the toy link-prediction experiment", formatter_class=fmt)
    e.add_argument("--kind", choices=SYNTHETIC_KINDS, default="sbm2", help="synthetic graph family")
    e.add_argument("--n", type=int, default=200, help="node count")
    e.add_argument("--p", type=float, default=0.1, help="edge probability (er)")
    e.add_argument("--p-in", type=float, default=0.15, help="within-block probability (sbm2)")
    e.add_argument("--p-out", type=float, default=0.01, help="between-block probability (sbm2)")
    e.add_argument("--mode", choices=MODES, default="features-logistic", help="link scorer")
    e.add_argument("--k-negatives", type=int, default=100, help="negatives ranked against each positive")
    e.add_argument("--holdout", type=float, default=0.1, help="fraction of edges held out as positives")
    e.add_argument("--train-pairs", type=int, default=200, help="positive (and negative) training pairs")
    e.add_argument("--seed", type=int, default=0, help="experiment seed (graph, split, sampling, init)")
    e.add_argument("--alpha", type=float, default=1.0, help="swing-plus smoothing constant")
    e.add_argument(
        "--no-self-pairs", dest="include_self_pairs", action="store_false",
        help="drop u == v terms from the swing-plus double sum",
    )
    e.add_argument("--max-circle-len", type=int, default=6, help="longest circle (edges) considered")
    e.add_argument("--d-max", type=int, default=10, help="distance clip; unreachable maps to d_max + 1")
    e.add_argument("--hops", type=int, default=1, help="enclosing subgraph radius")
    e.add_argument("--max-nodes-per-hop", type=int, default=None, help="subsample enclosing subgraphs")
    e.add_argument(
        "--feature-scope", choices=("subgraph", "full"), default="subgraph",
        help="compute pair features inside the enclosing subgraph or on the whole graph",
    )
    e.add_argument("--max-sources", type=int, default=None, help="evaluate only the first N positives")
    e.add_argument("--dim", type=int, default=8, help="attention dimension")
    e.add_argument(
        "--attention-mode", choices=("raw", "weighted"), default="raw",
        help="fixed unit bias coefficients or trained ones",
    )
    e.add_argument("--epochs", type=int, default=200, help="gradient descent steps (attention)")
    e.add_argument("--lr", type=float, default=0.05, help="gradient descent step size (attention)")
    e.add_argument("--out", default="-", help="report file, '-' for stdout")
    return parser


def _circle_config(args) -> CircleConfig:
    return CircleConfig(
        alpha=args.alpha,
        include_self_pairs=args.include_self_pairs,
        max_circle_len=args.max_circle_len,
        max_bridges=args.max_bridges,
    )


def _cmd_gen(args):
    params = {
        "path": {"n": args.n},
        "cycle": {"n": args.n},
        "complete": {"n": args.n},
        "theta": {"k": args.k, "len": args.len},
        "er": {"n": args.n, "p": args.p},
        "sbm2": {"n": args.n, "p_in": args.p_in, "p_out": args.p_out},
    }[args.kind]
    g = generate_synthetic(args.kind, seed=args.seed, **params)
    if args.out == "-":
        sys.stdout.writelines(f"{u} {v}\n" for u, v in g.edges())
    else:
        write_edge_list(g, args.out)


def _feature_task(pair, graph, cfg, d_max):
    return pair_bias(graph, pair, cfg, d_max)


def _cmd_features(args):
    cfg = _circle_config(args)
    if args.d_max < 1:
        raise ConfigError(f"--d-max must be >= 1, got {args.d_max}")
    g = load_edge_list(args.graph, args.num_nodes)
    pairs = read_pairs(args.pairs) if args.pairs else [tuple(e) for e in g.edges()]
    for p in pairs:
        g.check_pair(p)
    rows = ordered_map(functools.partial(_feature_task, graph=g, cfg=cfg, d_max=args.d_max), pairs)
    write_features(pairs, rows, args.out)


def _cmd_attend(args):
    cfg = _circle_config(args)
    if args.hops < 1 or args.dim < 1 or args.d_max < 1:
        raise ConfigError("--hops, --dim and --d-max must be >= 1")
    g = load_edge_list(args.graph, args.num_nodes)
    pairs = read_pairs(args.pairs)
    in_dim = g.node_features.shape[1] if g.node_features is not None else degree_onehot(g).shape[1]
    params = AttentionParams.init(in_dim, args.dim, seed=args.seed)
    lines = ["src,dst,score"]
    blocks = []
    for p in pairs:
        ex = prepare_example(g, p, cfg, args.hops, args.d_max)
        _, weights = attention_forward(ex.x, params, ex.bias)
        score = score_example(ex, params)
        lines.append(f"{p[0]},{p[1]},{score:.6f}")
        if args.show_weights:
            blocks.append(f"[weights {p[0]} {p[1]}]")
            for row in weights:
                blocks.append(",".join(f"{w:.6f}" for w in row))
    with _open_out(args.out) as fh:
        fh.write("\n".join(lines + ([""] + blocks if blocks else [])) + "\n")


def _cmd_eval(args):
    graph_params = {
        "sbm2": {"n": args.n, "p_in": args.p_in, "p_out": args.p_out},
        "er": {"n": args.n, "p": args.p},
    }.get(args.kind)
    if graph_params is None:
        graph_params = {"n": args.n}
    cfg = ExperimentConfig(
        graph_kind=args.kind,
        graph_params=graph_params,
        mode=args.mode,
        seed=args.seed,
        holdout_fraction=args.holdout,
        k_negatives=args.k_negatives,
        train_pairs=args.train_pairs,
        alpha=args.alpha,
        include_self_pairs=args.include_self_pairs,
        max_circle_len=args.max_circle_len,
        d_max=args.d_max,
        hops=args.hops,
        max_nodes_per_hop=args.max_nodes_per_hop,
        feature_scope=args.feature_scope,
        max_sources=args.max_sources,
        dim=args.dim,
        attention_mode=args.attention_mode,
        epochs=args.epochs,
        lr=args.lr,
    )
    report = run_toy_experiment(cfg)
    with _open_out(args.out) as fh:
        fh.write(format_report(report))


_COMMANDS = {"gen": _cmd_gen, "features": _cmd_features, "attend": _cmd_attend, "eval": _cmd_eval}


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (CircleFeatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()

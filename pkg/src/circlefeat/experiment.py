"""Desk-scale link-prediction experiment with MRR evaluation.

One edge per source is held out as the positive; every positive is ranked
against ``k_negatives`` non-neighbors of its source.  All randomness is drawn
from named sub-streams of the experiment seed (see :func:`rng_for`).
"""

from __future__ import annotations

import dataclasses
import functools
import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from sklearn.linear_model import LogisticRegression
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import StandardScaler

from . import attention as attn
from ._parallel import ordered_map
from .circles import CircleConfig
from .errors import ConfigError, ParseError
from .graph import Graph, generate_synthetic
from .linkpred import extract_enclosing_subgraph, mrr, rank_of_positive, rng_for, sample_negatives

log = logging.getLogger(__name__)

__all__ = [
    "MODES",
    "ExperimentConfig",
    "RankRecord",
    "EvalReport",
    "split_holdout",
    "subgraph_pair_features",
    "run_toy_experiment",
    "format_report",
    "parse_report",
]

MODES = ("features-logistic", "attention", "constant")


@dataclass(frozen=True)
class ExperimentConfig:
    graph_kind: str = "sbm2"
    graph_params: dict = field(default_factory=lambda: {"n": 200, "p_in": 0.15, "p_out": 0.01})
    mode: str = "features-logistic"
    seed: int = 0
    holdout_fraction: float = 0.1
    k_negatives: int = 100
    train_pairs: int = 200
    alpha: float = 1.0
    include_self_pairs: bool = True
    max_circle_len: int = 6
    d_max: int = 10
    hops: int = 1
    max_nodes_per_hop: int | None = None
    feature_scope: str = "subgraph"
    max_sources: int | None = None
    # attention mode only
    dim: int = 8
    attention_mode: str = "raw"
    epochs: int = 200
    lr: float = 0.05

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not (0.0 < self.holdout_fraction < 1.0):
            raise ConfigError(f"holdout_fraction must lie in (0, 1), got {self.holdout_fraction}")
        if self.k_negatives < 1:
            raise ConfigError(f"k_negatives must be >= 1, got {self.k_negatives}")
        if self.train_pairs < 1:
            raise ConfigError(f"train_pairs must be >= 1, got {self.train_pairs}")
        if self.d_max < 1:
            raise ConfigError(f"d_max must be >= 1, got {self.d_max}")
        if self.hops < 1:
            raise ConfigError(f"hops must be >= 1, got {self.hops}")
        if self.feature_scope not in ("subgraph", "full"):
            raise ConfigError(f"feature_scope must be 'subgraph' or 'full', got {self.feature_scope!r}")
        if self.max_sources is not None and self.max_sources < 1:
            raise ConfigError(f"max_sources must be >= 1, got {self.max_sources}")
        if self.epochs < 0 or self.lr <= 0 or self.dim < 1:
            raise ConfigError("epochs must be >= 0, lr > 0 and dim >= 1")
        self.circle_config()  # validates alpha / max_circle_len

    def circle_config(self) -> CircleConfig:
        return CircleConfig(
            alpha=self.alpha,
            include_self_pairs=self.include_self_pairs,
            max_circle_len=self.max_circle_len,
        )

    def echo(self) -> dict:
        out = {}
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if isinstance(value, dict):
                for key in sorted(value):
                    out[f"{f.name}.{key}"] = value[key]
            else:
                out[f.name] = value
        return out


class RankRecord(NamedTuple):
    source: int
    target: int
    rank: int


@dataclass(frozen=True)
class EvalReport:
    per_source_ranks: list[RankRecord]
    mrr: float
    config_echo: dict
    seed: int
    extras: dict = field(default_factory=dict)


def split_holdout(g: Graph, fraction: float, seed: int) -> list[tuple[int, int]]:
    """Pick ``round(fraction * M)`` edges as ``(source, target)`` positives.

    Edges are visited in a seeded random order with a random orientation; an
    edge is skipped when its source already owns a positive.
    """
    edges = g.edges()
    want = int(round(fraction * len(edges)))
    if want < 1:
        raise ConfigError(f"holdout of {fraction} over {len(edges)} edges leaves no positives")
    rng = rng_for(seed, "split")
    order = rng.permutation(len(edges))
    flips = rng.random(len(edges)) < 0.5
    used = set()
    out = []
    for idx in order:
        u, v = edges[idx]
        if flips[idx]:
            u, v = v, u
        if u in used:
            u, v = v, u
            if u in used:
                continue
        used.add(u)
        out.append((u, v))
        if len(out) == want:
            break
    return out


def subgraph_pair_features(g: Graph, p, cfg: ExperimentConfig) -> np.ndarray:
    """Six pair features computed inside the pair's enclosing subgraph
    (or on ``g`` minus the pair's edge when ``feature_scope == "full"``)."""
    circle = cfg.circle_config()
    if cfg.feature_scope == "full":
        host = g.without_edges([p]) if g.has_edge(*p) else g
        return np.array(attn.pair_bias(host, p, circle, cfg.d_max))
    sub, _, centers = extract_enclosing_subgraph(
        g, p, cfg.hops, max_nodes_per_hop=cfg.max_nodes_per_hop, seed=cfg.seed
    )
    return np.array(attn.pair_bias(sub, centers, circle, cfg.d_max))


def _features_task(item, graph, cfg):
    return subgraph_pair_features(graph, item, cfg)


def _example_task(item, graph, cfg):
    pair, label = item
    return attn.prepare_example(
        graph,
        pair,
        cfg.circle_config(),
        cfg.hops,
        cfg.d_max,
        label=label,
        scope=cfg.feature_scope,
        max_nodes_per_hop=cfg.max_nodes_per_hop,
        seed=cfg.seed,
    )


def _training_pairs(full: Graph, train_graph: Graph, cfg: ExperimentConfig):
    rng = rng_for(cfg.seed, "train")
    edges = train_graph.edges()
    m = min(cfg.train_pairs, len(edges))
    pos = [edges[i] for i in sorted(rng.choice(len(edges), size=m, replace=False))]
    neg = []
    seen = set()
    n = full.num_nodes
    while len(neg) < m:
        u, v = (int(x) for x in rng.integers(0, n, size=2))
        key = (min(u, v), max(u, v))
        if u == v or full.has_edge(u, v) or key in seen:
            continue
        seen.add(key)
        neg.append((u, v))
    return [(p, 1.0) for p in pos] + [(p, 0.0) for p in neg]


class _Scorer:
    def __init__(self, cfg: ExperimentConfig, train_graph: Graph, labelled, workers):
        self.cfg = cfg
        self.graph = train_graph
        self.workers = workers
        self.extras = {}
        pairs = [p for p, _ in labelled]
        labels = np.array([y for _, y in labelled])
        if cfg.mode == "features-logistic":
            task = functools.partial(_features_task, graph=train_graph, cfg=cfg)
            x = np.stack(ordered_map(task, pairs, workers))
            self.model = make_pipeline(StandardScaler(), LogisticRegression(max_iter=1000))
            self.model.fit(x, labels)
            self.extras["train_accuracy"] = float(self.model.score(x, labels))
        elif cfg.mode == "attention":
            task = functools.partial(_example_task, graph=train_graph, cfg=cfg)
            examples = ordered_map(task, labelled, workers)
            init = attn.AttentionParams.init(
                examples[0].x.shape[1], cfg.dim, seed=int(rng_for(cfg.seed, "init").integers(2**31)),
                mode=cfg.attention_mode,
            )
            self.params, history = attn.train(init, examples, epochs=cfg.epochs, lr=cfg.lr)
            if history:
                self.extras["train_loss_first"] = history[0]
                self.extras["train_loss_last"] = history[-1]

    def score(self, pairs):
        cfg = self.cfg
        if cfg.mode == "constant":
            return [0.5] * len(pairs)
        if cfg.mode == "features-logistic":
            task = functools.partial(_features_task, graph=self.graph, cfg=cfg)
            x = np.stack(ordered_map(task, pairs, self.workers))
            return self.model.predict_proba(x)[:, 1].tolist()
        task = functools.partial(_example_task, graph=self.graph, cfg=cfg)
        examples = ordered_map(task, [(p, 0.0) for p in pairs], self.workers)
        return [attn.score_example(ex, self.params) for ex in examples]


def run_toy_experiment(cfg: ExperimentConfig, workers: int | None = None) -> EvalReport:
    """Hold out positives, fit the configured model on the rest, report MRR."""
    g = generate_synthetic(cfg.graph_kind, seed=cfg.seed, **cfg.graph_params)
    holdout = split_holdout(g, cfg.holdout_fraction, cfg.seed)
    train_graph = g.without_edges(holdout)
    sources = holdout if cfg.max_sources is None else holdout[: cfg.max_sources]
    log.info("graph %s, %d positives, %d evaluated", g, len(holdout), len(sources))

    labelled = [] if cfg.mode == "constant" else _training_pairs(g, train_graph, cfg)
    scorer = _Scorer(cfg, train_graph, labelled, workers)

    records = []
    pos_scores, neg_scores = [], []
    for src, dst in sources:
        negs = sample_negatives(g, src, cfg.k_negatives, cfg.seed)
        scores = scorer.score([(src, dst)] + [(src, v) for v in negs])
        records.append(RankRecord(src, dst, rank_of_positive(scores[0], scores[1:])))
        pos_scores.append(scores[0])
        neg_scores.extend(scores[1:])
    scorer.extras["mean_positive_score"] = float(np.mean(pos_scores))
    scorer.extras["mean_negative_score"] = float(np.mean(neg_scores))
    return EvalReport(
        per_source_ranks=records,
        mrr=mrr([r.rank for r in records]),
        config_echo=cfg.echo(),
        seed=cfg.seed,
        extras=scorer.extras,
    )


def _fmt(value) -> str:
    if isinstance(value, bool) or value is None:
        return str(value)
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def format_report(report: EvalReport) -> str:
    """Key/value header block followed by a ``source,target,rank`` table."""
    lines = ["# circlefeat eval report"]
    lines.append(f"mrr = {report.mrr:.6f}")
    lines.append(f"seed = {report.seed}")
    lines.append(f"num_sources = {len(report.per_source_ranks)}")
    for key in sorted(report.extras):
        lines.append(f"extra.{key} = {_fmt(report.extras[key])}")
    for key, value in report.config_echo.items():
        lines.append(f"config.{key} = {_fmt(value)}")
    lines.append("")
    lines.append("[ranks]")
    lines.append("source,target,rank")
    for r in report.per_source_ranks:
        lines.append(f"{r.source},{r.target},{r.rank}")
    return "\n".join(lines) + "\n"


def parse_report(text: str) -> tuple[dict, list[RankRecord]]:
    """Inverse of :func:`format_report`: header values (as strings) and rank rows."""
    header = {}
    rows = []
    in_table = False
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line == "[ranks]":
            in_table = True
            continue
        if in_table:
            if line == "source,target,rank":
                continue
            try:
                s, t, r = (int(x) for x in line.split(","))
            except ValueError:
                raise ParseError(f"bad rank row {line!r}", lineno=lineno) from None
            rows.append(RankRecord(s, t, r))
        else:
            key, sep, value = line.partition(" = ")
            if not sep:
                raise ParseError(f"bad header line {line!r}", lineno=lineno)
            header[key] = value
    return header, rows

"""Single-head self-attention with additive structural bias, plus a link scorer.

Logits are ``Q_i . K_j / sqrt(d) + B_ij`` where ``B_ij`` is a weighted sum of
six pair features (shortest-path distance, shortest-path count, Adamic-Adar,
Jaccard, swing-plus, bridge).  In ``"raw"`` mode every weight is fixed at 1;
in ``"weighted"`` mode the weights are trained.

Every reduction over nodes is done on sorted operands so permuting the input
nodes permutes the output bit for bit.  Gradients are written out by hand
and checked against central differences in :func:`gradient_check`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Sequence

import numpy as np

from .circles import DEFAULT_CONFIG, CircleConfig, bridge_feature, swing_plus
from .errors import ConfigError, NumericError, ShapeError
from .graph import Graph
from .structural import (
    DEFAULT_PATH_COUNT_CAP,
    adamic_adar,
    bfs_path_counts,
    jaccard,
    shortest_paths,
)

__all__ = [
    "FEATURE_NAMES",
    "NUM_BIAS_TERMS",
    "DEGREE_BUCKETS",
    "PairFeatures",
    "BiasMatrix",
    "AttentionParams",
    "Example",
    "pair_bias",
    "build_bias_matrix",
    "degree_onehot",
    "attention_forward",
    "score_link",
    "prepare_example",
    "loss_and_grad",
    "gradient_check",
    "train",
]

FEATURE_NAMES = ("dist", "nsp", "aa", "jac", "swing_plus", "bridge")
NUM_BIAS_TERMS = len(FEATURE_NAMES)
DEGREE_BUCKETS = 16


class PairFeatures(NamedTuple):
    dist_bias: float
    num_bias: float
    aa: float
    jac: float
    swing: float
    bridge: float


def _dist_bias(distance, d_max):
    return float(d_max + 1) if distance is None else float(min(distance, d_max))


def _check_d_max(d_max):
    if d_max < 1:
        raise ConfigError(f"d_max must be >= 1, got {d_max}")


def pair_bias(
    g: Graph,
    p,
    cfg: CircleConfig = DEFAULT_CONFIG,
    d_max: int = 10,
    path_cap: int = DEFAULT_PATH_COUNT_CAP,
) -> PairFeatures:
    """The six bias terms for one pair.

    Unreachable pairs get ``dist_bias = d_max + 1`` and ``num_bias = 0``.
    """
    _check_d_max(d_max)
    p = g.check_pair(p)
    info = shortest_paths(g, p, cap=path_cap)
    return PairFeatures(
        _dist_bias(info.distance, d_max),
        float(info.num_shortest),
        adamic_adar(g, p),
        jaccard(g, p),
        swing_plus(g, p, cfg),
        bridge_feature(g, p, cfg),
    )


@dataclass(frozen=True)
class BiasMatrix:
    """Per-term bias stack of shape ``(6, n, n)``; diagonals are zero.

    ``matrix(coeffs)`` collapses it into the ``n x n`` additive bias.
    """

    terms: np.ndarray

    @property
    def size(self) -> int:
        return self.terms.shape[1]

    def matrix(self, coeffs=None) -> np.ndarray:
        if coeffs is None:
            coeffs = np.ones(NUM_BIAS_TERMS)
        coeffs = np.asarray(coeffs, dtype=np.float64)
        if coeffs.shape != (self.terms.shape[0],):
            raise ShapeError(f"expected {self.terms.shape[0]} coefficients, got shape {coeffs.shape}")
        out = np.zeros(self.terms.shape[1:])
        for c, t in zip(coeffs, self.terms):
            out += c * t
        return out

    def permuted(self, order) -> "BiasMatrix":
        order = np.asarray(order)
        return BiasMatrix(self.terms[:, order][:, :, order])


def build_bias_matrix(
    g: Graph,
    nodes: Sequence[int] | None = None,
    cfg: CircleConfig = DEFAULT_CONFIG,
    d_max: int = 10,
    path_cap: int = DEFAULT_PATH_COUNT_CAP,
) -> BiasMatrix:
    """Bias terms for every pair drawn from ``nodes`` (all nodes by default)."""
    _check_d_max(d_max)
    if nodes is None:
        nodes = range(g.num_nodes)
    nodes = [int(v) for v in nodes]
    for v in nodes:
        g.check_node(v)
    if len(set(nodes)) != len(nodes):
        raise ConfigError("nodes must be distinct")
    n = len(nodes)
    terms = np.zeros((NUM_BIAS_TERMS, n, n))
    for a in range(n):
        dist, count = bfs_path_counts(g, nodes[a], cap=path_cap)
        for b in range(a + 1, n):
            pair = (nodes[a], nodes[b])
            vals = (
                _dist_bias(dist[nodes[b]], d_max),
                float(count[nodes[b]]),
                adamic_adar(g, pair),
                jaccard(g, pair),
                swing_plus(g, pair, cfg),
                bridge_feature(g, pair, cfg),
            )
            terms[:, a, b] = vals
            terms[:, b, a] = vals
    return BiasMatrix(terms)


# -- parameters ---------------------------------------------------------------

_MODES = ("raw", "weighted")


@dataclass
class AttentionParams:
    w_query: np.ndarray
    w_key: np.ndarray
    w_value: np.ndarray
    readout_w: np.ndarray
    readout_b: float = 0.0
    bias_coeffs: np.ndarray = field(default_factory=lambda: np.ones(NUM_BIAS_TERMS))
    mode: str = "raw"

    def __post_init__(self):
        if self.mode not in _MODES:
            raise ConfigError(f"mode must be one of {_MODES}, got {self.mode!r}")
        for name in ("w_query", "w_key", "w_value", "readout_w", "bias_coeffs"):
            setattr(self, name, np.array(getattr(self, name), dtype=np.float64))
        self.readout_b = float(self.readout_b)
        dx, d = self.w_query.shape
        if d < 1:
            raise ShapeError("attention dim must be >= 1")
        if self.w_key.shape != (dx, d) or self.w_value.shape != (dx, d):
            raise ShapeError(
                f"query/key/value shapes disagree: {self.w_query.shape}, {self.w_key.shape}, {self.w_value.shape}"
            )
        if self.readout_w.shape != (2 * d,):
            raise ShapeError(f"readout_w must have shape ({2 * d},), got {self.readout_w.shape}")
        if self.bias_coeffs.shape != (NUM_BIAS_TERMS,):
            raise ShapeError(f"bias_coeffs must have shape ({NUM_BIAS_TERMS},)")

    @property
    def dim(self) -> int:
        return self.w_query.shape[1]

    @property
    def in_dim(self) -> int:
        return self.w_query.shape[0]

    @classmethod
    def zeros(cls, in_dim: int, dim: int = 8, mode: str = "raw") -> "AttentionParams":
        return cls(
            np.zeros((in_dim, dim)),
            np.zeros((in_dim, dim)),
            np.zeros((in_dim, dim)),
            np.zeros(2 * dim),
            0.0,
            np.ones(NUM_BIAS_TERMS),
            mode,
        )

    @classmethod
    def init(cls, in_dim: int, dim: int = 8, seed: int = 0, mode: str = "raw", scale: float | None = None):
        """Gaussian init with std ``1 / sqrt(in_dim)`` (readout ``1 / sqrt(2 dim)``)."""
        rng = np.random.default_rng(seed)
        s = scale if scale is not None else 1.0 / math.sqrt(in_dim)
        return cls(
            rng.normal(0.0, s, (in_dim, dim)),
            rng.normal(0.0, s, (in_dim, dim)),
            rng.normal(0.0, s, (in_dim, dim)),
            rng.normal(0.0, 1.0 / math.sqrt(2 * dim), 2 * dim),
            0.0,
            np.ones(NUM_BIAS_TERMS),
            mode,
        )

    def trainable(self) -> list[str]:
        names = ["w_query", "w_key", "w_value", "readout_w", "readout_b"]
        if self.mode == "weighted":
            names.append("bias_coeffs")
        return names

    def copy(self) -> "AttentionParams":
        return replace(
            self,
            w_query=self.w_query.copy(),
            w_key=self.w_key.copy(),
            w_value=self.w_value.copy(),
            readout_w=self.readout_w.copy(),
            bias_coeffs=self.bias_coeffs.copy(),
        )


# -- forward ------------------------------------------------------------------


def _project(x, w):
    # row i depends on x[i] alone and is reduced in a fixed order
    return (x[:, :, None] * w[None, :, :]).sum(axis=1)


def _bias_array(bias, params, n):
    if bias is None:
        return np.zeros((n, n))
    if isinstance(bias, BiasMatrix):
        if bias.size != n:
            raise ShapeError(f"bias covers {bias.size} nodes but x has {n} rows")
        return bias.matrix(params.bias_coeffs)
    arr = np.asarray(bias, dtype=np.float64)
    if arr.shape != (n, n):
        raise ShapeError(f"bias must have shape ({n}, {n}), got {arr.shape}")
    return arr


def _forward(x, params, bias):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != params.in_dim:
        raise ShapeError(f"x must have shape (n, {params.in_dim}), got {x.shape}")
    n = x.shape[0]
    b = _bias_array(bias, params, n)
    q = _project(x, params.w_query)
    k = _project(x, params.w_key)
    v = _project(x, params.w_value)
    logits = (q[:, None, :] * k[None, :, :]).sum(axis=2) / math.sqrt(params.dim) + b
    if not np.all(np.isfinite(logits)):
        raise NumericError("non-finite attention logits")
    e = np.exp(logits - logits.max(axis=1, keepdims=True))
    weights = e / np.sort(e, axis=1).sum(axis=1, keepdims=True)
    out = np.sort(weights[:, :, None] * v[None, :, :], axis=1).sum(axis=1)
    return out, weights, (x, q, k, v)


def attention_forward(x, params: AttentionParams, bias=None):
    """Biased self-attention.

    ``bias`` may be a :class:`BiasMatrix` (combined with
    ``params.bias_coeffs``), a plain ``n x n`` array added as is, or ``None``.
    Returns ``(output, weights)`` with shapes ``(n, dim)`` and ``(n, n)``.
    """
    out, weights, _ = _forward(x, params, bias)
    return out, weights


def _sigmoid(z):
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    ez = math.exp(z)
    return ez / (1.0 + ez)


def _readout(out, centers, params):
    h = np.concatenate([out[centers[0]], out[centers[1]]])
    return h, float(h @ params.readout_w) + params.readout_b


# -- link scoring -------------------------------------------------------------


class Example(NamedTuple):
    x: np.ndarray
    bias: BiasMatrix
    centers: tuple[int, int]
    label: float = 0.0


def degree_onehot(g: Graph, buckets: int = DEGREE_BUCKETS) -> np.ndarray:
    x = np.zeros((g.num_nodes, buckets))
    x[np.arange(g.num_nodes), np.minimum(g.degrees, buckets - 1)] = 1.0
    return x


def prepare_example(
    g: Graph,
    p,
    cfg: CircleConfig = DEFAULT_CONFIG,
    hops: int = 1,
    d_max: int = 10,
    label: float = 0.0,
    scope: str = "subgraph",
    max_nodes_per_hop: int | None = None,
    seed: int = 0,
) -> Example:
    """Enclosing subgraph, node inputs and bias stack for one candidate pair.

    With ``scope="subgraph"`` the bias terms are computed inside the
    enclosing subgraph; with ``scope="full"`` they are computed on the whole
    graph minus the candidate edge.
    """
    from .linkpred import extract_enclosing_subgraph

    p = g.check_pair(p)
    sub, mapping, centers = extract_enclosing_subgraph(
        g, p, hops, max_nodes_per_hop=max_nodes_per_hop, seed=seed
    )
    x = sub.node_features if sub.node_features is not None else degree_onehot(sub)
    if scope == "subgraph":
        bias = build_bias_matrix(sub, None, cfg, d_max)
    elif scope == "full":
        host = g.without_edges([p]) if g.has_edge(*p) else g
        bias = build_bias_matrix(host, mapping, cfg, d_max)
    else:
        raise ConfigError(f"scope must be 'subgraph' or 'full', got {scope!r}")
    return Example(np.array(x, dtype=np.float64), bias, centers, float(label))


def score_example(ex: Example, params: AttentionParams) -> float:
    out, _, _ = _forward(ex.x, params, ex.bias)
    _, z = _readout(out, ex.centers, params)
    return _sigmoid(z)


def score_link(
    g: Graph,
    p,
    params: AttentionParams,
    cfg: CircleConfig = DEFAULT_CONFIG,
    hops: int = 1,
    d_max: int = 10,
    scope: str = "subgraph",
    max_nodes_per_hop: int | None = None,
) -> float:
    """Probability that ``p`` is a link, from the attention outputs of its endpoints."""
    ex = prepare_example(g, p, cfg, hops, d_max, scope=scope, max_nodes_per_hop=max_nodes_per_hop)
    return score_example(ex, params)


# -- training -----------------------------------------------------------------


def _example_loss_grad(params: AttentionParams, ex: Example, want_grad=True):
    out, a, (x, q, k, v) = _forward(ex.x, params, ex.bias)
    h, z = _readout(out, ex.centers, params)
    y = ex.label
    loss = float(np.logaddexp(0.0, z) - y * z)
    if not math.isfinite(loss):
        raise NumericError("non-finite loss")
    if not want_grad:
        return loss, None
    d = params.dim
    dz = _sigmoid(z) - y
    grads = {"readout_w": dz * h, "readout_b": dz}
    d_out = np.zeros_like(out)
    ci, cj = ex.centers
    d_out[ci] += dz * params.readout_w[:d]
    d_out[cj] += dz * params.readout_w[d:]
    d_a = d_out @ v.T
    d_v = a.T @ d_out
    d_s = a * (d_a - (d_a * a).sum(axis=1, keepdims=True))
    scale = 1.0 / math.sqrt(d)
    d_q = d_s @ k * scale
    d_k = d_s.T @ q * scale
    grads["w_query"] = x.T @ d_q
    grads["w_key"] = x.T @ d_k
    grads["w_value"] = x.T @ d_v
    if isinstance(ex.bias, BiasMatrix):
        grads["bias_coeffs"] = np.einsum("ij,tij->t", d_s, ex.bias.terms)
    else:
        grads["bias_coeffs"] = np.zeros(NUM_BIAS_TERMS)
    return loss, grads


def loss_and_grad(params: AttentionParams, examples: Sequence[Example]):
    """Mean binary cross-entropy over ``examples`` and its gradient.

    The gradient dict has one entry per name in ``params.trainable()``.
    """
    if not examples:
        raise ConfigError("need at least one example")
    names = params.trainable()
    total = 0.0
    acc = {name: np.zeros_like(np.asarray(getattr(params, name), dtype=np.float64)) for name in names}
    for ex in examples:
        loss, g = _example_loss_grad(params, ex)
        total += loss
        for name in names:
            acc[name] = acc[name] + g[name]
    m = len(examples)
    return total / m, {name: acc[name] / m for name in names}


def _loss(params, examples):
    return sum(_example_loss_grad(params, ex, want_grad=False)[0] for ex in examples) / len(examples)


def _as_examples(x, bias, target, centers):
    if isinstance(x, np.ndarray) and x.ndim == 2:
        return [Example(x, bias, tuple(centers), float(target))]
    return [Example(xi, bi, tuple(centers), float(ti)) for xi, bi, ti in zip(x, bias, target)]


def gradient_check(
    params: AttentionParams,
    x,
    bias,
    target,
    epsilon: float = 1e-5,
    centers=(0, 1),
    grad_fn=None,
) -> float:
    """Largest relative gap between analytic and central-difference gradients.

    ``x``/``bias``/``target`` describe one example, or parallel sequences of
    them.  ``grad_fn(params, examples) -> (loss, grads)`` replaces the
    analytic gradient; tests use it to plant errors.
    """
    if not (1e-7 <= epsilon <= 1e-3):
        raise ConfigError(f"epsilon must lie in [1e-7, 1e-3], got {epsilon}")
    examples = _as_examples(x, bias, target, centers)
    _, grads = (grad_fn or loss_and_grad)(params, examples)
    worst = 0.0
    for name in params.trainable():
        base = getattr(params, name)
        if name == "readout_b":
            plus, minus = params.copy(), params.copy()
            plus.readout_b = base + epsilon
            minus.readout_b = base - epsilon
            num = (_loss(plus, examples) - _loss(minus, examples)) / (2 * epsilon)
            ana = float(grads[name])
            worst = max(worst, abs(ana - num) / max(1e-8, abs(ana) + abs(num)))
            continue
        for idx in np.ndindex(base.shape):
            plus, minus = params.copy(), params.copy()
            getattr(plus, name)[idx] += epsilon
            getattr(minus, name)[idx] -= epsilon
            num = (_loss(plus, examples) - _loss(minus, examples)) / (2 * epsilon)
            ana = float(grads[name][idx])
            worst = max(worst, abs(ana - num) / max(1e-8, abs(ana) + abs(num)))
    if not math.isfinite(worst):
        raise NumericError("non-finite gradient comparison")
    return worst


def train(
    params: AttentionParams,
    examples: Sequence[Example],
    epochs: int = 100,
    lr: float = 0.05,
) -> tuple[AttentionParams, list[float]]:
    """Full-batch gradient descent with a fixed step; returns new params and loss history."""
    params = params.copy()
    history = []
    for _ in range(epochs):
        loss, grads = loss_and_grad(params, examples)
        history.append(loss)
        for name, g in grads.items():
            if name == "readout_b":
                params.readout_b -= lr * float(g)
            else:
                setattr(params, name, getattr(params, name) - lr * g)
    return params, history

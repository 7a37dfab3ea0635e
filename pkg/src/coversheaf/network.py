"""Layered networks over cover sequences.

A network carries a cover sequence [C_0, ..., C_m, C_global] and one
layer per consecutive stage pair.  Per-element values at stage 0 are
the fiber vectors of the marked points (optionally perturbed by a
per-point deviation); a layer computes the values of its output cover
elements from the values of its input cover elements.

Two layer kinds exist:

* InclusionLayer: output beta is activation(sum of phi_alpha(v_alpha)
  over the aggregated inputs).  Such a layer factors through the
  zero-padded inclusions of its input elements, which is the property
  the witness generators exploit.
* GeneralLayer: output beta is an arbitrary map of its aggregated
  input values (coordinatewise max/mean reducers, attention, ...).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .topology import (Cover, CoverSequence, MarkedSpace, _read_source,
                       global_stage, make_cover, singleton_stage,
                       structure_from_json)
from .sections import (ACTIVATIONS, Activation, Coords, Node, Section, Sum,
                       affine_section, evaluate, identity_section,
                       section_from_json, section_to_json, shift_section,
                       slot_layout)


def _check_aggregation(input_cover: Cover, output_cover: Cover,
                       aggregation: tuple[tuple[int, ...], ...]) -> None:
    if len(aggregation) != len(output_cover.elements):
        raise ValueError("one aggregation list per output element required")
    for b, atuple in enumerate(aggregation):
        if not atuple:
            raise ValueError(f"output element {b} aggregates no inputs")
        if len(set(atuple)) != len(atuple):
            raise ValueError(f"output element {b} aggregates an input twice")
        target = output_cover.elements[b].members
        for a in atuple:
            if not 0 <= a < len(input_cover.elements):
                raise ValueError(f"aggregation references unknown input {a}")
            if not input_cover.elements[a].members <= target:
                raise ValueError(
                    f"input element {a} is not contained in output element {b}")


@dataclass(frozen=True)
class InclusionLayer:
    """out_beta = activation(sum over alpha in aggregation[beta] of
    phi[alpha](v_alpha))."""

    input_cover: Cover
    output_cover: Cover
    aggregation: tuple[tuple[int, ...], ...]
    phi: tuple[Section, ...]
    activation: str
    out_dim: int

    def __post_init__(self):
        object.__setattr__(self, "aggregation",
                           tuple(tuple(a) for a in self.aggregation))
        _check_aggregation(self.input_cover, self.output_cover, self.aggregation)
        if len(self.phi) != len(self.input_cover.elements):
            raise ValueError("one phi per input element required")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        for s in self.phi:
            if s.codomain_dim != self.out_dim:
                raise ValueError("phi codomain must equal the layer out_dim")

    def apply(self, values: Sequence[np.ndarray]) -> list[np.ndarray]:
        fn = ACTIVATIONS[self.activation].fn
        out = []
        for atuple in self.aggregation:
            acc = np.zeros(self.out_dim)
            for a in atuple:
                acc = acc + evaluate(self.phi[a], values[a])
            out.append(fn(acc))
        return out


@dataclass(frozen=True)
class Reducer:
    """Named coordinatewise reducer over equally sized input values."""

    mode: str

    def __post_init__(self):
        if self.mode not in ("max", "mean"):
            raise ValueError(f"unknown reducer {self.mode!r}")

    def __call__(self, values: Sequence[np.ndarray]) -> np.ndarray:
        stack = np.stack(values)
        return stack.max(axis=0) if self.mode == "max" else stack.mean(axis=0)


@dataclass(frozen=True)
class GeneralLayer:
    """out_beta = op(values of aggregation[beta]), with no imposed shape."""

    input_cover: Cover
    output_cover: Cover
    aggregation: tuple[tuple[int, ...], ...]
    op: Callable[[Sequence[np.ndarray]], np.ndarray]
    out_dim: int

    def __post_init__(self):
        object.__setattr__(self, "aggregation",
                           tuple(tuple(a) for a in self.aggregation))
        _check_aggregation(self.input_cover, self.output_cover, self.aggregation)

    def apply(self, values: Sequence[np.ndarray]) -> list[np.ndarray]:
        return [np.asarray(self.op([values[a] for a in atuple]), dtype=float)
                for atuple in self.aggregation]


Layer = InclusionLayer | GeneralLayer


@dataclass(frozen=True)
class Deviation:
    """Per-point perturbations nu_i; the evaluation applies id + nu_i."""

    space: MarkedSpace
    nus: tuple[Section, ...]

    def __post_init__(self):
        if len(self.nus) != self.space.n_points:
            raise ValueError("one deviation per marked point required")
        for p, s in zip(self.space.points, self.nus):
            l = self.space.fiber_dims[p - 1]
            if s.domain_dim != l or s.codomain_dim != l:
                raise ValueError(f"deviation at point {p} must map R^{l} to itself")

    @classmethod
    def zero(cls, space: MarkedSpace) -> "Deviation":
        from .sections import zero_section
        return cls(space=space, nus=tuple(
            zero_section(l, l) for l in space.fiber_dims))

    @classmethod
    def constants(cls, space: MarkedSpace, vectors: Sequence[Sequence[float]]) -> "Deviation":
        from .sections import constant_section
        return cls(space=space, nus=tuple(
            constant_section(l, v) for l, v in zip(space.fiber_dims, vectors)))


@dataclass(frozen=True)
class Network:
    """A cover sequence with one layer per consecutive stage pair."""

    space: MarkedSpace
    sequence: CoverSequence
    layers: tuple[Layer, ...]

    def __post_init__(self):
        stages = self.sequence.stages
        if len(self.layers) != len(stages) - 1:
            raise ValueError("need exactly one layer per stage pair")
        for i, layer in enumerate(self.layers):
            if layer.input_cover is not stages[i] and \
                    layer.input_cover.memberships() != stages[i].memberships():
                raise ValueError(f"layer {i} input cover mismatch")
            if layer.output_cover is not stages[i + 1] and \
                    layer.output_cover.memberships() != stages[i + 1].memberships():
                raise ValueError(f"layer {i} output cover mismatch")

    @property
    def out_dim(self) -> int:
        return self.layers[-1].out_dim

    @property
    def input_dim(self) -> int:
        return self.space.total_dim


class ForwardResult(NamedTuple):
    output: np.ndarray
    stages: tuple[tuple[np.ndarray, ...], ...]


def forward(net: Network, x, deviation: Deviation | None = None) -> ForwardResult:
    """Evaluate the network, returning the output and every stage's
    per-element values.

    ``x`` concatenates the fiber vectors of the marked points in point
    order.  Stage 0 values are x_i + nu_i(x_i).  A batch of inputs may
    be passed as shape (batch, input_dim) when every layer op is
    batch-safe (inclusion layers and reducers are; attention is not).
    """
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != net.input_dim or x.ndim not in (1, 2):
        raise ValueError(f"input must have trailing dimension {net.input_dim}")
    layout = slot_layout(frozenset(net.space.points), net.space.fiber_dims)
    values: list[np.ndarray] = []
    for p in net.space.points:
        xi = x[..., list(layout[p])]
        if deviation is not None:
            xi = xi + evaluate(deviation.nus[p - 1], xi)
        values.append(xi)
    stages = [tuple(values)]
    for layer in net.layers:
        values = layer.apply(values)
        stages.append(tuple(values))
    return ForwardResult(
        output=values[0] if len(values) == 1 else np.concatenate(values, axis=-1),
        stages=tuple(stages))


class FactorsCheckResult(NamedTuple):
    factors: bool
    max_deviation: float


def layer_input_dims(layer: Layer) -> list[int]:
    if isinstance(layer, InclusionLayer):
        return [s.domain_dim for s in layer.phi]
    raise ValueError("input dims are only declared for inclusion layers")


def composed_layer_sections(layer: InclusionLayer) -> list[Section]:
    """Symbolic per-output sections of an inclusion layer.

    Each output is activation(sum of phi_alpha composed with the
    coordinate projection of the concatenated input space onto the
    alpha block).  This is an independent evaluation path from
    ``layer.apply``: it goes through DAG composition.
    """
    dims = layer_input_dims(layer)
    offsets = np.concatenate([[0], np.cumsum(dims)]).astype(int)
    total = int(offsets[-1])
    out = []
    for atuple in layer.aggregation:
        parts: list[Node] = []
        for a in atuple:
            shifted = shift_section(layer.phi[a], int(offsets[a]), total)
            parts.append(shifted.body)
        body: Node = parts[0] if len(parts) == 1 else Sum(tuple(parts))
        if layer.activation != "identity":
            body = Activation(layer.activation, body)
        out.append(Section(domain_dim=total, codomain_dim=layer.out_dim, body=body))
    return out


def factors_check(layer: Layer, n_samples: int = 100, tol: float = 1e-9,
                  seed: int = 0) -> FactorsCheckResult:
    """Extensional check that a layer factors through inclusions.

    Compares the layer's direct action against the symbolically
    composed sections at seeded random inputs.  Raises TypeError for
    general layers, where the decomposition is not declared.
    """
    if not isinstance(layer, InclusionLayer):
        raise TypeError("factors_check applies to inclusion layers only")
    dims = layer_input_dims(layer)
    offsets = np.concatenate([[0], np.cumsum(dims)]).astype(int)
    sections = composed_layer_sections(layer)
    rng = np.random.default_rng(seed)
    samples = rng.standard_normal((n_samples, int(offsets[-1])))
    dev = 0.0
    for row in samples:
        values = [row[int(offsets[a]):int(offsets[a + 1])] for a in range(len(dims))]
        direct = layer.apply(values)
        for b, sec in enumerate(sections):
            composed = evaluate(sec, row)
            dev = max(dev, float(np.max(np.abs(direct[b] - composed))))
    return FactorsCheckResult(factors=dev <= tol, max_deviation=dev)


def affine_aggregation_residual(layer: Layer, n_samples: int = 200,
                                seed: int = 0) -> float:
    """Best-fit residual of the layer by sums of affine per-input maps.

    Fits out_beta ~ sum_alpha A_alpha v_alpha + b by least squares on
    seeded random data and returns the max absolute residual.  Large
    residuals certify that no affine-phi sum decomposition exists.
    """
    dims = [len(slot_layout(el.members, layer.input_cover.space.fiber_dims)) and
            sum(layer.input_cover.space.fiber_dims[p - 1] for p in el.members)
            for el in layer.input_cover.elements]
    # for general layers the natural value dim is unknown; probe with the
    # element coordinate dims unless the layer declares phi domains
    if isinstance(layer, InclusionLayer):
        dims = layer_input_dims(layer)
    offsets = np.concatenate([[0], np.cumsum(dims)]).astype(int)
    total = int(offsets[-1])
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n_samples, total))
    design = np.hstack([X, np.ones((n_samples, 1))])
    worst = 0.0
    for b, atuple in enumerate(layer.aggregation):
        rows = []
        for r in range(n_samples):
            values = [X[r, int(offsets[a]):int(offsets[a + 1])]
                      for a in range(len(dims))]
            rows.append(layer.apply(values)[b])
        Y = np.stack(rows)
        coef, *_ = np.linalg.lstsq(design, Y, rcond=None)
        resid = design @ coef - Y
        worst = max(worst, float(np.max(np.abs(resid))))
    return worst


def linear_matrix(net: Network) -> np.ndarray:
    """End-to-end matrix of a purely linear network.

    Requires every layer to be an InclusionLayer with identity
    activation and linear phi (affine with zero bias).  The result is
    checked elsewhere against the forward loop; here the blocks are
    assembled by exact matrix composition of the per-layer
    LinearSection data.
    """
    from .sections import polynomial_coefficients

    def section_linear_matrix(s: Section) -> np.ndarray:
        coeffs = polynomial_coefficients(s)
        m = np.zeros((s.codomain_dim, s.domain_dim))
        for out_slot, poly in enumerate(coeffs):
            for mono, c in poly.items():
                if sum(mono) == 0 and c != 0:
                    raise ValueError("phi has a bias term; not linear")
                if sum(mono) > 1:
                    raise ValueError("phi is nonlinear")
                if sum(mono) == 1:
                    m[out_slot, mono.index(1)] = float(c)
        return m

    mat: np.ndarray | None = None
    for layer in net.layers:
        if not isinstance(layer, InclusionLayer) or layer.activation != "identity":
            raise ValueError("network is not linear")
        dims = layer_input_dims(layer)
        offsets = np.concatenate([[0], np.cumsum(dims)]).astype(int)
        block = np.zeros((layer.out_dim * len(layer.aggregation), int(offsets[-1])))
        for b, atuple in enumerate(layer.aggregation):
            for a in atuple:
                pm = section_linear_matrix(layer.phi[a])
                block[b * layer.out_dim:(b + 1) * layer.out_dim,
                      int(offsets[a]):int(offsets[a + 1])] += pm
        mat = block if mat is None else block @ mat
    assert mat is not None
    return mat


# ---------------------------------------------------------------------------
# builders


def _grid_space(n: int, channels: int = 3) -> MarkedSpace:
    return MarkedSpace(n_points=n * n, fiber_dims=(channels,) * (n * n),
                       structure=("grid", n, n))


def _block_patches(shape: tuple[int, int], block: int,
                   cell_points: list[list[int]]) -> tuple[list[list[int]], tuple[int, int], list[list[int]]]:
    """Group a patch grid into block x block superpatches.

    Returns (patch memberships, new shape, aggregation index lists).
    ``cell_points[i]`` lists the marked points of current patch i in
    row-major order of the current patch grid.
    """
    rows, cols = shape
    if rows % block or cols % block:
        raise ValueError(f"patch grid {shape} not divisible by block {block}")
    nr, nc = rows // block, cols // block
    members: list[list[int]] = []
    agg: list[list[int]] = []
    for br in range(nr):
        for bc in range(nc):
            idxs = [(br * block + r) * cols + (bc * block + c)
                    for r in range(block) for c in range(block)]
            agg.append(idxs)
            pts: list[int] = []
            for i in idxs:
                pts.extend(cell_points[i])
            members.append(sorted(pts))
    return members, (nr, nc), agg


def build_cnn(n: int, plan: Sequence[dict] | None = None, seed: int = 0) -> Network:
    """A convolution/pooling network on an n x n grid of RGB cells.

    ``plan`` is a list of stage dicts, processed in order:

    * {"kind": "conv", "channels": c, "activation": name}: weight-shared
      per-patch affine filter; the cover is unchanged (one output patch
      per input patch).
    * {"kind": "pool", "mode": "sum"|"mean"|"max", "block": 2,
      "channels": c, "activation": name}: block pooling.  sum/mean
      pooling (optionally fused with a shared filter) is an
      InclusionLayer; max pooling is a GeneralLayer.
    * {"kind": "fc", "out_dim": k, "activation": name}: fully connected
      head onto the global stage (must be last).

    The default plan is one fused sum-pool stage with relu and a
    sigmoid fully connected head.
    """
    if plan is None:
        plan = [
            {"kind": "pool", "mode": "sum", "block": 2, "channels": 4,
             "activation": "relu"},
            {"kind": "fc", "out_dim": 2, "activation": "sigmoid"},
        ]
    if not plan or plan[-1]["kind"] != "fc":
        raise ValueError("plan must end with a fully connected stage")
    rng = np.random.default_rng(seed)
    space = _grid_space(n)
    channels = 3
    shape = (n, n)
    cell_points = [[p] for p in space.points]
    stages: list[Cover] = [singleton_stage(space)]
    layers: list[Layer] = []
    cur_cover = stages[0]
    cur_dim_per = [channels] * (n * n)

    def shared_filter(in_dim: int, out_dim: int) -> Section:
        w = rng.standard_normal((out_dim, in_dim)) / math.sqrt(in_dim)
        return affine_section(w)

    for stage in plan[:-1]:
        kind = stage["kind"]
        if kind == "conv":
            c = int(stage.get("channels", 4))
            act = stage.get("activation", "relu")
            filt = stage.get("filter")
            in_dim = cur_dim_per[0]
            phi = (affine_section(filt) if filt is not None
                   else shared_filter(in_dim, c))
            new_cover = make_cover(space, [sorted(m) for m in
                                           (el.members for el in cur_cover.elements)])
            layer = InclusionLayer(
                input_cover=cur_cover, output_cover=new_cover,
                aggregation=tuple((i,) for i in range(len(cur_cover.elements))),
                phi=(phi,) * len(cur_cover.elements),
                activation=act, out_dim=phi.codomain_dim)
            cur_dim_per = [phi.codomain_dim] * len(new_cover.elements)
        elif kind == "pool":
            block = int(stage.get("block", 2))
            mode = stage["mode"]
            members, shape, agg = _block_patches(shape, block, cell_points)
            cell_points = members
            new_cover = make_cover(space, members)
            in_dim = cur_dim_per[0]
            if mode == "max":
                layer = GeneralLayer(
                    input_cover=cur_cover, output_cover=new_cover,
                    aggregation=tuple(tuple(a) for a in agg),
                    op=Reducer("max"), out_dim=in_dim)
                cur_dim_per = [in_dim] * len(new_cover.elements)
            else:
                c = stage.get("channels")
                act = stage.get("activation", "identity")
                if c is None:
                    phi = identity_section(in_dim)
                    if mode == "mean":
                        phi = affine_section(np.eye(in_dim) / (block * block))
                else:
                    phi = shared_filter(in_dim, int(c))
                    if mode == "mean":
                        phi = affine_section(
                            np.asarray(phi.body.matrix) / (block * block))
                layer = InclusionLayer(
                    input_cover=cur_cover, output_cover=new_cover,
                    aggregation=tuple(tuple(a) for a in agg),
                    phi=(phi,) * len(cur_cover.elements),
                    activation=act, out_dim=phi.codomain_dim)
                cur_dim_per = [phi.codomain_dim] * len(new_cover.elements)
        else:
            raise ValueError(f"unknown plan stage kind {kind!r}")
        stages.append(new_cover)
        layers.append(layer)
        cur_cover = new_cover

    head = plan[-1]
    out_dim = int(head.get("out_dim", 2))
    act = head.get("activation", "sigmoid")
    gstage = global_stage(space)
    n_in = len(cur_cover.elements)
    phis = []
    for a in range(n_in):
        w = rng.standard_normal((out_dim, cur_dim_per[a])) / math.sqrt(cur_dim_per[a])
        b = rng.standard_normal(out_dim) if a == 0 else np.zeros(out_dim)
        phis.append(affine_section(w, b))
    layers.append(InclusionLayer(
        input_cover=cur_cover, output_cover=gstage,
        aggregation=(tuple(range(n_in)),), phi=tuple(phis),
        activation=act, out_dim=out_dim))
    stages.append(gstage)
    return Network(space=space,
                   sequence=CoverSequence(space=space, stages=tuple(stages)),
                   layers=tuple(layers))


def build_rnn_cover(n: int, kind: str, window: int = 2) -> CoverSequence:
    """Cover sequences of sequential models on a line of n tokens.

    kind "rnn" uses nested prefixes {1}, {1,2}, ..., {1..n}; kind
    "lstm" uses sliding windows of the given width.
    """
    if n < 1:
        raise ValueError("need at least one token")
    space = MarkedSpace(n_points=n, fiber_dims=(1,) * n, structure=("line",))
    if kind == "rnn":
        mems = [list(range(1, m + 1)) for m in range(1, n + 1)]
    elif kind == "lstm":
        if not 1 <= window <= n:
            raise ValueError("window must be between 1 and n")
        mems = [list(range(s, s + window)) for s in range(1, n - window + 2)]
    else:
        raise ValueError(f"unknown sequential kind {kind!r}")
    stages = [singleton_stage(space), make_cover(space, mems), global_stage(space)]
    return CoverSequence(space=space, stages=tuple(stages))


def build_sequential(n: int, kind: str = "rnn", window: int = 2,
                     hidden: int = 2, out_dim: int = 2,
                     activation: str = "tanh", seed: int = 0) -> Network:
    """A summed-inclusion network over a sequential cover.

    Stage-1 elements (prefixes or sliding windows) aggregate their
    member tokens through per-token affine maps; the head sums every
    stage-1 element into the global stage.
    """
    seq = build_rnn_cover(n, kind, window=window)
    rng = np.random.default_rng(seed)
    s0, s1, s2 = seq.stages
    mems1 = s1.memberships()
    phi0 = tuple(affine_section(rng.standard_normal((hidden, 1)))
                 for _ in range(n))
    agg1 = tuple(tuple(i for i in range(n) if (i + 1) in m) for m in mems1)
    layer0 = InclusionLayer(input_cover=s0, output_cover=s1, aggregation=agg1,
                            phi=phi0, activation="relu", out_dim=hidden)
    phi1 = []
    for a in range(len(mems1)):
        w = rng.standard_normal((out_dim, hidden)) / math.sqrt(hidden)
        b = rng.standard_normal(out_dim) if a == 0 else np.zeros(out_dim)
        phi1.append(affine_section(w, b))
    layer1 = InclusionLayer(input_cover=s1, output_cover=s2,
                            aggregation=(tuple(range(len(mems1))),),
                            phi=tuple(phi1), activation=activation,
                            out_dim=out_dim)
    return Network(space=seq.space, sequence=seq, layers=(layer0, layer1))


def positional_encoding(n: int, d: int) -> list[tuple[float, float]]:
    """Cylinder coordinates of the n*d encoded inputs, ordered by
    (token i, feature j), both 1-based.

    The first coordinate is sin(i / 10000^(2j/d)) for even i and
    cos(i / 10000^(2j/d)) for odd i; the second is (2j-1)/(2d).
    """
    out = []
    for i in range(1, n + 1):
        for j in range(1, d + 1):
            angle = i / (10000.0 ** (2.0 * j / d))
            first = math.sin(angle) if i % 2 == 0 else math.cos(angle)
            out.append((first, (2.0 * j - 1.0) / (2.0 * d)))
    return out


@dataclass(frozen=True)
class MultiHeadAttentionOp:
    """Scaled dot-product attention over token values.

    Each incoming token value concatenates the raw token vector (first
    d_model slots) with the per-head value rows; queries and keys are
    formed from the raw part, so the op is a self-contained map on the
    stage values.  The output stacks the per-token outputs of
    Z @ W_Z row by row.
    """

    n_tokens: int
    d_model: int
    heads: int
    head_dim: int
    w_q: tuple  # heads x (d_model x head_dim), row-major nested tuples
    w_k: tuple
    w_z: tuple  # (heads*head_dim) x d_model

    def _split(self, values: Sequence[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
        stack = np.stack([np.asarray(v, dtype=float) for v in values])
        want = self.d_model + self.heads * self.head_dim
        if stack.shape != (self.n_tokens, want):
            raise ValueError("unexpected token value shape")
        return stack[:, :self.d_model], stack[:, self.d_model:]

    def attention_weights(self, values: Sequence[np.ndarray]) -> np.ndarray:
        """Softmax attention matrices, shape (heads, n, n); rows sum to 1."""
        raw, _ = self._split(values)
        out = np.zeros((self.heads, self.n_tokens, self.n_tokens))
        for i in range(self.heads):
            q = raw @ np.asarray(self.w_q[i], dtype=float)
            k = raw @ np.asarray(self.w_k[i], dtype=float)
            logits = q @ k.T / math.sqrt(self.head_dim)
            logits = logits - logits.max(axis=1, keepdims=True)
            e = np.exp(logits)
            out[i] = e / e.sum(axis=1, keepdims=True)
        return out

    def __call__(self, values: Sequence[np.ndarray]) -> np.ndarray:
        _, headvals = self._split(values)
        attn = self.attention_weights(values)
        zs = []
        for i in range(self.heads):
            v = headvals[:, i * self.head_dim:(i + 1) * self.head_dim]
            zs.append(attn[i] @ v)
        z = np.hstack(zs)
        out = z @ np.asarray(self.w_z, dtype=float)
        return out.reshape(-1)


def build_attention(n_tokens: int, d_model: int, heads: int = 1,
                    head_dim: int = 2, seed: int = 0,
                    zero_qk: bool = False) -> Network:
    """Single attention block over n_tokens tokens of d_model features.

    The marked space has one point per (token, feature) pair with unit
    fibers.  Stage 1 elements are the per-token feature columns; the
    first layer assembles, per token, the raw token vector next to the
    per-head value rows (all linear per-input maps, summed per token);
    the second layer applies multi-head softmax attention followed by
    the output projection.
    """
    if n_tokens < 2:
        raise ValueError("attention needs at least two tokens")
    N = n_tokens * d_model
    space = MarkedSpace(n_points=N, fiber_dims=(1,) * N, structure=("abstract",))
    rng = np.random.default_rng(seed)

    def weight(shape):
        return rng.standard_normal(shape) / math.sqrt(shape[0])

    w_v = [weight((d_model, head_dim)) for _ in range(heads)]
    w_q = [np.zeros((d_model, head_dim)) if zero_qk else weight((d_model, head_dim))
           for _ in range(heads)]
    w_k = [np.zeros((d_model, head_dim)) if zero_qk else weight((d_model, head_dim))
           for _ in range(heads)]
    w_z = weight((heads * head_dim, d_model))

    token_members = [[(t * d_model) + j + 1 for j in range(d_model)]
                     for t in range(n_tokens)]
    stage1 = make_cover(space, token_members)
    stages = (singleton_stage(space), stage1, global_stage(space))

    token_dim = d_model + heads * head_dim
    phis = []
    for t in range(n_tokens):
        for j in range(d_model):
            col = np.zeros((token_dim, 1))
            col[j, 0] = 1.0
            for i in range(heads):
                col[d_model + i * head_dim:d_model + (i + 1) * head_dim, 0] = w_v[i][j]
            phis.append(affine_section(col))
    layer1 = InclusionLayer(
        input_cover=stages[0], output_cover=stage1,
        aggregation=tuple(tuple((t * d_model) + j for j in range(d_model))
                          for t in range(n_tokens)),
        phi=tuple(phis), activation="identity", out_dim=token_dim)

    op = MultiHeadAttentionOp(
        n_tokens=n_tokens, d_model=d_model, heads=heads, head_dim=head_dim,
        w_q=tuple(tuple(map(tuple, w)) for w in w_q),
        w_k=tuple(tuple(map(tuple, w)) for w in w_k),
        w_z=tuple(map(tuple, w_z)))
    layer2 = GeneralLayer(
        input_cover=stage1, output_cover=stages[2],
        aggregation=(tuple(range(n_tokens)),), op=op,
        out_dim=n_tokens * d_model)
    return Network(space=space,
                   sequence=CoverSequence(space=space, stages=stages),
                   layers=(layer1, layer2))


# ---------------------------------------------------------------------------
# JSON serialization (inclusion and reducer layers)


def network_to_json(net: Network) -> dict:
    space = net.space
    struct: dict = {"kind": space.structure[0]}
    if space.structure[0] == "grid":
        struct.update(rows=space.structure[1], cols=space.structure[2])
    layers = []
    for layer in net.layers:
        entry: dict = {"aggregation": [list(a) for a in layer.aggregation],
                       "out_dim": layer.out_dim}
        if isinstance(layer, InclusionLayer):
            entry["kind"] = "inclusion"
            entry["activation"] = layer.activation
            entry["phi"] = [section_to_json(s) for s in layer.phi]
        elif isinstance(layer, GeneralLayer) and isinstance(layer.op, Reducer):
            entry["kind"] = "general"
            entry["op"] = layer.op.mode
        else:
            raise ValueError("only inclusion and reducer layers serialize to JSON")
        layers.append(entry)
    return {
        "schema": 1,
        "space": {"n_points": space.n_points,
                  "fiber_dims": list(space.fiber_dims),
                  "structure": struct},
        "stages": [[sorted(el.members) for el in c.elements]
                   for c in net.sequence.stages],
        "layers": layers,
    }


def network_from_json(source) -> Network:
    """Load a network; accepts a path, JSON text or a decoded dict."""
    if isinstance(source, (str, Path)):
        obj = json.loads(_read_source(source))
    else:
        obj = source
    try:
        sp = obj["space"]
        space = MarkedSpace(
            n_points=int(sp["n_points"]),
            fiber_dims=tuple(int(x) for x in sp["fiber_dims"]),
            structure=structure_from_json(sp.get("structure", {"kind": "abstract"})))
        covers = [make_cover(space, fam) for fam in obj["stages"]]
        seq = CoverSequence(space=space, stages=tuple(covers))
        layers: list[Layer] = []
        for i, entry in enumerate(obj["layers"]):
            agg = tuple(tuple(int(a) for a in row) for row in entry["aggregation"])
            if entry["kind"] == "inclusion":
                phis = []
                for spec in entry["phi"]:
                    if "nodes" in spec:
                        phis.append(section_from_json(spec))
                    else:
                        phis.append(affine_section(spec["matrix"],
                                                   spec.get("bias")))
                layers.append(InclusionLayer(
                    input_cover=covers[i], output_cover=covers[i + 1],
                    aggregation=agg, phi=tuple(phis),
                    activation=entry.get("activation", "identity"),
                    out_dim=int(entry["out_dim"])))
            elif entry["kind"] == "general":
                layers.append(GeneralLayer(
                    input_cover=covers[i], output_cover=covers[i + 1],
                    aggregation=agg, op=Reducer(entry["op"]),
                    out_dim=int(entry["out_dim"])))
            else:
                raise ValueError(f"unknown layer kind {entry['kind']!r}")
        return Network(space=space, sequence=seq, layers=tuple(layers))
    except (KeyError, TypeError, IndexError) as e:
        raise ValueError(f"malformed network document: {e}") from e

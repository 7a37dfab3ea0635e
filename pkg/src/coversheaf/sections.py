"""Section spaces over open sets of a finite marked space.

A section over an open set U is a continuous map R^{d_U} -> R^k, where
d_U is the sum of fiber dimensions of the marked points inside U.
Sections are represented as immutable expression DAGs built from input
coordinates, constants, affine maps, pointwise activations, products,
sums and maxima.  Equality of sections is extensional: seeded sampling
with a fixed tolerance.

Coordinate maps between open sets come in exactly two kinds:

* projection (V -> U for U inside V): drop the coordinates of points
  outside U, keeping order;
* zero_pad (U -> V for U inside V): insert zero coordinates at the
  slots of points outside U.

Precomposition with zero_pad restricts a section from V to U (the
presheaf direction); precomposition with projection extends a section
from U to V (the copresheaf direction).  Note that for an open set
with no marked points d_U = 0, so its section space consists of the
constant maps R^0 -> R^k, not the zero space; restriction to such a
set evaluates a section at the zero vector.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np

from .topology import MarkedSpace, OpenSet


# ---------------------------------------------------------------------------
# slot layout


def slot_layout(members: frozenset[int] | Iterable[int],
                fibers: Sequence[int]) -> dict[int, range]:
    """Coordinate slots of each member point, in increasing point order."""
    out: dict[int, range] = {}
    pos = 0
    for p in sorted(members):
        l = fibers[p - 1]
        out[p] = range(pos, pos + l)
        pos += l
    return out


def open_set_dim(members: frozenset[int] | Iterable[int],
                 fibers: Sequence[int]) -> int:
    return sum(fibers[p - 1] for p in members)


# ---------------------------------------------------------------------------
# expression DAG


class Node:
    """Base class for expression nodes.  Instances are immutable."""

    __slots__ = ()


@dataclass(frozen=True)
class Coords(Node):
    """Select input coordinates; width = number of indices."""

    indices: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))


@dataclass(frozen=True)
class Const(Node):
    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))


@dataclass(frozen=True)
class Affine(Node):
    """matrix @ child + bias; matrix is row-major (out_dim x in_dim)."""

    matrix: tuple[tuple[float, ...], ...]
    bias: tuple[float, ...]
    child: Node

    def __post_init__(self):
        m = tuple(tuple(float(v) for v in row) for row in self.matrix)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "bias", tuple(float(v) for v in self.bias))
        if len(self.bias) != len(m):
            raise ValueError("bias length must match matrix rows")
        if m and len({len(r) for r in m}) != 1:
            raise ValueError("matrix rows must have equal length")


@dataclass(frozen=True)
class Activation(Node):
    name: str
    child: Node

    def __post_init__(self):
        if self.name not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.name!r}")


@dataclass(frozen=True)
class Product(Node):
    """Coordinatewise product of equal-width children."""

    children: tuple[Node, ...]

    def __post_init__(self):
        if not self.children:
            raise ValueError("product needs at least one child")
        object.__setattr__(self, "children", tuple(self.children))


@dataclass(frozen=True)
class Sum(Node):
    children: tuple[Node, ...]

    def __post_init__(self):
        if not self.children:
            raise ValueError("sum needs at least one child")
        object.__setattr__(self, "children", tuple(self.children))


@dataclass(frozen=True)
class Max(Node):
    """Coordinatewise maximum over a finite set of children."""

    children: tuple[Node, ...]

    def __post_init__(self):
        if not self.children:
            raise ValueError("max needs at least one child")
        object.__setattr__(self, "children", tuple(self.children))


def node_width(node: Node) -> int:
    if isinstance(node, Coords):
        return len(node.indices)
    if isinstance(node, Const):
        return len(node.values)
    if isinstance(node, Affine):
        return len(node.matrix)
    if isinstance(node, Activation):
        return node_width(node.child)
    if isinstance(node, (Product, Sum, Max)):
        widths = {node_width(c) for c in node.children}
        if len(widths) != 1:
            raise ValueError("children of product/sum/max must share a width")
        return widths.pop()
    raise TypeError(f"unknown node type {type(node).__name__}")


def _max_index(node: Node, memo: dict[int, int]) -> int:
    key = id(node)
    if key in memo:
        return memo[key]
    if isinstance(node, Coords):
        out = max(node.indices, default=-1)
    elif isinstance(node, Const):
        out = -1
    elif isinstance(node, (Affine, Activation)):
        out = _max_index(node.child, memo)
    else:
        out = max(_max_index(c, memo) for c in node.children)
    memo[key] = out
    return out


@dataclass(frozen=True)
class Section:
    """A map R^{domain_dim} -> R^{codomain_dim} given by an expression DAG.

    ``domain`` optionally records the open set whose coordinate space
    the domain is; it is bookkeeping only and never affects evaluation.
    """

    domain_dim: int
    codomain_dim: int
    body: Node
    domain: OpenSet | None = None

    def __post_init__(self):
        w = node_width(self.body)
        if w != self.codomain_dim:
            raise ValueError(f"body width {w} != codomain_dim {self.codomain_dim}")
        if _max_index(self.body, {}) >= self.domain_dim:
            raise ValueError("body references coordinates outside the domain")

    def __call__(self, y) -> np.ndarray:
        return evaluate(self, y)


def evaluate(section: Section, y) -> np.ndarray:
    """Evaluate at one point (shape (d,)) or a batch (shape (n, d))."""
    arr = np.asarray(y, dtype=float)
    single = arr.ndim == 1
    if single:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != section.domain_dim:
        raise ValueError(
            f"input shape {np.asarray(y).shape} does not match domain dim "
            f"{section.domain_dim}")
    out = _eval(section.body, arr, {})
    return out[0] if single else out


def _eval(node: Node, Y: np.ndarray, memo: dict[int, np.ndarray]) -> np.ndarray:
    key = id(node)
    hit = memo.get(key)
    if hit is not None:
        return hit
    if isinstance(node, Coords):
        out = Y[:, list(node.indices)] if node.indices else np.zeros((Y.shape[0], 0))
    elif isinstance(node, Const):
        out = np.broadcast_to(np.asarray(node.values, dtype=float),
                              (Y.shape[0], len(node.values))).copy()
    elif isinstance(node, Affine):
        child = _eval(node.child, Y, memo)
        m = np.asarray(node.matrix, dtype=float)
        out = child @ m.T + np.asarray(node.bias, dtype=float)
    elif isinstance(node, Activation):
        out = ACTIVATIONS[node.name].fn(_eval(node.child, Y, memo))
    elif isinstance(node, Product):
        out = _eval(node.children[0], Y, memo).copy()
        for c in node.children[1:]:
            out = out * _eval(c, Y, memo)
    elif isinstance(node, Sum):
        out = _eval(node.children[0], Y, memo).copy()
        for c in node.children[1:]:
            out = out + _eval(c, Y, memo)
    elif isinstance(node, Max):
        out = _eval(node.children[0], Y, memo)
        for c in node.children[1:]:
            out = np.maximum(out, _eval(c, Y, memo))
    else:
        raise TypeError(f"unknown node type {type(node).__name__}")
    memo[key] = out
    return out


# ---------------------------------------------------------------------------
# activations

def _sigmoid(x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        return 1.0 / (1.0 + np.exp(-x))


@dataclass(frozen=True)
class ActivationInfo:
    """A scalar activation with its mapping-property metadata.

    ``surjective``/``open_map``/``bijective`` describe the function as a
    map R -> R.  ``unreachable_value`` is a value outside the closure of
    the range when one exists (used to synthesize unattainable targets).
    """

    name: str
    fn: Callable[[np.ndarray], np.ndarray]
    surjective: bool
    open_map: bool
    bijective: bool
    unreachable_value: float | None


ACTIVATIONS: dict[str, ActivationInfo] = {}


def register_activation(info: ActivationInfo) -> None:
    ACTIVATIONS[info.name] = info


for _info in (
    ActivationInfo("identity", lambda x: x, True, True, True, None),
    ActivationInfo("relu", lambda x: np.maximum(x, 0.0), False, False, False, -1.0),
    ActivationInfo("sigmoid", _sigmoid, False, True, False, 2.0),
    ActivationInfo("tanh", np.tanh, False, True, False, 2.0),
    ActivationInfo("sin", np.sin, False, False, False, 2.0),
    ActivationInfo("cos", np.cos, False, False, False, 2.0),
):
    register_activation(_info)


# ---------------------------------------------------------------------------
# coordinate maps


@dataclass(frozen=True)
class CoordMap:
    """A select-or-zero linear map between open-set coordinate spaces.

    ``slots[t]`` gives the source slot feeding target slot t, or None
    for a zero fill.  Projections (V -> U) have no None entries;
    zero_pad maps (U -> V) have None exactly at the slots of points
    outside U.
    """

    kind: str
    source: OpenSet
    target: OpenSet
    source_dim: int
    target_dim: int
    slots: tuple[int | None, ...]

    def __post_init__(self):
        if self.kind not in ("projection", "zero_pad"):
            raise ValueError(f"unknown coordinate map kind {self.kind!r}")
        if len(self.slots) != self.target_dim:
            raise ValueError("slots length must equal target dimension")

    def __call__(self, y) -> np.ndarray:
        arr = np.asarray(y, dtype=float)
        single = arr.ndim == 1
        if single:
            arr = arr[None, :]
        if arr.shape[1] != self.source_dim:
            raise ValueError("input does not match source dimension")
        out = np.zeros((arr.shape[0], self.target_dim))
        for t, s in enumerate(self.slots):
            if s is not None:
                out[:, t] = arr[:, s]
        return out[0] if single else out


def projection_map(fibers: Sequence[int], big: OpenSet, small: OpenSet) -> CoordMap:
    """The coordinate projection R^{d_big} -> R^{d_small} (small inside big)."""
    if not small.members <= big.members:
        raise ValueError("projection requires the target inside the source")
    src = slot_layout(big.members, fibers)
    slots: list[int | None] = []
    for p in sorted(small.members):
        slots.extend(src[p])
    return CoordMap(kind="projection", source=big, target=small,
                    source_dim=open_set_dim(big.members, fibers),
                    target_dim=open_set_dim(small.members, fibers),
                    slots=tuple(slots))


def zero_pad_map(fibers: Sequence[int], small: OpenSet, big: OpenSet) -> CoordMap:
    """The zero-padding inclusion R^{d_small} -> R^{d_big} (small inside big)."""
    if not small.members <= big.members:
        raise ValueError("zero_pad requires the source inside the target")
    src = slot_layout(small.members, fibers)
    slots: list[int | None] = []
    for p in sorted(big.members):
        if p in small.members:
            slots.extend(src[p])
        else:
            slots.extend([None] * fibers[p - 1])
    return CoordMap(kind="zero_pad", source=small, target=big,
                    source_dim=open_set_dim(small.members, fibers),
                    target_dim=open_set_dim(big.members, fibers),
                    slots=tuple(slots))


def _rewrite(node: Node, slots: tuple[int | None, ...],
             memo: dict[int, Node]) -> Node:
    key = id(node)
    hit = memo.get(key)
    if hit is not None:
        return hit
    if isinstance(node, Coords):
        mapped = [slots[i] for i in node.indices]
        if all(m is not None for m in mapped):
            out: Node = Coords(tuple(mapped))  # type: ignore[arg-type]
        else:
            survivors = [m for m in mapped if m is not None]
            if not survivors:
                out = Const((0.0,) * len(mapped))
            else:
                rows = []
                pos = 0
                for m in mapped:
                    row = [0.0] * len(survivors)
                    if m is not None:
                        row[pos] = 1.0
                        pos += 1
                    rows.append(tuple(row))
                out = Affine(tuple(rows), (0.0,) * len(mapped), Coords(tuple(survivors)))
    elif isinstance(node, Const):
        out = node
    elif isinstance(node, Affine):
        out = Affine(node.matrix, node.bias, _rewrite(node.child, slots, memo))
    elif isinstance(node, Activation):
        out = Activation(node.name, _rewrite(node.child, slots, memo))
    elif isinstance(node, Product):
        out = Product(tuple(_rewrite(c, slots, memo) for c in node.children))
    elif isinstance(node, Sum):
        out = Sum(tuple(_rewrite(c, slots, memo) for c in node.children))
    elif isinstance(node, Max):
        out = Max(tuple(_rewrite(c, slots, memo) for c in node.children))
    else:
        raise TypeError(f"unknown node type {type(node).__name__}")
    memo[key] = out
    return out


def compose_coord(section: Section, cmap: CoordMap) -> Section:
    """Precompose a section with a coordinate map (section o cmap).

    Requires the map's target dimension to equal the section's domain
    dimension.  The result lives over the map's source open set.
    Composition is performed by rewriting coordinate references, so the
    DAG does not grow in depth.
    """
    if cmap.target_dim != section.domain_dim:
        raise ValueError(
            f"coordinate map target dim {cmap.target_dim} does not match "
            f"section domain dim {section.domain_dim}")
    body = _rewrite(section.body, cmap.slots, {})
    return Section(domain_dim=cmap.source_dim,
                   codomain_dim=section.codomain_dim,
                   body=body, domain=cmap.source)


def shift_section(section: Section, offset: int, total_dim: int,
                  domain: OpenSet | None = None) -> Section:
    """View a section as reading a contiguous slot block of a larger space."""
    if offset < 0 or offset + section.domain_dim > total_dim:
        raise ValueError("slot block out of range")
    slots = tuple(range(offset, offset + section.domain_dim))
    body = _rewrite(section.body, slots, {})
    return Section(domain_dim=total_dim, codomain_dim=section.codomain_dim,
                   body=body, domain=domain)


# ---------------------------------------------------------------------------
# constructions


def identity_section(dim: int, domain: OpenSet | None = None) -> Section:
    return Section(domain_dim=dim, codomain_dim=dim,
                   body=Coords(tuple(range(dim))), domain=domain)


def affine_section(matrix, bias=None, domain: OpenSet | None = None) -> Section:
    m = np.atleast_2d(np.asarray(matrix, dtype=float))
    b = np.zeros(m.shape[0]) if bias is None else np.asarray(bias, dtype=float)
    body = Affine(tuple(map(tuple, m)), tuple(b), Coords(tuple(range(m.shape[1]))))
    return Section(domain_dim=m.shape[1], codomain_dim=m.shape[0],
                   body=body, domain=domain)


def constant_section(domain_dim: int, values, domain: OpenSet | None = None) -> Section:
    vals = tuple(np.atleast_1d(np.asarray(values, dtype=float)))
    return Section(domain_dim=domain_dim, codomain_dim=len(vals),
                   body=Const(vals), domain=domain)


def product_counterexample(U: OpenSet, fibers: Sequence[int], k: int) -> Section:
    """The section whose k outputs each equal the product of all input
    coordinates over U.

    It restricts to the zero section on every open subset that misses a
    marked point of U: zero-padding the missing coordinates inserts a
    zero factor into the product.
    """
    d = open_set_dim(U.members, fibers)
    if d < 2:
        raise ValueError("product counterexample needs at least 2 coordinates")
    prod = Product(tuple(Coords((i,)) for i in range(d)))
    body = Affine(tuple((1.0,) for _ in range(k)), (0.0,) * k, prod)
    return Section(domain_dim=d, codomain_dim=k, body=body, domain=U)


@dataclass(frozen=True)
class LinearSection:
    """A linear section, stored as a k x d matrix (row-major)."""

    matrix: tuple[tuple[float, ...], ...]
    domain: OpenSet | None = None

    def __post_init__(self):
        m = tuple(tuple(float(v) for v in row) for row in self.matrix)
        object.__setattr__(self, "matrix", m)

    @property
    def domain_dim(self) -> int:
        return len(self.matrix[0]) if self.matrix else 0

    @property
    def codomain_dim(self) -> int:
        return len(self.matrix)

    def to_section(self) -> Section:
        return affine_section(self.matrix, domain=self.domain)

    def __call__(self, y) -> np.ndarray:
        return np.asarray(self.matrix, dtype=float) @ np.asarray(y, dtype=float)


# ---------------------------------------------------------------------------
# extensional comparison


class EqualityResult(NamedTuple):
    equal: bool
    max_deviation: float


def sections_equal(a: Section, b: Section, n_samples: int = 100,
                   tol: float = 1e-9, seed: int = 0) -> EqualityResult:
    """Seeded randomized extensional equality.

    Samples standard normal inputs and compares outputs in sup norm.
    Deterministic for a fixed seed.
    """
    if a.domain_dim != b.domain_dim or a.codomain_dim != b.codomain_dim:
        raise ValueError("sections must share domain and codomain dimensions")
    rng = np.random.default_rng(seed)
    Y = rng.standard_normal((n_samples, a.domain_dim))
    dev = 0.0
    if a.codomain_dim:
        diff = evaluate(a, Y) - evaluate(b, Y)
        dev = float(np.max(np.abs(diff))) if diff.size else 0.0
    return EqualityResult(equal=dev <= tol, max_deviation=dev)


def zero_section(domain_dim: int, codomain_dim: int,
                 domain: OpenSet | None = None) -> Section:
    return constant_section(domain_dim, [0.0] * codomain_dim, domain=domain)


def mixed_difference(section: Section, i: int, j: int, base, h: float) -> np.ndarray:
    """Second mixed finite difference along coordinates i and j.

    f(b + h e_i + h e_j) - f(b + h e_i) - f(b + h e_j) + f(b).
    Exactly zero (up to rounding) for any sum of terms none of which
    depends on both coordinates; nonzero for genuinely joint terms.
    """
    if i == j:
        raise ValueError("mixed difference needs two distinct coordinates")
    b = np.asarray(base, dtype=float)
    if b.shape != (section.domain_dim,):
        raise ValueError("base point dimension mismatch")
    pts = np.stack([b, b, b, b])
    pts[0, i] += h
    pts[0, j] += h
    pts[1, i] += h
    pts[2, j] += h
    vals = evaluate(section, pts)
    return vals[0] - vals[1] - vals[2] + vals[3]


# ---------------------------------------------------------------------------
# polynomial views (exact coefficients)

Monomial = tuple[int, ...]


def polynomial_coefficients(section: Section) -> list[dict[Monomial, Fraction]]:
    """Exact monomial coefficients of a polynomial section, per output.

    Only Coords, Const, Affine, Sum and Product nodes are allowed
    (identity activations are tolerated).  Float parameters convert
    exactly via Fraction(float).
    """
    d = section.domain_dim

    def mono_mul(a: Monomial, b: Monomial) -> Monomial:
        return tuple(x + y for x, y in zip(a, b))

    zero: Monomial = (0,) * d

    def go(node: Node, memo: dict[int, list[dict[Monomial, Fraction]]]):
        key = id(node)
        if key in memo:
            return memo[key]
        if isinstance(node, Coords):
            out = []
            for i in node.indices:
                m = list(zero)
                m[i] = 1
                out.append({tuple(m): Fraction(1)})
        elif isinstance(node, Const):
            out = [{zero: Fraction(v)} if v else {} for v in node.values]
        elif isinstance(node, Activation):
            if node.name != "identity":
                raise ValueError("section is not polynomial")
            out = go(node.child, memo)
        elif isinstance(node, Affine):
            child = go(node.child, memo)
            out = []
            for row, bval in zip(node.matrix, node.bias):
                acc: dict[Monomial, Fraction] = {}
                for coef, poly in zip(row, child):
                    if coef == 0.0:
                        continue
                    fc = Fraction(coef)
                    for mono, c in poly.items():
                        nv = acc.get(mono, Fraction(0)) + fc * c
                        if nv:
                            acc[mono] = nv
                        elif mono in acc:
                            del acc[mono]
                if bval:
                    nv = acc.get(zero, Fraction(0)) + Fraction(bval)
                    if nv:
                        acc[zero] = nv
                    elif zero in acc:
                        del acc[zero]
                out.append(acc)
        elif isinstance(node, Sum):
            parts = [go(c, memo) for c in node.children]
            out = []
            for slot in range(len(parts[0])):
                acc = {}
                for part in parts:
                    for mono, c in part[slot].items():
                        nv = acc.get(mono, Fraction(0)) + c
                        if nv:
                            acc[mono] = nv
                        elif mono in acc:
                            del acc[mono]
                out.append(acc)
        elif isinstance(node, Product):
            parts = [go(c, memo) for c in node.children]
            out = []
            for slot in range(len(parts[0])):
                acc = parts[0][slot]
                for part in parts[1:]:
                    nxt: dict[Monomial, Fraction] = {}
                    for m1, c1 in acc.items():
                        for m2, c2 in part[slot].items():
                            m = mono_mul(m1, m2)
                            nv = nxt.get(m, Fraction(0)) + c1 * c2
                            if nv:
                                nxt[m] = nv
                            elif m in nxt:
                                del nxt[m]
                    acc = nxt
                out.append(acc)
        else:
            raise ValueError("section is not polynomial")
        memo[key] = out
        return out

    return go(section.body, {})


def polynomial_section(domain_dim: int, codomain_dim: int,
                       coeffs: Sequence[dict[Monomial, Fraction]],
                       domain: OpenSet | None = None) -> Section:
    """Rebuild a Section from per-output monomial coefficient dicts.

    Node parameters are floats, so coefficients must be dyadic to
    round-trip exactly through polynomial_coefficients.  Every
    coefficient extracted from an existing section is dyadic already
    (it came from float parameters), so extraction -> arithmetic over
    Fractions -> rebuild is exact end to end.
    """
    if len(coeffs) != codomain_dim:
        raise ValueError("one coefficient dict per output required")
    monomials = sorted({m for c in coeffs for m in c})
    if not monomials:
        return zero_section(domain_dim, codomain_dim, domain=domain)
    terms: list[Node] = []
    for mono in monomials:
        col = tuple(float(coeffs[s].get(mono, 0)) for s in range(codomain_dim))
        factors: list[Node] = []
        for i, e in enumerate(mono):
            factors.extend([Coords((i,))] * e)
        if factors:
            child: Node = factors[0] if len(factors) == 1 else Product(tuple(factors))
            terms.append(Affine(tuple((v,) for v in col), (0.0,) * codomain_dim, child))
        else:
            terms.append(Const(col))
    body: Node = terms[0] if len(terms) == 1 else Sum(tuple(terms))
    return Section(domain_dim=domain_dim, codomain_dim=codomain_dim,
                   body=body, domain=domain)


# ---------------------------------------------------------------------------
# JSON serialization


def section_to_json(section: Section) -> dict:
    """Serialize to an explicit node-id expression tree (row-major arrays)."""
    nodes: list[dict] = []
    ids: dict[int, int] = {}

    def visit(node: Node) -> int:
        key = id(node)
        if key in ids:
            return ids[key]
        if isinstance(node, Coords):
            entry = {"kind": "coords", "indices": list(node.indices)}
        elif isinstance(node, Const):
            entry = {"kind": "const", "values": list(node.values)}
        elif isinstance(node, Affine):
            entry = {"kind": "affine", "matrix": [list(r) for r in node.matrix],
                     "bias": list(node.bias), "child": visit(node.child)}
        elif isinstance(node, Activation):
            entry = {"kind": "activation", "name": node.name,
                     "child": visit(node.child)}
        elif isinstance(node, (Product, Sum, Max)):
            kind = {Product: "product", Sum: "sum", Max: "max"}[type(node)]
            entry = {"kind": kind, "children": [visit(c) for c in node.children]}
        else:
            raise TypeError(f"unknown node type {type(node).__name__}")
        entry["id"] = len(nodes)
        nodes.append(entry)
        ids[key] = entry["id"]
        return entry["id"]

    root = visit(section.body)
    return {"domain_dim": section.domain_dim, "codomain_dim": section.codomain_dim,
            "root": root, "nodes": nodes}


def section_from_json(obj: dict, domain: OpenSet | None = None) -> Section:
    if isinstance(obj, str):
        obj = json.loads(obj)
    built: dict[int, Node] = {}
    for entry in obj["nodes"]:
        kind = entry["kind"]
        if kind == "coords":
            node: Node = Coords(tuple(entry["indices"]))
        elif kind == "const":
            node = Const(tuple(entry["values"]))
        elif kind == "affine":
            node = Affine(tuple(map(tuple, entry["matrix"])), tuple(entry["bias"]),
                          built[entry["child"]])
        elif kind == "activation":
            node = Activation(entry["name"], built[entry["child"]])
        elif kind in ("product", "sum", "max"):
            cls = {"product": Product, "sum": Sum, "max": Max}[kind]
            node = cls(tuple(built[c] for c in entry["children"]))
        else:
            raise ValueError(f"unknown node kind {kind!r}")
        built[entry["id"]] = node
    return Section(domain_dim=int(obj["domain_dim"]),
                   codomain_dim=int(obj["codomain_dim"]),
                   body=built[obj["root"]], domain=domain)

"""Graphs, directed double covers, unfolding trees and color refinement.

Node indices are 0-based.  An unfolding tree is the usual computation
tree of a node: the children of a copy of u are all graph neighbors of
u, so the depth-t level enumerates the length-t walks from the root.

Two independent routes compute the depth-k unfolding partition:

* materialize the tree and take its canonical code (exponential, used
  as the oracle on small inputs);
* share subtree codes bottom-up per (node, remaining depth), which is
  sound because every copy of u at remaining depth r roots a subtree
  equal to the depth-r unfolding tree of u.

Color refinement keeps a per-round injective signature dictionary, so
color classes can split but never merge and no hash collision can fake
an equality.
"""

from __future__ import annotations

import itertools
import json
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .topology import _read_source


@dataclass(frozen=True)
class Graph:
    """A simple undirected graph with optional small-integer node labels."""

    n: int
    edges: tuple[tuple[int, int], ...] = ()
    labels: tuple[int, ...] = ()

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("node count must be nonnegative")
        norm = []
        for e in self.edges:
            u, v = int(e[0]), int(e[1])
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge {e} references unknown nodes")
            if u == v:
                raise ValueError(f"self-loop at node {u} not allowed")
            norm.append((min(u, v), max(u, v)))
        norm.sort()
        for a, b in itertools.pairwise(norm):
            if a == b:
                raise ValueError(f"duplicate edge {a}")
        object.__setattr__(self, "edges", tuple(norm))
        labels = self.labels if self.labels else (0,) * self.n
        labels = tuple(int(l) for l in labels)
        if len(labels) != self.n:
            raise ValueError("one label per node required")
        object.__setattr__(self, "labels", labels)

    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return tuple(tuple(sorted(a)) for a in adj)

    def degree(self, v: int) -> int:
        return sum(1 for e in self.edges if v in e)


def relabel(g: Graph, perm: Sequence[int]) -> Graph:
    """Apply a node permutation (node i becomes perm[i])."""
    if sorted(perm) != list(range(g.n)):
        raise ValueError("perm must be a permutation of the nodes")
    labels = [0] * g.n
    for i, p in enumerate(perm):
        labels[p] = g.labels[i]
    return Graph(n=g.n, edges=tuple((perm[u], perm[v]) for u, v in g.edges),
                 labels=tuple(labels))


def disjoint_union(g1: Graph, g2: Graph) -> Graph:
    off = g1.n
    return Graph(n=g1.n + g2.n,
                 edges=g1.edges + tuple((u + off, v + off) for u, v in g2.edges),
                 labels=g1.labels + g2.labels)


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("a cycle needs at least 3 nodes")
    return Graph(n=n, edges=tuple((i, (i + 1) % n) for i in range(n)))


def path_graph(n: int) -> Graph:
    return Graph(n=n, edges=tuple((i, i + 1) for i in range(n - 1)))


# ---------------------------------------------------------------------------
# directed double cover


@dataclass(frozen=True)
class DoubleCover:
    """The directed double cover of the self-looped base graph.

    Every base edge lifts to its two directed arcs; the unit self-loop
    at each node lifts to a single loop, so the projection onto the
    self-looped base has degree 2 away from the node loops and degree 1
    (ramification) on them.
    """

    base: Graph
    arcs: tuple[tuple[int, int], ...]
    loop_lifts: tuple[int, ...]

    def project_arc(self, arc: tuple[int, int]) -> tuple[int, int]:
        u, v = arc
        if (min(u, v), max(u, v)) not in self.base.edges:
            raise ValueError(f"{arc} is not an arc of the cover")
        return (min(u, v), max(u, v))

    def project_loop(self, v: int) -> int:
        if v not in self.loop_lifts:
            raise ValueError(f"no loop lift at {v}")
        return v

    def fiber_size(self, edge: tuple[int, int]) -> int:
        return sum(1 for a in self.arcs if self.project_arc(a) == tuple(sorted(edge)))


def double_cover(g: Graph) -> DoubleCover:
    arcs = []
    for u, v in g.edges:
        arcs.append((u, v))
        arcs.append((v, u))
    return DoubleCover(base=g, arcs=tuple(arcs),
                       loop_lifts=tuple(range(g.n)))


# ---------------------------------------------------------------------------
# unfolding trees


@dataclass(frozen=True)
class TreeNode:
    node: int
    label: int
    children: tuple["TreeNode", ...]


@dataclass(frozen=True)
class UnfoldingTree:
    root: TreeNode
    depth: int

    def level_sizes(self) -> list[int]:
        sizes = []
        frontier = [self.root]
        while frontier:
            sizes.append(len(frontier))
            frontier = [c for t in frontier for c in t.children]
        return sizes

    def size(self) -> int:
        return sum(self.level_sizes())


def unfolding_tree(g: Graph, v: int, k: int) -> UnfoldingTree:
    """The depth-k computation tree of node v (children = all neighbors)."""
    if not 0 <= v < g.n:
        raise ValueError(f"unknown node {v}")
    if k < 0:
        raise ValueError("depth must be nonnegative")
    adj = g.adjacency()

    def build(u: int, r: int) -> TreeNode:
        kids = tuple(build(w, r - 1) for w in adj[u]) if r > 0 else ()
        return TreeNode(node=u, label=g.labels[u], children=kids)

    return UnfoldingTree(root=build(v, k), depth=k)


def tree_canonical(tree: UnfoldingTree | TreeNode) -> bytes:
    """Canonical byte code of a rooted labeled tree.

    Children are encoded in sorted order, so two trees get equal codes
    exactly when they are isomorphic as rooted labeled trees.
    """
    node = tree.root if isinstance(tree, UnfoldingTree) else tree

    def go(t: TreeNode) -> bytes:
        if not t.children:
            return b"(" + str(t.label).encode() + b")"
        kids = sorted(go(c) for c in t.children)
        return b"(" + str(t.label).encode() + b"|" + b",".join(kids) + b")"

    return go(node)


def unfolding_code_levels(g: Graph, k: int) -> list[list[bytes]]:
    """Canonical codes of every node's unfolding tree, for depths 0..k.

    Computed bottom-up with one code per (node, depth), which matches
    tree_canonical(unfolding_tree(g, v, depth)) byte for byte.
    """
    if k < 0:
        raise ValueError("depth must be nonnegative")
    adj = g.adjacency()
    leaf = [b"(" + str(l).encode() + b")" for l in g.labels]
    levels = [list(leaf)]
    prev = leaf
    for _ in range(k):
        cur = []
        for v in range(g.n):
            if adj[v]:
                cur.append(b"(" + str(g.labels[v]).encode() + b"|"
                           + b",".join(sorted(prev[u] for u in adj[v])) + b")")
            else:
                cur.append(leaf[v])
        levels.append(cur)
        prev = cur
    return levels


def unfolding_codes(g: Graph, k: int) -> tuple[bytes, ...]:
    return tuple(unfolding_code_levels(g, k)[-1])


# ---------------------------------------------------------------------------
# color refinement


@dataclass(frozen=True)
class WLColoring:
    """Per-round color arrays; ``stabilization`` is the first round whose
    partition repeats the previous one (None if not reached)."""

    rounds: tuple[tuple[int, ...], ...]
    stabilization: int | None

    @property
    def final(self) -> tuple[int, ...]:
        return self.rounds[-1]


def _canonical_indices(signatures: Sequence) -> tuple[int, ...]:
    order = {s: i for i, s in enumerate(sorted(set(signatures)))}
    return tuple(order[s] for s in signatures)


def wl_refine(g: Graph, rounds: int) -> WLColoring:
    """Color refinement from the node labels.

    Round t+1 colors are canonical indices of the signatures
    (color_t(v), sorted colors of the neighbors); including the
    previous color makes partitions refine monotonically.
    """
    if rounds < 0:
        raise ValueError("rounds must be nonnegative")
    adj = g.adjacency()
    colors = _canonical_indices(g.labels)
    out = [colors]
    stab = None
    for r in range(1, rounds + 1):
        sigs = [(colors[v], tuple(sorted(colors[u] for u in adj[v])))
                for v in range(g.n)]
        new = _canonical_indices(sigs)
        if stab is None and new == colors:
            stab = r
        colors = new
        out.append(colors)
    return WLColoring(rounds=tuple(out), stabilization=stab)


def partition_ids(seq: Sequence) -> list[int]:
    """Order-of-first-occurrence normal form of a partition-by-value."""
    d: dict = {}
    return [d.setdefault(x, len(d)) for x in seq]


def wl_equals_unfolding(g: Graph, k: int) -> bool:
    """Round-k refinement partition == depth-k unfolding-code partition."""
    wl = wl_refine(g, k)
    codes = unfolding_codes(g, k)
    return partition_ids(wl.rounds[k]) == partition_ids(codes)


# ---------------------------------------------------------------------------
# graph comparison


@dataclass(frozen=True)
class ComparisonResult:
    distinguishable: bool
    depth: int
    evidence: dict

    def to_json(self) -> dict:
        return {"distinguishable": self.distinguishable, "depth": self.depth,
                "evidence": self.evidence}


def compare_graphs(g1: Graph, g2: Graph, k: int) -> ComparisonResult:
    """Compare the multisets of depth-k unfolding-tree codes.

    Equal multisets mean the graphs are indistinguishable by depth-k
    unfolding trees (equivalently by k rounds of color refinement);
    the evidence then carries the shared code histogram.  Otherwise it
    names a code with differing multiplicities.
    """
    c1 = Counter(code.decode() for code in unfolding_codes(g1, k))
    c2 = Counter(code.decode() for code in unfolding_codes(g2, k))
    if c1 == c2:
        return ComparisonResult(
            distinguishable=False, depth=k,
            evidence={"histogram": {c: c1[c] for c in sorted(c1)}})
    diff = sorted(c for c in (set(c1) | set(c2)) if c1[c] != c2[c])[0]
    return ComparisonResult(
        distinguishable=True, depth=k,
        evidence={"code": diff, "count_first": c1[diff],
                  "count_second": c2[diff]})


# ---------------------------------------------------------------------------
# input formats


def load_graph(source) -> Graph:
    """Read a graph from JSON or a whitespace edge list.

    JSON shape: {"n": count, "edges": [[u, v], ...], "labels": [...]}
    with 0-based nodes.  Edge-list files hold one "u v" pair per line
    ('#' comments allowed); the node count is the largest index + 1.
    """
    text = None
    if isinstance(source, dict):
        obj = source
    else:
        text = _read_source(source)
        stripped = text.lstrip()
        obj = json.loads(text) if stripped.startswith("{") else None
    if obj is not None:
        try:
            return Graph(n=int(obj["n"]),
                         edges=tuple(tuple(e) for e in obj.get("edges", [])),
                         labels=tuple(obj.get("labels", ())))
        except (KeyError, TypeError) as e:
            raise ValueError(f"malformed graph document: {e}") from e
    edges = []
    top = -1
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"bad edge line {line!r}")
        u, v = int(parts[0]), int(parts[1])
        edges.append((u, v))
        top = max(top, u, v)
    if top < 0:
        raise ValueError("edge list holds no edges; use JSON for node-only graphs")
    return Graph(n=top + 1, edges=tuple(edges))

"""Finite marked spaces, open covers and cover-sequence axioms.

The model is deliberately combinatorial.  An open set is identified
with the set of marked points it contains plus an opaque id; every
functor in this package (skyscraper section spaces and their Hom
variants) only sees membership, so set intersection stands in for
topological intersection.  This is the one modelling assumption of the
library: two covers with identical memberships are interchangeable for
every check performed here, independent of the ambient geometry.

Point indices are 1-based throughout, matching the JSON interchange
format.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

_STRUCTURE_KINDS = ("grid", "graph", "line", "abstract")


@dataclass(frozen=True)
class MarkedSpace:
    """A space carrying finitely many marked points with fiber dimensions.

    ``structure`` is a geometry tag: ``("grid", rows, cols)``,
    ``("graph", edges)``, ``("line",)`` or ``("abstract",)``.  It is
    carried for builders and reports only; no check depends on it.
    """

    n_points: int
    fiber_dims: tuple[int, ...]
    structure: tuple = ("abstract",)

    def __post_init__(self):
        if self.n_points < 1:
            raise ValueError("a marked space needs at least one point")
        object.__setattr__(self, "fiber_dims", tuple(int(d) for d in self.fiber_dims))
        if len(self.fiber_dims) != self.n_points:
            raise ValueError("fiber_dims length must equal n_points")
        if any(d < 1 for d in self.fiber_dims):
            raise ValueError("fiber dimensions must be positive")
        if self.structure[0] not in _STRUCTURE_KINDS:
            raise ValueError(f"unknown structure kind {self.structure[0]!r}")
        if self.structure[0] == "grid":
            _, rows, cols = self.structure
            if rows * cols != self.n_points:
                raise ValueError("grid shape does not match n_points")

    @property
    def points(self) -> range:
        return range(1, self.n_points + 1)

    @property
    def total_dim(self) -> int:
        return sum(self.fiber_dims)


@dataclass(frozen=True)
class OpenSet:
    """An open set, identified by id and by the marked points it contains."""

    id: str
    members: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(int(p) for p in self.members))
        if any(p < 1 for p in self.members):
            raise ValueError("point indices are 1-based")




@dataclass(frozen=True)
class Cover:
    """An ordered family of open sets over a marked space.

    ``covered`` is the union of memberships; it may be a proper subset
    of the space's points (collections are not forced to cover).
    """

    space: MarkedSpace
    elements: tuple[OpenSet, ...]
    covered: frozenset[int] = field(default=frozenset())

    def __post_init__(self):
        if not self.elements:
            raise ValueError("a cover needs at least one element")
        union: set[int] = set()
        for el in self.elements:
            bad = [p for p in el.members if p > self.space.n_points]
            if bad:
                raise ValueError(f"element {el.id} references unknown points {bad}")
            union |= el.members
        object.__setattr__(self, "covered", frozenset(union))
        ids = [el.id for el in self.elements]
        if len(set(ids)) != len(ids):
            raise ValueError("cover element ids must be distinct")

    def memberships(self) -> tuple[frozenset[int], ...]:
        return tuple(el.members for el in self.elements)


def make_cover(space: MarkedSpace, memberships: Sequence[Iterable[int]],
               prefix: str = "U") -> Cover:
    """Build a cover with positional element ids (deterministic output)."""
    if len(memberships) == 0:
        raise ValueError("empty element list")
    els = tuple(OpenSet(id=f"{prefix}{i}", members=frozenset(m))
                for i, m in enumerate(memberships))
    return Cover(space=space, elements=els)


@dataclass(frozen=True)
class Nerve:
    """Intersection data of a cover.

    ``faces`` maps a sorted tuple of element indices S (|S| <= max_order)
    to the membership set of the intersection of those elements.
    """

    cover: Cover
    max_order: int
    faces: Mapping[tuple[int, ...], frozenset[int]]


def nerve(cover: Cover, max_order: int | None = None) -> Nerve:
    n = len(cover.elements)
    if max_order is None:
        max_order = n
    if max_order < 1:
        raise ValueError("max_order must be at least 1")
    max_order = min(max_order, n)
    sets = cover.memberships()
    faces: dict[tuple[int, ...], frozenset[int]] = {}
    for size in range(1, max_order + 1):
        for combo in itertools.combinations(range(n), size):
            inter = sets[combo[0]]
            for i in combo[1:]:
                inter = inter & sets[i]
            faces[combo] = inter
    return Nerve(cover=cover, max_order=max_order, faces=faces)


@dataclass(frozen=True)
class CoverSequence:
    """Stages [C_0, ..., C_m, C_global] of a layered cover refinement.

    Stage 0 must isolate the marked points (element i contains point i
    and nothing else, in point order); the final stage is the single
    open set containing every point.
    """

    space: MarkedSpace
    stages: tuple[Cover, ...]

    def __post_init__(self):
        if len(self.stages) < 2:
            raise ValueError("a cover sequence needs at least two stages")
        first = self.stages[0]
        want = [frozenset({p}) for p in self.space.points]
        if list(first.memberships()) != want:
            raise ValueError("stage 0 must consist of the point singletons in order")
        last = self.stages[-1]
        if len(last.elements) != 1 or last.elements[0].members != frozenset(self.space.points):
            raise ValueError("final stage must be the single global open set")
        for c in self.stages:
            if c.space.n_points != self.space.n_points:
                raise ValueError("all stages must live over the same space")


def singleton_stage(space: MarkedSpace) -> Cover:
    return make_cover(space, [[p] for p in space.points])


def global_stage(space: MarkedSpace) -> Cover:
    return make_cover(space, [list(space.points)])


@dataclass(frozen=True)
class StageAxioms:
    """Axiom verdicts for one consecutive stage pair (C_{n-1} -> C_n).

    ``stage`` is n (1-based pair index).  Witness fields record the
    first violating index per axiom, or a supporting witness where one
    exists (``uncovered_point`` for locality).
    """

    stage: int
    locality: bool
    strictness: bool
    non_triviality: bool
    distinctness: bool
    sizes: tuple[int, int]
    uncovered_point: int | None = None
    non_triviality_failure: int | None = None
    distinctness_failure: tuple[int, int] | None = None

    @property
    def all_hold(self) -> bool:
        return self.locality and self.strictness and self.non_triviality and self.distinctness


@dataclass(frozen=True)
class AxiomReport:
    stages: tuple[StageAxioms, ...]
    all_hold: bool

    def to_json(self) -> dict:
        return {
            "all_hold": self.all_hold,
            "stages": [
                {
                    "stage": s.stage,
                    "locality": s.locality,
                    "strictness": s.strictness,
                    "non_triviality": s.non_triviality,
                    "distinctness": s.distinctness,
                    "sizes": list(s.sizes),
                    "uncovered_point": s.uncovered_point,
                    "non_triviality_failure": s.non_triviality_failure,
                    "distinctness_failure": list(s.distinctness_failure)
                    if s.distinctness_failure is not None else None,
                }
                for s in self.stages
            ],
        }


def _union(sets: Iterable[frozenset[int]]) -> frozenset[int]:
    out: frozenset[int] = frozenset()
    for s in sets:
        out = out | s
    return out


def has_proper_union(target: frozenset[int],
                      prev: Sequence[frozenset[int]]) -> bool:
    """Is ``target`` the union of a proper subfamily of ``prev``?

    The candidate family is the maximal one (every previous element
    contained in the target); a proper subfamily with the same union
    exists iff the candidates reproduce the target and either do not
    exhaust ``prev`` or contain a redundant member.
    """
    cands = [i for i, s in enumerate(prev) if s <= target]
    if _union(prev[i] for i in cands) != target:
        return False
    if len(cands) < len(prev):
        return True
    for drop in cands:
        if _union(prev[i] for i in cands if i != drop) == target:
            return True
    return False


def check_na_axioms(seq: CoverSequence) -> AxiomReport:
    """Check the four neighborhood-aggregation axioms per stage pair.

    For each consecutive pair (C_{n-1}, C_n):

    1. locality: some marked point lies outside every element of C_n;
    2. strictness: C_{n-1} has strictly more elements than C_n;
    3. non-triviality: each element of C_n is the union of a proper
       subfamily of C_{n-1} elements (checked on membership sets);
    4. distinctness: membership sets of C_n are pairwise distinct.

    The final pair (into the global stage) is included; it can never
    satisfy locality.
    """
    if len(seq.stages) < 2:
        raise ValueError("sequence shorter than 2 stages")
    points = frozenset(seq.space.points)
    out = []
    for n in range(1, len(seq.stages)):
        prev = seq.stages[n - 1].memberships()
        cur = seq.stages[n].memberships()

        covered = _union(cur)
        missing = sorted(points - covered)
        locality = bool(missing)

        strictness = len(prev) > len(cur)

        nt_fail = None
        for i, m in enumerate(cur):
            if not has_proper_union(m, prev):
                nt_fail = i
                break
        non_triviality = nt_fail is None

        dup = None
        seen: dict[frozenset[int], int] = {}
        for i, m in enumerate(cur):
            if m in seen:
                dup = (seen[m], i)
                break
            seen[m] = i
        distinctness = dup is None

        out.append(StageAxioms(
            stage=n,
            locality=locality,
            strictness=strictness,
            non_triviality=non_triviality,
            distinctness=distinctness,
            sizes=(len(prev), len(cur)),
            uncovered_point=missing[0] if missing else None,
            non_triviality_failure=nt_fail,
            distinctness_failure=dup,
        ))
    stages = tuple(out)
    return AxiomReport(stages=stages, all_hold=all(s.all_hold for s in stages))


def structure_from_json(obj: dict) -> tuple:
    kind = obj.get("kind", "abstract")
    if kind == "grid":
        return ("grid", int(obj["rows"]), int(obj["cols"]))
    if kind == "graph":
        return ("graph", tuple(tuple(int(x) for x in e) for e in obj.get("edges", [])))
    if kind == "line":
        return ("line",)
    if kind == "abstract":
        return ("abstract",)
    raise ValueError(f"unknown structure kind {kind!r}")


def _read_source(source) -> str:
    """Return file contents when ``source`` is an existing path, else the
    text itself.  Inline documents can exceed the filesystem name limit,
    so a failing stat means "not a path"."""
    p = Path(source)
    try:
        is_file = p.exists()
    except OSError:
        is_file = False
    return p.read_text() if is_file else str(source)


def load_space_document(source) -> tuple[MarkedSpace, list[Cover]]:
    """Read a space plus covers from a JSON document.

    Expected shape::

        {"n_points": N, "fiber_dims": [l1, ..., lN],
         "structure": {"kind": ...},
         "covers": [[[1, 2], [2, 3]], ...]}

    Point indices are 1-based.  ``source`` may be a path, a JSON string
    or an already-decoded dict.
    """
    if isinstance(source, (str, Path)):
        text = _read_source(source)
        obj = json.loads(text)
    else:
        obj = source
    if not isinstance(obj, dict):
        raise ValueError("space document must be a JSON object")
    try:
        n = int(obj["n_points"])
        fibers = tuple(int(x) for x in obj["fiber_dims"])
    except (KeyError, TypeError, ValueError) as e:
        raise ValueError(f"malformed space document: {e}") from e
    structure = structure_from_json(obj.get("structure", {"kind": "abstract"}))
    space = MarkedSpace(n_points=n, fiber_dims=fibers, structure=structure)
    covers = []
    for fam in obj.get("covers", []):
        covers.append(make_cover(space, [list(map(int, m)) for m in fam]))
    return space, covers

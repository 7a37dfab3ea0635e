"""Cech complexes and exactness checks for Hom section spaces.

The linear sections over an open set U form Hom(R^{d_U}, R^k), of
dimension k * d_U; restriction along U inside V is precomposition with
zero padding, which on matrices is column selection.  All coboundary
matrices therefore have entries in {-1, 0, 1} and ranks are certified
exactly over the integers, with a floating SVD kept as a cross-check.

Restrictions here are surjective for every nested pair (column
selection hits every coordinate), which is the flasque property; on a
finite cover this forces all higher cohomology to vanish, and the
checks below verify that with honest linear algebra rather than by
appeal to the general fact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._linalg import exact_rank, float_rank
from .topology import Cover, OpenSet
from .sections import open_set_dim, slot_layout


@dataclass(frozen=True)
class HomSpace:
    """The space of linear sections over an open set: k x d_U matrices."""

    open_set: OpenSet
    fibers: tuple[int, ...]
    k: int

    @property
    def d(self) -> int:
        return open_set_dim(self.open_set.members, self.fibers)

    @property
    def dim(self) -> int:
        return self.k * self.d


def restriction_matrix(big: OpenSet, small: OpenSet, fibers: Sequence[int],
                       k: int) -> np.ndarray:
    """Matrix of Hom(R^{d_big}, R^k) -> Hom(R^{d_small}, R^k).

    Acts on row-major flattened matrices; it is a 0/1 column-selection
    operator of shape (k*d_small) x (k*d_big).  An empty ``small`` gives
    the unique map to the zero space (0 rows).
    """
    if not small.members <= big.members:
        raise ValueError("restriction requires the small set inside the big one")
    d_big = open_set_dim(big.members, fibers)
    d_small = open_set_dim(small.members, fibers)
    big_slots = slot_layout(big.members, fibers)
    cols: list[int] = []
    for p in sorted(small.members):
        cols.extend(big_slots[p])
    out = np.zeros((k * d_small, k * d_big), dtype=np.int64)
    for r in range(k):
        for t, c in enumerate(cols):
            out[r * d_small + t, r * d_big + c] = 1
    return out


@dataclass(frozen=True)
class CechComplex:
    """Cochain data of the Hom sections on a cover.

    ``blocks[q]`` lists the sorted element-index tuples of size q+1 in
    lexicographic order, ``dims[q]`` the total cochain dimension, and
    ``coboundaries[q]`` the matrix C^q -> C^{q+1}.
    """

    cover: Cover
    fibers: tuple[int, ...]
    k: int
    blocks: tuple[tuple[tuple[int, ...], ...], ...]
    dims: tuple[int, ...]
    coboundaries: tuple[np.ndarray, ...]


def _face_members(memberships, combo) -> frozenset[int]:
    out = memberships[combo[0]]
    for i in combo[1:]:
        out = out & memberships[i]
    return out


def build_cech_complex(cover: Cover, fibers: Sequence[int], k: int,
                       max_degree: int) -> CechComplex:
    """Assemble cochain spaces and coboundaries up to C^{max_degree+1}.

    Degrees beyond the cover size contribute zero spaces, so requesting
    a high degree is safe.
    """
    fibers = tuple(int(f) for f in fibers)
    memberships = cover.memberships()
    n = len(memberships)
    top = max_degree + 1

    blocks: list[tuple[tuple[int, ...], ...]] = []
    dims: list[int] = []
    offsets: list[dict[tuple[int, ...], int]] = []
    face_dims: list[dict[tuple[int, ...], int]] = []
    for q in range(top + 1):
        combos = tuple(itertools.combinations(range(n), q + 1))
        off: dict[tuple[int, ...], int] = {}
        fd: dict[tuple[int, ...], int] = {}
        pos = 0
        for c in combos:
            d = open_set_dim(_face_members(memberships, c), fibers)
            off[c] = pos
            fd[c] = d
            pos += k * d
        blocks.append(combos)
        dims.append(pos)
        offsets.append(off)
        face_dims.append(fd)

    def face_open(combo) -> OpenSet:
        return OpenSet(id="::".join(str(i) for i in combo) or "empty",
                       members=_face_members(memberships, combo))

    deltas: list[np.ndarray] = []
    for q in range(top):
        mat = np.zeros((dims[q + 1], dims[q]), dtype=np.int64)
        for T in blocks[q + 1]:
            t_open = face_open(T)
            for t in range(len(T)):
                S = T[:t] + T[t + 1:]
                block = restriction_matrix(face_open(S), t_open, fibers, k)
                sign = 1 if t % 2 == 0 else -1
                r0, c0 = offsets[q + 1][T], offsets[q][S]
                mat[r0:r0 + block.shape[0], c0:c0 + block.shape[1]] += sign * block
        deltas.append(mat)

    return CechComplex(cover=cover, fibers=fibers, k=k,
                       blocks=tuple(blocks[:top + 1]), dims=tuple(dims[:top + 1]),
                       coboundaries=tuple(deltas))


def cech_cohomology(cover: Cover, fibers: Sequence[int], k: int,
                    max_degree: int = 1) -> list[int]:
    """Dimensions h^0..h^max_degree, via exact integer ranks.

    h^q = dim ker(delta_q) - rank(delta_{q-1}).
    """
    cx = build_cech_complex(cover, fibers, k, max_degree)
    ranks = [exact_rank(d) if d.size else 0 for d in cx.coboundaries]
    out = []
    for q in range(max_degree + 1):
        ker = cx.dims[q] - ranks[q]
        im = ranks[q - 1] if q > 0 else 0
        out.append(ker - im)
    return out


@dataclass(frozen=True)
class ExactnessReport:
    """Result of the two-sided section-space axiom check on one cover."""

    cover_id: str
    dim_global: int
    dim_product: int
    dim_pairwise: int
    rank_restriction: int
    rank_delta0: int
    injective: bool
    exact_middle: bool
    composition_zero: bool
    cosheaf_coker_dim: int
    passed: bool

    def to_json(self) -> dict:
        return {
            "cover_id": self.cover_id,
            "dims": [self.dim_global, self.dim_product, self.dim_pairwise],
            "rank_restriction": self.rank_restriction,
            "rank_delta0": self.rank_delta0,
            "injective": self.injective,
            "exact_middle": self.exact_middle,
            "composition_zero": self.composition_zero,
            "cosheaf_coker_dim": self.cosheaf_coker_dim,
            "passed": self.passed,
        }


def _global_open(cover: Cover) -> OpenSet:
    return OpenSet(id="union", members=cover.covered)


def sheaf_axiom_check(cover: Cover, fibers: Sequence[int], k: int) -> ExactnessReport:
    """Verify both halves of the gluing axiom for Hom sections.

    Checks that the joint restriction to the cover elements is
    injective, that its image is exactly the kernel of the pairwise
    difference map, and (for the extension direction) that the sum of
    zero-padded inclusions surjects onto the sections over the union.
    """
    fibers = tuple(int(f) for f in fibers)
    memberships = cover.memberships()
    U = _global_open(cover)
    d_U = open_set_dim(U.members, fibers)

    res_blocks = [restriction_matrix(U, el, fibers, k) for el in cover.elements]
    dim_product = sum(b.shape[0] for b in res_blocks)
    first = np.zeros((dim_product, k * d_U), dtype=np.int64)
    pos = 0
    for b in res_blocks:
        first[pos:pos + b.shape[0]] = b
        pos += b.shape[0]

    cx = build_cech_complex(cover, fibers, k, max_degree=1)
    delta0 = cx.coboundaries[0]
    dim_pairwise = cx.dims[1]

    rank_first = exact_rank(first) if first.size else 0
    rank_delta0 = exact_rank(delta0) if delta0.size else 0

    injective = rank_first == k * d_U
    comp = delta0 @ first if (delta0.size and first.size) else np.zeros((1, 1), dtype=np.int64)
    composition_zero = not np.any(comp)
    kernel_mid = dim_product - rank_delta0
    exact_middle = composition_zero and kernel_mid == rank_first

    # extension direction: matrices over each element, zero padded into
    # Hom over the union; surjective iff the stacked map has full rank.
    ext = first.T  # transpose of column selection is the zero-padding inclusion
    rank_ext = exact_rank(ext) if ext.size else 0
    coker = k * d_U - rank_ext

    passed = injective and exact_middle and coker == 0
    return ExactnessReport(
        cover_id=";".join(el.id for el in cover.elements),
        dim_global=k * d_U,
        dim_product=dim_product,
        dim_pairwise=dim_pairwise,
        rank_restriction=rank_first,
        rank_delta0=rank_delta0,
        injective=injective,
        exact_middle=exact_middle,
        composition_zero=composition_zero,
        cosheaf_coker_dim=coker,
        passed=passed,
    )


def flasque_check(fibers: Sequence[int], k: int,
                  pairs: Sequence[tuple[OpenSet, OpenSet]]) -> list[bool]:
    """Check surjectivity of restriction for nested pairs (big, small).

    Surjectivity is full row rank of the restriction matrix; the rank
    is certified exactly.
    """
    out = []
    for big, small in pairs:
        m = restriction_matrix(big, small, fibers, k)
        rank = exact_rank(m) if m.size else 0
        out.append(rank == m.shape[0])
    return out


def rank_cross_check(matrix, tol: float = 1e-9) -> tuple[int, int]:
    """Exact and floating ranks of a matrix, for agreement tests."""
    return exact_rank(matrix), float_rank(matrix, tol=tol)


def hom_report_json(cover_index: int, h: list[int], dims: list[int]) -> dict:
    """Cohomology report entry: {"cover_id", "h", "dims", "exact"}."""
    return {"cover_id": cover_index, "h": h, "dims": dims,
            "exact": all(x == 0 for x in h[1:])}

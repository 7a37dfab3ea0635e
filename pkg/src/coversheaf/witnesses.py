"""Witness generators: concrete certificates for the structural claims.

Every generator produces a WitnessReport whose ``claim`` field is a
stable report identifier (part of the CLI wire format).  Reports carry
the measured quantities alongside the verdict so that a failing run is
diagnosable from the JSON alone.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from ._linalg import nullspace_basis
from .topology import Cover, Nerve, OpenSet, has_proper_union
from .sections import (Const, Section, Sum, affine_section, compose_coord,
                       evaluate, mixed_difference, open_set_dim,
                       polynomial_coefficients, polynomial_section,
                       product_counterexample, projection_map, sections_equal,
                       slot_layout, zero_pad_map, zero_section, ACTIVATIONS)
from .network import (ForwardResult, InclusionLayer, Network, build_cnn,
                      forward)

CLAIM_IDS = ("prop2.8-locality", "prop2.8-surjectivity", "rem2.9-glue",
             "rem2.9-kernel", "thm4.1", "thm4.2", "thm4.3")


def _plain(obj):
    """Make a value JSON-serializable (Fractions as strings, arrays as lists)."""
    if isinstance(obj, Fraction):
        return str(obj)
    # bool subclasses int, so it must be matched first
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_plain(x) for x in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [_plain(x) for x in obj]
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, str) or obj is None:
        return obj
    return str(obj)


@dataclass(frozen=True)
class WitnessReport:
    claim: str
    verdict: bool
    inputs: dict
    measured: dict
    seed: int | None = None

    def __post_init__(self):
        if self.claim not in CLAIM_IDS:
            raise ValueError(f"unknown claim id {self.claim!r}")

    def to_json(self) -> dict:
        return {"schema": 1, "claim": self.claim, "verdict": self.verdict,
                "seed": self.seed, "inputs": _plain(self.inputs),
                "measured": _plain(self.measured)}


def _union_open(cover: Cover) -> OpenSet:
    return OpenSet(id="union", members=cover.covered)


def _qualifying(cover: Cover) -> None:
    for el in cover.elements:
        if not (cover.covered - el.members):
            raise ValueError(
                f"element {el.id} contains every covered point; "
                "the locality witness needs each element to miss one")


# ---------------------------------------------------------------------------
# locality and surjectivity failure


def locality_witness(cover: Cover, fibers: Sequence[int], k: int,
                     n_samples: int = 100, seed: int = 0
                     ) -> tuple[Section, WitnessReport]:
    """The coordinate-product section and its restriction-to-zero audit.

    Returns h with h(y) = (prod of all coordinates, ..., k times) over
    the union, checks that it restricts to the exactly-zero section on
    every cover element, and exhibits a second global section g such
    that g and g + h restrict identically everywhere yet differ at the
    all-ones input.
    """
    _qualifying(cover)
    U = _union_open(cover)
    d_U = open_set_dim(U.members, fibers)
    h = product_counterexample(U, fibers, k)

    restriction_devs = []
    for el in cover.elements:
        r = compose_coord(h, zero_pad_map(fibers, el, U))
        res = sections_equal(r, zero_section(r.domain_dim, k),
                             n_samples=n_samples, tol=0.0, seed=seed)
        restriction_devs.append(res.max_deviation)

    ones = np.ones(d_U)
    h_ones = float(np.max(np.abs(evaluate(h, ones))))

    g = affine_section(np.ones((k, d_U)), domain=U)
    gh = Section(domain_dim=d_U, codomain_dim=k,
                 body=Sum((g.body, h.body)), domain=U)
    pair_devs = []
    for el in cover.elements:
        pad = zero_pad_map(fibers, el, U)
        res = sections_equal(compose_coord(g, pad), compose_coord(gh, pad),
                             n_samples=n_samples, tol=0.0, seed=seed)
        pair_devs.append(res.max_deviation)
    global_diff = float(np.max(np.abs(evaluate(gh, ones) - evaluate(g, ones))))

    verdict = (max(restriction_devs) == 0.0 and h_ones == 1.0
               and max(pair_devs) == 0.0 and global_diff == 1.0)
    report = WitnessReport(
        claim="prop2.8-locality", verdict=verdict, seed=seed,
        inputs={"memberships": [sorted(el.members) for el in cover.elements],
                "fibers": list(fibers), "k": k, "n_samples": n_samples},
        measured={"restriction_deviations": restriction_devs,
                  "h_at_ones_norm": h_ones,
                  "pair_restriction_deviations": pair_devs,
                  "global_difference_at_ones": global_diff})
    return h, report


def multi_mixed_difference(section: Section, slots: Sequence[int], base,
                           h: float) -> np.ndarray:
    """Alternating finite difference over several coordinates at once.

    sum over subsets T of slots of (-1)^(|slots|-|T|) f(base + h on T).
    Zero for any sum of terms each missing one of the slots.
    """
    slots = list(slots)
    if len(set(slots)) != len(slots):
        raise ValueError("slots must be distinct")
    b = np.asarray(base, dtype=float)
    pts = []
    signs = []
    for r in range(len(slots) + 1):
        for T in itertools.combinations(slots, r):
            p = b.copy()
            for s in T:
                p[s] += h
            pts.append(p)
            signs.append((-1) ** (len(slots) - r))
    vals = evaluate(section, np.stack(pts))
    return sum(s * v for s, v in zip(signs, vals))


def _seeded_polynomial(domain_dim: int, k: int, rng, max_degree: int = 2,
                       n_terms: int = 3) -> Section:
    """A random polynomial section with small integer coefficients."""
    coeffs = [dict() for _ in range(k)]
    for _ in range(n_terms):
        mono = [0] * domain_dim
        for _ in range(int(rng.integers(0, max_degree + 1))):
            mono[int(rng.integers(0, domain_dim))] += 1
        key = tuple(mono)
        for s in range(k):
            c = int(rng.integers(-3, 4))
            if c:
                coeffs[s][key] = coeffs[s].get(key, Fraction(0)) + c
    for s in range(k):
        coeffs[s] = {m: c for m, c in coeffs[s].items() if c}
    return polynomial_section(domain_dim, k, coeffs)


def surjectivity_witness(cover: Cover, fibers: Sequence[int], k: int,
                         n_trials: int = 20, seed: int = 0) -> WitnessReport:
    """No sum of per-element pullbacks can equal the coordinate product.

    Any section of the form sum_alpha g_alpha(projection to U_alpha)
    has vanishing alternating difference over one slot per covered
    point, because each term misses at least one point.  The product
    section has alternating difference exactly 1, so it lies outside
    the image of the extension sum.  The vanishing is demonstrated on
    seeded random separable sections; the product value is exact.
    """
    _qualifying(cover)
    U = _union_open(cover)
    d_U = open_set_dim(U.members, fibers)
    layout = slot_layout(U.members, fibers)
    probe_slots = [r[0] for r in layout.values()]

    # base: ones everywhere except the probed slots, so the only nonzero
    # term of the alternating sum is the all-slots-bumped product = 1
    base = np.ones(d_U)
    base[probe_slots] = 0.0
    h = product_counterexample(U, fibers, k)
    target = multi_mixed_difference(h, probe_slots, base, 1.0)
    target_val = float(np.max(np.abs(target)))

    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_trials):
        parts = []
        for el in cover.elements:
            d_a = open_set_dim(el.members, fibers)
            if d_a == 0:
                continue  # constants have zero alternating difference
            g = _seeded_polynomial(d_a, k, rng)
            parts.append(compose_coord(g, projection_map(fibers, U, el)).body)
        if not parts:
            continue
        sep = Section(domain_dim=d_U, codomain_dim=k,
                      body=parts[0] if len(parts) == 1 else Sum(tuple(parts)))
        diff = multi_mixed_difference(sep, probe_slots, base, 1.0)
        worst = max(worst, float(np.max(np.abs(diff))))

    verdict = target_val == 1.0 and worst <= 1e-9
    return WitnessReport(
        claim="prop2.8-surjectivity", verdict=verdict, seed=seed,
        inputs={"memberships": [sorted(el.members) for el in cover.elements],
                "fibers": list(fibers), "k": k, "n_trials": n_trials},
        measured={"product_alternating_difference": target_val,
                  "max_separable_alternating_difference": worst,
                  "probe_slots": probe_slots})


# ---------------------------------------------------------------------------
# gluing


class IncompatibleLocalsError(ValueError):
    """Raised when local sections disagree on an overlap."""

    def __init__(self, pair: tuple[int, int], deviation: float):
        self.pair = pair
        self.deviation = deviation
        super().__init__(
            f"locals {pair[0]} and {pair[1]} disagree on their overlap "
            f"(max deviation {deviation:.3e})")


def _negate(section: Section) -> Section:
    k = section.codomain_dim
    m = tuple(tuple(-1.0 if i == j else 0.0 for j in range(k)) for i in range(k))
    from .sections import Affine
    return Section(domain_dim=section.domain_dim, codomain_dim=k,
                   body=Affine(m, (0.0,) * k, section.body),
                   domain=section.domain)


def glue_inclusion_exclusion(locals_: Sequence[Section], cover: Cover,
                             nerve: Nerve | None = None,
                             tol: float = 1e-9, n_samples: int = 100,
                             seed: int = 0) -> Section:
    """Glue pairwise-compatible locals by inclusion-exclusion over faces.

    The glued section is the alternating sum, over nonempty element
    subsets S, of the common restriction to the face of S extended by
    projection pullback to the union.  Restricting the result back to
    each element (zero-pad precomposition) reproduces the local there.

    Every subset is enumerated, not just those with nonempty-membership
    faces: an empty-membership face carries the constant f(0), and the
    telescoping identity behind the formula needs those constants.  A
    `nerve` argument is validated against the cover but does not prune
    the enumeration.

    Compatibility is checked extensionally on every pairwise overlap,
    including empty-membership overlaps, where both sides must take the
    same value at the zero input.  Incompatible input raises
    IncompatibleLocalsError with the first offending pair (by maximal
    deviation) recorded.
    """
    fibers = cover.space.fiber_dims
    mems = cover.memberships()
    n = len(mems)
    if nerve is not None and nerve.cover is not cover:
        raise ValueError("nerve was built from a different cover")
    if len(locals_) != n:
        raise ValueError("one local section per cover element required")
    ks = {s.codomain_dim for s in locals_}
    if len(ks) != 1:
        raise ValueError("locals must share a codomain dimension")
    for i, s in enumerate(locals_):
        want = open_set_dim(mems[i], fibers)
        if s.domain_dim != want:
            raise ValueError(f"local {i} has domain dim {s.domain_dim}, "
                             f"expected {want}")
    k = ks.pop()

    worst_pair = None
    worst_dev = -1.0
    for i, j in itertools.combinations(range(n), 2):
        w = OpenSet(id=f"overlap{i}.{j}", members=mems[i] & mems[j])
        ri = compose_coord(locals_[i], zero_pad_map(fibers, w, cover.elements[i]))
        rj = compose_coord(locals_[j], zero_pad_map(fibers, w, cover.elements[j]))
        res = sections_equal(ri, rj, n_samples=n_samples, tol=tol, seed=seed)
        if not res.equal and res.max_deviation > worst_dev:
            worst_dev = res.max_deviation
            worst_pair = (i, j)
    if worst_pair is not None:
        raise IncompatibleLocalsError(worst_pair, worst_dev)

    U = _union_open(cover)
    terms = []
    for size in range(1, n + 1):
        for S in itertools.combinations(range(n), size):
            face = mems[S[0]]
            for i in S[1:]:
                face = face & mems[i]
            w = OpenSet(id="face" + ".".join(map(str, S)), members=face)
            f_s = compose_coord(locals_[S[0]],
                                zero_pad_map(fibers, w, cover.elements[S[0]]))
            ext = compose_coord(f_s, projection_map(fibers, U, w))
            terms.append(ext if size % 2 == 1 else _negate(ext))
    body = terms[0].body if len(terms) == 1 else Sum(tuple(t.body for t in terms))
    return Section(domain_dim=open_set_dim(U.members, fibers),
                   codomain_dim=k, body=body, domain=U)


def glue_report(cover: Cover, k: int = 1, tol: float = 1e-9,
                n_samples: int = 100, seed: int = 0) -> WitnessReport:
    """Round-trip gluing audit on a seeded compatible family.

    Builds a hidden polynomial global section, restricts it to the
    cover, reglues, and measures the restriction deviations; then
    perturbs one local on a nonempty overlap and confirms the rejection
    names an overlapping pair.
    """
    fibers = cover.space.fiber_dims
    rng = np.random.default_rng(seed)
    U = _union_open(cover)
    d_U = open_set_dim(U.members, fibers)
    hidden = _seeded_polynomial(d_U, k, rng)
    locals_ = [compose_coord(hidden, zero_pad_map(fibers, el, U))
               for el in cover.elements]
    glued = glue_inclusion_exclusion(locals_, cover, tol=tol,
                                     n_samples=n_samples, seed=seed)
    devs = []
    for el, loc in zip(cover.elements, locals_):
        back = compose_coord(glued, zero_pad_map(fibers, el, U))
        devs.append(sections_equal(back, loc, n_samples=n_samples,
                                   tol=tol, seed=seed).max_deviation)

    # rejection path: bump one local on an overlap
    rejected = None
    overlap_pair = next(
        ((i, j) for i, j in itertools.combinations(range(len(locals_)), 2)
         if cover.elements[i].members & cover.elements[j].members), None)
    if overlap_pair is not None:
        i, _ = overlap_pair
        bumped = list(locals_)
        bumped[i] = Section(
            domain_dim=locals_[i].domain_dim, codomain_dim=k,
            body=Sum((locals_[i].body, Const((1.0,) * k))),
            domain=locals_[i].domain)
        try:
            glue_inclusion_exclusion(bumped, cover, tol=tol,
                                     n_samples=n_samples, seed=seed)
        except IncompatibleLocalsError as e:
            rejected = {"pair": list(e.pair), "deviation": e.deviation,
                        "names_bumped_local": i in e.pair}

    verdict = max(devs) <= tol and (overlap_pair is None or
                                    (rejected is not None and
                                     rejected["names_bumped_local"]))
    return WitnessReport(
        claim="rem2.9-glue", verdict=verdict, seed=seed,
        inputs={"memberships": [sorted(el.members) for el in cover.elements],
                "k": k, "tol": tol, "n_samples": n_samples},
        measured={"restriction_deviations": devs, "rejection": rejected})


# ---------------------------------------------------------------------------
# zero-sum kernel decomposition


class KernelPremiseError(ValueError):
    """Raised when the locals do not form a zero-sum family."""

    def __init__(self, message: str, monomial=None):
        self.monomial = monomial
        super().__init__(message)


def _global_slot_list(members, fibers) -> list[tuple[int, int]]:
    out = []
    for p in sorted(members):
        for off in range(fibers[p - 1]):
            out.append((p, off))
    return out


def cosheaf_kernel_decompose(locals_: Sequence[Section], cover: Cover
                             ) -> dict[tuple[int, int], Section]:
    """Split a zero-sum polynomial family into antisymmetric pairwise parts.

    Input: one polynomial section per cover element whose zero-padded
    extensions sum to zero on the union (checked coefficient-exactly).
    Output: sections f[(i, j)] over the pairwise overlaps, for all
    ordered pairs, with f[(j, i)] = -f[(i, j)] and, for every element
    a, f_a = sum over b of the extension of f[(a, b)] to U_a, exactly
    on coefficients.

    The split works monomial by monomial: the coefficient vectors of a
    monomial across the elements able to carry it sum to zero, so their
    running prefix sums define telescoping pairwise parts supported on
    consecutive overlaps.  A monomial carried by a single element with
    a nonzero coefficient contradicts the premise and is reported.
    """
    fibers = cover.space.fiber_dims
    mems = cover.memberships()
    n = len(mems)
    if len(locals_) != n:
        raise ValueError("one local section per cover element required")
    ks = {s.codomain_dim for s in locals_}
    if len(ks) != 1:
        raise ValueError("locals must share a codomain dimension")
    k = ks.pop()

    slot_lists = [_global_slot_list(m, fibers) for m in mems]
    polys = [polynomial_coefficients(s) for s in locals_]

    # global monomial -> per-element coefficient vectors
    table: dict[tuple, dict[int, list[Fraction]]] = {}
    for a in range(n):
        for out_slot, poly in enumerate(polys[a]):
            for mono, c in poly.items():
                key = tuple(sorted(
                    (slot_lists[a][i], e) for i, e in enumerate(mono) if e))
                vecs = table.setdefault(key, {})
                vec = vecs.setdefault(a, [Fraction(0)] * k)
                vec[out_slot] += c

    pair_coeffs: dict[tuple[int, int], list[dict[tuple, Fraction]]] = {}

    def add_pair(a: int, b: int, key: tuple, vec: list[Fraction]) -> None:
        overlap = mems[a] & mems[b]
        local_slots = {gs: i for i, gs in
                       enumerate(_global_slot_list(overlap, fibers))}
        mono = [0] * len(local_slots)
        for gs, e in key:
            mono[local_slots[gs]] = e
        target = pair_coeffs.setdefault((a, b), [dict() for _ in range(k)])
        for s in range(k):
            if vec[s]:
                m = tuple(mono)
                nv = target[s].get(m, Fraction(0)) + vec[s]
                if nv:
                    target[s][m] = nv
                elif m in target[s]:
                    del target[s][m]

    for key, vecs in table.items():
        total = [Fraction(0)] * k
        for vec in vecs.values():
            for s in range(k):
                total[s] += vec[s]
        if any(total):
            raise KernelPremiseError(
                "extended locals do not sum to zero", monomial=key)
        support = {p for (p, _off), e in key if e}
        allowed = [a for a in range(n) if support <= mems[a]]
        contributors = [a for a, vec in vecs.items() if any(vec)]
        if not contributors:
            continue
        if len(allowed) < 2:
            raise KernelPremiseError(
                "a monomial is supported outside every pairwise overlap",
                monomial=key)
        prefix = [Fraction(0)] * k
        for t in range(len(allowed) - 1):
            vec = vecs.get(allowed[t])
            if vec is not None:
                for s in range(k):
                    prefix[s] += vec[s]
            if any(prefix):
                add_pair(allowed[t], allowed[t + 1], key, list(prefix))

    # exact internal audit: antisymmetry is structural (one orientation is
    # stored); verify the per-element reconstruction before emitting.
    recon: dict[int, list[dict[tuple, Fraction]]] = {
        a: [dict() for _ in range(k)] for a in range(n)}

    def add_global(acc, key, vec, sign):
        for s in range(k):
            if vec[s]:
                nv = acc[s].get(key, Fraction(0)) + sign * vec[s]
                if nv:
                    acc[s][key] = nv
                elif key in acc[s]:
                    del acc[s][key]

    for (a, b), per_out in pair_coeffs.items():
        overlap_slots = _global_slot_list(mems[a] & mems[b], fibers)
        for s in range(k):
            for mono, c in per_out[s].items():
                key = tuple(sorted(
                    (overlap_slots[i], e) for i, e in enumerate(mono) if e))
                vec = [Fraction(0)] * k
                vec[s] = c
                add_global(recon[a], key, vec, 1)
                add_global(recon[b], key, vec, -1)

    for a in range(n):
        want: dict[int, dict[tuple, Fraction]] = {s: {} for s in range(k)}
        for key, vecs in table.items():
            vec = vecs.get(a)
            if vec:
                for s in range(k):
                    if vec[s]:
                        want[s][key] = vec[s]
        got = {s: dict(recon[a][s]) for s in range(k)}
        if want != got:
            raise KernelPremiseError(
                f"internal reconstruction mismatch at element {a}")

    out: dict[tuple[int, int], Section] = {}
    for (a, b), per_out in pair_coeffs.items():
        overlap = OpenSet(id=f"overlap{a}.{b}", members=mems[a] & mems[b])
        d = open_set_dim(overlap.members, fibers)
        out[(a, b)] = polynomial_section(d, k, per_out, domain=overlap)
        neg = [{m: -c for m, c in per_out[s].items()} for s in range(k)]
        out[(b, a)] = polynomial_section(d, k, neg, domain=overlap)
    return out


def kernel_report(cover: Cover, k: int = 1, seed: int = 0,
                  n_pairs: int = 3) -> WitnessReport:
    """Round-trip audit of the pairwise decomposition on seeded data.

    Generates random pairwise polynomials on overlapping pairs, forms
    the induced zero-sum family, decomposes it, and verifies the exact
    invariants (zero sum, antisymmetry, per-element reconstruction).
    """
    fibers = cover.space.fiber_dims
    mems = cover.memberships()
    n = len(mems)
    rng = np.random.default_rng(seed)

    gen: dict[tuple[int, int], list[dict]] = {}
    pairs = [(i, j) for i, j in itertools.combinations(range(n), 2)
             if mems[i] & mems[j]]
    for (i, j) in pairs[:max(n_pairs, 1)]:
        d = open_set_dim(mems[i] & mems[j], fibers)
        sec = _seeded_polynomial(max(d, 1), k, rng) if d else None
        if sec is not None:
            gen[(i, j)] = polynomial_coefficients(sec)

    locals_: list[Section] = []
    for a in range(n):
        acc = [dict() for _ in range(k)]
        d_a = open_set_dim(mems[a], fibers)
        for (i, j), coeffs in gen.items():
            if a not in (i, j):
                continue
            sign = 1 if a == i else -1
            overlap = OpenSet(id=f"w{i}.{j}", members=mems[i] & mems[j])
            sec = polynomial_section(open_set_dim(overlap.members, fibers),
                                     k, coeffs, domain=overlap)
            ext = compose_coord(
                sec, projection_map(fibers, cover.elements[a], overlap))
            ext_coeffs = polynomial_coefficients(ext)
            for s in range(k):
                for mono, c in ext_coeffs[s].items():
                    nv = acc[s].get(mono, Fraction(0)) + sign * c
                    if nv:
                        acc[s][mono] = nv
                    elif mono in acc[s]:
                        del acc[s][mono]
        locals_.append(polynomial_section(d_a, k, acc, domain=cover.elements[a]))

    try:
        family = cosheaf_kernel_decompose(locals_, cover)
        failure = None
    except KernelPremiseError as e:
        family = {}
        failure = str(e)

    antisym = True
    for (a, b), sec in family.items():
        ca = polynomial_coefficients(sec)
        cb = polynomial_coefficients(family[(b, a)])
        for s in range(k):
            for mono, c in ca[s].items():
                if cb[s].get(mono, Fraction(0)) != -c:
                    antisym = False

    verdict = failure is None and antisym
    return WitnessReport(
        claim="rem2.9-kernel", verdict=verdict, seed=seed,
        inputs={"memberships": [sorted(m) for m in mems], "k": k,
                "generator_pairs": [list(p) for p in gen]},
        measured={"pair_count": len(family) // 2, "antisymmetric": antisym,
                  "failure": failure})


# ---------------------------------------------------------------------------
# input indistinguishability (covering-blind global sections)


def pooled_collision(seed: int = 0) -> WitnessReport:
    """Two different images with identical max-pooled network output.

    Builds a max-pooling grid network and permutes the cells inside
    each pooling block; coordinatewise max over a block is invariant
    under such permutations, so the forward outputs coincide exactly
    while the inputs differ.
    """
    net = build_cnn(4, plan=[
        {"kind": "pool", "mode": "max", "block": 2},
        {"kind": "fc", "out_dim": 2, "activation": "sigmoid"},
    ], seed=seed)
    rng = np.random.default_rng(seed)
    x1 = rng.standard_normal(net.input_dim)

    # swap the first and last cell of every 2x2 block
    n = 4
    perm = list(range(n * n))
    for br in range(n // 2):
        for bc in range(n // 2):
            a = (br * 2) * n + (bc * 2)
            b = (br * 2 + 1) * n + (bc * 2 + 1)
            perm[a], perm[b] = perm[b], perm[a]
    channels = net.space.fiber_dims[0]
    x2 = np.empty_like(x1)
    for cell, src in enumerate(perm):
        x2[cell * channels:(cell + 1) * channels] = \
            x1[src * channels:(src + 1) * channels]

    out1 = forward(net, x1).output
    out2 = forward(net, x2).output
    input_gap = float(np.max(np.abs(x1 - x2)))
    output_gap = float(np.max(np.abs(out1 - out2)))
    verdict = input_gap > 0.0 and output_gap == 0.0
    return WitnessReport(
        claim="thm4.1", verdict=verdict, seed=seed,
        inputs={"grid": 4, "pooling": "max", "blocks": "2x2 cell permutation"},
        measured={"input_gap": input_gap, "output_gap": output_gap})


def indistinguishability_report(cover: Cover, fibers: Sequence[int], k: int,
                                seed: int = 0) -> WitnessReport:
    """Distinct global sections with identical element restrictions,
    together with the pooled-image collision demo."""
    _, loc = locality_witness(cover, fibers, k, seed=seed)
    collide = pooled_collision(seed=seed)
    verdict = loc.verdict and collide.verdict
    return WitnessReport(
        claim="thm4.1", verdict=verdict, seed=seed,
        inputs={"cover": loc.inputs, "cnn": collide.inputs},
        measured={"sections": loc.measured, "pooled_images": collide.measured})


# ---------------------------------------------------------------------------
# aggregation-kernel perturbations


@dataclass(frozen=True)
class AttackSpec:
    """A per-input perturbation family for one aggregation layer.

    ``perturbations[alpha]`` is the exact rational vector added after
    phi_alpha; for every output element the perturbations of its
    aggregated inputs sum to zero, so the layer output is unchanged
    while the pre-aggregation representation moves by the stated
    displacement.
    """

    layer_index: int
    p: float
    delta: float
    perturbations: tuple[tuple[Fraction, ...], ...]

    def displacement(self) -> float:
        total = 0.0
        for vec in self.perturbations:
            for v in vec:
                total += abs(float(v)) ** self.p
        return total ** (1.0 / self.p)

    def zero_sum_exact(self, aggregation: Sequence[Sequence[int]]) -> bool:
        width = len(self.perturbations[0]) if self.perturbations else 0
        for atuple in aggregation:
            for s in range(width):
                if sum((self.perturbations[a][s] for a in atuple),
                       Fraction(0)) != 0:
                    return False
        return True

    def to_json(self) -> dict:
        return {"layer_index": self.layer_index, "p": self.p,
                "delta": self.delta,
                "perturbations": [[str(v) for v in vec]
                                  for vec in self.perturbations]}


def _incidence(layer: InclusionLayer) -> np.ndarray:
    rows = len(layer.aggregation)
    cols = len(layer.input_cover.elements)
    m = np.zeros((rows, cols), dtype=np.int64)
    for b, atuple in enumerate(layer.aggregation):
        for a in atuple:
            m[b, a] = 1
    return m


def _offset_layer(layer: InclusionLayer,
                  offsets: Sequence[np.ndarray]) -> InclusionLayer:
    phis = []
    for s, off in zip(layer.phi, offsets):
        phis.append(Section(domain_dim=s.domain_dim, codomain_dim=s.codomain_dim,
                            body=Sum((s.body, Const(tuple(off)))),
                            domain=s.domain))
    return InclusionLayer(input_cover=layer.input_cover,
                          output_cover=layer.output_cover,
                          aggregation=layer.aggregation, phi=tuple(phis),
                          activation=layer.activation, out_dim=layer.out_dim)


def adversarial_attack(net: Network, layer_index: int, p: float = 2.0,
                       delta: float = 1.0, seed: int = 0, n_inputs: int = 20,
                       tol: float = 1e-9) -> tuple[AttackSpec, WitnessReport]:
    """Build and verify a zero-sum perturbation of one aggregation layer.

    The attacked layer must be an InclusionLayer whose stage pair
    strictly shrinks and whose outputs are proper unions (those two
    facts guarantee a positive-dimensional space of valid
    perturbations).  The perturbation is drawn from the exact rational
    null space of the input/output incidence map, scaled by a power of
    two until its p-displacement exceeds delta.

    Verification runs seeded random inputs through the clean and the
    perturbed network: final outputs must agree within tol while the
    pre-aggregation representations move by exactly the stated
    displacement (within 1e-9).
    """
    layer = net.layers[layer_index]
    if not isinstance(layer, InclusionLayer):
        raise ValueError("the attacked layer must factor through inclusions")
    in_mems = layer.input_cover.memberships()
    out_mems = layer.output_cover.memberships()
    if not len(in_mems) > len(out_mems):
        raise ValueError("attack needs a strictly shrinking stage pair")
    for m in out_mems:
        if not has_proper_union(m, in_mems):
            raise ValueError("attack needs proper-union output elements")

    inc = _incidence(layer)
    basis = nullspace_basis(inc)
    if not basis:
        return AttackSpec(layer_index, p, delta, ()), WitnessReport(
            claim="thm4.2", verdict=False, seed=seed,
            inputs={"layer_index": layer_index, "p": p, "delta": delta},
            measured={"failure": "incidence null space is zero; "
                                 "claimed freedom is absent"})

    k1 = layer.out_dim
    rng = np.random.default_rng(seed)
    n_in = len(in_mems)
    m_frac = [[Fraction(0)] * k1 for _ in range(n_in)]
    for vec in basis:
        weights = rng.integers(-3, 4, size=k1)
        for a in range(n_in):
            if vec[a]:
                for s in range(k1):
                    m_frac[a][s] += int(weights[s]) * vec[a]
    if not any(any(v) for v in m_frac):
        for a in range(n_in):
            m_frac[a][0] += basis[0][a]

    spec = AttackSpec(layer_index, p, delta,
                      tuple(tuple(v) for v in m_frac))
    while spec.displacement() <= delta:
        m_frac = [[2 * v for v in vec] for vec in m_frac]
        spec = AttackSpec(layer_index, p, delta,
                          tuple(tuple(v) for v in m_frac))

    zero_sum = spec.zero_sum_exact(layer.aggregation)

    offsets = [np.array([float(v) for v in vec]) for vec in m_frac]
    perturbed_layers = list(net.layers)
    perturbed_layers[layer_index] = _offset_layer(layer, offsets)
    pert_net = Network(space=net.space, sequence=net.sequence,
                       layers=tuple(perturbed_layers))

    formula = spec.displacement()
    out_gap = 0.0
    disp_gap = 0.0
    for _ in range(n_inputs):
        x = rng.standard_normal(net.input_dim)
        clean: ForwardResult = forward(net, x)
        pert: ForwardResult = forward(pert_net, x)
        out_gap = max(out_gap, float(np.max(np.abs(clean.output - pert.output))))
        vals = clean.stages[layer_index]
        moved = 0.0
        for a in range(n_in):
            base = evaluate(layer.phi[a], vals[a])
            bumped = base + offsets[a]
            moved += float(np.sum(np.abs(bumped - base) ** p))
        disp_gap = max(disp_gap, abs(moved ** (1.0 / p) - formula))

    verdict = (zero_sum and formula > delta and out_gap <= tol
               and disp_gap <= 1e-9)
    report = WitnessReport(
        claim="thm4.2", verdict=verdict, seed=seed,
        inputs={"layer_index": layer_index, "p": p, "delta": delta,
                "n_inputs": n_inputs, "tol": tol},
        measured={"null_space_dim": len(basis), "displacement": formula,
                  "zero_sum_exact": zero_sum, "max_output_gap": out_gap,
                  "max_displacement_gap": disp_gap,
                  "perturbations": spec.to_json()["perturbations"]})
    return spec, report


# ---------------------------------------------------------------------------
# unattainable targets of the final activation


def classify_activation(name: str) -> str:
    """Map an activation to its final-layer reachability class."""
    info = ACTIVATIONS[name]
    if not info.surjective:
        return "not_surjective"
    if info.open_map and info.bijective:
        return "open_bijective"
    if not info.open_map:
        return "not_open"
    return "open_non_bijective"


def probe_points(dim: int, count: int, seed: int = 0,
                 bound: float = 3.0) -> np.ndarray:
    """A deterministic probe set of at least ``count`` points: a true
    mesh grid in low dimension, else seeded uniform samples."""
    if dim <= 6:
        r = max(2, math.ceil(count ** (1.0 / dim)))
        axes = [np.linspace(-bound, bound, r)] * dim
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.reshape(-1) for m in mesh], axis=1)
    rng = np.random.default_rng(seed)
    return rng.uniform(-bound, bound, size=(count, dim))


def dataset_dependency(net: Network, grid_points: int = 10_000,
                       tol: float = 1e-6, seed: int = 0,
                       bound: float = 3.0) -> WitnessReport:
    """Exhibit a global section the network can never output.

    For a bounded (non-surjective) final activation the constant
    section at a value outside the closure of the range is checked
    against a dense input probe.  For an identity (open, bijective)
    final activation the obstruction is structural: the final layer is
    a sum of per-element terms, so every output has vanishing mixed
    difference across a coordinate pair split by the last cover stage,
    while the coordinate-product target does not.
    """
    final = net.layers[-1]
    if not isinstance(final, InclusionLayer):
        raise ValueError("the final layer must declare its activation")
    branch = classify_activation(final.activation)
    info = ACTIVATIONS[final.activation]
    k = final.out_dim

    if branch == "not_surjective":
        target = float(info.unreachable_value)
        pts = probe_points(net.input_dim, grid_points, seed=seed, bound=bound)
        outs = forward(net, pts).output
        gap = float(np.min(np.max(np.abs(outs - target), axis=1)))
        verdict = gap > tol
        measured = {"branch": branch, "target_value": target,
                    "min_gap_to_target": gap, "probe_count": len(pts)}
    elif branch == "open_bijective":
        mems = final.input_cover.memberships()
        pair = None
        for a, b in itertools.combinations(sorted(net.space.points), 2):
            if not any(a in m and b in m for m in mems):
                pair = (a, b)
                break
        if pair is None:
            raise ValueError("some last-stage element contains every point; "
                             "no separability obstruction exists")
        layout = slot_layout(frozenset(net.space.points), net.space.fiber_dims)
        slots = (layout[pair[0]][0], layout[pair[1]][0])
        rng = np.random.default_rng(seed)
        worst = 0.0
        for _ in range(20):
            base = rng.standard_normal(net.input_dim)

            def net_fn(offsets):
                return forward(net, base + offsets).output

            z = np.zeros(net.input_dim)
            ei = z.copy(); ei[slots[0]] = 1.0
            ej = z.copy(); ej[slots[1]] = 1.0
            md = net_fn(ei + ej) - net_fn(ei) - net_fn(ej) + net_fn(z)
            worst = max(worst, float(np.max(np.abs(md))))
        U = OpenSet(id="all", members=frozenset(net.space.points))
        target_sec = product_counterexample(U, net.space.fiber_dims, k)
        t_base = np.ones(net.input_dim)
        t_base[list(slots)] = 0.0
        t_md = mixed_difference(target_sec, slots[0], slots[1], t_base, 1.0)
        target_val = float(np.max(np.abs(t_md)))
        verdict = worst <= 1e-9 and target_val == 1.0
        measured = {"branch": branch, "cross_pair": list(pair),
                    "max_network_mixed_difference": worst,
                    "target_mixed_difference": target_val}
    else:
        raise ValueError(
            f"no unreachable-target synthesizer for class {branch!r}")

    return WitnessReport(
        claim="thm4.3", verdict=verdict, seed=seed,
        inputs={"activation": final.activation, "k": k,
                "grid_points": grid_points, "tol": tol},
        measured=measured)

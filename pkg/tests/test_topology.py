"""Marked spaces, covers and the stage-pair axiom checker."""

import json

import pytest

from coversheaf.topology import (CoverSequence, MarkedSpace, OpenSet,
                                 check_na_axioms, global_stage,
                                 has_proper_union, load_space_document,
                                 make_cover, nerve, singleton_stage)
from coversheaf.network import build_cnn, build_rnn_cover


def space(n, fibers=None):
    return MarkedSpace(n_points=n, fiber_dims=fibers or (1,) * n,
                       structure=("abstract",))


def test_marked_space_properties():
    sp = MarkedSpace(n_points=3, fiber_dims=(2, 1, 3))
    assert list(sp.points) == [1, 2, 3]
    assert sp.total_dim == 6


def test_marked_space_validation():
    with pytest.raises(ValueError):
        MarkedSpace(n_points=0, fiber_dims=())
    with pytest.raises(ValueError):
        MarkedSpace(n_points=2, fiber_dims=(1,))
    with pytest.raises(ValueError):
        MarkedSpace(n_points=2, fiber_dims=(1, 0))
    with pytest.raises(ValueError):
        MarkedSpace(n_points=4, fiber_dims=(1,) * 4, structure=("grid", 3, 2))


def test_open_set_is_one_based():
    assert OpenSet(id="a", members=frozenset({2, 1})).members == {1, 2}
    with pytest.raises(ValueError):
        OpenSet(id="a", members=frozenset({0, 1}))


def test_cover_validation():
    sp = space(3)
    cov = make_cover(sp, [[1, 2], [2, 3]])
    assert cov.covered == {1, 2, 3}
    assert cov.memberships() == (frozenset({1, 2}), frozenset({2, 3}))
    assert len({el.id for el in cov.elements}) == 2
    with pytest.raises(ValueError):
        make_cover(sp, [])
    with pytest.raises(ValueError):
        make_cover(sp, [[1, 4]])


def test_cover_may_undercover():
    cov = make_cover(space(4), [[1], [2]])
    assert cov.covered == {1, 2}


def test_nerve_triangle_faces():
    sp = space(3)
    cov = make_cover(sp, [[1, 2], [2, 3], [1, 3]])
    nv = nerve(cov)
    assert nv.faces[(0,)] == {1, 2}
    assert nv.faces[(0, 1)] == {2}
    assert nv.faces[(1, 2)] == {3}
    assert nv.faces[(0, 2)] == {1}
    assert nv.faces[(0, 1, 2)] == frozenset()
    assert nerve(cov, max_order=2).faces.keys() == {
        (0,), (1,), (2,), (0, 1), (0, 2), (1, 2)}


def test_cover_sequence_endpoint_validation():
    sp = space(3)
    mid = make_cover(sp, [[1, 2], [2, 3]])
    CoverSequence(space=sp, stages=(singleton_stage(sp), mid, global_stage(sp)))
    with pytest.raises(ValueError):
        CoverSequence(space=sp, stages=(mid, global_stage(sp)))
    with pytest.raises(ValueError):
        CoverSequence(space=sp, stages=(singleton_stage(sp), mid))


def test_has_proper_union():
    f = frozenset
    # redundant member makes the full candidate family proper
    assert has_proper_union(f({1, 2, 3}),
                            [f({1, 2}), f({2, 3}), f({1, 3})])
    # unused extra element suffices too
    assert has_proper_union(f({1, 2}), [f({1}), f({2}), f({3})])
    # an exact partition admits no proper covering subfamily
    assert not has_proper_union(f({1, 2, 3}), [f({1, 2}), f({3})])
    assert not has_proper_union(f({1, 2}), [f({1}), f({3})])


def test_cnn_stage_axiom_table():
    rep = check_na_axioms(build_cnn(4).sequence)
    first, second = rep.stages
    # 16 cell singletons -> 4 pooling blocks
    assert first.sizes == (16, 4)
    assert not first.locality  # the blocks cover every cell
    assert first.strictness and first.non_triviality and first.distinctness
    # 4 blocks -> global: a partition is never a proper-subfamily union
    assert second.sizes == (4, 1)
    assert second.strictness and second.distinctness
    assert not second.non_triviality
    assert not rep.all_hold


def test_single_patch_stage_is_not_a_proper_union():
    # one full patch over a 2x2 grid: strict (4 -> 1) but the patch
    # needs every singleton, so no proper subfamily reproduces it
    rep = check_na_axioms(build_cnn(2).sequence)
    first = rep.stages[0]
    assert first.sizes == (4, 1)
    assert first.strictness
    assert not first.non_triviality
    assert first.non_triviality_failure == 0


def test_prefix_stage_axioms():
    seq = build_rnn_cover(4, "rnn")
    assert [sorted(m) for m in seq.stages[1].memberships()] == [
        [1], [1, 2], [1, 2, 3], [1, 2, 3, 4]]
    rep = check_na_axioms(seq)
    first, second = rep.stages
    assert not first.strictness  # 4 -> 4
    # the full prefix needs every singleton, so it is not a proper union
    assert not first.non_triviality
    assert first.non_triviality_failure == 3
    assert first.distinctness
    # global = the last prefix alone, a proper one-element subfamily
    assert second.non_triviality
    assert second.strictness


def test_axiom_failure_witnesses():
    sp = space(4)
    stages = (singleton_stage(sp),
              make_cover(sp, [[1, 2], [1, 2], [3]]),
              global_stage(sp))
    rep = check_na_axioms(CoverSequence(space=sp, stages=stages))
    first = rep.stages[0]
    assert first.locality and first.uncovered_point == 4
    assert not first.distinctness
    assert first.distinctness_failure == (0, 1)


def test_axiom_report_json_shape():
    rep = check_na_axioms(build_rnn_cover(3, "lstm", window=2))
    doc = rep.to_json()
    assert set(doc) == {"all_hold", "stages"}
    assert all(
        set(s) == {"stage", "locality", "strictness", "non_triviality",
                   "distinctness", "sizes", "uncovered_point",
                   "non_triviality_failure", "distinctness_failure"}
        for s in doc["stages"])
    json.dumps(doc)  # must be serializable as-is


def test_lstm_windows():
    seq = build_rnn_cover(5, "lstm", window=3)
    assert [sorted(m) for m in seq.stages[1].memberships()] == [
        [1, 2, 3], [2, 3, 4], [3, 4, 5]]


def test_load_space_document(tmp_path):
    doc = {"n_points": 3, "fiber_dims": [1, 2, 1],
           "structure": {"kind": "abstract"},
           "covers": [[[1, 2], [2, 3]]]}
    path = tmp_path / "space.json"
    path.write_text(json.dumps(doc))
    sp, covers = load_space_document(path)
    assert sp.fiber_dims == (1, 2, 1)
    assert covers[0].memberships() == (frozenset({1, 2}), frozenset({2, 3}))
    # inline JSON and decoded dicts are accepted too
    sp2, _ = load_space_document(json.dumps(doc))
    assert sp2 == sp
    sp3, _ = load_space_document(doc)
    assert sp3 == sp


def test_load_space_document_errors():
    with pytest.raises(ValueError):
        load_space_document({"fiber_dims": [1]})
    with pytest.raises(ValueError):
        load_space_document(json.dumps([1, 2]))
    with pytest.raises(ValueError):
        load_space_document({"n_points": 2, "fiber_dims": [1, 1],
                             "structure": {"kind": "moebius"}})

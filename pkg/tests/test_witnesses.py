"""Witness constructions: locality, surjectivity, gluing, kernel, attacks."""

from fractions import Fraction

import numpy as np
import pytest

from coversheaf.topology import MarkedSpace, OpenSet, make_cover, nerve
from coversheaf.sections import (affine_section, evaluate,
                                 polynomial_coefficients, polynomial_section,
                                 product_counterexample)
from coversheaf.network import (build_cnn, build_sequential, forward,
                                network_from_json)
from coversheaf.witnesses import (AttackSpec, IncompatibleLocalsError,
                                  KernelPremiseError, WitnessReport,
                                  adversarial_attack, classify_activation,
                                  cosheaf_kernel_decompose,
                                  dataset_dependency,
                                  glue_inclusion_exclusion, glue_report,
                                  kernel_report, locality_witness,
                                  multi_mixed_difference, pooled_collision,
                                  probe_points, surjectivity_witness)

TRIANGLE = [[1, 2], [2, 3], [1, 3]]


def triangle_cover(fibers=(1, 1, 1)):
    sp = MarkedSpace(n_points=3, fiber_dims=fibers)
    return make_cover(sp, TRIANGLE)


def test_report_claim_validation():
    with pytest.raises(ValueError):
        WitnessReport(claim="made-up", verdict=True, inputs={}, measured={})
    rep = WitnessReport(claim="thm4.2", verdict=True, inputs={},
                        measured={"ok": np.bool_(True), "x": np.float64(2.0)})
    doc = rep.to_json()
    assert doc["schema"] == 1
    # numpy scalars are converted, bools stay bools
    assert doc["measured"] == {"ok": True, "x": 2.0}


def test_locality_witness_is_exact():
    cover = triangle_cover()
    h, rep = locality_witness(cover, (1, 1, 1), k=1, n_samples=50, seed=0)
    assert rep.verdict
    assert rep.measured["restriction_deviations"] == [0.0, 0.0, 0.0]
    assert rep.measured["h_at_ones_norm"] == 1.0
    assert rep.measured["global_difference_at_ones"] == 1.0
    assert evaluate(h, np.ones(3)).tolist() == [1.0]


def test_locality_needs_each_element_to_miss_a_point():
    sp = MarkedSpace(n_points=2, fiber_dims=(1, 1))
    cover = make_cover(sp, [[1, 2], [1]])
    with pytest.raises(ValueError):
        locality_witness(cover, (1, 1), k=1)


def test_surjectivity_witness():
    cover = triangle_cover((2, 1, 1))
    rep = surjectivity_witness(cover, (2, 1, 1), k=2, n_trials=50, seed=0)
    assert rep.verdict
    assert rep.measured["product_alternating_difference"] == 1.0
    assert rep.measured["max_separable_alternating_difference"] <= 1e-12


def test_multi_mixed_difference():
    prod = product_counterexample(
        OpenSet(id="all", members=frozenset({1, 2, 3})), (1, 1, 1), 1)
    md = multi_mixed_difference(prod, [0, 1, 2], np.zeros(3), 1.0)
    assert md.tolist() == [1.0]
    aff = affine_section([[2.0, 3.0]], bias=[5.0])
    assert multi_mixed_difference(aff, [0, 1], np.zeros(2), 1.0).tolist() == [0.0]
    with pytest.raises(ValueError):
        multi_mixed_difference(aff, [0, 0], np.zeros(2), 1.0)


def test_glue_round_trip_and_rejection():
    cover = triangle_cover()
    rep = glue_report(cover, k=2, seed=4)
    assert rep.verdict
    assert max(rep.measured["restriction_deviations"]) <= 1e-9
    rej = rep.measured["rejection"]
    assert rej["names_bumped_local"] and rej["deviation"] >= 0.999


def test_glue_input_validation():
    cover = triangle_cover()
    good = [affine_section(np.ones((1, 2)), domain=el)
            for el in cover.elements]
    with pytest.raises(ValueError):
        glue_inclusion_exclusion(good[:2], cover)
    bad_dim = list(good)
    bad_dim[0] = affine_section(np.ones((1, 3)), domain=cover.elements[0])
    with pytest.raises(ValueError):
        glue_inclusion_exclusion(bad_dim, cover)


def test_glue_incompatible_pair_is_named():
    cover = triangle_cover()
    locals_ = [affine_section(np.ones((1, 2)), domain=el)
               for el in cover.elements]
    locals_[1] = affine_section(2 * np.ones((1, 2)),
                                domain=cover.elements[1])
    with pytest.raises(IncompatibleLocalsError) as err:
        glue_inclusion_exclusion(locals_, cover)
    assert 1 in err.value.pair


def test_glue_nerve_argument():
    cover = triangle_cover()
    locals_ = [affine_section(np.ones((1, 2)), domain=el)
               for el in cover.elements]
    glued = glue_inclusion_exclusion(locals_, cover, nerve=nerve(cover))
    assert glued.codomain_dim == 1
    with pytest.raises(ValueError):
        glue_inclusion_exclusion(locals_, cover,
                                 nerve=nerve(triangle_cover()))


def test_kernel_decompose_worked_example():
    sp = MarkedSpace(n_points=3, fiber_dims=(1, 1, 1))
    cover = make_cover(sp, [[1, 2], [2, 3]])
    # f0 reads the shared point's coordinate, f1 negates it
    f0 = polynomial_section(2, 1, [{(0, 1): Fraction(1)}],
                            domain=cover.elements[0])
    f1 = polynomial_section(2, 1, [{(1, 0): Fraction(-1)}],
                            domain=cover.elements[1])
    family = cosheaf_kernel_decompose([f0, f1], cover)
    assert set(family) == {(0, 1), (1, 0)}
    assert polynomial_coefficients(family[(0, 1)]) == [{(1,): Fraction(1)}]
    assert polynomial_coefficients(family[(1, 0)]) == [{(1,): Fraction(-1)}]
    assert sorted(family[(0, 1)].domain.members) == [2]


def test_kernel_decompose_zero_family():
    sp = MarkedSpace(n_points=3, fiber_dims=(1, 1, 1))
    cover = make_cover(sp, [[1, 2], [2, 3]])
    zeros = [polynomial_section(2, 1, [{}], domain=el)
             for el in cover.elements]
    assert cosheaf_kernel_decompose(zeros, cover) == {}


def test_kernel_premise_rejects_nonzero_sum():
    sp = MarkedSpace(n_points=3, fiber_dims=(1, 1, 1))
    cover = make_cover(sp, [[1, 2], [2, 3]])
    f0 = polynomial_section(2, 1, [{(0, 1): Fraction(1)}],
                            domain=cover.elements[0])
    f1 = polynomial_section(2, 1, [{(1, 0): Fraction(1)}],
                            domain=cover.elements[1])
    with pytest.raises(KernelPremiseError):
        cosheaf_kernel_decompose([f0, f1], cover)


def test_kernel_report_round_trip():
    rep = kernel_report(triangle_cover((2, 1, 2)), k=2, seed=11)
    assert rep.verdict
    assert rep.measured["antisymmetric"]
    assert rep.measured["failure"] is None
    assert rep.measured["pair_count"] >= 1


def test_attack_spec_displacement():
    spec = AttackSpec(layer_index=0, p=2.0, delta=1.0,
                      perturbations=((Fraction(3),), (Fraction(-3),),
                                     (Fraction(0),), (Fraction(0),)))
    assert spec.displacement() == 18.0 ** 0.5
    one = AttackSpec(layer_index=0, p=1.0, delta=1.0,
                     perturbations=spec.perturbations)
    assert one.displacement() == 6.0
    assert spec.zero_sum_exact([(0, 1), (2, 3)])
    assert not spec.zero_sum_exact([(0, 2), (1, 3)])


def test_adversarial_attack_on_sum_pool():
    net = network_from_json("fixtures/sumpool.json")
    spec, rep = adversarial_attack(net, 0, p=2.0, delta=1.0, seed=0)
    assert rep.verdict
    assert rep.measured["null_space_dim"] == 2
    assert rep.measured["zero_sum_exact"] is True
    assert rep.measured["displacement"] > 1.0
    assert rep.measured["max_output_gap"] <= 1e-9
    assert rep.measured["max_displacement_gap"] <= 1e-9
    # doubling continues until the displacement clears a large delta
    spec2, rep2 = adversarial_attack(net, 0, p=2.0, delta=100.0, seed=0)
    assert spec2.displacement() > 100.0
    assert rep2.verdict


def test_attack_rejects_unsuitable_layers():
    net = build_cnn(2, plan=[{"kind": "pool", "mode": "max", "block": 2},
                             {"kind": "fc", "out_dim": 1,
                              "activation": "identity"}])
    with pytest.raises(ValueError):
        adversarial_attack(net, 0)
    seq = build_sequential(4, "rnn", seed=0)
    # layer 0 maps 4 singletons to 4 prefixes: not strictly shrinking
    with pytest.raises(ValueError):
        adversarial_attack(seq, 0)


def test_classify_activation():
    assert classify_activation("sigmoid") == "not_surjective"
    assert classify_activation("tanh") == "not_surjective"
    assert classify_activation("sin") == "not_surjective"
    assert classify_activation("relu") == "not_surjective"
    assert classify_activation("identity") == "open_bijective"


def test_probe_points():
    mesh = probe_points(2, 10)
    assert mesh.shape == (16, 2)
    assert np.max(np.abs(mesh)) <= 3.0
    cloud = probe_points(7, 10, seed=2)
    assert cloud.shape == (10, 7)
    assert np.array_equal(cloud, probe_points(7, 10, seed=2))


def test_dataset_dependency_bounded_activation():
    net = build_sequential(4, "rnn", seed=3)  # tanh head
    rep = dataset_dependency(net, grid_points=500, seed=1)
    assert rep.verdict
    assert rep.measured["branch"] == "not_surjective"
    assert rep.measured["target_value"] == 2.0
    assert rep.measured["min_gap_to_target"] > 1e-6
    relu = build_sequential(4, "rnn", activation="relu", seed=3)
    rep2 = dataset_dependency(relu, grid_points=500, seed=1)
    assert rep2.measured["target_value"] == -1.0
    assert rep2.verdict


def test_dataset_dependency_identity_head():
    net = build_cnn(2, plan=[{"kind": "conv", "channels": 2,
                              "activation": "relu"},
                             {"kind": "fc", "out_dim": 1,
                              "activation": "identity"}])
    rep = dataset_dependency(net, seed=1)
    assert rep.verdict
    assert rep.measured["branch"] == "open_bijective"
    assert rep.measured["target_mixed_difference"] == 1.0
    assert rep.measured["max_network_mixed_difference"] <= 1e-9
    # a prefix stage ends in the full set, so no splitting pair exists
    seq = build_sequential(4, "rnn", activation="identity", seed=3)
    with pytest.raises(ValueError):
        dataset_dependency(seq, seed=1)


def test_pooled_collision():
    rep = pooled_collision(seed=0)
    assert rep.verdict
    assert rep.measured["output_gap"] == 0.0
    assert rep.measured["input_gap"] > 0.0

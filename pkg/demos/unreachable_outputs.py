"""Global sections no trained network of a fixed shape can produce.

A bounded final activation leaves constants outside its range
unreachable no matter the parameters; a sum-of-patches final layer
with an identity head cannot produce any section whose mixed
difference across a cover-splitting coordinate pair is nonzero.  Max
pooling adds a third obstruction: distinct inputs with identical
outputs.
"""

from coversheaf.network import build_cnn, build_sequential
from coversheaf.witnesses import (classify_activation, dataset_dependency,
                                  pooled_collision)


def main() -> None:
    for name in ("identity", "relu", "sigmoid", "tanh", "sin", "cos"):
        print(f"{name:9s} -> {classify_activation(name)}")

    sigmoid_net = build_cnn(4)
    rep = dataset_dependency(sigmoid_net, grid_points=10_000, seed=0)
    m = rep.measured
    print(f"\nsigmoid head: constant target {m['target_value']} misses "
          f"all {m['probe_count']} probes by >= {m['min_gap_to_target']:.3f}")

    ident = build_cnn(2, plan=[{"kind": "conv", "channels": 2,
                                "activation": "relu"},
                               {"kind": "fc", "out_dim": 1,
                                "activation": "identity"}])
    rep2 = dataset_dependency(ident, seed=0)
    m2 = rep2.measured
    print(f"identity head: target mixed difference "
          f"{m2['target_mixed_difference']}, but the network's is "
          f"<= {m2['max_network_mixed_difference']:.2e} "
          f"across the pair {m2['cross_pair']}")

    rep3 = pooled_collision(seed=0)
    print(f"max pooling: two inputs {rep3.measured['input_gap']:.2f} apart, "
          f"output gap {rep3.measured['output_gap']}")


if __name__ == "__main__":
    main()

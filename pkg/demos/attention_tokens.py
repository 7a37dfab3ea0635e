"""Attention as aggregation over token covers, plus positional tags.

Builds a one-block multi-head attention network over a token cover,
checks the stage covers against the aggregation axioms (token stages
fail locality: no point lies outside every token), verifies softmax
row normalization, and prints the positional encoding table whose
second coordinate marks the feature index.
"""

import numpy as np

from coversheaf.network import (build_attention, forward,
                                positional_encoding)
from coversheaf.topology import check_na_axioms


def main() -> None:
    n_tokens, d_model = 3, 4
    net = build_attention(n_tokens, d_model, heads=2, head_dim=2, seed=0)
    rep = check_na_axioms(net.sequence)
    first = rep.to_json()["stages"][0]
    print(f"token stage axioms: locality={first['locality']} "
          f"strictness={first['strictness']} "
          f"non_triviality={first['non_triviality']} "
          f"distinctness={first['distinctness']}")

    rng = np.random.default_rng(1)
    x = rng.standard_normal(net.input_dim)
    out = forward(net, x)
    op = net.layers[1].op
    w = op.attention_weights(list(np.stack(out.stages[1])))
    print("softmax rows sum to one:",
          bool(np.max(np.abs(w.sum(axis=2) - 1.0)) < 1e-12))
    print("output shape:", out.output.shape)

    uniform = build_attention(n_tokens, d_model, heads=1, head_dim=2,
                              seed=0, zero_qk=True)
    wu = uniform.layers[1].op.attention_weights(
        list(np.stack(forward(uniform, x).stages[1])))
    print("zero query/key weights are uniform:",
          bool(np.max(np.abs(wu - 1.0 / n_tokens)) == 0.0))

    print("\npositional encoding, 2 tokens x 2 features:")
    table = positional_encoding(2, 2)
    for i in range(1, 3):
        for j in range(1, 3):
            val, tag = table[(i - 1) * 2 + (j - 1)]
            kind = "sin" if i % 2 == 0 else "cos"
            print(f"  token {i} feature {j}: {kind} branch, "
                  f"value {val:+.6f}, tag {tag}")


if __name__ == "__main__":
    main()

"""One section that breaks both halves of the gluing axiom for C^0.

The coordinate product over the whole space restricts to the zero
function on every cover element (each element misses a coordinate, and
restriction substitutes zero there), yet it is not zero globally.  The
same section cannot be written as a sum of per-element pullbacks: any
such sum has vanishing alternating difference over one slot per point,
while the product's is exactly 1.
"""

import numpy as np

from coversheaf.sections import evaluate
from coversheaf.topology import MarkedSpace, make_cover
from coversheaf.witnesses import locality_witness, surjectivity_witness


def main() -> None:
    space = MarkedSpace(n_points=3, fiber_dims=(1, 1, 1))
    cover = make_cover(space, [[1, 2], [2, 3], [1, 3]])

    h, rep = locality_witness(cover, space.fiber_dims, k=1, seed=0)
    print("restriction deviations (exact):",
          rep.measured["restriction_deviations"])
    print("value at the all-ones input:", evaluate(h, np.ones(3)).tolist())
    print("two globals with identical restrictions differ by",
          rep.measured["global_difference_at_ones"], "at (1,1,1)")
    print("locality breaks:", rep.verdict)

    rep2 = surjectivity_witness(cover, space.fiber_dims, k=1,
                                n_trials=50, seed=0)
    print("\nproduct alternating difference:",
          rep2.measured["product_alternating_difference"])
    print("worst separable-sum alternating difference over 50 draws:",
          rep2.measured["max_separable_alternating_difference"])
    print("no separable sum reaches the product:", rep2.verdict)


if __name__ == "__main__":
    main()

"""Expansions on the biased cube: coefficients, round trips, and what
the low-degree part of a function already knows.
"""

import numpy as np

from boolcube import (
    ProductDistribution,
    expansion_to_text,
    inverse_transform,
    parse_function,
    transform,
)

f = parse_function("maj(3)").build()

print("== majority of three voters, fair coins ==")
u = ProductDistribution.uniform(3)
e = transform(f, u)
print(expansion_to_text(e))
print("mean (empty coefficient): %g" % e.mean())
print("variance (energy above degree zero): %g" % e.variance())
print()

print("== same function, voter 0 now says +1 with probability 0.8 ==")
p = ProductDistribution(np.array([0.8, 0.5, 0.5]))
eb = transform(f, p)
print(expansion_to_text(eb))
print("mean: %g" % eb.mean())
# under the biased measure the basis itself moved, so every
# coefficient is allowed to change, not just the mean
print()

print("== coefficients determine the function exactly ==")
back = inverse_transform(eb, p)
err = np.max(np.abs(back.values() - f.values()))
print("inverse transform max error: %g" % err)

# Parseval under the same measure: E[f^2] = mean^2 + variance = 1
# for a +-1 valued function, whatever the bias
total = eb.mean() ** 2 + eb.variance()
print("mean^2 + variance = %.15f (should be 1 exactly)" % total)

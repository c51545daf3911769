"""The probability gradient of E[f] read off the degree-one coefficients,
checked against finite differences and against Monte Carlo sampling.
"""

import numpy as np

from boolcube import (
    EstimatorConfig,
    ProductDistribution,
    estimate_gradient,
    exact_gradient,
    numeric_gradient,
    parse_function,
    stream,
)

f = parse_function("randpoly(5,3,0.6,3)").build()
dist = ProductDistribution(stream(99).uniform(0.2, 0.8, 5))

print("function: randpoly(5,3,0.6,3)")
print("probabilities:", np.array2string(dist.probs, precision=4))
print()

exact = exact_gradient(f, dist)
numeric = numeric_gradient(f, dist)

print("coordinate   exact (from transform)   central difference")
for i in range(5):
    print("    %d        %+.10f            %+.10f" % (i, exact[i], numeric[i]))
print("max |difference|: %g" % np.max(np.abs(exact - numeric)))
print()

# the score-function estimator targets the same vector from samples alone
est = estimate_gradient(EstimatorConfig("reinforce"), f, dist,
                        batch=200000, seed=5)
print("reinforce, 2e5 samples:", np.array2string(est.grad, precision=4))
print("max |sampling error|: %g" % np.max(np.abs(est.grad - exact)))

"""Mittag-Leffler functions against the elementary functions they reduce to."""
import math

import numpy as np

from fracrules.special_functions import BivariateMLParams, MLParams, bivariate_ml, ml2, ml3

# E_{1,1} is the exponential and E_{2,1}(-t^2) is the cosine
for t in (-2.0, 0.5, 3.0):
    print(f"t={t:5}: E_1,1={ml2(MLParams(1, 1), t):.15g}  exp={math.exp(t):.15g}")
for x in (0.5, 1.0, 2.0):
    print(f"x={x:4}: E_2,1(-x^2)={ml2(MLParams(2, 1), -x * x):.15g}  cos={math.cos(x):.15g}")

# Prabhakar exponent 2 with alpha = beta = 1 gives (1 + t) e^t
t = 0.8
print("E^2_1,1(0.8) =", ml3(MLParams(1, 1, 2), t), "vs", (1 + t) * math.exp(t))

# the bivariate function with v = 0 collapses to the two-parameter one
for alpha, beta in ((0.7, 1.2), (1.5, 0.5)):
    u = -1.3
    print(
        f"alpha={alpha}, beta={beta}:",
        bivariate_ml(BivariateMLParams(alpha, beta, beta), u, 0.0),
        ml2(MLParams(alpha, beta), u),
    )

# a slice of E_{0.5,1}(-t): decays like 1/(sqrt(pi) t) for large t
ts = np.linspace(0, 8, 9)
print(np.array([ml2(MLParams(0.5, 1), -t) for t in ts]))

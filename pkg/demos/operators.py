"""Fractional integrals and derivatives: closed forms on kernels and grid schemes."""
import numpy as np
from scipy.special import gamma

from fracrules.frac_operators import (
    FracOrder,
    GridFunction,
    PowerMLKernel,
    caputo_derivative_numeric,
    power_rule_caputo,
    power_rule_rl,
    rl_derivative_analytic,
    rl_derivative_numeric,
    rl_integral_analytic,
    rl_integral_numeric,
)

# power rules
print("D^0.5 t^0   (RL)    :", power_rule_rl(0.0, 0.5))
print("D^0.5 t^0   (Caputo):", power_rule_caputo(0.0, 0.5))
print("D^1.5 t^2   (Caputo):", power_rule_caputo(2.0, 1.5))

# kernels t^(gamma-1) E(lam t^a, mu t^b) stay kernels under the operators
k = PowerMLKernel(1.0, 1.5, 1.0, 1.5, -1.0, -1.0)
lifted = rl_integral_analytic(k, 0.7)
print("I^0.7 k :", lifted)
print("D^0.7 I^0.7 k :", rl_derivative_analytic(lifted, FracOrder(0.7)))

# the grid schemes converge at order two on a fixed window
for N in (256, 512, 1024):
    f = GridFunction.sample(np.square, 0.0, 2.0, N)
    exact = 2 * f.times**2.5 / gamma(3.5)
    err = np.max(np.abs(rl_integral_numeric(f, 0.5).values - exact))
    mask = f.times >= 0.5
    d = rl_derivative_numeric(f, FracOrder(0.5)).values
    d_err = np.max(np.abs(d - 2 * f.times**1.5 / gamma(2.5))[mask])
    print(f"N={N:5}: I^0.5 t^2 error {err:.2e}   D^0.5 t^2 error on t>=0.5 {d_err:.2e}")

# Caputo derivatives ignore constants
f = GridFunction.sample(lambda t: 4.0 + t, 0.0, 2.0, 256)
print("max |D_C^0.5 (4 + t) - t^0.5/Gamma(1.5)| on t>=0.5:",
      np.max(np.abs(caputo_derivative_numeric(f, FracOrder(0.5)).values - f.times**0.5 / gamma(1.5))[f.times >= 0.5]))

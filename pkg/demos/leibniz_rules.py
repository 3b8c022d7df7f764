"""Differentiating a convolution y = k * g under the integral sign.

Each check evaluates both sides of a product rule on a grid and reports
the residual on the interior nodes.
"""
from fracrules.forcing import Forcing
from fracrules.frac_operators import FracOrder
from fracrules.leibniz import (
    ConvolutionProblem,
    caputo_leibniz_check,
    caputo_rl_coincidence_check,
    rl_leibniz_check,
)
from fracrules.solvers import green_kernel_of

kernel = green_kernel_of(1.5, 0.5, -1.0, -1.0)
print("Green kernel:", kernel)

for N in (256, 512, 1024):
    p = ConvolutionProblem(kernel, Forcing.exponential(-1.0), 5.0, N)
    rl = rl_leibniz_check(FracOrder(1.5), p, t_min=0.5)
    cap = caputo_leibniz_check(FracOrder(1.5), p, t_min=0.5)
    co = caputo_rl_coincidence_check(FracOrder(0.7), p, t_min=0.5)
    print(
        f"N={N:5}: RL residual {rl.max_residual:.2e}  Caputo residual {cap.max_residual:.2e}"
        f"  order-0.7 coincidence {co.diagnostics['caputo_minus_rl']:.2e}"
    )
print("boundary terms of the RL rule:", rl.boundary_terms)

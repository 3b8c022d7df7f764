"""Regenerate the contour-inversion fixture used by the solver acceptance test.

Each value is inverted with two contour configurations (64 and 128 base
nodes) and kept only if they agree to 1e-8 relative.

    python3 tests/fixtures/generate_oracle_fixture.py
"""

from pathlib import Path

import numpy as np

from fracrules.cli import csv_text
from fracrules.forcing import Forcing
from fracrules.laplace_oracle import InversionConfig, oracle_solution
from fracrules.solvers import BagleyTorvikProblem

HERE = Path(__file__).parent
# nodes of the N = 1024 grid from the first one past t = 0.1, every fourth node, and T
STEP = 5.0 / 1024
NODES = np.append(np.arange(21, 1024, 4), 1024)


def main() -> None:
    p = BagleyTorvikProblem(1.5, 0.5, -1.0, -1.0, Forcing.constant(1.0), 5.0, 256)
    times = STEP * NODES
    values = []
    for t in times:
        a = oracle_solution(p, float(t), InversionConfig(M=64))
        b = oracle_solution(p, float(t), InversionConfig(M=128))
        if abs(a - b) > 1e-8 * abs(b):
            raise SystemExit(f"contour configurations disagree at t={t}: {a} vs {b}")
        values.append(b)
    text = csv_text(("t", "y"), (times, np.asarray(values)))
    (HERE / "bagley_torvik_oracle.csv").write_text(text, encoding="utf-8")


if __name__ == "__main__":
    main()

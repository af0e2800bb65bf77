#!/usr/bin/env python3
"""Step-size convergence study for the fixed-step integrator.

Integrates the scalar contraction xdot = -x to t = 1 over a dt sweep and
prints the error against exp(-1) together with the ratio between successive
rows; fourth-order convergence shows up as ratios near 16 until round-off
takes over.
"""

import math
import sys
from pathlib import Path

import numpy as np

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from netbound import DiGraph, builtin_node, simulate  # noqa: E402


def main() -> int:
    graph = DiGraph(np.zeros((1, 1)))
    node = [builtin_node("linear_stable")]
    print(f"{'dt':>10} {'error at t=1':>14} {'ratio':>8}")
    previous = None
    for exponent in range(1, 8):
        dt = 2.0 ** -exponent / 5.0
        traj = simulate(node, graph, 1.0, [1.0], 1.0, dt)
        error = abs(float(traj.states[-1, 0]) - math.exp(-1.0))
        ratio = f"{previous / error:8.2f}" if previous and error > 0 else "       -"
        print(f"{dt:>10.5f} {error:>14.3e} {ratio}")
        previous = error
    return 0


if __name__ == "__main__":
    sys.exit(main())

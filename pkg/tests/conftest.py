"""Shared oracles and generators for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from netbound import DiGraph


def reachability_closure(weights: np.ndarray) -> np.ndarray:
    """Floyd-Warshall closure: ``reach[j, i]`` iff a directed path j -> i exists.

    Brute-force oracle, deliberately independent of the library's SCC code.
    Follows the library's convention that ``weights[i, j] > 0`` is an edge
    from j into i.
    """
    n = weights.shape[0]
    reach = (weights.T > 0.0) | np.eye(n, dtype=bool)
    for k in range(n):
        reach |= np.outer(reach[:, k], reach[k, :])
    return reach


def scc_partition_oracle(weights: np.ndarray) -> set[frozenset[int]]:
    reach = reachability_closure(weights)
    mutual = reach & reach.T
    return {frozenset(np.nonzero(mutual[i])[0].tolist()) for i in range(weights.shape[0])}


def root_components_oracle(weights: np.ndarray) -> tuple[list[frozenset[int]], bool]:
    """Root components (no incoming edge from outside) and whether a unique
    root reaches every node."""
    comps = sorted(scc_partition_oracle(weights), key=min)
    reach = reachability_closure(weights)
    roots = []
    for comp in comps:
        incoming = any(
            weights[i, j] > 0.0
            for i in comp
            for j in range(weights.shape[0])
            if j not in comp
        )
        if not incoming:
            roots.append(comp)
    rooted = False
    if len(roots) == 1:
        root = next(iter(roots[0]))
        rooted = bool(reach[root].all())
    return roots, rooted


def random_strongly_connected(rng: np.random.Generator, n: int, w_max: float = 2.0) -> DiGraph:
    """Random permutation cycle (guarantees strong connectivity) plus extras."""
    w = np.zeros((n, n))
    order = rng.permutation(n)
    for a, b in zip(order, np.roll(order, -1)):
        w[b, a] = rng.uniform(0.05, w_max)
    extra = rng.random((n, n)) < 0.3
    for i in range(n):
        for j in range(n):
            if i != j and extra[i, j] and w[i, j] == 0.0:
                w[i, j] = rng.uniform(0.05, w_max)
    return DiGraph(w)


def random_rooted(rng: np.random.Generator, n: int, w_max: float = 2.0) -> DiGraph:
    """Random digraph with a guaranteed directed spanning tree.

    A strongly connected core on a random subset, tree edges reaching every
    other node, and extra edges that never point back into the core (so the
    root component is exactly the core).
    """
    perm = rng.permutation(n)
    n_core = int(rng.integers(1, n + 1))
    core, rest = perm[:n_core], perm[n_core:]
    w = np.zeros((n, n))
    for a, b in zip(core, np.roll(core, -1)):
        if a != b:
            w[b, a] = rng.uniform(0.05, w_max)
    for idx, node in enumerate(rest):
        parent = rng.choice(np.concatenate([core, rest[:idx]])) if idx else rng.choice(core)
        w[node, parent] = rng.uniform(0.05, w_max)
    core_set = set(core.tolist())
    for _ in range(n):
        j, i = rng.integers(0, n, size=2)  # candidate edge j -> i
        if i != j and i not in core_set and w[i, j] == 0.0 and rng.random() < 0.5:
            w[i, j] = rng.uniform(0.05, w_max)
    return DiGraph(w)


def random_nonsingular_m_matrix(rng: np.random.Generator, n: int) -> np.ndarray:
    """``lambda I - B`` with ``B >= 0`` entrywise and ``lambda > rho(B)``."""
    B = rng.uniform(0.0, 1.0, size=(n, n))
    rho = float(np.abs(np.linalg.eigvals(B)).max())
    lam = rho * (1.0 + rng.uniform(0.1, 2.0)) + 0.1
    return lam * np.eye(n) - B


def power_iteration_norm(M: np.ndarray, iters: int = 10_000) -> float:
    """Largest singular value via power iteration on M.T @ M; test oracle."""
    G = M.T @ M
    v = np.ones(G.shape[0]) / np.sqrt(G.shape[0])
    lam = 0.0
    for _ in range(iters):
        w = G @ v
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            return 0.0
        v_new = w / nw
        lam_new = float(v_new @ G @ v_new)
        if abs(lam_new - lam) <= 1e-14 * max(1.0, lam_new):
            lam = lam_new
            break
        v, lam = v_new, lam_new
    return float(np.sqrt(max(lam, 0.0)))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)

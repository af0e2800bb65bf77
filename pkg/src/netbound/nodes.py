"""Scalar node models carrying a dissipation certificate.

A node bundles continuous dynamics ``f`` with storage data
``(V, alpha, H, psi, rho)`` certifying, for the input-affine system
``xdot = f(x) + u``::

    alpha(|x|) <= V(x),   d/dt V(x) <= 2*u*x - H(x),
    H(x) >= psi(|x|) > 0   whenever |x| >= rho.

For the inequality to hold for every input ``u`` the storage gradient must
match the supply rate, i.e. ``dV/dx = 2x`` (so ``V(x) = x**2`` up to an
irrelevant constant, and we fix the constant to zero).  The drift condition
then reduces to ``2*x*f(x) <= -H(x)``, which is what ``verify_semipassive``
falsifies on a grid, together with a finite-difference check of the gradient.

All callables must accept numpy arrays (vectorised evaluation); the simulator
evaluates them on batches of states.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

GRADIENT_REL_TOL = 1e-4
DISSIPATION_TOL = 1e-9
STORAGE_FLOOR_TOL = 1e-12
_FD_STEP_REL = 1e-6


@dataclass(frozen=True)
class KInfFunction:
    """Continuous, strictly increasing, unbounded function with ``fn(0) == 0``.

    The properties are assumed, not proven; ``invert_kinf`` fails loudly when
    unboundedness does not hold in practice (bracket expansion cap).
    """

    fn: Callable[[np.ndarray], np.ndarray]
    description: str = ""

    def __call__(self, s):
        return self.fn(s)

    def scaled(self, c: float) -> "KInfFunction":
        """``s -> c * fn(s)``; still class-K-infinity for ``c > 0``."""
        if not c > 0.0:
            raise ValueError("scale factor must be positive")
        return KInfFunction(lambda s: c * self.fn(s), f"{c:g}*({self.description})")

    @staticmethod
    def pointwise_min(funcs: Sequence["KInfFunction"], description: str = "") -> "KInfFunction":
        """Pointwise minimum of finitely many K-infinity functions."""
        if not funcs:
            raise ValueError("need at least one function")
        fns = tuple(f.fn for f in funcs)
        if len(fns) == 1:
            return KInfFunction(fns[0], description or funcs[0].description)

        def fn(s):
            return np.minimum.reduce([f(s) for f in fns])

        return KInfFunction(fn, description or "min{" + ", ".join(f.description for f in funcs) + "}")


@dataclass(frozen=True)
class SemiPassiveNode:
    """Node dynamics plus the storage data described in the module docstring."""

    name: str
    f: Callable[[np.ndarray], np.ndarray]
    V: Callable[[np.ndarray], np.ndarray]
    alpha: KInfFunction
    H: Callable[[np.ndarray], np.ndarray]
    psi: Callable[[np.ndarray], np.ndarray]
    rho: float

    def __post_init__(self):
        if not (float(self.rho) > 0.0):
            raise ValueError(f"node {self.name!r}: rho must be positive")


@dataclass(frozen=True)
class VerificationResult:
    """Outcome of the grid falsifier: ``ok`` or the first violating point."""

    ok: bool
    witness: Optional[float] = None
    check: Optional[str] = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def verify_semipassive(
    node: SemiPassiveNode,
    x_max: float,
    grid: int = 10_000,
    tol_diss: float = DISSIPATION_TOL,
) -> VerificationResult:
    """Falsify the dissipation certificate on a uniform grid over [-x_max, x_max].

    Checks, in order at each grid point: finiteness of every evaluation,
    ``V >= alpha(|x|)``, the gradient identity ``dV/dx = 2x`` by central
    finite differences, the drift inequality ``2*x*f(x) + H(x) <= tol_diss``,
    and ``H(x) >= psi(|x|) > 0`` wherever ``|x| >= rho``.  Returns the first
    violating ``x`` in grid order.  A pass is evidence, not proof: density is
    the caller's responsibility.
    """
    if not (x_max > node.rho):
        raise ValueError("x_max must exceed the node's rho")
    if grid < 100:
        raise ValueError("grid must have at least 100 points")

    xs = np.linspace(-x_max, x_max, int(grid))
    ax = np.abs(xs)
    with np.errstate(all="ignore"):
        fx = np.asarray(node.f(xs), dtype=float)
        Vx = np.asarray(node.V(xs), dtype=float)
        Hx = np.asarray(node.H(xs), dtype=float)
        alphax = np.asarray(node.alpha(ax), dtype=float)
        psix = np.asarray(node.psi(ax), dtype=float)
        h = _FD_STEP_REL * np.maximum(1.0, ax)
        dVdx = (np.asarray(node.V(xs + h), dtype=float) - np.asarray(node.V(xs - h), dtype=float)) / (2.0 * h)

    checks = [
        ("finite", ~(np.isfinite(fx) & np.isfinite(Vx) & np.isfinite(Hx)
                     & np.isfinite(alphax) & np.isfinite(psix) & np.isfinite(dVdx))),
        ("storage_floor", alphax - Vx > STORAGE_FLOOR_TOL * np.maximum(1.0, np.abs(alphax))),
        ("gradient", np.abs(dVdx - 2.0 * xs) > GRADIENT_REL_TOL * np.maximum(1.0, np.abs(2.0 * xs))),
        ("dissipation", 2.0 * xs * fx + Hx > tol_diss),
        ("excess_outside_rho", (ax >= node.rho) & ((Hx < psix) | (psix <= 0.0))),
    ]
    bad = np.zeros(xs.shape, dtype=bool)
    for _, mask in checks:
        bad |= mask
    if not bad.any():
        return VerificationResult(ok=True)
    idx = int(np.argmax(bad))
    for name, mask in checks:
        if mask[idx]:
            return VerificationResult(
                ok=False,
                witness=float(xs[idx]),
                check=name,
                detail=f"node {node.name!r} fails {name} at x = {xs[idx]:.6g}",
            )
    raise AssertionError("unreachable")  # pragma: no cover


def invert_kinf(phi: KInfFunction, target: float, rel_tol: float = 1e-10,
                bracket_cap: float = 1e12) -> float:
    """Solve ``phi(s) = target`` for ``s >= 0`` by doubling bracket plus bisection.

    ``invert_kinf(phi, 0) == 0``.  The residual is driven below
    ``rel_tol * max(1, target)``, and the returned point sits on the upper
    side of the root (``phi(s) >= target``), so radii extracted this way
    never under-cover due to round-off.  If the bracket grows past
    ``bracket_cap`` the unboundedness assumption has failed and a
    ``ValueError`` is raised.
    """
    target = float(target)
    if target < 0.0:
        raise ValueError("target must be nonnegative")
    if target == 0.0:
        return 0.0
    tol = rel_tol * max(1.0, target)
    hi = 1.0
    while float(phi(hi)) < target:
        hi *= 2.0
        if hi > bracket_cap:
            raise ValueError("bracket expansion exceeded cap; function does not look unbounded")
    lo = 0.0 if hi == 1.0 else hi / 2.0
    for _ in range(500):
        mid = 0.5 * (lo + hi)
        val = float(phi(mid))
        if val >= target:
            if val - target <= tol:
                return mid
            hi = mid
        else:
            lo = mid
    val = float(phi(hi))
    if 0.0 <= val - target <= tol:
        return hi
    raise ValueError("bisection failed to reach the requested residual")


def _linear_stable(k: float = 1.0, rho: float = 1.0) -> SemiPassiveNode:
    k = float(k)
    if not k > 0.0:
        raise ValueError("linear_stable requires k > 0")
    return SemiPassiveNode(
        name=f"linear_stable(k={k:g})",
        f=lambda x: -k * x,
        V=lambda x: x ** 2,
        alpha=KInfFunction(lambda s: s ** 2, "s^2"),
        H=lambda x: 2.0 * k * x ** 2,
        psi=lambda s: 2.0 * k * s ** 2,
        rho=float(rho),
    )


def _bistable(rho: float = 2.0) -> SemiPassiveNode:
    # 2x(x - x^3) = -(2x^4 - 2x^2) exactly; H >= s^4 for |x| >= sqrt(2).
    return SemiPassiveNode(
        name="bistable",
        f=lambda x: x - x ** 3,
        V=lambda x: x ** 2,
        alpha=KInfFunction(lambda s: s ** 2, "s^2"),
        H=lambda x: 2.0 * x ** 4 - 2.0 * x ** 2,
        psi=lambda s: s ** 4,
        rho=float(rho),
    )


def _saturated_drift(rho: float = 2.0) -> SemiPassiveNode:
    # 2x(tanh x - x) = -(2x^2 - 2x tanh x); H >= s^2 iff x^2 >= 2x tanh x,
    # which holds from |x| = 2 on.
    return SemiPassiveNode(
        name="saturated_drift",
        f=lambda x: np.tanh(x) - x,
        V=lambda x: x ** 2,
        alpha=KInfFunction(lambda s: s ** 2, "s^2"),
        H=lambda x: 2.0 * x ** 2 - 2.0 * x * np.tanh(x),
        psi=lambda s: s ** 2,
        rho=float(rho),
    )


def _linear_unstable(rho: float = 1.0) -> SemiPassiveNode:
    # Deliberately uncertifiable (H < 0 < psi outside the ball); exists so the
    # gatekeeping path can be exercised end to end from a network-spec file.
    return SemiPassiveNode(
        name="linear_unstable",
        f=lambda x: x,
        V=lambda x: x ** 2,
        alpha=KInfFunction(lambda s: s ** 2, "s^2"),
        H=lambda x: -2.0 * x ** 2,
        psi=lambda s: s ** 2,
        rho=float(rho),
    )


_BUILTIN_FACTORIES = {
    "linear_stable": _linear_stable,
    "bistable": _bistable,
    "saturated_drift": _saturated_drift,
    "linear_unstable": _linear_unstable,
}


def builtin_node(name: str, **params) -> SemiPassiveNode:
    """Instantiate a catalogue model by tag.

    Tags: ``linear_stable`` (param ``k > 0``), ``bistable``,
    ``saturated_drift`` -- all three pass ``verify_semipassive`` with their
    default ``rho`` -- and ``linear_unstable``, which intentionally fails it.
    Every factory accepts a ``rho`` override.
    """
    try:
        factory = _BUILTIN_FACTORIES[name]
    except KeyError:
        known = ", ".join(sorted(_BUILTIN_FACTORIES))
        raise ValueError(f"unknown node model {name!r}; known models: {known}") from None
    return factory(**params)


def builtin_model_names() -> tuple[str, ...]:
    return tuple(sorted(_BUILTIN_FACTORIES))

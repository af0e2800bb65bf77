"""Fixed-step integration of the coupled network and certificate validation.

The closed loop is ``xdot = F(x) - gamma * L @ x`` with ``F`` stacking the
per-node drifts.  Integration is classical RK4 with a hard step-size guard
``dt * gamma * |L| <= 0.1`` (the certificates are uniform in the gain, so the
harness has to survive gains two orders of magnitude above ``gamma_o``; the
batch helpers shrink ``dt`` accordingly instead of failing).  The node-wise
coupling sum and the matrix form ``L @ x`` are cross-checked against each
other at a sampled cadence during every run.

Divergence is an explicit error carrying the (sample-resolution) blow-up
time; trajectories never store non-finite states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .certificate import BoundCertificate
from .digraph import DiGraph, build_laplacian, decompose
from .matrixlab import left_null_eigenvector, follower_lyapunov, spectral_norm
from .nodes import SemiPassiveNode

STABILITY_GUARD = 0.1
COUPLING_CHECK_TOL = 1e-12
_COUPLING_CHECK_EVERY = 100
_FINITE_CHECK_EVERY = 50
_MAX_STORED_SAMPLES = 4000


class StepSizeError(ValueError):
    """The requested step violates ``dt * gamma * |L| <= 0.1``."""


class DivergenceError(RuntimeError):
    """The state became non-finite during integration."""

    def __init__(self, t: float):
        super().__init__(f"state diverged (non-finite) around t = {t:.6g}")
        self.blow_up_time = t


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled trajectory; ``states[k]`` is the state at ``times[k]``.

    ``dt`` is the spacing between stored samples, which is the integration
    step times the recording stride.
    """

    times: np.ndarray
    states: np.ndarray
    gamma: float
    dt: float

    @property
    def n(self) -> int:
        return self.states.shape[1]

    def norms(self, indices: Optional[Sequence[int]] = None) -> np.ndarray:
        sub = self.states if indices is None else self.states[:, list(indices)]
        return np.linalg.norm(sub, axis=1)


@dataclass(frozen=True)
class BoundednessMetrics:
    """Sup-norm statistics of one trajectory.

    ``entry_time`` is the earliest stored time from which the norm stays
    inside radius ``r`` for the rest of the horizon, ``None`` if it never
    does.
    """

    sup_norm: float
    tail_sup: float
    entry_time: Optional[float]
    r: Optional[float]
    tail_fraction: float


def _drift(nodes) -> list[Callable]:
    return [n.f if isinstance(n, SemiPassiveNode) else n for n in nodes]


def _integrate(
    fs: list[Callable],
    weights: Optional[np.ndarray],
    L: np.ndarray,
    gamma: float,
    X0: np.ndarray,
    steps: int,
    dt: float,
    record_every: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Batched RK4 core: ``X0`` is ``(n, m)``, returns ``(times, (T, n, m))``.

    ``weights`` is the graph adjacency when ``L`` is its Laplacian (enables
    the node-wise coupling cross-check) or ``None`` for a generic linear
    term.
    """
    n, m = X0.shape
    gL = gamma * L
    degrees = weights.sum(axis=1)[:, None] if weights is not None else None

    def rhs(X: np.ndarray) -> np.ndarray:
        out = np.empty_like(X)
        for i, f in enumerate(fs):
            out[i] = f(X[i])
        out -= gL @ X
        return out

    stored = steps // record_every + 1
    states = np.empty((stored, n, m))
    states[0] = X0
    X = X0.copy()
    half = 0.5 * dt
    sixth = dt / 6.0
    # overflow/invalid warnings are expected en route to the explicit
    # divergence check below
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, steps + 1):
            k1 = rhs(X)
            k2 = rhs(X + half * k1)
            k3 = rhs(X + half * k2)
            k4 = rhs(X + dt * k3)
            X = X + sixth * (k1 + 2.0 * (k2 + k3) + k4)
            if k % _FINITE_CHECK_EVERY == 0 or k % record_every == 0 or k == steps:
                if not np.isfinite(X).all():
                    raise DivergenceError(k * dt)
            if weights is not None and k % _COUPLING_CHECK_EVERY == 0:
                nodewise = degrees * X - weights @ X
                matrix = L @ X
                if float(np.abs(nodewise - matrix).max()) > COUPLING_CHECK_TOL:
                    raise RuntimeError("node-wise and matrix coupling evaluations disagree")
            if k % record_every == 0:
                states[k // record_every] = X
    times = np.arange(stored) * (record_every * dt)
    return times, states


def simulate(
    nodes,
    graph: DiGraph,
    gamma: float,
    x0,
    horizon: float,
    dt: float,
    record_every: int = 1,
) -> Trajectory:
    """Integrate the closed loop from ``x0`` over ``[0, horizon]``.

    ``nodes`` may be ``SemiPassiveNode`` instances or bare vectorised drift
    callables.  Raises ``StepSizeError`` when the stability guard fails and
    ``DivergenceError`` when the state blows up.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    if horizon < dt:
        raise ValueError("horizon must be at least one step")
    L = build_laplacian(graph)
    if dt * gamma * spectral_norm(L) > STABILITY_GUARD * (1.0 + 1e-12):
        raise StepSizeError(
            f"dt * gamma * |L| = {dt * gamma * spectral_norm(L):.3g} exceeds {STABILITY_GUARD}"
        )
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (graph.n,):
        raise ValueError(f"x0 must have shape ({graph.n},)")
    steps = int(round(horizon / dt))
    times, states = _integrate(
        _drift(nodes), graph.weights, L, float(gamma), x0[:, None], steps, float(dt),
        int(record_every),
    )
    return Trajectory(times=times, states=states[:, :, 0], gamma=float(gamma),
                      dt=float(dt) * int(record_every))


def measure(traj: Trajectory, r: Optional[float] = None, tail_fraction: float = 0.2) -> BoundednessMetrics:
    """Sup norm, tail sup over the last ``tail_fraction`` of the horizon, and entry time."""
    norms = traj.norms()
    if norms.size == 0:
        raise ValueError("trajectory is empty")
    sup_norm = float(norms.max())
    t_end = float(traj.times[-1])
    tail_start = t_end - tail_fraction * (t_end - float(traj.times[0]))
    tail_sup = float(norms[traj.times >= tail_start - 1e-15].max())
    entry_time: Optional[float] = None
    if r is not None:
        above = np.nonzero(norms > r)[0]
        if above.size == 0:
            entry_time = float(traj.times[0])
        elif above[-1] < norms.size - 1:
            entry_time = float(traj.times[above[-1] + 1])
    return BoundednessMetrics(sup_norm=sup_norm, tail_sup=tail_sup,
                              entry_time=entry_time, r=r, tail_fraction=tail_fraction)


# ---------------------------------------------------------------------------
# certificate validation


@dataclass(frozen=True)
class RunCheck:
    name: str
    bound: float
    empirical_sup: float
    verdict: str              # "pass" | "refuted" | "inconclusive"
    witness_time: Optional[float] = None

    @property
    def margin(self) -> float:
        return self.bound - self.empirical_sup


@dataclass(frozen=True)
class RunResult:
    gamma: float
    ic_index: int
    checks: tuple[RunCheck, ...]
    trajectory: Trajectory


@dataclass(frozen=True)
class ValidationReport:
    """Aggregate of all (gamma, x0) validation runs."""

    runs: tuple[RunResult, ...]
    horizon: float
    required_horizon: float
    verdict: str              # "pass" | "refuted" | "inconclusive"
    refutations: tuple[RunCheck, ...] = field(default_factory=tuple)

    def to_text(self) -> str:
        lines = [
            "certificate validation report",
            "=============================",
            f"overall verdict: {self.verdict}",
            f"horizon: {self.horizon:.6g} (ultimate-bound checks need > {self.required_horizon:.6g})",
            "",
            f"{'gamma':>10} {'ic':>4} {'check':<22} {'bound':>12} {'empirical':>12} "
            f"{'margin':>12} {'verdict':>13}",
        ]
        for run in self.runs:
            for chk in run.checks:
                lines.append(
                    f"{run.gamma:>10.4g} {run.ic_index:>4d} {chk.name:<22} {chk.bound:>12.6g} "
                    f"{chk.empirical_sup:>12.6g} {chk.margin:>12.6g} {chk.verdict:>13}"
                )
        if self.refutations:
            lines.append("")
            lines.append("refutations (bug or assumption violation -- the bounds are guaranteed):")
            for chk in self.refutations:
                lines.append(f"  {chk.name}: sup {chk.empirical_sup:.6g} > bound {chk.bound:.6g} "
                             f"at t = {chk.witness_time}")
        return "\n".join(lines) + "\n"

    def to_kv_lines(self) -> str:
        """Flat key-value form of the report (one ``name = value`` per line)."""
        lines = [
            f"verdict = {self.verdict}",
            f"horizon = {self.horizon!r}",
            f"required_horizon = {self.required_horizon!r}",
            f"num_runs = {len(self.runs)}",
            f"num_refutations = {len(self.refutations)}",
        ]
        for run in self.runs:
            prefix = f"run_{run.gamma:g}_{run.ic_index}"
            for chk in run.checks:
                lines.append(f"{prefix}.{chk.name}.verdict = {chk.verdict}")
                lines.append(f"{prefix}.{chk.name}.bound = {chk.bound!r}")
                lines.append(f"{prefix}.{chk.name}.empirical_sup = {chk.empirical_sup!r}")
        return "\n".join(lines) + "\n"


def _phase_check(name: str, norms: np.ndarray, times: np.ndarray, bound: float,
                 t_from: float, horizon: float) -> RunCheck:
    if horizon <= t_from:
        return RunCheck(name=name, bound=bound, empirical_sup=math.nan, verdict="inconclusive")
    mask = times >= t_from - 1e-12
    sup = float(norms[mask].max())
    if sup <= bound:
        return RunCheck(name=name, bound=bound, empirical_sup=sup, verdict="pass")
    witness = float(times[mask][np.argmax(norms[mask])])
    return RunCheck(name=name, bound=bound, empirical_sup=sup, verdict="refuted",
                    witness_time=witness)


def validate_certificate(
    cert: BoundCertificate,
    nodes,
    graph: DiGraph,
    gamma_list: Sequence[float],
    x0_list: Sequence[np.ndarray],
    horizon: Optional[float] = None,
    dt: float = 0.01,
) -> ValidationReport:
    """Check the certified bounds against integrated trajectories.

    Preconditions: every gain in ``gamma_list`` is >= the certificate's
    ``gamma_o`` and every initial condition satisfies ``|x0| <= r_o``.  For
    each gain the step is shrunk as needed to respect the stability guard,
    and all initial conditions are integrated as one batch.  Ultimate-bound
    checks whose entry time is not inside the horizon come back
    ``inconclusive``.
    """
    gamma_list = [float(g) for g in gamma_list]
    for g in gamma_list:
        if g < cert.gamma_o:
            raise ValueError(f"gamma = {g} is below the certificate's gamma_o = {cert.gamma_o}")
    x0s = [np.asarray(x, dtype=float) for x in x0_list]
    for x in x0s:
        if x.shape != (graph.n,):
            raise ValueError(f"initial conditions must have shape ({graph.n},)")
        if float(np.linalg.norm(x)) > cert.r_o * (1.0 + 1e-12):
            raise ValueError(f"|x0| = {np.linalg.norm(x):.6g} exceeds the certificate's r_o = {cert.r_o}")
    if not x0s:
        raise ValueError("need at least one initial condition")

    dec = decompose(graph)
    lead_idx = list(dec.leaders)
    fol_idx = list(dec.followers)
    required_horizon = cert.T_f
    if horizon is None:
        horizon = 2.0 * cert.T_f + 10.0
    L = build_laplacian(graph)
    Lnorm = spectral_norm(L)
    fs = _drift(nodes)

    runs: list[RunResult] = []
    for gamma in gamma_list:
        dt_cap = STABILITY_GUARD / (gamma * Lnorm) if gamma * Lnorm > 0.0 else math.inf
        steps = max(1, int(math.ceil(horizon / min(dt, dt_cap))))
        dt_eff = horizon / steps
        record_every = max(1, steps // _MAX_STORED_SAMPLES)
        X0 = np.stack(x0s, axis=1)
        times, states = _integrate(fs, graph.weights, L, gamma, X0, steps, dt_eff, record_every)
        for k in range(len(x0s)):
            traj = Trajectory(times=times, states=states[:, :, k], gamma=gamma,
                              dt=dt_eff * record_every)
            lead_norms = traj.norms(lead_idx)
            checks = [
                _phase_check("leader_all_time", lead_norms, times, cert.R_ell_gub, 0.0, horizon),
                _phase_check("leader_ultimate", lead_norms, times, cert.r_ell, cert.T_ell, horizon),
            ]
            if fol_idx:
                fol_norms = traj.norms(fol_idx)
                checks += [
                    _phase_check("follower_all_time", fol_norms, times, cert.R_f_gub, 0.0, horizon),
                    _phase_check("follower_ultimate", fol_norms, times, cert.r_f, cert.T_f, horizon),
                ]
            runs.append(RunResult(gamma=gamma, ic_index=k, checks=tuple(checks), trajectory=traj))

    refutations = tuple(c for run in runs for c in run.checks if c.verdict == "refuted")
    if refutations:
        verdict = "refuted"
    elif any(c.verdict == "inconclusive" for run in runs for c in run.checks):
        verdict = "inconclusive"
    else:
        verdict = "pass"
    return ValidationReport(runs=tuple(runs), horizon=float(horizon),
                            required_horizon=float(required_horizon),
                            verdict=verdict, refutations=refutations)


# ---------------------------------------------------------------------------
# linear consensus benchmarks (single integrators, f == 0)


@dataclass(frozen=True)
class ConsensusReport:
    """Diagnostics of the single-integrator benchmark on one graph."""

    consensus_value: float
    conservation_error: float          # max |v_o.x_l(t) - v_o.x_l(0)|
    disagreement_monotone: bool        # Z(x_l(t)) nonincreasing sample to sample
    max_Z_increment: float
    sandwich_ok: bool                  # z |x|_A^2 <= Z <= zbar |x|_A^2 along the run
    final_consensus_error: float       # max_i |x_i(T) - consensus_value|
    follower_decay_rate: Optional[float]   # fitted exponent of the pinned follower system
    follower_Y_monotone: Optional[bool]

    @property
    def ok(self) -> bool:
        fol_ok = self.follower_decay_rate is None or (
            self.follower_decay_rate > 0.0 and bool(self.follower_Y_monotone)
        )
        return self.disagreement_monotone and self.sandwich_ok and fol_ok


def linear_consensus_suite(
    graph: DiGraph,
    gamma: float,
    x0,
    horizon: float,
    dt: float,
) -> ConsensusReport:
    """Run ``xdot = -gamma L x`` and check the Lyapunov diagnostics along it.

    Checks: conservation of the weighted leader average, monotone decay of the
    disagreement functional ``Z``, its two-sided comparison against the
    disagreement norm, convergence of every node to the weighted average of
    the initial leader states, and (when followers exist) exponential decay of
    the pinned follower system ``xdot_f = -M_f x_f`` with monotone
    ``Y = x_f.T R_f x_f``.
    """
    dec = decompose(graph)
    v = left_null_eigenvector(dec.L_ell)
    zeros = [lambda x: np.zeros_like(x)] * graph.n
    traj = simulate(zeros, graph, gamma, x0, horizon, dt)

    x_lead = traj.states[:, list(dec.leaders)]
    weighted_avg = x_lead @ v
    consensus_value = float(weighted_avg[0])
    conservation_error = float(np.abs(weighted_avg - consensus_value).max())

    # Z(x_l) = (x_l - 1 v.x_l).T V_o (x_l - 1 v.x_l), positive definite on
    # disagreement; nonincreasing along the linear flow.
    delta = x_lead - weighted_avg[:, None]
    Z = (delta ** 2) @ v
    increments = np.diff(Z)
    max_increment = float(increments.max()) if increments.size else 0.0
    z0_scale = max(1.0, float(Z[0]))
    disagreement_monotone = bool(max_increment <= 1e-10 * z0_scale)

    mean = x_lead.mean(axis=1)
    dA = np.linalg.norm(x_lead - mean[:, None], axis=1)
    n_ell = dec.n_ell
    if n_ell > 1:
        z_lo = float(v.min())
        offset = float(np.linalg.norm(v - np.full(n_ell, 1.0 / n_ell)))
        z_hi = float(v.max()) * (1.0 + math.sqrt(n_ell) * offset) ** 2
        slack = 1e-9 * z0_scale
        sandwich_ok = bool(
            (Z >= z_lo * dA ** 2 - slack).all() and (Z <= z_hi * dA ** 2 + slack).all()
        )
    else:
        sandwich_ok = True

    final_consensus_error = float(np.abs(traj.states[-1] - consensus_value).max())

    follower_rate: Optional[float] = None
    follower_Y_monotone: Optional[bool] = None
    if dec.n_f:
        M_f = dec.M_f
        dt_f = min(dt, STABILITY_GUARD / max(spectral_norm(M_f), 1e-12))
        steps = max(1, int(math.ceil(horizon / dt_f)))
        x0_f = np.asarray(x0, dtype=float)[list(dec.followers)]
        if not x0_f.any():
            x0_f = np.ones(dec.n_f)
        times_f, states_f = _integrate(
            [lambda x: np.zeros_like(x)] * dec.n_f,
            None, M_f, 1.0, x0_f[:, None], steps,
            horizon / steps, max(1, steps // _MAX_STORED_SAMPLES),
        )
        xf = states_f[:, :, 0]
        norms = np.linalg.norm(xf, axis=1)
        keep = norms > 1e-13 * max(norms[0], 1.0)
        if keep.sum() >= 2:
            coeffs = np.polyfit(times_f[keep], np.log(norms[keep]), 1)
            follower_rate = float(-coeffs[0])
        else:
            follower_rate = math.inf
        R_f = follower_lyapunov(M_f).P
        Y = np.einsum("ti,ij,tj->t", xf, R_f, xf)
        dY = np.diff(Y)
        follower_Y_monotone = bool(dY.size == 0 or float(dY.max()) <= 1e-10 * max(1.0, float(Y[0])))

    return ConsensusReport(
        consensus_value=consensus_value,
        conservation_error=conservation_error,
        disagreement_monotone=disagreement_monotone,
        max_Z_increment=max_increment,
        sandwich_ok=sandwich_ok,
        final_consensus_error=final_consensus_error,
        follower_decay_rate=follower_rate,
        follower_Y_monotone=follower_Y_monotone,
    )


def leader_storage_decrease_violations(
    traj: Trajectory,
    leaders: Sequence[int],
    v_o: np.ndarray,
    leader_nodes: Sequence[SemiPassiveNode],
    R_e: float,
    rho_bar: float,
) -> tuple[int, int]:
    """Count sampled violations of the certified storage decrease.

    Whenever the leader substate is far from consensus
    (``|x_l|_A > sqrt(n_ell) R_e``) and every leader coordinate is outside the
    dissipation-free radius (``|x_li| > rho_bar``), the weighted storage
    ``W = sum v_i V_i`` must decrease.  Returns ``(violations, samples_checked)``
    using forward difference quotients at sample resolution.
    """
    x_lead = traj.states[:, list(leaders)]
    n_ell = x_lead.shape[1]
    W = np.zeros(x_lead.shape[0])
    for i, node in enumerate(leader_nodes):
        W += float(v_o[i]) * np.asarray(node.V(x_lead[:, i]), dtype=float)
    mean = x_lead.mean(axis=1)
    dA = np.linalg.norm(x_lead - mean[:, None], axis=1)
    eligible = (dA > math.sqrt(n_ell) * R_e) & (np.abs(x_lead) > rho_bar).all(axis=1)
    eligible = eligible[:-1]
    quotients = np.diff(W) / np.diff(traj.times)
    checked = int(eligible.sum())
    violations = int((quotients[eligible] >= 0.0).sum())
    return violations, checked


def write_csv(traj: Trajectory, path) -> None:
    """Export a trajectory as CSV with header ``t, x1, ..., xn``."""
    header = "t, " + ", ".join(f"x{i + 1}" for i in range(traj.n))
    data = np.column_stack([traj.times, traj.states])
    np.savetxt(path, data, delimiter=",", header=header, comments="", fmt="%.17g")

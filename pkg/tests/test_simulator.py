import math

import numpy as np
import pytest

from netbound import (
    BoundCertificate,
    DiGraph,
    DivergenceError,
    StepSizeError,
    builtin_node,
    certificate_inputs,
    compute_certificate,
    leader_constants,
    leader_storage_decrease_violations,
    linear_consensus_suite,
    measure,
    simulate,
    validate_certificate,
    write_csv,
)

ZERO = lambda x: np.zeros_like(x)  # noqa: E731


def single() -> DiGraph:
    return DiGraph(np.zeros((1, 1)))


def two_cycle() -> DiGraph:
    return DiGraph.from_edges(2, [(1, 2, 1.0), (2, 1, 1.0)])


def three_cycle() -> DiGraph:
    return DiGraph.from_edges(3, [(1, 2, 1.0), (2, 3, 1.0), (3, 1, 1.0)])


def chain(n: int) -> DiGraph:
    return DiGraph.from_edges(n, [(i, i + 1, 1.0) for i in range(1, n)])


class TestSimulate:
    def test_scalar_linear_decay(self):
        traj = simulate([builtin_node("linear_stable")], single(), 1.0, [1.0], 1.0, 1e-3)
        assert abs(traj.states[-1, 0] - math.exp(-1.0)) <= 1e-8

    def test_two_cycle_eigenpair_decay(self):
        # x0 = (1, -1) is the eigenvector of -L with eigenvalue -2
        traj = simulate([ZERO, ZERO], two_cycle(), 1.0, [1.0, -1.0], 2.0, 1e-3)
        analytic = np.exp(-2.0 * traj.times)[:, None] * np.array([1.0, -1.0])
        assert np.abs(traj.states - analytic).max() <= 1e-10

    def test_uncoupled_bistable_reaches_stable_equilibrium(self):
        traj = simulate([builtin_node("bistable")], single(), 1.0, [0.1], 10.0, 1e-3)
        assert abs(traj.states[-1, 0] - 1.0) <= 1e-6

    def test_rk4_is_fourth_order(self):
        errors = []
        for dt in (0.1, 0.05):
            traj = simulate([builtin_node("linear_stable")], single(), 1.0, [1.0], 1.0, dt)
            errors.append(abs(traj.states[-1, 0] - math.exp(-1.0)))
        assert errors[0] / errors[1] >= 14.0

    def test_step_guard_rejected(self):
        with pytest.raises(StepSizeError):
            simulate([ZERO, ZERO], two_cycle(), 100.0, [1.0, 0.0], 1.0, 0.01)

    def test_divergence_reports_blow_up_time(self):
        blower = lambda x: x ** 3  # finite-time escape from x0 = 2  # noqa: E731
        with pytest.raises(DivergenceError) as err:
            simulate([blower], single(), 1.0, [2.0], 1.0, 1e-4)
        assert 0.0 < err.value.blow_up_time <= 1.0

    def test_record_every_thins_samples(self):
        traj = simulate([ZERO], single(), 1.0, [1.0], 1.0, 1e-3, record_every=10)
        assert traj.dt == pytest.approx(1e-2)
        spacing = np.diff(traj.times)
        assert np.allclose(spacing, spacing[0])

    def test_consensus_functional_conserved(self):
        # v_o.T L = 0 makes the weighted average invariant along the flow
        traj = simulate([ZERO] * 3, three_cycle(), 2.0, [1.0, 0.0, -1.0], 10.0, 1e-3)
        avg = traj.states.mean(axis=1)  # v_o = 1/3 * ones for the cycle
        assert np.abs(avg - avg[0]).max() <= 1e-9


class TestMeasure:
    def test_constant_zero(self):
        traj = simulate([ZERO], single(), 1.0, [0.0], 1.0, 1e-2)
        metrics = measure(traj, r=0.5)
        assert metrics.sup_norm == 0.0
        assert metrics.entry_time == 0.0

    def test_decay_entry_time(self):
        traj = simulate([builtin_node("linear_stable")], single(), 1.0, [1.0], 10.0, 1e-3)
        metrics = measure(traj, r=math.exp(-2.0))
        assert abs(metrics.entry_time - 2.0) <= 2e-3

    def test_tail_below_sup_for_decay(self):
        traj = simulate([builtin_node("linear_stable")], single(), 1.0, [1.0], 10.0, 1e-3)
        metrics = measure(traj)
        assert metrics.tail_sup < metrics.sup_norm

    def test_entry_time_nonincreasing_in_radius(self):
        traj = simulate([builtin_node("linear_stable")], single(), 1.0, [1.0], 10.0, 1e-3)
        times = [measure(traj, r=r).entry_time for r in (0.2, 0.4, 0.8)]
        assert times[0] >= times[1] >= times[2]

    def test_never_inside_gives_none(self):
        traj = simulate([ZERO], single(), 1.0, [1.0], 1.0, 1e-2)
        assert measure(traj, r=0.5).entry_time is None


class TestLinearConsensusSuite:
    def test_three_cycle(self):
        report = linear_consensus_suite(three_cycle(), 1.0, [1.0, 0.0, -1.0], 15.0, 1e-3)
        assert report.ok
        assert abs(report.consensus_value) <= 1e-12
        assert report.conservation_error <= 1e-9
        assert report.final_consensus_error <= 1e-6
        assert report.follower_decay_rate is None

    def test_chain_converges_to_leader_value(self):
        report = linear_consensus_suite(chain(3), 1.0, [0.7, -0.3, 0.2], 25.0, 1e-3)
        assert report.ok
        assert report.consensus_value == pytest.approx(0.7)
        assert report.final_consensus_error <= 1e-6
        assert report.follower_decay_rate > 0.0
        assert report.follower_Y_monotone

    def test_disagreement_monotone_every_sample(self):
        report = linear_consensus_suite(three_cycle(), 3.0, [2.0, -1.0, 0.5], 10.0, 1e-3)
        assert report.disagreement_monotone
        assert report.sandwich_ok


class TestValidateCertificate:
    def _demo(self):
        g = DiGraph.from_edges(4, [(1, 2, 1), (2, 1, 1), (1, 3, 1), (2, 4, 1)])
        nodes = [builtin_node("bistable") for _ in range(4)]
        inputs = certificate_inputs(g, nodes, 1.0, 5.0, 1.0)
        return g, nodes, compute_certificate(inputs)

    def _ball_sample(self, rng, n, r_o, count):
        out = []
        for _ in range(count):
            d = rng.standard_normal(n)
            d /= np.linalg.norm(d)
            out.append(r_o * rng.uniform() ** (1.0 / n) * d)
        return out

    def test_all_leader_cycle_holds(self):
        g = three_cycle()
        nodes = [builtin_node("bistable") for _ in range(3)]
        cert = compute_certificate(certificate_inputs(g, nodes, 1.0, 3.0, 1.0))
        x0s = self._ball_sample(np.random.default_rng(7), 3, 3.0, 10)
        report = validate_certificate(cert, nodes, g, [1.0, 10.0], x0s, dt=0.01)
        assert report.verdict == "pass"

    def test_linear_chain_wide_margins(self):
        g = DiGraph.from_edges(2, [(1, 2, 1.0)])
        nodes = [builtin_node("linear_stable"), builtin_node("linear_stable")]
        cert = compute_certificate(certificate_inputs(g, nodes, 1.0, 1.0, 1.0))
        x0s = self._ball_sample(np.random.default_rng(3), 2, 1.0, 5)
        report = validate_certificate(cert, nodes, g, [1.0, 5.0], x0s, dt=0.005)
        assert report.verdict == "pass"
        for run in report.runs:
            for check in run.checks:
                assert check.margin > 0.1 * check.bound

    def test_gamma_below_gamma_o_rejected(self):
        g, nodes, cert = self._demo()
        with pytest.raises(ValueError, match="gamma"):
            validate_certificate(cert, nodes, g, [0.5], [np.zeros(4)])

    def test_initial_condition_outside_ball_rejected(self):
        g, nodes, cert = self._demo()
        with pytest.raises(ValueError, match="r_o"):
            validate_certificate(cert, nodes, g, [1.0], [np.full(4, 10.0)])

    def test_short_horizon_inconclusive(self):
        g, nodes, cert = self._demo()
        report = validate_certificate(cert, nodes, g, [1.0], [np.ones(4)], horizon=1.0)
        assert report.verdict == "inconclusive"
        assert report.required_horizon == cert.T_f

    def test_report_text_contains_margins(self):
        g, nodes, cert = self._demo()
        report = validate_certificate(cert, nodes, g, [1.0], [np.ones(4)], horizon=1.0)
        text = report.to_text()
        assert "margin" in text and "inconclusive" in text

    def test_kv_document_drives_validation(self):
        # the serialized certificate is a full interface: load it back and
        # validate against fresh trajectories
        g = DiGraph.from_edges(2, [(1, 2, 1.0)])
        nodes = [builtin_node("linear_stable"), builtin_node("linear_stable")]
        cert = compute_certificate(certificate_inputs(g, nodes, 1.0, 1.0, 1.0))
        loaded = BoundCertificate.from_kv_lines(cert.to_kv_lines())
        report = validate_certificate(loaded, nodes, g, [1.0], [np.array([0.6, -0.6])], dt=0.005)
        assert report.verdict == "pass"


class TestStorageDecrease:
    def test_no_violations_outside_certified_region(self):
        g = two_cycle()
        nodes = [builtin_node("bistable"), builtin_node("bistable")]
        inputs = certificate_inputs(g, nodes, 1.0, 6.0, 1.0)
        lead = leader_constants(inputs)
        # disagreement-heavy start, all coordinates outside rho_bar
        traj = simulate(nodes, g, 1.0, [4.0, -2.5], 5.0, 1e-3)
        violations, checked = leader_storage_decrease_violations(
            traj, inputs.decomposition.leaders, inputs.leader_lyap.v_o,
            inputs.leader_nodes, lead.R_e, lead.rho_bar,
        )
        assert checked > 0
        assert violations == 0


class TestCsvExport:
    def test_roundtrip(self, tmp_path):
        traj = simulate([builtin_node("linear_stable")], single(), 1.0, [1.0], 1.0, 1e-2)
        path = tmp_path / "traj.csv"
        write_csv(traj, path)
        header = path.read_text().splitlines()[0]
        assert header == "t, x1"
        data = np.loadtxt(path, delimiter=",", skiprows=1)
        assert np.allclose(data[:, 0], traj.times)
        assert np.allclose(data[:, 1], traj.states[:, 0])

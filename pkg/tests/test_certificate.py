import math

import numpy as np
import pytest

from netbound import (
    BoundCertificate,
    CertificateError,
    DiGraph,
    KInfFunction,
    SemiPassiveNode,
    builtin_node,
    certificate_inputs,
    check_uniformity,
    compute_certificate,
    all_time_constants,
    follower_constants,
    leader_constants,
)

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)


def two_cycle() -> DiGraph:
    return DiGraph.from_edges(2, [(1, 2, 1.0), (2, 1, 1.0)])


def single_node_inputs(model="linear_stable", gamma_o=1.0, r_o=1.0, **params):
    g = DiGraph(np.zeros((1, 1)))
    return certificate_inputs(g, [builtin_node(model, **params)], gamma_o, r_o, 1.0)


def bistable_pair_inputs(gamma_o=1.0, r_o=5.0, epsilon=1.0):
    nodes = [builtin_node("bistable"), builtin_node("bistable")]
    return certificate_inputs(two_cycle(), nodes, gamma_o, r_o, epsilon)


def chain2_inputs(gamma_o=1.0, r_o=1.0, epsilon=1.0):
    g = DiGraph.from_edges(2, [(1, 2, 1.0)])
    nodes = [builtin_node("linear_stable"), builtin_node("linear_stable")]
    return certificate_inputs(g, nodes, gamma_o, r_o, epsilon)


def demo_inputs(gamma_o=1.0, r_o=5.0, epsilon=1.0):
    g = DiGraph.from_edges(4, [(1, 2, 1), (2, 1, 1), (1, 3, 1), (2, 4, 1)])
    nodes = [builtin_node("bistable") for _ in range(4)]
    return certificate_inputs(g, nodes, gamma_o, r_o, epsilon)


class TestLeaderConstants:
    def test_single_always_dissipative_leader(self):
        # H >= 0 everywhere -> zero offset; single leader -> R_e = 0, beta = rho
        lead = leader_constants(single_node_inputs())
        assert lead.H_ell == 0.0
        assert lead.R_e == 0.0
        assert lead.beta == 1.0

    def test_bistable_pair_offset_and_radius(self):
        # 1-d calculus: max of 2x^2 - 2x^4 on [-2, 2] is 1/2 at x^2 = 1/2;
        # v = (1/2, 1/2) makes the weighted offset 1/2, and lambda_2(Q_o) = 2.
        lead = leader_constants(bistable_pair_inputs())
        assert math.isclose(lead.H_ell, 0.5, rel_tol=1e-9)
        assert math.isclose(lead.R_e, SQRT3 / 2.0, rel_tol=1e-9)
        assert math.isclose(lead.beta, SQRT2 * (2.0 + SQRT3), rel_tol=1e-9)

    def test_sigma_uses_the_worst_weighted_axis(self):
        lead = leader_constants(bistable_pair_inputs())
        assert math.isclose(lead.sigma, 0.5 * lead.beta ** 2, rel_tol=1e-12)

    def test_radius_extraction_inverts_the_storage_floor(self):
        # W(y) = 0.5 |y|^2 here, so W <= sigma caps |y| at sqrt(2 sigma)
        lead = leader_constants(bistable_pair_inputs())
        assert math.isclose(lead.r_ell, math.sqrt(lead.sigma / 0.5), rel_tol=1e-9)

    def test_sigma_o_covers_the_initial_ball(self):
        lead_small = leader_constants(bistable_pair_inputs(r_o=1.0))
        lead_big = leader_constants(bistable_pair_inputs(r_o=50.0))
        assert lead_small.sigma_o == lead_small.sigma  # beta dominates
        assert math.isclose(lead_big.sigma_o, 0.5 * 50.0 ** 2, rel_tol=1e-9)

    def test_eps_ro_clamps_at_epsilon(self):
        # the dissipation excess on the shell dwarfs epsilon for this network
        lead = leader_constants(bistable_pair_inputs())
        assert math.isclose(lead.eps_ro, 1.0, rel_tol=1e-12)
        assert math.isclose(lead.T_ell, lead.sigma_o, rel_tol=1e-12)


class TestFollowerConstants:
    def test_two_node_chain_basics(self):
        inputs = chain2_inputs()
        lead = leader_constants(inputs)
        fol = follower_constants(inputs, lead)
        assert fol.H_f == 0.0
        assert math.isclose(fol.p_bar, 1.0, rel_tol=1e-12)

    def test_beta1_substitution_identity(self):
        # M_f = [1], P = [1], S = [2]: beta_1 = 1 + r_ell + sqrt(1/2)
        inputs = chain2_inputs()
        lead = leader_constants(inputs)
        fol = follower_constants(inputs, lead)
        assert math.isclose(fol.beta_1, 1.0 + lead.r_ell + math.sqrt(0.5), rel_tol=1e-12)

    def test_df_reduces_when_offset_vanishes(self):
        inputs = chain2_inputs()
        lead = leader_constants(inputs)
        fol = follower_constants(inputs, lead)
        assert math.isclose(
            fol.d_f, 2.0 * fol.R_ell_guub * math.sqrt(fol.c / 2.0), rel_tol=1e-12
        )

    def test_no_followers_returns_none(self):
        inputs = bistable_pair_inputs()
        lead = leader_constants(inputs)
        assert follower_constants(inputs, lead) is None


class TestGoldenChainPipeline:
    """Formula-by-formula recomputation of the 2-node chain with
    linear_stable(1) nodes, gamma_o = r_o = epsilon = 1.

    Every block is hand-invertible: leaders = {1} with v = [1], followers =
    {2} with M_f = [1], P = [1], S = [2].  The straight-line arithmetic below
    is kept independent of the library so it can catch sign and wiring
    mistakes in the pipeline.
    """

    def expected(self) -> dict:
        gamma_o = r_o = epsilon = 1.0
        rho = 1.0
        H_ell = 0.0                       # H = 2x^2 >= 0 on [-1, 1]
        R_e = 0.0                         # single leader
        beta = math.sqrt(1) * (rho + 2 * R_e)
        sigma = 1.0 * beta ** 2
        r_ell = math.sqrt(sigma / 1.0)
        sigma_o = 1.0 * max(r_o, beta) ** 2
        # shell is exactly |y| = 1 where Psi = 2 y^2 = 2 > epsilon
        eps_ro = min(2.0, epsilon)
        T_ell = sigma_o / eps_ro
        H_f = 0.0
        p_bar = 1.0                       # |P A_lf| = |[1]|
        lam1 = 2.0
        c = 0.5                           # A_lf.T P.T S^-1 P A_lf = [1/2]
        R_ell_guub = math.sqrt(H_ell * T_ell + sigma_o)
        d_f = math.sqrt(4 * c * R_ell_guub ** 2 / lam1 + 8 * H_f / (lam1 * gamma_o))
        sigma_f = 1.0 * d_f ** 2
        sigma_fo = 1.0 * r_o ** 2
        r_bar_o = math.sqrt(max(sigma_fo, sigma_f) / 1.0)
        beta_1 = 1.0 + 2 * p_bar * r_ell / lam1 + math.sqrt((epsilon + H_f) / (gamma_o * lam1))
        sigma_1 = 1.0 * beta_1 ** 2
        r_f = math.sqrt(sigma_1 / 1.0)
        T_f = T_ell + max(sigma_fo, sigma_f) / epsilon
        sigma_ell = 1.0 * r_o ** 2
        R_ell_gub = math.sqrt(sigma_ell + H_ell * T_ell + r_ell)
        d_f_gub = math.sqrt(4 * c * R_ell_gub ** 2 / lam1)
        R_f_gub = math.sqrt(max(sigma_fo, 1.0 * d_f_gub ** 2) / 1.0)
        return dict(
            H_ell=H_ell, R_e=R_e, beta=beta, sigma=sigma, r_ell=r_ell,
            sigma_o=sigma_o, eps_ro=eps_ro, T_ell=T_ell, H_f=H_f, p_bar=p_bar,
            R_ell_guub=R_ell_guub, d_f=d_f, sigma_f=sigma_f, sigma_fo=sigma_fo,
            r_bar_o=r_bar_o, beta_1=beta_1, sigma_1=sigma_1, r_f=r_f, T_f=T_f,
            sigma_ell=sigma_ell, R_ell_gub=R_ell_gub, R_f_gub=R_f_gub,
        )

    def test_full_pipeline_matches_independent_recomputation(self):
        cert = compute_certificate(chain2_inputs())
        for key, value in self.expected().items():
            got = getattr(cert, key)
            assert math.isclose(got, value, rel_tol=1e-9, abs_tol=1e-9), (key, got, value)

    def test_frozen_golden_values(self):
        cert = compute_certificate(chain2_inputs())
        assert math.isclose(cert.r_ell, 1.0, abs_tol=1e-9)
        assert math.isclose(cert.T_ell, 1.0, abs_tol=1e-9)
        assert math.isclose(cert.beta_1, 2.0 + SQRT2 / 2.0, abs_tol=1e-9)
        assert math.isclose(cert.r_f, 2.0 + SQRT2 / 2.0, abs_tol=1e-9)
        assert math.isclose(cert.T_f, 2.0, abs_tol=1e-9)
        assert math.isclose(cert.R_ell_gub, SQRT2, abs_tol=1e-9)
        assert math.isclose(cert.R_f_gub, SQRT2, abs_tol=1e-9)


class TestAllTimeBounds:
    def test_single_node_bound_contains_initial_ball(self):
        for r_o in (0.5, 1.0, 3.0, 10.0):
            cert = compute_certificate(single_node_inputs(r_o=r_o))
            assert cert.R_ell_gub >= r_o

    def test_zero_offset_simplification(self):
        inputs = single_node_inputs(r_o=2.0)
        lead = leader_constants(inputs)
        cor = all_time_constants(inputs, lead, None)
        assert lead.H_ell == 0.0
        assert math.isclose(cor.R_ell_gub, math.sqrt(cor.sigma_ell + lead.r_ell), rel_tol=1e-9)
        assert cor.R_f_gub is None

    def test_all_time_radii_contain_the_initial_ball(self):
        for make in (chain2_inputs, bistable_pair_inputs, demo_inputs):
            cert = compute_certificate(make())
            assert cert.R_ell_gub >= cert.r_o * (1.0 - 1e-12)
            if cert.R_f_gub is not None:
                assert cert.R_f_gub >= cert.r_o * (1.0 - 1e-12)


class TestCertificateInvariants:
    def test_deterministic_bit_for_bit(self):
        a = compute_certificate(demo_inputs())
        b = compute_certificate(demo_inputs())
        assert a == b

    def test_radii_do_not_depend_on_initial_radius(self):
        a = compute_certificate(demo_inputs(r_o=5.0))
        b = compute_certificate(demo_inputs(r_o=10.0))
        assert a.r_ell == b.r_ell
        assert a.r_f == b.r_f
        assert b.sigma_o >= a.sigma_o
        assert b.T_ell >= a.T_ell

    def test_monotone_in_gamma_o(self):
        certs = [compute_certificate(demo_inputs(gamma_o=g)) for g in (1.0, 10.0, 100.0)]
        for name in ("R_e", "beta", "d_f", "beta_1"):
            vals = [getattr(c, name) for c in certs]
            assert vals[0] >= vals[1] >= vals[2]
        assert certs[0].R_e > certs[1].R_e > certs[2].R_e  # strict: H_ell + eps > 0

    def test_beta_dominates_the_dissipation_radius(self):
        for make in (chain2_inputs, bistable_pair_inputs, demo_inputs):
            inputs = make()
            lead = leader_constants(inputs)
            n_ell = inputs.decomposition.n_ell
            assert lead.beta >= math.sqrt(n_ell) * lead.rho_bar

    def test_certified_ball_contains_dissipation_free_region(self):
        for make in (chain2_inputs, bistable_pair_inputs, demo_inputs):
            lead = leader_constants(make())
            assert lead.r_ell >= lead.rho_bar

    def test_all_constants_finite_nonnegative(self):
        cert = compute_certificate(demo_inputs())
        for name in cert.__dataclass_fields__:
            value = getattr(cert, name)
            if value is None:
                continue
            assert math.isfinite(value), name
            assert value >= 0.0, name

    def test_check_uniformity_passes(self):
        report = check_uniformity(demo_inputs())
        assert report.ok, report.summary()
        assert report.gamma_sweep_identical
        assert report.r_ell_uniform_in_r_o and report.r_f_uniform_in_r_o

    def test_check_uniformity_without_followers(self):
        report = check_uniformity(bistable_pair_inputs())
        assert report.ok, report.summary()


class TestGuards:
    def test_non_quadratic_storage_trips_cross_check(self):
        quartic = SemiPassiveNode(
            name="quartic", f=lambda x: -x, V=lambda x: x ** 4,
            alpha=KInfFunction(lambda s: s ** 4, "s^4"),
            H=lambda x: 2 * x ** 2, psi=lambda s: s ** 2, rho=1.0,
        )
        g = DiGraph(np.zeros((1, 1)))
        inputs = certificate_inputs(g, [quartic], 1.0, 2.0, 1.0)
        with pytest.raises(CertificateError, match="quadratic"):
            compute_certificate(inputs)

    def test_rejects_nonpositive_analysis_scalars(self):
        g = DiGraph(np.zeros((1, 1)))
        with pytest.raises(ValueError):
            certificate_inputs(g, [builtin_node("linear_stable")], 0.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            certificate_inputs(g, [builtin_node("linear_stable")], 1.0, -1.0, 1.0)

    def test_rejects_wrong_node_count(self):
        with pytest.raises(ValueError, match="expected"):
            certificate_inputs(two_cycle(), [builtin_node("bistable")], 1.0, 1.0, 1.0)


class TestSerialization:
    def test_kv_roundtrip(self):
        cert = compute_certificate(demo_inputs())
        again = BoundCertificate.from_kv_lines(cert.to_kv_lines())
        assert again == cert

    def test_kv_roundtrip_without_followers(self):
        cert = compute_certificate(bistable_pair_inputs())
        text = cert.to_kv_lines()
        assert "r_f" not in text.split()
        assert BoundCertificate.from_kv_lines(text) == cert

    def test_kv_rejects_unknown_key(self):
        with pytest.raises(ValueError, match="unknown certificate key"):
            BoundCertificate.from_kv_lines("bogus = 1.0\n")

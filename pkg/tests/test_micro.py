"""Microscopic spatial Lotka-Volterra models and the system-size schedule."""

import numpy as np
import pytest

import altsim as al

PSET = al.EcologyParams(lam=2, K=4, delta=1, nu=1, gamma=2, eta=2, rho=1)


@pytest.fixture(scope="module")
def lc():
    return al.derive_limit_constants(PSET)


def zero_sp():
    return al.ScalingParams(N=1)


class TestAcpModel:
    def test_classical_lv_attractor_without_altruists(self, lc):
        # A == 0, all size-level rates zero: classical Lotka-Volterra in (H, P),
        # converging to the equilibrium pair at frequency 0.
        g = al.build_deme_graph("single")
        model = al.acp_model(PSET, zero_sp(), g)
        cfg = al.IntegratorConfig(dt=1e-3, t_end=150.0, record_stride=150_000)
        x0 = al.AcpState(A=np.array([0.0]), C=np.array([1.0]), P=np.array([0.5]))
        _, rec = al.run_batch(model, x0.flat()[None, :], cfg, seed=0, replicas=[0])
        h_eq, p_eq = al.equilibrium_pair(PSET, lc, 0.0)
        assert rec[-1, 0, 0] == 0.0  # A stays extinct
        assert abs(rec[-1, 0, 1] - h_eq) < 1e-8
        assert abs(rec[-1, 0, 2] - p_eq) < 1e-8

    def test_type_exchangeability_at_zero_cost(self):
        # symmetric A = C with alpha = 0: the two host types feel identical drift
        g = al.build_deme_graph("torus1d", 4)
        sp = al.ScalingParams(N=1, kappa_h=0.1, kappa_p=0.2, iota_h=0.3, iota_p=0.1)
        model = al.acp_model(PSET, sp, g)
        rng = np.random.default_rng(3)
        a = rng.uniform(0.5, 2.0, 4)
        pvec = rng.uniform(0.2, 1.0, 4)
        x = np.concatenate([a, a, pvec])[None, :]
        drift = model.drift(x, 0.0)
        assert np.allclose(drift[0, :4], drift[0, 4:8], atol=1e-14)

    def test_immigration_ratio_split(self):
        g = al.build_deme_graph("single")
        sp = al.ScalingParams(N=1, iota_h=0.5)
        model = al.acp_model(PSET, sp, g)
        x = np.array([[1.0, 3.0, 0.0]])  # A=1, C=3: immigration splits 1/4 vs 3/4
        drift = model.drift(x, 0.0)
        base_a = 1.0 * (PSET.lam * (1 - 4.0 / PSET.K))
        base_c = 3.0 * (PSET.lam * (1 - 4.0 / PSET.K))
        assert drift[0, 0] == pytest.approx(base_a + 0.5 * 0.25, abs=1e-14)
        assert drift[0, 1] == pytest.approx(base_c + 0.5 * 0.75, abs=1e-14)


class TestHfpModel:
    def test_boundary_frequencies_are_invariant(self):
        g = al.build_deme_graph("complete_uniform", 3)
        sp = al.ScalingParams(N=1, kappa_h=0.2, alpha=0.4, iota_h=0.1, iota_p=0.1)
        model = al.hfp_model(PSET, sp, g)
        for f0 in (0.0, 1.0):
            x = np.concatenate([np.full(3, 1.3), np.full(3, f0), np.full(3, 0.7)])[None, :]
            drift = model.drift(x, 0.0)
            diff = model.diffusion(x, 0.0)
            assert np.allclose(drift[0, 3:6], 0.0, atol=1e-15)
            assert np.allclose(diff[0, 3:6], 0.0, atol=1e-15)

    def test_uniform_hosts_reduce_migration(self):
        g = al.build_deme_graph("torus1d", 4)
        sp = al.ScalingParams(N=1, kappa_h=0.3)
        model = al.hfp_model(PSET, sp, g)
        f = np.array([0.1, 0.4, 0.6, 0.9])
        x = np.concatenate([np.full(4, 2.0), f, np.zeros(4)])[None, :]
        drift = model.drift(x, 0.0)
        expected = 0.3 * (g.m @ f - f)
        assert np.allclose(drift[0, 4:8], expected, atol=1e-14)

    def test_frequency_stays_in_unit_interval(self):
        g = al.build_deme_graph("single")
        sp = al.ScalingParams(N=1, beta_h=0.4, beta_p=0.2, iota_h=0.6, iota_p=0.2)
        model = al.hfp_model(PSET, sp, g)
        x0 = al.HfpState(H=np.array([1.5]), F=np.array([0.5]), P=np.array([1.0]))
        cfg = al.IntegratorConfig(dt=1e-3, t_end=20.0, record_stride=1)
        _, rec = al.run_batch(model, np.tile(x0.flat(), (8, 1)), cfg, seed=4, replicas=range(8))
        f_vals = rec[:, :, 1]
        assert np.all((f_vals >= 0.0) & (f_vals <= 1.0))

    def test_positivity_with_immigration_floor(self):
        g = al.build_deme_graph("single")
        sp = al.ScalingParams(N=1, beta_h=0.1, beta_p=0.1, iota_h=0.16, iota_p=0.1)
        assert sp.iota_h >= 1.5 * sp.beta_h and sp.iota_p >= sp.beta_p
        model = al.hfp_model(PSET, sp, g)
        x0 = al.HfpState(H=np.array([1.6]), F=np.array([0.5]), P=np.array([1.1]))
        cfg = al.IntegratorConfig(dt=1e-3, t_end=50.0, record_stride=10)
        _, rec = al.run_batch(model, np.tile(x0.flat(), (4, 1)), cfg, seed=6, replicas=range(4))
        assert np.all(rec[:, :, 0] > 0)
        assert np.all(rec[:, :, 2] > 0)

    def test_acp_hfp_same_law_moments(self):
        # Both parameterizations describe the same law: F mean/variance at t=1
        # agree within 3 combined MC standard errors.
        g = al.build_deme_graph("single")
        sp = al.ScalingParams(N=1, alpha=0.1, beta_h=0.2, beta_p=0.1, iota_h=0.3, iota_p=0.1)
        cfg = al.IntegratorConfig(dt=1e-3, t_end=1.0, record_stride=1000)
        n = 2000
        a0, c0, p0 = 0.9, 0.9, 1.1
        acp0 = al.AcpState(A=np.array([a0]), C=np.array([c0]), P=np.array([p0]))
        _, rec_acp = al.acp_run_records(PSET, sp, g, acp0, cfg, seed=11, n_replicas=n)
        f_acp = rec_acp[-1, :, 0] / np.maximum(rec_acp[-1, :, 0] + rec_acp[-1, :, 1], 1e-12)
        hfp0 = acp0.to_hfp()
        _, rec_hfp = al.hfp_run_records(PSET, sp, g, hfp0, cfg, seed=12, n_replicas=n)
        f_hfp = rec_hfp[-1, :, 1]
        se_mean = np.sqrt(f_acp.var(ddof=1) / n + f_hfp.var(ddof=1) / n)
        assert abs(f_acp.mean() - f_hfp.mean()) < 3 * se_mean
        se_var = np.sqrt(2.0 / (n - 1)) * (f_acp.var(ddof=1) + f_hfp.var(ddof=1)) / 2
        assert abs(f_acp.var(ddof=1) - f_hfp.var(ddof=1)) < 3 * se_var


class TestScalingSchedule:
    def test_limit_normalization_exact(self, lc):
        sched = al.ScalingSchedule(PSET, kappa=1.0, alpha=1.0, beta_target=1.0)
        for n in (1, 10, 100, 1000):
            sp = sched.params_for(n)
            assert sp.kappa_h * n == pytest.approx(1.0, abs=1e-14)
            assert sp.alpha * n == pytest.approx(1.0, abs=1e-14)
            assert sp.beta_h * n * lc.b == pytest.approx(1.0, rel=1e-14)

    def test_assumptions_hold_for_large_n(self):
        # the level-N inequalities kick in once the O(1/N) rates are small enough
        sched = al.ScalingSchedule(PSET, kappa=1.0, alpha=1.0, beta_target=1.0)
        for n in (50, 200, 800, 10_000):
            rep = al.check_assumptions(PSET, sched.params_for(n))
            assert rep.all_ok, f"N={n}: {rep}"

    def test_immigration_never_vanishes(self):
        sched = al.ScalingSchedule(PSET, kappa=0.0 + 1e-12, alpha=0.5, beta_target=1e-9)
        sp = sched.params_for(10)
        assert sp.iota_h >= sched.iota_floor / 10
        assert sp.iota_p >= sched.iota_floor / 10


class TestRescaledRun:
    def test_n_equal_one_matches_plain_run(self):
        g = al.build_deme_graph("single")
        sched = al.ScalingSchedule(PSET, kappa=1.0, alpha=1.0, beta_target=1.0)
        x0 = al.equilibrium_hfp_state(PSET, g, 0.5)
        cfg = al.IntegratorConfig(dt=1e-3, t_end=1.0)
        path = al.rescaled_frequency_run(PSET, sched, g, 1, 1.0, cfg, seed=5, x0=x0, slow_du=0.1)
        sp1 = sched.params_for(1)
        plain_cfg = al.IntegratorConfig(dt=1e-3, t_end=1.0, record_stride=100)
        _, rec = al.hfp_run_records(PSET, sp1, g, x0, plain_cfg, seed=5, n_replicas=1)
        assert np.allclose(path.states, rec[:, 0, :])

    def test_martingale_frequency_without_migration_or_selection(self):
        # kappa = alpha = 0 limits: F has zero drift on the slow scale
        g = al.build_deme_graph("single")
        sched = al.ScalingSchedule(PSET, kappa=1e-12, alpha=1e-12, beta_target=1.0)
        x0 = al.equilibrium_hfp_state(PSET, g, 0.5)
        cfg = al.IntegratorConfig(dt=1e-3, t_end=1.0)
        times, rec = al.rescaled_frequency_ensemble(
            PSET, sched, g, 50, 1.0, cfg, seed=31, x0=x0, slow_du=0.05, n_replicas=200
        )
        f_final = rec[-1, :, 1]
        stderr = f_final.std(ddof=1) / np.sqrt(f_final.size)
        assert abs(f_final.mean() - 0.5) < 3 * stderr

    def test_slow_grid_spacing(self):
        g = al.build_deme_graph("single")
        sched = al.ScalingSchedule(PSET, kappa=1.0, alpha=1.0, beta_target=1.0)
        x0 = al.equilibrium_hfp_state(PSET, g, 0.3)
        cfg = al.IntegratorConfig(dt=1e-3, t_end=1.0)
        path = al.rescaled_frequency_run(PSET, sched, g, 20, 0.5, cfg, seed=5, x0=x0, slow_du=0.05)
        assert np.allclose(np.diff(path.times), 0.05)
        assert path.meta["N"] == 20
        assert path.states.shape == (11, 3)


class TestStates:
    def test_acp_validation(self):
        with pytest.raises(ValueError):
            al.AcpState(A=np.array([-1.0]), C=np.array([1.0]), P=np.array([0.0]))

    def test_hfp_validation(self):
        with pytest.raises(ValueError):
            al.HfpState(H=np.array([0.0]), F=np.array([0.5]), P=np.array([1.0]))
        with pytest.raises(ValueError):
            al.HfpState(H=np.array([1.0]), F=np.array([1.5]), P=np.array([1.0]))

    def test_acp_to_hfp(self):
        s = al.AcpState(A=np.array([1.0, 0.0]), C=np.array([3.0, 2.0]), P=np.array([0.5, 0.5]))
        h = s.to_hfp()
        assert np.allclose(h.H, [4.0, 2.0])
        assert np.allclose(h.F, [0.25, 0.0])

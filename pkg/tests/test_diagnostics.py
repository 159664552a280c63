"""Lyapunov functional, deviation statistic, moment monitors, KS distance."""

import numpy as np
import pytest

import altsim as al

PSET = al.EcologyParams(lam=2, K=4, delta=1, nu=1, gamma=2, eta=2, rho=1)
LC = al.derive_limit_constants(PSET)


class TestLyapunov:
    def test_zero_at_equilibrium(self):
        for z in (0.0, 0.3, 1.0):
            h, pp = al.equilibrium_pair(PSET, LC, z)
            assert al.lyapunov_value(PSET, LC, h, pp, z) == pytest.approx(0.0, abs=1e-14)

    def test_anchor_double_host(self):
        h0, p0 = al.equilibrium_pair(PSET, LC, 0.0)
        val = al.lyapunov_value(PSET, LC, 2 * h0, p0, 0.0)
        assert val == pytest.approx(2.0 * (5.0 / 3.0) * (1.0 - np.log(2.0)), rel=1e-12)

    def test_nonnegative_on_random_domain(self):
        rng = np.random.default_rng(83)
        x = rng.uniform(1e-3, 50.0, 1_000_000)
        y = rng.uniform(1e-3, 50.0, 1_000_000)
        z = rng.uniform(0.0, 1.0, 1_000_000)
        vals = al.lyapunov_value(PSET, LC, x, y, z)
        assert np.all(vals >= 0.0)

    def test_zero_only_at_minimizer(self):
        rng = np.random.default_rng(89)
        x = rng.uniform(0.1, 10.0, 200_000)
        y = rng.uniform(0.1, 10.0, 200_000)
        z = rng.uniform(0.0, 1.0, 200_000)
        vals = al.lyapunov_value(PSET, LC, x, y, z)
        h, pp = al.equilibrium_pair(PSET, LC, z)
        tiny = vals < 1e-12
        assert np.all(np.abs(x[tiny] - h[tiny]) < 1e-5)
        assert np.all(np.abs(y[tiny] - pp[tiny]) < 1e-5)

    def test_domain_error(self):
        with pytest.raises(al.DomainError):
            al.lyapunov_value(PSET, LC, 0.0, 1.0, 0.5)
        with pytest.raises(al.DomainError):
            al.lyapunov_value(PSET, LC, 1.0, -1.0, 0.5)

    def test_deterministic_dissipation_rate(self):
        # noise-free single deme, frozen frequency: d/dt u equals the quadratic
        # dissipation -( (eta - rho F) lam/K (H - h)^2 + delta gamma (P - p)^2 )
        g = al.build_deme_graph("single")
        sp = al.ScalingParams(N=1)
        model = al.hfp_model(PSET, sp, g)
        f0 = 0.5
        x0 = np.array([[1.0, f0, 0.5]])
        dt = 1e-3
        cfg = al.IntegratorConfig(dt=dt, t_end=6.0, record_stride=1)
        times, rec = al.run_batch(model, x0, cfg, seed=0, replicas=[0])
        h, pp = rec[:, 0, 0], rec[:, 0, 2]
        u = al.lyapunov_value(PSET, LC, h, pp, f0)
        assert np.all(np.diff(u) <= 1e-9)
        h_eq, p_eq = al.equilibrium_pair(PSET, LC, f0)
        rate = (PSET.eta - PSET.rho * f0) * (PSET.lam / PSET.K) * (h - h_eq) ** 2 + (
            PSET.delta * PSET.gamma
        ) * (pp - p_eq) ** 2
        # compare -du/dt to the trapezoid-averaged rate after the initial transient
        window = (times[:-1] > 0.5) & (times[:-1] < 4.0)
        du = -(np.diff(u) / dt)[window]
        rate_mid = (0.5 * (rate[1:] + rate[:-1]))[window]
        rel = np.abs(du - rate_mid) / rate_mid
        assert np.max(rel) < 0.01


def synthetic_path(times, h, f, pp):
    states = np.column_stack([h, f, pp])
    return al.Path(times=times, states=states, names=("H[0]", "F[0]", "P[0]"), meta={})


class TestDeviationStatistic:
    def test_zero_on_equilibrium_path(self):
        g = al.build_deme_graph("single")
        times = np.linspace(0.0, 1.0, 11)
        f = np.linspace(0.2, 0.8, 11)
        h, pp = al.equilibrium_pair(PSET, LC, f)
        series = al.deviation_statistic(synthetic_path(times, h, f, pp), PSET, LC, g, N=7)
        assert np.all(series.host_term == 0.0)
        assert np.all(series.parasite_term == 0.0)
        assert series.final_integral == 0.0

    def test_constant_offset_integral(self):
        # H = h + 1, sigma = {1}, N = 1, t in [0, 2] -> integral exactly 2
        g = al.DemeGraph(m=np.array([[1.0]]), sigma=np.array([1.0]), c=1.0)
        times = np.linspace(0.0, 2.0, 21)
        f = np.full(21, 0.4)
        h, pp = al.equilibrium_pair(PSET, LC, f)
        series = al.deviation_statistic(synthetic_path(times, h + 1.0, f, pp), PSET, LC, g, N=1)
        assert series.final_integral == pytest.approx(2.0, abs=1e-12)

    def test_scales_linearly_with_n(self):
        g = al.build_deme_graph("single")
        times = np.linspace(0.0, 1.0, 5)
        f = np.full(5, 0.3)
        h, pp = al.equilibrium_pair(PSET, LC, f)
        s1 = al.deviation_statistic(synthetic_path(times, h + 0.5, f, pp), PSET, LC, g, N=1)
        s8 = al.deviation_statistic(synthetic_path(times, h + 0.5, f, pp), PSET, LC, g, N=8)
        assert s8.final_integral == pytest.approx(8 * s1.final_integral, rel=1e-12)

    def test_permutation_equivariance(self):
        rng = np.random.default_rng(97)
        g = al.build_deme_graph("torus1d", 4, weight_decay=0.6)
        times = np.linspace(0.0, 1.0, 9)
        h = rng.uniform(1.0, 3.0, (9, 4))
        f = rng.uniform(0.0, 1.0, (9, 4))
        pp = rng.uniform(0.5, 2.0, (9, 4))
        states = np.concatenate([h, f, pp], axis=1)
        s_orig = al.deviation_statistic(states[:, None, :], PSET, LC, g, N=3, times=times)
        perm = np.array([2, 0, 3, 1])
        g_perm = al.DemeGraph(m=g.m[np.ix_(perm, perm)], sigma=g.sigma[perm], c=g.c)
        states_perm = np.concatenate([h[:, perm], f[:, perm], pp[:, perm]], axis=1)
        s_perm = al.deviation_statistic(states_perm[:, None, :], PSET, LC, g_perm, N=3, times=times)
        assert np.allclose(s_orig.host_term, s_perm.host_term, rtol=1e-12)
        assert np.allclose(s_orig.integral, s_perm.integral, rtol=1e-12)

    def test_shape_mismatch(self):
        g = al.build_deme_graph("torus1d", 3)
        times = np.linspace(0.0, 1.0, 4)
        with pytest.raises(al.ShapeMismatch):
            al.deviation_statistic(np.zeros((4, 1, 7)), PSET, LC, g, N=2, times=times)


class TestMomentMonitor:
    def path_const(self, h, f, pp, d=1):
        times = np.linspace(0.0, 1.0, 6)
        states = np.tile(np.concatenate([np.full(d, h), np.full(d, f), np.full(d, pp)]), (6, 1))
        return al.Path(times=times, states=states, names=("H[0]", "F[0]", "P[0]") * d, meta={})

    def test_constant_state_constant_series(self):
        g = al.build_deme_graph("single")
        _, series = al.moment_monitor(self.path_const(2.0, 0.5, 1.0), PSET, g, "inv_H2")
        assert np.all(series == 0.25)

    def test_combined_p4_anchor(self):
        g = al.DemeGraph(m=np.array([[1.0]]), sigma=np.array([1.0]), c=1.0)
        _, series = al.moment_monitor(self.path_const(1.0, 0.5, 1.0), PSET, g, "combined_p4")
        assert np.all(series == 625.0)  # (2*eta*H + delta*P)^4 = 5^4

    def test_inverse_monitor_domain_error(self):
        g = al.build_deme_graph("single")
        with pytest.raises(al.DomainError):
            al.moment_monitor(self.path_const(2.0, 0.5, 0.0), PSET, g, "inv_P")

    def test_unknown_monitor(self):
        g = al.build_deme_graph("single")
        with pytest.raises(ValueError):
            al.moment_monitor(self.path_const(1, 0.5, 1), PSET, g, "nope")


class TestMonotoneMoment:
    def make_series(self, slope, noise, r=20, n=50, seed=0):
        rng = np.random.default_rng(seed)
        times = np.linspace(0.0, 10.0, n)
        return times, 0.7 + slope * times + noise * rng.standard_normal((r, n))

    def test_decreasing_detected(self):
        wp = al.WfParams(kappa=1, alpha=2, beta=1, a=2)
        times, series = self.make_series(-0.01, 0.001)
        v = al.monotone_moment_check(times, series, wp)
        assert v.direction == "NonIncreasing"

    def test_increasing_detected(self):
        wp = al.WfParams(kappa=1, alpha=0.5, beta=1, a=2)
        times, series = self.make_series(0.01, 0.001)
        v = al.monotone_moment_check(times, series, wp)
        assert v.direction == "NonDecreasing"

    def test_constant_when_balanced(self):
        wp = al.WfParams(kappa=1, alpha=1, beta=1, a=2)
        times, series = self.make_series(0.0, 0.001)
        v = al.monotone_moment_check(times, series, wp)
        assert v.direction == "Constant"

    def test_insufficient_replicas(self):
        wp = al.WfParams(kappa=1, alpha=2, beta=1, a=2)
        times, series = self.make_series(-1e-7, 0.05, seed=3)
        with pytest.raises(al.InsufficientReplicas):
            al.monotone_moment_check(times, series, wp)

    def test_deterministic_boundary_ensemble(self):
        # all mass at z=1: the statistic is constant and exactly noiseless
        wp = al.WfParams(kappa=1, alpha=1, beta=1, a=2)
        times = np.linspace(0.0, 5.0, 20)
        series = np.ones((10, 20))
        v = al.monotone_moment_check(times, series, wp)
        assert v.direction == "Constant"
        assert v.slope == 0.0


class TestKsDistance:
    def uniform_table(self):
        z = np.linspace(0.0, 1.0, 1001)
        return al.CdfTable(z=z, cdf=z.copy())

    def test_single_sample_at_median(self):
        assert al.ks_distance([0.5], self.uniform_table()) == pytest.approx(0.5)

    def test_point_mass_at_zero_vs_uniform(self):
        assert al.ks_distance(np.zeros(100), self.uniform_table()) == pytest.approx(1.0)

    def test_inverse_cdf_samples_close(self):
        sm = al.StationaryModel(al.WfParams(kappa=1, alpha=1, beta=1, a=2), 0.75)
        samples = al.sample_stationary(sm, 100_000, seed=13)
        assert al.ks_distance(samples, sm.table) < 0.01

    def test_empty_sample(self):
        with pytest.raises(al.EmptySample):
            al.ks_distance([], self.uniform_table())

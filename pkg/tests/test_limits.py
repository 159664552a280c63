"""Limit models: drift anchors, algebraic equivalences, coupling, Lipschitz bounds."""

import numpy as np
import pytest

import altsim as al

WP = al.WfParams(kappa=1.0, alpha=1.0, beta=1.0, a=2.0)


class TestWfSpatial:
    def test_constant_state_reduces_to_single_deme(self):
        g = al.build_deme_graph("torus1d", 5)
        model = al.wf_spatial_model(WP, g)
        x = np.full((1, 5), 0.3)
        drift = model.drift(x, 0.0)
        assert np.allclose(drift, -WP.alpha * 0.3 * 0.7, atol=1e-14)

    def test_uniform_boundary_states_absorbing(self):
        g = al.build_deme_graph("complete_uniform", 4)
        model = al.wf_spatial_model(WP, g)
        for v in (0.0, 1.0):
            x = np.full((1, 4), v)
            assert np.allclose(model.drift(x, 0.0), 0.0, atol=1e-14)
            assert np.allclose(model.diffusion(x, 0.0), 0.0, atol=1e-14)

    def test_two_deme_drift_anchor(self):
        # hand evaluation: kappa=1, alpha=0, a=2, x=(0.2, 0.8), uniform m = 1/2
        wp = al.WfParams(kappa=1.0, alpha=1e-300, beta=1.0, a=2.0)
        g = al.build_deme_graph("complete_uniform", 2)
        model = al.wf_spatial_model(wp, g)
        drift = model.drift(np.array([[0.2, 0.8]]), 0.0)
        assert drift[0, 0] == pytest.approx(0.45, abs=1e-12)

    def test_meanfield_identity_on_random_states(self):
        rng = np.random.default_rng(17)
        for d in (1, 2, 7, 40):
            g = al.build_deme_graph("complete_uniform", d)
            spatial = al.wf_spatial_model(WP, g)
            mf = al.meanfield_model(WP, d)
            x = rng.uniform(0.0, 1.0, size=(1000 // d + 2, d))
            assert np.max(np.abs(spatial.drift(x, 0.0) - mf.drift(x, 0.0))) < 1e-12


class TestMeanField:
    def test_equal_frequencies_cancel_migration(self):
        model = al.meanfield_model(WP, 6)
        x = np.full((1, 6), 0.4)
        assert np.allclose(model.drift(x, 0.0), -WP.alpha * 0.4 * 0.6, atol=1e-14)

    def test_single_deme_reduction(self):
        model = al.meanfield_model(WP, 1)
        x = np.array([[0.3]])
        assert model.drift(x, 0.0)[0, 0] == pytest.approx(-WP.alpha * 0.3 * 0.7, abs=1e-14)

    def test_two_deme_anchor(self):
        wp = al.WfParams(kappa=1.0, alpha=1e-300, beta=1.0, a=2.0)
        model = al.meanfield_model(wp, 2)
        drift = model.drift(np.array([[0.2, 0.8]]), 0.0)
        assert drift[0, 0] == pytest.approx(0.45, abs=1e-12)


class TestMckeanVlasov:
    def test_frozen_provider_matches_frozen_theta(self):
        mv = al.mckean_vlasov_model(WP, 0.75)
        ft = al.frozen_theta_model(WP, 0.75)
        x = np.linspace(0.0, 1.0, 11)[None, :].T.reshape(-1, 1)
        assert np.allclose(mv.drift(x, 0.0), ft.drift(x, 0.0), atol=1e-15)

    def test_boundary_masses_invariant(self):
        # all particles at 1 (resp. 0) stay there under the particle realization
        model = al.meanfield_model(WP, 32)
        cfg = al.IntegratorConfig(dt=1e-3, t_end=1.0, record_stride=100)
        for v in (0.0, 1.0):
            _, rec = al.run_batch(model, np.full((1, 32), v), cfg, seed=2, replicas=[0])
            assert np.all(rec == v)


class TestFrozenTheta:
    def test_theta_range_enforced(self):
        with pytest.raises(al.ThetaOutOfRange):
            al.frozen_theta_model(WP, 0.5)  # = 1/a, boundary excluded
        with pytest.raises(al.ThetaOutOfRange):
            al.frozen_theta_model(WP, 1.0)  # = 1/(a-1), boundary excluded

    def test_drift_anchor(self):
        model = al.frozen_theta_model(WP, 0.75)
        assert model.drift(np.array([[0.5]]), 0.0)[0, 0] == pytest.approx(-0.0625, abs=1e-15)

    def test_zero_invariant_at_lower_theta_limit(self):
        # theta -> 1/a: drift at z=0 is a(a*theta - 1) -> 0
        model = al.frozen_theta_model(WP, 0.5 + 1e-12)
        assert abs(model.drift(np.array([[0.0]]), 0.0)[0, 0]) < 1e-10


class TestSingleColony:
    def test_absorbing_origin(self):
        model = al.single_colony_model(WP)
        x = np.array([[0.0]])
        assert model.drift(x, 0.0)[0, 0] == 0.0
        assert model.diffusion(x, 0.0)[0, 0] == 0.0

    def test_drift_anchor(self):
        model = al.single_colony_model(WP)
        assert model.drift(np.array([[0.5]]), 0.0)[0, 0] == pytest.approx(-0.625, abs=1e-15)

    def test_drift_negative_on_open_interval(self):
        model = al.single_colony_model(WP)
        y = np.linspace(0.01, 0.99, 99)[None, :].T.reshape(1, -1)
        assert np.all(model.drift(y, 0.0) < 0)


class TestLipschitz:
    def test_anchor(self):
        assert al.lipschitz_constant(WP) == pytest.approx(4.0)

    def test_kappa_dominates(self):
        wp = al.WfParams(kappa=10.0, alpha=1.0, beta=1.0, a=2.0)
        assert al.lipschitz_constant(wp) == pytest.approx(40.0)

    def test_divergence_near_a_equals_one(self):
        wp = al.WfParams(kappa=1.0, alpha=1.0, beta=1.0, a=1.001)
        assert al.lipschitz_constant(wp) == pytest.approx(1.0 / 0.001**2)

    def test_one_sided_lipschitz_inequality(self):
        # 1_{x>=y} (xi(u,x) - xi(v,y)) <= L (u-v)^+ + L (x-y)^+
        rng = np.random.default_rng(23)
        for wp in (WP, al.WfParams(kappa=0.5, alpha=2.0, beta=0.7, a=3.0)):
            L = al.lipschitz_constant(wp)

            def xi(u, x):
                return wp.kappa * (wp.a - x) * ((wp.a - x) * u - 1.0) - wp.alpha * x * (1.0 - x)

            x = rng.uniform(0.0, 1.0, 100_000)
            y = rng.uniform(0.0, 1.0, 100_000)
            x, y = np.maximum(x, y), np.minimum(x, y)
            u = rng.uniform(0.0, 2.0, 100_000)
            v = rng.uniform(0.0, 2.0, 100_000)
            lhs = xi(u, x) - xi(v, y)
            rhs = L * np.maximum(u - v, 0.0) + L * np.maximum(x - y, 0.0)
            assert np.all(lhs <= rhs + 1e-12)

    def test_psi_lipschitz(self):
        rng = np.random.default_rng(29)
        L = al.lipschitz_constant(WP)
        x = rng.uniform(0.0, 1.0, 100_000)
        y = rng.uniform(0.0, 1.0, 100_000)
        psi = lambda z: 1.0 / (WP.a - z)
        assert np.all(np.abs(psi(x) - psi(y)) <= L * np.abs(x - y) + 1e-15)

    def test_diffusion_growth_bound(self):
        L = al.lipschitz_constant(WP)
        x = np.linspace(0.0, 1.0, 10_001)
        sigma2 = WP.beta * (WP.a - x) * x * (1.0 - x)
        assert np.all(sigma2 <= L * (x + x * x) + 1e-15)


class TestBoundarySafety:
    def test_wf_run_stays_in_unit_cube_and_finite(self):
        # high noise pushes paths against both boundaries; the projected state
        # keeps the diffusion argument (a - x) x (1 - x) nonnegative throughout
        wp = al.WfParams(kappa=2.0, alpha=0.5, beta=6.0, a=1.2)
        g = al.build_deme_graph("torus1d", 3)
        model = al.wf_spatial_model(wp, g)
        cfg = al.IntegratorConfig(dt=1e-3, t_end=5.0, record_stride=1)
        _, rec = al.run_batch(model, np.full((4, 3), 0.5), cfg, seed=12, replicas=range(4))
        assert np.all(np.isfinite(rec))
        assert np.all((rec >= 0.0) & (rec <= 1.0))
        assert np.all(np.isfinite(model.diffusion(rec.reshape(-1, 3), 0.0)))


class TestCouplingExperiment:
    def test_reference_against_itself_is_zero(self):
        cp = al.CouplingParams(wp=WP, t_end=0.2, d_list=(32,), n_replicas=5, d_ref=32)
        cfg = al.IntegratorConfig(dt=1e-2, t_end=0.2)
        table = al.coupling_experiment(cp, cfg, seed=3)
        assert np.all(table.error == 0.0)

    def test_error_zero_at_time_zero(self):
        cp = al.CouplingParams(wp=WP, t_end=0.1, d_list=(8, 16), n_replicas=4, d_ref=64)
        cfg = al.IntegratorConfig(dt=1e-2, t_end=0.1)
        table = al.coupling_experiment(cp, cfg, seed=3, record_times=(0.0, 0.1))
        assert np.all(table.error[:, 0] == 0.0)
        assert np.all(table.error[:, 1] > 0.0)

    def test_sqrt_d_rate_rough(self):
        # quick, loose version of the acceptance check
        cp = al.CouplingParams(wp=WP, t_end=0.5, d_list=(8, 32, 128), n_replicas=60, d_ref=512)
        cfg = al.IntegratorConfig(dt=5e-3, t_end=0.5)
        table = al.coupling_experiment(cp, cfg, seed=9)
        vals = table.sqrtd_error[:, -1]
        assert vals.max() / vals.min() < 3.0

    def test_csv_export(self, tmp_path):
        cp = al.CouplingParams(wp=WP, t_end=0.1, d_list=(4,), n_replicas=3, d_ref=16)
        cfg = al.IntegratorConfig(dt=1e-2, t_end=0.1)
        table = al.coupling_experiment(cp, cfg, seed=3)
        out = tmp_path / "coupling.csv"
        table.to_csv(out)
        assert out.read_text().splitlines()[0] == "D,t,error,sqrtD_error,mc_stderr"

    def test_invalid_configs(self):
        with pytest.raises(al.ConfigError):
            al.CouplingParams(wp=WP, t_end=1.0, d_list=(64,), n_replicas=2, d_ref=32)
        assert al.CouplingParams(wp=WP, t_end=1.0, d_list=(4,), n_replicas=1).L == pytest.approx(4.0)

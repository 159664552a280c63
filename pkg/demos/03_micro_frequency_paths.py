# From the microscopic model to the Wright-Fisher limit.
#
# The altruist frequency of the spatial Lotka-Volterra system, watched on the
# slow clock t*N, approaches the spatial Wright-Fisher diffusion with
# frequency-dependent migration as N grows. Here: slow-time frequency paths
# at N = 30 and N = 300 next to limit-diffusion paths, plus the N-scaled
# deviation of (hosts, parasites) from their frequency-indexed equilibrium,
# whose time integral the limit theory keeps bounded uniformly in N.

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import altsim as al

out = __import__("pathlib").Path(__file__).parent / "out"
out.mkdir(exist_ok=True)

eco = al.EcologyParams(lam=2, K=4, delta=1, nu=1, gamma=2, eta=2, rho=1)
g = al.build_deme_graph("complete_uniform", 4)
sched = al.ScalingSchedule(eco, kappa=1.0, alpha=1.0, beta_target=1.0)
x0 = al.equilibrium_hfp_state(eco, g, 0.5)
cfg = al.IntegratorConfig(dt=1e-3, t_end=1.0)

fig, ax = plt.subplots(1, 3, figsize=(12, 3.4), sharey=True)
for panel, n_level in zip(ax[:2], (30, 300)):
    path = al.rescaled_frequency_run(eco, sched, g, n_level, 1.0, cfg, seed=4, x0=x0, slow_du=0.01)
    f_block = path.states[:, g.n_demes : 2 * g.n_demes]
    panel.plot(path.times, f_block, lw=0.9)
    panel.set_title(f"micro frequencies, N = {n_level}")
    panel.set_xlabel("slow time")

    series = al.deviation_statistic(path, eco, sched.constants, g, n_level)
    print(f"N={n_level}: N-scaled deviation integral over [0,1] = {series.final_integral:.3f}")

wp = al.WfParams(kappa=1.0, alpha=1.0, beta=1.0, a=sched.constants.a)
wf = al.wf_spatial_model(wp, g)
wf_cfg = al.IntegratorConfig(dt=1e-3, t_end=1.0, record_stride=10)
wf_path = al.integrate(wf, np.full(4, 0.5), wf_cfg, seed=4)
ax[2].plot(wf_path.times, wf_path.states, lw=0.9)
ax[2].set_title("limit diffusion")
ax[2].set_xlabel("slow time")
ax[0].set_ylabel("altruist frequency")
fig.tight_layout()
fig.savefig(out / "micro_to_limit.png", dpi=120)
print(f"wrote {out / 'micro_to_limit.png'}")

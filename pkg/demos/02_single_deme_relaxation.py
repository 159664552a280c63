# Noise-free Lotka-Volterra relaxation and the entropy-like Lyapunov function.
#
# With all size-level rates off and the altruist frequency frozen, hosts and
# parasites spiral into the frequency-dependent equilibrium. The Lyapunov
# value decreases monotonically, and its decay rate matches the quadratic
# dissipation (eta - rho F) lam/K (H - h)^2 + delta gamma (P - p)^2 exactly.

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import altsim as al

out = __import__("pathlib").Path(__file__).parent / "out"
out.mkdir(exist_ok=True)

eco = al.EcologyParams(lam=2, K=4, delta=1, nu=1, gamma=2, eta=2, rho=1)
lc = al.derive_limit_constants(eco)
g = al.build_deme_graph("single")
model = al.hfp_model(eco, al.ScalingParams(N=1), g)

f0 = 0.5
cfg = al.IntegratorConfig(dt=1e-3, t_end=12.0, record_stride=1)
times, rec = al.run_batch(model, np.array([[0.6, f0, 1.8]]), cfg, seed=1, replicas=[0])
h, p = rec[:, 0, 0], rec[:, 0, 2]
h_eq, p_eq = al.equilibrium_pair(eco, lc, f0)

u = al.lyapunov_value(eco, lc, h, p, f0)
rate = (eco.eta - eco.rho * f0) * eco.lam / eco.K * (h - h_eq) ** 2 + eco.delta * eco.gamma * (p - p_eq) ** 2

print(f"equilibrium at F={f0}: host {h_eq:.4f}, parasite {p_eq:.4f}")
print(f"final state:          host {h[-1]:.4f}, parasite {p[-1]:.4f}")
print(f"Lyapunov value: {u[0]:.4f} -> {u[-1]:.3e}, max increase {np.max(np.diff(u)):.2e}")

fig, ax = plt.subplots(1, 3, figsize=(12, 3.4))
ax[0].plot(h, p, lw=0.8)
ax[0].plot([h_eq], [p_eq], "r*", ms=12)
ax[0].set_xlabel("hosts")
ax[0].set_ylabel("parasites")
ax[0].set_title("phase-plane spiral")
ax[1].semilogy(times, np.maximum(u, 1e-18))
ax[1].set_xlabel("t")
ax[1].set_title("Lyapunov value (log)")
ax[2].semilogy(times[:-1], -np.diff(u) / cfg.dt, label="-dU/dt")
ax[2].semilogy(times, rate, "--", label="quadratic dissipation")
ax[2].set_xlabel("t")
ax[2].legend()
fig.tight_layout()
fig.savefig(out / "relaxation_lyapunov.png", dpi=120)
print(f"wrote {out / 'relaxation_lyapunov.png'}")

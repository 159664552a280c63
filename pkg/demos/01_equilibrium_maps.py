# Host/parasite equilibrium as a function of the local altruist frequency.
#
# More altruists -> weaker parasite growth -> larger host equilibrium and
# smaller parasite equilibrium. The two closed forms (rational in the seven
# rates vs the compact 1/(b(a-x)) form) coincide, and two exact identities
# tie the equilibrium maps to the interaction rates.

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import altsim as al

out = __import__("pathlib").Path(__file__).parent / "out"
out.mkdir(exist_ok=True)

eco = al.EcologyParams(lam=2, K=4, delta=1, nu=1, gamma=2, eta=2, rho=1)
lc = al.derive_limit_constants(eco)
print(f"shifted scale a = {lc.a}, inverse scale b = {lc.b}")
print(f"well-posedness: K*b*(a-1) = {eco.K * lc.b * (lc.a - 1):.3f} > 1")

x = np.linspace(0, 1, 401)
h, p = al.equilibrium_pair(eco, lc, x)
h_rat, p_rat = al.equilibrium_pair_rational(eco, x)
print(f"max gap between the two closed forms: {np.max(np.abs(h - h_rat)):.2e}")

# the identities that make the Lyapunov drift cancel exactly
id1 = eco.delta * p + eco.lam / eco.K * h - eco.lam
id2 = eco.nu + eco.gamma * p - (eco.eta - eco.rho * x) * h
print(f"identity residuals: {np.max(np.abs(id1)):.2e}, {np.max(np.abs(id2)):.2e}")

# the standing parameter assumptions, reported inequality by inequality
print()
print(al.check_assumptions(eco, al.ScalingParams(N=100, kappa_h=0.01, beta_h=0.05, iota_h=0.08)))

fig, ax = plt.subplots(1, 2, figsize=(9, 3.5))
ax[0].plot(x, h, label="host equilibrium")
ax[0].plot(x, p, label="parasite equilibrium")
ax[0].set_xlabel("altruist frequency x")
ax[0].legend()
h1, h2, p1, p2 = al.equilibrium_derivatives(lc, eco, x)
ax[1].plot(x, h1, label="d host / dx  (> 0)")
ax[1].plot(x, p1, label="d parasite / dx  (< 0)")
ax[1].axhline(0.0, color="k", lw=0.5)
ax[1].set_xlabel("altruist frequency x")
ax[1].legend()
fig.tight_layout()
fig.savefig(out / "equilibrium_maps.png", dpi=120)
print(f"\nwrote {out / 'equilibrium_maps.png'}")

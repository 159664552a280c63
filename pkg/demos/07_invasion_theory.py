# Can a rare defense allele invade? A closed-form yes/no.
#
# A single occupied deme follows a diffusion that loses mass to emigration and
# selection; it seeds new demes at the colonization rate. The expected number
# of successful colonizations per excursion reduces to a one-dimensional
# integral, and the excursion tree survives with positive probability exactly
# when that integral exceeds 1 -- equivalently, when alpha < beta.

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import altsim as al

out = __import__("pathlib").Path(__file__).parent / "out"
out.mkdir(exist_ok=True)

wp = al.WfParams(kappa=1.0, alpha=2.0, beta=1.0, a=2.0)
res = al.invasion_criterion(wp)
print(f"anchor case kappa=1, alpha=2, beta=1, a=2: integral = {res.integral:.10f} (7/12 = {7/12:.10f})")
print(f"dies out: {res.dies_out}")

alphas = np.linspace(0.2, 2.5, 120)
integrals = [al.invasion_criterion(al.WfParams(kappa=1.0, alpha=float(x), beta=1.0, a=2.0)).integral for x in alphas]

# single-colony dynamics: drift is negative everywhere on (0, 1)
colony = al.single_colony_model(wp)
ys = np.linspace(0.0, 1.0, 200)
drift = colony.drift(ys[None, :], 0.0)[0]

# scale function and colonization rate
zs = np.linspace(0.0, 0.95, 96)
s_vals = al.scale_density(wp, zs)
rate = al.colonization_rate(wp, np.linspace(0.0, 2.0, 200))

fig, ax = plt.subplots(1, 3, figsize=(12, 3.4))
ax[0].plot(alphas, integrals)
ax[0].axhline(1.0, color="k", lw=0.8)
ax[0].axvline(1.0, color="r", ls=":", label="alpha = beta")
ax[0].set_xlabel("selection cost alpha")
ax[0].set_title("invasion integral (survive iff > 1)")
ax[0].legend()
ax[1].plot(ys, drift)
ax[1].axhline(0.0, color="k", lw=0.5)
ax[1].set_xlabel("frequency in the occupied deme")
ax[1].set_title("single-colony drift")
ax[2].plot(zs, s_vals, label="scale density s")
ax[2].plot(np.linspace(0.0, 2.0, 200), rate, label="colonization rate")
ax[2].set_xlabel("z or mass x")
ax[2].legend()
fig.tight_layout()
fig.savefig(out / "invasion_theory.png", dpi=120)
print(f"wrote {out / 'invasion_theory.png'}")

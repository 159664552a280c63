"""Limit-model family for the altruist frequency.

  - Spatial Wright-Fisher diffusion with frequency-dependent migration on a
    deme graph (the N -> infinity limit of the micro model's frequencies).
  - Finite mean-field system (uniform migration over D demes).
  - McKean-Vlasov dynamics, realized as a self-averaging particle system.
  - Frozen-theta single-deme diffusion (migration replaced by a constant
    mean inverse gap theta).
  - Single-colony diffusion (the invasion setting: all mass in one deme).
  - A synchronous-coupling experiment measuring the 1/sqrt(D) propagation
    of chaos rate.

All diffusion coefficients share the form sqrt(beta*(a - x)*x*(1 - x)) on
[0, 1] with a > 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ThetaOutOfRange
from .model_core import DemeGraph
from .sde import IntegratorConfig, RngStream, SdeModel

__all__ = [
    "WfParams",
    "CouplingParams",
    "wf_spatial_model",
    "meanfield_model",
    "mckean_vlasov_model",
    "frozen_theta_model",
    "single_colony_model",
    "lipschitz_constant",
    "coupling_experiment",
    "CouplingTable",
]


@dataclass(frozen=True)
class WfParams:
    """Limit constants: migration kappa, selection cost alpha, noise beta, shifted scale a."""

    kappa: float
    alpha: float
    beta: float
    a: float

    def __post_init__(self):
        for name in ("kappa", "alpha", "beta"):
            if not getattr(self, name) > 0:
                raise ValueError(f"WfParams.{name} must be positive")
        if not self.a > 1:
            raise ValueError(f"WfParams.a must exceed 1, got {self.a}")

    @property
    def theta_range(self) -> tuple[float, float]:
        return 1.0 / self.a, 1.0 / (self.a - 1.0)


def lipschitz_constant(wp: WfParams) -> float:
    """One-sided Lipschitz/growth constant of the mean-field coefficient system.

    L = max{beta*a, kappa*a^2, kappa + alpha, 1/(a-1)^2}; it controls the
    interaction drift, the diffusion growth, and the Lipschitz constant of
    x -> 1/(a-x) on [0, 1] simultaneously.
    """
    a = wp.a
    return max(wp.beta * a, wp.kappa * a * a, wp.kappa + wp.alpha, 1.0 / (a - 1.0) ** 2)


def _freq_diffusion(wp: WfParams):
    # States reaching here are already projected into [0, 1], where the
    # product (a - x) x (1 - x) is nonnegative exactly in floating point.
    def diffusion(x: np.ndarray, t: float) -> np.ndarray:
        return np.sqrt(wp.beta * (wp.a - x) * x * (1.0 - x))

    return diffusion


def _freq_model(wp: WfParams, d: int, drift, prefix: str = "X") -> SdeModel:
    names = tuple(f"{prefix}[{i}]" for i in range(d)) if d > 1 else (prefix,)
    return SdeModel(
        n_demes=d,
        n_channels=1,
        names=names,
        drift=drift,
        diffusion=_freq_diffusion(wp),
        lower=np.zeros(d),
        upper=np.ones(d),
    )


def wf_spatial_model(wp: WfParams, g: DemeGraph) -> SdeModel:
    """Spatial Wright-Fisher diffusion with frequency-dependent migration.

    drift_i = kappa * sum_j m(i,j) * (a - x_i)/(a - x_j) * (x_j - x_i)
              - alpha * x_i (1 - x_i)

    Demes with more altruists host larger equilibrium populations, hence the
    (a - x_i)/(a - x_j) weighting of migrant frequencies.
    """
    mT = g.m.T.copy()

    def drift(x: np.ndarray, t: float) -> np.ndarray:
        psi = 1.0 / (wp.a - x)
        mig = (x * psi) @ mT - x * (psi @ mT)
        return wp.kappa * (wp.a - x) * mig - wp.alpha * x * (1.0 - x)

    return _freq_model(wp, g.n_demes, drift)


def meanfield_model(wp: WfParams, d: int) -> SdeModel:
    """Mean-field system: every deme feels the empirical mean of 1/(a - x).

    drift_i = kappa*(a - x_i)*((a - x_i) * mean_j 1/(a - x_j) - 1)
              - alpha*x_i*(1 - x_i)

    Algebraically identical to wf_spatial_model with the uniform matrix
    m(i, j) = 1/D.
    """
    if d < 1:
        raise ConfigError(f"need at least one deme, got {d}")

    def drift(x: np.ndarray, t: float) -> np.ndarray:
        gap = wp.a - x
        theta_hat = np.mean(1.0 / gap, axis=1, keepdims=True)
        return wp.kappa * gap * (gap * theta_hat - 1.0) - wp.alpha * x * (1.0 - x)

    return _freq_model(wp, d, drift)


def mckean_vlasov_model(wp: WfParams, theta_provider) -> SdeModel:
    """Law-dependent single-particle dynamics with an external estimate of E[1/(a - Z)].

    theta_provider is either a constant or a callable t -> theta_hat. With the
    particle average as provider the dynamics coincide with meanfield_model;
    with a frozen constant they coincide with frozen_theta_model. The particle
    realization is the quantitatively controlled approximation (error
    O(1/sqrt(D)) by the synchronous-coupling bound), so use
    meanfield_model(wp, D) with large D to approximate the true law.
    """
    if callable(theta_provider):
        theta_fn = theta_provider
    else:
        theta_const = float(theta_provider)

        def theta_fn(t: float) -> float:
            return theta_const

    def drift(x: np.ndarray, t: float) -> np.ndarray:
        gap = wp.a - x
        return wp.kappa * gap * (gap * theta_fn(t) - 1.0) - wp.alpha * x * (1.0 - x)

    return _freq_model(wp, 1, drift, prefix="Z")


def frozen_theta_model(wp: WfParams, theta: float) -> SdeModel:
    """Single-deme diffusion with the mean inverse gap frozen at theta.

    Requires 1/a < theta < 1/(a-1); outside that range the drift no longer
    admits an interior equilibrium distribution.
    """
    lo, hi = wp.theta_range
    if not lo < theta < hi:
        raise ThetaOutOfRange(f"theta={theta} outside ({lo}, {hi})")

    def drift(x: np.ndarray, t: float) -> np.ndarray:
        gap = wp.a - x
        return wp.kappa * gap * (gap * theta - 1.0) - wp.alpha * x * (1.0 - x)

    return _freq_model(wp, 1, drift, prefix="Z")


def single_colony_model(wp: WfParams) -> SdeModel:
    """Frequency in a single occupied deme while all other demes are empty.

    drift = -(kappa/a) * y * (a - y) - alpha * y * (1 - y); emigration and the
    selection cost both push toward the absorbing state 0.
    """

    def drift(y: np.ndarray, t: float) -> np.ndarray:
        return -(wp.kappa / wp.a) * y * (wp.a - y) - wp.alpha * y * (1.0 - y)

    return _freq_model(wp, 1, drift, prefix="Y")


@dataclass(frozen=True)
class CouplingParams:
    """Configuration of the propagation-of-chaos experiment."""

    wp: WfParams
    t_end: float
    d_list: tuple[int, ...]
    n_replicas: int
    d_ref: int = 2048
    L: float = field(init=False)

    def __post_init__(self):
        if self.n_replicas < 1:
            raise ConfigError("need at least one replica")
        if any(d < 1 for d in self.d_list):
            raise ConfigError("all system sizes must be >= 1")
        if self.d_ref < max(self.d_list):
            raise ConfigError("reference size must dominate every compared size")
        object.__setattr__(self, "L", lipschitz_constant(self.wp))


@dataclass
class CouplingTable:
    """Rows (D, t, error, sqrtD_error, mc_stderr) of the coupling experiment."""

    d_values: np.ndarray
    times: np.ndarray
    error: np.ndarray  # (n_D, n_times)
    sqrtd_error: np.ndarray
    mc_stderr: np.ndarray

    def rows(self):
        for i, d in enumerate(self.d_values):
            for j, t in enumerate(self.times):
                yield int(d), float(t), float(self.error[i, j]), float(self.sqrtd_error[i, j]), float(self.mc_stderr[i, j])

    def to_csv(self, path) -> None:
        from .sde import atomic_write_text

        lines = ["D,t,error,sqrtD_error,mc_stderr"]
        for d, t, e, se, ms in self.rows():
            lines.append(f"{d},%.17g,%.17g,%.17g,%.17g" % (t, e, se, ms))
        atomic_write_text(path, "\n".join(lines) + "\n")


def coupling_experiment(
    cp: CouplingParams,
    cfg: IntegratorConfig,
    seed: int,
    x0_sampler=None,
    record_times: tuple[float, ...] | None = None,
) -> CouplingTable:
    """Measure E|X^D(1) - M| with M approximated by the reference system.

    Particle j of every system is driven by the stream keyed
    (seed, replica, j, 0), so matched particles share Brownian increments
    across system sizes (synchronous coupling), and initial conditions are
    shared the same way: every system starts from the first D entries of the
    reference draw. error(D, t) then estimates the mean absolute gap between
    particle 1 of the D-system and the McKean-Vlasov limit; sqrt(D)*error is
    emitted for rate inspection.
    """
    wp = cp.wp
    if x0_sampler is None:
        def x0_sampler(rng, n):
            return rng.uniform(0.3, 0.7, size=n)

    if record_times is None:
        record_times = (cp.t_end,)
    n_steps = cfg.n_steps
    rec_steps = []
    for t in record_times:
        k = int(round(t / cfg.dt))
        if not 0 <= k <= n_steps:
            raise ConfigError(f"record time {t} outside [0, {cfg.t_end}]")
        rec_steps.append(k)

    sizes = tuple(cp.d_list)
    all_sizes = sizes + (cp.d_ref,)
    first = np.zeros((len(all_sizes), len(rec_steps), cp.n_replicas))
    sqrt_dt = np.sqrt(cfg.dt)

    for r in range(cp.n_replicas):
        init_rng = RngStream(seed, r, cp.d_ref, 1).generator()
        x0_ref = np.asarray(x0_sampler(init_rng, cp.d_ref), dtype=float)
        gens = [RngStream(seed, r, j, 0).generator() for j in range(cp.d_ref)]
        states = [x0_ref[:d].copy() for d in all_sizes]
        for si, k in enumerate(rec_steps):
            if k == 0:
                first[:, si, r] = [s[0] for s in states]
        block = max(1, min(n_steps, 4_194_304 // max(1, cp.d_ref)))
        step = 0
        while step < n_steps:
            n = min(block, n_steps - step)
            xi = np.empty((n, cp.d_ref))
            for j, gen in enumerate(gens):
                xi[:, j] = gen.standard_normal(n)
            for k in range(n):
                step += 1
                for si, x in enumerate(states):
                    d = all_sizes[si]
                    gap = wp.a - x
                    theta_hat = np.mean(1.0 / gap)
                    drift = wp.kappa * gap * (gap * theta_hat - 1.0) - wp.alpha * x * (1.0 - x)
                    diff = np.sqrt(np.maximum(wp.beta * gap * x * (1.0 - x), 0.0))
                    x += drift * cfg.dt + diff * (sqrt_dt * xi[k, :d])
                    np.clip(x, 0.0, 1.0, out=x)
                    states[si] = x
                if step in rec_steps:
                    si_rec = rec_steps.index(step)
                    for mi, s in enumerate(states):
                        first[mi, si_rec, r] = s[0]

    ref = first[-1]
    d_arr = np.array(sizes, dtype=float)
    gaps = np.abs(first[:-1] - ref[None, :, :])  # (n_D, n_times, R)
    error = gaps.mean(axis=2)
    stderr = gaps.std(axis=2, ddof=1) / np.sqrt(cp.n_replicas) if cp.n_replicas > 1 else np.zeros_like(error)
    times = np.array([k * cfg.dt for k in rec_steps])
    return CouplingTable(
        d_values=np.array(sizes),
        times=times,
        error=error,
        sqrtd_error=np.sqrt(d_arr)[:, None] * error,
        mc_stderr=stderr,
    )

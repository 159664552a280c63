"""Microscopic spatial stochastic Lotka-Volterra dynamics.

Two equivalent parameterizations of the same law:
  - (A, C, P): altruist hosts, cheater hosts, parasites per deme.
  - (H, F, P): total hosts H = A + C, altruist frequency F = A/H, parasites.

Plus the system-size schedule kappa_h = kappa/N, alpha_N = alpha/N,
beta_h = beta_target/(N*b), ... under which the time-rescaled frequency paths
t -> F_{tN} converge to the spatial Wright-Fisher diffusion with
frequency-dependent migration (see limits module).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ShapeMismatch
from .model_core import (
    DemeGraph,
    EcologyParams,
    LimitConstants,
    ScalingParams,
    derive_limit_constants,
    equilibrium_pair,
)
from .sde import IntegratorConfig, Path, SdeModel, run_batch, run_batch_records


@dataclass(frozen=True)
class AcpState:
    """Nonnegative population vectors (altruists, cheaters, parasites)."""

    A: np.ndarray
    C: np.ndarray
    P: np.ndarray

    def __post_init__(self):
        for name in ("A", "C", "P"):
            v = np.asarray(getattr(self, name), dtype=float)
            if np.any(v < 0) or not np.all(np.isfinite(v)):
                raise ValueError(f"{name} must be nonnegative and finite")
            object.__setattr__(self, name, v)

    def flat(self) -> np.ndarray:
        return np.concatenate([self.A, self.C, self.P])

    def to_hfp(self, floor_eps: float = 1e-6) -> "HfpState":
        h = self.A + self.C
        f = self.A / np.maximum(h, floor_eps)
        return HfpState(H=h, F=np.clip(f, 0.0, 1.0, out=f), P=self.P.copy())


@dataclass(frozen=True)
class HfpState:
    """Host totals (positive), altruist frequencies in [0, 1], parasite vector."""

    H: np.ndarray
    F: np.ndarray
    P: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.H, dtype=float)
        f = np.asarray(self.F, dtype=float)
        p = np.asarray(self.P, dtype=float)
        if np.any(h <= 0):
            raise ValueError("H must be strictly positive per deme")
        if np.any((f < 0) | (f > 1)):
            raise ValueError("F must lie in [0, 1]")
        if np.any(p < 0):
            raise ValueError("P must be nonnegative")
        object.__setattr__(self, "H", h)
        object.__setattr__(self, "F", f)
        object.__setattr__(self, "P", p)

    def flat(self) -> np.ndarray:
        return np.concatenate([self.H, self.F, self.P])


def _names(prefix_list: tuple[str, ...], d: int) -> tuple[str, ...]:
    return tuple(f"{p}[{i}]" for p in prefix_list for i in range(d))


def acp_model(p: EcologyParams, sp: ScalingParams, g: DemeGraph, floor_eps: float = 1e-6) -> SdeModel:
    """Altruist/cheater/parasite dynamics on the deme graph.

    Per deme i:
      dA = [kappa_h * sum_j m(i,j)(A_j - A_i) + A(lam(1-(A+C)/K) - delta*P - alpha)
            + iota_h * A/(A+C)] dt + sqrt(beta_h * A) dW_A
      dC = same without the alpha cost, with C in the immigration ratio
      dP = [kappa_p * sum_j m(i,j)(P_j - P_i) + P(-nu - gamma*P + eta*C + (eta-rho)*A)
            + iota_p] dt + sqrt(beta_p * P) dW_P

    The immigration split A/(A+C) floors the denominator at floor_eps; the
    state A + C = 0 never occurs in the positivity regime.
    """
    d = g.n_demes
    mT = g.m.T.copy()

    def drift(x: np.ndarray, t: float) -> np.ndarray:
        a, c, pp = x[:, :d], x[:, d : 2 * d], x[:, 2 * d :]
        host = a + c
        crowd = p.lam * (1.0 - host / p.K) - p.delta * pp
        denom = np.maximum(host, floor_eps)
        da = sp.kappa_h * (a @ mT - a) + a * (crowd - sp.alpha) + sp.iota_h * a / denom
        dc = sp.kappa_h * (c @ mT - c) + c * crowd + sp.iota_h * c / denom
        dp = (
            sp.kappa_p * (pp @ mT - pp)
            + pp * (-p.nu - p.gamma * pp + p.eta * c + (p.eta - p.rho) * a)
            + sp.iota_p
        )
        return np.concatenate([da, dc, dp], axis=1)

    def diffusion(x: np.ndarray, t: float) -> np.ndarray:
        a, c, pp = x[:, :d], x[:, d : 2 * d], x[:, 2 * d :]
        return np.concatenate(
            [np.sqrt(sp.beta_h * a), np.sqrt(sp.beta_h * c), np.sqrt(sp.beta_p * pp)], axis=1
        )

    dim = 3 * d
    return SdeModel(
        n_demes=d,
        n_channels=3,
        names=_names(("A", "C", "P"), d),
        drift=drift,
        diffusion=diffusion,
        lower=np.zeros(dim),
        upper=np.full(dim, np.inf),
        noise_free=(sp.beta_h == 0.0 and sp.beta_p == 0.0),
    )


def hfp_model(p: EcologyParams, sp: ScalingParams, g: DemeGraph, floor_eps: float = 1e-6) -> SdeModel:
    """Host-total / altruist-frequency / parasite dynamics (same law as acp_model).

    The frequency equation carries the host-ratio weighted migration
    kappa_h * sum_j m(i,j)(F_j - F_i) * H_j/H_i and diffusion
    sqrt(beta_h * F(1-F)/H). H_j/H_i is clamped to [0, 1/floor_eps]: inverse
    host moments keep such excursions rare, but a discrete step needs a guard.
    """
    d = g.n_demes
    m = g.m
    mT = m.T.copy()
    ratio_cap = 1.0 / floor_eps

    def drift(x: np.ndarray, t: float) -> np.ndarray:
        h, f, pp = x[:, :d], x[:, d : 2 * d], x[:, 2 * d :]
        dh = (
            sp.kappa_h * (h @ mT)
            + (p.lam - sp.kappa_h - sp.alpha * f) * h
            - (p.lam / p.K) * h * h
            - p.delta * pp * h
            + sp.iota_h
        )
        if sp.kappa_h != 0.0 and d > 1:
            ratio = h[:, None, :] / np.maximum(h[:, :, None], floor_eps)
            np.clip(ratio, 0.0, ratio_cap, out=ratio)
            df_mig = sp.kappa_h * np.einsum(
                "ij,rij->ri", m, (f[:, None, :] - f[:, :, None]) * ratio
            )
        else:
            df_mig = 0.0
        df = df_mig - sp.alpha * f * (1.0 - f)
        dp = (
            sp.kappa_p * (pp @ mT)
            - (sp.kappa_p + p.nu) * pp
            - p.gamma * pp * pp
            + (p.eta - p.rho * f) * pp * h
            + sp.iota_p
        )
        return np.concatenate([dh, df, dp], axis=1)

    def diffusion(x: np.ndarray, t: float) -> np.ndarray:
        h, f, pp = x[:, :d], x[:, d : 2 * d], x[:, 2 * d :]
        return np.concatenate(
            [
                np.sqrt(sp.beta_h * h),
                np.sqrt(sp.beta_h * f * (1.0 - f) / np.maximum(h, floor_eps)),
                np.sqrt(sp.beta_p * pp),
            ],
            axis=1,
        )

    lower = np.zeros(3 * d)
    upper = np.concatenate([np.full(d, np.inf), np.ones(d), np.full(d, np.inf)])
    return SdeModel(
        n_demes=d,
        n_channels=3,
        names=_names(("H", "F", "P"), d),
        drift=drift,
        diffusion=diffusion,
        lower=lower,
        upper=upper,
        noise_free=(sp.beta_h == 0.0 and sp.beta_p == 0.0),
    )


@dataclass(frozen=True)
class ScalingSchedule:
    """System-size map N -> ScalingParams with the diffusion-limit normalization.

    kappa_h = kappa_p = kappa/N, alpha_N = alpha/N, beta_h = beta_p =
    beta_target/(N*b); immigration floors keep host and parasite populations
    strictly positive at every finite N:
      iota_h = max(1.5*beta_h + 4*delta*kappa_p/(3*(nu+lam)), iota_floor/N)
      iota_p = max(beta_p, iota_floor/N)
    so every N satisfies the standing parameter inequalities once the
    N-independent ones hold. N * beta_h * b = beta_target exactly.
    """

    ecology: EcologyParams
    kappa: float
    alpha: float
    beta_target: float
    iota_floor: float = 0.05
    constants: LimitConstants = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "constants", derive_limit_constants(self.ecology))

    def params_for(self, N: int) -> ScalingParams:
        ec = self.ecology
        kh = self.kappa / N
        al = self.alpha / N
        bh = self.beta_target / (N * self.constants.b)
        ih = max(1.5 * bh + 4.0 * ec.delta * kh / (3.0 * (ec.nu + ec.lam)), self.iota_floor / N)
        ip = max(bh, self.iota_floor / N)
        return ScalingParams(
            N=N, kappa_h=kh, kappa_p=kh, alpha=al, beta_h=bh, beta_p=bh, iota_h=ih, iota_p=ip
        )


def equilibrium_hfp_state(p: EcologyParams, g: DemeGraph, f0) -> HfpState:
    """HFP state with hosts and parasites at their equilibrium for frequency f0."""
    lc = derive_limit_constants(p)
    f = np.broadcast_to(np.asarray(f0, dtype=float), (g.n_demes,)).copy()
    h, pp = equilibrium_pair(p, lc, f)
    return HfpState(H=np.asarray(h), F=f, P=np.asarray(pp))


def rescaled_frequency_run(
    p: EcologyParams,
    sched: ScalingSchedule,
    g: DemeGraph,
    N: int,
    t_end_slow: float,
    cfg: IntegratorConfig,
    seed: int,
    x0: HfpState,
    slow_du: float = 0.01,
    replica: int = 0,
) -> Path:
    """Integrate the HFP system over fast time [0, t_end_slow*N], recording on the slow grid.

    The returned Path carries slow times u (fast time u*N) and the full
    (H, F, P) state at those instants; cfg.dt is the fast-time step, so the
    total step count grows linearly with N.
    """
    times, records = rescaled_frequency_ensemble(
        p, sched, g, N, t_end_slow, cfg, seed, x0, slow_du=slow_du, n_replicas=1,
        replicas=[replica],
    )
    model_names = _names(("H", "F", "P"), g.n_demes)
    meta = {"N": N, "seed": seed, "replica": replica, "dt_fast": cfg.dt, "slow_du": slow_du}
    return Path(times=times, states=records[:, 0, :], names=model_names, meta=meta)


_BURN_IN_SEED_OFFSET = 1_000_003  # burn-in phase draws from a disjoint seed


def frozen_frequency_model(model: SdeModel) -> SdeModel:
    """HFP model with the frequency block pinned: used to pre-equilibrate (H, P)."""
    d = model.n_demes
    base_drift, base_diffusion = model.drift, model.diffusion

    def drift(x: np.ndarray, t: float) -> np.ndarray:
        out = base_drift(x, t)
        out[:, d : 2 * d] = 0.0
        return out

    def diffusion(x: np.ndarray, t: float) -> np.ndarray:
        out = base_diffusion(x, t)
        out[:, d : 2 * d] = 0.0
        return out

    return SdeModel(
        n_demes=model.n_demes,
        n_channels=model.n_channels,
        names=model.names,
        drift=drift,
        diffusion=diffusion,
        lower=model.lower,
        upper=model.upper,
        noise_free=model.noise_free,
    )


def rescaled_frequency_ensemble(
    p: EcologyParams,
    sched: ScalingSchedule,
    g: DemeGraph,
    N: int,
    t_end_slow: float,
    cfg: IntegratorConfig,
    seed: int,
    x0: HfpState,
    slow_du: float = 0.01,
    n_replicas: int = 1,
    replicas=None,
    burn_in_fast: float = 0.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Replica batch of time-rescaled runs; returns (slow_times, records (n_rec, R, 3D)).

    burn_in_fast > 0 first equilibrates (H, P) for that many fast-time units
    with the frequency block frozen (separate seed), so the main window starts
    from the quasi-stationary host/parasite fluctuation level instead of the
    deterministic equilibrium point.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    sp = sched.params_for(N)
    model = hfp_model(p, sp, g, floor_eps=cfg.floor_eps)
    stride = int(round(slow_du * N / cfg.dt))
    if stride < 1 or abs(stride * cfg.dt - slow_du * N) > 1e-9 * max(1.0, slow_du * N):
        raise ShapeMismatch(
            f"slow_du={slow_du} is not an integer multiple of dt/N (stride would be {slow_du * N / cfg.dt})"
        )
    if replicas is None:
        replicas = list(range(n_replicas))
    batch = np.tile(x0.flat(), (len(replicas), 1))
    if burn_in_fast > 0.0:
        burn_cfg = IntegratorConfig(
            dt=cfg.dt,
            t_end=burn_in_fast,
            record_stride=max(1, int(round(burn_in_fast / cfg.dt))),
            boundary_policy=cfg.boundary_policy,
            floor_eps=cfg.floor_eps,
        )
        _, burn_rec = run_batch(
            frozen_frequency_model(model), batch, burn_cfg, seed + _BURN_IN_SEED_OFFSET, replicas
        )
        batch = burn_rec[-1]
    fast_cfg = IntegratorConfig(
        dt=cfg.dt,
        t_end=t_end_slow * N,
        record_stride=stride,
        boundary_policy=cfg.boundary_policy,
        floor_eps=cfg.floor_eps,
    )
    fast_times, records = run_batch(model, batch, fast_cfg, seed, replicas)
    return fast_times / N, records


def acp_run_records(
    p: EcologyParams,
    sp: ScalingParams,
    g: DemeGraph,
    x0: AcpState,
    cfg: IntegratorConfig,
    seed: int,
    n_replicas: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Replica batch of plain (fast-time) ACP runs."""
    model = acp_model(p, sp, g, floor_eps=cfg.floor_eps)
    return run_batch_records(model, x0.flat(), cfg, seed, n_replicas)


def hfp_run_records(
    p: EcologyParams,
    sp: ScalingParams,
    g: DemeGraph,
    x0: HfpState,
    cfg: IntegratorConfig,
    seed: int,
    n_replicas: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Replica batch of plain (fast-time) HFP runs."""
    model = hfp_model(p, sp, g, floor_eps=cfg.floor_eps)
    return run_batch_records(model, x0.flat(), cfg, seed, n_replicas)

"""Quantitative bridges between simulation output and the limit theory.

  - The entropy-like Lyapunov functional of the host/parasite pair, which is
    nonnegative, vanishes exactly at the frequency-dependent equilibrium, and
    dissipates along the noise-free flow.
  - The N-scaled weighted squared deviation of (H, P) from the equilibrium
    maps along time-rescaled paths (the quantity whose time integral stays
    bounded uniformly in N).
  - Sigma-weighted moment monitors used as boundedness health checks.
  - The monotone-moment verdict for the mean inverse gap of mean-field runs.
  - Kolmogorov-Smirnov distance against a tabulated CDF.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analytics import CdfTable
from .errors import DomainError, EmptySample, InsufficientReplicas, ShapeMismatch
from .limits import WfParams
from .model_core import DemeGraph, EcologyParams, LimitConstants, equilibrium_pair
from .sde import Path

MONOTONE_NON_INCREASING = "NonIncreasing"
MONOTONE_NON_DECREASING = "NonDecreasing"
MONOTONE_CONSTANT = "Constant"


def lyapunov_value(p: EcologyParams, lc: LimitConstants, x, y, z):
    """Entropy-like distance of hosts x and parasites y from equilibrium at frequency z.

    (eta - rho*z) * (x - h - h*ln(x/h)) + delta * (y - pp - pp*ln(y/pp)) with
    (h, pp) the equilibrium pair at z. Nonnegative, zero iff (x, y) = (h, pp).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    if np.any(x <= 0) or np.any(y <= 0):
        raise DomainError("lyapunov_value requires strictly positive populations")
    h, pp = equilibrium_pair(p, lc, z)
    host_part = (p.eta - p.rho * z) * (x - h - h * np.log(x / h))
    para_part = p.delta * (y - pp - pp * np.log(y / pp))
    return host_part + para_part


@dataclass(frozen=True)
class DeviationSeries:
    """N-scaled weighted squared deviations from equilibrium on the slow grid."""

    times: np.ndarray            # slow times u
    host_term: np.ndarray        # N * E-hat[ sum_i sigma_i (H_i - h(F_i))^2 ]
    parasite_term: np.ndarray
    integral: np.ndarray         # running trapezoidal integral of host+parasite terms
    N: int
    n_replicas: int
    stderr_total: np.ndarray     # per-time MC stderr of the N-scaled total
    integral_stderr: float       # MC stderr of the final integral (over replicas)

    def __post_init__(self):
        if np.any(self.host_term < 0) or np.any(self.parasite_term < 0):
            raise ValueError("deviation terms must be nonnegative")
        if np.any(np.diff(self.integral) < -1e-12):
            raise ValueError("running integral must be nondecreasing")

    @property
    def final_integral(self) -> float:
        return float(self.integral[-1])

    def to_csv(self, path) -> None:
        from .sde import write_timeseries_csv

        cols = np.column_stack([self.host_term + self.parasite_term, self.stderr_total])
        write_timeseries_csv(path, self.times, cols, ["value", "stderr"])


def _split_hfp(states: np.ndarray, d: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if states.shape[-1] != 3 * d:
        raise ShapeMismatch(f"state width {states.shape[-1]} does not match 3*D for D={d}")
    return states[..., :d], states[..., d : 2 * d], states[..., 2 * d :]


def deviation_statistic(
    path_or_records,
    p: EcologyParams,
    lc: LimitConstants,
    g: DemeGraph,
    N: int,
    times: np.ndarray | None = None,
) -> DeviationSeries:
    """Compute the N-scaled weighted deviation series and its running time integral.

    Accepts a single Path from a time-rescaled run, or (times, records) with
    records of shape (n_rec, R, 3*D); the ensemble version averages the
    statistic across replicas and reports its Monte Carlo standard error.
    """
    if isinstance(path_or_records, Path):
        times = path_or_records.times
        records = path_or_records.states[:, None, :]
    else:
        records = np.asarray(path_or_records)
        if times is None:
            raise ShapeMismatch("records input requires explicit times")
        if records.ndim == 2:
            records = records[:, None, :]
    d = g.n_demes
    h, f, pp = _split_hfp(records, d)
    h_eq, p_eq = equilibrium_pair(p, lc, f)
    sigma = g.sigma
    host_r = ((h - h_eq) ** 2 * sigma).sum(axis=-1)      # (n_rec, R)
    para_r = ((pp - p_eq) ** 2 * sigma).sum(axis=-1)
    n_replicas = records.shape[1]
    host_term = N * host_r.mean(axis=1)
    para_term = N * para_r.mean(axis=1)
    total_r = N * (host_r + para_r)
    dt_grid = np.diff(times)
    integral_r = (0.5 * (total_r[1:] + total_r[:-1]) * dt_grid[:, None]).sum(axis=0)
    if n_replicas > 1:
        stderr = total_r.std(axis=1, ddof=1) / np.sqrt(n_replicas)
        integral_stderr = float(integral_r.std(ddof=1) / np.sqrt(n_replicas))
    else:
        stderr = np.zeros_like(host_term)
        integral_stderr = 0.0
    total = host_term + para_term
    integral = np.concatenate([[0.0], np.cumsum(0.5 * (total[1:] + total[:-1]) * dt_grid)])
    return DeviationSeries(
        times=np.asarray(times),
        host_term=host_term,
        parasite_term=para_term,
        integral=integral,
        N=N,
        n_replicas=n_replicas,
        stderr_total=stderr,
        integral_stderr=integral_stderr,
    )


_MONITORS = ("combined_p4", "inv_H2", "P_over_H2", "inv_P", "inv_PH")


def moment_monitor(path: Path, p: EcologyParams, g: DemeGraph, which: str) -> tuple[np.ndarray, np.ndarray]:
    """Sigma-weighted functional of the (H, F, P) state over time.

    which selects g(state): (2*eta*H + delta*P)^4, 1/H^2, P/H^2, 1/P, or
    1/(P*H). The series is a boundedness health check mirroring the uniform
    moment bounds, not a proof.
    """
    if which not in _MONITORS:
        raise ValueError(f"unknown monitor {which!r}; choose from {_MONITORS}")
    d = g.n_demes
    h, _, pp = _split_hfp(path.states, d)
    if which in ("inv_H2", "P_over_H2", "inv_PH") and np.any(h <= 0):
        raise DomainError("inverse-H monitors need strictly positive H")
    if which in ("inv_P", "inv_PH") and np.any(pp <= 0):
        raise DomainError("inverse-P monitors need strictly positive P")
    if which == "combined_p4":
        vals = (2.0 * p.eta * h + p.delta * pp) ** 4
    elif which == "inv_H2":
        vals = 1.0 / h**2
    elif which == "P_over_H2":
        vals = pp / h**2
    elif which == "inv_P":
        vals = 1.0 / pp
    else:
        vals = 1.0 / (pp * h)
    return path.times, (vals * g.sigma).sum(axis=-1)


@dataclass(frozen=True)
class MonotoneVerdict:
    direction: str
    slope: float
    slope_stderr: float


def monotone_moment_check(
    times: np.ndarray,
    series: np.ndarray,
    wp: WfParams,
    n_stderr: float = 3.0,
) -> MonotoneVerdict:
    """Classify the trend of the replicate-averaged mean inverse gap.

    series has shape (R, n_times): per replica, the particle average of
    1/(a - Z_t). Fits a least-squares slope per replica; the verdict compares
    the mean slope with n_stderr times its standard error. The drift of this
    quantity carries the sign of beta - alpha, so when alpha != beta a band
    containing zero means the ensemble is too small to resolve the trend and
    InsufficientReplicas is raised.
    """
    times = np.asarray(times, dtype=float)
    series = np.asarray(series, dtype=float)
    if series.ndim != 2 or series.shape[1] != times.size:
        raise ShapeMismatch("series must have shape (R, n_times)")
    t_centered = times - times.mean()
    denom = (t_centered**2).sum()
    if denom == 0.0:
        raise ShapeMismatch("need at least two distinct times")
    slopes = (series - series.mean(axis=1, keepdims=True)) @ t_centered / denom
    slope = float(slopes.mean())
    if series.shape[0] > 1:
        stderr = float(slopes.std(ddof=1) / np.sqrt(series.shape[0]))
    else:
        stderr = 0.0
    band = n_stderr * stderr
    if slope > band and slope > 0:
        direction = MONOTONE_NON_DECREASING
    elif slope < -band:
        direction = MONOTONE_NON_INCREASING
    else:
        direction = MONOTONE_CONSTANT
    if direction == MONOTONE_CONSTANT and wp.alpha != wp.beta and band > 0 and abs(slope) <= band:
        raise InsufficientReplicas(
            f"predicted trend of sign {np.sign(wp.beta - wp.alpha):+.0f} unresolved: "
            f"slope={slope:.3e} +- {stderr:.3e}"
        )
    return MonotoneVerdict(direction=direction, slope=slope, slope_stderr=stderr)


def ks_distance(samples, table: CdfTable) -> float:
    """Sup-norm distance between the empirical CDF of samples and a tabulated CDF."""
    samples = np.sort(np.asarray(samples, dtype=float).ravel())
    n = samples.size
    if n == 0:
        raise EmptySample("ks_distance needs at least one sample")
    cdf_vals = table.evaluate(samples)
    upper = np.arange(1, n + 1) / n - cdf_vals
    lower = cdf_vals - np.arange(0, n) / n
    return float(max(upper.max(), lower.max()))

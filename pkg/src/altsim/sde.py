"""Fixed-grid Euler-Maruyama integration for systems of square-root diffusions.

Design points:
  - Deterministic, replayable randomness. Streams are keyed injectively by
    (seed, replica, deme, channel) through SeedSequence spawn keys. The batch
    integrator consumes one stream per replica, enumerating variates per step
    in fixed (channel, deme) order, so a replica's path never depends on how
    many other replicas run. Experiments that need matched increments across
    models of different deme counts (synchronous coupling) key streams at the
    (replica, deme) level directly.
  - Boundary-respecting stepping. States are projected into the model's
    domain after every step (clamping under full truncation, reflection for
    two-sided bounds under reflect_clamp), so coefficients are only ever
    evaluated on in-domain states and square roots never see negative
    arguments.
  - Replica batching. All replicas advance together on arrays of shape
    (R, dim), which keeps the per-step cost at numpy speed.

State layout is component-major: flat index k = channel * n_demes + deme.
"""

from __future__ import annotations

import io
import json
import os
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError, NonFiniteState

# Prefetched normal increments are capped at roughly this many bytes.
_BLOCK_BYTES = 134_217_728

FULL_TRUNCATION = "full_truncation"
REFLECT_CLAMP = "reflect_clamp"


@dataclass(frozen=True)
class IntegratorConfig:
    """Step size, horizon, recording stride, and boundary policy."""

    dt: float = 1e-3
    t_end: float = 1.0
    record_stride: int = 1
    boundary_policy: str = FULL_TRUNCATION
    floor_eps: float = 1e-6

    def __post_init__(self):
        if not self.dt > 0:
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if self.t_end < 0:
            raise ConfigError(f"t_end must be nonnegative, got {self.t_end}")
        if self.record_stride < 1:
            raise ConfigError(f"record_stride must be >= 1, got {self.record_stride}")
        if self.boundary_policy not in (FULL_TRUNCATION, REFLECT_CLAMP):
            raise ConfigError(f"unknown boundary policy {self.boundary_policy!r}")
        if not 0 < self.floor_eps <= 1e-3:
            raise ConfigError(f"floor_eps must be in (0, 1e-3], got {self.floor_eps}")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))


@dataclass(frozen=True)
class RngStream:
    """One Brownian-increment stream, keyed injectively by (seed, replica, deme, channel)."""

    seed: int
    replica: int = 0
    deme: int = 0
    channel: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.replica, self.deme, self.channel))
        return np.random.Generator(np.random.PCG64(ss))


def init_generator(seed: int, replica: int, n_demes: int, n_channels: int) -> np.random.Generator:
    """Generator reserved for initial-condition sampling of one replica.

    Uses channel index n_channels, which no Brownian stream occupies, so
    initial draws never collide with increment streams.
    """
    return RngStream(seed, replica, n_demes, n_channels).generator()


@dataclass(frozen=True)
class SdeModel:
    """Drift/diffusion callbacks with domain bounds.

    drift(x, t) and diffusion(x, t) map (R, dim) -> (R, dim); diffusion is the
    per-channel coefficient multiplying independent normal increments. lower
    and upper are per-component domain bounds (use +-inf for unbounded).
    noise_free marks identically-zero diffusion, letting the integrator skip
    increment generation and reduce to explicit Euler.
    """

    n_demes: int
    n_channels: int
    names: tuple[str, ...]
    drift: Callable[[np.ndarray, float], np.ndarray]
    diffusion: Callable[[np.ndarray, float], np.ndarray]
    lower: np.ndarray
    upper: np.ndarray
    noise_free: bool = False

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        if lower.shape != (self.dim,) or upper.shape != (self.dim,):
            raise ConfigError("domain bounds must have one entry per state component")
        if len(self.names) != self.dim:
            raise ConfigError("need one name per state component")
        lower.setflags(write=False)
        upper.setflags(write=False)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dim(self) -> int:
        return self.n_demes * self.n_channels


def scalar_model(name: str, drift, diffusion, lower=-np.inf, upper=np.inf, noise_free=False) -> SdeModel:
    """One-component model from scalar-vectorized callbacks."""
    return SdeModel(
        n_demes=1,
        n_channels=1,
        names=(name,),
        drift=drift,
        diffusion=diffusion,
        lower=np.array([lower]),
        upper=np.array([upper]),
        noise_free=noise_free,
    )


@dataclass(frozen=True)
class Path:
    """A single recorded trajectory on a uniform time grid."""

    times: np.ndarray
    states: np.ndarray  # (n_rec, dim)
    names: tuple[str, ...]
    meta: dict

    def to_csv(self, path) -> None:
        write_timeseries_csv(path, self.times, self.states, self.names)


class _StreamBank:
    """Prefetches normal increments, one stream per replica, in memory-capped blocks.

    Within a replica's stream, variates are consumed step-major in a fixed
    (channel, deme) enumeration per step, so a given (seed, replica) always
    reproduces the same increments for a fixed model layout.
    """

    def __init__(self, seed: int, replicas: Sequence[int], dim: int):
        self.replicas = list(replicas)
        self.dim = dim
        self.generators = [RngStream(seed, r).generator() for r in self.replicas]

    def block_size(self, n_steps: int) -> int:
        per_step = len(self.replicas) * self.dim
        cap = max(1, _BLOCK_BYTES // (16 * max(1, per_step)))
        return min(n_steps, cap, 65536) if n_steps > 0 else 0

    def draw_block(self, n: int) -> np.ndarray:
        """Normal increments of shape (n, R, dim); per-step slices are contiguous."""
        out = np.empty((n, len(self.replicas), self.dim))
        for ri, gen in enumerate(self.generators):
            out[:, ri, :] = gen.standard_normal((n, self.dim))
        return out


def _project(x: np.ndarray, model: SdeModel, policy: str) -> np.ndarray:
    if policy == REFLECT_CLAMP:
        finite_both = np.isfinite(model.lower) & np.isfinite(model.upper)
        if np.any(finite_both):
            lo = model.lower[finite_both]
            hi = model.upper[finite_both]
            seg = x[..., finite_both]
            seg = np.where(seg < lo, 2 * lo - seg, seg)
            seg = np.where(seg > hi, 2 * hi - seg, seg)
            x[..., finite_both] = seg
    return np.clip(x, model.lower, model.upper, out=x)


def run_batch(
    model: SdeModel,
    x0: np.ndarray,
    cfg: IntegratorConfig,
    seed: int,
    replicas: Sequence[int],
    on_record: Callable[[int, float, np.ndarray], None] | None = None,
    keep_records: bool = True,
) -> tuple[np.ndarray, np.ndarray | None]:
    """Advance a batch of replicas; record every record_stride-th step (and t=0).

    x0 has shape (R, dim). Returns (times, records) where records is
    (n_rec, R, dim), or None when keep_records is False (streaming reduction
    via on_record only). Replica r's trajectory depends only on (seed, r).
    """
    x = np.array(x0, dtype=float)
    if x.ndim != 2 or x.shape[1] != model.dim:
        raise ConfigError(f"x0 batch must have shape (R, {model.dim})")
    _project(x, model, cfg.boundary_policy)
    n_steps = cfg.n_steps
    stride = cfg.record_stride
    n_rec = n_steps // stride + 1
    times = np.arange(n_rec) * (cfg.dt * stride)
    records = np.empty((n_rec, x.shape[0], model.dim)) if keep_records else None

    def record(idx: int, t: float, state: np.ndarray) -> None:
        if records is not None:
            records[idx] = state
        if on_record is not None:
            on_record(idx, t, state)

    record(0, 0.0, x)
    if n_steps == 0:
        return times, records

    # States are projected into the domain after every step (and at entry),
    # so coefficient evaluation below always sees in-domain arguments; square
    # roots in diffusion terms therefore never receive negative inputs.
    dt = cfg.dt
    sqrt_dt = np.sqrt(dt)
    policy = cfg.boundary_policy
    drift = model.drift
    diffusion = model.diffusion
    step = 0
    rec_idx = 1

    def check_and_record() -> None:
        nonlocal rec_idx
        if not np.isfinite(x.sum()):
            finite_rows = np.isfinite(x).all(axis=1)
            bad = int(np.argmax(~finite_rows))
            raise NonFiniteState(step, replica=replicas[bad])
        if step % stride == 0:
            record(rec_idx, step * dt, x)
            rec_idx += 1

    if model.noise_free:
        while step < n_steps:
            t = step * dt
            x = _project(x + drift(x, t) * dt, model, policy)
            step += 1
            check_and_record()
        return times, records

    bank = _StreamBank(seed, replicas, model.dim)
    block = bank.block_size(n_steps)
    while step < n_steps:
        n = min(block, n_steps - step)
        xi_block = bank.draw_block(n)
        for k in range(n):
            t = step * dt
            x = _project(
                x + drift(x, t) * dt + diffusion(x, t) * (sqrt_dt * xi_block[k]),
                model,
                policy,
            )
            step += 1
            check_and_record()
    return times, records


def integrate(model: SdeModel, x0: np.ndarray, cfg: IntegratorConfig, seed: int, replica: int = 0) -> Path:
    """Integrate a single trajectory and return its recorded Path."""
    x0 = np.asarray(x0, dtype=float).reshape(1, -1)
    times, records = run_batch(model, x0, cfg, seed, [replica])
    meta = {
        "seed": seed,
        "replica": replica,
        "dt": cfg.dt,
        "t_end": cfg.t_end,
        "record_stride": cfg.record_stride,
        "boundary_policy": cfg.boundary_policy,
    }
    return Path(times=times, states=records[:, 0, :], names=tuple(model.names), meta=meta)


# --- ensembles and reducers ---------------------------------------------------


class MeanVarReducer:
    """Per-time cross-replica mean and (unbiased) variance of every component."""

    name = "mean_var"

    def start(self, n_rec: int, dim: int, n_replicas: int) -> None:
        self.mean = np.zeros((n_rec, dim))
        self.var = np.zeros((n_rec, dim))

    def update(self, idx: int, t: float, batch: np.ndarray) -> None:
        self.mean[idx] = batch.mean(axis=0)
        self.var[idx] = batch.var(axis=0, ddof=1) if batch.shape[0] > 1 else 0.0


class HistogramReducer:
    """Per-time histogram of all components pooled, over [lo, hi]."""

    name = "histogram"

    def __init__(self, bins: int = 32, lo: float = 0.0, hi: float = 1.0):
        if bins < 1:
            raise ConfigError("histogram needs at least one bin")
        self.bins = bins
        self.edges = np.linspace(lo, hi, bins + 1)

    def start(self, n_rec: int, dim: int, n_replicas: int) -> None:
        self.counts = np.zeros((n_rec, self.bins), dtype=np.int64)

    def update(self, idx: int, t: float, batch: np.ndarray) -> None:
        self.counts[idx], _ = np.histogram(batch, bins=self.edges)


class UserStatReducer:
    """Stores fn(state_row) per replica per recorded time; fn maps (R, dim) -> (R,)."""

    name = "user"

    def __init__(self, fn: Callable[[np.ndarray], np.ndarray], label: str = "stat"):
        self.fn = fn
        self.label = label

    def start(self, n_rec: int, dim: int, n_replicas: int) -> None:
        self.values = np.zeros((n_rec, n_replicas))

    def update(self, idx: int, t: float, batch: np.ndarray) -> None:
        self.values[idx] = self.fn(batch)


@dataclass
class EnsembleStats:
    """Reduced statistics of an ensemble on the recording grid."""

    times: np.ndarray
    n_replicas: int
    mean: np.ndarray
    var: np.ndarray
    names: tuple[str, ...]
    histogram: HistogramReducer | None = None
    user: dict[str, np.ndarray] = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def to_csv(self, path) -> None:
        cols = [f"mean_{n}" for n in self.names] + [f"var_{n}" for n in self.names]
        write_timeseries_csv(path, self.times, np.hstack([self.mean, self.var]), cols)

    def to_json(self, path) -> None:
        doc = {
            "n_replicas": self.n_replicas,
            "times": self.times.tolist(),
            "names": list(self.names),
            "mean": self.mean.tolist(),
            "var": self.var.tolist(),
            "meta": self.meta,
        }
        if self.histogram is not None:
            doc["histogram"] = {
                "bin_edges": self.histogram.edges.tolist(),
                "counts": self.histogram.counts.tolist(),
            }
        for label, values in self.user.items():
            doc.setdefault("user", {})[label] = values.tolist()
        atomic_write_text(path, json.dumps(doc, indent=1))


def ensemble(
    model: SdeModel,
    x0_sampler,
    cfg: IntegratorConfig,
    base_seed: int,
    n_replicas: int,
    reducers: Sequence | None = None,
) -> EnsembleStats:
    """Run n_replicas independent replicas and apply streaming reducers.

    x0_sampler is either a fixed (dim,) array or a callable
    (rng, replica) -> (dim,). Replica r always sees the streams derived from
    (base_seed, r), so results do not depend on execution order or on
    n_replicas for the replicas that are shared.
    """
    if n_replicas < 1:
        raise ConfigError("need at least one replica")
    replicas = list(range(n_replicas))
    x0 = np.empty((n_replicas, model.dim))
    for r in replicas:
        if callable(x0_sampler):
            rng = init_generator(base_seed, r, model.n_demes, model.n_channels)
            x0[r] = np.asarray(x0_sampler(rng, r), dtype=float)
        else:
            x0[r] = np.asarray(x0_sampler, dtype=float)

    reducer_list = [MeanVarReducer()] + list(reducers or [])
    n_rec = cfg.n_steps // cfg.record_stride + 1
    for red in reducer_list:
        red.start(n_rec, model.dim, n_replicas)

    def on_record(idx: int, t: float, batch: np.ndarray) -> None:
        for red in reducer_list:
            red.update(idx, t, batch)

    times, _ = run_batch(model, x0, cfg, base_seed, replicas, on_record=on_record, keep_records=False)
    mv = reducer_list[0]
    hist = next((r for r in reducer_list if isinstance(r, HistogramReducer)), None)
    user = {r.label: r.values for r in reducer_list if isinstance(r, UserStatReducer)}
    return EnsembleStats(
        times=times,
        n_replicas=n_replicas,
        mean=mv.mean,
        var=mv.var,
        names=tuple(model.names),
        histogram=hist,
        user=user,
        meta={"seed": base_seed, "dt": cfg.dt, "record_stride": cfg.record_stride},
    )


def run_batch_records(
    model: SdeModel,
    x0_sampler,
    cfg: IntegratorConfig,
    base_seed: int,
    n_replicas: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Like ensemble(), but returns the raw recorded batch (n_rec, R, dim)."""
    replicas = list(range(n_replicas))
    x0 = np.empty((n_replicas, model.dim))
    for r in replicas:
        if callable(x0_sampler):
            rng = init_generator(base_seed, r, model.n_demes, model.n_channels)
            x0[r] = np.asarray(x0_sampler(rng, r), dtype=float)
        else:
            x0[r] = np.asarray(x0_sampler, dtype=float)
    return run_batch(model, x0, cfg, base_seed, replicas)


# --- deterministic file output ------------------------------------------------


def atomic_write_text(path, text: str) -> None:
    """Write-temp-then-rename so partial files are never observed."""
    path = os.fspath(path)
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def write_timeseries_csv(path, times: np.ndarray, values: np.ndarray, names: Sequence[str]) -> None:
    """CSV with header `t,<names...>` and locale-independent float formatting."""
    values = np.asarray(values)
    if values.ndim == 1:
        values = values[:, None]
    buf = io.StringIO()
    buf.write("t," + ",".join(names) + "\n")
    for t, row in zip(times, values):
        buf.write("%.17g," % t + ",".join("%.17g" % v for v in row) + "\n")
    atomic_write_text(path, buf.getvalue())

"""Model parameters, derived limit constants, equilibrium maps, and deme graphs.

The ecological model couples a two-type host population (altruists carrying a
defense trait, and cheaters) to a parasite population on a finite set of demes.
This module holds the parameter containers, the host/parasite equilibrium as a
function of the local altruist frequency, the derived constants (a, b) used by
all limit models, standing-assumption checks, and deme-graph builders with
Liggett-Spitzer weights.

Everything here is immutable after construction and purely functional.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ConfigError, DegenerateEquilibrium, InvalidSize

ArrayLike = Union[float, np.ndarray]

_STOCHASTIC_TOL = 1e-12


@dataclass(frozen=True)
class EcologyParams:
    """The seven ecological rates of the host/parasite interaction.

    lam:   host growth rate (1/time)
    K:     host carrying capacity (population units)
    delta: predation pressure per parasite (1/(pop*time))
    nu:    parasite death rate (1/time)
    gamma: parasite self-competition (1/(pop*time))
    eta:   parasite growth per cheater host (1/(pop*time))
    rho:   defense-induced reduction of parasite growth (1/(pop*time))
    """

    lam: float
    K: float
    delta: float
    nu: float
    gamma: float
    eta: float
    rho: float

    def __post_init__(self):
        for name in ("lam", "K", "delta", "nu", "gamma", "eta", "rho"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"EcologyParams.{name} must be strictly positive, got {v}")
        if not self.rho < self.eta:
            raise ValueError(f"need rho < eta, got rho={self.rho}, eta={self.eta}")
        if not self.K * (self.eta - self.rho) > self.nu:
            raise DegenerateEquilibrium(
                f"K*(eta-rho)={self.K * (self.eta - self.rho)} <= nu={self.nu}: "
                "parasite equilibrium would vanish at full altruist frequency"
            )


@dataclass(frozen=True)
class ScalingParams:
    """System-size-indexed rates: migration, selection cost, noise, immigration.

    All rates are per unit time at system-size level N; they are o(1) in the
    diffusion-limit regime.
    """

    N: int
    kappa_h: float = 0.0
    kappa_p: float = 0.0
    alpha: float = 0.0
    beta_h: float = 0.0
    beta_p: float = 0.0
    iota_h: float = 0.0
    iota_p: float = 0.0

    def __post_init__(self):
        if self.N < 1:
            raise ValueError(f"N must be >= 1, got {self.N}")
        for name in ("kappa_h", "kappa_p", "alpha", "beta_h", "beta_p", "iota_h", "iota_p"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v >= 0):
                raise ValueError(f"ScalingParams.{name} must be nonnegative, got {v}")


@dataclass(frozen=True)
class LimitConstants:
    """Shifted frequency scale a > 1 and inverse-scale constant b (1/pop).

    With these, the host equilibrium is 1/(b(a-x)) for altruist frequency x.
    """

    a: float
    b: float
    K: float

    def __post_init__(self):
        if not self.a > 1:
            raise ValueError(f"a must exceed 1, got {self.a}")
        if not self.b > 0:
            raise ValueError(f"b must be positive, got {self.b}")
        if not self.K * self.b * (self.a - 1) > 1:
            raise DegenerateEquilibrium(
                f"K*b*(a-1)={self.K * self.b * (self.a - 1)} <= 1"
            )


def derive_limit_constants(p: EcologyParams) -> LimitConstants:
    """Compute a = (lam*gamma + delta*K*eta)/(delta*K*rho), b = delta*rho/(delta*nu + lam*gamma).

    Raises DegenerateEquilibrium when K*b*(a-1) <= 1, i.e. K*(eta-rho) <= nu.
    The two closed forms of the equilibrium pair are cross-checked on a small
    frequency grid at construction.
    """
    a = (p.lam * p.gamma + p.delta * p.K * p.eta) / (p.delta * p.K * p.rho)
    b = (p.delta * p.rho) / (p.delta * p.nu + p.lam * p.gamma)
    lc = LimitConstants(a=a, b=b, K=p.K)
    xs = np.linspace(0.0, 1.0, 11)
    h_ab, p_ab = equilibrium_pair(p, lc, xs)
    h_rat, p_rat = equilibrium_pair_rational(p, xs)
    scale = max(1.0, float(np.max(np.abs(h_rat))), float(np.max(np.abs(p_rat))))
    if np.max(np.abs(h_ab - h_rat)) > 1e-10 * scale or np.max(np.abs(p_ab - p_rat)) > 1e-10 * scale:
        raise DegenerateEquilibrium("closed forms of the equilibrium disagree (ill-conditioned rates)")
    return lc


def equilibrium_pair(p: EcologyParams, lc: LimitConstants, x: ArrayLike) -> tuple[ArrayLike, ArrayLike]:
    """Host/parasite equilibrium (h, pp) at altruist frequency x, in (a, b) form.

    h(x) = 1/(b(a-x)) and pp(x) = (lam/delta)*(1 - 1/(K*b*(a-x))); both are
    strictly positive on [0, 1]. This form is the one used in hot loops.
    """
    x = np.asarray(x, dtype=float)
    s = 1.0 / (lc.b * (lc.a - x))
    h = s
    pp = (p.lam / p.delta) * (1.0 - s / p.K)
    return h, pp


def equilibrium_pair_rational(p: EcologyParams, x: ArrayLike) -> tuple[ArrayLike, ArrayLike]:
    """Equilibrium pair in the rational-in-rates form (independent evaluation path)."""
    x = np.asarray(x, dtype=float)
    denom = p.lam * p.gamma + p.delta * p.K * (p.eta - p.rho * x)
    h = p.K * (p.delta * p.nu + p.gamma * p.lam) / denom
    pp = (p.lam * p.K * (p.eta - p.rho * x) - p.lam * p.nu) / denom
    return h, pp


def equilibrium_derivatives(lc: LimitConstants, ec: EcologyParams, x: ArrayLike):
    """First and second derivatives (h1, h2, p1, p2) of the equilibrium maps at x.

    h is strictly increasing and convex; pp strictly decreasing and concave.
    """
    x = np.asarray(x, dtype=float)
    d2 = (lc.a - x) ** 2
    d3 = (lc.a - x) ** 3
    h1 = 1.0 / (lc.b * d2)
    h2 = 2.0 / (lc.b * d3)
    p1 = -ec.lam / (ec.delta * ec.K * lc.b * d2)
    p2 = -2.0 * ec.lam / (ec.delta * ec.K * lc.b * d3)
    return h1, h2, p1, p2


@dataclass(frozen=True)
class AssumptionReport:
    """Pass/fail flags for the standing parameter inequalities.

    Moment conditions on initial data cannot be evaluated from parameters
    alone and are reported in `notes`.
    """

    flags: dict[str, bool]
    notes: dict[str, str]

    @property
    def all_ok(self) -> bool:
        return all(self.flags.values())

    def __str__(self) -> str:
        lines = [f"{'PASS' if ok else 'FAIL'}  {name}" for name, ok in self.flags.items()]
        lines += [f"NOTE  {k}: {v}" for k, v in self.notes.items()]
        return "\n".join(lines)


def check_assumptions(p: EcologyParams, sp: ScalingParams) -> AssumptionReport:
    """Evaluate every parameter-only inequality of the standing assumptions.

    Diagnostic only: never raises. The strict inequalities on the ecological
    rates guarantee dissipation of the host/parasite deviation; the
    N-dependent ones bound migration/selection/immigration at level N.
    """
    flags = {
        "lam_gt_nu": p.lam > p.nu,
        "eta_minus_rho_gt_lam_over_K": p.eta - p.rho > p.lam / p.K,
        "gamma_ge_2delta": p.gamma >= 2.0 * p.delta,
        "alpha_plus_kappa_h_le_quarter_lam": sp.alpha + sp.kappa_h <= p.lam / 4.0,
        "iota_p_le_lam_nu_plus_lam_over_8delta": sp.iota_p <= p.lam * (p.nu + p.lam) / (8.0 * p.delta),
        "kappa_p_plus_kappa_h_plus_alpha_le_half_gap": sp.kappa_p + sp.kappa_h + sp.alpha <= (p.lam - p.nu) / 2.0,
        "iota_h_ge_kappa_p_term_plus_1p5_beta_h": sp.iota_h
        >= 4.0 * p.delta * sp.kappa_p / (3.0 * (p.nu + p.lam)) + 1.5 * sp.beta_h,
        "iota_p_ge_beta_p": sp.iota_p >= sp.beta_p,
    }
    notes = {
        "initial_moments": "not checkable here (conditions on the initial configuration)",
    }
    return AssumptionReport(flags=flags, notes=notes)


@dataclass(frozen=True)
class DemeGraph:
    """Finite deme set with migration matrix and Liggett-Spitzer weights.

    m is doubly stochastic (all row and column sums 1); sigma is a strictly
    positive weight vector; c is the smallest constant with
    sum_i sigma_i * m(i, j) <= c * sigma_j for every column j.
    """

    m: np.ndarray
    sigma: np.ndarray
    c: float

    def __post_init__(self):
        m = np.asarray(self.m, dtype=float)
        sigma = np.asarray(self.sigma, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"m must be square, got shape {m.shape}")
        if sigma.shape != (m.shape[0],):
            raise ValueError("sigma length must match the number of demes")
        if np.any(m < 0):
            raise ValueError("migration matrix must be nonnegative")
        if np.max(np.abs(m.sum(axis=0) - 1.0)) > _STOCHASTIC_TOL or np.max(np.abs(m.sum(axis=1) - 1.0)) > _STOCHASTIC_TOL:
            raise ValueError("migration matrix must be row- and column-stochastic")
        if np.any(sigma <= 0) or not np.all(np.isfinite(sigma)):
            raise ValueError("weights must be strictly positive and finite")
        c_tight = float(np.max((sigma @ m) / sigma))
        if self.c < c_tight - 1e-12:
            raise ValueError(f"c={self.c} violates the weight inequality (needs >= {c_tight})")
        m.setflags(write=False)
        sigma.setflags(write=False)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "sigma", sigma)

    @property
    def n_demes(self) -> int:
        return self.m.shape[0]


def _torus1d_matrix(d: int) -> np.ndarray:
    m = np.zeros((d, d))
    for i in range(d):
        m[i, (i - 1) % d] += 0.5
        m[i, (i + 1) % d] += 0.5
    return m


def _torus2d_matrix(dx: int, dy: int) -> np.ndarray:
    d = dx * dy
    m = np.zeros((d, d))
    for ix in range(dx):
        for iy in range(dy):
            i = ix * dy + iy
            for jx, jy in (((ix - 1) % dx, iy), ((ix + 1) % dx, iy), (ix, (iy - 1) % dy), (ix, (iy + 1) % dy)):
                m[i, jx * dy + jy] += 0.25
    return m


def _torus1d_distances(d: int) -> np.ndarray:
    idx = np.arange(d)
    return np.minimum(idx, d - idx)


def _torus2d_distances(dx: int, dy: int) -> np.ndarray:
    ax = _torus1d_distances(dx)
    ay = _torus1d_distances(dy)
    return (ax[:, None] + ay[None, :]).ravel()


def build_deme_graph(kind: str, size: int | tuple[int, int] | None = None, weight_decay: float = 0.5) -> DemeGraph:
    """Build a deme graph of one of the supported kinds.

    kind: "single", "complete_uniform", "torus1d", or "torus2d".
    size: deme count D (int) for the first three, (Dx, Dy) for "torus2d".
    weight_decay: base of the geometric weights sigma_i = decay**dist(i, origin)
        on tori, in (0, 1]; decay=1 gives uniform weights. Ignored for
        "single"/"complete_uniform", which use sigma_i = 1/D.

    The constant c is always computed tight: the weight inequality holds with
    equality for at least one column.
    """
    if kind == "single":
        d = 1 if size is None else int(size)
        if d != 1:
            raise InvalidSize("kind 'single' has exactly one deme")
        m = np.array([[1.0]])
        sigma = np.array([1.0])
    elif kind == "complete_uniform":
        d = int(size)
        if d < 1:
            raise InvalidSize(f"need D >= 1, got {d}")
        m = np.full((d, d), 1.0 / d)
        sigma = np.full(d, 1.0 / d)
    elif kind == "torus1d":
        d = int(size)
        if d < 1:
            raise InvalidSize(f"need D >= 1, got {d}")
        if not 0 < weight_decay <= 1:
            raise ValueError(f"weight_decay must be in (0, 1], got {weight_decay}")
        m = _torus1d_matrix(d) if d > 1 else np.array([[1.0]])
        sigma = weight_decay ** _torus1d_distances(d).astype(float)
    elif kind == "torus2d":
        try:
            dx, dy = (int(v) for v in size)
        except TypeError:
            raise InvalidSize("torus2d needs size=(Dx, Dy)") from None
        if dx < 1 or dy < 1:
            raise InvalidSize(f"need Dx, Dy >= 1, got ({dx}, {dy})")
        if not 0 < weight_decay <= 1:
            raise ValueError(f"weight_decay must be in (0, 1], got {weight_decay}")
        m = _torus2d_matrix(dx, dy) if dx * dy > 1 else np.array([[1.0]])
        sigma = weight_decay ** _torus2d_distances(dx, dy).astype(float)
    else:
        raise ConfigError(f"unknown graph kind {kind!r}")
    c = float(np.max((sigma @ m) / sigma))
    return DemeGraph(m=m, sigma=sigma, c=c)


# --- strict JSON parameter loading -------------------------------------------

_ECOLOGY_KEYS = {"lambda": "lam", "K": "K", "delta": "delta", "nu": "nu",
                 "gamma": "gamma", "eta": "eta", "rho": "rho"}
_SCALING_KEYS = {"N": "N", "kappa_h": "kappa_h", "kappa_p": "kappa_p", "alpha": "alpha",
                 "beta_h": "beta_h", "beta_p": "beta_p", "iota_h": "iota_h", "iota_p": "iota_p"}
_GRAPH_KEYS = {"kind", "size", "weight_decay"}


@dataclass(frozen=True)
class ParamsBundle:
    ecology: EcologyParams | None
    scaling: ScalingParams | None
    graph: DemeGraph | None


def _require_mapping(doc, where: str) -> dict:
    if not isinstance(doc, dict):
        raise ConfigError(f"{where} must be a JSON object, got {type(doc).__name__}")
    return doc


def parse_params(doc: dict) -> ParamsBundle:
    """Parse a parameter document with top-level keys "ecology", "scaling", "graph".

    Unknown keys at any level are an error (strict schema).
    """
    doc = _require_mapping(doc, "parameter document")
    unknown = set(doc) - {"ecology", "scaling", "graph"}
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")

    ecology = scaling = graph = None
    if "ecology" in doc:
        block = _require_mapping(doc["ecology"], '"ecology"')
        bad = set(block) - set(_ECOLOGY_KEYS)
        if bad:
            raise ConfigError(f'unknown keys in "ecology": {sorted(bad)}')
        missing = set(_ECOLOGY_KEYS) - set(block)
        if missing:
            raise ConfigError(f'missing keys in "ecology": {sorted(missing)}')
        try:
            ecology = EcologyParams(**{attr: float(block[k]) for k, attr in _ECOLOGY_KEYS.items()})
        except (ValueError, DegenerateEquilibrium) as exc:
            raise ConfigError(f'invalid "ecology": {exc}') from exc
    if "scaling" in doc:
        block = _require_mapping(doc["scaling"], '"scaling"')
        bad = set(block) - set(_SCALING_KEYS)
        if bad:
            raise ConfigError(f'unknown keys in "scaling": {sorted(bad)}')
        if "N" not in block:
            raise ConfigError('"scaling" requires "N"')
        kwargs = {attr: (int(block[k]) if k == "N" else float(block[k]))
                  for k, attr in _SCALING_KEYS.items() if k in block}
        try:
            scaling = ScalingParams(**kwargs)
        except ValueError as exc:
            raise ConfigError(f'invalid "scaling": {exc}') from exc
    if "graph" in doc:
        block = _require_mapping(doc["graph"], '"graph"')
        bad = set(block) - _GRAPH_KEYS
        if bad:
            raise ConfigError(f'unknown keys in "graph": {sorted(bad)}')
        if "kind" not in block:
            raise ConfigError('"graph" requires "kind"')
        size = block.get("size")
        if isinstance(size, list):
            size = tuple(size)
        try:
            graph = build_deme_graph(block["kind"], size, float(block.get("weight_decay", 0.5)))
        except (InvalidSize, ValueError, ConfigError) as exc:
            raise ConfigError(f'invalid "graph": {exc}') from exc
    return ParamsBundle(ecology=ecology, scaling=scaling, graph=graph)


def load_params(path) -> ParamsBundle:
    """Load and strictly validate a JSON parameter file."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    return parse_params(doc)

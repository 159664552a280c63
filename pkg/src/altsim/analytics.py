"""Stationary, fixation, and invasion theory for the frequency diffusions.

Closed forms and quadrature for:
  - the speed density m_theta(z) = z^(u-1) (1-z)^(v-1) (a-z)^(2*alpha/beta - 1)
    of the frozen-theta diffusion, with u = (2*kappa/beta)(a*theta - 1) and
    v = (2*kappa/beta)(1 - theta*(a-1)), and the equilibrium family Psi_theta;
  - Beta/Gamma moment identities, including the residual integral that
    vanishes identically in theta;
  - the fixation trichotomy driven by sign(alpha - beta);
  - the scale function of the single-colony diffusion, the colonization rate,
    and the closed-form invasion criterion (survival iff alpha < beta).

Densities are evaluated in log-space. Integrals with algebraic endpoint
singularities use QUADPACK's algebraic-weight rule (u, v can be arbitrarily
small near the ends of the admissible theta interval), with log-Gamma /
hypergeometric closed forms as an independent second evaluation path.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import integrate as sp_integrate
from scipy import special as sp_special

from .errors import DomainError, QuadratureFailure, ThetaOutOfRange
from .limits import WfParams

_QUAD_LIMIT = 200


def _quad(func, lo, hi, *, weight=None, wvar=None, epsabs=1e-12, epsrel=1e-11, tol=1e-10, what=""):
    """scipy.integrate.quad wrapper that turns warnings into QuadratureFailure."""
    out = sp_integrate.quad(
        func, lo, hi, weight=weight, wvar=wvar, epsabs=epsabs, epsrel=epsrel,
        limit=_QUAD_LIMIT, full_output=1,
    )
    value, abserr = out[0], out[1]
    if len(out) > 3:
        raise QuadratureFailure(f"{what or 'integral'}: {out[3]}")
    if not np.isfinite(value) or abserr > max(tol, 1e-9 * abs(value)):
        raise QuadratureFailure(f"{what or 'integral'}: abserr={abserr} at value={value}")
    return value


def _exponents(wp: WfParams, theta: float) -> tuple[float, float]:
    lo, hi = wp.theta_range
    if not lo < theta < hi:
        raise ThetaOutOfRange(f"theta={theta} outside ({lo}, {hi})")
    u = (2.0 * wp.kappa / wp.beta) * (wp.a * theta - 1.0)
    v = (2.0 * wp.kappa / wp.beta) * (1.0 - theta * (wp.a - 1.0))
    return u, v


@dataclass(frozen=True)
class CdfTable:
    """Monotone CDF tabulated on a grid over [0, 1]."""

    z: np.ndarray
    cdf: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.z, dtype=float)
        cdf = np.asarray(self.cdf, dtype=float)
        if z.shape != cdf.shape or z.ndim != 1 or z.size < 2:
            raise ValueError("need matching 1-d grids with at least two points")
        if np.any(np.diff(z) <= 0) or np.any(np.diff(cdf) < 0):
            raise ValueError("z must increase strictly and cdf must be nondecreasing")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "cdf", cdf)

    def evaluate(self, x) -> np.ndarray:
        return np.interp(np.asarray(x, dtype=float), self.z, self.cdf, left=0.0, right=1.0)

    def inverse(self, q) -> np.ndarray:
        return np.interp(np.asarray(q, dtype=float), self.cdf, self.z)

    @property
    def median(self) -> float:
        return float(self.inverse(0.5))

    def to_csv(self, path, density=None) -> None:
        from .sde import atomic_write_text

        lines = ["z,m_theta,cdf"]
        dens = density if density is not None else np.full_like(self.z, np.nan)
        for z, d, c in zip(self.z, dens, self.cdf):
            lines.append("%.17g,%.17g,%.17g" % (z, d, c))
        atomic_write_text(path, "\n".join(lines) + "\n")


class StationaryModel:
    """The equilibrium distribution Psi_theta of the frozen-theta diffusion.

    Holds theta, the Beta-like exponents (u, v), the unnormalized speed
    density, and the normalizer c_theta. theta must lie strictly inside
    (1/a, 1/(a-1)); the boundary values correspond to the Dirac measures at
    0 and 1 and are handled by the fixation classifier instead.
    """

    def __init__(self, wp: WfParams, theta: float):
        self.wp = wp
        self.theta = float(theta)
        self.u, self.v = _exponents(wp, self.theta)
        self.s = 2.0 * wp.alpha / wp.beta - 1.0
        self.c_theta = _quad(
            lambda z: (wp.a - z) ** self.s,
            0.0, 1.0, weight="alg", wvar=(self.u - 1.0, self.v - 1.0),
            tol=np.inf, what="c_theta",
        )
        if not (np.isfinite(self.c_theta) and self.c_theta > 0):
            raise QuadratureFailure(f"c_theta={self.c_theta} must be positive and finite")

    def log_density(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        return (self.u - 1.0) * np.log(z) + (self.v - 1.0) * np.log1p(-z) + self.s * np.log(self.wp.a - z)

    def density(self, z) -> np.ndarray:
        """Unnormalized speed density on (0, 1); divide by c_theta to normalize."""
        return np.exp(self.log_density(z))

    @cached_property
    def table(self) -> CdfTable:
        return self.cdf_table()

    def cdf_table(self, n_cells: int = 10_000) -> CdfTable:
        """Normalized CDF on a sin^2-clustered grid (dense near both endpoints).

        Interior cells use fixed Gauss-Legendre nodes on the smooth interior;
        the two endpoint cells use the algebraic-weight rule so the z^(u-1)
        and (1-z)^(v-1) singularities are integrated exactly.
        """
        grid = np.sin(np.linspace(0.0, np.pi / 2.0, n_cells + 1)) ** 2
        grid[0], grid[-1] = 0.0, 1.0
        nodes, weights = np.polynomial.legendre.leggauss(12)
        lo = grid[1:-2]
        hi = grid[2:-1]
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        zs = mid[:, None] + half[:, None] * nodes[None, :]
        cell_vals = (np.exp(self.log_density(zs)) @ weights) * half

        first = _quad(
            lambda z: (1.0 - z) ** (self.v - 1.0) * (self.wp.a - z) ** self.s,
            0.0, grid[1], weight="alg", wvar=(self.u - 1.0, 0.0),
            tol=np.inf, what="cdf first cell",
        )
        last = _quad(
            lambda z: z ** (self.u - 1.0) * (self.wp.a - z) ** self.s,
            grid[-2], 1.0, weight="alg", wvar=(0.0, self.v - 1.0),
            tol=np.inf, what="cdf last cell",
        )
        increments = np.concatenate([[0.0, first], cell_vals, [last]])
        cdf = np.cumsum(increments)
        total = cdf[-1]
        if not np.isfinite(total) or total <= 0:
            raise QuadratureFailure("CDF normalization failed")
        if abs(total - self.c_theta) > 1e-6 * self.c_theta:
            raise QuadratureFailure(
                f"CDF table mass {total} inconsistent with c_theta={self.c_theta}"
            )
        cdf /= total
        cdf[-1] = 1.0
        return CdfTable(z=grid, cdf=np.maximum.accumulate(cdf))


def speed_density(sm: StationaryModel, z) -> np.ndarray:
    """Unnormalized speed density at interior points z in (0, 1)."""
    z = np.asarray(z, dtype=float)
    if np.any((z <= 0) | (z >= 1)):
        raise DomainError("speed density is evaluated strictly inside (0, 1)")
    return sm.density(z)


def stationary_moment(sm: StationaryModel, f) -> float:
    """Integral of f against the normalized measure Psi_theta.

    f is a scalar callable on (0, 1), integrable against the speed density.
    """
    num = _quad(
        lambda z: f(z) * (sm.wp.a - z) ** sm.s,
        0.0, 1.0, weight="alg", wvar=(sm.u - 1.0, sm.v - 1.0),
        tol=1e-10 * max(1.0, sm.c_theta), what="stationary moment",
    )
    return num / sm.c_theta


def gamma_identity_residual(wp: WfParams, theta: float) -> float:
    """Residual of the Beta-integral identity that vanishes for every admissible theta.

    Computes integral_0^1 z^(u-1) (1-z)^(v-1) (a-z) (1/(a-z) - theta) dz,
    which telescopes through Gamma recursions to exactly zero. Returned value
    is the quadrature estimate of that zero.
    """
    u, v = _exponents(wp, theta)
    return _quad(
        lambda z: 1.0 - theta * (wp.a - z),
        0.0, 1.0, weight="alg", wvar=(u - 1.0, v - 1.0),
        tol=1e-10, what="gamma identity",
    )


def gamma_identity_closed_form(wp: WfParams, theta: float) -> float:
    """The same residual through log-Gamma closed forms (second evaluation path)."""
    u, v = _exponents(wp, theta)
    log_b = sp_special.betaln(u, v)
    term1 = (1.0 - wp.a * theta) * np.exp(log_b)
    term2 = theta * np.exp(sp_special.betaln(u + 1.0, v))
    return float(term1 + term2)


@dataclass(frozen=True)
class FixationVerdict:
    """Long-run law of the mean-field frequency, per the trichotomy."""

    kind: str  # all_zero | all_one | converges_to_0 | converges_to_1 | stationary_density
    theta: float | None = None
    stationary: StationaryModel | None = None


def fixation_classify(wp: WfParams, mean_z0: float, theta: float | None = None) -> FixationVerdict:
    """Classify the long-run behavior from alpha vs beta and the initial mean.

    mean_z0 = 1 (resp. 0) is absorbing for the whole system. Otherwise the
    trait dies out when alpha > beta, fixes when alpha < beta, and when
    alpha = beta the law converges to Psi_theta with theta = E[1/(a - Z_0)]
    (which must be supplied for that branch). This reports the statement of
    the limit theorem; simulation-based confirmation lives in the acceptance
    experiments.
    """
    if not 0.0 <= mean_z0 <= 1.0:
        raise DomainError(f"mean_z0={mean_z0} outside [0, 1]")
    if mean_z0 == 1.0:
        return FixationVerdict(kind="all_one")
    if mean_z0 == 0.0:
        return FixationVerdict(kind="all_zero")
    if wp.alpha > wp.beta:
        return FixationVerdict(kind="converges_to_0")
    if wp.alpha < wp.beta:
        return FixationVerdict(kind="converges_to_1")
    if theta is None:
        raise ValueError("the stationary branch (alpha == beta) requires theta = E[1/(a - Z0)]")
    return FixationVerdict(kind="stationary_density", theta=theta, stationary=StationaryModel(wp, theta))


# --- invasion of a rare defense allele ----------------------------------------


def scale_density(wp: WfParams, z) -> np.ndarray:
    """s(z) = (1-z)^(-2*kappa/(a*beta)) * ((a-z)/a)^(-2*alpha/beta) on [0, 1)."""
    z = np.asarray(z, dtype=float)
    if np.any(z >= 1.0) or np.any(z < 0.0):
        raise DomainError("scale density is defined on [0, 1)")
    e1 = -2.0 * wp.kappa / (wp.a * wp.beta)
    e2 = -2.0 * wp.alpha / wp.beta
    return np.exp(e1 * np.log1p(-z) + e2 * (np.log(wp.a - z) - np.log(wp.a)))


def scale_function(wp: WfParams, z: float) -> tuple[float, float]:
    """Scale density s(z) and its integral S(z) = integral_0^z s for z in [0, 1).

    S never exceeds z*s(z) because s is increasing; that bound is asserted.
    """
    if not 0.0 <= z < 1.0:
        raise DomainError(f"z={z} outside [0, 1)")
    s = float(scale_density(wp, z))
    if z == 0.0:
        return s, 0.0
    big_s = _quad(lambda x: float(scale_density(wp, x)), 0.0, z, tol=1e-10 * max(1.0, s), what="scale integral")
    if big_s > z * s * (1.0 + 1e-9):
        raise QuadratureFailure(f"S(z)={big_s} exceeds z*s(z)={z * s}")
    return s, big_s


def colonization_rate(wp: WfParams, x) -> np.ndarray:
    """Rate at which a deme with mass x seeds new colonies.

    kappa * a * min(x, 1)/(a - min(x, 1)) + max(x - 1, 0) for x >= 0.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("colonization rate needs x >= 0")
    xm = np.minimum(x, 1.0)
    return wp.kappa * wp.a * xm / (wp.a - xm) + np.maximum(x - 1.0, 0.0)


@dataclass(frozen=True)
class InvasionResult:
    integral: float
    dies_out: bool
    kappa: float
    alpha: float
    beta: float
    a: float

    def to_json_dict(self) -> dict:
        return {
            "integral": self.integral,
            "dies_out": self.dies_out,
            "alpha": self.alpha,
            "beta": self.beta,
            "kappa": self.kappa,
            "a": self.a,
        }


def invasion_criterion(wp: WfParams) -> InvasionResult:
    """Expected colonization mass of a single invading excursion, and its verdict.

    integral = (2*kappa/(a*beta)) * int_0^1 (1-y)^(2*kappa/(a*beta) - 1)
               * ((a-y)/a)^(2*alpha/beta - 2) dy.

    The invading allele's excursion tree dies out iff integral <= 1, which
    happens iff alpha >= beta (the integrand collapses to a Beta density when
    alpha = beta). A tolerance of 1e-10 absorbs quadrature roundoff at the
    critical point.
    """
    q = 2.0 * wp.kappa / (wp.a * wp.beta)
    expo = 2.0 * wp.alpha / wp.beta - 2.0
    integral = q * _quad(
        lambda y: ((wp.a - y) / wp.a) ** expo,
        0.0, 1.0, weight="alg", wvar=(0.0, q - 1.0),
        tol=1e-10, what="invasion criterion",
    )
    return InvasionResult(
        integral=integral,
        dies_out=bool(integral <= 1.0 + 1e-10),
        kappa=wp.kappa,
        alpha=wp.alpha,
        beta=wp.beta,
        a=wp.a,
    )


def invasion_integral_closed_form(wp: WfParams) -> float:
    """Hypergeometric closed form of the invasion integral (second path)."""
    q = 2.0 * wp.kappa / (wp.a * wp.beta)
    p = 2.0 * wp.alpha / wp.beta - 2.0
    pref = ((wp.a - 1.0) / wp.a) ** p
    return float(pref * sp_special.hyp2f1(-p, q, q + 1.0, -1.0 / (wp.a - 1.0)))


def c_theta_closed_form(sm: StationaryModel) -> float:
    """Hypergeometric closed form of the normalizer (second path)."""
    wp = sm.wp
    val = sp_special.hyp2f1(-sm.s, sm.u, sm.u + sm.v, 1.0 / wp.a)
    return float(wp.a ** sm.s * np.exp(sp_special.betaln(sm.u, sm.v)) * val)


@dataclass(frozen=True)
class InvasionModel:
    """Scale function, colonization rate, and survival criterion in one place."""

    wp: WfParams

    def s(self, z: float) -> float:
        return scale_function(self.wp, z)[0]

    def S(self, z: float) -> float:
        return scale_function(self.wp, z)[1]

    def rate(self, x) -> np.ndarray:
        return colonization_rate(self.wp, x)

    def criterion(self) -> InvasionResult:
        return invasion_criterion(self.wp)


def sample_stationary(sm: StationaryModel, n: int, seed: int) -> np.ndarray:
    """Draw n samples from Psi_theta by inverse-CDF on the tabulated grid."""
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    if n == 0:
        return np.empty(0)
    rng = np.random.default_rng(seed)
    return sm.table.inverse(rng.uniform(0.0, 1.0, size=n))

"""Replication probability under the distributional model.

A replication succeeds when it reaches significance at the same level in
the same direction as the original. The kernel below is the probability
of that event given the original's t, conditional on the variance ratio
b; on top of it sit the generic bound, the F-mixture double integral, the
closed form, the most-favorable-b diagnostic, and the Killeen baseline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special as _sp

from .distributions import (
    QuadratureSpec,
    f_density,
    find_positive_root,
    integrate,
    t_cdf,
    t_quantile,
)
from .errors import DegenerateVarianceError, DomainError
from .significance import TestStatistic

__all__ = [
    "ReplicationQuery",
    "ReplicationForecast",
    "BmaxResult",
    "p_rep_given_b",
    "p_rep_curve",
    "p_rep_bound",
    "p_rep_integral",
    "p_rep_closed",
    "b_max",
    "killeen_p_rep",
]


@dataclass(frozen=True)
class ReplicationQuery:
    """Original result plus the anticipated replication design.

    ``n_r`` is the replication sample size N_r (or its continuous analog
    for slope families), ``df_r`` its degrees of freedom, ``alpha`` the
    significance level defining success, and ``c`` the anticipated ratio
    of replication to original within-experiment variance.
    """

    stat: TestStatistic
    n_r: float
    df_r: float
    alpha: float
    c: float = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.n_r) and self.n_r >= 2):
            raise DomainError(f"n_r must be finite and >= 2, got {self.n_r!r}")
        if not (math.isfinite(self.df_r) and self.df_r > 0):
            raise DomainError(f"df_r must be finite and > 0, got {self.df_r!r}")
        if not (0.0 < self.alpha < 1.0):
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if not (math.isfinite(self.c) and self.c > 0):
            raise DomainError(f"c must be finite and > 0, got {self.c!r}")


@dataclass(frozen=True)
class ReplicationForecast:
    """Forecast variants for one query; absent variants are None."""

    p_rep_closed: float | None
    p_rep_integral: float | None
    p_rep_bound: float | None
    b_used: float
    alpha: float

    def __post_init__(self) -> None:
        for name in ("p_rep_closed", "p_rep_integral", "p_rep_bound"):
            v = getattr(self, name)
            if v is not None and not (0.0 <= v <= 1.0):
                raise DomainError(f"{name} must lie in [0, 1], got {v!r}")
        if not (math.isfinite(self.b_used) and self.b_used >= 0):
            raise DomainError(f"b_used must be >= 0, got {self.b_used!r}")


@dataclass(frozen=True)
class BmaxResult:
    """Most-favorable variance ratio for replication of a given result."""

    tau: float
    z_max: float
    b_max: float

    def __post_init__(self) -> None:
        if not (self.tau > 0 and self.z_max > 0 and self.b_max > 0):
            raise DomainError("tau, z_max, b_max must all be > 0")
        if self.z_max > self.tau * (1.0 + 1e-12):
            raise DomainError(
                f"z_max={self.z_max!r} exceeds tau={self.tau!r}"
            )


@lru_cache(maxsize=4096)
def _critical(alpha: float, df: float) -> float:
    return t_quantile(1.0 - alpha / 2.0, df)


def _kernel_argument(t_abs, b, n, n_r, t_crit, c):
    """General-c argument of the replication kernel; elementwise-safe.

    (|t|·b·√(N·N_r)/(1+bN) − t_crit·√(c(1+bN_r))) / √(c + bN_r/(1+bN));
    at c=1 this is algebraically the single-ratio form
    (|t|·b·√(N·N_r) − t_crit(1+bN)√(1+bN_r)) / √((1+bN+bN_r)(1+bN)).
    """
    one_plus_bn = 1.0 + b * n
    num = t_abs * b * np.sqrt(n * n_r) / one_plus_bn - t_crit * np.sqrt(
        c * (1.0 + b * n_r)
    )
    den = np.sqrt(c + b * n_r / one_plus_bn)
    return num / den


def p_rep_given_b(q: ReplicationQuery, b: float) -> float:
    """Replication probability at a known variance ratio b > 0."""
    b = float(b)
    if not (math.isfinite(b) and b > 0.0):
        raise DomainError(
            f"b must be finite and > 0, got {b!r}; use the bound form or "
            "b_max guidance when b is unknown"
        )
    t_crit = _critical(q.alpha, q.df_r)
    arg = _kernel_argument(abs(q.stat.t), b, q.stat.n, q.n_r, t_crit, q.c)
    return min(1.0, max(0.0, t_cdf(float(arg), q.df_r)))


def p_rep_curve(q: ReplicationQuery, b_values) -> np.ndarray:
    """Vectorized p_rep_given_b over an array of b > 0 (for scans/plots)."""
    bs = np.asarray(b_values, dtype=float)
    if bs.size and not np.all(bs > 0.0):
        raise DomainError("all b values must be > 0")
    t_crit = _critical(q.alpha, q.df_r)
    arg = _kernel_argument(abs(q.stat.t), bs, q.stat.n, q.n_r, t_crit, q.c)
    return np.clip(_sp.stdtr(q.df_r, arg), 0.0, 1.0)


def p_rep_bound(q: ReplicationQuery, bound: float) -> float:
    """Generic replication forecast: the kernel evaluated at the cap b = B.

    For b in [b_max, B] the true p_rep_given_b is at least this value
    (the kernel is unimodal in b with its peak at b_max).
    """
    bound = float(bound)
    if not (math.isfinite(bound) and bound > 0.0):
        raise DomainError(f"bound must be finite and > 0, got {bound!r}")
    return p_rep_given_b(q, bound)


def p_rep_integral(
    q: ReplicationQuery,
    b_hat: float,
    nu0: float,
    spec: QuadratureSpec | None = None,
    literal_printed: bool = False,
) -> float:
    """Replication probability integrated over uncertainty in b and c.

    The true ratio b is modeled as b_hat times an F(nu, nu0) factor and
    the variance ratio c as the query's c times an F(nu, df_r) factor;
    both are integrated against the general-c kernel:

        integral integral K(b*b_hat, c_q*c) f(b; nu, nu0) f(c; nu, nu_r) db dc.

    ``literal_printed=True`` instead evaluates a transcription that keeps
    |t|√(N·N_r) unscaled by b*b_hat and leaves c out of the kernel (its
    density then integrates to one), kept only for comparison against the
    consistently substituted default.
    """
    b_hat = float(b_hat)
    if not (math.isfinite(b_hat) and b_hat > 0.0):
        raise DegenerateVarianceError(
            f"b_hat must be > 0 for the mixture form, got {b_hat!r}"
        )
    nu0 = float(nu0)
    if not (math.isfinite(nu0) and nu0 >= 1.0):
        raise DomainError(f"nu0 must be >= 1, got {nu0!r}")

    t_abs = abs(q.stat.t)
    n = q.stat.n
    nu = q.stat.df
    n_r = q.n_r
    df_r = q.df_r
    t_crit = _critical(q.alpha, df_r)

    if literal_printed:

        def integrand(b: float) -> float:
            density = f_density(b, nu, nu0)
            if density == 0.0:
                return 0.0
            bb = b * b_hat
            one_plus_bn = 1.0 + bb * n
            num = t_abs * math.sqrt(n * n_r) - t_crit * one_plus_bn * math.sqrt(
                1.0 + bb * n_r
            )
            den = math.sqrt((one_plus_bn + bb * n_r) * one_plus_bn)
            return t_cdf(num / den, df_r) * density

        value = integrate(integrand, 0.0, math.inf, spec)
        return min(1.0, max(0.0, value))

    def outer(b: float) -> float:
        density_b = f_density(b, nu, nu0)
        if density_b == 0.0:
            return 0.0
        b_eff = b * b_hat

        def inner(c: float) -> float:
            density_c = f_density(c, nu, df_r)
            if density_c == 0.0:
                return 0.0
            arg = _kernel_argument(t_abs, b_eff, n, n_r, t_crit, q.c * c)
            return t_cdf(float(arg), df_r) * density_c

        return integrate(inner, 0.0, math.inf, spec) * density_b

    value = integrate(outer, 0.0, math.inf, spec)
    return min(1.0, max(0.0, value))


def p_rep_closed(q: ReplicationQuery, b_hat: float, nu0: float) -> float:
    """Closed-form replication probability.

    T_{nu_r}( sqrt(b̂·N·N_r/(N+N_r)) · [ |t|/sqrt(b̂N)
              − T⁻¹_{nu_r}(1−α/2)·sqrt(1/(b̂N) + nu0/(nu0−2)) ] )

    Requires nu0 > 2 (the nu0/(nu0−2) term is the mean of the inverse
    chi-square factor absorbing the uncertainty in b̂).
    """
    b_hat = float(b_hat)
    nu0 = float(nu0)
    if not (math.isfinite(nu0) and nu0 > 2.0):
        raise DomainError(
            f"nu0 must be > 2 for the closed form, got {nu0!r}"
        )
    if not (math.isfinite(b_hat) and b_hat > 0.0):
        raise DegenerateVarianceError(
            f"b_hat must be > 0 for the closed form, got {b_hat!r}"
        )
    n = q.stat.n
    n_r = q.n_r
    t_crit = _critical(q.alpha, q.df_r)
    bn = b_hat * n
    scale = math.sqrt(bn * n_r / (n + n_r))
    arg = scale * (
        abs(q.stat.t) / math.sqrt(bn)
        - t_crit * math.sqrt(1.0 / bn + nu0 / (nu0 - 2.0))
    )
    return min(1.0, max(0.0, t_cdf(arg, q.df_r)))


def b_max(stat: TestStatistic, alpha: float) -> BmaxResult:
    """Variance ratio maximizing the replication kernel for a result.

    With tau = |t| / T⁻¹_nu(1−α/2), the stationary condition in z = bN
    reduces to the quintic

        z^5 + 3z^4 + 3z^3 + (1 − 9τ²/4)z² − 3τ²z − τ² = 0,

    which has exactly one positive root z_max by Descartes' rule, and
    z_max <= tau. Assumes N_r = N and c = 1 (the regime in which the
    stationary condition is derived).
    """
    alpha = float(alpha)
    if not (0.0 < alpha < 0.5):
        raise DomainError(f"alpha must lie in (0, 0.5), got {alpha!r}")
    if stat.t == 0.0:
        raise DomainError("b_max is undefined at t = 0")
    t_crit = t_quantile(1.0 - alpha / 2.0, stat.df)
    tau = abs(stat.t) / t_crit
    tau_sq = tau * tau
    coeffs = [1.0, 3.0, 3.0, 1.0 - 2.25 * tau_sq, -3.0 * tau_sq, -tau_sq]
    z_max = find_positive_root(coeffs, bracket_hint=tau)
    return BmaxResult(tau=tau, z_max=z_max, b_max=z_max / stat.n)


def killeen_p_rep(effect: float, n: float) -> float:
    """Killeen-style replication baseline Phi(|d|/sqrt(2) * (1 - 4/N)).

    The bracket is non-positive for N <= 4, where the value clamps to
    Phi(0) = 0.5.
    """
    effect = float(effect)
    n = float(n)
    if not math.isfinite(effect):
        raise DomainError(f"effect must be finite, got {effect!r}")
    if not (math.isfinite(n) and n > 0):
        raise DomainError(f"n must be finite and > 0, got {n!r}")
    bracket = 1.0 - 4.0 / n
    if bracket <= 0.0:
        return 0.5
    return float(_sp.ndtr(abs(effect) / math.sqrt(2.0) * bracket))

"""Weighted counting functions and the degeneration Bessel series.

The direct counting function of an eigenvalue list is

    N_w(T) = sum_{lambda <= T} m(lambda) (T - lambda)^w,  0^0 = 1,

so an eigenvalue exactly at T counts. Its degenerating-surface analogue
is the closed Bessel series

    G_w(T) = Gamma(w+1)/(16 pi)^{1/2}
             * sum_{n>=1} sum_k ell_k/sinh(n ell_k/2)
               * (sqrt(a)/(n ell_k/2))^{w+1/2} J_{w+1/2}(n ell_k sqrt(a))

with a = T - 1/4, identically zero for T <= 1/4. As the lengths pinch,
G_w(T) = c_w(T) sum_k log(1/ell_k) + O(1); c_weight is that constant and
g_residual isolates the O(1) remainder.

Series truncation is certified: past the adaptive cut the terms are
dominated by |J_nu(x)| <= min(1, 1.1 sqrt(2/(pi x))) times the sinh
decay, and successive terms shrink by at least e^{-ell/2}, closing the
tail with a geometric sum. Blocks are vectorized (the deepest pinching
depths need tens of millions of terms) in a fixed order, so results are
deterministic.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special as _sp

from .errors import DomainError, PinchtraceError, TruncationBudgetError
from .policy import DEFAULT_POLICY, TruncationPolicy
from .specfun import bessel_j_half, gamma
from .spectrum import PinchingSet, SpectralData

__all__ = [
    "counting_direct",
    "c_weight",
    "g_bessel",
    "g_sine_form",
    "g_residual",
    "sandwich_check",
    "balance_epsilon",
]

_BLOCK = 1 << 21
_XCUT_START = 12.0   # first cut at n ~ 2*12/ell, extended 1.5x until certified
_XCUT_GROWTH = 1.5


def _check_weight(w: float) -> float:
    w = float(w)
    if not w >= 0.0:
        raise DomainError(f"weight must be >= 0, got {w}")
    return w


def _check_threshold(T: float) -> float:
    T = float(T)
    if not T >= 0.0:
        raise DomainError(f"threshold must be >= 0, got {T}")
    return T


def counting_direct(sd: SpectralData, w: float, T: float) -> float:
    """N_w(T): weighted eigenvalue count below (and at) the threshold."""
    if not isinstance(sd, SpectralData):
        sd = SpectralData.of(sd)
    w = _check_weight(w)
    T = _check_threshold(T)
    total = 0.0
    for lam, mult in sd.eigenvalues:
        if lam > T:
            break  # ascending order
        total += mult * (T - lam) ** w
    return total


def c_weight(w: float, T: float) -> float:
    """Asymptotic constant Gamma(w+1)(T-1/4)^{w+1/2}/(sqrt(4 pi) Gamma(w+3/2))."""
    w = _check_weight(w)
    T = _check_threshold(T)
    if T < 0.25:
        raise DomainError(f"c_weight requires T >= 1/4, got {T}")
    return gamma(w + 1.0) * (T - 0.25) ** (w + 0.5) / (
        math.sqrt(4.0 * math.pi) * gamma(w + 1.5)
    )


def _log_sinh(x):
    return x - math.log(2.0) + np.log1p(-np.exp(-2.0 * x))


def _series_sum(ell: float, term_fn, env_fn, policy: TruncationPolicy) -> float:
    """Certified sum over n >= 1 of term_fn, tail-bounded by env_fn.

    term_fn(n_array) -> term values; env_fn(n) -> scalar bound with
    |term(m)| <= env(n) * e^{-(m-n) ell/2} for m >= n. Extends the cut
    by half until the geometric tail bound lands under tolerance.
    """
    gap = -math.expm1(-0.5 * ell)  # 1 - e^{-ell/2}
    ncut = max(64, int(math.ceil(2.0 * _XCUT_START / ell)))
    total = 0.0
    n0 = 1
    while True:
        if ncut > policy.max_terms:
            raise TruncationBudgetError(
                f"series cut {ncut} exceeds max_terms for length {ell}"
            )
        while n0 <= ncut:
            n1 = min(ncut, n0 + _BLOCK - 1)
            n = np.arange(n0, n1 + 1, dtype=np.float64)
            total += float(np.sum(term_fn(n)))
            n0 = n1 + 1
        if env_fn(ncut + 1) / gap <= policy.tol(total):
            return total
        ncut = int(math.ceil(ncut * _XCUT_GROWTH))


def g_bessel(ps, w: float, T: float, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """The degeneration counting series G_w(T); zero for T <= 1/4."""
    ps = PinchingSet.of(ps)
    w = _check_weight(w)
    T = _check_threshold(T)
    a = T - 0.25
    if a <= 0.0:
        return 0.0
    sa = math.sqrt(a)
    nu = w + 0.5
    spherical = int(w) if float(w).is_integer() else None
    pref = gamma(w + 1.0) / math.sqrt(16.0 * math.pi)

    def one_length(ell: float) -> float:
        def term(n):
            nl2 = 0.5 * ell * n
            x = 2.0 * nl2 * sa
            coef = ell * np.exp(-_log_sinh(nl2))
            power = np.exp(nu * (math.log(sa) - np.log(nl2)))
            if spherical is not None:
                j = bessel_j_half(spherical, x)
            else:
                j = _sp.jv(nu, x)
            return coef * power * j

        def env(n):
            nl2 = 0.5 * ell * n
            x = 2.0 * nl2 * sa
            jbound = min(1.0, 1.1 * math.sqrt(2.0 / (math.pi * x)))
            return (
                ell * math.exp(-float(_log_sinh(np.float64(nl2))))
                * (sa / nl2) ** nu * jbound
            )

        return _series_sum(ell, term, env, policy)

    return pref * sum(one_length(ell) for ell in ps.ells)


def g_sine_form(ps, T: float, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """Weight-zero collapse of g_bessel in closed sine form.

    With J_{1/2}(x) = sqrt(2/(pi x)) sin x the w = 0 series reduces to

        (1/2 pi) sum_{n>=1} sum_k sin(n ell_k sqrt(a)) / (n sinh(n ell_k/2)).
    """
    ps = PinchingSet.of(ps)
    T = _check_threshold(T)
    if T < 0.25:
        raise DomainError(f"g_sine_form requires T >= 1/4, got {T}")
    a = T - 0.25
    if a == 0.0:
        return 0.0
    sa = math.sqrt(a)

    def one_length(ell: float) -> float:
        def term(n):
            return np.sin(n * ell * sa) / n * np.exp(-_log_sinh(0.5 * ell * n))

        def env(n):
            return math.exp(-float(_log_sinh(np.float64(0.5 * ell * n)))) / n

        return _series_sum(ell, term, env, policy)

    return sum(one_length(ell) for ell in ps.ells) / (2.0 * math.pi)


def g_residual(ps, w: float, T: float, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """O(1) remainder g_bessel(ps, w, T) - c_weight(w, T) * sum_k log(1/ell_k).

    Requires every pinching length below 1 (the log-sum normalizer must
    be positive) and T >= 1/4.
    """
    ps = PinchingSet.of(ps)
    if any(ell >= 1.0 for ell in ps.ells):
        raise DomainError("g_residual requires all pinching lengths < 1")
    w = _check_weight(w)
    if T < 0.25:
        raise DomainError(f"g_residual requires T >= 1/4, got {T}")
    return g_bessel(ps, w, T, policy) - c_weight(w, T) * ps.log_sum


def sandwich_check(
    sd: SpectralData, w: float, T: float, eps: float
) -> tuple[float, float, float]:
    """Difference-quotient sandwich of the counting recursion.

    Returns (N_w(T), [N_{w+1}(T+eps) - N_{w+1}(T)] / [eps (w+1)],
    N_w(T+eps)) and verifies the non-decreasing ordering; the middle
    term is an average of N_w over [T, T+eps], so monotonicity pins it
    between the endpoints.
    """
    if not eps > 0.0:
        raise DomainError(f"sandwich_check requires eps > 0, got {eps}")
    w = _check_weight(w)
    lo = counting_direct(sd, w, T)
    hi = counting_direct(sd, w, T + eps)
    mid = (
        counting_direct(sd, w + 1.0, T + eps) - counting_direct(sd, w + 1.0, T)
    ) / (eps * (w + 1.0))
    slack = 1e-12 * max(1.0, abs(lo), abs(mid), abs(hi))
    if not (lo <= mid + slack and mid <= hi + slack):
        raise PinchtraceError(
            f"sandwich ordering violated: {lo} <= {mid} <= {hi} fails"
        )
    # rounding in the difference quotient can land mid an ulp outside the
    # bracket; the slack check above vouched for it, so pin the ordering
    mid = min(max(mid, lo), hi)
    return (lo, mid, hi)


def balance_epsilon(f_ell: float, log_sum: float) -> float:
    """Minimizer of max(eps * log_sum, f_ell / eps): eps* = sqrt(f_ell/log_sum).

    Both error terms equal sqrt(f_ell * log_sum) at the balance point.
    """
    if not f_ell > 0.0:
        raise DomainError(f"f_ell must be > 0, got {f_ell}")
    if not log_sum > 0.0:
        raise DomainError(f"log_sum must be > 0, got {log_sum}")
    return math.sqrt(f_ell / log_sum)

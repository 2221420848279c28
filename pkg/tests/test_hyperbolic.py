"""Heat kernel, origin value, displacement and the cylinder trace."""

import math

import mpmath as mp
import pytest
from scipy import integrate

from pinchtrace import (
    DomainError,
    NonConvergenceError,
    TruncationPolicy,
    cylinder_displacement,
    cylinder_trace,
    heat_kernel,
    heat_kernel_origin,
)


def _mp_kernel(t: float, rho: float) -> float:
    """Slow oracle: 40-digit tanh-sinh quadrature of the defining integral.

    Uses the product identity cosh u - cosh rho =
    2 sinh((u+rho)/2) sinh((u-rho)/2) so the denominator stays exact
    near the singular endpoint.
    """
    with mp.workdps(40):
        t_, r_ = mp.mpf(t), mp.mpf(rho)

        def f(v):
            u = r_ + v * v
            den = mp.sqrt(2 * mp.sinh(r_ + v * v / 2) * mp.sinh(v * v / 2))
            return 2 * v * u * mp.e ** (-u * u / (4 * t_)) / den

        pref = mp.sqrt(2) * mp.e ** (-t_ / 4) / (4 * mp.pi * t_) ** mp.mpf("1.5")
        vmax = mp.sqrt(mp.sqrt(r_ * r_ + 4 * t_ * 60) - r_)
        return float(pref * mp.quad(f, [0, vmax / 3, vmax]))


def _origin_oracle(t: float) -> float:
    # tanh(pi r) = 1 - 2/(e^{2 pi r}+1) splits K(t,0) into the flat-space
    # lead e^{-t/4}/(4 pi t) minus a rapidly convergent correction.
    lead = math.exp(-t / 4.0) / (4.0 * math.pi * t)
    corr, _ = integrate.quad(
        lambda r: math.exp(-(0.25 + r * r) * t) * r / (math.exp(2.0 * math.pi * r) + 1.0),
        0.0, 40.0, epsabs=1e-16, epsrel=1e-13, limit=200,
    )
    return lead - corr / math.pi


@pytest.mark.parametrize("t,rho", [(0.5, 1.0), (1.0, 0.5), (2.0, 3.0), (0.1, 0.2), (5.0, 1.0)])
def test_kernel_matches_high_precision_oracle(t, rho):
    assert heat_kernel(t, rho) == pytest.approx(_mp_kernel(t, rho), rel=1e-10)


@pytest.mark.parametrize("t", [0.1, 1.0, 10.0])
def test_origin_matches_decomposition_oracle(t):
    assert heat_kernel_origin(t) == pytest.approx(_origin_oracle(t), rel=1e-10)


@pytest.mark.parametrize("t", [0.1, 1.0, 10.0])
def test_kernel_at_zero_distance_equals_origin_value(t):
    assert heat_kernel(t, 0.0) == pytest.approx(heat_kernel_origin(t), rel=1e-4)


def test_gaussian_decay_bound():
    # K(t, rho) <= C e^{-rho^2/4t}; at t=1, rho=10 the plain e^{-25}
    # already dominates by nearly three orders.
    assert heat_kernel(1.0, 10.0) <= math.exp(-25.0)


def test_kernel_positive_and_decreasing_in_distance():
    t = 0.7
    prev = heat_kernel(t, 0.05)
    assert prev > 0.0
    for rho in (0.3, 0.8, 1.5, 3.0, 6.0):
        cur = heat_kernel(t, rho)
        assert 0.0 < cur < prev
        prev = cur


def test_origin_small_time_flat_limit():
    t = 0.01
    flat = math.exp(-t / 4.0) / (4.0 * math.pi * t)
    assert heat_kernel_origin(t) == pytest.approx(flat, rel=0.02)


def test_origin_large_time_bound():
    t = 10.0
    assert heat_kernel_origin(t) <= 1.2 * math.exp(-t / 4.0) / (4.0 * math.pi * t)


def test_kernel_domain_errors():
    with pytest.raises(DomainError):
        heat_kernel(0.0, 1.0)
    with pytest.raises(DomainError):
        heat_kernel(-1.0, 1.0)
    with pytest.raises(DomainError):
        heat_kernel(1.0, -0.1)
    with pytest.raises(DomainError):
        heat_kernel_origin(0.0)


def test_displacement_at_core():
    assert cylinder_displacement(1.0, 3, 0.0) == 3.0
    assert cylinder_displacement(0.4, 5, 0.0) == pytest.approx(2.0, rel=1e-15)
    assert cylinder_displacement(1.0, -2, 0.0) == 2.0


def test_displacement_closed_form():
    # cosh d_1(1) at ell=1 collapses to e + 1/e - 1
    d = cylinder_displacement(1.0, 1, 1.0)
    assert math.cosh(d) == pytest.approx(math.e + 1.0 / math.e - 1.0, rel=1e-14)
    # generic point against the defining relation
    for ell, n, v in [(0.5, 2, 0.7), (1.3, 1, 2.0), (0.1, 10, 0.3)]:
        d = cylinder_displacement(ell, n, v)
        want = 1.0 + 2.0 * math.sinh(n * ell / 2.0) ** 2 * (1.0 + v * v)
        assert math.cosh(d) == pytest.approx(want, rel=1e-12)


def test_displacement_floor_and_monotonicity():
    ell, n = 0.8, 2
    base = abs(n) * ell
    prev = cylinder_displacement(ell, n, 0.0)
    assert prev == base
    for v in (0.1, 0.5, 1.0, 4.0, 20.0):
        d = cylinder_displacement(ell, n, v)
        assert d > prev
        prev = d
    # huge offsets stay finite through the log branch
    d = cylinder_displacement(2.0, 400, 1e6)
    assert math.isfinite(d) and d > 800.0


def test_displacement_domain():
    with pytest.raises(DomainError):
        cylinder_displacement(0.0, 1, 1.0)
    with pytest.raises(DomainError):
        cylinder_displacement(1.0, 0, 1.0)
    # the offset enters squared, so the map is even in v
    assert cylinder_displacement(1.0, 1, -0.5) == cylinder_displacement(1.0, 1, 0.5)


@pytest.mark.parametrize("ell", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_cylinder_positive(ell, t):
    assert cylinder_trace(ell, t) > 0.0


def test_cylinder_decreases_at_large_time():
    vals = [cylinder_trace(1.0, t) for t in (5.0, 10.0, 20.0)]
    assert vals[0] > vals[1] > vals[2] > 0.0


def test_cylinder_short_length_guard():
    with pytest.raises(DomainError):
        cylinder_trace(0.04, 1.0)
    # boundary value is accepted
    assert cylinder_trace(0.05, 1.0) > 0.0


def test_cylinder_budget_exhaustion():
    tight = TruncationPolicy(rel_tol=1e-9, abs_tol=1e-14, max_terms=1,
                             max_quad_evals=2_000_000)
    with pytest.raises(NonConvergenceError):
        cylinder_trace(0.05, 1.0, tight)


def test_cylinder_domain_errors():
    with pytest.raises(DomainError):
        cylinder_trace(1.0, 0.0)
    with pytest.raises(DomainError):
        cylinder_trace(-1.0, 1.0)

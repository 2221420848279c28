"""Degeneration sweeps and growth-exponent fits.

A sweep walks a schedule of pinching sets toward zero length, computing
the counting series, its log-sum normalizer, and the residual against
the asymptotic constant for each point. Rows are independent, may be
computed concurrently (capped by the SPECTRA_THREADS environment
variable), and are assembled in schedule order; a failed row is recorded
with its error message instead of aborting the sweep.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .counting import c_weight, g_bessel
from .errors import DomainError, PinchtraceError
from .policy import ContourSpec, DEFAULT_POLICY, TruncationPolicy
from .spectrum import PinchingSet
from .trace import degenerating_trace
from .xform import DEFAULT_INVERSION_POLICY, weighted_inverse

__all__ = ["Schedule", "SweepRow", "SweepResult", "run_sweep", "fit_growth_exponent"]


@dataclass(frozen=True)
class Schedule:
    """A walk of pinching sets with strictly decreasing sup norm.

    kind "geometric": single-length sets start * ratio^i for i < count,
    with start and ratio in (0, 1) and count >= 2. kind "explicit": any
    non-empty tuple of pinching sets, sup norms strictly decreasing.
    """

    kind: str
    start: float = 0.0
    ratio: float = 0.0
    count: int = 0
    values: tuple[PinchingSet, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.kind == "geometric":
            if not (0.0 < self.start < 1.0):
                raise DomainError(f"geometric start must be in (0,1), got {self.start}")
            if not (0.0 < self.ratio < 1.0):
                raise DomainError(f"geometric ratio must be in (0,1), got {self.ratio}")
            if not (isinstance(self.count, int) and self.count >= 2):
                raise DomainError(f"geometric count must be an integer >= 2, got {self.count}")
        elif self.kind == "explicit":
            if not self.values:
                raise DomainError("explicit schedule must be non-empty")
            pts = tuple(PinchingSet.of(v) for v in self.values)
            object.__setattr__(self, "values", pts)
            sups = [p.sup for p in pts]
            if any(b >= a for a, b in zip(sups, sups[1:])):
                raise DomainError("explicit schedule sup norms must be strictly decreasing")
        else:
            raise DomainError(f"schedule kind must be geometric or explicit, got {self.kind!r}")

    @classmethod
    def geometric(cls, start: float, ratio: float, count: int) -> "Schedule":
        return cls(kind="geometric", start=start, ratio=ratio, count=count)

    @classmethod
    def explicit(cls, values) -> "Schedule":
        return cls(kind="explicit", values=tuple(values))

    def points(self) -> tuple[PinchingSet, ...]:
        if self.kind == "geometric":
            return tuple(
                PinchingSet((self.start * self.ratio**i,)) for i in range(self.count)
            )
        return self.values


@dataclass(frozen=True)
class SweepRow:
    ell_sup: float
    log_sum: float
    g_value: float
    residual: float
    normalized: float
    error: str | None = None


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    w: float
    T: float
    use_bromwich: bool


def thread_cap(n_jobs: int) -> int:
    """Worker count for n_jobs tasks, capped by SPECTRA_THREADS."""
    cap = min(n_jobs, os.cpu_count() or 1, 8)
    env = os.environ.get("SPECTRA_THREADS")
    if env is not None:
        try:
            cap = min(cap, max(1, int(env)))
        except ValueError:
            raise DomainError(f"SPECTRA_THREADS must be an integer, got {env!r}")
    return max(1, cap)


def run_sweep(
    sch: Schedule,
    w: float,
    T: float,
    policy: TruncationPolicy | None = None,
    contour: ContourSpec | None = None,
    use_bromwich: bool = False,
) -> SweepResult:
    """Evaluate the counting series along a schedule.

    g_value comes from the closed Bessel series, or (use_bromwich) from
    the contour inversion of the degenerating trace, the dual route used
    for cross-validation. residual subtracts c_weight(w, T) * log_sum
    (the constant is zero below the T = 1/4 breakpoint); normalized is
    g_value / log_sum, the quantity that approaches c_weight(w, T).
    """
    series_policy = policy if policy is not None else DEFAULT_POLICY
    inv_policy = policy if policy is not None else DEFAULT_INVERSION_POLICY
    w = float(w)
    T = float(T)
    cw = c_weight(w, T) if T >= 0.25 else 0.0

    def one(ps: PinchingSet) -> SweepRow:
        log_sum = ps.log_sum
        try:
            if use_bromwich:
                g = weighted_inverse(
                    lambda z: degenerating_trace(ps, z, series_policy),
                    w, T, contour=contour, policy=inv_policy,
                )
            else:
                g = g_bessel(ps, w, T, series_policy)
        except PinchtraceError as exc:
            nan = float("nan")
            return SweepRow(ps.sup, log_sum, nan, nan, nan, error=str(exc))
        residual = g - cw * log_sum
        normalized = g / log_sum if log_sum != 0.0 else float("nan")
        return SweepRow(ps.sup, log_sum, g, residual, normalized)

    points = sch.points()
    workers = thread_cap(len(points))
    if workers == 1:
        rows = tuple(one(ps) for ps in points)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = tuple(pool.map(one, points))
    return SweepResult(rows=rows, w=w, T=T, use_bromwich=use_bromwich)


def fit_growth_exponent(samples) -> tuple[float, float]:
    """Least-squares fit of magnitude ~ C (1+s)^beta; returns (C, beta).

    Needs at least 8 samples with positive s and magnitude, and the s
    values must span at least one decade; anything narrower (all-equal
    included) is a degenerate design.
    """
    pts = [(float(s), float(m)) for s, m in samples]
    if len(pts) < 8:
        raise DomainError(f"fit needs >= 8 samples, got {len(pts)}")
    if any(s <= 0.0 or m <= 0.0 for s, m in pts):
        raise DomainError("fit requires s > 0 and magnitude > 0 throughout")
    s = np.array([p[0] for p in pts])
    m = np.array([p[1] for p in pts])
    if float(np.max(s)) < 10.0 * float(np.min(s)):
        raise DomainError("degenerate design: s values must span at least one decade")
    beta, logc = np.polyfit(np.log1p(s), np.log(m), 1)
    return (float(math.exp(logc)), float(beta))

"""Parameter schedules for the limiting regimes, and scans along them.

Four schedule kinds are supported, each a geometric grid in ``a2``:

- ``A1``: single eigenvalue (m = 1) with ``a1/a2`` held at ``rho``;
- ``A2``: growing m with ``a1*m/a2`` held at ``sigma`` (``a1 ~ a2^0.55``);
- ``A3``: ``a1`` and ``m`` both growing like ``sqrt(a2)`` at rates x and y;
- ``vanishing``: fixed (m, a1) so that ``a1*m/a2`` tends to zero.

A scan walks a schedule and runs a distance estimator or CLT harness at
every point with deterministic per-point substreams.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .distances import CltReport, Estimate, clt_harness, kl_estimate, tv_estimate
from .ensembles import EnsembleParams
from .numerics import ConsistencyError, EstimatorError, ParameterError, RngStream

__all__ = [
    "RegimePoint",
    "RegimeSchedule",
    "ScanResult",
    "make_schedule",
    "scan",
    "a1_limit_tv_reference",
]

SCHEDULE_KINDS = ("A1", "A2", "A3", "vanishing")

#: Internal growth exponent for A2 schedules: a1 ~ a2**0.55.  Any exponent
#: strictly between 0.5 and 1 realizes the regime; mid-range keeps m at
#: desk scale.
A2_EXPONENT = 0.55

#: Relative slack allowed between a point's proxy and its target rate.
PROXY_TOL = 0.05


@dataclass(frozen=True)
class RegimePoint:
    """One parameter point of a schedule, with its regime proxies."""

    params: EnsembleParams

    @property
    def sigma_proxy(self) -> float:
        return self.params.a1 * self.params.m / self.params.a2

    @property
    def x_proxy(self) -> float:
        return self.params.a1 / math.sqrt(self.params.a2)

    @property
    def y_proxy(self) -> float:
        return self.params.m / math.sqrt(self.params.a2)

    @property
    def gamma_proxy(self) -> float:
        return self.params.beta * self.params.m / (2.0 * self.params.a1)


@dataclass(frozen=True)
class RegimeSchedule:
    """An ordered sequence of regime points with strictly increasing a2."""

    kind: str
    points: tuple[RegimePoint, ...]
    beta: float
    rho: float | None = None
    sigma: float | None = None
    x: float | None = None
    y: float | None = None


@dataclass(frozen=True)
class ScanResult:
    """Outcome at one schedule point: an estimate, a CLT report, or an error."""

    point: RegimePoint
    estimate: Estimate | None = None
    report: CltReport | None = None
    error: str | None = None


def _normalize_kind(kind: str) -> str:
    k = str(kind).strip()
    for known in SCHEDULE_KINDS:
        if k.lower() == known.lower():
            return known
    raise ParameterError(f"unknown schedule kind {kind!r}; expected one of {SCHEDULE_KINDS}")


def _require_knob(value, name: str, kind: str) -> float:
    if value is None:
        raise ParameterError(f"{kind} schedule requires {name}")
    return float(value)


def _check_proxy(point_index: int, a2: float, name: str, proxy: float, target: float) -> None:
    if abs(proxy - target) > PROXY_TOL * abs(target):
        raise ParameterError(
            f"schedule point {point_index} (a2={a2:g}): {name} proxy {proxy:g} "
            f"deviates more than {PROXY_TOL:.0%} from {target:g}"
        )


def make_schedule(
    kind: str,
    steps: int,
    a2_range: tuple[float, float],
    beta: float,
    *,
    rho: float | None = None,
    sigma: float | None = None,
    x: float | None = None,
    y: float | None = None,
    m: int | None = None,
    a1: float | None = None,
) -> RegimeSchedule:
    """Build a schedule of ``steps`` points on a geometric ``a2`` grid.

    Regime knobs: ``rho`` (A1, in (0,1)), ``sigma`` (A2, positive), ``x``/``y``
    (A3, positive), and fixed ``m``/``a1`` (vanishing).  Every generated point
    is validated; a point that violates its regime's constraints aborts
    construction with an error naming the point.
    """
    kind = _normalize_kind(kind)
    if steps < 3:
        raise ParameterError("steps must be at least 3")
    low, high = float(a2_range[0]), float(a2_range[1])
    if not low > 1e3:
        raise ParameterError("a2 range low end must exceed 1000")
    if not high > low:
        raise ParameterError("a2 range must be increasing")
    if beta <= 0.0:
        raise ParameterError("beta must be positive")
    if kind == "A1":
        rho = _require_knob(rho, "rho", kind)
        if not 0.0 < rho < 1.0:
            raise ParameterError("rho must lie in (0, 1)")
    elif kind == "A2":
        sigma = _require_knob(sigma, "sigma", kind)
        if sigma <= 0.0:
            raise ParameterError("sigma must be positive")
    elif kind == "A3":
        x = _require_knob(x, "x", kind)
        y = _require_knob(y, "y", kind)
        if x <= 0.0 or y <= 0.0:
            raise ParameterError("x and y must be positive")
    else:
        if m is None or a1 is None:
            raise ParameterError("vanishing schedule requires fixed m and a1")
    grid = np.geomspace(low, high, steps)
    points = []
    for index, a2 in enumerate(map(float, grid)):
        if kind == "A1":
            m_i, a1_i = 1, float(round(rho * a2))
        elif kind == "A2":
            a1_i = float(round(a2**A2_EXPONENT))
            m_i = int(round(sigma * a2 / a1_i))
        elif kind == "A3":
            root = math.sqrt(a2)
            a1_i, m_i = float(round(x * root)), int(round(y * root))
        else:
            m_i, a1_i = int(m), float(a1)
        if m_i < 1 or a1_i < 1:
            raise ParameterError(f"schedule point {index} (a2={a2:g}): degenerate size m={m_i}, a1={a1_i}")
        try:
            params = EnsembleParams(beta=beta, m=m_i, a1=a1_i, a2=a2)
        except ParameterError as exc:
            raise ParameterError(f"schedule point {index} (a2={a2:g}): {exc}") from exc
        point = RegimePoint(params=params)
        if kind == "A1":
            _check_proxy(index, a2, "a1/a2", a1_i / a2, rho)
        elif kind == "A2":
            _check_proxy(index, a2, "sigma", point.sigma_proxy, sigma)
        elif kind == "A3":
            _check_proxy(index, a2, "x", point.x_proxy, x)
            _check_proxy(index, a2, "y", point.y_proxy, y)
        points.append(point)
    return RegimeSchedule(
        kind=kind, points=tuple(points), beta=float(beta), rho=rho, sigma=sigma, x=x, y=y
    )


def scan(
    schedule: RegimeSchedule,
    metric: str,
    n_samples: int,
    rng: RngStream,
    shards: int = 1,
) -> list[ScanResult]:
    """Run a distance estimator or CLT harness at every schedule point.

    Point ``i`` uses the substream family rooted at stream index
    ``rng.stream_index + i``, so scans are reproducible and points are
    independent.  Estimator failures are recorded per point without aborting
    the scan; configuration errors (bad metric, CLT on a non-CLT schedule)
    abort immediately.
    """
    if not isinstance(rng, RngStream):
        raise TypeError("scan requires an RngStream")
    metric = str(metric).lower()
    if metric not in ("tv", "kl", "clt"):
        raise ParameterError("metric must be 'tv', 'kl', or 'clt'")
    if metric == "clt" and schedule.kind not in ("A2", "A3"):
        raise ParameterError("clt scans require an A2 or A3 schedule")
    results: list[ScanResult] = []
    for index, point in enumerate(schedule.points):
        stream = RngStream(rng.seed, rng.stream_index + index)
        try:
            if metric == "tv":
                est = tv_estimate(point.params, n_samples, stream, shards=shards)
                results.append(ScanResult(point=point, estimate=est))
            elif metric == "kl":
                est = kl_estimate(point.params, n_samples, stream, shards=shards)
                results.append(ScanResult(point=point, estimate=est))
            else:
                report = clt_harness(point.params, schedule.kind, n_samples, stream)
                results.append(ScanResult(point=point, report=report))
        except (ParameterError, EstimatorError, ConsistencyError) as exc:
            results.append(ScanResult(point=point, error=str(exc)))
    return results


def a1_limit_tv_reference(sigma: float) -> float:
    """Limiting TV value of the single-eigenvalue regime at rate ``sigma``.

    ``E|sqrt(1+sigma) * exp(-sigma*Z^2/2) - 1|`` for standard normal Z,
    computed by adaptive quadrature split at the integrand's kinks.
    Requires ``sigma`` in (0, 1).
    """
    sigma = float(sigma)
    if not 0.0 < sigma < 1.0:
        raise ParameterError("a1_limit_tv_reference requires sigma in (0, 1)")
    amp = math.sqrt(1.0 + sigma)

    def integrand(z: float) -> float:
        return abs(amp * math.exp(-0.5 * sigma * z * z) - 1.0) * math.exp(-0.5 * z * z) / math.sqrt(
            2.0 * math.pi
        )

    kink = math.sqrt(math.log1p(sigma) / sigma)
    left, _ = integrate.quad(integrand, -np.inf, -kink)
    mid, _ = integrate.quad(integrand, -kink, kink)
    right, _ = integrate.quad(integrand, kink, np.inf)
    return float(left + mid + right)

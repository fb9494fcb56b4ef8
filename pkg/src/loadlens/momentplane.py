"""The moments diagram: (skewness^2, kurtosis) plane analysis.

Distribution families occupy fixed landmarks on this plane (the classic
Cullen-Frey construction): the normal sits at (0, 3), the uniform at
(0, 1.8), the exponential at (4, 9); the gamma family traces the line
k = 3 + 1.5 s and the Weibull family a curved band. Every empirical sample
obeys the Pearson feasibility bound k >= s + 1.

Two scalar indicators summarize where a window sits:

* ``metric1`` -- Euclidean distance from the normal landmark (0, 3);
  grows with load, shrinks with recovery.
* ``metric2`` -- Euclidean distance from the uniform landmark (0, 1.8).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .errors import (
    AllWindowsDegenerate,
    DegenerateMoments,
    NonPositiveShape,
    TooFewPoints,
)
from .stats import Moments, SampleWindow

NORMAL_LANDMARK = (0.0, 3.0)
UNIFORM_LANDMARK = (0.0, 1.8)
EXPONENTIAL_LANDMARK = (4.0, 9.0)

#: Gamma family: k = GAMMA_INTERCEPT + GAMMA_SLOPE * s.
GAMMA_SLOPE = 1.5
GAMMA_INTERCEPT = 3.0

#: Feasibility limit: k = 1 + s (no sample can fall below it).
LIMIT_SLOPE = 1.0
LIMIT_INTERCEPT = 1.0

DEFAULT_RHO = 0.3
DEFAULT_TAU = 0.15

WEIBULL_SHAPE_RANGE = (0.5, 10.0)
WEIBULL_GRID_SIZE = 200


class Zone(str, Enum):
    """Moments-plane region labels; classification is total and deterministic."""

    NORMAL_VICINITY = "normal_vicinity"
    UNIFORM_VICINITY = "uniform_vicinity"
    BETA_ZONE = "beta_zone"
    WEIBULL_BAND = "weibull_band"
    GAMMA_LINE = "gamma_line"
    INFEASIBLE = "infeasible"
    OTHER = "other"


@dataclass(frozen=True)
class PlanePoint:
    """A (skewness^2, kurtosis) coordinate with its window midpoint time."""

    s: float
    k: float
    t_mid_ms: int = 0

    def __post_init__(self):
        if self.s < 0:
            raise ValueError(f"s (skewness squared) must be >= 0, got {self.s}")


@dataclass(frozen=True)
class Trajectory:
    """Time-ordered plane points with phase marks ('S' start / 'E' end of exercise)."""

    points: tuple[PlanePoint, ...]
    phase_marks: tuple[tuple[int, str], ...] = ()

    def __post_init__(self):
        ts = [p.t_mid_ms for p in self.points]
        if any(b < a for a, b in zip(ts, ts[1:])):
            raise ValueError("trajectory points must be time-ordered")
        marks = dict((label, t) for t, label in self.phase_marks)
        if "S" in marks and "E" in marks and not marks["S"] < marks["E"]:
            raise ValueError("phase mark S must precede E")


def weibull_landmark(c: float) -> tuple[float, float]:
    """Plane coordinates (s, k) of the Weibull distribution with shape c.

    Computed from the raw moments mu_r = Gamma(1 + r/c). Shape 1 reduces to
    the exponential landmark (4, 9).
    """
    if not c > 0:
        raise NonPositiveShape(f"shape must be > 0, got {c}")
    mu1, mu2, mu3, mu4 = (math.gamma(1.0 + r / c) for r in (1, 2, 3, 4))
    m2 = mu2 - mu1 * mu1
    m3 = mu3 - 3.0 * mu1 * mu2 + 2.0 * mu1**3
    m4 = mu4 - 4.0 * mu1 * mu3 + 6.0 * mu1 * mu1 * mu2 - 3.0 * mu1**4
    g1 = m3 / m2**1.5
    g2 = m4 / (m2 * m2)
    return g1 * g1, g2


@dataclass(frozen=True)
class Landmarks:
    """Immutable reference geometry of the moments plane."""

    normal: tuple[float, float] = NORMAL_LANDMARK
    uniform: tuple[float, float] = UNIFORM_LANDMARK
    gamma_line: tuple[float, float] = (GAMMA_INTERCEPT, GAMMA_SLOPE)
    limit_line: tuple[float, float] = (LIMIT_INTERCEPT, LIMIT_SLOPE)
    weibull_curve: tuple[tuple[float, float], ...] = ()

    def as_dict(self) -> dict:
        return {
            "normal": list(self.normal),
            "uniform": list(self.uniform),
            "gamma_line": {"intercept": self.gamma_line[0], "slope": self.gamma_line[1]},
            "limit_line": {"intercept": self.limit_line[0], "slope": self.limit_line[1]},
            "weibull_curve": [list(p) for p in self.weibull_curve],
        }


@lru_cache(maxsize=1)
def default_landmarks() -> Landmarks:
    """Landmarks with the Weibull curve sampled on a 200-point log grid of shapes."""
    lo, hi = WEIBULL_SHAPE_RANGE
    shapes = np.exp(np.linspace(math.log(lo), math.log(hi), WEIBULL_GRID_SIZE))
    curve = tuple(weibull_landmark(float(c)) for c in shapes)
    return Landmarks(weibull_curve=curve)


def to_plane(m: Moments, t_mid_ms: int = 0) -> PlanePoint:
    """Map non-degenerate moments to their plane coordinates."""
    if m.degenerate:
        raise DegenerateMoments("degenerate moments have no plane point")
    return PlanePoint(s=m.skewness * m.skewness, k=m.kurtosis, t_mid_ms=t_mid_ms)


def metric1(p: PlanePoint) -> float:
    """Distance from the normal landmark (0, 3); the load-accommodation indicator."""
    return math.hypot(p.s - NORMAL_LANDMARK[0], p.k - NORMAL_LANDMARK[1])


def metric2(p: PlanePoint) -> float:
    """Distance from the uniform landmark (0, 1.8); the recovery indicator."""
    return math.hypot(p.s - UNIFORM_LANDMARK[0], p.k - UNIFORM_LANDMARK[1])


def _polyline_distance(p: PlanePoint, curve: np.ndarray) -> float:
    """Exact distance from p to the piecewise-linear curve through the grid points."""
    q = np.array([p.s, p.k])
    a = curve[:-1]
    b = curve[1:]
    ab = b - a
    denom = (ab * ab).sum(axis=1)
    # Degenerate segments collapse to their start point.
    t = np.where(denom > 0, ((q - a) * ab).sum(axis=1) / np.where(denom > 0, denom, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    proj = a + t[:, None] * ab
    d = np.hypot(proj[:, 0] - q[0], proj[:, 1] - q[1])
    return float(d.min())


def classify_zone(
    p: PlanePoint,
    rho: float = DEFAULT_RHO,
    tau: float = DEFAULT_TAU,
    landmarks: Landmarks | None = None,
) -> Zone:
    """Total, deterministic zone classification; the first matching rule wins.

    Rule order: infeasible, normal vicinity, uniform vicinity, gamma line,
    Weibull band, beta zone, other. The gamma-line test precedes the Weibull
    band because the two families intersect at the exponential (shape 1),
    and that shared landmark is read as gamma.
    """
    if landmarks is None:
        landmarks = default_landmarks()
    if p.k < LIMIT_INTERCEPT + LIMIT_SLOPE * p.s - tau:
        return Zone.INFEASIBLE
    if metric1(p) <= rho:
        return Zone.NORMAL_VICINITY
    if metric2(p) <= rho:
        return Zone.UNIFORM_VICINITY
    if abs(p.k - (GAMMA_INTERCEPT + GAMMA_SLOPE * p.s)) <= tau:
        return Zone.GAMMA_LINE
    curve = np.asarray(landmarks.weibull_curve, dtype=float)
    if curve.size and _polyline_distance(p, curve) <= tau:
        return Zone.WEIBULL_BAND
    if LIMIT_INTERCEPT + LIMIT_SLOPE * p.s <= p.k <= GAMMA_INTERCEPT + GAMMA_SLOPE * p.s:
        return Zone.BETA_ZONE
    return Zone.OTHER


def metric_series(windows: list[SampleWindow]) -> list[tuple[int, float, float]]:
    """Per-window (t_mid_ms, metric1, metric2) in time order.

    Degenerate windows emit NaN metrics so the series stays aligned with time.
    """
    if all(w.degenerate for w in windows):
        raise AllWindowsDegenerate(f"no non-degenerate window among {len(windows)}")
    out = []
    for w in windows:
        if w.degenerate:
            out.append((w.t_mid_ms, math.nan, math.nan))
        else:
            p = to_plane(w.moments, w.t_mid_ms)
            out.append((w.t_mid_ms, metric1(p), metric2(p)))
    return out


def trajectory_from_windows(
    windows: list[SampleWindow],
    phase_marks: tuple[tuple[int, str], ...] = (),
) -> Trajectory:
    """Plane trajectory of the non-degenerate windows, in time order."""
    points = tuple(
        to_plane(w.moments, w.t_mid_ms) for w in windows if not w.degenerate
    )
    return Trajectory(points=points, phase_marks=tuple(phase_marks))


def _triple_curvature(p0: PlanePoint, p1: PlanePoint, p2: PlanePoint) -> float:
    ax, ay = p1.s - p0.s, p1.k - p0.k
    bx, by = p2.s - p1.s, p2.k - p1.k
    cx, cy = p2.s - p0.s, p2.k - p0.k
    la = math.hypot(ax, ay)
    lb = math.hypot(bx, by)
    lc = math.hypot(cx, cy)
    if la == 0.0 or lb == 0.0 or lc == 0.0:
        return 0.0
    cross = ax * cy - ay * cx
    return 2.0 * abs(cross) / (la * lb * lc)


def curvature_profile(traj: Trajectory) -> list[tuple[int, float]]:
    """Discrete curvature at each interior trajectory point.

    Uses the circumradius of consecutive point triples:
    kappa = 4 * area(p_{i-1}, p_i, p_{i+1}) / (|a| |b| |c|).
    Collinear (or repeated) triples give 0; endpoints are omitted.
    """
    pts = traj.points
    if len(pts) < 3:
        raise TooFewPoints(f"curvature needs >= 3 points, got {len(pts)}")
    return [
        (pts[i].t_mid_ms, _triple_curvature(pts[i - 1], pts[i], pts[i + 1]))
        for i in range(1, len(pts) - 1)
    ]


def export_plane(
    windows: list[SampleWindow],
    rho: float = DEFAULT_RHO,
    tau: float = DEFAULT_TAU,
    bootstrap_cloud=None,
    phase_marks: tuple[tuple[int, str], ...] = (),
) -> dict:
    """Plot-ready plane export: landmarks, per-window points, optional cloud.

    Degenerate windows appear with null coordinates as the missing-value
    marker so consumers keep the full time axis.
    """
    landmarks = default_landmarks()
    points = []
    for w in windows:
        if w.degenerate:
            points.append(
                {"t_mid_ms": w.t_mid_ms, "s": None, "k": None, "zone": None, "metric1": None, "metric2": None}
            )
            continue
        p = to_plane(w.moments, w.t_mid_ms)
        points.append(
            {
                "t_mid_ms": p.t_mid_ms,
                "s": p.s,
                "k": p.k,
                "zone": classify_zone(p, rho, tau, landmarks).value,
                "metric1": metric1(p),
                "metric2": metric2(p),
            }
        )
    cloud = []
    if bootstrap_cloud is not None:
        for m in bootstrap_cloud.points:
            cloud.append(
                {
                    "s": m.skewness * m.skewness,
                    "k": m.kurtosis,
                    "mean": m.mean,
                    "std": m.std,
                    "skewness": m.skewness,
                    "kurtosis": m.kurtosis,
                }
            )
    return {
        "landmarks": landmarks.as_dict(),
        "rho": rho,
        "tau": tau,
        "points": points,
        "bootstrap_cloud": cloud,
        "phase_marks": [[t, label] for t, label in phase_marks],
    }

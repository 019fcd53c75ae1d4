"""Geodesic flow of a Finsler metric, with unit-speed normalization.

States are u = (x, v); the flow is x' = v, v' = -2 G(x, v). Initial
directions are rescaled to F(x, v) = 1, so the time parameter is the
metric arc length and F is conserved along the solution.
"""

from dataclasses import dataclass
from typing import List

import numpy as np

from . import ode
from .errors import DomainError
from .geometry import spray_coefficients


def geodesic_rhs(metric):
    n = metric.n

    def rhs(t, u):
        x, v = u[:n], u[n:]
        if not metric.domain.contains(x):
            raise DomainError("left chart domain")
        G = spray_coefficients(metric, x, v)
        return np.concatenate([v, -2.0 * G])

    return rhs


@dataclass
class GeodesicResult:
    metric_name: str
    ts: np.ndarray
    xs: np.ndarray
    vs: np.ndarray
    status_forward: str
    status_backward: str
    t_span: tuple
    speeds: np.ndarray
    speed_drift: float
    legs: List[ode.OdeResult]

    def sample(self, ts):
        """Dense states at query times; returns (points, velocities)."""
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        n = self.xs.shape[1]
        out = np.empty((ts.size, 2 * n))
        back, fwd = self.legs
        for i, t in enumerate(ts):
            leg = fwd if t >= 0.0 else back
            out[i] = leg.sample([t])[0]
        return out[:, :n], out[:, n:]


RIM_TOL = 1e-6


def integrate_geodesic(metric, x0, y0, t_span, rtol=1e-10, atol=1e-12,
                       normalize=True):
    """Run the geodesic through (x0, y0) over t_span = (t_min <= 0 <= t_max).

    Each leg stops early with status "boundary" (chart exit) or "blow_up"
    (speed explosion away from the rim); otherwise "t_limit".  A step
    collapse at a point within RIM_TOL of the chart rim counts as a
    boundary exit: metrics singular on the rim stall the integrator there
    before any stage can land outside.
    """
    x0 = metric.check_point(x0)
    y0 = metric.check_direction(y0)
    t_min, t_max = float(t_span[0]), float(t_span[1])
    if not (t_min <= 0.0 <= t_max):
        raise DomainError("t_span must contain 0")
    v0 = y0 / metric(x0, y0) if normalize else y0.astype(float)
    u0 = np.concatenate([x0, v0])
    n = metric.n
    rhs = geodesic_rhs(metric)
    guard = lambda u: metric.domain.contains(u[:n])

    empty = ode.OdeResult(np.array([0.0]), u0[None, :].copy(), "t_limit",
                          0.0, u0.copy(), 0, 0)
    back = ode.integrate(rhs, 0.0, u0, t_min, rtol, atol, guard=guard) \
        if t_min < 0.0 else empty
    fwd = ode.integrate(rhs, 0.0, u0, t_max, rtol, atol, guard=guard) \
        if t_max > 0.0 else empty

    def status(leg):
        if leg.status == "blow_up" and \
                metric.domain.signed(leg.u_end[:n]) > -RIM_TOL:
            return "boundary"
        return leg.status

    ts = np.concatenate([back.ts[::-1], fwd.ts[1:]])
    us = np.concatenate([back.us[::-1], fwd.us[1:]])
    xs, vs = us[:, :n], us[:, n:]
    speeds = np.array([metric(x, v) for x, v in zip(xs, vs)])
    drift = float(np.max(np.abs(speeds - speeds[0])))
    return GeodesicResult(metric.name, ts, xs, vs, status(fwd), status(back),
                          (t_min, t_max), speeds, drift, [back, fwd])


# ---------------------------------------------------------------------------
# straightness diagnostics for projectively flat charts


def _point_segment_distance(p, a, b):
    ab = b - a
    denom = float(ab @ ab)
    s = 0.0 if denom == 0.0 else np.clip(float((p - a) @ ab) / denom, 0.0, 1.0)
    return float(np.linalg.norm(p - (a + s * ab)))


def hausdorff_to_chord(points, anchor, direction):
    """Hausdorff distance between a polyline and its straight chord.

    The chord is the segment of the line anchor + s*direction spanned by
    the projections of the polyline's endpoints.
    """
    pts = np.asarray(points, dtype=float)
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    a0 = np.asarray(anchor, dtype=float)
    s = (pts - a0) @ d
    lo, hi = float(np.min(s)), float(np.max(s))
    p_lo, p_hi = a0 + lo * d, a0 + hi * d

    d_fwd = max(_point_segment_distance(p, p_lo, p_hi) for p in pts)

    chord_samples = p_lo + np.linspace(0.0, 1.0, 200)[:, None] * (p_hi - p_lo)
    d_back = 0.0
    for q in chord_samples:
        best = min(
            _point_segment_distance(q, pts[i], pts[i + 1])
            for i in range(len(pts) - 1)
        ) if len(pts) > 1 else float(np.linalg.norm(q - pts[0]))
        d_back = max(d_back, best)
    return max(d_fwd, d_back)

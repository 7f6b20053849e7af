"""2D cubic Bezier and polyline utilities used by the layout engine and its checks."""

from __future__ import annotations

import math
from typing import Sequence

Pt = tuple[float, float]
Cubic = tuple[Pt, Pt, Pt, Pt]


def cubic_point(seg: Cubic, t: float) -> Pt:
    p0, p1, p2, p3 = seg
    u = 1.0 - t
    a = u * u * u
    b = 3.0 * u * u * t
    c = 3.0 * u * t * t
    d = t * t * t
    return (
        a * p0[0] + b * p1[0] + c * p2[0] + d * p3[0],
        a * p0[1] + b * p1[1] + c * p2[1] + d * p3[1],
    )


def flatten_cubic(seg: Cubic, n: int = 24) -> list[Pt]:
    """Sample a cubic at n+1 uniformly spaced parameter values."""
    return [cubic_point(seg, i / n) for i in range(n + 1)]


def flatten_path(segments: Sequence[Cubic], n: int = 24) -> list[Pt]:
    """Flatten a continuous poly-Bezier, deduplicating shared endpoints."""
    pts: list[Pt] = []
    for seg in segments:
        sampled = flatten_cubic(seg, n)
        if pts:
            sampled = sampled[1:]
        pts.extend(sampled)
    return pts


def polyline_length(pts: Sequence[Pt]) -> float:
    total = 0.0
    for a, b in zip(pts, pts[1:]):
        total += math.hypot(b[0] - a[0], b[1] - a[1])
    return total


def cubic_arc_length(seg: Cubic, n: int = 64) -> float:
    return polyline_length(flatten_cubic(seg, n))


def path_arc_length(segments: Sequence[Cubic], n: int = 64) -> float:
    return sum(cubic_arc_length(seg, n) for seg in segments)


def straight_cubic(a: Pt, b: Pt) -> Cubic:
    """A degenerate cubic tracing the straight segment from a to b."""
    p1 = (a[0] + (b[0] - a[0]) / 3.0, a[1] + (b[1] - a[1]) / 3.0)
    p2 = (a[0] + 2.0 * (b[0] - a[0]) / 3.0, a[1] + 2.0 * (b[1] - a[1]) / 3.0)
    return (a, p1, p2, b)


def arc_cubic(a: Pt, b: Pt, bulge: float) -> Cubic:
    """A symmetric vertical-bulge arc from a to b.

    ``bulge`` is the signed y offset of the curve midpoint from the chord
    midpoint; control points are lifted by 4/3 of it so the curve actually
    attains the requested apex at t = 0.5.
    """
    lift = bulge * 4.0 / 3.0
    p1 = (a[0] + (b[0] - a[0]) / 3.0, a[1] + (b[1] - a[1]) / 3.0 + lift)
    p2 = (a[0] + 2.0 * (b[0] - a[0]) / 3.0, a[1] + 2.0 * (b[1] - a[1]) / 3.0 + lift)
    return (a, p1, p2, b)


def _orient(a: Pt, b: Pt, c: Pt) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _on_segment(a: Pt, b: Pt, p: Pt, eps: float) -> bool:
    return (
        min(a[0], b[0]) - eps <= p[0] <= max(a[0], b[0]) + eps
        and min(a[1], b[1]) - eps <= p[1] <= max(a[1], b[1]) + eps
    )


def segments_intersect(a1: Pt, a2: Pt, b1: Pt, b2: Pt, eps: float = 1e-9) -> Pt | None:
    """Return an intersection point of two closed segments, or None.

    Collinear overlaps report a point inside the overlap.
    """
    d1 = _orient(b1, b2, a1)
    d2 = _orient(b1, b2, a2)
    d3 = _orient(a1, a2, b1)
    d4 = _orient(a1, a2, b2)
    if ((d1 > eps and d2 < -eps) or (d1 < -eps and d2 > eps)) and (
        (d3 > eps and d4 < -eps) or (d3 < -eps and d4 > eps)
    ):
        denom = (a2[0] - a1[0]) * (b2[1] - b1[1]) - (a2[1] - a1[1]) * (b2[0] - b1[0])
        if denom == 0:
            return a1
        t = ((b1[0] - a1[0]) * (b2[1] - b1[1]) - (b1[1] - a1[1]) * (b2[0] - b1[0])) / denom
        return (a1[0] + t * (a2[0] - a1[0]), a1[1] + t * (a2[1] - a1[1]))
    for p, (s1, s2) in ((a1, (b1, b2)), (a2, (b1, b2)), (b1, (a1, a2)), (b2, (a1, a2))):
        if abs(_orient(s1, s2, p)) <= eps and _on_segment(s1, s2, p, eps):
            return p
    return None


def polylines_intersect(
    pa: Sequence[Pt],
    pb: Sequence[Pt],
    ignore_near: Sequence[Pt] = (),
    eps: float = 1e-6,
) -> Pt | None:
    """First intersection of two polylines, ignoring hits near given points.

    ``ignore_near`` carries shared graph nodes: touching there is legal
    (edges meeting at a bifurcation), anywhere else is a crossing.
    """
    min_ax = min(p[0] for p in pa) - eps
    max_ax = max(p[0] for p in pa) + eps
    min_ay = min(p[1] for p in pa) - eps
    max_ay = max(p[1] for p in pa) + eps
    min_bx = min(p[0] for p in pb)
    max_bx = max(p[0] for p in pb)
    min_by = min(p[1] for p in pb)
    max_by = max(p[1] for p in pb)
    if min_bx > max_ax or max_bx < min_ax or min_by > max_ay or max_by < min_ay:
        return None

    for i in range(len(pa) - 1):
        a1, a2 = pa[i], pa[i + 1]
        lo_x, hi_x = min(a1[0], a2[0]) - eps, max(a1[0], a2[0]) + eps
        lo_y, hi_y = min(a1[1], a2[1]) - eps, max(a1[1], a2[1]) + eps
        for j in range(len(pb) - 1):
            b1, b2 = pb[j], pb[j + 1]
            if (
                min(b1[0], b2[0]) > hi_x
                or max(b1[0], b2[0]) < lo_x
                or min(b1[1], b2[1]) > hi_y
                or max(b1[1], b2[1]) < lo_y
            ):
                continue
            hit = segments_intersect(a1, a2, b1, b2, eps=eps * 1e-3)
            if hit is None:
                continue
            tolerated = False
            for q in ignore_near:
                if math.hypot(hit[0] - q[0], hit[1] - q[1]) <= 10 * eps:
                    tolerated = True
                    break
            if not tolerated:
                return hit
    return None

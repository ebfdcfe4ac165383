"""Builders for common obstacle shapes."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .boundary import BoundarySegment, GeometryError, Obstacle, build_obstacle


def circle(center=(0.0, 0.0), radius: float = 1.0) -> Obstacle:
    """Disc obstacle as a single counterclockwise arc."""
    return build_obstacle([BoundarySegment.arc(center, radius, 0.0, 2 * math.pi, ccw=True)])


def fillet_segments(vertices: Sequence, radii) -> list:
    """Segments of a polygon whose corners are rounded by circular fillets.

    Parameters
    ----------
    vertices : (n, 2) array_like
        Polygon corners in counterclockwise order (interior on the left).
    radii : float or sequence of float
        Fillet radius per corner.  Left turns become convex arcs, right
        turns concave ones.

    Returns
    -------
    list of BoundarySegment
    """
    V = np.asarray(vertices, dtype=float)
    n = len(V)
    if n < 3:
        raise GeometryError("a polygon needs at least three corners")
    r = np.broadcast_to(np.asarray(radii, dtype=float), (n,))
    arcs = []
    for i in range(n):
        a = V[i] - V[i - 1]
        b = V[(i + 1) % n] - V[i]
        a = a / np.linalg.norm(a)
        b = b / np.linalg.norm(b)
        tau = math.atan2(a[0] * b[1] - a[1] * b[0], a @ b)
        if abs(tau) < 1e-12:
            arcs.append(None)
            continue
        tl = r[i] * math.tan(abs(tau) / 2)
        p1 = V[i] - a * tl
        left = np.array([-a[1], a[0]])
        if tau > 0:
            c = p1 + r[i] * left
        else:
            c = p1 - r[i] * left
        p2 = V[i] + b * tl
        a0 = math.atan2(p1[1] - c[1], p1[0] - c[0])
        a1 = math.atan2(p2[1] - c[1], p2[0] - c[0])
        arcs.append((BoundarySegment.arc(c, r[i], a0, a1, ccw=tau > 0), p1, p2))
    segs = []
    for i in range(n):
        if arcs[i] is not None:
            segs.append(arcs[i][0])
        start = arcs[i][2] if arcs[i] is not None else V[i]
        j = (i + 1) % n
        end = arcs[j][1] if arcs[j] is not None else V[j]
        # snap endpoints to the exact arc endpoints to close the chain
        if arcs[i] is not None:
            start = np.asarray(arcs[i][0].end)
        if arcs[j] is not None:
            end = np.asarray(arcs[j][0].start)
        if np.linalg.norm(end - start) < 1e-12:
            continue
        if (end - start) @ (V[j] - V[i]) <= 0:
            raise GeometryError(f"fillets overlap on edge {i}")
        segs.append(BoundarySegment.line(start, end))
    return segs


def filleted_polygon(vertices: Sequence, radii) -> Obstacle:
    """Obstacle bounded by a polygon with rounded corners."""
    return build_obstacle(fillet_segments(vertices, radii))


def corner_turns(vertices) -> np.ndarray:
    """Signed turning angle at each corner of a closed polygon."""
    V = np.asarray(vertices, dtype=float)
    a = V - np.roll(V, 1, axis=0)
    b = np.roll(V, -1, axis=0) - V
    return np.arctan2(a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0], np.einsum("ij,ij->i", a, b))


def rounded_polygon(vertices: Sequence, convex_radius: float, concave_radius: float) -> Obstacle:
    """Filleted polygon with one radius for convex and one for concave corners."""
    turns = corner_turns(vertices)
    radii = np.where(turns > 0, convex_radius, concave_radius)
    return filleted_polygon(vertices, radii)


def thick_path(points: Sequence, width: float, convex_radius: float,
               concave_radius: float | None = None) -> Obstacle:
    """Obstacle shaped like a polyline thickened to ``width``.

    Parameters
    ----------
    points : (n, 2) array_like
        Polyline centre points; consecutive directions must turn by less
        than 180 degrees.
    width : float
        Wall thickness.
    convex_radius, concave_radius : float
        Fillet radii at the convex and concave corners of the outline
        (``concave_radius`` defaults to ``convex_radius``).
    """
    if concave_radius is None:
        concave_radius = convex_radius
    P = np.asarray(points, dtype=float)
    h = width / 2.0
    dirs = np.diff(P, axis=0)
    dirs /= np.linalg.norm(dirs, axis=1)[:, None]
    nrm = np.stack([-dirs[:, 1], dirs[:, 0]], axis=1)

    def side(sign):
        out = [P[0] + sign * h * nrm[0] - h * dirs[0]]
        for k in range(1, len(P) - 1):
            # miter corner of the offset lines
            n1, n2 = nrm[k - 1], nrm[k]
            m = n1 + n2
            m = m / np.linalg.norm(m)
            out.append(P[k] + sign * h * m / (m @ n1))
        out.append(P[-1] + sign * h * nrm[-1] + h * dirs[-1])
        return out

    right = side(-1.0)
    left = side(1.0)
    outline = right + left[::-1]
    return rounded_polygon(outline, convex_radius, concave_radius)

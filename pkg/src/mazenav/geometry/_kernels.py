"""Compiled inner loops for per-step distance queries."""

from __future__ import annotations

import math

import numpy as np
from numba import njit

# packed segment table columns
KIND, AX, AY, DX, DY, LEN, CX, CY, RAD, A0, SGN, SWEEP, S0, KAPPA = range(14)
N_COLS = 14
TWO_PI = 2.0 * math.pi


def pack_segments(segments, s0) -> np.ndarray:
    tab = np.zeros((len(segments), N_COLS))
    for i, g in enumerate(segments):
        tab[i, S0] = s0[i]
        tab[i, LEN] = g.length
        tab[i, KAPPA] = g.curvature
        tab[i, AX], tab[i, AY] = g.start
        if g.kind == "line":
            tab[i, KIND] = 0.0
            tab[i, DX] = g.end[0] - g.start[0]
            tab[i, DY] = g.end[1] - g.start[1]
        else:
            tab[i, KIND] = 1.0
            tab[i, CX], tab[i, CY] = g.center
            tab[i, RAD] = g.radius
            tab[i, A0] = g.from_angle
            tab[i, SGN] = 1.0 if g.ccw else -1.0
            tab[i, SWEEP] = g.sweep
    return tab


@njit(cache=True)
def nearest_kernel(tab, px, py):
    """Closest boundary point of ``(px, py)``.

    Returns ``(d, s, Tx, Ty, kappa, inside)`` where ``(Tx, Ty)`` is the
    unit tangent there and ``inside`` is 1.0 when the point lies on the
    obstacle side of the tangent.
    """
    best = 1e300
    bs = 0.0
    bqx = 0.0
    bqy = 0.0
    btx = 1.0
    bty = 0.0
    bk = 0.0
    n = tab.shape[0]
    for i in range(n):
        if tab[i, KIND] == 0.0:
            ax = tab[i, AX]
            ay = tab[i, AY]
            dx = tab[i, DX]
            dy = tab[i, DY]
            ln = tab[i, LEN]
            t = ((px - ax) * dx + (py - ay) * dy) / (ln * ln)
            if t < 0.0:
                t = 0.0
            elif t > 1.0:
                t = 1.0
            qx = ax + t * dx
            qy = ay + t * dy
            dd = math.hypot(px - qx, py - qy)
            if dd < best:
                best = dd
                bs = tab[i, S0] + t * ln
                bqx = qx
                bqy = qy
                btx = dx / ln
                bty = dy / ln
                bk = 0.0
        else:
            cx = tab[i, CX]
            cy = tab[i, CY]
            r = tab[i, RAD]
            sg = tab[i, SGN]
            wx = px - cx
            wy = py - cy
            rho = math.hypot(wx, wy)
            ang = math.atan2(wy, wx)
            delta = (sg * (ang - tab[i, A0])) % TWO_PI
            sw = tab[i, SWEEP]
            if delta <= sw and rho > 0.0:
                dd = abs(rho - r)
                u = delta
            else:
                # nearer end point
                a_end = tab[i, A0] + sg * sw
                ex = cx + r * math.cos(a_end)
                ey = cy + r * math.sin(a_end)
                d_start = math.hypot(px - tab[i, AX], py - tab[i, AY])
                d_end = math.hypot(px - ex, py - ey)
                if d_start <= d_end:
                    dd = d_start
                    u = 0.0
                else:
                    dd = d_end
                    u = sw
            if dd < best:
                best = dd
                a = tab[i, A0] + sg * u
                ca = math.cos(a)
                sa = math.sin(a)
                bqx = cx + r * ca
                bqy = cy + r * sa
                bs = tab[i, S0] + u * r
                btx = -sg * sa
                bty = sg * ca
                bk = tab[i, KAPPA]
    # N = rot90(T) points into the obstacle
    side = -(px - bqx) * bty + (py - bqy) * btx
    inside = 1.0 if side > 0.0 else 0.0
    return best, bs, btx, bty, bk, inside

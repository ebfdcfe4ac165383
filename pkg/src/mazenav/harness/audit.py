"""Post-run checks on a RunRecord: mode grammar, sliding accuracy, direction.

Each check returns a list of human-readable violations; an empty list
means the record passes.
"""

from __future__ import annotations

import math
import re

import numpy as np

from ..controller import BANG, EPS_BETA, IT, MODE_A, MODE_B, SMEC, SMT
from .simulate import RunRecord

_LETTER = {SMEC: "e", SMT: "t", BANG: "b"}

# IT, then any mix of sliding phases, closed by a return to mode A unless the
# run stops inside the episode
_EPISODE = re.compile(r"^(i[etb]*x)*(i[etb]*)?$")


def _tokens(rec: RunRecord) -> str:
    out = []
    mode = MODE_A
    for e in rec.events:
        if e.kind == "A->B":
            out.append("i")
            mode = MODE_B
        elif e.kind == "B->A":
            out.append("x")
            mode = MODE_A
        elif e.kind == "submode" and mode == MODE_B:
            out.append(_LETTER.get(e.after, "?"))
    return "".join(out)


def grammar_violations(rec: RunRecord) -> list:
    """Mode-B episodes must read IT (SMEC | SMT | BANG)* then a return to A.

    Also checks that the event list agrees with the sampled labels: every
    label change is backed by an event at that time and the run ends with
    an arrival or timeout event.
    """
    bad = []
    seq = _tokens(rec)
    if not _EPISODE.match(seq):
        bad.append(f"event sequence {seq!r} breaks the episode grammar")
    for e in rec.events:
        if e.kind == "submode" and e.before == e.after:
            bad.append(f"null transition at t={e.t}")
    if rec.termination in ("target-reached", "timeout"):
        if not rec.events or rec.events[-1].kind not in ("arrival", "timeout"):
            bad.append("run does not end with an arrival or timeout event")
    # events carry the exact sample time of the row they label
    times = {float(e.t) for e in rec.events}
    for k in range(1, len(rec.t)):
        if (rec.mode[k], rec.submode[k]) != (rec.mode[k - 1], rec.submode[k - 1]):
            if float(rec.t[k]) not in times:
                bad.append(f"label change at t={rec.t[k]} without an event")
    return bad


def intervals(rec: RunRecord, mode: str, submode: str) -> list:
    """Index ranges ``[i0, i1)`` of maximal runs with the given labels."""
    out = []
    i0 = None
    for k in range(len(rec.t) + 1):
        inside = k < len(rec.t) and rec.mode[k] == mode and rec.submode[k] == submode
        if inside and i0 is None:
            i0 = k
        elif not inside and i0 is not None:
            out.append((i0, k))
            i0 = None
    return out


def sliding_errors(rec: RunRecord) -> tuple:
    """Largest ``|d - smec_d|`` over SMEC rows and ``|beta|`` over SMT rows."""
    dev = 0.0
    for i0, i1 in intervals(rec, MODE_B, SMEC):
        dev = max(dev, float(np.max(np.abs(rec.d_true[i0:i1] - rec.smec_d[i0:i1]))))
    bmax = 0.0
    for mode in (MODE_A, MODE_B):
        for i0, i1 in intervals(rec, mode, SMT):
            bmax = max(bmax, float(np.max(np.abs(rec.beta[i0:i1]))))
    return dev, bmax


def sliding_violations(rec: RunRecord, R: float) -> list:
    dev, bmax = sliding_errors(rec)
    bad = []
    if dev > 0.01 * R:
        bad.append(f"SMEC distance deviation {dev:.3g} > {0.01 * R:.3g}")
    if bmax > 2 * EPS_BETA:
        bad.append(f"SMT bearing {bmax:.3g} > {2 * EPS_BETA:.3g}")
    return bad


def direction_violations(rec: RunRecord, tol: float = 1e-6) -> list:
    """After IT, the projection must move in direction sigma until mode B ends.

    The sign of the projection rate equals the sign of ``cos(alpha)``.
    """
    bad = []
    post = [k for k in range(len(rec.t))
            if rec.mode[k] == MODE_B and rec.submode[k] != IT]
    for k in post:
        c = rec.sigma[k] * math.cos(rec.alpha[k])
        if c < -tol:
            bad.append(f"sigma * s_dot < 0 at t={rec.t[k]}")
            break
    return bad


def saturation_violations(rec: RunRecord, u_max: float) -> list:
    m = float(np.max(np.abs(rec.u))) if len(rec.u) else 0.0
    return [f"|u| = {m} exceeds {u_max}"] if m > u_max + 1e-12 else []

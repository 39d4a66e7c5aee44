"""Compiled population stepper; arithmetic mirrors :func:`dnaarchive.agent.step`."""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .agent import MotilityParams
from .agent import small_exp as _small_exp_py
from .agent import wrap_angle as _wrap_angle_py

CHEMOTAXIS, SATURATED, CONJUGATING = 0, 1, 2


def scan_table(params: MotilityParams):
    psi = params.scan_angles()
    cos = np.array([math.cos(p) for p in psi])
    sin = np.array([math.sin(p) for p in psi])
    return psi, cos, sin


_wrap = njit(cache=True)(_wrap_angle_py)


small_exp = njit(cache=True)(_small_exp_py)


@njit(cache=True)
def advance(
    n_steps,
    x, y, theta, mode, frozen,
    bx, by, amp, tgt,
    nbx, nby, namp, ntgt, pending,
    words, bitpos, active,
    scan_psi, scan_cos, scan_sin,
    step_len, phi, hyst,
):  # fmt: skip
    """Advance every active agent by ``n_steps`` motility steps in place.

    Per agent ``i``: beacons ``(bx[i], by[i])`` with amplitudes ``amp[i]`` and
    receptor targets ``tgt[i]``. A conjugating agent stays put for
    ``frozen[i]`` steps; when the count reaches zero it switches to the
    ``n*`` beacon/target set if ``pending[i]``. Tumble signs are read bit by
    bit from ``words[i]`` starting at ``bitpos[i]``.
    """
    n = x.shape[0]
    n_scan = scan_psi.shape[0]
    shrink = math.exp(-step_len * step_len)
    m2l = -2.0 * step_len
    pk = np.empty(3)
    qk = np.empty(3)
    here = np.empty(3)
    base = np.empty(3)
    sums = np.empty(n_scan)
    for i in range(n):
        if not active[i]:
            continue
        xi = x[i]
        yi = y[i]
        th = theta[i]
        ct = math.cos(th)
        st = math.sin(th)
        b = bitpos[i]
        for _ in range(n_steps):
            if mode[i] == CONJUGATING:
                frozen[i] -= 1
                if frozen[i] <= 0:
                    frozen[i] = 0
                    mode[i] = CHEMOTAXIS
                    if pending[i]:
                        for k in range(3):
                            bx[i, k] = nbx[i, k]
                            by[i, k] = nby[i, k]
                            amp[i, k] = namp[i, k]
                            tgt[i, k] = ntgt[i, k]
                        pending[i] = False
                continue

            for k in range(3):
                wx = xi - bx[i, k]
                wy = yi - by[i, k]
                here[k] = amp[i, k] * math.exp(-(wx * wx + wy * wy))
                pk[k] = m2l * (wx * ct + wy * st)
                qk[k] = m2l * (wy * ct - wx * st)
            if mode[i] == SATURATED:
                for k in range(3):
                    if here[k] < tgt[i, k] * (1.0 - hyst):
                        mode[i] = CHEMOTAXIS
                        break
            else:
                sat = True
                for k in range(3):
                    if here[k] < tgt[i, k]:
                        sat = False
                        break
                if sat:
                    mode[i] = SATURATED

            turn = 0.0
            if mode[i] == CHEMOTAXIS:
                fast = True
                for k in range(3):
                    base[k] = here[k] * shrink
                    # |p cos + q sin| <= hypot(p, q): every probe is in polynomial range
                    if pk[k] * pk[k] + qk[k] * qk[k] > 0.99e-6:
                        fast = False
                for j in range(n_scan):
                    sums[j] = 0.0
                if fast:
                    for k in range(3):
                        p = pk[k]
                        q = qk[k]
                        bk = base[k]
                        tk = tgt[i, k]
                        for j in range(n_scan):
                            z = p * scan_cos[j] + q * scan_sin[j]
                            c = bk * (1.0 + z * (1.0 + z * (0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0)))))
                            sums[j] += c if c < tk else 0.0
                else:
                    for k in range(3):
                        for j in range(n_scan):
                            c = base[k] * small_exp(pk[k] * scan_cos[j] + qk[k] * scan_sin[j])
                            sums[j] += c if c < tgt[i, k] else 0.0
                best = -1.0
                for j in range(n_scan):
                    if sums[j] > best:
                        best = sums[j]
                        turn = scan_psi[j]

            bit = (words[i, b >> 6] >> np.uint64(b & 63)) & np.uint64(1)
            b += 1
            tumble = phi if bit else -phi
            th = _wrap(th + turn + tumble)
            ct = math.cos(th)
            st = math.sin(th)
            xi = xi + step_len * ct
            yi = yi + step_len * st
        x[i] = xi
        y[i] = yi
        theta[i] = th
        bitpos[i] = b

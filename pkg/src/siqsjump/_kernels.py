"""Compiled inner loops.  Callers validate inputs; kernels assume them valid."""

from __future__ import annotations

import numba as nb
import numpy as np


@nb.njit(cache=True, nogil=True)
def _rhs(A, mu1, mu2, mu3, beta, delta, gamma, k, S, I, Q):
    dS = A - mu1 * S - beta * S * I + gamma * I + k * Q
    dI = beta * S * I - (mu2 + delta + gamma) * I
    dQ = delta * I - (mu3 + k) * Q
    return dS, dI, dQ


@nb.njit(cache=True, nogil=True)
def rk4(rates, y0, n_steps, h, out):
    """Fixed-step RK4.  Returns (clamp_count, failed_step); failed_step=-1 on success."""
    A, mu1, mu2, mu3, beta, delta, gamma, k = rates
    S, I, Q = y0[0], y0[1], y0[2]
    out[0, 0] = S
    out[0, 1] = I
    out[0, 2] = Q
    clamps = 0
    for n in range(n_steps):
        a1, b1, c1 = _rhs(A, mu1, mu2, mu3, beta, delta, gamma, k, S, I, Q)
        a2, b2, c2 = _rhs(A, mu1, mu2, mu3, beta, delta, gamma, k,
                          S + 0.5 * h * a1, I + 0.5 * h * b1, Q + 0.5 * h * c1)
        a3, b3, c3 = _rhs(A, mu1, mu2, mu3, beta, delta, gamma, k,
                          S + 0.5 * h * a2, I + 0.5 * h * b2, Q + 0.5 * h * c2)
        a4, b4, c4 = _rhs(A, mu1, mu2, mu3, beta, delta, gamma, k,
                          S + h * a3, I + h * b3, Q + h * c3)
        S = S + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        I = I + h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
        Q = Q + h / 6.0 * (c1 + 2.0 * c2 + 2.0 * c3 + c4)
        if not (np.isfinite(S) and np.isfinite(I) and np.isfinite(Q)):
            return clamps, n + 1
        if S < 0.0:
            S = 0.0
            clamps += 1
        if I < 0.0:
            I = 0.0
            clamps += 1
        if Q < 0.0:
            Q = 0.0
            clamps += 1
        out[n + 1, 0] = S
        out[n + 1, 1] = I
        out[n + 1, 2] = Q
    return clamps, -1


@nb.njit(cache=True, nogil=True)
def _em_step(rates, sig, comp, S, I, Q, dw1, dw2, dw3, dwb, h):
    """One Euler-Maruyama step of the jump-compensated drift plus diffusion."""
    A, mu1, mu2, mu3, beta, delta, gamma, k = rates[0], rates[1], rates[2], rates[3], \
        rates[4], rates[5], rates[6], rates[7]
    s1, s2, s3, sb = sig[0], sig[1], sig[2], sig[3]
    dS, dI, dQ = _rhs(A, mu1, mu2, mu3, beta, delta, gamma, k, S, I, Q)
    trans = sb * S * I * dwb
    Sn = S + (dS - comp[0] * S) * h + s1 * S * dw1 - trans
    In = I + (dI - comp[1] * I) * h + s2 * I * dw2 + trans
    Qn = Q + (dQ - comp[2] * Q) * h + s3 * Q * dw3
    return Sn, In, Qn


@nb.njit(cache=True, nogil=True)
def em_path(rates, sig, comp, etas, y0, dW, jump_step, jump_atom, h, floor, out):
    """Euler-Maruyama path with multiplicative jumps at the end of their step.

    ``dW`` is (n_steps, 4) with columns W1, W2, W3, W_beta.  Jumps are sorted
    by step.  Returns (clamp_count, min_pre_clamp, failed_step).
    """
    n_steps = dW.shape[0]
    S, I, Q = y0[0], y0[1], y0[2]
    out[0, 0] = S
    out[0, 1] = I
    out[0, 2] = Q
    clamps = 0
    min_raw = min(S, min(I, Q))
    j = 0
    n_jumps = jump_step.shape[0]
    for n in range(n_steps):
        S, I, Q = _em_step(rates, sig, comp, S, I, Q,
                           dW[n, 0], dW[n, 1], dW[n, 2], dW[n, 3], h)
        while j < n_jumps and jump_step[j] == n:
            a = jump_atom[j]
            S = S * (1.0 + etas[a, 0])
            I = I * (1.0 + etas[a, 1])
            Q = Q * (1.0 + etas[a, 2])
            j += 1
        if not (np.isfinite(S) and np.isfinite(I) and np.isfinite(Q)):
            return clamps, min_raw, n + 1
        m = min(S, min(I, Q))
        if m < min_raw:
            min_raw = m
        if S < 0.0:
            S = floor
            clamps += 1
        if I < 0.0:
            I = floor
            clamps += 1
        if Q < 0.0:
            Q = floor
            clamps += 1
        out[n + 1, 0] = S
        out[n + 1, 1] = I
        out[n + 1, 2] = Q
    return clamps, min_raw, -1


@nb.njit(cache=True, nogil=True)
def aux_path(rates, sig, comp, etas, x0, dW, jump_step, jump_atom, h, companion, out):
    """Comparison process driven by the companion path's increments and jumps.

    Diffusion amplitudes come from the stored companion state at the start of
    each step; jump amplitudes from the companion state just before each jump,
    which is recomputed with the same arithmetic as :func:`em_path`.
    """
    A, mu1 = rates[0], rates[1]
    s1, s2, s3 = sig[0], sig[1], sig[2]
    n_steps = dW.shape[0]
    X = x0
    out[0] = X
    j = 0
    n_jumps = jump_step.shape[0]
    for n in range(n_steps):
        S = companion[n, 0]
        I = companion[n, 1]
        Q = companion[n, 2]
        X = X + (A - mu1 * X - comp[0] * S - comp[1] * I - comp[2] * Q) * h \
            + s1 * S * dW[n, 0] + s2 * I * dW[n, 1] + s3 * Q * dW[n, 2]
        if j < n_jumps and jump_step[j] == n:
            Sp, Ip, Qp = _em_step(rates, sig, comp, S, I, Q,
                                  dW[n, 0], dW[n, 1], dW[n, 2], dW[n, 3], h)
            while j < n_jumps and jump_step[j] == n:
                a = jump_atom[j]
                X = X + etas[a, 0] * Sp + etas[a, 1] * Ip + etas[a, 2] * Qp
                Sp = Sp * (1.0 + etas[a, 0])
                Ip = Ip * (1.0 + etas[a, 1])
                Qp = Qp * (1.0 + etas[a, 2])
                j += 1
        if not np.isfinite(X):
            return n + 1
        out[n + 1] = X
    return -1

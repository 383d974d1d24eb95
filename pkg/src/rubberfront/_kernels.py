"""Compiled time-stepping kernels.

The coupled system M alpha' = F(alpha, h, tau), h' = G(alpha, h) is integrated
here with explicit Runge-Kutta schemes: a fixed-step classical RK4 and an
adaptive Dormand-Prince 5(4) pair.  The mass solve is embedded in every stage
via the Thomas algorithm, so the front and the concentration advance
monolithically.  The loops are numba-compiled because stability-limited runs
on fine meshes take millions of steps.

Status codes returned by the drivers:
    0  reached the final time
    1  breakthrough (h reached 1) -- trajectory truncated at the event
    2  non-finite state or unrecoverable step-size collapse
    3  max_steps exceeded
"""

from __future__ import annotations

import numpy as np
from numba import njit

STATUS_DONE = 0
STATUS_BREAKTHROUGH = 1
STATUS_UNSTABLE = 2
STATUS_MAX_STEPS = 3

BREAKTHROUGH_MARGIN = 1e-12

# Dormand-Prince 5(4) tableau
DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
DP_A = np.zeros((7, 7))
DP_A[1, 0] = 1 / 5
DP_A[2, :2] = (3 / 40, 9 / 40)
DP_A[3, :3] = (44 / 45, -56 / 15, 32 / 9)
DP_A[4, :4] = (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729)
DP_A[5, :5] = (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656)
DP_A[6, :6] = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84)
DP_B5 = DP_A[6].copy()
DP_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640,
                  -92097 / 339200, 187 / 2100, 1 / 40])
DP_E = DP_B5 - DP_B4


@njit(cache=True, nogil=True)
def thomas_solve(lower, diag, upper, rhs, cp, bp, x):
    """Solve a tridiagonal system in-place into x (cp, bp are work arrays)."""
    n = diag.size
    cp[0] = upper[0] / diag[0]
    bp[0] = rhs[0] / diag[0]
    for i in range(1, n):
        m = diag[i] - lower[i - 1] * cp[i - 1]
        if i < n - 1:
            cp[i] = upper[i] / m
        bp[i] = (rhs[i] - lower[i - 1] * bp[i - 1]) / m
    x[n - 1] = bp[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = bp[i] - cp[i] * x[i + 1]


@njit(cache=True, nogil=True)
def sigma_eval(kind, p0, p1, x):
    """Coefficient families: 0 constant, 1 linear, 2 smooth cubic cutoff."""
    if kind == 0:
        return p0
    if kind == 1:
        return p0 * x
    if x <= 0.0:
        return 0.0
    if x >= p1:
        return p0
    t = x / p1
    return p0 * t * t * (3.0 - 2.0 * t)


@njit(cache=True, nogil=True)
def b_eval(ts, vs, tau):
    """Piecewise-linear reservoir function (single knot = constant)."""
    m = ts.size
    if m == 1 or tau <= ts[0]:
        return vs[0]
    if tau >= ts[m - 1]:
        return vs[m - 1]
    lo = 0
    hi = m - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ts[mid] <= tau:
            lo = mid
        else:
            hi = mid
    w = (tau - ts[lo]) / (ts[hi] - ts[lo])
    return vs[lo] + w * (vs[hi] - vs[lo])


@njit(cache=True, nogil=True)
def rhs_eval(alpha, h, tau,
             Ml, Md, Mu, Al, Ad, Au, Kl, Kd, Ku,
             Bi, H, b_ts, b_vs, A0, sig_kind, sig_p0, sig_p1,
             F, cp, bp, alpha_prime):
    """Evaluate alpha' (into alpha_prime) and return h'."""
    n = alpha.size
    hprime = A0 * (alpha[n - 1] - sigma_eval(sig_kind, sig_p0, sig_p1, h))
    c1 = hprime / h
    c2 = 1.0 / (h * h)
    F[0] = c1 * (Kd[0] * alpha[0] + Ku[0] * alpha[1]) \
        - c2 * (Ad[0] * alpha[0] + Au[0] * alpha[1])
    for i in range(1, n - 1):
        F[i] = c1 * (Kl[i - 1] * alpha[i - 1] + Kd[i] * alpha[i] + Ku[i] * alpha[i + 1]) \
            - c2 * (Al[i - 1] * alpha[i - 1] + Ad[i] * alpha[i] + Au[i] * alpha[i + 1])
    F[n - 1] = c1 * (Kl[n - 2] * alpha[n - 2] + Kd[n - 1] * alpha[n - 1]) \
        - c2 * (Al[n - 2] * alpha[n - 2] + Ad[n - 1] * alpha[n - 1])
    F[0] += (1.0 / h) * Bi * (b_eval(b_ts, b_vs, tau) - H * alpha[0])
    F[n - 1] -= c1 * alpha[n - 1]
    thomas_solve(Ml, Md, Mu, F, cp, bp, alpha_prime)
    return hprime


@njit(cache=True, nogil=True)
def integrate_adaptive(alpha0, h0, rec_times,
                       Ml, Md, Mu, Al, Ad, Au, Kl, Kd, Ku,
                       Bi, H, b_ts, b_vs, A0, sig_kind, sig_p0, sig_p1,
                       rel_tol, abs_tol, dt_init, max_steps,
                       rec_alpha, rec_h, rec_aprime, rec_hprime):
    """Adaptive Dormand-Prince 5(4) driver recording states at rec_times.

    Steps are clipped so that every recording time is hit exactly.  Returns
    (status, n_recorded, n_steps, min_alpha, tau_reached).
    """
    n = alpha0.size
    nrec = rec_times.size
    ka = np.zeros((7, n))
    kh = np.zeros(7)
    F = np.zeros(n)
    cp = np.zeros(n)
    bp = np.zeros(n)
    stage_a = np.zeros(n)
    cand = np.zeros(n)
    alpha = alpha0.copy()
    h = h0
    tau = rec_times[0]
    min_alpha = alpha.min()

    hp = rhs_eval(alpha, h, tau, Ml, Md, Mu, Al, Ad, Au, Kl, Kd, Ku,
                  Bi, H, b_ts, b_vs, A0, sig_kind, sig_p0, sig_p1,
                  F, cp, bp, stage_a)
    rec_alpha[0] = alpha
    rec_h[0] = h
    rec_aprime[0] = stage_a
    rec_hprime[0] = hp
    irec = 1
    dt = dt_init
    nstep = 0
    while irec < nrec:
        if nstep >= max_steps:
            return STATUS_MAX_STEPS, irec, nstep, min_alpha, tau
        target = rec_times[irec]
        clipped = tau + dt >= target
        dt_use = target - tau if clipped else dt

        ok = True
        for s in range(7):
            for i in range(n):
                acc = alpha[i]
                for j in range(s):
                    aij = DP_A[s, j]
                    if aij != 0.0:
                        acc += dt_use * aij * ka[j, i]
                stage_a[i] = acc
            ht = h
            for j in range(s):
                aij = DP_A[s, j]
                if aij != 0.0:
                    ht += dt_use * aij * kh[j]
            if not np.isfinite(ht) or ht <= 0.0:
                ok = False
                break
            kh[s] = rhs_eval(stage_a, ht, tau + DP_C[s] * dt_use,
                             Ml, Md, Mu, Al, Ad, Au, Kl, Kd, Ku,
                             Bi, H, b_ts, b_vs, A0, sig_kind, sig_p0, sig_p1,
                             F, cp, bp, ka[s])
            if not np.isfinite(kh[s]):
                ok = False
                break

        err = 1e30
        h_new = h
        if ok:
            esum = 0.0
            for i in range(n):
                acc = alpha[i]
                ei = 0.0
                for s in range(7):
                    acc += dt_use * DP_B5[s] * ka[s, i]
                    ei += DP_E[s] * ka[s, i]
                cand[i] = acc
                sc = abs_tol + rel_tol * max(abs(alpha[i]), abs(acc))
                r = dt_use * ei / sc
                esum += r * r
            eh = 0.0
            for s in range(7):
                h_new += dt_use * DP_B5[s] * kh[s]
                eh += DP_E[s] * kh[s]
            sc = abs_tol + rel_tol * max(abs(h), abs(h_new))
            r = dt_use * eh / sc
            esum += r * r
            err = np.sqrt(esum / (n + 1))
            if not np.isfinite(err) or not np.isfinite(h_new) or h_new <= 0.0:
                ok = False

        if ok and err <= 1.0 and h_new > 1.0 + 1e-10 and h < 1.0 - BREAKTHROUGH_MARGIN:
            # the step jumped past the far face; shrink it so the accepted
            # state lands on the breakthrough event instead of beyond it
            frac = (1.0 - h) / (h_new - h) * 1.000001
            if frac < 1e-6:
                frac = 1e-6
            elif frac > 0.999999:
                frac = 0.999999
            dt = dt_use * frac
            nstep += 1
            continue
        if ok and err <= 1.0:
            tau += dt_use
            for i in range(n):
                alpha[i] = cand[i]
                if cand[i] < min_alpha:
                    min_alpha = cand[i]
            h = h_new
            if h >= 1.0 - BREAKTHROUGH_MARGIN:
                hp = rhs_eval(alpha, h, tau, Ml, Md, Mu, Al, Ad, Au, Kl, Kd, Ku,
                              Bi, H, b_ts, b_vs, A0, sig_kind, sig_p0, sig_p1,
                              F, cp, bp, stage_a)
                rec_alpha[irec] = alpha
                rec_h[irec] = h
                rec_aprime[irec] = stage_a
                rec_hprime[irec] = hp
                return STATUS_BREAKTHROUGH, irec + 1, nstep + 1, min_alpha, tau
            if clipped:
                hp = rhs_eval(alpha, h, tau, Ml, Md, Mu, Al, Ad, Au, Kl, Kd, Ku,
                              Bi, H, b_ts, b_vs, A0, sig_kind, sig_p0, sig_p1,
                              F, cp, bp, stage_a)
                rec_alpha[irec] = alpha
                rec_h[irec] = h
                rec_aprime[irec] = stage_a
                rec_hprime[irec] = hp
                irec += 1
            fac = 5.0 if err < 1e-12 else min(5.0, max(0.2, 0.9 * err ** -0.2))
            if clipped:
                # do not let an artificially short clipped step shrink dt
                dt = max(dt, dt_use * fac)
            else:
                dt = dt_use * fac
        else:
            dt = dt_use * (0.2 if ok else 0.1)
            if dt < 1e-18:
                return STATUS_UNSTABLE, irec, nstep, min_alpha, tau
        nstep += 1
    return STATUS_DONE, irec, nstep, min_alpha, tau


@njit(cache=True, nogil=True)
def integrate_rk4(alpha0, h0, dt, n_steps, stride,
                  Ml, Md, Mu, Al, Ad, Au, Kl, Kd, Ku,
                  Bi, H, b_ts, b_vs, A0, sig_kind, sig_p0, sig_p1,
                  rec_alpha, rec_h, rec_aprime, rec_hprime, rec_times):
    """Fixed-step classical RK4 driver; records every `stride`-th step.

    Returns (status, n_recorded, n_steps_taken, min_alpha, tau_reached).
    """
    n = alpha0.size
    F = np.zeros(n)
    cp = np.zeros(n)
    bp = np.zeros(n)
    k1 = np.zeros(n)
    k2 = np.zeros(n)
    k3 = np.zeros(n)
    k4 = np.zeros(n)
    stage_a = np.zeros(n)
    alpha = alpha0.copy()
    h = h0
    tau = 0.0
    min_alpha = alpha.min()

    hp = rhs_eval(alpha, h, tau, Ml, Md, Mu, Al, Ad, Au, Kl, Kd, Ku,
                  Bi, H, b_ts, b_vs, A0, sig_kind, sig_p0, sig_p1,
                  F, cp, bp, k1)
    rec_times[0] = 0.0
    rec_alpha[0] = alpha
    rec_h[0] = h
    rec_aprime[0] = k1
    rec_hprime[0] = hp
    irec = 1

    for step in range(n_steps):
        hk1 = rhs_eval(alpha, h, tau, Ml, Md, Mu, Al, Ad, Au, Kl, Kd, Ku,
                       Bi, H, b_ts, b_vs, A0, sig_kind, sig_p0, sig_p1,
                       F, cp, bp, k1)
        for i in range(n):
            stage_a[i] = alpha[i] + 0.5 * dt * k1[i]
        h2 = h + 0.5 * dt * hk1
        if h2 <= 0.0 or not np.isfinite(h2):
            return STATUS_UNSTABLE, irec, step, min_alpha, tau
        hk2 = rhs_eval(stage_a, h2, tau + 0.5 * dt, Ml, Md, Mu, Al, Ad, Au,
                       Kl, Kd, Ku, Bi, H, b_ts, b_vs, A0,
                       sig_kind, sig_p0, sig_p1, F, cp, bp, k2)
        for i in range(n):
            stage_a[i] = alpha[i] + 0.5 * dt * k2[i]
        h3 = h + 0.5 * dt * hk2
        if h3 <= 0.0 or not np.isfinite(h3):
            return STATUS_UNSTABLE, irec, step, min_alpha, tau
        hk3 = rhs_eval(stage_a, h3, tau + 0.5 * dt, Ml, Md, Mu, Al, Ad, Au,
                       Kl, Kd, Ku, Bi, H, b_ts, b_vs, A0,
                       sig_kind, sig_p0, sig_p1, F, cp, bp, k3)
        for i in range(n):
            stage_a[i] = alpha[i] + dt * k3[i]
        h4 = h + dt * hk3
        if h4 <= 0.0 or not np.isfinite(h4):
            return STATUS_UNSTABLE, irec, step, min_alpha, tau
        hk4 = rhs_eval(stage_a, h4, tau + dt, Ml, Md, Mu, Al, Ad, Au,
                       Kl, Kd, Ku, Bi, H, b_ts, b_vs, A0,
                       sig_kind, sig_p0, sig_p1, F, cp, bp, k4)

        finite = True
        for i in range(n):
            alpha[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            if not np.isfinite(alpha[i]):
                finite = False
            elif alpha[i] < min_alpha:
                min_alpha = alpha[i]
        h += dt / 6.0 * (hk1 + 2.0 * hk2 + 2.0 * hk3 + hk4)
        tau = (step + 1) * dt
        if not finite or not np.isfinite(h) or h <= 0.0:
            return STATUS_UNSTABLE, irec, step + 1, min_alpha, tau

        record = (step + 1) % stride == 0 or step + 1 == n_steps
        hit_breakthrough = h >= 1.0 - BREAKTHROUGH_MARGIN
        if record or hit_breakthrough:
            hp = rhs_eval(alpha, h, tau, Ml, Md, Mu, Al, Ad, Au, Kl, Kd, Ku,
                          Bi, H, b_ts, b_vs, A0, sig_kind, sig_p0, sig_p1,
                          F, cp, bp, k1)
            rec_times[irec] = tau
            rec_alpha[irec] = alpha
            rec_h[irec] = h
            rec_aprime[irec] = k1
            rec_hprime[irec] = hp
            irec += 1
        if hit_breakthrough:
            return STATUS_BREAKTHROUGH, irec, step + 1, min_alpha, tau
    return STATUS_DONE, irec, n_steps, min_alpha, tau

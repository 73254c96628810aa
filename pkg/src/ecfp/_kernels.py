"""Compiled inner loops.

Joint strategies are handled here as zero-padded ``(n, max_m)`` float arrays;
``shape`` holds the per-player action counts. Profiles are visited in
row-major order and products are taken in ascending player order, so results
are reproducible bit for bit.
"""

import numpy as np
from numba import njit

MODE_EXACT = 0
MODE_UNIFORM_EPS = 1
MODE_MIXED_EPS = 2

STATUS_OK = 0
STATUS_NOT_ADMISSIBLE = 1
STATUS_CENTROID_DRIFT = 2
STATUS_LEFT_SIMPLEX = 3


@njit(cache=True)
def payoff_matrix(flat, shape, P):
    """Row ``i`` holds U(e_a, P_{-i}) for each action ``a`` of player ``i``."""
    n = shape.shape[0]
    out = np.zeros((n, P.shape[1]))
    idx = np.zeros(n, np.int64)
    for k in range(flat.shape[0]):
        u = flat[k]
        for i in range(n):
            w = u
            for j in range(n):
                if j != i:
                    w *= P[j, idx[j]]
            out[i, idx[i]] += w
        j = n - 1
        while j >= 0:
            idx[j] += 1
            if idx[j] < shape[j]:
                break
            idx[j] = 0
            j -= 1
    return out


@njit(cache=True)
def centroid_into(P, class_of, n_classes, out):
    n = P.shape[0]
    width = P.shape[1]
    for k in range(n_classes):
        acc = np.zeros(width)
        size = 0
        for i in range(n):
            if class_of[i] == k:
                for c in range(width):
                    acc[c] += P[i, c]
                size += 1
        for i in range(n):
            if class_of[i] == k:
                for c in range(width):
                    out[i, c] = acc[c] / size


@njit(cache=True)
def select_into(pay, shape, eps, mode, uniforms, tie_tol, out):
    """Write a joint action inside the eps-best-response set into ``out``."""
    n = shape.shape[0]
    for i in range(n):
        m = shape[i]
        best = pay[i, 0]
        for c in range(1, m):
            if pay[i, c] > best:
                best = pay[i, c]
        thr = best - eps - tie_tol
        for c in range(out.shape[1]):
            out[i, c] = 0.0
        count = 0
        for c in range(m):
            if pay[i, c] >= thr:
                count += 1
        if mode == MODE_EXACT:
            for c in range(m):
                if pay[i, c] >= thr:
                    out[i, c] = 1.0
                    break
        elif mode == MODE_UNIFORM_EPS:
            pick = int(uniforms[i] * count)
            if pick >= count:
                pick = count - 1
            seen = 0
            for c in range(m):
                if pay[i, c] >= thr:
                    if seen == pick:
                        out[i, c] = 1.0
                        break
                    seen += 1
        else:
            share = 1.0 / count
            for c in range(m):
                if pay[i, c] >= thr:
                    out[i, c] = share


@njit(cache=True)
def admissible(pay, shape, action, eps, slack):
    n = shape.shape[0]
    for i in range(n):
        m = shape[i]
        best = pay[i, 0]
        val = 0.0
        for c in range(m):
            if pay[i, c] > best:
                best = pay[i, c]
            val += action[i, c] * pay[i, c]
        if val < best - eps - slack:
            return False
    return True


@njit(cache=True)
def advance(flat, shape, class_of, n_classes, q, qbar, action, gammas, epsilons,
            uniforms, mode, centroid_belief, tie_tol, slack, drift_tol, simplex_tol,
            w_prev):
    """Run ``len(gammas)`` process steps in place on ``q``, ``qbar``, ``action``.

    Returns ``(status, steps_done, max_w_drop, w_last, max_drift)`` where
    ``w`` is U(qbar) before each step and after the last one.
    """
    n = shape.shape[0]
    width = q.shape[1]
    abar = np.empty_like(q)
    check = np.empty_like(q)
    max_drop = -np.inf
    max_drift = 0.0
    w = w_prev
    for s in range(gammas.shape[0]):
        if centroid_belief:
            belief = qbar
        else:
            belief = q
        pay = payoff_matrix(flat, shape, belief)
        if centroid_belief:
            w_now = 0.0
            for c in range(shape[0]):
                w_now += qbar[0, c] * pay[0, c]
            if not np.isnan(w):
                drop = w - w_now
                if drop > max_drop:
                    max_drop = drop
            w = w_now
        select_into(pay, shape, epsilons[s], mode, uniforms[s], tie_tol, action)
        if not admissible(pay, shape, action, epsilons[s], slack):
            return STATUS_NOT_ADMISSIBLE, s, max_drop, w, max_drift
        centroid_into(action, class_of, n_classes, abar)
        g = gammas[s]
        for i in range(n):
            for c in range(width):
                q[i, c] = q[i, c] + g * (action[i, c] - q[i, c])
                qbar[i, c] = qbar[i, c] + g * (abar[i, c] - qbar[i, c])
        centroid_into(q, class_of, n_classes, check)
        for i in range(n):
            total = 0.0
            for c in range(width):
                d = abs(check[i, c] - qbar[i, c])
                if d > max_drift:
                    max_drift = d
                if q[i, c] < -simplex_tol:
                    return STATUS_LEFT_SIMPLEX, s + 1, max_drop, w, max_drift
                total += q[i, c]
            if abs(total - 1.0) > 1e-9:
                return STATUS_LEFT_SIMPLEX, s + 1, max_drop, w, max_drift
        if max_drift > drift_tol:
            return STATUS_CENTROID_DRIFT, s + 1, max_drop, w, max_drift
    if centroid_belief:
        pay = payoff_matrix(flat, shape, qbar)
        w_now = 0.0
        for c in range(shape[0]):
            w_now += qbar[0, c] * pay[0, c]
        if not np.isnan(w):
            drop = w - w_now
            if drop > max_drop:
                max_drop = drop
        w = w_now
    return STATUS_OK, gammas.shape[0], max_drop, w, max_drift

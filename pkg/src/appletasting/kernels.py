"""Hot kernels: fused expert-game runner and exhaustive learner checks.

Each kernel exists twice: a numba ``@njit`` version and a pure-numpy
version.  ``appletasting._backend`` picks which one is exported, driven by
the ``APPLETASTING_DISABLE_NUMBA`` environment variable.  The two versions
are kept bit-compatible: the weighted-sum accumulation order is ascending
expert index in both (``np.cumsum`` on the numpy side, a plain loop on the
numba side), and both use ``np.exp2``.
"""
from __future__ import annotations

import numpy as np

from ._backend import NUMBA_ENABLED


# ---------------------------------------------------------------------------
# Fused oblivious expert game.
#
# Runs the exponential-weights threshold learner over a pre-materialized
# prediction matrix and label vector (the adversary is oblivious, as fuzzing
# adversaries are).  Semantics match experts._ExpertWeightsCore exactly.
# ---------------------------------------------------------------------------


def _expert_game_numpy(preds, labels, eta, threshold, budget):
    T, n = preds.shape
    distances = np.zeros(n, dtype=np.int64)
    budgets = np.full(n, budget, dtype=np.int64)
    live = np.ones(n, dtype=np.bool_)
    yhat = np.zeros(T, dtype=np.uint8)
    for t in range(T):
        row = preds[t]
        mask = live & (row == 1)
        p = 0
        if mask.any():
            e = budgets[mask] + eta * distances[mask]
            m = e.max()
            s = np.cumsum(np.exp2(e - m))[-1]
            if s >= threshold * np.exp2(-m):
                p = 1
        yhat[t] = p
        if p == 0:
            distances[mask] += 1
        elif labels[t] == 0:
            dead = mask & (budgets < 1)
            live &= ~dead
            budgets[mask & live] -= 1
    return yhat


def _expert_game_py(preds, labels, eta, threshold, budget):
    # same loop as the njit kernel, used as its source
    T, n = preds.shape
    distances = np.zeros(n, dtype=np.int64)
    budgets = np.full(n, budget, dtype=np.int64)
    live = np.ones(n, dtype=np.bool_)
    yhat = np.zeros(T, dtype=np.uint8)
    for t in range(T):
        m = 0.0
        any_pred = False
        for j in range(n):
            if live[j] and preds[t, j] == 1:
                e = budgets[j] + eta * distances[j]
                if (not any_pred) or e > m:
                    m = e
                any_pred = True
        p = 0
        if any_pred:
            s = 0.0
            for j in range(n):
                if live[j] and preds[t, j] == 1:
                    s += np.exp2(budgets[j] + eta * distances[j] - m)
            if s >= threshold * np.exp2(-m):
                p = 1
        yhat[t] = p
        if p == 0:
            for j in range(n):
                if live[j] and preds[t, j] == 1:
                    distances[j] += 1
        elif labels[t] == 0:
            for j in range(n):
                if live[j] and preds[t, j] == 1:
                    if budgets[j] < 1:
                        live[j] = False
                    else:
                        budgets[j] -= 1
    return yhat


# ---------------------------------------------------------------------------
# Exhaustive check of the budgeted version-space learner over every
# k-realizable labeled sequence of a given length.
#
# Returns (worst_mistakes, num_sequences).  worst_mistakes is -1 when no
# k-realizable sequence of that length exists (cannot happen for k >= 0).
# ---------------------------------------------------------------------------


def _narrow_exhaustive_py(hyp, k, length):
    H, m = hyp.shape
    worst = -1
    count = 0
    # stack frames: budgets (H,), disagreements (H,), mistakes, next choice
    budg0 = np.full(H, k, dtype=np.int64)
    dis0 = np.zeros(H, dtype=np.int64)
    stack_budg = np.zeros((length + 1, H), dtype=np.int64)
    stack_dis = np.zeros((length + 1, H), dtype=np.int64)
    stack_mist = np.zeros(length + 1, dtype=np.int64)
    stack_choice = np.zeros(length + 1, dtype=np.int64)  # x * 2 + y
    stack_budg[0] = budg0
    stack_dis[0] = dis0
    stack_mist[0] = 0
    stack_choice[0] = 0
    level = 0
    while level >= 0:
        c = stack_choice[level]
        if c >= 2 * m:
            level -= 1
            continue
        stack_choice[level] = c + 1
        x = c // 2
        y = c % 2
        # learner prediction on x at the current version space
        p = 0
        for h in range(H):
            if stack_budg[level, h] >= 0 and hyp[h, x] == 1:
                p = 1
                break
        # sequence realizability bookkeeping
        ok = False
        for h in range(H):
            d = stack_dis[level, h] + (1 if hyp[h, x] != y else 0)
            stack_dis[level + 1, h] = d
            if d <= k:
                ok = True
        if not ok:
            continue
        # version space shrinks only on revealed false positives
        for h in range(H):
            b = stack_budg[level, h]
            if p == 1 and y == 0 and b >= 0 and hyp[h, x] == 1:
                b -= 1
            stack_budg[level + 1, h] = b
        mist = stack_mist[level] + (1 if p != y else 0)
        if level + 1 == length:
            count += 1
            if mist > worst:
                worst = mist
        else:
            stack_mist[level + 1] = mist
            stack_choice[level + 1] = 0
            level += 1
    return worst, count


def _narrow_exhaustive_numpy(hyp, k, length):
    """Vectorized fallback: simulates all m**length * 2**length sequences in
    chunks of instance sequences, all label patterns at once."""
    H, m = hyp.shape
    n_lab = 2**length
    labels = ((np.arange(n_lab)[:, None] >> np.arange(length)[None, :]) & 1).astype(np.int64)
    worst = -1
    count = 0
    chunk = max(1, 2**17 // max(1, n_lab))
    total = m**length
    digits = m ** np.arange(length)
    start = 0
    while start < total:
        stop = min(total, start + chunk)
        idx = np.arange(start, stop)
        xs = (idx[:, None] // digits[None, :]) % m  # (C, length)
        C = xs.shape[0]
        B = C * n_lab
        xs_b = np.repeat(xs, n_lab, axis=0)  # (B, length)
        ys_b = np.tile(labels, (C, 1))  # (B, length)
        budg = np.full((B, H), k, dtype=np.int64)
        dis = np.zeros((B, H), dtype=np.int64)
        mist = np.zeros(B, dtype=np.int64)
        for r in range(length):
            hx = hyp[:, xs_b[:, r]].T.astype(np.int64)  # (B, H)
            y = ys_b[:, r]
            live = budg >= 0
            pred = (live & (hx == 1)).any(axis=1).astype(np.int64)
            mist += pred != y
            dec = (pred == 1)[:, None] & (y[:, None] == 0) & (hx == 1) & (budg >= 0)
            budg = np.where(dec, budg - 1, budg)
            dis += hx != y[:, None]
        keep = dis.min(axis=1) <= k
        count += int(keep.sum())
        if keep.any():
            worst = max(worst, int(mist[keep].max()))
        start = stop
    return worst, count


if NUMBA_ENABLED:
    from numba import njit

    expert_game = njit(cache=True)(_expert_game_py)
    narrow_exhaustive = njit(cache=True)(_narrow_exhaustive_py)
else:
    expert_game = _expert_game_numpy
    narrow_exhaustive = _narrow_exhaustive_numpy


def run_expert_game(preds, labels, *, eta, threshold, budget=0):
    """Run the exponential-weights learner over an oblivious experts game.

    ``preds`` is the (T, n) expert prediction matrix, ``labels`` the length-T
    true label vector.  Returns the learner's prediction sequence.
    """
    preds = np.ascontiguousarray(np.asarray(preds, dtype=np.uint8))
    labels = np.ascontiguousarray(np.asarray(labels, dtype=np.uint8))
    if preds.ndim != 2 or labels.shape != (preds.shape[0],):
        raise ValueError("preds must be (T, n) and labels (T,)")
    return expert_game(preds, labels, float(eta), float(threshold), int(budget))


def narrow_worst_mistakes(hyp, k, length):
    """Worst-case mistakes of the budgeted version-space learner over every
    k-realizable labeled sequence of exactly ``length`` rounds.

    Returns ``(worst, count)`` where ``count`` is the number of k-realizable
    sequences enumerated.  Prefixes of enumerated sequences are themselves
    k-realizable with no more mistakes, so fixed-length enumeration dominates
    all shorter lengths.
    """
    hyp = np.ascontiguousarray(np.asarray(hyp, dtype=np.uint8))
    if hyp.ndim != 2:
        raise ValueError("hyp must be (H, m)")
    worst, count = narrow_exhaustive(hyp, int(k), int(length))
    return int(worst), int(count)

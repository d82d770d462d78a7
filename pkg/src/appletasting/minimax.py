"""Exact minimax value of the apple-tasting game at tiny scale.

Computes the optimal deterministic mistake count for a finite class, a
horizon T, and a realizability budget k: the adversary presents an instance,
the learner answers 0 or 1, the adversary commits the label immediately on a
1 (and may pick it adversarially) but leaves 0-rounds open; at the horizon
the open rounds are labeled to maximize the learner's mistakes subject to
some hypothesis disagreeing with the full sequence on at most k rounds.

Instances with identical prediction columns are game-equivalent, so the
search branches over distinct columns only.  The state is the per-hypothesis
disagreement count on committed rounds (capped at k+1) plus the multiset of
deferred columns; the multiset is kept sorted because labels are shared
across hypotheses, making per-hypothesis counts insufficient.
"""
from __future__ import annotations

import copy

import numpy as np

from .classes import FiniteClass


class OracleBudgetExceeded(RuntimeError):
    """The game is too large for exact evaluation."""


_DEFAULT_BUDGET = 1_000_000


def _columns(hclass: FiniteClass) -> list[tuple[int, ...]]:
    cols = sorted({tuple(int(b) for b in hclass.rows[:, x]) for x in range(hclass.domain_size)})
    return cols


def _terminal(counts, deferred, cols, k) -> int:
    best = -1
    for h, c in enumerate(counts):
        if c > k:
            continue
        ones = sum(cols[ci][h] for ci in deferred)
        zeros = len(deferred) - ones
        val = ones + min(k - c, zeros)
        if val > best:
            best = val
    assert best >= 0, "no viable witness at terminal state"
    return best


def _check_budget(hclass: FiniteClass, T: int, k: int, budget: int) -> None:
    if k < 0 or T < 1:
        raise ValueError("need T >= 1 and k >= 0")
    cost = hclass.size * (2**hclass.domain_size) * T
    if cost > budget:
        raise OracleBudgetExceeded(
            f"|H| * 2^m * T = {cost} exceeds the oracle budget {budget}"
        )


def minimax_value(hclass: FiniteClass, T: int, k: int, *, budget: int = _DEFAULT_BUDGET) -> int:
    """Exact game value, memoized on (round, counts, deferred multiset)."""
    _check_budget(hclass, T, k, budget)
    cols = _columns(hclass)
    nh = hclass.size
    memo: dict = {}

    def value(t, counts, deferred):
        if t == T:
            return _terminal(counts, deferred, cols, k)
        key = (t, counts, deferred)
        hit = memo.get(key)
        if hit is not None:
            return hit
        best = -1
        for ci, col in enumerate(cols):
            v_show = -1
            for y in (0, 1):
                nc = tuple(
                    min(counts[h] + (1 if col[h] != y else 0), k + 1) for h in range(nh)
                )
                if min(nc) > k:
                    continue
                v = (1 if y == 0 else 0) + value(t + 1, nc, deferred)
                if v > v_show:
                    v_show = v
            v_defer = value(t + 1, counts, tuple(sorted(deferred + (ci,))))
            v_cell = min(v_show, v_defer)
            if v_cell > best:
                best = v_cell
        memo[key] = best
        return best

    return value(0, tuple([0] * nh), tuple())


def minimax_value_plain(hclass: FiniteClass, T: int, k: int, *, budget: int = _DEFAULT_BUDGET) -> int:
    """Exact game value by plain recursion, no memoization.

    Kept separate from ``minimax_value`` so the two can cross-check each
    other's state handling.
    """
    _check_budget(hclass, T, k, budget)
    cols = _columns(hclass)
    nh = hclass.size

    def value(t, counts, deferred):
        if t == T:
            return _terminal(counts, deferred, cols, k)
        best = -1
        for ci, col in enumerate(cols):
            v_show = -1
            for y in (0, 1):
                nc = tuple(
                    min(counts[h] + (1 if col[h] != y else 0), k + 1) for h in range(nh)
                )
                if min(nc) > k:
                    continue
                v = (1 if y == 0 else 0) + value(t + 1, nc, deferred)
                if v > v_show:
                    v_show = v
            v_defer = value(t + 1, counts, tuple(sorted(deferred + (ci,))))
            v_cell = min(v_show, v_defer)
            if v_cell > best:
                best = v_cell
        return best

    return value(0, tuple([0] * nh), tuple())


def worst_case_mistakes(hclass: FiniteClass, T: int, k: int, make_learner, *, budget: int = _DEFAULT_BUDGET) -> int:
    """Maximal mistakes of a concrete deterministic learner over every
    k-realizable labeled column sequence of length T.

    ``make_learner`` builds a fresh learner consuming prediction vectors (one
    bit per hypothesis).  Any specific learner's worst case is an upper bound
    witness for the minimax value: worst_case >= minimax_value.
    """
    _check_budget(hclass, T, k, budget)
    cols = [np.array(c, dtype=np.uint8) for c in _columns(hclass)]
    nh = hclass.size
    best = -1

    def rec(t, counts, learner, mistakes):
        nonlocal best
        if t == T:
            if mistakes > best:
                best = mistakes
            return
        for col in cols:
            for y in (0, 1):
                nc = tuple(
                    min(counts[h] + (1 if col[h] != y else 0), k + 1) for h in range(nh)
                )
                if min(nc) > k:
                    continue
                lr = copy.deepcopy(learner)
                p = int(lr.predict(col))
                lr.update(col, p, int(y) if p == 1 else None)
                rec(t + 1, nc, lr, mistakes + (1 if p != y else 0))

    rec(0, tuple([0] * nh), make_learner(), 0)
    return best

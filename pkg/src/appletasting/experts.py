"""Deterministic expert-advice learners for apple-tasting feedback.

All learners here consume a 0/1 prediction vector per round (one bit per
expert) and expose the ``predict``/``update`` interface used by
``game.run_game``.

The central algorithm is an exponential-weights threshold rule: each live
expert j carries a distance d_j (rounds where j predicted 1 while the learner
predicted 0) and a remaining false-positive budget b_j.  The learner predicts
1 iff the total weight sum over live experts predicting 1,

    sum_j 2^(b_j + eta * d_j),

reaches the threshold L, with ties predicting 1.  On a revealed false
positive, predicting experts with exhausted budgets are eliminated and the
survivors pay one budget unit.  The realizable variant is the special case
b_j = 0.

The sum is computed after subtracting the largest exponent so large budgets
cannot overflow, and accumulation order is ascending expert index so runs are
bit-reproducible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import game
from .kernels import run_expert_game


class ParameterError(ValueError):
    """Learning parameters outside the documented preconditions."""


class _ExpertWeightsCore:
    """Shared state machine for the weighted threshold learners."""

    mode = "budgeted"

    def __init__(self, n: int, *, eta: float, threshold: float, budget: int = 0):
        if n < 1:
            raise ParameterError("need at least one expert")
        if not eta > 0:
            raise ParameterError("eta must be positive")
        if not threshold > 1:
            raise ParameterError("threshold must exceed 1")
        if budget < 0:
            raise ParameterError("budget must be >= 0")
        self.n = int(n)
        self.eta = float(eta)
        self.threshold = float(threshold)
        self.budget = int(budget)
        self.distances = np.zeros(self.n, dtype=np.int64)
        self.budgets = np.full(self.n, self.budget, dtype=np.int64)
        self.live = np.ones(self.n, dtype=np.bool_)

    @property
    def version_space(self) -> np.ndarray:
        return np.flatnonzero(self.live)

    def _check(self, preds) -> np.ndarray:
        preds = np.asarray(preds)
        if preds.shape != (self.n,):
            raise ValueError(f"expected {self.n} expert predictions, got shape {preds.shape}")
        return preds

    def predict(self, preds) -> int:
        preds = self._check(preds)
        mask = self.live & (preds == 1)
        if not mask.any():
            return 0
        e = self.budgets[mask] + self.eta * self.distances[mask]
        m = e.max()
        s = np.cumsum(np.exp2(e - m))[-1]
        return 1 if s >= self.threshold * np.exp2(-m) else 0

    def update(self, preds, yhat: int, y=None):
        preds = self._check(preds)
        if yhat == 1 and y is None:
            raise game.ProtocolError("label required when prediction was 1")
        if yhat == 0 and y is not None:
            raise game.ProtocolError("no label may be passed when prediction was 0")
        mask = self.live & (preds == 1)
        if yhat == 0:
            self.distances[mask] += 1
        elif y == 0:
            dead = mask & (self.budgets < 1)
            self.live &= ~dead
            self.budgets[mask & self.live] -= 1
        # yhat == 1, y == 1: no change


class RealizableExpertWeights(_ExpertWeightsCore):
    """Eliminates every expert caught on a false positive (budgets all zero)."""

    mode = "realizable"

    def __init__(self, n: int, *, eta: float, threshold: float):
        super().__init__(n, eta=eta, threshold=threshold, budget=0)


class BudgetedExpertWeights(_ExpertWeightsCore):
    """Grants each expert a false-positive budget before elimination."""


def realizable_expert_weights(n: int, T: int) -> RealizableExpertWeights:
    """Realizable learner with eta = sqrt(log2(n)/T) and threshold n.

    Requires 0 < eta < 1, i.e. log2(n) < T.
    """
    if n < 2 or T < 2:
        raise ParameterError("need n >= 2 and T >= 2")
    eta = math.sqrt(math.log2(n) / T)
    if not 0 < eta < 1:
        raise ParameterError(f"eta={eta:.4g} outside (0, 1); horizon too short for n={n}")
    return RealizableExpertWeights(n, eta=eta, threshold=float(n))


def budgeted_expert_weights(n: int, T: int, k: int) -> BudgetedExpertWeights:
    """Budgeted learner with eta = sqrt((k + log2(n))/T), threshold n * 2^(k+1).

    Requires 0 < eta < 1, i.e. k + log2(n) < T.
    """
    if n < 2 or T < 2:
        raise ParameterError("need n >= 2 and T >= 2")
    if k < 0:
        raise ParameterError("k must be >= 0")
    eta = math.sqrt((k + math.log2(n)) / T)
    if not 0 < eta < 1:
        raise ParameterError(f"eta={eta:.4g} outside (0, 1); horizon too short for n={n}, k={k}")
    return BudgetedExpertWeights(n, eta=eta, threshold=n * 2.0 ** (k + 1), budget=k)


class GreedyEliminationExperts:
    """Baseline: predict 1 whenever any live expert predicts 1.

    Predicting experts caught on a false positive pay budget and are
    eliminated once out of budget.
    """

    mode = "greedy"

    def __init__(self, n: int, budget: int = 0):
        if n < 1:
            raise ParameterError("need at least one expert")
        self.n = int(n)
        self.budgets = np.full(self.n, int(budget), dtype=np.int64)
        self.live = np.ones(self.n, dtype=np.bool_)

    def predict(self, preds) -> int:
        preds = np.asarray(preds)
        return 1 if (self.live & (preds == 1)).any() else 0

    def update(self, preds, yhat: int, y=None):
        preds = np.asarray(preds)
        if yhat == 1 and y == 0:
            mask = self.live & (preds == 1)
            dead = mask & (self.budgets < 1)
            self.live &= ~dead
            self.budgets[mask & self.live] -= 1


class DoublingExpertWeights:
    """Horizon- and realizability-free wrapper around the budgeted learner.

    Maintains guess multipliers g_k and g_T, encoding the guesses
    k = g_k * log2(n) and T = g_T * log2(n).  An epoch restarts when its
    round count exceeds the T guess (doubling g_T) or when every expert has
    made more than k false positives within the epoch (doubling g_k); both
    triggers firing together double both.  A restart wipes the inner learner:
    all n experts return, distances and budgets reset.

    The inner learner runs with the guess-derived parameters; its eta can
    exceed 1 in early epochs, which only affects the guarantees, not the
    mechanics.  Inner budgets are floor(k): an expert exceeds the real-valued
    k guess exactly when it overruns that integer budget.
    """

    mode = "doubling"

    def __init__(self, n: int):
        if n < 2:
            raise ParameterError("need n >= 2")
        self.n = int(n)
        self.log2n = math.log2(n)
        self.g_k = 1.0
        self.g_T = 1.0
        self.restart_round = 0  # T_0
        self.t = 0
        self.epoch_false_positives = np.zeros(self.n, dtype=np.int64)
        self.restarts = 0
        self._fresh_inner()

    @property
    def k_guess(self) -> float:
        return self.g_k * self.log2n

    @property
    def T_guess(self) -> float:
        return self.g_T * self.log2n

    def _fresh_inner(self):
        k = self.k_guess
        T = self.T_guess
        eta = math.sqrt((k + self.log2n) / T)
        threshold = self.n * 2.0 ** (k + 1)
        self.inner = _ExpertWeightsCore(
            self.n, eta=eta, threshold=threshold, budget=int(math.floor(k))
        )

    def _maybe_restart(self):
        t_trigger = (self.t - self.restart_round) > self.T_guess
        k_trigger = bool((self.epoch_false_positives > self.k_guess).all())
        if not (t_trigger or k_trigger):
            return
        if t_trigger:
            self.g_T *= 2.0
        if k_trigger:
            self.g_k *= 2.0
        self.restart_round = self.t
        self.epoch_false_positives[:] = 0
        self.restarts += 1
        self._fresh_inner()

    def predict(self, preds) -> int:
        self.t += 1
        self._maybe_restart()
        return self.inner.predict(preds)

    def update(self, preds, yhat: int, y=None):
        if yhat == 1 and y == 0:
            self.epoch_false_positives += np.asarray(preds) == 1
        self.inner.update(preds, yhat, y)


def doubling_expert_weights(n: int) -> DoublingExpertWeights:
    return DoublingExpertWeights(n)


# ---------------------------------------------------------------------------
# Oblivious fast path.
# ---------------------------------------------------------------------------


def run_oblivious(
    preds, labels, *, eta: float, threshold: float, budget: int = 0, realizability_k: int = 0, witness=None
) -> game.Transcript:
    """Run the weighted learner over a pre-materialized experts game.

    Equivalent to driving ``_ExpertWeightsCore`` through ``game.run_game``
    against an oblivious adversary, but executed by the fused kernel.
    """
    preds = np.asarray(preds, dtype=np.uint8)
    labels = np.asarray(labels, dtype=np.uint8)
    yhat = run_expert_game(preds, labels, eta=eta, threshold=threshold, budget=budget)
    cert = None
    if witness is not None:
        cert = game.Certificate(witness=int(witness), predictions=preds[:, int(witness)].copy())
    return game.Transcript(
        kind=game.EXPERTS,
        instances=preds,
        predictions=yhat,
        labels=labels.astype(np.int8),
        realizability_k=int(realizability_k),
        certificate=cert,
    )


# ---------------------------------------------------------------------------
# Diagnostics: replayed weighted-gain accounting.
# ---------------------------------------------------------------------------


@dataclass
class DiagnosticsLedger:
    """Weighted-gain totals and exit-distance buckets recomputed by replay.

    ``total_weighted_gain`` sums 2^(eta*d) over live experts predicting 1 on
    learner-0 rounds; ``total_budget_weighted_gain`` uses 2^(b + eta*d).
    ``exit_distances[j]`` is expert j's distance when it left the version
    space (its final distance if it never left).  ``level_distances[j, l]``
    is the distance at expert j's (l+1)-th false positive, again defaulting
    to the final distance for false positives that never happened.
    """

    eta: float
    threshold: float
    budget: int
    total_weighted_gain: float
    total_budget_weighted_gain: float
    exit_distances: np.ndarray
    level_distances: np.ndarray  # (n, budget + 1)

    def _bucket(self, d):
        return int(math.floor(self.eta * d))

    def exit_bucket_counts(self) -> dict:
        out: dict[int, int] = {}
        for d in self.exit_distances:
            b = self._bucket(int(d))
            out[b] = out.get(b, 0) + 1
        return out

    def level_bucket_counts(self) -> dict:
        out: dict[tuple[int, int], int] = {}
        n, levels = self.level_distances.shape
        for lev in range(levels):
            for j in range(n):
                b = self._bucket(int(self.level_distances[j, lev]))
                out[(lev, b)] = out.get((lev, b), 0) + 1
        return out

    def weighted_bucket_sum(self) -> float:
        """sum_d n_d * 2^d over exit-distance buckets."""
        return float(sum(c * 2.0**d for d, c in self.exit_bucket_counts().items()))

    def budget_weighted_bucket_sum(self) -> float:
        """sum_{l,d} n_d^(l) * 2^(k - l + d) over per-level buckets."""
        k = self.budget
        return float(
            sum(c * 2.0 ** (k - lev + d) for (lev, d), c in self.level_bucket_counts().items())
        )


def diagnostics(transcript: game.Transcript, *, n: int, eta: float, threshold: float, budget: int = 0) -> DiagnosticsLedger:
    """Recompute the weighted-gain ledger of a finished experts transcript.

    Replays the learner state round by round; fails if the transcript was not
    produced by a weighted learner with the given parameters (the replayed
    predictions must match).
    """
    if transcript.kind != game.EXPERTS:
        raise ValueError("diagnostics require an experts transcript")
    preds = transcript.instances
    if preds.shape[1] != n:
        raise ValueError("transcript expert count does not match parameters")
    core = _ExpertWeightsCore(n, eta=eta, threshold=threshold, budget=budget)
    twg = 0.0
    tbwg = 0.0
    exit_d = np.full(n, -1, dtype=np.int64)
    level_d = np.full((n, budget + 1), -1, dtype=np.int64)
    T = transcript.horizon
    for t in range(T):
        row = preds[t]
        p = core.predict(row)
        if p != int(transcript.predictions[t]):
            raise ValueError(f"replay diverged on round {t + 1}; parameters do not match transcript")
        mask = core.live & (row == 1)
        if p == 0:
            if mask.any():
                e = core.budgets[mask] + eta * core.distances[mask].astype(np.float64)
                tbwg += float(np.exp2(e).sum())
                twg += float(np.exp2(eta * core.distances[mask].astype(np.float64)).sum())
            core.update(row, 0, None)
        else:
            y = int(transcript.labels[t])
            if y == 0:
                for j in np.flatnonzero(mask):
                    level = budget - int(core.budgets[j])
                    level_d[j, level] = core.distances[j]
                    if core.budgets[j] < 1:
                        exit_d[j] = core.distances[j]
            core.update(row, 1, y)
    final = core.distances
    exit_d[exit_d < 0] = final[exit_d < 0]
    for lev in range(budget + 1):
        missing = level_d[:, lev] < 0
        level_d[missing, lev] = final[missing]
    return DiagnosticsLedger(
        eta=eta,
        threshold=threshold,
        budget=budget,
        total_weighted_gain=twg,
        total_budget_weighted_gain=tbwg,
        exit_distances=exit_d,
        level_distances=level_d,
    )

"""Hypothesis-class learners: budgeted version space, covers, doubling wrappers.

The narrow learner keeps a budgeted version space and predicts 1 exactly when
some in-budget hypothesis predicts 1, restricting the space on every revealed
label.  Its guarantee is tied to width-1 classes, but it accepts any class.

Hard classes reduce to the expert learners through a covering expert set:
either one simulator per hypothesis (whenever the class is small) or the
deviation-set construction, where each expert plays the standard optimal
algorithm but flips its prediction on a fixed set of at most L(H) rounds,
feeding its own emitted label back into its version space.
"""
from __future__ import annotations

import itertools
import math
from math import comb

import numpy as np

from . import game
from .classes import BudgetedClass, FiniteClass, _RestrictedClass
from .dimensions import littlestone_dim
from .experts import ParameterError, _ExpertWeightsCore


class CoverBudgetExceeded(RuntimeError):
    """The cover would be too large to materialize."""


class NarrowVersionSpaceLearner:
    """Budgeted version-space learner for apple-tasting feedback.

    Starts from the uniform-budget class (budget k per hypothesis); predicts
    1 iff some surviving hypothesis predicts 1 on the instance.  The version
    space shrinks only on revealed false positives (prediction 1, label 0),
    charging the predicting hypotheses one budget unit and dropping the
    exhausted ones: the surviving set is always exactly the hypotheses with
    at most k observed false positives.  Revealed true positives leave the
    space unchanged; restricting on them would evict a hypothesis whose
    budgeted disagreements are false negatives and forfeit the mistake
    bound (a k-consistent witness must survive for the false-negative count
    to stay at k).
    """

    mode = "narrow"

    def __init__(self, hclass: FiniteClass, k: int):
        if k < 0:
            raise ParameterError("k must be >= 0")
        self.base = hclass
        self.k = int(k)
        self.space = BudgetedClass.from_class(hclass, k)

    def predict(self, x) -> int:
        col = self.space.column(int(x))
        return 1 if (col == 1).any() else 0

    def update(self, x, yhat: int, y=None):
        if yhat == 1 and y is None:
            raise game.ProtocolError("label required when prediction was 1")
        if yhat == 0 and y is not None:
            raise game.ProtocolError("no label may be passed when prediction was 0")
        if yhat == 1 and y == 0:
            self.space = self.space.restrict(int(x), 0)


def narrow_learner(hclass: FiniteClass, k: int) -> NarrowVersionSpaceLearner:
    return NarrowVersionSpaceLearner(hclass, k)


_SOA_MEMO: dict[tuple, int] = {}


def _as_class(rows: np.ndarray) -> FiniteClass:
    labels = tuple(f"x{i}" for i in range(rows.shape[1]))
    return _RestrictedClass(rows, labels)


def _ldim_cached(rows: np.ndarray) -> int:
    key = (rows.shape, rows.tobytes())
    hit = _SOA_MEMO.get(key)
    if hit is None:
        hit = littlestone_dim(_as_class(rows))
        _SOA_MEMO[key] = hit
    return hit


def soa_predict(version: FiniteClass, x: int) -> int:
    """Standard optimal algorithm step: predict the label whose restriction
    keeps the larger Littlestone dimension, ties to 1.

    The caller owns the version-space update with whatever label it treats as
    the truth.
    """
    if version.size == 0:
        raise ValueError("empty version space")
    ones = version.restrict(x, 1)
    zeros = version.restrict(x, 0)
    if ones.size == 0:
        return 0
    if zeros.size == 0:
        return 1
    return 1 if _ldim_cached(ones.rows) >= _ldim_cached(zeros.rows) else 0


class _DeviationExpert:
    """Plays SOA on a private version space, flipping on its deviation rounds
    and updating with the emitted label as if it were the truth."""

    __slots__ = ("rows", "labels_width", "deviations", "t")

    def __init__(self, base: FiniteClass, deviations: frozenset[int]):
        self.rows = base.rows
        self.labels_width = base.domain_size
        self.deviations = deviations
        self.t = 0

    def step(self, x: int) -> int:
        self.t += 1
        if self.rows.shape[0] == 0:
            return 0
        p = soa_predict(_as_class(self.rows), x)
        if self.t - 1 in self.deviations:
            p = 1 - p
        self.rows = self.rows[self.rows[:, x] == p]
        return p


class CoverExperts:
    """An expert set covering a class on every instance sequence up to a horizon.

    ``kind`` is "hypotheses" (one simulator per hypothesis) or "deviations"
    (SOA with flip sets of size at most L(H), enumerated lexicographically by
    size then content).  Experts are materialized lazily per game: ``start``
    returns a runtime whose ``step(x)`` advances every expert one round and
    returns the prediction vector.
    """

    def __init__(self, base: FiniteClass, horizon: int, kind: str, deviation_sets=None):
        self.base = base
        self.horizon = int(horizon)
        self.kind = kind
        self.deviation_sets = deviation_sets

    @property
    def size(self) -> int:
        if self.kind == "hypotheses":
            return self.base.size
        return len(self.deviation_sets)

    def start(self) -> "_CoverRuntime":
        return _CoverRuntime(self)


class _CoverRuntime:
    def __init__(self, cover: CoverExperts):
        self.cover = cover
        if cover.kind == "deviations":
            self.experts = [_DeviationExpert(cover.base, s) for s in cover.deviation_sets]

    def step(self, x: int) -> np.ndarray:
        c = self.cover
        if c.kind == "hypotheses":
            return c.base.rows[:, int(x)].copy()
        return np.array([e.step(int(x)) for e in self.experts], dtype=np.uint8)


def build_cover(hclass: FiniteClass, T: int, *, budget: int = 2_000_000, ldim_budget: int = 50_000) -> CoverExperts:
    """Covering expert set for the class over sequences of length at most T.

    Uses whichever construction is smaller: the per-hypothesis simulators
    (size |H|) or the deviation-set construction (size sum_{i<=L} C(T, i)).
    Classes too large for the exact dimension search fall back to the
    per-hypothesis cover, which always covers.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    size, m = hclass.size, hclass.domain_size
    # Sauer-style lower bound on the dimension: |H| <= sum_{i<=L} C(m, i).
    # When even that many deviation sets cannot undercut |H|, the
    # per-hypothesis cover wins without any dimension search.
    l_lower, acc = 0, 1
    while acc < size:
        l_lower += 1
        acc += comb(m, l_lower)
    if sum(comb(T, i) for i in range(l_lower + 1)) >= size:
        if size * T > budget:
            raise CoverBudgetExceeded(f"cover of {size} experts over {T} rounds exceeds budget")
        return CoverExperts(hclass, T, "hypotheses")
    try:
        from .dimensions import SearchBudgetExceeded

        L = littlestone_dim(hclass, node_budget=ldim_budget)
    except SearchBudgetExceeded:
        return CoverExperts(hclass, T, "hypotheses")
    n_dev = sum(comb(T, i) for i in range(L + 1))
    n = min(n_dev, hclass.size)
    if n * T > budget:
        raise CoverBudgetExceeded(f"cover of {n} experts over {T} rounds exceeds budget")
    if hclass.size <= n_dev:
        return CoverExperts(hclass, T, "hypotheses")
    sets = [
        frozenset(s)
        for i in range(L + 1)
        for s in itertools.combinations(range(T), i)
    ]
    return CoverExperts(hclass, T, "deviations", deviation_sets=sets)


class ReductionLearner:
    """Runs the budgeted expert learner over a covering expert set.

    Cover experts advance lazily: each round's prediction vector is computed
    on demand and cached between predict and update.  A singleton cover is
    followed verbatim.
    """

    mode = "reduction"

    def __init__(self, hclass: FiniteClass, T: int, k: int, *, cover: CoverExperts | None = None, cover_budget: int = 2_000_000):
        if T < 2:
            raise ParameterError("T must be >= 2")
        if k < 0:
            raise ParameterError("k must be >= 0")
        self.base = hclass
        self.cover = cover if cover is not None else build_cover(hclass, T, budget=cover_budget)
        self.runtime = self.cover.start()
        n = self.cover.size
        self.horizon = int(T)
        self.k = int(k)
        if n == 1:
            self.inner = None
            self.eta = None
        else:
            eta = math.sqrt((k + math.log2(n)) / T)
            self.eta = eta
            self.inner = _ExpertWeightsCore(n, eta=eta, threshold=n * 2.0 ** (k + 1), budget=k)
        self._cached = None

    @property
    def theorem_eta_valid(self) -> bool:
        return self.eta is not None and 0 < self.eta < 1

    def _preds(self, x) -> np.ndarray:
        if self._cached is None or self._cached[0] != int(x):
            self._cached = (int(x), self.runtime.step(int(x)))
        return self._cached[1]

    def predict(self, x) -> int:
        preds = self._preds(x)
        if self.inner is None:
            return int(preds[0])
        return self.inner.predict(preds)

    def update(self, x, yhat: int, y=None):
        preds = self._preds(x)
        self._cached = None
        if self.inner is not None:
            self.inner.update(preds, yhat, y)


def reduction_learner(hclass: FiniteClass, T: int, k: int, **kw) -> ReductionLearner:
    return ReductionLearner(hclass, T, k, **kw)


class DoublingNarrowLearner:
    """Realizability-free narrow learner: guesses k, doubling on emptiness.

    Starts at k = 1; whenever the version space empties, the guess doubles
    and the version space reinitializes to the uniform-budget class at the
    new guess.
    """

    mode = "doubling_narrow"

    def __init__(self, hclass: FiniteClass):
        self.base = hclass
        self.k_guess = 1
        self.doublings = 0
        self.inner = NarrowVersionSpaceLearner(hclass, self.k_guess)

    def predict(self, x) -> int:
        return self.inner.predict(x)

    def update(self, x, yhat: int, y=None):
        self.inner.update(x, yhat, y)
        if self.inner.space.size == 0:
            self.k_guess *= 2
            self.doublings += 1
            self.inner = NarrowVersionSpaceLearner(self.base, self.k_guess)


class DoublingReductionLearner:
    """Horizon- and realizability-free reduction learner.

    Maintains guess multipliers exactly like the doubling expert learner, but
    every restart rebuilds the cover for the doubled horizon guess, enlarging
    the expert set along with it.
    """

    mode = "doubling_reduction"

    def __init__(self, hclass: FiniteClass, *, cover_budget: int = 2_000_000):
        self.base = hclass
        self.cover_budget = cover_budget
        self.g_T = 1.0
        self.g_k = 1.0
        self.t = 0
        self.restart_round = 0
        self.epoch_cover_sizes: list[int] = []
        self._start_epoch(prev_cover_size=max(2, hclass.size))

    def _start_epoch(self, prev_cover_size: int):
        lam = math.log2(max(2, prev_cover_size))
        self.T_guess = max(2, math.ceil(self.g_T * lam))
        self.cover = build_cover(self.base, self.T_guess, budget=self.cover_budget)
        self.runtime = self.cover.start()
        n = max(2, self.cover.size)
        self.k_guess = self.g_k * math.log2(n)
        eta = math.sqrt((self.k_guess + math.log2(n)) / self.T_guess)
        if self.cover.size == 1:
            self.inner = None
        else:
            self.inner = _ExpertWeightsCore(
                self.cover.size,
                eta=eta,
                threshold=n * 2.0 ** (self.k_guess + 1),
                budget=int(math.floor(self.k_guess)),
            )
        self.epoch_fp = np.zeros(self.cover.size, dtype=np.int64)
        self.epoch_cover_sizes.append(self.cover.size)
        self._cached = None

    def _maybe_restart(self):
        t_trigger = (self.t - self.restart_round) > self.T_guess
        k_trigger = bool((self.epoch_fp > self.k_guess).all()) and self.inner is not None
        if not (t_trigger or k_trigger):
            return
        if t_trigger:
            self.g_T *= 2.0
        if k_trigger:
            self.g_k *= 2.0
        self.restart_round = self.t
        self._start_epoch(prev_cover_size=self.cover.size)

    def _preds(self, x) -> np.ndarray:
        if self._cached is None or self._cached[0] != int(x):
            self._cached = (int(x), self.runtime.step(int(x)))
        return self._cached[1]

    def predict(self, x) -> int:
        self.t += 1
        self._maybe_restart()
        preds = self._preds(x)
        if self.inner is None:
            return int(preds[0])
        return self.inner.predict(preds)

    def update(self, x, yhat: int, y=None):
        preds = self._preds(x)
        self._cached = None
        if yhat == 1 and y == 0:
            self.epoch_fp += preds == 1
        if self.inner is not None:
            self.inner.update(preds, yhat, y)

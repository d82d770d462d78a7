"""Lower-bound adversary strategies, fuzzing adversaries, random-class sampling.

Every adversary here finalizes to a k-realizable label sequence and certifies
it by naming a witness (expert or hypothesis) together with the witness's
per-round predictions, so ``game.verify_certificate`` needs no access to the
strategy internals.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import game
from .classes import BudgetedClass, FiniteClass
from .dimensions import TreeLeaf, is_shattered, tree_depth, validate_width_tree
from .experts import ParameterError


class AdversaryError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Realizable phase adversary for the experts game.
# ---------------------------------------------------------------------------


class PhaseExpertsAdversary:
    """Block-rotation adversary forcing mistakes in the realizable game.

    Splits the surviving experts into near-equal blocks and lets one block
    predict 1 per round, rotating while the learner predicts 0.  A learner 1
    is answered 0, the active block is eliminated, and the survivors are
    re-split; once fewer survivors than blocks remain, the adversary emits
    all-zero prediction rounds with label 0.  Deferred labels are committed
    by the lowest-index surviving expert at the end.

    The block count is ceil(sqrt(T / log2(n))), clamped to at least 2 so a
    consistent expert always survives (the clamp only binds outside the
    T <= n <= 2^(T/2) regime the forcing guarantee lives in).
    """

    kind = game.EXPERTS
    realizability_k = 0

    def __init__(self, n: int, T: int):
        if n < 2:
            raise ParameterError("need n >= 2")
        if T < 1:
            raise ParameterError("need T >= 1")
        self.n_experts = int(n)
        self.T = int(T)
        self.block_count = max(2, math.ceil(math.sqrt(T / math.log2(n))))
        self.start(T)

    def start(self, T: int):
        if int(T) != self.T:
            raise ValueError(f"adversary was built for T={self.T}")
        self.survivors = np.arange(self.n_experts)
        self.blocks = np.array_split(self.survivors, self.block_count)
        self.rotation = 0
        self.rows: list[np.ndarray] = []
        self.deferred: list[int] = []
        self.phases = 0
        self._active: Optional[np.ndarray] = None

    @property
    def in_tail(self) -> bool:
        return len(self.survivors) < self.block_count

    def instance(self, t: int) -> np.ndarray:
        row = np.zeros(self.n_experts, dtype=np.uint8)
        if not self.in_tail:
            self._active = self.blocks[self.rotation]
            row[self._active] = 1
        else:
            self._active = None
        self.rows.append(row)
        return row

    def label(self, t: int, yhat: int):
        if self._active is None:
            return 0  # tail round: all-zero predictions, label 0
        if yhat == 0:
            self.deferred.append(t)
            self.rotation = (self.rotation + 1) % self.block_count
            return None
        # phase ends: eliminate the active block
        self.phases += 1
        keep = ~np.isin(self.survivors, self._active)
        self.survivors = self.survivors[keep]
        if not self.in_tail:
            self.blocks = np.array_split(self.survivors, self.block_count)
        self.rotation = 0
        return 0

    def finalize(self):
        if len(self.survivors) == 0:  # pragma: no cover - clamp prevents this
            raise AdversaryError("no consistent expert survived")
        witness = int(self.survivors[0])
        rows = np.stack(self.rows) if self.rows else np.zeros((0, self.n_experts), np.uint8)
        committed = {t: int(rows[t - 1, witness]) for t in self.deferred}
        return committed, game.Certificate(witness=witness, predictions=rows[:, witness].copy())


# ---------------------------------------------------------------------------
# Agnostic phase adversary.
# ---------------------------------------------------------------------------


class AgnosticPhaseExpertsAdversary:
    """Single-expert phases forcing mistakes against k-realizable inputs.

    floor(sqrt(T/k)) phases of floor(sqrt(T*k)) rounds; in phase i only
    expert i predicts 1.  Learner 1s are answered 0.  If some phase saw fewer
    than k learner 1s, that phase's deferred rounds are labeled 1 and its
    expert certifies; otherwise every deferred round is labeled 0 and an
    expert that never predicted 1 certifies.  Rounds past the phase schedule
    are all-zero predictions with label 0.
    """

    kind = game.EXPERTS

    def __init__(self, n: int, T: int, k: int):
        if k == 0:
            raise ParameterError("k must be >= 1; use the realizable phase adversary")
        if not 1 <= k <= T <= n:
            raise ParameterError("need 1 <= k <= T <= n")
        self.n_experts = int(n)
        self.T = int(T)
        self.realizability_k = int(k)
        self.phase_count = int(math.floor(math.sqrt(T / k)))
        self.phase_len = int(math.floor(math.sqrt(T * k)))
        if self.phase_count + 1 > n:  # pragma: no cover - excluded by T <= n
            raise ParameterError("not enough experts for the phase schedule")
        self.start(T)

    def start(self, T: int):
        if int(T) != self.T:
            raise ValueError(f"adversary was built for T={self.T}")
        self.ones_per_phase = np.zeros(self.phase_count, dtype=np.int64)
        self.deferred: list[int] = []
        self.rows: list[np.ndarray] = []

    def _phase_of(self, t: int) -> Optional[int]:
        i = (t - 1) // self.phase_len
        return i if i < self.phase_count else None

    def instance(self, t: int) -> np.ndarray:
        row = np.zeros(self.n_experts, dtype=np.uint8)
        ph = self._phase_of(t)
        if ph is not None:
            row[ph] = 1
        self.rows.append(row)
        return row

    def label(self, t: int, yhat: int):
        ph = self._phase_of(t)
        if ph is None:
            return 0
        if yhat == 1:
            self.ones_per_phase[ph] += 1
            return 0
        self.deferred.append(t)
        return None

    def finalize(self):
        k = self.realizability_k
        quiet = np.flatnonzero(self.ones_per_phase < k)
        rows = np.stack(self.rows) if self.rows else np.zeros((0, self.n_experts), np.uint8)
        if quiet.size > 0:
            phase = int(quiet[0])
            witness = phase  # expert index equals phase index
            lo, hi = phase * self.phase_len + 1, (phase + 1) * self.phase_len
            committed = {t: (1 if lo <= t <= hi else 0) for t in self.deferred}
        else:
            witness = self.phase_count  # an expert that never predicted 1
            committed = {t: 0 for t in self.deferred}
        preds = rows[:, witness].copy()
        return committed, game.Certificate(witness=witness, predictions=preds)


# ---------------------------------------------------------------------------
# Width-1 repetition adversary for hypothesis classes.
# ---------------------------------------------------------------------------


class Width1RepeatAdversary:
    """Replays each left-spine instance of a shattered width-1 tree D(k+1)
    times, answering 0 to every learner 1.

    If some instance drew fewer than k+1 learner 1s, the labels commit along
    that instance's right-branch realizer; otherwise along the all-left
    realizer.  Filler rounds after the schedule repeat the first spine
    instance with the witness's label.
    """

    kind = game.INSTANCES

    def __init__(self, hclass: FiniteClass, tree, k: int, D: int):
        if k < 0 or D < 1:
            raise ParameterError("need k >= 0 and D >= 1")
        if not validate_width_tree(tree, 1):
            raise AdversaryError("tree is not a width-1 tree")
        if tree_depth(tree) < D:
            raise AdversaryError(f"tree depth {tree_depth(tree)} below D={D}")
        if not is_shattered(tree, BudgetedClass.from_class(hclass, 0)):
            raise AdversaryError("tree is not shattered by the class")
        self.hclass = hclass
        self.domain_size = hclass.domain_size
        self.realizability_k = int(k)
        self.D = int(D)
        spine = []
        node = tree
        while not isinstance(node, TreeLeaf) and len(spine) < D:
            spine.append(int(node.instance))
            node = node.left
        if len(spine) < D:  # pragma: no cover - tree_depth check above
            raise AdversaryError("left spine shorter than D")
        self.spine = spine
        self.reps = self.D * (k + 1)

    def start(self, T: int):
        if self.D * self.reps > T:
            raise AdversaryError(f"need T >= D^2 (k+1) = {self.D * self.reps}, got {T}")
        self.T = int(T)
        self.ones_current = 0
        self.block_index = 0
        self.pos_in_block = 0
        self.stopped = False
        self.witness_row: Optional[np.ndarray] = None
        self.deferred: list[int] = []
        self.instances: list[int] = []

    def _realizer_for_stop(self, i: int) -> tuple[np.ndarray, int]:
        """First hypothesis realizing the branch left^i then right at spine[i]."""
        rows = self.hclass.rows
        ok = np.ones(rows.shape[0], dtype=bool)
        for j in range(i):
            ok &= rows[:, self.spine[j]] == 0
        ok &= rows[:, self.spine[i]] == 1
        idx = np.flatnonzero(ok)
        if idx.size == 0:  # pragma: no cover - contradicts shattering
            raise AdversaryError("no realizer for the stopping branch")
        return rows[idx[0]], int(idx[0])

    def _all_left_realizer(self) -> tuple[np.ndarray, int]:
        rows = self.hclass.rows
        ok = np.ones(rows.shape[0], dtype=bool)
        for j in range(self.D):
            ok &= rows[:, self.spine[j]] == 0
        idx = np.flatnonzero(ok)
        if idx.size == 0:  # pragma: no cover - contradicts shattering
            raise AdversaryError("no all-left realizer")
        return rows[idx[0]], int(idx[0])

    def instance(self, t: int) -> int:
        if self.stopped or self.block_index >= self.D:
            x = self.spine[0]
        else:
            x = self.spine[self.block_index]
        self.instances.append(x)
        return x

    def label(self, t: int, yhat: int):
        if self.stopped or self.block_index >= self.D:
            x = self.instances[-1]
            return int(self.witness_row[x])
        if yhat == 1:
            self.ones_current += 1
            out = 0
        else:
            self.deferred.append(t)
            out = None
        self.pos_in_block += 1
        if self.pos_in_block == self.reps:
            if self.ones_current < self.realizability_k + 1:
                self.stopped = True
                self.witness_row, self.witness = self._realizer_for_stop(self.block_index)
            else:
                self.block_index += 1
                self.pos_in_block = 0
                self.ones_current = 0
                if self.block_index >= self.D:
                    self.witness_row, self.witness = self._all_left_realizer()
        return out

    def finalize(self):
        if self.witness_row is None:
            # game ended mid-schedule; the all-left realizer is always safe
            self.witness_row, self.witness = self._all_left_realizer()
        committed = {t: int(self.witness_row[self.instances[t - 1]]) for t in self.deferred}
        preds = np.array([self.witness_row[x] for x in self.instances], dtype=np.uint8)
        return committed, game.Certificate(witness=self.witness, predictions=preds)


# ---------------------------------------------------------------------------
# Version-space adversary for sampled classes.
# ---------------------------------------------------------------------------


class VersionSpaceAdversary:
    """Presents the domain in order; answers 0 to learner 1s while the
    consistent version space stays at or above a threshold, then locks the
    first surviving hypothesis and follows it."""

    kind = game.INSTANCES
    realizability_k = 0

    def __init__(self, hclass: FiniteClass, threshold: int):
        if threshold < 1:
            raise ParameterError("threshold must be >= 1")
        self.hclass = hclass
        self.domain_size = hclass.domain_size
        self.threshold = int(threshold)

    def start(self, T: int):
        if T > self.domain_size:
            raise AdversaryError(f"horizon {T} exceeds domain size {self.domain_size}")
        self.T = int(T)
        self.live = np.ones(self.hclass.size, dtype=bool)
        self.locked: Optional[int] = None
        self.deferred: list[int] = []
        self.instances: list[int] = []

    def instance(self, t: int) -> int:
        x = t - 1
        self.instances.append(x)
        return x

    def label(self, t: int, yhat: int):
        x = self.instances[-1]
        rows = self.hclass.rows
        if self.locked is not None:
            if yhat == 1:
                return int(rows[self.locked, x])
            self.deferred.append(t)
            return None
        if yhat == 0:
            self.deferred.append(t)
            return None
        # learner predicted 1 while the version space is large: answer 0
        survivors = self.live & (rows[:, x] == 0)
        if not survivors.any():
            # cannot happen for classes with the slow-decrease property; lock
            # a surviving hypothesis and follow it instead of going empty
            self.locked = int(np.flatnonzero(self.live)[0])
            return int(rows[self.locked, x])
        self.live = survivors
        if int(self.live.sum()) < self.threshold:
            self.locked = int(np.flatnonzero(self.live)[0])
        return 0

    def finalize(self):
        witness = self.locked if self.locked is not None else int(np.flatnonzero(self.live)[0])
        row = self.hclass.rows[witness]
        committed = {t: int(row[self.instances[t - 1]]) for t in self.deferred}
        preds = np.array([row[x] for x in self.instances], dtype=np.uint8)
        return committed, game.Certificate(witness=witness, predictions=preds)


# ---------------------------------------------------------------------------
# Fuzzing adversaries.
# ---------------------------------------------------------------------------


class FuzzExpertsAdversary:
    """Seeded oblivious experts sequence, k-realizable by construction.

    Draws a hidden witness expert, i.i.d. prediction bits, and labels equal
    to the witness's predictions with at most k flips.
    """

    kind = game.EXPERTS

    def __init__(self, n: int, k: int, seed: int, p_one: float = 0.5):
        if n < 1:
            raise ParameterError("need n >= 1")
        if k < 0:
            raise ParameterError("k must be >= 0")
        self.n_experts = int(n)
        self.realizability_k = int(k)
        self.seed = int(seed)
        self.p_one = float(p_one)

    def start(self, T: int):
        self.T = int(T)
        self.preds, self.labels, self.witness = self.materialize(T)

    def materialize(self, T: int):
        rng = np.random.default_rng(self.seed)
        preds = (rng.random((T, self.n_experts)) < self.p_one).astype(np.uint8)
        witness = int(rng.integers(self.n_experts))
        labels = preds[:, witness].copy()
        k_actual = int(rng.integers(0, min(self.realizability_k, T) + 1))
        if k_actual:
            flips = rng.choice(T, size=k_actual, replace=False)
            labels[flips] ^= 1
        return preds, labels, witness

    def instance(self, t: int) -> np.ndarray:
        return self.preds[t - 1]

    def label(self, t: int, yhat: int):
        return int(self.labels[t - 1])

    def finalize(self):
        return {}, game.Certificate(witness=self.witness, predictions=self.preds[:, self.witness].copy())


class FuzzClassAdversary:
    """Seeded oblivious instance sequence over a finite class, k-realizable
    by construction with a hidden witness hypothesis."""

    kind = game.INSTANCES

    def __init__(self, hclass: FiniteClass, k: int, seed: int):
        if k < 0:
            raise ParameterError("k must be >= 0")
        self.hclass = hclass
        self.domain_size = hclass.domain_size
        self.realizability_k = int(k)
        self.seed = int(seed)

    def start(self, T: int):
        self.T = int(T)
        rng = np.random.default_rng(self.seed)
        self.instances_seq = rng.integers(self.domain_size, size=T)
        self.witness = int(rng.integers(self.hclass.size))
        self.labels = self.hclass.rows[self.witness, self.instances_seq].astype(np.int8)
        k_actual = int(rng.integers(0, min(self.realizability_k, T) + 1))
        if k_actual:
            flips = rng.choice(T, size=k_actual, replace=False)
            self.labels[flips] ^= 1

    def instance(self, t: int) -> int:
        return int(self.instances_seq[t - 1])

    def label(self, t: int, yhat: int):
        return int(self.labels[t - 1])

    def finalize(self):
        preds = self.hclass.rows[self.witness, self.instances_seq].astype(np.uint8)
        return {}, game.Certificate(witness=self.witness, predictions=preds)


# ---------------------------------------------------------------------------
# Random-class sampling and verification.
# ---------------------------------------------------------------------------


@dataclass
class RandomClassSpec:
    """Parameters of an i.i.d. Bernoulli bit-matrix class over T instances.

    The default one-probability is min(1/2, c * sqrt(d * log2(T) / T)); the
    clamp matters because the headline constant in front of the square root
    is asymptotic and exceeds 1 at desk scale.
    """

    d: int
    T: int
    c: float = 1.0
    seed: int = 0
    size_cap: int = 4096
    p: Optional[float] = None

    @property
    def resolved_p(self) -> float:
        if self.p is not None:
            return float(self.p)
        return min(0.5, self.c * math.sqrt(self.d * math.log2(self.T) / self.T))

    @property
    def size(self) -> int:
        return min(self.T**self.d, self.size_cap)


def sample_random_class(spec: RandomClassSpec) -> FiniteClass:
    """Draw the class: each hypothesis predicts 1 on each instance with
    probability p, independently.  Duplicate rows collapse."""
    p = spec.resolved_p
    if not 0 < p <= 1:
        raise ValueError("p must be in (0, 1]")
    rng = np.random.default_rng(spec.seed)
    raw = (rng.random((spec.size, spec.T)) < p).astype(np.uint8)
    seen: dict[bytes, int] = {}
    keep = []
    for j in range(raw.shape[0]):
        key = raw[j].tobytes()
        if key not in seen:
            seen[key] = j
            keep.append(j)
    return FiniteClass(raw[keep])


@dataclass
class RandomClassReport:
    """Per-item verification outcome: status in {pass, fail, skipped}."""

    min_ones: int
    ones_threshold: float
    item1: str
    chain_violations: int
    chains_checked: int
    item2: str
    ldim: Optional[int]
    ldim_bound: float
    item3: str

    @property
    def ok(self) -> bool:
        return "fail" not in (self.item1, self.item2, self.item3)


def verify_random_class(
    hclass: FiniteClass,
    d: int,
    T: int,
    *,
    ones_threshold: float,
    decay: float,
    vs_threshold: Optional[int] = None,
    chains: int = 8,
    chain_seed: int = 0,
    ldim_budget: Optional[int] = None,
) -> RandomClassReport:
    """Check the sampled-class properties at caller-supplied thresholds.

    Item 1 (every hypothesis predicts 1 often enough) is exact.  Item 2 (the
    all-zero restriction shrinks slowly while the version space is large) is
    a sampled audit over restriction chains grown one instance at a time,
    since exhausting all instance subsets is infeasible.  Item 3 (Littlestone
    dimension below 10d) runs only when a search budget is supplied.
    """
    ones = hclass.rows.sum(axis=1)
    min_ones = int(ones.min())
    item1 = "pass" if min_ones >= ones_threshold else "fail"

    if vs_threshold is None:
        vs_threshold = max(1, int(T ** (d / 2)))
    rng = np.random.default_rng(chain_seed)
    violations = 0
    checked = 0
    for _ in range(chains):
        live = np.ones(hclass.size, dtype=bool)
        order = rng.permutation(hclass.domain_size)
        for x in order:
            if int(live.sum()) < vs_threshold:
                break
            nxt = live & (hclass.rows[:, x] == 0)
            checked += 1
            if nxt.sum() < (1.0 - decay) * live.sum():
                violations += 1
            live = nxt
            if not live.any():
                break
    item2 = "pass" if violations == 0 else "fail"

    ldim = None
    item3 = "skipped"
    if ldim_budget is not None:
        from .dimensions import SearchBudgetExceeded, littlestone_dim

        try:
            ldim = littlestone_dim(hclass, node_budget=ldim_budget)
            item3 = "pass" if ldim < 10 * d else "fail"
        except SearchBudgetExceeded:
            item3 = "skipped"

    return RandomClassReport(
        min_ones=min_ones,
        ones_threshold=float(ones_threshold),
        item1=item1,
        chain_violations=violations,
        chains_checked=checked,
        item2=item2,
        ldim=ldim,
        ldim_bound=10.0 * d,
        item3=item3,
    )

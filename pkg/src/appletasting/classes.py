"""Finite hypothesis classes as bit matrices, budgeted variants, and gluing.

A class is a set of distinct 0/1 rows over a finite instance domain; row h,
column x holds h's prediction on x.  The budgeted variant pairs each
hypothesis with a remaining false-positive allowance; restricting on an
example (x, y) filters or charges the budgets.

The text interchange format is: optional ``#`` comment lines, a header line
``m n`` (domain size, hypothesis count), then n lines of m characters from
{0, 1}.
"""
from __future__ import annotations

from typing import IO, Iterable, Sequence

import numpy as np


class ClassDomainError(ValueError):
    """An instance id outside the class's domain."""


def _as_rows(rows) -> np.ndarray:
    arr = np.asarray(rows, dtype=np.uint8)
    if arr.ndim != 2:
        raise ValueError("hypothesis rows must form a 2-D bit matrix")
    if not np.isin(arr, (0, 1)).all():
        raise ValueError("hypothesis rows must be 0/1")
    return arr


class FiniteClass:
    """A non-empty set of distinct hypotheses over instances 0..m-1."""

    def __init__(self, rows, labels: Sequence[str] | None = None):
        arr = _as_rows(rows)
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("class must be non-empty over a non-empty domain")
        if len({r.tobytes() for r in arr}) != arr.shape[0]:
            raise ValueError("hypothesis rows must be distinct")
        self.rows = arr
        if labels is None:
            labels = tuple(f"x{i}" for i in range(arr.shape[1]))
        if len(labels) != arr.shape[1]:
            raise ValueError("need one label per instance")
        self.labels = tuple(labels)

    @property
    def size(self) -> int:
        return int(self.rows.shape[0])

    @property
    def domain_size(self) -> int:
        return int(self.rows.shape[1])

    def check_instance(self, x: int) -> int:
        x = int(x)
        if not 0 <= x < self.domain_size:
            raise ClassDomainError(f"instance {x} outside domain of size {self.domain_size}")
        return x

    def column(self, x: int) -> np.ndarray:
        return self.rows[:, self.check_instance(x)]

    def restrict(self, x: int, y: int):
        """Sub-class of hypotheses predicting y on x.  May be empty."""
        keep = self.column(x) == y
        return _RestrictedClass(self.rows[keep], self.labels)

    def __eq__(self, other):
        return isinstance(other, FiniteClass) and np.array_equal(self.rows, other.rows)

    def __repr__(self):
        return f"FiniteClass(size={self.size}, domain_size={self.domain_size})"


class _RestrictedClass(FiniteClass):
    """Restriction result; allowed to be empty."""

    def __init__(self, rows, labels):
        self.rows = _as_rows(rows) if len(rows) else np.zeros((0, len(labels)), dtype=np.uint8)
        self.labels = tuple(labels)


class BudgetedClass:
    """Hypothesis rows paired with remaining false-positive budgets."""

    def __init__(self, rows, budgets):
        self.rows = _as_rows(rows)
        self.budgets = np.asarray(budgets, dtype=np.int64)
        if self.budgets.shape != (self.rows.shape[0],):
            raise ValueError("need one budget per hypothesis")
        if (self.budgets < 0).any():
            raise ValueError("budgets must be >= 0")
        if len({r.tobytes() for r in self.rows}) != self.rows.shape[0]:
            raise ValueError("hypothesis rows must be distinct")

    @classmethod
    def from_class(cls, hclass: FiniteClass, k: int) -> "BudgetedClass":
        """The uniform-budget class pairing every hypothesis with budget k."""
        return cls(hclass.rows.copy(), np.full(hclass.size, int(k), dtype=np.int64))

    @property
    def size(self) -> int:
        return int(self.rows.shape[0])

    @property
    def domain_size(self) -> int:
        return int(self.rows.shape[1])

    def column(self, x: int) -> np.ndarray:
        x = int(x)
        if not 0 <= x < self.domain_size:
            raise ClassDomainError(f"instance {x} outside domain of size {self.domain_size}")
        return self.rows[:, x]

    def restrict(self, x: int, y: int) -> "BudgetedClass":
        """Restriction on the example (x, y).

        y = 1 keeps exactly the hypotheses predicting 1 on x.  y = 0 keeps
        hypotheses predicting 0 unchanged and charges one budget unit to each
        hypothesis predicting 1, dropping those already at zero.
        """
        col = self.column(x)
        if y == 1:
            keep = col == 1
            return BudgetedClass(self.rows[keep], self.budgets[keep])
        keep = (col == 0) | (self.budgets >= 1)
        new_budgets = self.budgets - ((col == 1) & (self.budgets >= 1))
        return BudgetedClass(self.rows[keep], new_budgets[keep])

    def canonical_key(self) -> tuple:
        items = sorted(
            (self.rows[j].tobytes(), int(self.budgets[j])) for j in range(self.size)
        )
        return tuple(items)

    def __repr__(self):
        return f"BudgetedClass(size={self.size}, domain_size={self.domain_size})"


def is_k_realizable(branch: Iterable[tuple[int, int]], hclass: FiniteClass, k: int) -> bool:
    """True iff some hypothesis disagrees with the example sequence on at most
    k positions."""
    pairs = list(branch)
    if not pairs:
        return hclass.size > 0
    dis = np.zeros(hclass.size, dtype=np.int64)
    for x, y in pairs:
        dis += hclass.column(x) != y
    return bool((dis <= k).any())


def glue(classes: Sequence[FiniteClass]) -> FiniteClass:
    """Disjoint-domain union: each hypothesis extends by 0 off its own block.

    Instance ids are namespaced per source class; duplicate extended rows
    (which arise only from all-zero hypotheses in several sources) collapse.
    """
    if not classes:
        raise ValueError("need at least one class to glue")
    widths = [c.domain_size for c in classes]
    offsets = np.concatenate([[0], np.cumsum(widths)])
    total = int(offsets[-1])
    rows = []
    for i, c in enumerate(classes):
        block = np.zeros((c.size, total), dtype=np.uint8)
        block[:, offsets[i] : offsets[i] + widths[i]] = c.rows
        rows.append(block)
    stacked = np.concatenate(rows, axis=0)
    seen: dict[bytes, int] = {}
    keep = []
    for j in range(stacked.shape[0]):
        key = stacked[j].tobytes()
        if key not in seen:
            seen[key] = j
            keep.append(j)
    labels = []
    for i, c in enumerate(classes):
        labels.extend(f"g{i}:{lab}" for lab in c.labels)
    return FiniteClass(stacked[keep], labels=labels)


def universal_class(n: int) -> FiniteClass:
    """The class of n coordinate projections over the domain {0,1}^n.

    Instance x is the integer encoding of a prediction vector; hypothesis i
    reads out bit i.  Learning it is exactly prediction with n experts.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    m = 2**n
    rows = np.zeros((n, m), dtype=np.uint8)
    for x in range(m):
        for i in range(n):
            rows[i, x] = (x >> i) & 1
    return FiniteClass(rows, labels=tuple(format(x, f"0{n}b")[::-1] for x in range(m)))


def singleton_class(m: int) -> FiniteClass:
    """Indicators of single instances over a domain of size m."""
    return FiniteClass(np.eye(m, dtype=np.uint8))


# ---------------------------------------------------------------------------
# Class file format.
# ---------------------------------------------------------------------------


def parse_class(fh: IO[str]) -> FiniteClass:
    lines = [ln.strip() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ValueError("empty class file")
    head = lines[0].split()
    if len(head) != 2:
        raise ValueError("header must be 'm n'")
    m, n = int(head[0]), int(head[1])
    if len(lines) != n + 1:
        raise ValueError(f"expected {n} hypothesis lines, found {len(lines) - 1}")
    rows = np.zeros((n, m), dtype=np.uint8)
    for j, ln in enumerate(lines[1:]):
        if len(ln) != m or set(ln) - {"0", "1"}:
            raise ValueError(f"hypothesis line {j + 1} must be {m} characters of 0/1")
        rows[j] = np.frombuffer(ln.encode(), dtype=np.uint8) - ord("0")
    return FiniteClass(rows)


def write_class(hclass: FiniteClass, fh: IO[str], comments: Sequence[str] = ()) -> None:
    for c in comments:
        fh.write(f"# {c}\n")
    fh.write(f"{hclass.domain_size} {hclass.size}\n")
    for j in range(hclass.size):
        fh.write("".join(str(int(b)) for b in hclass.rows[j]) + "\n")


def load_class(path) -> FiniteClass:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_class(fh)


def save_class(hclass: FiniteClass, path, comments: Sequence[str] = ()) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        write_class(hclass, fh, comments)

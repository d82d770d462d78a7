import numpy as np
import pytest

import appletasting as at


def width1_catalogue():
    """22 small classes (m <= 5, |H| <= 6) for exhaustive learner checks."""
    cls = [
        at.singleton_class(5),
        at.singleton_class(4),
        at.FiniteClass(np.vstack([np.zeros(5, np.uint8), np.eye(5, dtype=np.uint8)])),
        at.FiniteClass([[0, 0, 0, 0, 0]]),
        at.FiniteClass([[1, 1, 1, 1, 1]]),
        at.FiniteClass(np.tril(np.ones((5, 5), np.uint8))),
        at.FiniteClass(np.triu(np.ones((5, 5), np.uint8))),
        at.FiniteClass([[1 if a <= i < a + 2 else 0 for i in range(5)] for a in range(4)]),
    ]
    rng = np.random.default_rng(42)
    while len(cls) < 22:
        m = int(rng.integers(3, 6))
        h = int(rng.integers(2, 7))
        rows = np.unique((rng.random((h, m)) < rng.uniform(0.2, 0.6)).astype(np.uint8), axis=0)
        if rows.shape[0] < 1:
            continue
        cls.append(at.FiniteClass(rows))
    return cls


def integer_kth_root(n: int, k: int) -> int:
    """floor(n ** (1/k)) by Newton iteration on exact integers."""
    if n < 0 or k < 1:
        raise ValueError
    if n in (0, 1) or k == 1:
        return n
    x = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x**k > n:
        x -= 1
    return x


def exact_threshold_reached(distances, budgets, eta_num: int, eta_den_pow: int, threshold: int) -> bool:
    """Exact evaluation of sum_j 2^(b_j + eta*d_j) >= threshold for dyadic
    eta = eta_num / 2^eta_den_pow, by big-integer arithmetic after scaling
    all exponents to the common denominator 2^eta_den_pow."""
    q = 2**eta_den_pow
    exps = [int(b) * q + eta_num * int(d) for b, d in zip(budgets, distances)]
    if not exps:
        return False
    if all(e % q == 0 for e in exps):
        return sum(2 ** (e // q) for e in exps) >= threshold
    # powers 2^(r/q) for r = 1..q-1 are irrational and rationally
    # independent, so the sum can never equal the integer threshold exactly;
    # squeeze it between integer floors at growing precision
    precision = 64
    while True:
        lo = sum(integer_kth_root(2 ** (precision * q + e), q) for e in exps)
        if lo >= threshold << precision:
            return True
        if lo + len(exps) <= threshold << precision:
            return False
        precision *= 2

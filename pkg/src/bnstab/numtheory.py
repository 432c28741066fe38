"""Arithmetic helpers: the genus-2 split threshold b2(r), line budgets, primes."""
from __future__ import annotations

from dataclasses import dataclass
from math import comb, gcd

from . import kernels

__all__ = [
    "LineBudget",
    "ScanExhausted",
    "SplitWitness",
    "b2",
    "b2_oracle",
    "is_prime",
    "line_budgets",
    "min_line_budget",
    "smallest_nondividing_prime",
    "split_witness",
]


class ScanExhausted(RuntimeError):
    pass


@dataclass(frozen=True)
class SplitWitness:
    """Degrees of two elliptic components ``d = d1 + d2`` with ``2*d1 + 1`` prime to ``r - 1``."""

    d1: int
    d2: int

    def is_valid(self, d: int, r: int) -> bool:
        return (
            self.d1 + self.d2 == d
            and min(self.d1, self.d2) >= r + 1
            and gcd(r - 1, 2 * self.d1 + 1) == 1
        )


@dataclass(frozen=True, order=True)
class LineBudget:
    """``a`` lines, ``b`` of them 2-secant, collapsed onto ``c`` points."""

    a: int
    b: int
    c: int

    def violation(self, r: int) -> str | None:
        """Name of the first violated constraint, or ``None``."""
        if self.a < 1:
            return "a must be positive"
        if self.b < 0:
            return "b must be nonnegative"
        if self.c < 1:
            return "c must be positive"
        if self.a + self.b != self.c * (r - 1):
            return f"a+b={self.a + self.b} != c(r-1)={self.c * (r - 1)}"
        if self.b > self.a:
            return f"b={self.b} > a={self.a}"
        if self.b > comb(self.c, 2):
            return f"b={self.b} > C(c,2)={comb(self.c, 2)}"
        return None

    def is_valid(self, r: int) -> bool:
        return self.violation(r) is None


def split_witness(d: int, r: int) -> SplitWitness | None:
    """Smallest-``d1`` witness that ``d`` splits as two admissible elliptic degrees."""
    if r < 4:
        raise ValueError("r must be at least 4")
    for d1 in range(r + 1, d - r):
        if gcd(r - 1, 2 * d1 + 1) == 1:
            return SplitWitness(d1, d - d1)
    return None


def least_split_degree(r: int) -> int:
    d1 = r + 1
    while gcd(r - 1, 2 * d1 + 1) != 1:
        d1 += 1
    return d1


def b2(r: int) -> int:
    """Least ``d0`` such that every ``d >= d0`` has a split witness.

    Witnesses are upward closed in ``d`` (grow ``d2``), so the threshold is
    the least admissible ``d1`` plus the smallest allowed ``d2``.
    """
    if r < 4:
        raise ValueError("r must be at least 4")
    return least_split_degree(r) + r + 1


def b2_oracle(r: int, scan_limit: int) -> int:
    """Brute-force ``b2``: test every degree up to ``scan_limit`` directly."""
    if r < 4:
        raise ValueError("r must be at least 4")
    if scan_limit < 4 * r:
        raise ValueError("scan_limit must be at least 4r")
    exists = kernels.split_exists(r, scan_limit)
    # degrees below 2r+2 never split; the threshold follows the last failure
    threshold = 2 * r + 2
    for d in range(2 * r + 2, scan_limit + 1):
        if not exists[d]:
            threshold = d + 1
    if threshold > scan_limit:
        raise ScanExhausted(f"no threshold for r={r} at or below {scan_limit}")
    return threshold


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def smallest_nondividing_prime(m: int) -> int:
    """Smallest prime ``p >= 5`` not dividing ``m``."""
    if m < 1:
        raise ValueError("m must be positive")
    p = 5
    while m % p == 0 or not is_prime(p):
        p += 1
    return p


def min_line_budget(b: int, r: int) -> LineBudget:
    """The budget with fewest lines realising a genus increase of ``b``.

    ``b = 0`` is allowed and gives ``r - 1`` one-secant lines through one point.
    """
    if b < 0:
        raise ValueError("b must be nonnegative")
    c = 1
    while True:
        a = c * (r - 1) - b
        if a >= max(b, 1) and comb(c, 2) >= b:
            return LineBudget(a, b, c)
        c += 1


def line_budgets(r: int, a_max: int) -> list[LineBudget]:
    """Every valid budget with at most ``a_max`` lines, sorted by ``(a, b)``."""
    out = []
    c = 1
    while c * (r - 1) - min(comb(c, 2), c * (r - 1) // 2) <= a_max:
        for b in range(0, min(comb(c, 2), c * (r - 1) // 2) + 1):
            budget = LineBudget(c * (r - 1) - b, b, c)
            if budget.a <= a_max and budget.is_valid(r):
                out.append(budget)
        c += 1
    out.sort()
    return out

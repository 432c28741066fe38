from __future__ import annotations

from fractions import Fraction

import pytest

from bnstab.numtheory import (
    LineBudget,
    ScanExhausted,
    SplitWitness,
    b2,
    b2_oracle,
    is_prime,
    line_budgets,
    min_line_budget,
    smallest_nondividing_prime,
    split_witness,
)
from oracles import b2_scan, has_split


def test_split_witness_examples():
    assert split_witness(10, 4) == SplitWitness(5, 5)
    assert split_witness(14, 6) is None
    assert split_witness(15, 6) == SplitWitness(8, 7)


def test_split_witness_upward_closed():
    for r in range(4, 25):
        for d in range(0, 6 * r):
            w = split_witness(d, r)
            assert (w is not None) == has_split(d, r)
            if w is not None:
                assert w.is_valid(d, r)
                assert SplitWitness(w.d1, w.d2 + 1).is_valid(d + 1, r)


def test_b2_examples():
    assert b2(4) == 10
    assert b2(5) == 12
    assert b2(6) == 15
    assert b2(11) == 25


def test_b2_oracles_agree():
    for r in range(4, 501):
        assert b2(r) == b2_oracle(r, 8 * r)
    for r in range(4, 80):
        assert b2(r) == b2_scan(r, 8 * r)


def test_b2_oracle_errors(monkeypatch):
    assert b2_oracle(4, 40) == 10
    assert b2_oracle(6, 60) == 15
    assert b2_oracle(5, 50) == 12
    with pytest.raises(ValueError):
        b2_oracle(5, 10)
    # a 4r scan always reaches the threshold, so exhaustion needs a stubbed kernel
    from bnstab import kernels

    monkeypatch.setattr(kernels, "split_exists", lambda r, limit: [False] * (limit + 1))
    with pytest.raises(ScanExhausted):
        b2_oracle(4, 16)
    with pytest.raises(ValueError):
        b2(3)


def test_smallest_nondividing_prime():
    assert smallest_nondividing_prime(4) == 5
    assert smallest_nondividing_prime(5) == 7
    assert smallest_nondividing_prime(10) == 7
    assert smallest_nondividing_prime(5 * 7 * 11) == 13
    assert [p for p in range(30) if is_prime(p)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def test_b2_bounds_small_range():
    for r in range(4, 301):
        if (r - 1) % 5:
            assert b2(r) == 2 * r + 2
        p = smallest_nondividing_prime(r - 1)
        assert b2(r) <= 2 * r + Fraction(p - 1, 2)
        assert b2(r) >= 2 * r + 2


def test_min_line_budget_examples():
    assert min_line_budget(6, 4) == LineBudget(6, 6, 4)
    assert min_line_budget(1, 4) == LineBudget(5, 1, 2)
    assert min_line_budget(0, 4) == LineBudget(3, 0, 1)


def test_min_line_budget_is_minimal():
    for r in range(3, 12):
        for b in range(0, 60):
            best = min(
                (c * (r - 1) - b for c in range(1, 80) if c * (r - 1) - b >= max(b, 1) and c * (c - 1) // 2 >= b),
            )
            mb = min_line_budget(b, r)
            assert mb.a == best and mb.is_valid(r)


def test_min_line_budget_bounds():
    for r in range(3, 31):
        for b in range(0, 201):
            a = min_line_budget(b, r).a
            assert a - b <= Fraction(r * r, 4) + r - 3
            if b >= 1:
                assert a <= b * (2 * r - 3)


def test_line_budget_violations():
    assert LineBudget(2, 1, 1).violation(4) is not None
    assert "C(c,2)" in LineBudget(2, 1, 1).violation(4)
    assert LineBudget(3, 0, 1).is_valid(4)
    assert not LineBudget(0, 3, 1).is_valid(4)
    assert not LineBudget(4, 0, 1).is_valid(4)


def test_line_budgets_enumeration():
    r = 4
    got = line_budgets(r, 30)
    want = sorted(
        LineBudget(c * (r - 1) - b, b, c)
        for c in range(1, 40)
        for b in range(0, c * (c - 1) // 2 + 1)
        if 1 <= c * (r - 1) - b <= 30 and b <= c * (r - 1) - b
    )
    assert got == want

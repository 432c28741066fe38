from __future__ import annotations

import os
import subprocess
import sys

import numpy as np
import pytest

from bnstab import kernels
from bnstab.closure import DEGENERATION_RULES, Grid, compute_closure
from oracles import has_split, u_e


@pytest.mark.parametrize("r", [4, 5, 6, 11, 31])
def test_split_exists_backends(r):
    limit = 8 * r
    a = kernels.split_exists_numpy(r, limit)
    if kernels.HAVE_NUMBA:
        assert np.array_equal(a, kernels.split_exists_numba(r, limit))
    assert [bool(x) for x in a] == [has_split(d, r) for d in range(limit + 1)]


@pytest.mark.parametrize("r", [4, 5, 7])
def test_elliptic_tables_backends(r):
    if not kernels.HAVE_NUMBA:
        pytest.skip("numba not installed")
    for x, y in zip(kernels.elliptic_tables_numpy(r, 32), kernels.elliptic_tables_numba(r, 32)):
        assert np.array_equal(x, y)


def test_min_elliptic_degree():
    for r in range(4, 12):
        for m in range(1, 40):
            e = kernels.min_elliptic_degree(m, r)
            assert e >= r + 1 and u_e(e, r) >= m
            assert e == r + 1 or u_e(e - 1, r) < m


@pytest.mark.parametrize("rules", ["full", "degeneration"])
def test_closure_backends_agree(rules):
    rs = DEGENERATION_RULES if rules == "degeneration" else None
    grid = Grid(4, 80, 60)
    kw = {} if rs is None else {"rules": rs}
    a = compute_closure(grid, backend="numpy", **kw)
    b = compute_closure(grid, backend="numba", **kw)
    assert np.array_equal(a.levels, b.levels)


def test_suffix_min():
    S = np.array([[2, 1, 2, 2], [0, 2, 2, 1]], dtype=np.int8)
    bn = np.array([[True, True, True, True], [False, True, True, True]])
    out = kernels.suffix_min_numpy(S, bn)
    assert out.tolist() == [[1, 1, 2, 2], [0, 1, 1, 1]]


def test_env_flag_selects_numpy():
    env = dict(os.environ, BNSTAB_DISABLE_NUMBA="1")
    code = "from bnstab import kernels; print(kernels.BACKEND, kernels.USE_NUMBA)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["numpy", "False"]
    env["BNSTAB_DISABLE_NUMBA"] = "0"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split()[0] == ("numba" if kernels.HAVE_NUMBA else "numpy")

"""Hot loops, each with a numba implementation and a pure-numpy twin.

The numba path is used when numba imports and ``BNSTAB_DISABLE_NUMBA`` is
unset (or ``0``).  Both paths are always importable under explicit names so
tests and the benchmark can compare them.

Status grids are ``int8`` arrays indexed ``[g, d]`` holding lattice levels
0 (unknown), 1 (semistable) and 2 (stable).
"""
from __future__ import annotations

import os

import numpy as np

INF = np.iinfo(np.int64).max // 4

try:  # pragma: no cover - exercised implicitly
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("BNSTAB_DISABLE_NUMBA", "0").lower() in ("", "0", "false", "no")
BACKEND = "numba" if USE_NUMBA else "numpy"


def _njit(fn):
    if HAVE_NUMBA:
        return numba.njit(cache=True)(fn)
    return fn


def min_elliptic_degree(m: int, r: int) -> int:
    """Least degree ``e >= r+1`` of an elliptic curve allowed to be ``m``-secant."""
    return max(r + 1, -(-2 * m * (r - 1) // (r + 1)))


# ---------------------------------------------------------------- split scan


def _split_exists_loop(r, limit):
    out = np.zeros(limit + 1, dtype=np.bool_)
    m = r - 1
    for d in range(limit + 1):
        for d1 in range(r + 1, d - r):
            a, b = m, 2 * d1 + 1
            while b:
                a, b = b, a % b
            if a == 1:
                out[d] = True
                break
    return out


split_exists_numba = _njit(_split_exists_loop)


def split_exists_numpy(r: int, limit: int) -> np.ndarray:
    d1 = np.arange(limit + 1)
    ok = (d1 >= r + 1) & (np.gcd(r - 1, 2 * d1 + 1) == 1)
    count = np.cumsum(ok)
    d = np.arange(limit + 1)
    hi = d - r - 1  # largest admissible d1
    valid = hi >= r + 1
    out = np.zeros(limit + 1, dtype=bool)
    out[valid] = count[hi[valid]] - count[r] > 0
    return out


def split_exists(r: int, limit: int) -> np.ndarray:
    """``out[d]`` is whether some ``d1`` splits ``d`` admissibly."""
    if USE_NUMBA:
        return split_exists_numba(r, limit)
    return split_exists_numpy(r, limit)


# ------------------------------------------------------------- elliptic DP
#
# G[m, J, res, fl]: least total degree of a multiset of satellite curves with
# secancies <= m summing to J, total degree = res (mod r-1), fl = 1 iff some
# satellite has 2e + j prime to r-1.  Degrees are searched in a window of
# width r-1 above the minimum; residues cover everything beyond.
#
# need[J, res, fl]: least (total satellite degree + least centre degree) over
# configurations of total secancy J; choice records the top satellite
# (m, e1, res', fl') that realised it, preferring the largest top secancy.


def _gcd1(a, b):
    while b:
        a, b = b, a % b
    return a == 1


_gcd1 = _njit(_gcd1)


def _elliptic_loop(r, jmax):
    M = r - 1
    big = INF
    G = np.full((jmax + 1, jmax + 1, M, 2), big, dtype=np.int64)
    for m in range(jmax + 1):
        G[m, 0, 0, 0] = 0
    for m in range(1, jmax + 1):
        lo = max(r + 1, -(-2 * m * (r - 1) // (r + 1)))
        for J in range(1, jmax + 1):
            for res in range(M):
                for fl in range(2):
                    G[m, J, res, fl] = G[m - 1, J, res, fl]
            if m > J:
                continue
            for e in range(lo, lo + M):
                cp = 1 if _gcd1(M, 2 * e + m) else 0
                for res in range(M):
                    for fl in range(2):
                        v = G[m, J - m, res, fl]
                        if v >= big:
                            continue
                        nr = (res + e) % M
                        nf = fl | cp
                        if v + e < G[m, J, nr, nf]:
                            G[m, J, nr, nf] = v + e
    need = np.full((jmax + 1, M, 2), big, dtype=np.int64)
    choice = np.full((jmax + 1, M, 2, 4), -1, dtype=np.int64)
    for J in range(1, jmax + 1):
        for m in range(J, 0, -1):
            lo = max(r + 1, -(-2 * m * (r - 1) // (r + 1)))
            for e in range(lo, lo + M):
                cp = 1 if _gcd1(M, 2 * e + m) else 0
                for res in range(M):
                    for fl in range(2):
                        v = G[m, J - m, res, fl]
                        if v >= big:
                            continue
                        total = v + e + lo
                        nr = (res + e) % M
                        nf = fl | cp
                        if total < need[J, nr, nf]:
                            need[J, nr, nf] = total
                            choice[J, nr, nf, 0] = m
                            choice[J, nr, nf, 1] = e
                            choice[J, nr, nf, 2] = res
                            choice[J, nr, nf, 3] = fl
    return G, need, choice


elliptic_tables_numba = _njit(_elliptic_loop)


def _coprime_vec(M: int, x: np.ndarray) -> np.ndarray:
    return np.gcd(M, x) == 1


def elliptic_tables_numpy(r: int, jmax: int):
    M = r - 1
    G = np.full((jmax + 1, jmax + 1, M, 2), INF, dtype=np.int64)
    G[:, 0, 0, 0] = 0
    res_idx = np.arange(M)
    for m in range(1, jmax + 1):
        lo = min_elliptic_degree(m, r)
        G[m, 1:] = G[m - 1, 1:]
        for J in range(m, jmax + 1):
            prev = G[m, J - m]
            cur = G[m, J]
            for e in range(lo, lo + M):
                cand = np.where(prev >= INF, INF, prev + e)
                cand = cand[(res_idx - e) % M]  # cand[nr] comes from res = nr - e
                if np.gcd(M, 2 * e + m) == 1:
                    merged = np.minimum(cand[:, 0], cand[:, 1])
                    cur[:, 1] = np.minimum(cur[:, 1], merged)
                else:
                    np.minimum(cur, cand, out=cur)
    need = np.full((jmax + 1, M, 2), INF, dtype=np.int64)
    choice = np.full((jmax + 1, M, 2, 4), -1, dtype=np.int64)
    for J in range(1, jmax + 1):
        ms = np.arange(J, 0, -1)
        los = np.maximum(r + 1, -(-2 * ms * (r - 1) // (r + 1)))
        rest = G[ms, J - ms]  # (J, M, 2)
        ks = np.arange(M)
        es = los[:, None] + ks[None, :]  # (J, M)
        cps = _coprime_vec(M, 2 * es + ms[:, None]).astype(np.int64)
        # candidate axes: (m, k, res, fl), C order matches the loop order
        vals = rest[:, None, :, :] + (es + los[:, None])[:, :, None, None]
        vals = np.where(rest[:, None, :, :] >= INF, INF, vals)
        nr = (res_idx[None, None, :, None] + es[:, :, None, None]) % M
        nf = np.arange(2)[None, None, None, :] | cps[:, :, None, None]
        nr = np.broadcast_to(nr, vals.shape).ravel()
        nf = np.broadcast_to(nf, vals.shape).ravel()
        flat = vals.ravel()
        for tr in range(M):
            for tf in range(2):
                masked = np.where((nr == tr) & (nf == tf), flat, INF)
                i = int(np.argmin(masked))
                if masked[i] >= INF:
                    continue
                need[J, tr, tf] = masked[i]
                mi, ki, ri, fi = np.unravel_index(i, vals.shape)
                choice[J, tr, tf] = (ms[mi], es[mi, ki], ri, fi)
    return G, need, choice


def elliptic_tables(r: int, jmax: int):
    if USE_NUMBA:
        return elliptic_tables_numba(r, jmax)
    return elliptic_tables_numpy(r, jmax)


# ------------------------------------------------------------ fixed point
#
# Step rules are given as shifts (dg, da) with a kind flag: 0 for line
# attachments (any certified source), 1 for the rational-curve step (source
# must satisfy rnc_ok).  In pointwise mode a source contributes its own
# level; in cofinal mode it contributes the minimum level of its row from
# that degree upward, so only terminal certified segments propagate.


def _suffix_min_loop(S, bn):
    G, D = S.shape
    out = np.zeros_like(S)
    for g in range(G):
        run = 2
        for d in range(D - 1, -1, -1):
            if bn[g, d]:
                if S[g, d] < run:
                    run = S[g, d]
                out[g, d] = run
    return out


_suffix_min_jit = _njit(_suffix_min_loop)


def _pull_loop(base, frozen, bn, rnc_ok, upgrade, sdg, sda, skind, cofinal):
    G, D = base.shape
    S = base.copy()
    n = sdg.shape[0]
    while True:
        contrib = _suffix_min_jit(S, bn) if cofinal else S
        changed = False
        for g in range(G):
            for d in range(D):
                if not bn[g, d] or frozen[g, d]:
                    continue
                v = S[g, d]
                if v < base[g, d]:
                    v = base[g, d]
                for s in range(n):
                    if v == 2:
                        break
                    sg = g - sdg[s]
                    sd = d - sda[s]
                    if sg < 1 or sd < 0:
                        continue
                    if skind[s] == 1 and not rnc_ok[sg, sd]:
                        continue
                    c = contrib[sg, sd] if cofinal else S[sg, sd]
                    if c > v:
                        v = c
                if v == 1 and upgrade[g, d]:
                    v = 2
                if v != S[g, d]:
                    S[g, d] = v
                    changed = True
        # sources precede targets in (g, d) order, so one pointwise sweep suffices
        if not cofinal or not changed:
            break
    return S


pull_closure_numba = _njit(_pull_loop)


def suffix_min_numpy(S: np.ndarray, bn: np.ndarray) -> np.ndarray:
    filled = np.where(bn, S, 2).astype(np.int8)
    out = np.minimum.accumulate(filled[:, ::-1], axis=1)[:, ::-1]
    return np.where(bn, out, 0).astype(np.int8)


def apply_rules_numpy(S, base, bn, rnc_ok, upgrade, sdg, sda, skind, cofinal, order=None):
    """One application of the monotone rule operator to the whole grid."""
    G, D = S.shape
    contrib = suffix_min_numpy(S, bn) if cofinal else S
    rnc_contrib = np.where(rnc_ok, contrib, 0).astype(np.int8)
    new = np.maximum(base, S)
    idx = range(len(sdg)) if order is None else order
    for s in idx:
        dg, da = int(sdg[s]), int(sda[s])
        if dg >= G or da >= D:
            continue
        src = rnc_contrib if skind[s] == 1 else contrib
        lo_g = max(dg, 1)
        view = new[lo_g:, da:]
        np.maximum(view, src[lo_g - dg : G - dg, : D - da], out=view)
    new = np.where((new == 1) & upgrade, 2, new).astype(np.int8)
    return np.where(bn, new, 0).astype(np.int8)


def pull_closure_numpy(base, frozen, bn, rnc_ok, upgrade, sdg, sda, skind, cofinal, rng=None):
    """Jacobi iteration from ``base``; with ``rng`` each round updates a random half."""
    S = np.where(bn, base, 0).astype(np.int8)
    keep = frozen | ~bn
    order = None
    while True:
        if rng is not None:
            order = rng.permutation(len(sdg))
        new = apply_rules_numpy(S, base, bn, rnc_ok, upgrade, sdg, sda, skind, cofinal, order)
        new = np.where(keep, S, new)
        if np.array_equal(new, S):
            return S
        if rng is not None:
            mask = rng.random(S.shape) < 0.5
            new = np.where(mask, new, S)
        S = new.astype(np.int8)


def pull_closure(base, frozen, bn, rnc_ok, upgrade, sdg, sda, skind, cofinal, rng=None):
    if rng is None and USE_NUMBA:
        return pull_closure_numba(base, frozen, bn, rnc_ok, upgrade, sdg, sda, skind, cofinal)
    return pull_closure_numpy(base, frozen, bn, rnc_ok, upgrade, sdg, sda, skind, cofinal, rng)

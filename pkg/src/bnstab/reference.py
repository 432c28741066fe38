"""Published reference tables for r = 4, shipped as a hashed data file.

Families ``(d0, g0, kmax)`` stand for the pairs ``(d0 + 9k, g0 + 12k)``
with ``0 <= k <= kmax``.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

DATA_FILE = "reference_tables.json"
CONTENT_SHA256 = "cbd2e0c0e55661034aa4706dfbe76ae0ac550d52e1664d3566f1648fd74d3fc6"
EXPECTED_COUNTS = {"thresholds": 12, "semistable_unknown": 48, "stable_unknown": 63}

Family = tuple[int, int, int]
Pair = tuple[int, int]


class ReferenceDataError(RuntimeError):
    pass


@dataclass(frozen=True)
class ThresholdRow:
    g: int
    d_min: int
    semistable: int
    stable: int


@dataclass(frozen=True)
class ReferenceTables:
    version: int
    r: int
    period: tuple[int, int]
    thresholds: tuple[ThresholdRow, ...]
    semistable_unknown_families: tuple[Family, ...]
    stable_unknown_families: tuple[Family, ...]

    @property
    def semistable_unknown(self) -> list[Pair]:
        return expand_families(self.semistable_unknown_families, self.period)

    @property
    def stable_unknown(self) -> list[Pair]:
        return expand_families(self.stable_unknown_families, self.period)


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def expand_families(families, period: tuple[int, int] = (9, 12)) -> list[Pair]:
    """Explicit pairs, sorted by genus then degree."""
    dd, dg = period
    out = {(d0 + k * dd, g0 + k * dg) for d0, g0, kmax in families for k in range(kmax + 1)}
    return sorted(out, key=lambda p: (p[1], p[0]))


def group_families(pairs, period: tuple[int, int] = (9, 12)) -> list[Family]:
    """Inverse of :func:`expand_families`: maximal arithmetic runs, sorted by ``(g0, d0)``."""
    dd, dg = period
    s = set(map(tuple, pairs))
    out = []
    for d, g in s:
        if (d - dd, g - dg) in s:
            continue
        k = 0
        while (d + (k + 1) * dd, g + (k + 1) * dg) in s:
            k += 1
        out.append((d, g, k))
    return sorted(out, key=lambda f: (f[1], f[0]))


def _parse(raw: bytes) -> ReferenceTables:
    payload = json.loads(raw)
    digest = hashlib.sha256(canonical_json(payload).encode()).hexdigest()
    if digest != CONTENT_SHA256:
        raise ReferenceDataError(f"reference data hash {digest} != recorded {CONTENT_SHA256}")
    tables = ReferenceTables(
        version=payload["version"],
        r=payload["r"],
        period=tuple(payload["period"]),
        thresholds=tuple(ThresholdRow(*row) for row in payload["thresholds"]),
        semistable_unknown_families=tuple(tuple(f) for f in payload["semistable_unknown"]),
        stable_unknown_families=tuple(tuple(f) for f in payload["stable_unknown"]),
    )
    counts = {"thresholds": len(tables.thresholds), "semistable_unknown": len(tables.semistable_unknown), "stable_unknown": len(tables.stable_unknown)}
    if counts != EXPECTED_COUNTS:
        raise ReferenceDataError(f"reference counts {counts} != {EXPECTED_COUNTS}")
    return tables


@lru_cache(maxsize=1)
def load_reference() -> ReferenceTables:
    raw = resources.files("bnstab").joinpath("data").joinpath(DATA_FILE).read_bytes()
    return _parse(raw)

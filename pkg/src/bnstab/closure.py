"""Least fixed point of the certification rules over a bounded ``(d, g)`` grid.

Every step rule moves strictly upward in ``(g, d)``, so the closure on a
grid ``{1 <= g <= g_max, d <= d_max}`` is exact: no certified point ever
needs a source outside the grid.  Statuses live in an ``int8`` level grid
(0 unknown, 1 semistable, 2 stable); certificates are materialised lazily
from the levels and memoised, so trees share nodes.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field, replace
from math import gcd
from typing import Any, Iterable

import numpy as np

from . import kernels
from .core import ConflictingStatus, Status, Triple, rho
from .numtheory import line_budgets, min_line_budget
from .rules import (
    Characteristic,
    CertificateNode,
    RuleId,
    check_node,
    closed_form_semistable,
    closed_form_stable,
    elliptic_base_levels,
    exception_status,
    rnc_shift,
    rule_coprime_upgrade,
    rule_genus1,
    rule_genus2,
    rule_interpolation,
    rule_special724,
    search_elliptic_config,
    step_attach_lines,
    step_attach_rnc,
)

__all__ = [
    "CertificateError",
    "DEGENERATION_RULES",
    "FULL_RULES",
    "Grid",
    "Propagation",
    "RuleSet",
    "StatusMap",
    "TableDiff",
    "Violation",
    "certificate_from_json",
    "certificate_to_json",
    "check_certificate",
    "compare_tables",
    "compute_closure",
    "crosscheck_closed_forms",
    "default_grid",
    "thresholds_per_genus",
    "unknown_pairs",
    "verify_certificate",
]


class CertificateError(ValueError):
    def __init__(self, node: CertificateNode, reason: str):
        super().__init__(f"{node.rule.value} at {node.triple}: {reason}")
        self.node = node
        self.reason = reason


@dataclass(frozen=True)
class Grid:
    r: int
    d_max: int
    g_max: int
    characteristic: Characteristic = Characteristic.GENERIC

    def __post_init__(self) -> None:
        if self.r < 3:
            raise ValueError("r must be at least 3")
        if self.d_max < 0 or self.g_max < 1:
            raise ValueError("need d_max >= 0 and g_max >= 1")

    def bn_mask(self) -> np.ndarray:
        g = np.arange(self.g_max + 1)[:, None]
        d = np.arange(self.d_max + 1)[None, :]
        return (g >= 1) & (g - (self.r + 1) * (g - d + self.r) >= 0)

    def contains(self, d: int, g: int) -> bool:
        return 0 <= d <= self.d_max and 1 <= g <= self.g_max and rho(d, g, self.r) >= 0


def default_grid(r: int, characteristic: Characteristic = Characteristic.GENERIC) -> Grid:
    """Grid enclosing the r = 4 tables and genus bounds; smaller proportional grids otherwise."""
    if r == 4:
        return Grid(4, 130, 150, characteristic)
    return Grid(r, 12 * r, 10 * r, characteristic)


class Propagation(enum.Enum):
    """How a certified source feeds a step rule.

    ``POINTWISE``: the source point itself.  ``COFINAL``: the source row must
    be certified from that degree through the end of the grid, matching
    threshold statements of the form "for all d >= d0".
    """

    POINTWISE = "pointwise"
    COFINAL = "cofinal"


_RULE_FIELDS = {
    RuleId.INTERPOLATION: "interpolation",
    RuleId.GENUS1: "genus1",
    RuleId.GENUS2_SEMISTABLE: "genus2",
    RuleId.GENUS2_STABLE_GCD: "genus2",
    RuleId.GENUS2_STABLE_SPLIT: "genus2",
    RuleId.GENUS2_STABLE_B2: "genus2",
    RuleId.SPECIAL724: "special724",
    RuleId.ELLIPTIC_CONFIG: "elliptic",
    RuleId.ATTACH_RNC: "rnc",
    RuleId.ATTACH_LINES: "lines",
    RuleId.COPRIME_UPGRADE: "coprime_upgrade",
}


@dataclass(frozen=True)
class RuleSet:
    interpolation: bool = True
    genus1: bool = True
    genus2: bool = True
    special724: bool = True
    elliptic: bool = True
    rnc: bool = True
    lines: bool = True
    coprime_upgrade: bool = True
    rnc_min_source_genus: int = 1
    propagation: Propagation = Propagation.POINTWISE

    def without(self, *names: str | RuleId) -> RuleSet:
        """Copy with the named rules disabled (field names or rule tags)."""
        changes = {}
        for name in names:
            if isinstance(name, RuleId):
                key = _RULE_FIELDS[name]
            else:
                key = next((v for k, v in _RULE_FIELDS.items() if k.value == name), name)
            if key not in _RULE_FIELDS.values():
                raise ValueError(f"unknown rule {name!r}")
            changes[key] = False
        return replace(self, **changes)

    def enabled(self, rule: RuleId) -> bool:
        return getattr(self, _RULE_FIELDS[rule])


FULL_RULES = RuleSet()
# The degeneration argument alone: genus 1 and 2, elliptic configurations and
# lines, with cofinal sources.
DEGENERATION_RULES = RuleSet(
    interpolation=False, rnc=False, coprime_upgrade=False, propagation=Propagation.COFINAL
)


def _shifts(grid: Grid, rules: RuleSet) -> tuple[np.ndarray, np.ndarray, np.ndarray, list]:
    r = grid.r
    dg, da, kind, budgets = [], [], [], []
    if rules.rnc:
        dd, gg = rnc_shift(r)
        dg.append(gg)
        da.append(dd)
        kind.append(1)
    if rules.lines:
        for b in line_budgets(r, grid.d_max):
            if b.b <= grid.g_max:
                budgets.append(b)
                dg.append(b.b)
                da.append(b.a)
                kind.append(0)
    as_arr = lambda x: np.asarray(x, dtype=np.int64)  # noqa: E731
    return as_arr(dg), as_arr(da), as_arr(kind), budgets


def _base_levels(grid: Grid, rules: RuleSet, bn: np.ndarray) -> np.ndarray:
    r = grid.r
    g = np.arange(grid.g_max + 1)[:, None]
    d = np.arange(grid.d_max + 1)[None, :]
    base = np.zeros(bn.shape, dtype=np.int8)
    if rules.interpolation:
        interp = bn & ((2 * d + 2 * g - 2) % (r - 1) == 0)
        for dd, gg, rr in ((5, 2, 3), (6, 4, 3), (7, 2, 5)):
            if rr == r and gg <= grid.g_max and dd <= grid.d_max:
                interp[gg, dd] = False
        base = np.maximum(base, interp.astype(np.int8))
    if rules.genus1:
        base[1, r + 1 :] = np.maximum(base[1, r + 1 :], 1)
    if rules.genus2 and r >= 4 and grid.g_max >= 2:
        for dd in range(grid.d_max + 1):
            node = rule_genus2(Triple(dd, 2, r))
            if node is not None:
                base[2, dd] = max(base[2, dd], node.status.level)
    if rules.special724 and grid.characteristic is Characteristic.GENERIC and r == 4:
        if grid.g_max >= 2 and grid.d_max >= 7:
            base[2, 7] = 2
    if rules.elliptic:
        base = np.maximum(base, elliptic_base_levels(r, grid.g_max, grid.d_max))
    return np.where(bn, base, 0).astype(np.int8)


def _exception_cells(grid: Grid) -> list[tuple[int, int, Status]]:
    from .rules import KNOWN_STRICTLY_SEMISTABLE, KNOWN_UNSTABLE

    out = []
    for (d, g, r), status in [(k, Status.KNOWN_UNSTABLE) for k in KNOWN_UNSTABLE] + [
        (k, Status.KNOWN_STRICTLY_SEMISTABLE) for k in KNOWN_STRICTLY_SEMISTABLE
    ]:
        if r == grid.r and grid.contains(d, g):
            out.append((d, g, status))
    return out


class StatusMap:
    """Closure result: a level grid plus lazily built certificates."""

    def __init__(self, grid: Grid, rules: RuleSet, levels: np.ndarray, budgets: list, exceptions):
        self.grid = grid
        self.rules = rules
        self.levels = levels
        self.budgets = sorted(budgets)
        self.exceptions = {(d, g): s for d, g, s in exceptions}
        self._memo: dict[tuple[int, int, int], CertificateNode | None] = {}

    # -- queries
    def level(self, d: int, g: int) -> int:
        if not self.grid.contains(d, g):
            raise KeyError(f"({d},{g}) is outside the grid or not BN")
        return int(self.levels[g, d])

    def status(self, d: int, g: int) -> Status:
        exc = self.exceptions.get((d, g))
        if exc is not None:
            return exc
        return Status.from_level(self.level(d, g))

    def points(self) -> Iterable[tuple[int, int]]:
        bn = self.grid.bn_mask()
        gs, ds = np.nonzero(bn)
        for g, d in sorted(zip(gs.tolist(), ds.tolist())):
            yield d, g

    # -- certificates
    def certificate(self, d: int, g: int, level: int | None = None) -> CertificateNode | None:
        """A certificate of at least ``level`` (default: the point's level)."""
        have = self.level(d, g)
        level = have if level is None else level
        if level == 0 or have < level or self.exceptions.get((d, g)) is Status.KNOWN_UNSTABLE:
            return None
        return self._cert(d, g, level)

    def _cert(self, d: int, g: int, level: int) -> CertificateNode:
        key = (d, g, level)
        if key in self._memo:
            return self._memo[key]
        node = self._find(d, g, level)
        if node is None:
            raise AssertionError(f"no derivation found for ({d},{g},{self.grid.r}) at level {level}")
        self._memo[key] = node
        return node

    def _find(self, d: int, g: int, level: int) -> CertificateNode | None:
        r = self.grid.r
        t = Triple(d, g, r)
        rules = self.rules
        ok = lambda n: n is not None and n.status.level >= level  # noqa: E731
        if rules.interpolation and ok(n := rule_interpolation(t)):
            return n
        if rules.genus1 and ok(n := rule_genus1(t)):
            return n
        if rules.genus2 and ok(n := rule_genus2(t)):
            return n
        if rules.special724 and ok(n := rule_special724(t, self.grid.characteristic)):
            return n
        if rules.elliptic and ok(n := search_elliptic_config(t)):
            return n
        if rules.rnc:
            dd, dg = rnc_shift(r)
            sd, sg = d - dd, g - dg
            if (
                sg >= max(1, rules.rnc_min_source_genus)
                and self.grid.contains(sd, sg)
                and rho(sd, sg, r) >= r - 1
                and self.levels[sg, sd] >= level
            ):
                n = step_attach_rnc(self._cert(sd, sg, level))
                if ok(n):
                    return n
        if rules.lines:
            for b in self.budgets:
                sd, sg = d - b.a, g - b.b
                if sg >= 1 and self.grid.contains(sd, sg) and self.levels[sg, sd] >= level:
                    if self.exceptions.get((sd, sg)) is Status.KNOWN_UNSTABLE:
                        continue
                    n = step_attach_lines(self._cert(sd, sg, level), b)
                    if ok(n):
                        return n
        if level == 2 and rules.coprime_upgrade:
            n = rule_coprime_upgrade(self._cert(d, g, 1))
            if ok(n):
                return n
        return None

    def certificates(self) -> Iterable[CertificateNode]:
        for d, g in self.points():
            node = self.certificate(d, g)
            if node is not None:
                yield node


def compute_closure(
    grid: Grid,
    rules: RuleSet = FULL_RULES,
    seed: int | None = None,
    backend: str = "auto",
) -> StatusMap:
    """Close the grid under ``rules``.

    ``seed`` switches to a randomised chaotic iteration (numpy only) whose
    result must not depend on the seed.  ``backend`` is ``auto``, ``numba``
    or ``numpy``.
    """
    r = grid.r
    bn = grid.bn_mask()
    raw_base = _base_levels(grid, rules, bn)
    sdg, sda, skind, budgets = _shifts(grid, rules)
    g = np.arange(grid.g_max + 1)[:, None]
    d = np.arange(grid.d_max + 1)[None, :]
    rnc_ok = bn & (g - (r + 1) * (g - d + r) >= r - 1) & (g >= rules.rnc_min_source_genus)
    if rules.coprime_upgrade:
        upgrade = bn & (np.gcd(r - 1, d * (r + 1) + 2 * g - 2) == 1)
    else:
        upgrade = np.zeros(bn.shape, dtype=bool)
    exceptions = _exception_cells(grid)
    base = raw_base.copy()
    frozen = np.zeros(bn.shape, dtype=bool)
    for dd, gg, status in exceptions:
        base[gg, dd] = status.level
        frozen[gg, dd] = True
    cofinal = rules.propagation is Propagation.COFINAL
    args = (base, frozen, bn, rnc_ok, upgrade, sdg, sda, skind, cofinal)
    if seed is not None:
        levels = kernels.pull_closure_numpy(*args, rng=np.random.default_rng(seed))
    elif backend == "numpy" or (backend == "auto" and not kernels.USE_NUMBA):
        levels = kernels.pull_closure_numpy(*args)
    elif backend in ("numba", "auto"):
        levels = kernels.pull_closure_numba(*args)
    else:
        raise ValueError(f"unknown backend {backend!r}")
    # what the rules would conclude at the registry points if they were not frozen
    if exceptions:
        wanted = kernels.apply_rules_numpy(levels, raw_base, bn, rnc_ok, upgrade, sdg, sda, skind, cofinal)
        for dd, gg, status in exceptions:
            got = Status.from_level(int(wanted[gg, dd]))
            if got.level > status.level:
                raise ConflictingStatus(f"rules derive {got.value} at ({dd},{gg},{r}), registry says {status.value}")
    return StatusMap(grid, rules, levels, budgets, exceptions)


# ---------------------------------------------------------------- queries


def guard_band(r: int) -> int:
    """Degree margin kept below ``d_max`` when reading thresholds."""
    return r * (r - 1) + min_line_budget(r * (r - 1), r).a


def thresholds_per_genus(smap: StatusMap, g: int, level: Status) -> int | None:
    """Least ``d`` certified at ``level`` together with every BN degree above it up to the guard band."""
    grid = smap.grid
    r = grid.r
    if g > grid.g_max - r * (r - 1) or g < 1:
        raise ValueError(f"genus {g} outside the guarded range [1, {grid.g_max - r * (r - 1)}]")
    hi = grid.d_max - guard_band(r)
    want = level.level
    d_min = next((d for d in range(grid.d_max + 1) if rho(d, g, r) >= 0), None)
    if d_min is None or hi < d_min:
        return None
    best = None
    for d in range(hi, d_min - 1, -1):
        if smap.status(d, g).level < want:
            break
        best = d
    return best


def unknown_pairs(smap: StatusMap, min_genus: int, level: Status) -> list[tuple[int, int]]:
    """Pairs left undecided at ``level``, sorted by genus then degree.

    Semistable level: uncertified BN points outside the registry.  Stable
    level: points certified semistable but not stable, again outside the
    registry.
    """
    out = []
    target = 0 if level.level <= 1 else 1
    for d, g in smap.points():
        if g < min_genus or (d, g) in smap.exceptions:
            continue
        if smap.level(d, g) == target:
            out.append((d, g))
    return sorted(out, key=lambda p: (p[1], p[0]))


@dataclass
class TableDiff:
    missing_from_engine: list[tuple[int, int]]
    extra_in_engine: list[tuple[int, int]]
    audit_certificates: list[CertificateNode] = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return not self.missing_from_engine and not self.extra_in_engine


def compare_tables(smap: StatusMap, reference, level: Status, min_genus: int = 2) -> TableDiff:
    """Set comparison of the engine's undecided pairs against a reference list.

    ``missing_from_engine``: reference pairs the engine decides (each gets an
    audit certificate).  ``extra_in_engine``: engine pairs absent from the
    reference.
    """
    ref = {tuple(p) for p in reference}
    ours = set(unknown_pairs(smap, min_genus, level))
    key = lambda p: (p[1], p[0])  # noqa: E731
    missing = sorted(ref - ours, key=key)
    extra = sorted(ours - ref, key=key)
    want = 1 if level.level <= 1 else 2
    audits = []
    for d, g in missing:
        if smap.grid.contains(d, g) and smap.level(d, g) >= want:
            audits.append(smap.certificate(d, g, want))
    return TableDiff(missing, extra, audits)


@dataclass(frozen=True)
class Violation:
    triple: Triple
    required: Status
    actual: Status
    reason: str


def crosscheck_closed_forms(smap: StatusMap, degree_only: bool = False) -> list[Violation]:
    """Grid points where a closed-form sufficient condition beats the closure."""
    r = smap.grid.r
    out = []
    for d, g in smap.points():
        t = Triple(d, g, r)
        have = smap.status(d, g)
        if (cf := closed_form_stable(t, degree_only)) is not None and have.level < 2:
            out.append(Violation(t, Status.CERT_STABLE, have, cf.name))
        elif (cf := closed_form_semistable(t, degree_only)) is not None and have.level < 1:
            out.append(Violation(t, Status.CERT_SEMISTABLE, have, cf.name))
    return out


# ---------------------------------------------------------- verification


def check_certificate(cert: CertificateNode) -> None:
    """Raise :class:`CertificateError` at the first node that does not re-derive."""
    seen: set[int] = set()
    stack = [cert]
    order = []
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        order.append(node)
        stack.extend(node.premises)
    for node in order:
        try:
            why = check_node(node)
        except Exception as exc:  # malformed parameters of any kind
            why = f"{type(exc).__name__}: {exc}"
        if why is not None:
            raise CertificateError(node, why)


def verify_certificate(cert: CertificateNode) -> bool:
    try:
        check_certificate(cert)
    except CertificateError:
        return False
    return True


def _to_obj(node: CertificateNode) -> dict[str, Any]:
    def plain(v):
        return [plain(x) for x in v] if isinstance(v, tuple) else v

    return {
        "d": node.triple.d,
        "g": node.triple.g,
        "r": node.triple.r,
        "status": node.status.value,
        "rule": node.rule.value,
        "params": {k: plain(v) for k, v in node.params},
        "premises": [_to_obj(p) for p in node.premises],
    }


def _from_obj(obj: dict[str, Any]) -> CertificateNode:
    return CertificateNode.make(
        Triple(obj["d"], obj["g"], obj["r"]),
        Status(obj["status"]),
        RuleId(obj["rule"]),
        obj.get("params", {}),
        [_from_obj(p) for p in obj.get("premises", [])],
    )


def certificate_to_json(node: CertificateNode) -> str:
    return json.dumps(_to_obj(node), sort_keys=True, separators=(",", ":"))


def certificate_from_json(text: str) -> CertificateNode:
    return _from_obj(json.loads(text))

"""Certification rules, exception registries and closed-form predicates.

Every rule is a pure function returning a :class:`CertificateNode` when it
fires and ``None`` otherwise.  :func:`check_node` re-derives a single node
from its parameters and premises; the closure module uses it to verify
whole trees.
"""
from __future__ import annotations

import enum
import functools
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, gcd
from typing import Any, Iterator

import numpy as np

from . import kernels
from .core import Status, Triple, normal_bundle_degree, rho, u_secancy
from .numtheory import LineBudget, b2, min_line_budget, split_witness

__all__ = [
    "Characteristic",
    "CertificateNode",
    "ClosedForm",
    "EllipticConfig",
    "InvalidBudget",
    "InvalidConfig",
    "RuleId",
    "SearchBudgetExceeded",
    "SearchConfig",
    "check_node",
    "closed_form_semistable",
    "closed_form_stable",
    "elliptic_base_levels",
    "enumerate_elliptic_configs",
    "exception_status",
    "row_genus_bound",
    "lines_rnc_degree_bound",
    "rule_coprime_upgrade",
    "rule_genus1",
    "rule_genus2",
    "rule_interpolation",
    "rule_special724",
    "search_elliptic_config",
    "semistable_genus_bound",
    "stable_genus_bound",
    "step_attach_lines",
    "step_attach_rnc",
    "validate_elliptic_config",
]


class InvalidConfig(ValueError):
    pass


class InvalidBudget(ValueError):
    pass


class SearchBudgetExceeded(RuntimeError):
    def __init__(self, message: str, fallback: CertificateNode | None = None):
        super().__init__(message)
        self.fallback = fallback


class RuleId(enum.Enum):
    INTERPOLATION = "Interpolation"
    GENUS1 = "Genus1"
    GENUS2_SEMISTABLE = "Genus2Semistable"
    GENUS2_STABLE_GCD = "Genus2StableGcd"
    GENUS2_STABLE_SPLIT = "Genus2StableSplit"
    GENUS2_STABLE_B2 = "Genus2StableB2"
    SPECIAL724 = "Special724"
    ELLIPTIC_CONFIG = "EllipticConfig"
    ATTACH_RNC = "AttachRNC"
    ATTACH_LINES = "AttachLines"
    COPRIME_UPGRADE = "CoprimeUpgrade"


class Characteristic(enum.Enum):
    GENERIC = "generic"
    TWO = "two"


def _freeze(value: Any) -> Any:
    if isinstance(value, (list, tuple)):
        return tuple(_freeze(v) for v in value)
    return value


@dataclass(frozen=True)
class CertificateNode:
    triple: Triple
    status: Status
    rule: RuleId
    params: tuple[tuple[str, Any], ...] = ()
    premises: tuple[CertificateNode, ...] = ()

    @classmethod
    def make(cls, triple, status, rule, params=None, premises=()):
        items = tuple(sorted((k, _freeze(v)) for k, v in (params or {}).items()))
        return cls(triple, status, rule, items, tuple(premises))

    @property
    def param_dict(self) -> dict[str, Any]:
        return dict(self.params)

    def size(self) -> int:
        """Number of distinct nodes in the (DAG-shared) tree."""
        seen: set[int] = set()
        stack = [self]
        while stack:
            n = stack.pop()
            if id(n) in seen:
                continue
            seen.add(id(n))
            stack.extend(n.premises)
        return len(seen)


# ------------------------------------------------------------- exceptions

KNOWN_UNSTABLE = {
    (5, 2, 3): "genus 2 curve on a rational surface scroll; the scroll normal line bundle destabilises",
    (6, 2, 4): "genus 2 curve on a rational surface scroll; the scroll normal line bundle destabilises",
    (7, 2, 5): "genus 2 curve on a rational surface scroll; the scroll normal line bundle destabilises",
    (8, 2, 6): "genus 2 curve on a rational surface scroll; the scroll normal line bundle destabilises",
    (6, 4, 3): "canonical genus 4 curve; the normal bundle in the quadric destabilises",
    (10, 6, 5): "canonical genus 6 curve; the normal bundle in the quintic del Pezzo destabilises",
}
KNOWN_STRICTLY_SEMISTABLE = {
    (8, 5, 4): "canonical genus 5 curve; complete intersection of three quadrics, normal bundle O(2)^3",
}
INTERPOLATION_EXCLUDED = frozenset({(5, 2, 3), (6, 4, 3), (7, 2, 5)})


def _key(t: Triple) -> tuple[int, int, int]:
    return (t.d, t.g, t.r)


def exception_status(t: Triple) -> Status | None:
    if _key(t) in KNOWN_UNSTABLE:
        return Status.KNOWN_UNSTABLE
    if _key(t) in KNOWN_STRICTLY_SEMISTABLE:
        return Status.KNOWN_STRICTLY_SEMISTABLE
    return None


def exception_reason(t: Triple) -> str | None:
    return KNOWN_UNSTABLE.get(_key(t)) or KNOWN_STRICTLY_SEMISTABLE.get(_key(t))


# ------------------------------------------------------------- base rules


def rule_interpolation(t: Triple) -> CertificateNode | None:
    if t.g < 1 or t.rho < 0 or _key(t) in INTERPOLATION_EXCLUDED:
        return None
    if (2 * t.d + 2 * t.g - 2) % (t.r - 1):
        return None
    return CertificateNode.make(t, Status.CERT_SEMISTABLE, RuleId.INTERPOLATION)


def rule_genus1(t: Triple) -> CertificateNode | None:
    if t.g != 1 or t.d < t.r + 1:
        return None
    return CertificateNode.make(t, Status.CERT_SEMISTABLE, RuleId.GENUS1)


def genus2_restriction_degree(d: int, r: int) -> int:
    """Degree of the normal bundle restricted to the elliptic component of the genus-2 degeneration."""
    return (d - r + 1) * (r + 1) + 2


def rule_genus2(t: Triple) -> CertificateNode | None:
    d, g, r = t.d, t.g, t.r
    if g != 2 or r < 4:
        return None
    bound = b2(r)
    if d >= bound:
        w = split_witness(d, r)
        return CertificateNode.make(
            t, Status.CERT_STABLE, RuleId.GENUS2_STABLE_B2, {"b2": bound, "d1": w.d1, "d2": w.d2}
        )
    w = split_witness(d, r)
    if w is not None:
        return CertificateNode.make(t, Status.CERT_STABLE, RuleId.GENUS2_STABLE_SPLIT, {"d1": w.d1, "d2": w.d2})
    if d < 2 * r:
        return None
    deg = genus2_restriction_degree(d, r)
    if gcd(r - 1, deg) == 1:
        return CertificateNode.make(
            t, Status.CERT_STABLE, RuleId.GENUS2_STABLE_GCD, {"elliptic_degree": d - r + 1, "restricted_degree": deg}
        )
    return CertificateNode.make(t, Status.CERT_SEMISTABLE, RuleId.GENUS2_SEMISTABLE)


def rule_special724(t: Triple, ch: Characteristic = Characteristic.GENERIC) -> CertificateNode | None:
    if _key(t) != (7, 2, 4) or ch is not Characteristic.GENERIC:
        return None
    return CertificateNode.make(t, Status.CERT_STABLE, RuleId.SPECIAL724, {"characteristic": ch.value})


def rule_coprime_upgrade(node: CertificateNode) -> CertificateNode | None:
    """A semistable bundle of degree prime to its rank is stable."""
    t = node.triple
    if node.status is not Status.CERT_SEMISTABLE:
        return None
    deg = normal_bundle_degree(t.d, t.g, t.r)
    if gcd(t.r - 1, deg) != 1:
        return None
    return CertificateNode.make(t, Status.CERT_STABLE, RuleId.COPRIME_UPGRADE, {"degree": deg}, (node,))


# ------------------------------------------------ elliptic configurations


@dataclass(frozen=True)
class EllipticConfig:
    """Satellite elliptic curves ``(e_i, j_i)`` each ``j_i``-secant to a centre of degree ``e0``."""

    parts: tuple[tuple[int, int], ...]
    center_degree: int

    def __post_init__(self) -> None:
        parts = tuple(sorted((tuple(p) for p in self.parts), key=lambda p: (-p[1], -p[0])))
        object.__setattr__(self, "parts", parts)

    @property
    def total_degree(self) -> int:
        return self.center_degree + sum(e for e, _ in self.parts)

    @property
    def total_secancy(self) -> int:
        return sum(j for _, j in self.parts)


def elliptic_config_violation(t: Triple, cfg: EllipticConfig) -> str | None:
    r = t.r
    e0 = cfg.center_degree
    if not cfg.parts:
        return "configuration has no satellite curves"
    if cfg.total_degree != t.d:
        return f"e0 + sum e_i = {cfg.total_degree} != d = {t.d}"
    if e0 < r + 1:
        return f"centre degree e0={e0} < r+1={r + 1}"
    if cfg.total_secancy != t.g - 1:
        return f"sum j_i = {cfg.total_secancy} != g-1 = {t.g - 1}"
    u0 = u_secancy(e0, r)
    for e, j in cfg.parts:
        if e < r + 1:
            return f"satellite degree {e} < r+1={r + 1}"
        if j < 1:
            return f"secancy {j} < 1"
        if j > u_secancy(e, r):
            return f"j={j} > u_secancy({e},{r})={u_secancy(e, r)}"
        if j > u0:
            return f"j={j} > u_secancy(e0={e0},{r})={u0}"
    return None


def _config_status(cfg: EllipticConfig, r: int) -> Status:
    m = r - 1
    if any(gcd(m, 2 * e + j) == 1 for e, j in cfg.parts):
        return Status.CERT_STABLE
    if gcd(m, 2 * cfg.center_degree + cfg.total_secancy) == 1:
        return Status.CERT_STABLE
    return Status.CERT_SEMISTABLE


def _config_node(t: Triple, cfg: EllipticConfig, source: str) -> CertificateNode:
    return CertificateNode.make(
        t,
        _config_status(cfg, t.r),
        RuleId.ELLIPTIC_CONFIG,
        {"parts": cfg.parts, "e0": cfg.center_degree, "source": source},
    )


def validate_elliptic_config(t: Triple, cfg: EllipticConfig) -> CertificateNode:
    if t.g < 2 or t.r < 4:
        raise InvalidConfig(f"elliptic configurations need g >= 2 and r >= 4, got {t}")
    why = elliptic_config_violation(t, cfg)
    if why is not None:
        raise InvalidConfig(why)
    return _config_node(t, cfg, "given")


@dataclass(frozen=True)
class SearchConfig:
    """How :func:`search_elliptic_config` explores configurations.

    ``method="dp"`` is exact and uncapped.  ``method="enumerate"`` walks
    partitions explicitly under the two caps and falls back to the canonical
    families (or raises, with ``on_budget="raise"``) when a cap is hit.
    """

    method: str = "dp"
    max_parts: int = 8
    max_configs: int = 500_000
    on_budget: str = "fallback"


def canonical_configs(t: Triple) -> list[EllipticConfig]:
    """The uniform-secancy family and its stable variant with a split-degree satellite."""
    d, g, r = t.d, t.g, t.r
    out = []
    if g < 2 or r < 4:
        return out
    u = u_secancy(r + 1, r)
    k = -(-(g - 1) // u)
    last = g - 1 - (k - 1) * u
    parts = [(r + 1, u)] * (k - 1) + [(r + 1, last)]
    e0 = d - k * (r + 1)
    cfg = EllipticConfig(tuple(parts), e0)
    if elliptic_config_violation(t, cfg) is None:
        out.append(cfg)
    d1 = b2(r) - r - 1
    parts = [(r + 1, u)] * (k - 1) + ([(r + 1, last - 1)] if last > 1 else []) + [(d1, 1)]
    cfg = EllipticConfig(tuple(parts), d - sum(e for e, _ in parts))
    if elliptic_config_violation(t, cfg) is None:
        out.append(cfg)
    return out


def _rank(node: CertificateNode) -> tuple:
    parts = node.param_dict["parts"]
    return (-node.status.level, tuple(-j for _, j in parts), tuple(e for e, _ in parts))


def _best(nodes: list[CertificateNode]) -> CertificateNode | None:
    return min(nodes, key=_rank) if nodes else None


def _partitions(n: int, largest: int, max_parts: int) -> Iterator[tuple[int, ...]]:
    if n == 0:
        yield ()
        return
    if max_parts == 0:
        return
    for a in range(min(n, largest), 0, -1):
        for rest in _partitions(n - a, a, max_parts - 1):
            yield (a,) + rest


def enumerate_elliptic_configs(t: Triple, max_parts: int = 8, max_configs: int = 500_000) -> Iterator[EllipticConfig]:
    """Every windowed configuration for ``t`` (the brute-force oracle for the DP)."""
    d, g, r = t.d, t.g, t.r
    m = r - 1
    count = 0
    for parts in _partitions(g - 1, g - 1, max_parts):
        lows = [kernels.min_elliptic_degree(a, r) for a in parts]
        budget = d - max(r + 1, lows[0])
        if sum(lows) > budget:
            continue
        for shifts in itertools.product(range(m), repeat=len(parts)):
            degrees = [lo + s for lo, s in zip(lows, shifts)]
            if sum(degrees) > budget:
                continue
            count += 1
            if count > max_configs:
                raise SearchBudgetExceeded(f"more than {max_configs} configurations for {t}")
            yield EllipticConfig(tuple(zip(degrees, parts)), d - sum(degrees))


@functools.lru_cache(maxsize=32)
def _tables(r: int, jmax: int):
    return kernels.elliptic_tables(r, jmax)


def _tables_for(r: int, j: int):
    return _tables(r, max(32, -(-j // 32) * 32))


def _reconstruct(r: int, J: int, res: int, fl: int) -> list[tuple[int, int]]:
    """Satellites ``(e, j)`` realising ``need[J, res, fl]``."""
    G, need, choice = _tables_for(r, J)
    M = r - 1
    m, e1, res, fl = (int(x) for x in choice[J, res, fl])
    parts = [(e1, m)]
    J -= m
    while J > 0:
        val = G[m, J, res, fl]
        if G[m - 1, J, res, fl] == val:
            m -= 1
            continue
        lo = kernels.min_elliptic_degree(m, r)
        for e in range(lo, lo + M):
            cp = int(gcd(M, 2 * e + m) == 1)
            prev = (res - e) % M
            hit = None
            for pf in (0, 1):
                if (pf | cp) == fl and G[m, J - m, prev, pf] + e == val:
                    hit = pf
                    break
            if hit is not None:
                parts.append((e, m))
                J, res, fl = J - m, prev, hit
                break
        else:  # pragma: no cover - tables are self-consistent
            raise AssertionError("elliptic table backtrack failed")
    return parts


def _dp_search(t: Triple) -> CertificateNode | None:
    d, g, r = t.d, t.g, t.r
    M = r - 1
    J = g - 1
    _, need, _ = _tables_for(r, J)
    row = need[J]
    picks = []
    for res in range(M):
        for fl in (1, 0):
            if row[res, fl] > d:
                continue
            stable = fl == 1 or gcd(M, 2 * d - 2 * res + J) == 1
            picks.append((0 if stable else 1, res, fl))
    if not picks:
        return None
    _, res, fl = min(picks)
    parts = _reconstruct(r, J, res, fl)
    cfg = EllipticConfig(tuple(parts), d - sum(e for e, _ in parts))
    return _config_node(t, cfg, "search")


def search_elliptic_config(t: Triple, search: SearchConfig | None = None) -> CertificateNode | None:
    search = search or SearchConfig()
    if t.g < 2 or t.r < 4 or t.rho < 0:
        return None
    found = [_config_node(t, c, "canonical") for c in canonical_configs(t)]
    if search.method == "dp":
        node = _dp_search(t)
        if node is not None:
            found.append(node)
        return _best(found)
    if search.method != "enumerate":
        raise ValueError(f"unknown search method {search.method!r}")
    try:
        for cfg in enumerate_elliptic_configs(t, search.max_parts, search.max_configs):
            found.append(_config_node(t, cfg, "search"))
    except SearchBudgetExceeded as exc:
        fallback = _best([n for n in found if n.param_dict["source"] == "canonical"])
        if search.on_budget == "raise":
            raise SearchBudgetExceeded(str(exc), fallback) from None
        return fallback
    return _best(found)


def elliptic_base_levels(r: int, g_max: int, d_max: int) -> np.ndarray:
    """Level (0/1/2) reached by some elliptic configuration at every ``(g, d)``."""
    out = np.zeros((g_max + 1, d_max + 1), dtype=np.int8)
    if r < 4 or g_max < 2:
        return out
    M = r - 1
    _, need, _ = _tables_for(r, g_max - 1)
    d = np.arange(d_max + 1)
    for g in range(2, g_max + 1):
        J = g - 1
        row = need[J]
        semi = d >= row.min()
        stable = d >= row[:, 1].min()
        for res in range(M):
            centre = np.gcd(M, 2 * d - 2 * res + J) == 1
            stable |= centre & (d >= row[res].min())
        out[g] = np.where(stable, 2, np.where(semi, 1, 0))
    return out


# ------------------------------------------------------------- step rules


def rnc_shift(r: int) -> tuple[int, int]:
    """``(degree, genus)`` added by attaching the rational normal curves."""
    return (r - 1) ** 2, r * (r - 1)


def step_attach_rnc(node: CertificateNode) -> CertificateNode | None:
    t = node.triple
    if node.status.level < 1 or node.status.is_terminal:
        return None
    if t.rho < t.r - 1:
        return None
    dd, dg = rnc_shift(t.r)
    target = Triple(t.d + dd, t.g + dg, t.r)
    return CertificateNode.make(target, node.status, RuleId.ATTACH_RNC, {}, (node,))


def step_attach_lines(node: CertificateNode, budget: LineBudget) -> CertificateNode | None:
    t = node.triple
    why = budget.violation(t.r)
    if why is not None:
        raise InvalidBudget(why)
    if node.status.level < 1 or node.status.is_terminal:
        return None
    target = Triple(t.d + budget.a, t.g + budget.b, t.r)
    return CertificateNode.make(
        target, node.status, RuleId.ATTACH_LINES, {"a": budget.a, "b": budget.b, "c": budget.c}, (node,)
    )


# ------------------------------------------------------------- re-checking


def _expect_same(node: CertificateNode, derived: CertificateNode | None) -> str | None:
    if derived is None:
        return f"{node.rule.value} does not fire at {node.triple}"
    if derived.status is not node.status:
        return f"{node.rule.value} derives {derived.status.value}, node claims {node.status.value}"
    if derived.params != node.params:
        return f"{node.rule.value} parameters {node.param_dict} do not match {derived.param_dict}"
    return None


def check_node(node: CertificateNode) -> str | None:
    """The first reason ``node`` fails to re-derive from its parameters and premises, or ``None``.

    Premises are checked only through their recorded conclusions; recursion
    lives in the closure module.
    """
    t = node.triple
    if t.rho < 0:
        return f"{t} is not a Brill-Noether triple"
    exc = exception_status(t)
    if exc is Status.KNOWN_UNSTABLE:
        return f"{t} is known unstable"
    if exc is Status.KNOWN_STRICTLY_SEMISTABLE and node.status is Status.CERT_STABLE:
        return f"{t} is known strictly semistable"
    p = node.param_dict
    rule = node.rule
    premise_rules = {RuleId.ATTACH_RNC, RuleId.ATTACH_LINES, RuleId.COPRIME_UPGRADE}
    if (rule in premise_rules) != (len(node.premises) == 1) or (rule not in premise_rules and node.premises):
        return f"{rule.value} has {len(node.premises)} premises"
    if rule is RuleId.INTERPOLATION:
        return _expect_same(node, rule_interpolation(t))
    if rule is RuleId.GENUS1:
        return _expect_same(node, rule_genus1(t))
    if rule in (
        RuleId.GENUS2_SEMISTABLE,
        RuleId.GENUS2_STABLE_GCD,
        RuleId.GENUS2_STABLE_SPLIT,
        RuleId.GENUS2_STABLE_B2,
    ):
        return _check_genus2(node)
    if rule is RuleId.SPECIAL724:
        try:
            ch = Characteristic(p.get("characteristic"))
        except ValueError:
            return f"unknown characteristic {p.get('characteristic')!r}"
        return _expect_same(node, rule_special724(t, ch))
    if rule is RuleId.ELLIPTIC_CONFIG:
        try:
            cfg = EllipticConfig(tuple(tuple(x) for x in p["parts"]), int(p["e0"]))
        except (KeyError, TypeError, ValueError) as exc_:
            return f"malformed elliptic parameters: {exc_}"
        if t.g < 2 or t.r < 4:
            return "elliptic configurations need g >= 2 and r >= 4"
        why = elliptic_config_violation(t, cfg)
        if why is not None:
            return why
        if _config_status(cfg, t.r) is not node.status:
            return f"configuration derives {_config_status(cfg, t.r).value}, node claims {node.status.value}"
        return None
    src = node.premises[0]
    if src.triple.r != t.r:
        return "premise lives in a different projective space"
    if rule is RuleId.ATTACH_RNC:
        if src.triple.rho < t.r - 1:
            return f"source rho={src.triple.rho} < r-1={t.r - 1}"
        return _expect_same(node, step_attach_rnc(src))
    if rule is RuleId.ATTACH_LINES:
        try:
            budget = LineBudget(int(p["a"]), int(p["b"]), int(p["c"]))
        except (KeyError, TypeError, ValueError) as exc_:
            return f"malformed line budget: {exc_}"
        why = budget.violation(t.r)
        if why is not None:
            return why
        return _expect_same(node, step_attach_lines(src, budget))
    if rule is RuleId.COPRIME_UPGRADE:
        if src.triple != t:
            return "upgrade premise concerns a different triple"
        return _expect_same(node, rule_coprime_upgrade(src))
    return f"unknown rule {rule!r}"  # pragma: no cover


def _check_genus2(node: CertificateNode) -> str | None:
    t = node.triple
    if t.g != 2 or t.r < 4:
        return "genus-2 rules need g = 2 and r >= 4"
    p = node.param_dict
    d, r = t.d, t.r
    if node.rule is RuleId.GENUS2_SEMISTABLE:
        ok, status = d >= 2 * r, Status.CERT_SEMISTABLE
    elif node.rule is RuleId.GENUS2_STABLE_GCD:
        deg = genus2_restriction_degree(d, r)
        ok = d >= 2 * r and gcd(r - 1, deg) == 1 and p.get("restricted_degree") == deg
        status = Status.CERT_STABLE
    else:
        from .numtheory import SplitWitness

        w = SplitWitness(p.get("d1", -1), p.get("d2", -1))
        ok = w.is_valid(d, r)
        if node.rule is RuleId.GENUS2_STABLE_B2:
            ok = ok and p.get("b2") == b2(r) and d >= b2(r)
        status = Status.CERT_STABLE
    if not ok:
        return f"{node.rule.value} preconditions fail at {t} with {p}"
    if node.status is not status:
        return f"{node.rule.value} derives {status.value}, node claims {node.status.value}"
    return None


# ------------------------------------------------------------- closed forms


@dataclass(frozen=True)
class ClosedForm:
    """A closed-form sufficient condition that fired, with the bound it compared against."""

    name: str
    bound: Fraction = field(default=Fraction(0))


def _ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def row_genus_bound(d0: int, g0: int, r: int) -> int:
    """Genus beyond which a row certified from ``d0`` on certifies every BN triple."""
    q0 = _ceil(Fraction(2 * rho(d0, g0, r) + 5 * r * r - 7 * r - 2, 2 * (r - 1)))
    return g0 + comb(r - 1, 2) + q0 * r * (r - 1) + 1


def semistable_genus_bound(r: int) -> int:
    return comb(r - 1, 2) + 2 + _ceil(Fraction(5 * r * r - 7 * r, 2 * (r - 1))) * r * (r - 1)


def stable_genus_bound(r: int) -> int:
    q = _ceil(Fraction(2 * (r + 1) * b2(r) + 3 * r * r - 13 * r - 2, 2 * (r - 1)))
    return comb(r - 1, 2) + 3 + q * r * (r - 1)


def lines_rnc_degree_bound(g: int, r: int, g0: int, d0: int) -> int | None:
    """Least ``d`` reached from a row ``g0`` certified on ``d >= d0`` by lines then rational curves.

    Minimises ``d0 + a_b + q(r-1)^2`` over ``g = g0 + q r(r-1) + b`` with
    ``q, b >= 0``; ``None`` when ``g < g0``.
    """
    if g < g0:
        return None
    dd, dg = rnc_shift(r)
    best = None
    q = 0
    while g0 + q * dg <= g:
        b = g - g0 - q * dg
        cand = d0 + min_line_budget(b, r).a + q * dd
        best = cand if best is None else min(best, cand)
        q += 1
    return best


def _elliptic_genus_slope(g: int, r: int) -> Fraction:
    return Fraction(2 * (r * r - 1) * (g - 1), r * r + 3)


def closed_form_semistable(t: Triple, degree_only: bool = False) -> ClosedForm | None:
    """A closed-form reason ``t`` is semistable, or ``None``.

    With ``degree_only`` the genus-only conditions are skipped.
    """
    d, g, r = t.d, t.g, t.r
    if t.rho < 0 or g < 1:
        return None
    if g == 1 and not degree_only:
        return ClosedForm("genus-one")
    if not degree_only and g >= semistable_genus_bound(r):
        return ClosedForm("genus-bound", Fraction(semistable_genus_bound(r)))
    u = u_secancy(r + 1, r)
    k = -(-(g - 1) // u)
    candidates = [
        ("lines-and-rnc", Fraction(g) + Fraction(r * r, 4) + 2 * r - 3),
        ("elliptic-blocks", Fraction((k + 1) * (r + 1))),
        ("linear", Fraction((g - 1) * (2 * r - 3) + r + 1)),
        ("elliptic-blocks-genus-only", _elliptic_genus_slope(g, r) + 2 * r + 2),
    ]
    exact = lines_rnc_degree_bound(g, r, 1, r + 1)
    if exact is not None:
        candidates.append(("lines-and-rnc-exact", Fraction(exact)))
    for name, bound in candidates:
        if d >= bound:
            return ClosedForm(name, bound)
    return None


def closed_form_stable(t: Triple, degree_only: bool = False) -> ClosedForm | None:
    d, g, r = t.d, t.g, t.r
    if t.rho < 0 or g < 2 or r < 4:
        return None
    if not degree_only and g >= stable_genus_bound(r):
        return ClosedForm("genus-bound", Fraction(stable_genus_bound(r)))
    u = u_secancy(r + 1, r)
    k = -(-(g - 1) // u)
    base = b2(r)
    candidates = [
        ("lines-and-rnc", base + Fraction(g) + Fraction(r * r, 4) + r - 5),
        ("elliptic-blocks", Fraction(base + k * (r + 1))),
        ("linear", Fraction(base + (g - 1) * (2 * r - 3))),
        ("elliptic-blocks-genus-only", _elliptic_genus_slope(g, r) + base + r + 1),
    ]
    exact = lines_rnc_degree_bound(g, r, 2, base)
    if exact is not None:
        candidates.append(("lines-and-rnc-exact", Fraction(exact)))
    for name, bound in candidates:
        if d >= bound:
            return ClosedForm(name, bound)
    return None

"""Basic numerical objects attached to a Brill-Noether triple.

Everything here is exact: slopes are :class:`fractions.Fraction` values and
no floating point is ever involved.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

__all__ = [
    "ConflictingStatus",
    "NodalSubbundleDatum",
    "Status",
    "Triple",
    "adjusted_slope",
    "farey_consecutive",
    "genus_block_index",
    "normal_bundle_degree",
    "normal_bundle_slope",
    "normal_slope_gap",
    "rho",
    "subbundle_slope_gap",
    "u_secancy",
]


class ConflictingStatus(ValueError):
    """A rule tried to move a terminal (known) status."""


def rho(d: int, g: int, r: int) -> int:
    """Brill-Noether number ``g - (r+1)(g - d + r)``."""
    return g - (r + 1) * (g - d + r)


@dataclass(frozen=True, order=True)
class Triple:
    d: int
    g: int
    r: int

    def __post_init__(self) -> None:
        if self.d < 0 or self.g < 0:
            raise ValueError(f"degree and genus must be nonnegative: {self}")
        if self.r < 3:
            raise ValueError(f"ambient dimension must be at least 3: {self}")

    @property
    def rho(self) -> int:
        return rho(self.d, self.g, self.r)

    @property
    def is_bn(self) -> bool:
        return self.rho >= 0

    def __str__(self) -> str:
        return f"({self.d},{self.g},{self.r})"


class Status(enum.Enum):
    """Certification status of a grid point.

    ``UNKNOWN < CERT_SEMISTABLE < CERT_STABLE`` is the lattice the closure
    climbs.  The two ``KNOWN_*`` values are terminal registry marks.
    """

    UNKNOWN = "unknown"
    CERT_SEMISTABLE = "semistable"
    CERT_STABLE = "stable"
    KNOWN_UNSTABLE = "known-unstable"
    KNOWN_STRICTLY_SEMISTABLE = "known-strictly-semistable"

    @property
    def is_terminal(self) -> bool:
        return self in (Status.KNOWN_UNSTABLE, Status.KNOWN_STRICTLY_SEMISTABLE)

    @property
    def level(self) -> int:
        """Lattice height used for comparisons: 0, 1 or 2.

        A strictly semistable triple counts as semistable, an unstable one
        as nothing.
        """
        return _LEVEL[self]

    def at_least(self, other: Status) -> bool:
        return self.level >= other.level

    def join(self, other: Status) -> Status:
        if self is other:
            return self
        if self.is_terminal and other.is_terminal:
            raise ConflictingStatus(f"{self.name} vs {other.name}")
        if self.is_terminal or other.is_terminal:
            terminal, incoming = (self, other) if self.is_terminal else (other, self)
            if incoming.level > terminal.level:
                raise ConflictingStatus(f"cannot raise {terminal.name} to {incoming.name}")
            return terminal
        return self if self.level >= other.level else other

    @classmethod
    def from_level(cls, level: int) -> Status:
        return (cls.UNKNOWN, cls.CERT_SEMISTABLE, cls.CERT_STABLE)[level]


_LEVEL = {
    Status.UNKNOWN: 0,
    Status.CERT_SEMISTABLE: 1,
    Status.CERT_STABLE: 2,
    Status.KNOWN_UNSTABLE: 0,
    Status.KNOWN_STRICTLY_SEMISTABLE: 1,
}


def normal_bundle_degree(d: int, g: int, r: int) -> int:
    return d * (r + 1) + 2 * g - 2


def normal_bundle_slope(d: int, g: int, r: int) -> Fraction:
    """Slope of the rank ``r-1`` normal bundle, as an exact fraction."""
    if r < 3:
        raise ValueError("r must be at least 3")
    return Fraction(normal_bundle_degree(d, g, r), r - 1)


def u_secancy(e: int, r: int) -> int:
    """Largest secancy ``floor((r+1)e / (2(r-1)))`` usable for a degree-``e`` elliptic curve."""
    if e < 1 or r < 3:
        raise ValueError(f"need e >= 1 and r >= 3, got e={e}, r={r}")
    return (r + 1) * e // (2 * (r - 1))


def genus_block_index(g: int, r: int) -> int:
    """The ``k >= 0`` with ``(k-1)u < g-1 <= ku``, where ``u = u_secancy(r+1, r)``."""
    if g < 1:
        raise ValueError("genus must be at least 1")
    u = u_secancy(r + 1, r)
    return -(-(g - 1) // u)


@dataclass(frozen=True)
class NodalSubbundleDatum:
    """The integers entering the adjusted slope of a subbundle on a nodal curve."""

    sub_rank: int
    sub_degree: int
    node_codims: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.sub_rank < 1:
            raise ValueError("subbundle rank must be positive")
        object.__setattr__(self, "node_codims", tuple(self.node_codims))
        for c in self.node_codims:
            if not 0 <= c <= self.sub_rank:
                raise ValueError(f"codimension {c} outside [0, {self.sub_rank}]")


def adjusted_slope(datum: NodalSubbundleDatum) -> Fraction:
    return Fraction(datum.sub_degree - sum(datum.node_codims), datum.sub_rank)


def farey_consecutive(lo: Fraction, hi: Fraction, n: int) -> bool:
    """Whether ``lo < hi`` are neighbours in the Farey sequence of order ``n``."""
    lo, hi = Fraction(lo), Fraction(hi)
    if n < 1:
        raise ValueError("order must be positive")
    if not lo < hi:
        raise ValueError(f"need lo < hi, got {lo} and {hi}")
    if lo.denominator > n or hi.denominator > n:
        raise ValueError(f"denominators of {lo}, {hi} exceed order {n}")
    # unit cross-difference alone admits 0/1, 1/1 at order 2; the mediant must be excluded too
    return (
        hi.numerator * lo.denominator - lo.numerator * hi.denominator == 1
        and lo.denominator + hi.denominator > n
    )


def fractions_between(lo: Fraction, hi: Fraction, n: int) -> Sequence[Fraction]:
    """All fractions with denominator at most ``n`` strictly between ``lo`` and ``hi``.

    Brute force; used to check :func:`farey_consecutive`.
    """
    out = set()
    for q in range(1, n + 1):
        p = (lo.numerator * q) // lo.denominator
        while Fraction(p, q) < hi:
            f = Fraction(p, q)
            if lo < f:
                out.add(f)
            p += 1
    return sorted(out)


def subbundle_slope_gap(a: int, s: int, e: int, n: int, delta: int) -> Fraction:
    """Slope change of a rank-``s`` subbundle when a degree-``e`` curve meeting it ``n`` extra times is attached."""
    if s < 1:
        raise ValueError("rank must be positive")
    return Fraction(a + s * e + delta, s) - Fraction(a - n * s + delta, s)


def normal_slope_gap(deg_n: int, n: int, e: int, r: int) -> Fraction:
    """The matching change of the normal bundle slope."""
    if r < 3:
        raise ValueError("r must be at least 3")
    return Fraction(deg_n + 2 * n + e * (r - 1), r - 1) - Fraction(deg_n - n * (r - 3), r - 1)

"""Rule-based certification of (semi)stable normal bundles of Brill-Noether curves."""
from __future__ import annotations

from .core import ConflictingStatus, Status, Triple, normal_bundle_degree, normal_bundle_slope, rho
from .numtheory import b2, min_line_budget, split_witness
from .rules import Characteristic, CertificateNode, RuleId

__all__ = [
    "Characteristic",
    "CertificateNode",
    "ConflictingStatus",
    "RuleId",
    "Status",
    "Triple",
    "b2",
    "min_line_budget",
    "normal_bundle_degree",
    "normal_bundle_slope",
    "rho",
    "split_witness",
]

__version__ = "0.1.0"

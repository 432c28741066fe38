from __future__ import annotations

import dataclasses

import pytest

from bnstab.core import Status, Triple
from bnstab.numtheory import LineBudget
from bnstab.rules import (
    Characteristic,
    CertificateNode,
    EllipticConfig,
    InvalidBudget,
    InvalidConfig,
    RuleId,
    SearchBudgetExceeded,
    SearchConfig,
    check_node,
    closed_form_semistable,
    closed_form_stable,
    elliptic_base_levels,
    enumerate_elliptic_configs,
    exception_status,
    row_genus_bound,
    lines_rnc_degree_bound,
    rule_coprime_upgrade,
    rule_genus1,
    rule_genus2,
    rule_interpolation,
    rule_special724,
    search_elliptic_config,
    semistable_genus_bound,
    stable_genus_bound,
    step_attach_lines,
    step_attach_rnc,
    validate_elliptic_config,
)
from oracles import base_level, elliptic_best

T = Triple


def test_interpolation():
    assert rule_interpolation(T(12, 7, 4)).status is Status.CERT_SEMISTABLE
    assert rule_interpolation(T(5, 2, 3)) is None
    assert rule_interpolation(T(6, 4, 3)) is None
    assert rule_interpolation(T(7, 2, 5)) is None
    assert rule_interpolation(T(7, 2, 4)) is None
    assert rule_interpolation(T(3, 2, 4)) is None


def test_genus1():
    assert rule_genus1(T(5, 1, 4)).status is Status.CERT_SEMISTABLE
    assert rule_genus1(T(4, 1, 4)) is None
    assert rule_genus1(T(100, 1, 9)) is not None
    assert rule_genus1(T(10, 2, 4)) is None


def test_genus2_branches():
    n = rule_genus2(T(9, 2, 4))
    assert (n.status, n.rule) == (Status.CERT_STABLE, RuleId.GENUS2_STABLE_GCD)
    assert n.param_dict["restricted_degree"] == 32
    n = rule_genus2(T(8, 2, 4))
    assert (n.status, n.rule) == (Status.CERT_SEMISTABLE, RuleId.GENUS2_SEMISTABLE)
    n = rule_genus2(T(10, 2, 4))
    assert (n.status, n.rule) == (Status.CERT_STABLE, RuleId.GENUS2_STABLE_B2)
    assert n.param_dict == {"b2": 10, "d1": 5, "d2": 5}
    assert rule_genus2(T(7, 2, 4)) is None
    assert rule_genus2(T(6, 2, 3)) is None
    # 14 = 7 + 7 fails (gcd(5, 15) = 5) and the restricted degree 65 is not prime to 5
    assert rule_genus2(T(14, 2, 6)).rule is RuleId.GENUS2_SEMISTABLE


def test_split_exists_exactly_from_b2():
    from bnstab.numtheory import b2, split_witness

    for r in range(4, 60):
        for d in range(0, 5 * r):
            assert (split_witness(d, r) is not None) == (d >= b2(r))
            n = rule_genus2(T(d, 2, r))
            if n is not None:
                assert n.rule is not RuleId.GENUS2_STABLE_SPLIT
                assert check_node(n) is None


def test_special724():
    n = rule_special724(T(7, 2, 4), Characteristic.GENERIC)
    assert n.status is Status.CERT_STABLE and n.param_dict["characteristic"] == "generic"
    assert rule_special724(T(7, 2, 4), Characteristic.TWO) is None
    assert rule_special724(T(7, 2, 5), Characteristic.GENERIC) is None


def test_exception_registry():
    for t in [(6, 2, 4), (5, 2, 3), (7, 2, 5), (8, 2, 6), (6, 4, 3), (10, 6, 5)]:
        assert exception_status(T(*t)) is Status.KNOWN_UNSTABLE
    assert exception_status(T(8, 5, 4)) is Status.KNOWN_STRICTLY_SEMISTABLE
    assert exception_status(T(7, 2, 4)) is None


def test_validate_elliptic_config():
    n = validate_elliptic_config(T(12, 6, 4), EllipticConfig(((6, 5),), 6))
    assert n.status is Status.CERT_STABLE
    n = validate_elliptic_config(T(11, 3, 4), EllipticConfig(((6, 2),), 5))
    assert n.status is Status.CERT_STABLE
    with pytest.raises(InvalidConfig, match="u_secancy"):
        validate_elliptic_config(T(10, 6, 4), EllipticConfig(((5, 5),), 5))
    with pytest.raises(InvalidConfig):
        validate_elliptic_config(T(12, 6, 4), EllipticConfig(((6, 5),), 5))
    with pytest.raises(InvalidConfig):
        validate_elliptic_config(T(12, 1, 4), EllipticConfig(((6, 5),), 6))


def test_search_elliptic_examples():
    n = search_elliptic_config(T(15, 7, 4))
    assert n.status is Status.CERT_STABLE
    assert n.param_dict["parts"] == ((5, 4), (5, 2)) and n.param_dict["e0"] == 5
    n = search_elliptic_config(T(10, 5, 4))
    assert n.param_dict["parts"] == ((5, 4),) and n.status is Status.CERT_STABLE
    assert search_elliptic_config(T(9, 3, 4)) is None
    assert search_elliptic_config(T(20, 1, 4)) is None


def test_search_matches_unwindowed_oracle():
    for r in (4, 5, 6):
        for g in range(2, 11):
            for d in range(r + 1, 8 * r):
                t = T(d, g, r)
                if t.rho < 0:
                    continue
                n = search_elliptic_config(t)
                got = 0 if n is None else n.status.level
                assert got == elliptic_best(d, g, r), t
                if n is not None:
                    assert check_node(n) is None


def test_dp_and_enumeration_agree():
    for g in range(2, 9):
        for d in range(5, 30):
            t = T(d, g, 4)
            if t.rho < 0:
                continue
            a = search_elliptic_config(t)
            b = search_elliptic_config(t, SearchConfig(method="enumerate"))
            assert (a is None) == (b is None)
            if a is not None:
                # witnesses may differ; the reachable status may not
                assert a.status is b.status
                assert check_node(a) is None and check_node(b) is None


def test_enumeration_budget():
    t = T(60, 30, 4)
    with pytest.raises(SearchBudgetExceeded) as exc:
        search_elliptic_config(t, SearchConfig(method="enumerate", max_configs=10, on_budget="raise"))
    assert exc.value.fallback is not None
    assert exc.value.fallback.param_dict["source"] == "canonical"
    n = search_elliptic_config(t, SearchConfig(method="enumerate", max_configs=10))
    assert n.param_dict["source"] == "canonical"
    with pytest.raises(SearchBudgetExceeded):
        list(enumerate_elliptic_configs(t, max_configs=10))
    with pytest.raises(ValueError):
        search_elliptic_config(T(15, 7, 4), SearchConfig(method="magic"))


def test_elliptic_base_levels_match_search():
    for r in (4, 5, 7):
        lv = elliptic_base_levels(r, 14, 10 * r)
        for g in range(2, 15):
            for d in range(10 * r + 1):
                t = T(d, g, r)
                if t.rho < 0:
                    continue
                n = search_elliptic_config(t)
                assert lv[g, d] == (0 if n is None else n.status.level), t


def test_base_levels_agree_with_oracle():
    from bnstab.closure import Grid, FULL_RULES, _base_levels

    for ch in Characteristic:
        grid = Grid(4, 40, 10, ch)
        base = _base_levels(grid, FULL_RULES, grid.bn_mask())
        for d, g in ((d, g) for g in range(1, 11) for d in range(41)):
            if grid.contains(d, g):
                assert base[g, d] == base_level(d, g, 4, ch is Characteristic.TWO), (d, g)


def test_attach_rnc():
    src = rule_special724(T(7, 2, 4))
    n = step_attach_rnc(src)
    assert n.triple == T(16, 14, 4) and n.status is Status.CERT_STABLE
    assert step_attach_rnc(rule_genus1(T(5, 1, 4))) is None
    six = CertificateNode.make(T(6, 1, 4), Status.CERT_SEMISTABLE, RuleId.GENUS1)
    assert six.triple.rho == 6 and step_attach_rnc(six) is not None
    for d in range(0, 30):
        t = T(d, 4, 4)
        node = CertificateNode.make(t, Status.CERT_SEMISTABLE, RuleId.GENUS1)
        fired = step_attach_rnc(node) is not None
        assert fired == (t.rho >= 3)


def test_attach_lines():
    src = CertificateNode.make(T(7, 2, 4), Status.CERT_SEMISTABLE, RuleId.GENUS2_SEMISTABLE)
    n = step_attach_lines(src, LineBudget(6, 6, 4))
    assert n.triple == T(13, 8, 4) and n.status is Status.CERT_SEMISTABLE
    n = step_attach_lines(rule_genus1(T(5, 1, 4)), LineBudget(6, 6, 4))
    assert n.triple == T(11, 7, 4)
    with pytest.raises(InvalidBudget):
        step_attach_lines(src, LineBudget(2, 1, 1))
    n = step_attach_lines(src, LineBudget(3, 0, 1))
    assert n.triple == T(10, 2, 4)


def test_coprime_upgrade():
    n = rule_coprime_upgrade(rule_genus1(T(5, 1, 4)))
    assert n.status is Status.CERT_STABLE and n.param_dict["degree"] == 25
    assert rule_coprime_upgrade(rule_genus1(T(6, 1, 4))) is None
    assert rule_coprime_upgrade(rule_special724(T(7, 2, 4))) is None


def _tamper(node, **changes):
    return dataclasses.replace(node, **changes)


def test_check_node_detects_forgeries():
    good = rule_genus2(T(9, 2, 4))
    assert check_node(good) is None
    assert check_node(_tamper(good, status=Status.CERT_SEMISTABLE)) is not None
    assert check_node(_tamper(good, triple=T(8, 2, 4))) is not None
    src = CertificateNode.make(T(6, 1, 4), Status.CERT_SEMISTABLE, RuleId.GENUS1)
    rnc = step_attach_rnc(src)
    assert check_node(rnc) is None
    low = CertificateNode.make(T(5, 1, 4), Status.CERT_SEMISTABLE, RuleId.GENUS1)
    assert "Brill-Noether" in check_node(_tamper(rnc, triple=T(14, 13, 4), premises=(low,)))
    lines = step_attach_lines(src, LineBudget(6, 6, 4))
    assert check_node(lines) is None
    forged = CertificateNode.make(lines.triple, lines.status, RuleId.ATTACH_LINES, {"a": 6, "b": 7, "c": 4}, (src,))
    assert check_node(forged) is not None
    forged = CertificateNode.make(T(12, 2, 4), Status.CERT_SEMISTABLE, RuleId.ATTACH_LINES, {"a": 6, "b": 1, "c": 1}, (src,))
    assert check_node(forged) is not None
    assert check_node(CertificateNode.make(T(6, 2, 4), Status.CERT_SEMISTABLE, RuleId.GENUS2_SEMISTABLE)) is not None
    assert check_node(CertificateNode.make(T(8, 5, 4), Status.CERT_STABLE, RuleId.INTERPOLATION)) is not None
    assert check_node(CertificateNode.make(T(3, 2, 4), Status.CERT_SEMISTABLE, RuleId.GENUS1)) is not None
    assert check_node(_tamper(rule_genus1(T(5, 1, 4)), premises=(src,))) is not None
    bad_ch = CertificateNode.make(T(7, 2, 4), Status.CERT_STABLE, RuleId.SPECIAL724, {"characteristic": "two"})
    assert check_node(bad_ch) is not None
    cfg = search_elliptic_config(T(15, 7, 4))
    assert check_node(cfg) is None
    assert check_node(_tamper(cfg, status=Status.CERT_SEMISTABLE)) is not None
    broken = CertificateNode.make(cfg.triple, cfg.status, RuleId.ELLIPTIC_CONFIG, {"parts": ((5, 4), (5, 3)), "e0": 5})
    assert check_node(broken) is not None


def test_genus_bounds():
    assert semistable_genus_bound(4) == 113
    assert stable_genus_bound(4) == 198
    assert row_genus_bound(5, 1, 4) == 113
    assert row_genus_bound(10, 2, 4) == 198
    # rho = 0 source at r = 4: q0 = ceil(50/6) = 9
    assert row_genus_bound(8, 5, 4) == 5 + 3 + 108 + 1


def test_lines_rnc_degree_bound():
    assert lines_rnc_degree_bound(1, 4, 1, 5) == 5 + 3
    assert lines_rnc_degree_bound(7, 4, 1, 5) == 11
    assert lines_rnc_degree_bound(8, 4, 2, 10) == 16
    assert lines_rnc_degree_bound(1, 4, 2, 10) is None
    # b = 12 by lines costs a_12 = 12; one rational step plus the b = 0 budget costs 9 + 3
    assert lines_rnc_degree_bound(13, 4, 1, 5) == 17
    assert lines_rnc_degree_bound(25, 4, 1, 5) == 5 + 2 * 9 + 3


def test_closed_forms():
    assert closed_form_semistable(T(30, 1, 4)).name == "genus-one"
    assert closed_form_semistable(T(124, 113, 4)).name == "genus-bound"
    assert closed_form_semistable(T(124, 113, 4), degree_only=True).name == "lines-and-rnc"
    assert closed_form_semistable(T(7, 2, 4)) is None
    assert closed_form_stable(T(20, 2, 4)) is not None
    assert closed_form_stable(T(9, 2, 4)) is None
    assert closed_form_stable(T(3, 2, 4)) is None
    assert closed_form_stable(T(300, 198, 4)).name == "genus-bound"

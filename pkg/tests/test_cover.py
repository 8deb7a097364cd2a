"""Tests for cover systems, closures and the topology axioms."""

import pytest

from linear_sites import fixtures
from linear_sites.error import CapExceeded, NotATopology
from linear_sites.limits import limits
from linear_sites.lincat import tensor_category
from linear_sites.sieves import representable_sieve, tensor_sieve, zero_sieve
from linear_sites.topology.cover import (
    CoverSystem,
    Mode,
    check_localizing,
    check_topology,
    covers,
    enumerate_covering_sieves,
    enumerate_sieves,
    glue_fixed_point,
    is_covering,
    minimal_cover,
    minimal_covers,
    one_sided,
    proper_cover_count,
    replay_witness,
    same_topology,
    tensor_topology,
    topology_inf,
    topology_sup,
    validate_system,
)
from linear_sites.topology.sheaves import topology_from_null_class


@pytest.fixture
def alpha_sieve(s1):
    return fixtures.alpha_sieve(s1)


@pytest.fixture
def tensor_site(s1, alpha):
    c = tensor_category(s1, s1)
    return c, tensor_topology(alpha, alpha, c)


def test_alpha_covers(s1, alpha, alpha_sieve):
    assert covers(alpha, alpha_sieve)
    assert covers(alpha, representable_sieve(s1, "2"))
    assert not covers(alpha, zero_sieve(s1, "2"))
    assert not covers(alpha, zero_sieve(s1, "1"))


def test_up_witness_replays(alpha, alpha_sieve):
    verdict = is_covering(alpha, alpha_sieve)
    assert verdict.covering
    assert verdict.witness.kind == "up"
    assert replay_witness(alpha, alpha_sieve, verdict.witness)


def test_no_witness_when_not_covering(s1, alpha):
    verdict = is_covering(alpha, zero_sieve(s1, "2"))
    assert not verdict.covering
    assert verdict.witness is None


def test_alpha_is_a_topology(alpha):
    report = check_topology(alpha)
    assert report.localizing
    assert report.topology
    assert not report.violations


def test_raw_singleton_violations(s1):
    """Without representables the raw system fails identity and pullback."""
    report = check_localizing(fixtures.raw_singleton_system(s1))
    assert not report.localizing
    axioms = {v.axiom for v in report.violations}
    assert axioms == {"identity", "pullback"}
    pullback = next(v for v in report.violations if v.axiom == "pullback")
    assert pullback.target == "2"
    assert pullback.source == "1"


def test_empty_at_one(s1):
    t = fixtures.empty_cover_system(s1)
    report = check_localizing(t)
    found = {(v.axiom, v.target) for v in report.violations}
    assert found == {("identity", "1"), ("pullback", "2")}
    with pytest.raises(NotATopology):
        minimal_cover(t, "1")
    assert [v.kind for v in validate_system(t).violations] == ["no-basic-cover"]


def test_minimal_cover(alpha, alpha_sieve, s1):
    assert minimal_cover(alpha, "2") == alpha_sieve
    assert minimal_cover(alpha, "1") == representable_sieve(s1, "1")


def test_upglue_closure_matches_up(s1, alpha, alpha_sieve):
    glued = CoverSystem(s1, alpha.basic_covers, Mode.UPGLUE, name="alpha-glued")
    assert glued.closure.minimal["2"] == alpha_sieve
    assert same_topology(glued, alpha)
    assert len(glued.closure.round_data()) == 1


def test_glue_fixed_point_agrees_with_closure(s1, alpha):
    glued = CoverSystem(s1, alpha.basic_covers, Mode.UPGLUE)
    found = glue_fixed_point(glued)
    for a in s1.objects:
        assert set(found[a]) == set(enumerate_covering_sieves(glued, a))


def test_inf_and_sup(alpha, trivial):
    assert same_topology(topology_inf([alpha, trivial]), trivial)
    assert same_topology(topology_sup([alpha, trivial]), alpha)


def test_sieve_cap(s1):
    with limits(sieve_cap=2):
        with pytest.raises(CapExceeded) as info:
            enumerate_sieves(s1, "2")
    assert info.value.cap == "sieve_cap"
    assert info.value.requested == 4


def test_tensor_topology_basic_covers(tensor_site):
    """⟨α⟩ ⊠ full and full ⊠ ⟨α⟩ give four proper basic covers on S1 ⊗ S1."""
    c, t = tensor_site
    assert t.mode is Mode.UPGLUE
    assert proper_cover_count(t) == 4
    assert len([r for r in t.covers("(2,2)") if not r.is_full]) == 2


def test_alpha_box_alpha_covers(s1, tensor_site, alpha_sieve):
    """⟨α⟩ ⊠ ⟨α⟩ is no basic cover but is derived by one glue step."""
    c, t = tensor_site
    s = tensor_sieve(alpha_sieve, alpha_sieve, c)
    assert s not in t.covers("(2,2)")
    verdict = is_covering(t, s)
    assert verdict.covering
    assert verdict.witness.kind == "tree"
    assert verdict.witness.tree.kind == "glue"
    assert replay_witness(t, s, verdict.witness)
    assert not covers(t, zero_sieve(c, "(2,2)"))


def test_closure_witness_replays(tensor_site, alpha_sieve):
    c, t = tensor_site
    s = tensor_sieve(alpha_sieve, alpha_sieve, c)
    with limits(glue_depth=0):
        verdict = is_covering(t, s)
    assert verdict.witness.kind == "closure"
    assert replay_witness(t, s, verdict.witness)


def test_tensor_glue_fixed_point(tensor_site):
    c, t = tensor_site
    found = glue_fixed_point(t)
    assert len(found["(2,2)"]) == 5
    for a in c.objects:
        assert set(found[a]) == set(enumerate_covering_sieves(t, a))


def test_one_sided(s1, alpha, tensor_site, alpha_sieve):
    c, _ = tensor_site
    t1 = one_sided(alpha, 1, c)
    assert t1.mode is Mode.UP
    assert minimal_covers(t1, "(2,2)") == [
        tensor_sieve(alpha_sieve, representable_sieve(s1, "2"), c)
    ]


def test_null_class_topology(alpha):
    """Sieves with null quotient recover the ⟨α⟩-topology."""
    derived = topology_from_null_class(alpha)
    assert derived.mode is Mode.RAW
    assert same_topology(derived, alpha)

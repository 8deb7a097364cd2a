"""Tests for submodule search, Gabriel products and Serre hulls."""

import pytest

from linear_sites.error import CapExceeded
from linear_sites.lincat import representable
from linear_sites.limits import limits
from linear_sites.topology.serre import (
    either,
    enumerate_submodules,
    gabriel_commute,
    gabriel_product_member,
    is_simple,
    sloc_hull_member,
    supported_on,
)


@pytest.fixture
def w1():
    return supported_on(["1"])


@pytest.fixture
def w2():
    return supported_on(["2"])


def test_submodules_of_representable(rep2):
    """h(2) has exactly 0, ⟨α⟩ and itself."""
    subs = enumerate_submodules(rep2)
    assert sorted(tuple(s[a].dim for a in ("1", "2")) for s in subs) == [
        (0, 0),
        (1, 0),
        (1, 1),
    ]


def test_simplicity(simple1, simple2, rep2):
    assert is_simple(simple1)
    assert is_simple(simple2)
    assert not is_simple(rep2)


def test_gabriel_product_order_matters(rep2, w1, w2):
    """h(2) is an extension of S(2) by S(1), not the other way round."""
    assert gabriel_product_member(rep2, w1, w2)
    assert not gabriel_product_member(rep2, w2, w1)


def test_gabriel_commute(rep2, simple1, w1, w2):
    report = gabriel_commute([rep2, simple1], w1, w2)
    assert not report.commute
    rows = {row.module: row for row in report.rows}
    assert rows["h(2)"].forward
    assert not rows["h(2)"].backward
    assert rows["S(1)"].forward and rows["S(1)"].backward


def test_hull(rep2, s1, w1, w2):
    both = either(w1, w2)
    assert sloc_hull_member(rep2, both, 2)
    assert not sloc_hull_member(rep2, both, 1)
    assert sloc_hull_member(representable(s1, "1"), w1, 1)


def test_subspace_cap(rep2):
    with limits(subspace_cap=1):
        with pytest.raises(CapExceeded) as info:
            enumerate_submodules(rep2)
    assert info.value.cap == "subspace_cap"

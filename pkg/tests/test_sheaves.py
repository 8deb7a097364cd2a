"""Tests for sheaves, null presheaves and sheafification."""

from linear_sites.lincat import (
    enumerate_modules,
    external_tensor_module,
    identity_nat,
    tensor_category,
    validate_module,
    validate_nat,
)
from linear_sites.topology.serre import tensor_null_member
from linear_sites.topology.sheaves import (
    in_l1,
    in_w1,
    in_w2,
    is_null_presheaf,
    is_sheaf,
    onesided_sheafify,
    plus_morphism,
    sheafify,
)


def test_representable_is_sheaf(rep2, alpha):
    assert is_sheaf(rep2, alpha, sample=3)
    assert not is_null_presheaf(rep2, alpha)


def test_simple_at_two_is_null(simple2, alpha):
    assert is_null_presheaf(simple2, alpha)
    assert not is_sheaf(simple2, alpha)


def test_simple_at_one(simple1, alpha):
    assert not is_sheaf(simple1, alpha)
    assert not is_null_presheaf(simple1, alpha)


def test_trivial_topology_everything_is_sheaf(s1, trivial):
    for m in enumerate_modules(s1, 1):
        assert is_sheaf(m, trivial, sample=0)


def test_sheafify_null_module(simple2, alpha):
    module, unit = sheafify(simple2, alpha)
    assert module.is_zero
    assert unit.is_zero()


def test_sheafify_sheaf(rep2, alpha):
    module, unit = sheafify(rep2, alpha)
    assert module.dims == rep2.dims
    assert unit.is_iso()
    assert validate_nat(unit).valid


def test_sheafify_simple_at_one(simple1, rep2, alpha):
    """a(S(1)) is the representable at 2."""
    module, unit = sheafify(simple1, alpha)
    assert module.dims == rep2.dims
    assert validate_module(module).valid
    assert is_sheaf(module, alpha)
    assert unit["1"].tolist() == [[1]]


def test_plus_morphism(rep2, alpha):
    lifted = plus_morphism(identity_nat(rep2), alpha)
    assert lifted.is_iso()


def test_one_sided_sheafify_kills_null_factor(s1, simple2, rep2, alpha):
    c = tensor_category(s1, s1)
    f = external_tensor_module(simple2, rep2, c)
    assert in_w1(f, alpha)
    assert not in_w2(f, alpha)
    assert onesided_sheafify(f, 1, alpha).is_zero
    assert tensor_null_member(f, alpha, alpha)


def test_one_sided_sheafify_dims(s1, simple1, rep2, alpha):
    c = tensor_category(s1, s1)
    f = external_tensor_module(simple1, rep2, c)
    result = onesided_sheafify(f, 1, alpha)
    assert result.total_dim == 4
    assert in_l1(result, alpha)


def test_zero_stalk_is_sheaf_for_trivial_topology(simple1, simple2, trivial):
    assert is_sheaf(simple1, trivial, sample=0)
    assert is_sheaf(simple2, trivial, sample=0)


def test_zero_stalk_is_not_null_for_trivial_topology(simple1, trivial):
    assert not is_null_presheaf(simple1, trivial)


def test_sheafify_unit_at_zero_stalk(simple1, alpha):
    module, unit = sheafify(simple1, alpha)
    assert simple1.dim("2") == 0
    assert unit["2"].shape == (module.dim("2"), 0)
    assert validate_nat(unit).valid

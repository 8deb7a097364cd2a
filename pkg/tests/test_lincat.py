"""Tests for finite linear categories, functors and presheaf modules."""

import numpy as np
import pytest

from linear_sites import fixtures
from linear_sites.error import CategoryMismatch, UnknownObject
from linear_sites.exactlin import Subspace
from linear_sites.lincat import (
    FiniteLinearCategory,
    compose_functors,
    enumerate_modules,
    external_tensor_module,
    hom_modules,
    identity_functor,
    identity_nat,
    is_submodule,
    partial_module,
    quotient_module,
    representable,
    restrict_module,
    same_functor,
    submodule,
    tensor_category,
    tensor_functor,
    tensor_nat,
    validate_category,
    validate_functor,
    validate_module,
    validate_nat,
)


def test_s1_is_a_category(s1):
    report = validate_category(s1)
    assert report.valid
    assert report.subject == "S1"


def test_broken_unit_reported(f2):
    """A category where id2∘α vanishes fails the left unit law."""
    broken = FiniteLinearCategory(
        f2,
        ["1", "2"],
        {("1", "1"): 1, ("2", "2"): 1, ("1", "2"): 1},
        {"1": [1], "2": [1]},
        {
            ("1", "1", "1"): [[[1]]],
            ("2", "2", "2"): [[[1]]],
            ("1", "1", "2"): [[[1]]],
            ("1", "2", "2"): [[[0]]],
        },
        name="broken",
    )
    report = validate_category(broken)
    assert not report.valid
    assert "left-unit" in {v.kind for v in report.violations}


def test_unknown_object(s1):
    with pytest.raises(UnknownObject):
        s1.hom_dim("1", "3")


def test_tensor_category(s1):
    c = tensor_category(s1, s1)
    assert c.objects == ("(1,1)", "(1,2)", "(2,1)", "(2,2)")
    assert c.hom_dim("(1,1)", "(2,2)") == 1
    assert c.hom_dim("(2,1)", "(1,2)") == 0
    assert c.hom_labels[("(1,1)", "(2,2)")] == ["α⊗α"]
    assert c.factors == (s1, s1)
    assert validate_category(c).valid


def test_representable(s1):
    h2 = representable(s1, "2")
    assert h2.dims == {"1": 1, "2": 1}
    assert validate_module(h2).valid
    assert h2.act(fixtures.ALPHA, "1", "2").tolist() == [[1]]
    assert representable(s1, "1").dims == {"1": 1, "2": 0}


def test_yoneda_dimensions(rep2, simple2):
    """hom(h(2), M) has the dimension of M(2)."""
    assert hom_modules(rep2, simple2).dim == 1
    assert hom_modules(simple2, rep2).dim == 0
    assert hom_modules(rep2, rep2).dim == 1


def test_nat_space_basis_is_natural(rep2):
    space = hom_modules(rep2, rep2)
    for eta in space.basis():
        assert validate_nat(eta).valid
    assert space.coordinates(identity_nat(rep2)).tolist() == [1]


def test_tensor_nat(rep2, simple1):
    eta = tensor_nat(identity_nat(rep2), identity_nat(simple1))
    assert eta.is_iso()
    assert validate_nat(eta).valid
    assert eta.source.dims["(1,1)"] == 1
    assert eta.source.dims["(1,2)"] == 0


def test_submodule_and_quotient(s1, rep2, simple2):
    """⟨α⟩ ⊂ h(2) has quotient the simple module at 2."""
    spaces = {"1": Subspace.full(s1.field, 1), "2": Subspace.zero(s1.field, 1)}
    assert is_submodule(rep2, spaces)
    assert submodule(rep2, spaces).dims == {"1": 1, "2": 0}
    assert quotient_module(rep2, spaces) == simple2
    bad = {"1": Subspace.zero(s1.field, 1), "2": Subspace.full(s1.field, 1)}
    assert not is_submodule(rep2, bad)


def test_enumerate_modules(s1):
    """Dimension vectors up to (1,1) give five modules, α acting by 0 or 1."""
    modules = list(enumerate_modules(s1, 1))
    assert len(modules) == 5
    assert all(validate_module(m).valid for m in modules)
    assert len(set(modules)) == 5


def test_functors(s1, morphisms):
    incl1 = morphisms["incl1"].functor
    quotient = morphisms["quotient"].functor
    assert validate_functor(incl1).valid
    assert validate_functor(quotient).valid
    assert same_functor(compose_functors(identity_functor(s1), incl1), incl1)
    assert quotient.hom_map("1", "2").shape == (0, 1)


def test_restrict_module(rep2, morphisms):
    restricted = restrict_module(morphisms["incl1"].functor, rep2)
    assert restricted.dims == {"1": 1}
    assert validate_module(restricted).valid


def test_restrict_module_wrong_category(rep2, f2):
    other = fixtures.point(f2)
    with pytest.raises(CategoryMismatch):
        restrict_module(identity_functor(other), rep2)


def test_tensor_functor(morphisms):
    incl1 = morphisms["incl1"].functor
    phi = tensor_functor(incl1, incl1)
    assert phi.source.objects == ("(1,1)",)
    assert phi("(1,1)") == "(1,1)"
    assert validate_functor(phi).valid


def test_partial_module(rep2):
    """Freezing the second variable of h(2) ⊠ h(2) at 2 recovers h(2)."""
    f = external_tensor_module(rep2, rep2)
    assert partial_module(f, 1, "2") == rep2
    assert partial_module(f, 2, "1") == rep2


def test_composition_table_shape(s1):
    table = s1.composition("1", "2", "2")
    assert table.shape == (1, 1, 1)
    assert np.array_equal(s1.compose([1], fixtures.ALPHA, "1", "2", "2"), [1])

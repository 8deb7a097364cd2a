"""Tests for sieves on finite linear categories."""

import pytest

from linear_sites import fixtures
from linear_sites.error import CategoryMismatch, DimensionMismatch
from linear_sites.lincat import tensor_category
from linear_sites.sieves import (
    SieveData,
    check_pullback_containment,
    decompose_tensor,
    functor_preimage_sieve,
    image_sieve,
    intersect_sieves,
    pullback_sieve,
    quotient_of_representable,
    representable_sieve,
    sieve_contains,
    sieve_from_generators,
    sum_sieves,
    tensor_sieve,
    validate_sieve,
    zero_sieve,
)
from linear_sites.topology.cover import enumerate_sieves


@pytest.fixture
def alpha_sieve(s1):
    return fixtures.alpha_sieve(s1)


def test_alpha_sieve(alpha_sieve):
    assert alpha_sieve.dims == {"1": 1, "2": 0}
    assert validate_sieve(alpha_sieve).valid
    assert alpha_sieve.describe() == {"1": ["α"]}


def test_identity_generates_everything(s1):
    full = sieve_from_generators(s1, "2", [("2", [1])])
    assert full == representable_sieve(s1, "2")
    assert full.is_full


def test_bad_generator_length(s1):
    with pytest.raises(DimensionMismatch):
        sieve_from_generators(s1, "2", [("1", [1, 0])])


def test_three_sieves_on_two(s1, alpha_sieve):
    """0 ⊂ ⟨α⟩ ⊂ s1(−, 2) are all the sieves on 2."""
    sieves = enumerate_sieves(s1, "2")
    assert len(sieves) == 3
    assert set(sieves) == {
        zero_sieve(s1, "2"),
        alpha_sieve,
        representable_sieve(s1, "2"),
    }


def test_lattice_operations(s1, alpha_sieve):
    full = representable_sieve(s1, "2")
    zero = zero_sieve(s1, "2")
    assert sieve_contains(full, alpha_sieve)
    assert not sieve_contains(alpha_sieve, full)
    assert zero <= alpha_sieve <= full
    assert intersect_sieves(alpha_sieve, full) == alpha_sieve
    assert sum_sieves(alpha_sieve, zero) == alpha_sieve
    assert alpha_sieve + full == full


def test_mismatched_targets(s1, alpha_sieve):
    with pytest.raises(CategoryMismatch):
        intersect_sieves(alpha_sieve, representable_sieve(s1, "1"))


def test_pullback(s1, alpha_sieve):
    """Pulling ⟨α⟩ back along α gives everything, along id2 gives ⟨α⟩."""
    assert pullback_sieve(alpha_sieve, fixtures.ALPHA, "1").is_full
    assert pullback_sieve(alpha_sieve, s1.identity("2"), "2") == alpha_sieve
    assert pullback_sieve(alpha_sieve, [0], "2").is_full
    with pytest.raises(DimensionMismatch):
        pullback_sieve(alpha_sieve, [1, 1], "1")


def test_tensor_sieve(s1, alpha_sieve):
    c = tensor_category(s1, s1)
    r = tensor_sieve(alpha_sieve, representable_sieve(s1, "2"), c)
    assert r.target == "(2,2)"
    assert r.dims == {"(1,1)": 1, "(1,2)": 1, "(2,1)": 0, "(2,2)": 0}
    assert validate_sieve(r).valid


def test_tensor_sieve_needs_factor_categories(f2, s1, alpha_sieve):
    pt = fixtures.point(f2)
    with pytest.raises(CategoryMismatch):
        tensor_sieve(alpha_sieve, representable_sieve(pt, "*"), tensor_category(s1, s1))


def test_decompose_and_containment(s1, alpha_sieve):
    c = tensor_category(s1, s1)
    terms = decompose_tensor(c, [1], "(2,2)", "(2,2)")
    assert len(terms) == 1
    assert check_pullback_containment(c, [1], "(2,2)", alpha_sieve, alpha_sieve)


def test_sieve_data_roundtrip(s1, alpha_sieve):
    data = SieveData.from_sieve(alpha_sieve)
    assert data.dict() == {"target": "2", "components": {"1": [[1]]}}
    assert data.to_sieve(s1) == alpha_sieve


def test_quotient_of_representable(alpha_sieve, simple2):
    assert quotient_of_representable(alpha_sieve) == simple2


def test_image_and_preimage(morphisms, alpha_sieve):
    incl2 = morphisms["incl2"].functor
    r = representable_sieve(incl2.source, "2")
    assert image_sieve(incl2, r).is_full
    assert functor_preimage_sieve(incl2, alpha_sieve, "2").is_zero

"""Tests for the functor property checkers."""

import pytest

from linear_sites.error import PreconditionFailed
from linear_sites.functoriality import (
    Convention,
    Property,
    check_cocontinuous,
    check_continuous,
    check_F,
    check_FF,
    check_G,
    check_LC,
    common_cover,
    compose_morphisms,
    covers_by_convention,
    image_generated_sieve,
    run_check,
    tensor_morphism,
    verify_tensor_preservation,
)
from linear_sites.sieves import representable_sieve, zero_sieve


def test_inclusion_of_one_is_lc(morphisms):
    report = check_LC(morphisms["incl1"])
    assert report.verdict
    assert report.details["method"] == "exhaustive"
    assert report.details["G"] and report.details["F"] and report.details["FF"]


def test_inclusion_of_two_fails_g(morphisms):
    """Nothing maps from 2 to 1, so the image sieve on 1 is zero."""
    report = check_G(morphisms["incl2"])
    assert not report.verdict
    assert [ce.objects for ce in report.counterexamples] == [["1"]]
    assert not check_LC(morphisms["incl2"]).verdict


def test_image_generated_sieve(morphisms, s1):
    m = morphisms["incl1"]
    assert image_generated_sieve(m, "2").dims == {"1": 1, "2": 0}
    assert image_generated_sieve(m, "1") == representable_sieve(s1, "1")


def test_quotient_fails_ff(morphisms):
    """α is killed but its annihilator sieve is zero."""
    report = check_FF(morphisms["quotient"])
    assert not report.verdict
    (ce,) = report.counterexamples
    assert ce.objects == ["1", "2"]
    assert ce.morphism == [1]
    assert check_F(morphisms["quotient"]).verdict


def test_cocontinuous(morphisms):
    assert check_cocontinuous(morphisms["incl1"]).verdict
    report = check_cocontinuous(morphisms["incl2"])
    assert not report.verdict
    assert report.counterexamples[0].objects == ["2", "2"]


def test_continuous_enumerates_probes(morphisms, rep2):
    report = check_continuous(morphisms["incl1"], [rep2], bound=1)
    assert report.verdict
    assert report.details["enumerated"] == 5
    assert report.details["sheaves_tested"] == 3


def test_conventions_agree_on_inclusion(morphisms):
    m = morphisms["incl1"]
    src = m.functor.source
    for convention in Convention:
        assert covers_by_convention(m, representable_sieve(src, "1"), convention)
        assert not covers_by_convention(m, zero_sieve(src, "1"), convention)
        assert check_LC(m, convention).verdict


def test_run_check(morphisms):
    assert run_check(morphisms["incl1"], "G").property is Property.G
    assert not run_check(morphisms["quotient"], Property.FF).verdict


def test_tensor_preservation(morphisms):
    report = verify_tensor_preservation(morphisms["incl1"], morphisms["incl1"], Property.LC)
    assert report.verdict
    assert report.severity == "normal"


def test_tensor_preservation_needs_factors(morphisms):
    with pytest.raises(PreconditionFailed):
        verify_tensor_preservation(morphisms["incl2"], morphisms["incl1"], Property.G)


def test_tensor_morphism_objects(morphisms):
    m = tensor_morphism(morphisms["incl1"], morphisms["incl2"])
    assert m.functor("(1,2)") == "(1,2)"
    assert m.target_system.category.factors is not None


def test_common_cover(morphisms, s1):
    meet, covering = common_cover(morphisms["incl1"], "1", [([1], "1")])
    assert covering
    assert meet.is_full


def test_compose_morphisms(morphisms):
    m = compose_morphisms(morphisms["quotient"], morphisms["incl1"])
    assert m.name == "quotient.incl1"
    assert m.functor("1") == "1"
    assert m.source_system is morphisms["incl1"].source_system

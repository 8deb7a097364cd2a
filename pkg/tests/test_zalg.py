"""Tests for graded algebras, windowed Z-algebras and the diagonal."""

import pytest

from linear_sites import fixtures
from linear_sites.error import (
    FieldMismatch,
    PreconditionFailed,
    WindowError,
    WorkspaceError,
)
from linear_sites.exactlin import Field
from linear_sites.lincat import validate_category, validate_functor
from linear_sites.sieves import validate_sieve
from linear_sites.topology.cover import Mode, check_topology
from linear_sites.zalg import (
    adjoin_free_elements,
    check_delta_LC_on_window,
    check_finitely_generated,
    check_generated_in_degree_one,
    delta_generators,
    diagonal,
    from_graded,
    generator_degrees,
    is_connected,
    monomial_quotient,
    parse_algebra,
    polynomial_algebra,
    restrict_window,
    same_structure,
    segre,
    tails_sieve,
    tails_system,
    validate_graded,
    window_sweep,
)


@pytest.fixture
def kx(f2):
    return fixtures.graded_algebra("k[x]", f2)


@pytest.fixture
def ky(f2):
    return fixtures.graded_algebra("k[y]", f2)


def test_polynomial_dimensions(kxy, f2):
    assert kxy.dims == [1, 2, 3, 4]
    assert kxy.labels[2] == ["x^2", "x*y", "y^2"]
    assert validate_graded(kxy).valid
    assert polynomial_algebra(f2, 3, 2).dims == [1, 3, 6]


def test_monomial_quotient(f2):
    g = parse_algebra("k[x,y]/(x^2)", 3, f2)
    assert g.dims == [1, 2, 2, 2]
    assert g.name == "k[x,y]/(x^2)"
    assert validate_graded(g).valid


def test_quotient_relation_checks(kxy):
    with pytest.raises(WindowError):
        monomial_quotient(kxy, [(2,)])
    with pytest.raises(WindowError):
        monomial_quotient(kxy, [(4, 0)])


def test_weighted_generator(f2):
    g = parse_algebra("k[x:2]", 4, f2)
    assert g.dims == [1, 0, 1, 0, 1]
    assert is_connected(g)


def test_parse_errors(f2):
    with pytest.raises(WorkspaceError):
        parse_algebra("x[y]", 2, f2)
    with pytest.raises(WorkspaceError):
        parse_algebra("k[x]/(z)", 2, f2)


def test_multiply(kxy):
    x, y = [1, 0], [0, 1]
    assert kxy.multiply(x, y, 1, 1).tolist() == [0, 1, 0]


def test_segre(kxy, kuv):
    g = segre(kxy, kuv)
    assert g.dims[:3] == [1, 4, 9]
    assert validate_graded(g).valid


def test_segre_bound_mismatch(kx, kxy):
    with pytest.raises(WindowError):
        segre(kx, kxy)


def test_segre_field_mismatch(kxy):
    with pytest.raises(FieldMismatch):
        segre(kxy, parse_algebra("k[u,v]", 3, Field.prime(3)))


def test_from_graded(kxy):
    z = from_graded(kxy, 0, 3)
    assert z.piece_dim(3, 1) == 3
    assert z.piece_dim(1, 3) == 0
    assert z.connected
    assert validate_category(z.category).valid


def test_window_too_tall(kxy):
    with pytest.raises(WindowError):
        from_graded(kxy, 0, 4)


def test_restrict_window(kxy):
    z = from_graded(kxy, 0, 3)
    assert same_structure(restrict_window(z, 1, 3), from_graded(kxy, 1, 3))
    with pytest.raises(WindowError):
        restrict_window(z, 0, 4)


def test_tails_sieve(kxy):
    z = from_graded(kxy, 0, 3)
    r = tails_sieve(z, 0, 2)
    assert [r.dims[str(n)] for n in z.window] == [0, 0, 3, 4]
    assert validate_sieve(r).valid


def test_tails_system_is_topology(kx):
    z = from_graded(kx, 0, 2)
    t = tails_system(z)
    assert t.mode is Mode.UP
    assert len(t.covers("0")) == 3
    assert check_topology(t).topology


def test_diagonal_of_from_graded_is_segre(kxy, kuv):
    """The diagonal of a(A) and a(B) is a(A ×_Segre B)."""
    a, b = from_graded(kxy, 0, 2), from_graded(kuv, 0, 2)
    c, delta = diagonal(a, b)
    assert same_structure(c, from_graded(segre(kxy, kuv), 0, 2))
    assert validate_functor(delta).valid
    assert delta("2") == "(2,2)"


def test_diagonal_window_mismatch(kxy, kuv):
    with pytest.raises(WindowError):
        diagonal(from_graded(kxy, 0, 2), from_graded(kuv, 1, 3))


def test_generation(kxy, f2):
    z = from_graded(kxy, 0, 3)
    assert check_generated_in_degree_one(z)
    assert generator_degrees(z) == [1]
    weighted = from_graded(parse_algebra("k[x:2]", 4, f2), 0, 4)
    assert generator_degrees(weighted) == [2]
    assert not check_generated_in_degree_one(weighted)
    assert check_finitely_generated(weighted, 2)


def test_adjoin_free_elements(kxy):
    z = adjoin_free_elements(from_graded(kxy, 0, 2), 2, 0)
    assert z.piece_dim(2, 0) == 4
    assert validate_category(z.category).valid
    assert not check_generated_in_degree_one(z)
    assert generator_degrees(z) == [1, 2]
    with pytest.raises(WindowError):
        adjoin_free_elements(z, 0, 2)


def test_delta_generators(kx, ky):
    a, b = from_graded(kx, 0, 2), from_graded(ky, 0, 2)
    w = delta_generators(a, b, 0, 1)
    assert w.source == "(1,1)"
    assert w.target == "(0,1)"
    assert w.generators == ["x⊗1"]
    assert w.generates
    assert delta_generators(a, b, 2, 0).generators == ["1⊗y^2"]


def test_check_delta_on_window(kx, ky):
    report = check_delta_LC_on_window(from_graded(kx, 0, 2), from_graded(ky, 0, 2))
    assert report.verdict
    assert report.window_limited
    assert report.details["window"] == [0, 2]
    assert report.details["method"] == "exhaustive"
    assert all(w["generates"] for w in report.details["witnesses"])
    assert len(report.details["witnesses"]) == 6


def test_check_delta_two_variables(kxy, kuv):
    report = check_delta_LC_on_window(from_graded(kxy, 0, 3), from_graded(kuv, 0, 3))
    assert report.verdict
    assert report.window_limited
    assert report.details["window"] == [0, 3]
    assert report.details["method"] == "minimal-covers"
    assert report.details["G"] and report.details["cocontinuous"]
    witnesses = {w["target"]: w for w in report.details["witnesses"]}
    assert len(witnesses) == 12
    assert all(w["generates"] for w in witnesses.values())
    assert witnesses["(0,3)"]["source"] == "(3,3)"
    assert len(witnesses["(0,3)"]["generators"]) == 4
    assert all(g.endswith("⊗1") for g in witnesses["(1,3)"]["generators"])
    assert all(g.startswith("1⊗") for g in witnesses["(3,1)"]["generators"])


def test_check_delta_preconditions(kx, f2):
    weighted = from_graded(parse_algebra("k[x:2]", 4, f2), 0, 2)
    with pytest.raises(PreconditionFailed):
        check_delta_LC_on_window(weighted, from_graded(kx, 0, 2))
    with pytest.raises(WindowError):
        check_delta_LC_on_window(from_graded(kx, 0, 1), from_graded(kx, 0, 1))


def test_window_sweep(kx, ky):
    report = window_sweep(kx, ky, 0, [2, 3])
    assert report.window_limited
    assert [(row.hi, row.verdict) for row in report.rows] == [(2, True), (3, True)]

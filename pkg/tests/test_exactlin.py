"""Tests for exact linear algebra over F_p and Q."""

from fractions import Fraction

import numpy as np
import pytest

from linear_sites.error import CapExceeded, UnsupportedField, WorkspaceError
from linear_sites.exactlin import (
    Field,
    Subspace,
    enumerate_subspaces,
    enumerate_vectors,
    gaussian_binomial,
    image,
    intersect,
    kernel,
    preimage,
    row_reduce,
    subspace_count,
    sum_subspaces,
)
from linear_sites.limits import limits


def test_field_parse():
    """Field specs parse to prime fields or Q."""
    assert Field.parse("3") == Field.prime(3)
    assert not Field.parse("Q").is_prime
    assert Field.parse(5).name == "5"
    with pytest.raises(WorkspaceError):
        Field.parse("x")


def test_non_prime_rejected():
    """Only prime characteristics are fields here."""
    with pytest.raises(UnsupportedField):
        Field.prime(4)
    with pytest.raises(UnsupportedField):
        Field.rationals().require_prime("enumeration")


def test_row_reduce_mod_p(f2):
    result = row_reduce([[1, 1, 0], [1, 1, 0], [0, 1, 1]], f2)
    assert result.rank == 2
    assert result.pivots == (0, 1)
    assert result.matrix.tolist() == [[1, 0, 1], [0, 1, 1]]


def test_kernel_and_image(f2):
    m = [[1, 1]]
    k = kernel(m, f2)
    assert k.dim == 1
    assert k.contains([1, 1])
    assert image(m, f2).is_full
    assert kernel([[0, 0]], f2).is_full


def test_kernel_over_rationals():
    """Kernels over Q come back with Fraction entries in canonical form."""
    q = Field.rationals()
    k = kernel([[1, 2]], q)
    assert k.dim == 1
    assert k.contains([-2, 1])
    assert k.basis.tolist() == [[Fraction(1), Fraction(-1, 2)]]


def test_preimage(f2):
    """Preimage of the line spanned by e0 under the swap."""
    swap = [[0, 1], [1, 0]]
    line = Subspace.span(f2, [[1, 0]], 2)
    assert preimage(swap, line) == Subspace.span(f2, [[0, 1]], 2)


def test_sum_and_intersection(f2):
    a = Subspace.span(f2, [[1, 0, 0], [0, 1, 0]], 3)
    b = Subspace.span(f2, [[0, 1, 0], [0, 0, 1]], 3)
    assert intersect(a, b) == Subspace.span(f2, [[0, 1, 0]], 3)
    assert sum_subspaces(a, b).is_full
    assert (a & b) <= a
    assert not b <= a


def test_coordinates_and_residue(f2):
    s = Subspace.span(f2, [[1, 1, 0]], 3)
    assert s.coordinates([1, 1, 0]).tolist() == [1]
    assert s.residue([1, 0, 0]).tolist() == [0, 1, 0]
    assert s.complement_columns() == (1, 2)


def test_tensor_of_subspaces(f2):
    a = Subspace.span(f2, [[1, 0]], 2)
    b = Subspace.full(f2, 3)
    t = a.tensor(b)
    assert t.ambient_dim == 6
    assert t.dim == 3


def test_subspace_counts(f2):
    """Gaussian binomials count the canonical forms produced by enumeration."""
    assert gaussian_binomial(2, 1, 2) == 3
    assert subspace_count(f2, 2) == 5
    spaces = list(enumerate_subspaces(f2, 3))
    assert len(spaces) == subspace_count(f2, 3) == 16
    assert len(set(spaces)) == 16


def test_enumerate_vectors(f2):
    s = Subspace.span(f2, [[1, 0, 1], [0, 1, 0]], 3)
    vectors = enumerate_vectors(s)
    assert vectors.shape == (4, 3)
    assert {tuple(v) for v in vectors.tolist()} == {
        (0, 0, 0),
        (0, 1, 0),
        (1, 0, 1),
        (1, 1, 1),
    }


def test_enumerate_vectors_cap(f2):
    s = Subspace.full(f2, 3)
    with limits(enum_cap=4):
        with pytest.raises(CapExceeded) as info:
            enumerate_vectors(s)
    assert info.value.requested == 8
    assert info.value.cap == "enum_cap"


def test_identity_over_rationals():
    q = Field.rationals()
    ident = q.identity(2)
    assert np.array_equal(q.matmul(ident, ident), ident)
    assert q.encode(Fraction(1, 3)) == "1/3"

"""Exact linear algebra over small prime fields and the rationals.

Matrices are numpy arrays. Over F_p they are int64 arrays reduced mod p; over
the rationals they are object arrays holding ``fractions.Fraction`` values.
A matrix acts on coordinate columns, so ``m`` of shape (rows, cols) maps
F^cols to F^rows. Subspaces keep their basis as the rows of a reduced row
echelon matrix, which is the sole equality representative.
"""

from dataclasses import dataclass
from fractions import Fraction
import itertools
import logging
from typing import Iterable, Iterator, Optional, Sequence, Tuple, Union

import numpy as np

from .error import CapExceeded, DimensionMismatch, UnsupportedField, WorkspaceError
from .limits import Limits


LOGGER = logging.getLogger(__name__)

_FRACTION = np.frompyfunc(Fraction, 1, 1)


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, int(p**0.5) + 1))


@dataclass(frozen=True)
class Field:
    """Ground field: F_p for a small prime p, or the rationals when p is None."""

    p: Optional[int] = 2

    def __post_init__(self):
        """Reject non-prime characteristics."""
        if self.p is not None and not _is_prime(self.p):
            raise UnsupportedField(f"{self.p} is not prime")

    @classmethod
    def prime(cls, p: int = 2) -> "Field":
        """Return F_p."""
        return cls(p)

    @classmethod
    def rationals(cls) -> "Field":
        """Return Q."""
        return cls(None)

    @classmethod
    def parse(cls, spec: Union[str, int]) -> "Field":
        """Parse a field spec such as "2", "3" or "Q"."""
        text = str(spec).strip()
        if text.upper() == "Q":
            return cls.rationals()
        try:
            return cls.prime(int(text))
        except ValueError as err:
            raise WorkspaceError(f"Invalid field spec: {spec!r}") from err

    @property
    def is_prime(self) -> bool:
        """Return whether this is a prime field."""
        return self.p is not None

    @property
    def name(self) -> str:
        """Return the serialized name of the field."""
        return "Q" if self.p is None else str(self.p)

    def require_prime(self, what: str):
        """Raise unless the field is prime; enumeration needs finitely many vectors."""
        if not self.is_prime:
            raise UnsupportedField(f"{what} requires a prime field, got Q")

    def array(self, data, shape: Optional[Tuple[int, ...]] = None) -> np.ndarray:
        """Coerce data into a reduced array over this field."""
        if self.p is None:
            arr = np.array(data, dtype=object)
            if arr.size:
                arr = np.asarray(_FRACTION(arr), dtype=object)
        else:
            arr = np.mod(np.array(data, dtype=np.int64), self.p)
        if shape is not None:
            arr = arr.reshape(shape)
        return arr

    def zeros(self, shape) -> np.ndarray:
        """Return a zero array."""
        if self.p is None:
            arr = np.empty(shape, dtype=object)
            arr.fill(Fraction(0))
            return arr
        return np.zeros(shape, dtype=np.int64)

    def identity(self, n: int) -> np.ndarray:
        """Return the n×n identity matrix."""
        arr = self.zeros((n, n))
        for i in range(n):
            arr[i, i] = 1 if self.p is not None else Fraction(1)
        return arr

    def unit(self, n: int, i: int) -> np.ndarray:
        """Return the i-th unit vector of F^n."""
        v = self.zeros(n)
        v[i] = 1 if self.p is not None else Fraction(1)
        return v

    def reduce(self, arr: np.ndarray) -> np.ndarray:
        """Reduce an integer array mod p; rational arrays are already normal."""
        if self.p is None:
            return arr
        return np.mod(arr, self.p)

    def inv(self, x):
        """Return the multiplicative inverse of a nonzero element."""
        if self.p is None:
            return Fraction(1) / Fraction(x)
        return pow(int(x), self.p - 2, self.p)

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Multiply and reduce."""
        return self.reduce(a @ b)

    def tensordot(self, a: np.ndarray, b: np.ndarray, axes) -> np.ndarray:
        """Contract and reduce."""
        return self.reduce(np.tensordot(a, b, axes=axes))

    def encode(self, x) -> Union[int, str]:
        """Encode a field element for JSON: ints for F_p, strings for Q."""
        if self.p is None:
            return str(Fraction(x))
        return int(x)

    def encode_array(self, arr: np.ndarray) -> list:
        """Encode a whole array as nested lists."""
        if self.p is None:
            return np.vectorize(self.encode, otypes=[object])(arr).tolist()
        return np.asarray(arr, dtype=np.int64).tolist()

    def elements(self) -> range:
        """Return all field elements of a prime field."""
        self.require_prime("element enumeration")
        return range(self.p)


@dataclass(frozen=True)
class RowReduceResult:
    """Nonzero rows of the reduced row echelon form with rank and pivot columns."""

    matrix: np.ndarray
    rank: int
    pivots: Tuple[int, ...]


def _as_matrix(m, field: Field, cols: Optional[int] = None) -> np.ndarray:
    arr = field.array(m)
    if arr.ndim == 1:
        width = arr.shape[0] if cols is None else cols
        arr = arr.reshape((arr.size // width, width)) if width else field.zeros((0, 0))
    if arr.ndim != 2:
        raise DimensionMismatch(f"Expected a matrix, got shape {arr.shape}")
    return arr


def row_reduce(m, field: Field) -> RowReduceResult:
    """Gaussian elimination to reduced row echelon form."""
    a = _as_matrix(m, field).copy()
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            a[[r, p]] = a[[p, r]]
        a[r] = field.reduce(a[r] * field.inv(a[r, c]))
        col = a[:, c].copy()
        col[r] = 0
        if np.count_nonzero(col):
            a = field.reduce(a - np.outer(col, a[r]))
        pivots.append(c)
        r += 1
    return RowReduceResult(a[:r], r, tuple(pivots))


def rref(m, field: Field) -> np.ndarray:
    """Return the nonzero rows of the reduced row echelon form of m."""
    return row_reduce(m, field).matrix


class Subspace:
    """Subspace of F^n stored by its canonical reduced row echelon basis."""

    __slots__ = ("field", "ambient_dim", "basis", "pivots", "_key")

    def __init__(self, field: Field, ambient_dim: int, basis: np.ndarray, pivots):
        """Initialize from an already canonical basis; use span() otherwise."""
        self.field = field
        self.ambient_dim = ambient_dim
        self.basis = basis
        self.pivots = tuple(pivots)
        self._key = None

    @classmethod
    def span(cls, field: Field, vectors, ambient_dim: int) -> "Subspace":
        """Return the span of the rows of vectors."""
        arr = field.array(vectors)
        if arr.size == 0:
            return cls.zero(field, ambient_dim)
        arr = arr.reshape((-1, ambient_dim)) if arr.ndim == 1 else arr
        if arr.shape[1] != ambient_dim:
            raise DimensionMismatch(
                f"Vectors of length {arr.shape[1]} in ambient dim {ambient_dim}"
            )
        result = row_reduce(arr, field)
        return cls(field, ambient_dim, result.matrix, result.pivots)

    @classmethod
    def zero(cls, field: Field, ambient_dim: int) -> "Subspace":
        """Return the zero subspace."""
        return cls(field, ambient_dim, field.zeros((0, ambient_dim)), ())

    @classmethod
    def full(cls, field: Field, ambient_dim: int) -> "Subspace":
        """Return the whole space."""
        return cls(field, ambient_dim, field.identity(ambient_dim), range(ambient_dim))

    @property
    def dim(self) -> int:
        """Return the dimension."""
        return len(self.pivots)

    @property
    def is_zero(self) -> bool:
        """Return whether this is the zero subspace."""
        return self.dim == 0

    @property
    def is_full(self) -> bool:
        """Return whether this is the whole space."""
        return self.dim == self.ambient_dim

    @property
    def key(self) -> tuple:
        """Return a hashable canonical representation."""
        if self._key is None:
            self._key = (
                self.field.name,
                self.ambient_dim,
                tuple(tuple(row) for row in self.basis.tolist()),
            )
        return self._key

    def __eq__(self, other) -> bool:
        """Compare canonical bases."""
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.key == other.key

    def __hash__(self) -> int:
        """Hash the canonical basis."""
        return hash(self.key)

    def __repr__(self) -> str:
        """Return a short description."""
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"

    def _check(self, other: "Subspace"):
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatch(
                f"Ambient dimensions differ: {self.ambient_dim} != {other.ambient_dim}"
            )

    def residue(self, vectors) -> np.ndarray:
        """Reduce vectors (a single vector or rows) modulo this subspace."""
        v = self.field.array(vectors)
        if v.shape[-1] != self.ambient_dim:
            raise DimensionMismatch(
                f"Vector of length {v.shape[-1]} in ambient dim {self.ambient_dim}"
            )
        if not self.pivots:
            return v
        coeffs = v[..., list(self.pivots)]
        return self.field.reduce(v - coeffs @ self.basis)

    def residue_matrix(self) -> np.ndarray:
        """Return the matrix of v ↦ residue(v) acting on columns."""
        q = self.field.identity(self.ambient_dim)
        for j, p in enumerate(self.pivots):
            q[:, p] = self.field.reduce(q[:, p] - self.basis[j])
        return q

    def contains(self, v) -> bool:
        """Return whether v lies in the subspace."""
        return not np.count_nonzero(self.residue(v))

    def coordinates(self, vectors) -> np.ndarray:
        """Return coordinates in the canonical basis of vectors in the subspace."""
        v = self.field.array(vectors)
        return v[..., list(self.pivots)]

    def complement_columns(self) -> Tuple[int, ...]:
        """Return the non-pivot columns, which index a basis of the quotient."""
        pivots = set(self.pivots)
        return tuple(c for c in range(self.ambient_dim) if c not in pivots)

    def issubset(self, other: "Subspace") -> bool:
        """Return whether self ⊆ other."""
        self._check(other)
        if self.dim > other.dim:
            return False
        return not np.count_nonzero(other.residue(self.basis))

    def __le__(self, other: "Subspace") -> bool:
        """Inclusion."""
        return self.issubset(other)

    def __add__(self, other: "Subspace") -> "Subspace":
        """Sum of subspaces."""
        return sum_subspaces(self, other)

    def __and__(self, other: "Subspace") -> "Subspace":
        """Intersection of subspaces."""
        return intersect(self, other)

    def tensor(self, other: "Subspace") -> "Subspace":
        """Return self ⊗ other inside F^(n1·n2) with Kronecker coordinates."""
        if self.field != other.field:
            raise DimensionMismatch("Subspaces over different fields")
        basis = np.kron(self.basis, other.basis)
        return Subspace.span(
            self.field, self.field.reduce(basis), self.ambient_dim * other.ambient_dim
        )

    def vectors(self) -> np.ndarray:
        """Return all vectors of the subspace as rows."""
        return enumerate_vectors(self)


def kernel(m, field: Field, cols: Optional[int] = None) -> Subspace:
    """Return the null space {v | m·v = 0}."""
    a = _as_matrix(m, field, cols)
    n = a.shape[1]
    result = row_reduce(a, field)
    pivots = set(result.pivots)
    free = [c for c in range(n) if c not in pivots]
    if not free:
        return Subspace.zero(field, n)
    k = field.zeros((len(free), n))
    for i, f in enumerate(free):
        k[i, f] = 1 if field.is_prime else Fraction(1)
    if result.pivots:
        k[:, list(result.pivots)] = field.reduce(-result.matrix[:, free].T)
    return Subspace.span(field, k, n)


def image(m, field: Field) -> Subspace:
    """Return the column space of m."""
    a = _as_matrix(m, field)
    return Subspace.span(field, a.T, a.shape[0])


def preimage(m, s: Subspace) -> Subspace:
    """Return {v | m·v ∈ s}."""
    a = _as_matrix(m, s.field)
    if a.shape[0] != s.ambient_dim:
        raise DimensionMismatch(
            f"Map with {a.shape[0]} rows into ambient dim {s.ambient_dim}"
        )
    if s.is_zero:
        return kernel(a, s.field)
    if s.is_full:
        return Subspace.full(s.field, a.shape[1])
    return kernel(s.field.matmul(s.residue_matrix(), a), s.field)


def apply(m, s: Subspace) -> Subspace:
    """Return the image m(s) of a subspace."""
    a = _as_matrix(m, s.field)
    if a.shape[1] != s.ambient_dim:
        raise DimensionMismatch(
            f"Map with {a.shape[1]} columns on ambient dim {s.ambient_dim}"
        )
    return Subspace.span(s.field, s.field.matmul(s.basis, a.T), a.shape[0])


def sum_subspaces(*spaces: Subspace) -> Subspace:
    """Return the sum of subspaces of a common ambient space."""
    first = spaces[0]
    for s in spaces[1:]:
        first._check(s)
    rows = [s.basis for s in spaces if s.dim]
    if not rows:
        return Subspace.zero(first.field, first.ambient_dim)
    return Subspace.span(first.field, np.vstack(rows), first.ambient_dim)


def intersect(s1: Subspace, s2: Subspace) -> Subspace:
    """Return s1 ∩ s2 via the kernel of the stacked bases."""
    s1._check(s2)
    field = s1.field
    if s1.is_zero or s2.is_zero:
        return Subspace.zero(field, s1.ambient_dim)
    stacked = np.hstack([s1.basis.T, field.reduce(-s2.basis.T)])
    solutions = kernel(stacked, field)
    if solutions.is_zero:
        return Subspace.zero(field, s1.ambient_dim)
    return Subspace.span(
        field, field.matmul(solutions.basis[:, : s1.dim], s1.basis), s1.ambient_dim
    )


def contains(s: Subspace, v) -> bool:
    """Return whether v ∈ s."""
    return s.contains(v)


def enumerate_vectors(s: Subspace) -> np.ndarray:
    """Return all vectors of s as rows, lexicographic in canonical coordinates."""
    field = s.field
    field.require_prime("vector enumeration")
    cap = Limits.get().enum_cap
    count = field.p**s.dim
    if count > cap:
        raise CapExceeded("enum_cap", cap, count)
    coeffs = np.array(
        list(itertools.product(range(field.p), repeat=s.dim)), dtype=np.int64
    ).reshape((count, s.dim))
    return field.matmul(coeffs, s.basis)


def gaussian_binomial(n: int, k: int, q: int) -> int:
    """Return the number of k-dimensional subspaces of F_q^n."""
    if k < 0 or k > n:
        return 0
    num = 1
    den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def subspace_count(field: Field, n: int) -> int:
    """Return the number of subspaces of F_p^n."""
    field.require_prime("subspace counting")
    return sum(gaussian_binomial(n, k, field.p) for k in range(n + 1))


def enumerate_subspaces(field: Field, n: int) -> Iterator[Subspace]:
    """Yield every subspace of F_p^n in canonical form.

    Subspaces are produced by dimension, then pivot pattern, then the free
    entries to the right of each pivot in lexicographic order.
    """
    field.require_prime("subspace enumeration")
    for k in range(n + 1):
        for pivots in itertools.combinations(range(n), k):
            pivot_set = set(pivots)
            free = [
                (i, c)
                for i, p in enumerate(pivots)
                for c in range(p + 1, n)
                if c not in pivot_set
            ]
            for values in itertools.product(range(field.p), repeat=len(free)):
                basis = field.zeros((k, n))
                for i, p in enumerate(pivots):
                    basis[i, p] = 1
                for (i, c), value in zip(free, values):
                    basis[i, c] = value
                yield Subspace(field, n, basis, pivots)


def stack(field: Field, blocks: Sequence[np.ndarray], cols: int) -> np.ndarray:
    """Stack row blocks, tolerating an empty list."""
    blocks = [b for b in blocks if b.shape[0]]
    if not blocks:
        return field.zeros((0, cols))
    return np.vstack(blocks)


def is_zero(arr: np.ndarray) -> bool:
    """Return whether an array has only zero entries."""
    return not np.count_nonzero(arr)


def vector_key(v: Iterable) -> tuple:
    """Return a hashable form of a vector."""
    return tuple(np.asarray(v).tolist())

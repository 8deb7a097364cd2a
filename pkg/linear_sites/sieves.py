"""Sieves: precomposition-closed subfunctors of representables."""

import logging
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel

from .error import CategoryMismatch, CompositionError, DimensionMismatch
from .exactlin import Subspace, is_zero, preimage, row_reduce
from .lincat import (
    FiniteLinearCategory,
    LinearFunctor,
    PresheafModule,
    ValidationReport,
    Violation,
    pair_name,
    quotient_module,
    representable,
    require_same_category,
    submodule,
    tensor_category,
)


LOGGER = logging.getLogger(__name__)


class Sieve:
    """A sieve on a target object, stored by all of its components."""

    __slots__ = ("category", "target", "components", "_key")

    def __init__(
        self,
        category: FiniteLinearCategory,
        target: str,
        components: Mapping[str, Subspace],
    ):
        """Initialize from per-object subspaces of hom(B, target)."""
        category.check_object(target)
        self.category = category
        self.target = target
        self.components = {}
        for b in category.objects:
            d = category.hom_dim(b, target)
            comp = components.get(b) or Subspace.zero(category.field, d)
            if comp.ambient_dim != d:
                raise DimensionMismatch(
                    f"Component at {b} lives in dim {comp.ambient_dim}, hom has dim {d}"
                )
            self.components[b] = comp
        self._key = None

    @classmethod
    def from_bases(
        cls, category: FiniteLinearCategory, target: str, bases: Mapping[str, Sequence]
    ) -> "Sieve":
        """Build a sieve from spanning rows per object, without closing."""
        field = category.field
        return cls(
            category,
            target,
            {
                b: Subspace.span(field, rows, category.hom_dim(b, target))
                for b, rows in bases.items()
            },
        )

    def __getitem__(self, b: str) -> Subspace:
        """Return the component at b."""
        self.category.check_object(b)
        return self.components[b]

    def __repr__(self) -> str:
        """Return a short description."""
        return f"Sieve(target={self.target}, dims={self.dims})"

    @property
    def dims(self) -> Dict[str, int]:
        """Return the component dimensions."""
        return {b: s.dim for b, s in self.components.items()}

    @property
    def is_full(self) -> bool:
        """Return whether this is the representable sieve."""
        return all(s.is_full for s in self.components.values())

    @property
    def is_zero(self) -> bool:
        """Return whether every component vanishes."""
        return all(s.is_zero for s in self.components.values())

    def generators(self) -> List[Tuple[str, np.ndarray]]:
        """Return the canonical basis vectors of all components."""
        return [
            (b, row) for b in self.category.objects for row in self.components[b].basis
        ]

    @property
    def key(self) -> tuple:
        """Return a hashable canonical representation."""
        if self._key is None:
            self._key = (
                self.target,
                tuple(self.components[b].key for b in self.category.objects),
            )
        return self._key

    def __eq__(self, other) -> bool:
        """Componentwise canonical equality."""
        if not isinstance(other, Sieve):
            return NotImplemented
        return self.key == other.key

    def __hash__(self) -> int:
        """Hash the canonical bases."""
        return hash(self.key)

    def __le__(self, other: "Sieve") -> bool:
        """Componentwise inclusion."""
        return sieve_contains(other, self)

    def __and__(self, other: "Sieve") -> "Sieve":
        """Intersection."""
        return intersect_sieves(self, other)

    def __add__(self, other: "Sieve") -> "Sieve":
        """Sum."""
        return sum_sieves(self, other)

    def describe(self) -> Dict[str, List[str]]:
        """Return the component bases in morphism labels."""
        c = self.category
        return {
            b: [c.describe(row, b, self.target) for row in comp.basis]
            for b, comp in self.components.items()
            if comp.dim
        }


def validate_sieve(r: Sieve) -> ValidationReport:
    """Check precomposition closure on basis morphisms."""
    c, a = r.category, r.target
    violations = []
    for b in c.objects:
        comp = r[b]
        if comp.is_zero:
            continue
        for b2 in c.objects:
            d = c.hom_dim(b2, b)
            if not d:
                continue
            moved = c.composites(b2, b, a, comp.basis, c.field.identity(d))
            if not is_zero(r[b2].residue(moved)):
                violations.append(Violation(kind="precomposition", objects=[b2, b, a]))
    return ValidationReport.from_violations(f"sieve on {a}", violations)


def _require_target(r: Sieve, s: Sieve):
    require_same_category(r.category, s.category)
    if r.target != s.target:
        raise CategoryMismatch(f"Sieves target {r.target} and {s.target}")


def representable_sieve(c: FiniteLinearCategory, a: str) -> Sieve:
    """Return the full sieve c(−, a)."""
    c.check_object(a)
    return Sieve(c, a, {b: Subspace.full(c.field, c.hom_dim(b, a)) for b in c.objects})


def zero_sieve(c: FiniteLinearCategory, a: str) -> Sieve:
    """Return the zero sieve on a."""
    return Sieve(c, a, {})


def _close_once(
    c: FiniteLinearCategory, a: str, comps: Mapping[str, Subspace]
) -> Dict[str, Subspace]:
    field = c.field
    closed = {}
    for b2 in c.objects:
        rows = [comps[b2].basis] if comps[b2].dim else []
        for b in c.objects:
            d = c.hom_dim(b2, b)
            if d and comps[b].dim:
                rows.append(c.composites(b2, b, a, comps[b].basis, field.identity(d)))
        closed[b2] = Subspace.span(
            field, np.vstack(rows) if rows else field.zeros((0, 0)), c.hom_dim(b2, a)
        )
    return closed


def close_sieve(c: FiniteLinearCategory, a: str, comps: Mapping[str, Subspace]) -> Sieve:
    """Close per-object subspaces of hom(−, a) under precomposition."""
    start = {
        b: comps.get(b) or Subspace.zero(c.field, c.hom_dim(b, a)) for b in c.objects
    }
    closed = _close_once(c, a, start)
    again = _close_once(c, a, closed)
    if any(again[b] != closed[b] for b in c.objects):
        raise CompositionError(f"Sieve generation on {a} did not stabilize")
    return Sieve(c, a, closed)


def sieve_from_generators(
    c: FiniteLinearCategory, a: str, gens: Iterable[Tuple[str, Sequence]]
) -> Sieve:
    """Return the smallest sieve on a containing the given morphisms."""
    c.check_object(a)
    rows: Dict[str, list] = {b: [] for b in c.objects}
    for b, v in gens:
        c.check_object(b)
        v = c.field.array(v)
        if v.shape != (c.hom_dim(b, a),):
            raise DimensionMismatch(f"Generator of length {v.shape} in hom({b},{a})")
        rows[b].append(v)
    comps = {
        b: Subspace.span(c.field, np.vstack(vs), c.hom_dim(b, a))
        for b, vs in rows.items()
        if vs
    }
    return close_sieve(c, a, comps)


def pullback_sieve(r: Sieve, f, source: str) -> Sieve:
    """Return f^{-1}r for f ∈ hom(source, r.target)."""
    c = r.category
    c.check_object(source)
    f = c.field.array(f)
    if f.shape != (c.hom_dim(source, r.target),):
        raise DimensionMismatch(
            f"Morphism of length {f.shape} in hom({source},{r.target})"
        )
    if r.is_full:
        return representable_sieve(c, source)
    return Sieve(
        c,
        source,
        {
            b: preimage(c.postcompose(f, b, source, r.target), r[b])
            for b in c.objects
            if c.hom_dim(b, source)
        },
    )


def intersect_sieves(*sieves: Sieve) -> Sieve:
    """Return the componentwise intersection."""
    first = sieves[0]
    for s in sieves[1:]:
        _require_target(first, s)
    comps = dict(first.components)
    for s in sieves[1:]:
        comps = {b: comps[b] & s[b] for b in comps}
    return Sieve(first.category, first.target, comps)


def sum_sieves(*sieves: Sieve) -> Sieve:
    """Return the componentwise sum, itself a sieve."""
    first = sieves[0]
    for s in sieves[1:]:
        _require_target(first, s)
    comps = dict(first.components)
    for s in sieves[1:]:
        comps = {b: comps[b] + s[b] for b in comps}
    return Sieve(first.category, first.target, comps)


def sieve_contains(r: Sieve, s: Sieve) -> bool:
    """Return whether r contains s."""
    _require_target(r, s)
    return all(s[b] <= r[b] for b in r.category.objects)


def sieve_equal(r: Sieve, s: Sieve) -> bool:
    """Return whether two sieves have identical components."""
    _require_target(r, s)
    return r == s


def compose_sieve(r: Sieve, family: Mapping[str, Sieve]) -> Sieve:
    """Return the sieve generated by f∘g with f ∈ r(B) and g ∈ family[B].

    Objects missing from the family contribute f itself.
    """
    c, a = r.category, r.target
    field = c.field
    rows: Dict[str, list] = {b: [] for b in c.objects}
    for b in c.objects:
        comp = r[b]
        if comp.is_zero:
            continue
        inner = family.get(b)
        if inner is None:
            rows[b].append(comp.basis)
            continue
        for b2 in c.objects:
            if inner[b2].dim:
                rows[b2].append(c.composites(b2, b, a, comp.basis, inner[b2].basis))
    comps = {
        b: Subspace.span(field, np.vstack(vs), c.hom_dim(b, a))
        for b, vs in rows.items()
        if vs
    }
    return Sieve(c, a, comps)


def _tensor_context(
    r: Sieve, s: Sieve, category: Optional[FiniteLinearCategory]
) -> FiniteLinearCategory:
    c = category or tensor_category(r.category, s.category)
    if c.factors is None:
        raise CategoryMismatch(f"{c!r} is not a tensor category")
    a, b = c.factors
    if a != r.category or b != s.category:
        raise CategoryMismatch("Sieves do not live on the factors of the tensor category")
    return c


def tensor_sieve(
    r: Sieve, s: Sieve, category: Optional[FiniteLinearCategory] = None
) -> Sieve:
    """Return r ⊠ s on (r.target, s.target), componentwise r(A') ⊗ s(B')."""
    c = _tensor_context(r, s, category)
    comps = {p: r[x].tensor(s[y]) for p, (x, y) in c.pairs.items()}
    return Sieve(c, pair_name(r.target, s.target), comps)


def image_sieve(phi: LinearFunctor, r: Sieve) -> Sieve:
    """Return the sieve on φ(target) generated by the images of r."""
    require_same_category(phi.source, r.category)
    a = r.target
    gens = [(phi(b), phi.apply(v, b, a)) for b, v in r.generators()]
    return sieve_from_generators(phi.target, phi(a), gens)


def functor_preimage_sieve(phi: LinearFunctor, t: Sieve, a: str) -> Sieve:
    """Return φ^{-1}t on a, for a sieve t on φ(a)."""
    require_same_category(phi.target, t.category)
    if t.target != phi(a):
        raise CategoryMismatch(f"Sieve targets {t.target}, expected {phi(a)}")
    src = phi.source
    return Sieve(
        src,
        a,
        {b: preimage(phi.hom_map(b, a), t[phi(b)]) for b in src.objects},
    )


def quotient_of_representable(r: Sieve) -> PresheafModule:
    """Return c(−, A)/r."""
    return quotient_module(
        representable(r.category, r.target),
        r.components,
        name=f"h({r.target})/R",
    )


def sieve_module(r: Sieve) -> PresheafModule:
    """Return r as a submodule of c(−, A)."""
    return submodule(representable(r.category, r.target), r.components, name="R")


def decompose_tensor(
    c: FiniteLinearCategory, h, source: str, target: str
) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Write h ∈ hom(source, target) of a tensor category as Σ f_i ⊗ g_i.

    The number of terms is the tensor rank of h.
    """
    if c.factors is None:
        raise CategoryMismatch(f"{c!r} is not a tensor category")
    a, b = c.factors
    (x, y), (x2, y2) = c.pairs[source], c.pairs[target]
    field = c.field
    h = field.array(h).reshape((a.hom_dim(x, x2), b.hom_dim(y, y2)))
    reduced = row_reduce(h, field)
    cols = h[:, list(reduced.pivots)]
    return [(cols[:, i].copy(), reduced.matrix[i].copy()) for i in range(reduced.rank)]


def check_pullback_containment(
    c: FiniteLinearCategory, h, source: str, r: Sieve, s: Sieve
) -> bool:
    """Check (∩ f_i^{-1}r) ⊠ (∩ g_i^{-1}s) ⊆ h^{-1}(r ⊠ s).

    Here h = Σ f_i ⊗ g_i.
    """
    x, y = c.pairs[source]
    terms = decompose_tensor(c, h, source, pair_name(r.target, s.target))
    left = representable_sieve(r.category, x)
    right = representable_sieve(s.category, y)
    for f, g in terms:
        left = left & pullback_sieve(r, f, x)
        right = right & pullback_sieve(s, g, y)
    lhs = tensor_sieve(left, right, c)
    rhs = pullback_sieve(tensor_sieve(r, s, c), h, source)
    return sieve_contains(rhs, lhs)


class SieveData(BaseModel):
    """Serialized sieve: target plus nonzero component bases."""

    target: str
    components: Dict[str, List[List[Union[int, str]]]] = {}

    @classmethod
    def from_sieve(cls, r: Sieve) -> "SieveData":
        """Encode a sieve."""
        field = r.category.field
        return cls(
            target=r.target,
            components={
                b: field.encode_array(comp.basis)
                for b, comp in r.components.items()
                if comp.dim
            },
        )

    def to_sieve(self, c: FiniteLinearCategory) -> Sieve:
        """Decode against a category; the components are not re-closed."""
        return Sieve.from_bases(c, self.target, self.components)

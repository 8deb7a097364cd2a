"""Finite linear categories, linear functors, presheaf modules and their tensors.

Conventions: hom(A, B) is the space of morphisms A → B. Composition constants
for a triple (A, B, C) form an array of shape
(dim hom(A,C), dim hom(B,C), dim hom(A,B)) so that
(g∘f)_k = Σ T[k, i, j] g_i f_j. A module F is contravariant; the action table
for a pair (B, A) has shape (dim F(B), dim hom(B,A), dim F(A)).
"""

import itertools
import logging
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel

from .error import CapExceeded, CategoryMismatch, DimensionMismatch, FieldMismatch
from .error import UnknownObject
from .exactlin import Field, Subspace, is_zero, kernel, row_reduce
from .limits import Limits


LOGGER = logging.getLogger(__name__)


def pair_name(a: str, b: str) -> str:
    """Return the identifier of a pair object."""
    return f"({a},{b})"


class Violation(BaseModel):
    """A single failed axiom instance."""

    kind: str
    objects: List[str]
    morphisms: List[str] = []


class ValidationReport(BaseModel):
    """Outcome of a validator."""

    subject: str
    valid: bool
    violations: List[Violation] = []

    @classmethod
    def from_violations(cls, subject: str, violations: List[Violation]):
        """Build a report; valid iff nothing was violated."""
        return cls(subject=subject, valid=not violations, violations=violations)


class FiniteLinearCategory:
    """Finitely many objects with finite-dimensional hom spaces over a field."""

    def __init__(
        self,
        field: Field,
        objects: Sequence[str],
        hom_dims: Mapping[Tuple[str, str], int],
        identities: Mapping[str, Sequence],
        composition: Mapping[Tuple[str, str, str], np.ndarray],
        hom_labels: Optional[Mapping[Tuple[str, str], Sequence[str]]] = None,
        name: Optional[str] = None,
        factors: Optional[Tuple["FiniteLinearCategory", "FiniteLinearCategory"]] = None,
        pairs: Optional[Mapping[str, Tuple[str, str]]] = None,
    ):
        """Initialize a category; constructors trust input, see validate_category."""
        self.field = field
        self.objects = tuple(objects)
        self.name = name
        self.hom_dims = {
            (a, b): int(hom_dims.get((a, b), 0))
            for a in self.objects
            for b in self.objects
        }
        self.identities = {
            a: field.array(identities[a], (self.hom_dims[(a, a)],))
            if a in identities
            else field.zeros(self.hom_dims[(a, a)])
            for a in self.objects
        }
        self._composition = {
            key: field.array(table, (self.hom_dims[(key[0], key[2])],
                                     self.hom_dims[(key[1], key[2])],
                                     self.hom_dims[(key[0], key[1])]))
            for key, table in composition.items()
        }
        labels = dict(hom_labels or {})
        self.hom_labels = {
            key: list(labels.get(key) or [f"{key[0]}>{key[1]}#{i}" for i in range(d)])
            for key, d in self.hom_dims.items()
        }
        self.factors = factors
        self.pairs = dict(pairs or {})
        self._key = None

    def __repr__(self) -> str:
        """Return a short description."""
        return f"FiniteLinearCategory({self.name or '?'}, objects={list(self.objects)})"

    def check_object(self, obj: str):
        """Raise unless obj is an object of this category."""
        if obj not in self.objects:
            raise UnknownObject(f"{obj!r} is not an object of {self.name or 'category'}")

    def hom_dim(self, a: str, b: str) -> int:
        """Return dim hom(a, b)."""
        try:
            return self.hom_dims[(a, b)]
        except KeyError:
            self.check_object(a)
            self.check_object(b)
            raise

    def identity(self, a: str) -> np.ndarray:
        """Return the identity coordinates in hom(a, a)."""
        self.check_object(a)
        return self.identities[a]

    def composition(self, a: str, b: str, c: str) -> np.ndarray:
        """Return the structure constants hom(b,c) × hom(a,b) → hom(a,c)."""
        table = self._composition.get((a, b, c))
        if table is None:
            return self.field.zeros(
                (self.hom_dim(a, c), self.hom_dim(b, c), self.hom_dim(a, b))
            )
        return table

    def compose(self, g, f, a: str, b: str, c: str) -> np.ndarray:
        """Return g∘f for f ∈ hom(a,b) and g ∈ hom(b,c)."""
        g = self.field.array(g)
        f = self.field.array(f)
        if g.shape != (self.hom_dim(b, c),) or f.shape != (self.hom_dim(a, b),):
            raise DimensionMismatch(f"Cannot compose over {a}->{b}->{c}")
        return self.field.matmul(self.postcompose(g, a, b, c), f)

    def postcompose(self, g, a: str, b: str, c: str) -> np.ndarray:
        """Return the matrix of f ↦ g∘f, hom(a,b) → hom(a,c)."""
        g = self.field.array(g)
        return self.field.tensordot(self.composition(a, b, c), g, ([1], [0]))

    def precompose(self, f, a: str, b: str, c: str) -> np.ndarray:
        """Return the matrix of g ↦ g∘f, hom(b,c) → hom(a,c)."""
        f = self.field.array(f)
        return self.field.tensordot(self.composition(a, b, c), f, ([2], [0]))

    def composites(self, a: str, b: str, c: str, left, right) -> np.ndarray:
        """Return all g∘f as rows, for g among the rows of left and f of right."""
        field = self.field
        left = field.array(left)
        right = field.array(right)
        d = self.hom_dim(a, c)
        if not left.shape[0] or not right.shape[0] or not d:
            return field.zeros((0, d))
        table = self.composition(a, b, c)
        partial = np.tensordot(table, left, axes=([1], [1]))
        full = np.tensordot(partial, right, axes=([1], [1]))
        return field.reduce(full.transpose(1, 2, 0).reshape((-1, d)))

    def describe(self, v, a: str, b: str) -> str:
        """Return a readable form of a morphism vector in hom(a, b)."""
        labels = self.hom_labels[(a, b)]
        terms = []
        for label, coeff in zip(labels, np.asarray(v).tolist()):
            if coeff == 0:
                continue
            terms.append(label if coeff == 1 else f"{coeff}*{label}")
        return "+".join(terms) or "0"

    @property
    def key(self) -> tuple:
        """Return a hashable structural representation."""
        if self._key is None:
            comp = tuple(
                (k, self.composition(*k).tolist())
                for k in itertools.product(self.objects, repeat=3)
                if not is_zero(self.composition(*k))
            )
            self._key = (
                self.field.name,
                self.objects,
                tuple(sorted(self.hom_dims.items())),
                tuple((a, tuple(self.identities[a].tolist())) for a in self.objects),
                repr(comp),
            )
        return self._key

    def __eq__(self, other) -> bool:
        """Structural equality."""
        if not isinstance(other, FiniteLinearCategory):
            return NotImplemented
        return self is other or self.key == other.key

    def __hash__(self) -> int:
        """Hash the structure."""
        return hash(self.key)


def require_same_category(c1: FiniteLinearCategory, c2: FiniteLinearCategory):
    """Raise unless two categories agree."""
    if c1 is not c2 and c1 != c2:
        raise CategoryMismatch(f"{c1!r} and {c2!r} differ")


def require_same_field(f1: Field, f2: Field):
    """Raise unless two fields agree."""
    if f1 != f2:
        raise FieldMismatch(f"Fields {f1.name} and {f2.name} differ")


def validate_category(c: FiniteLinearCategory) -> ValidationReport:
    """Check identity and associativity axioms on all basis triples."""
    field = c.field
    violations: List[Violation] = []
    if not c.objects:
        violations.append(Violation(kind="empty-category", objects=[]))
    for a in c.objects:
        if c.hom_dim(a, a) == 0:
            violations.append(Violation(kind="identity-missing", objects=[a]))
    for a, b in itertools.product(c.objects, repeat=2):
        d = c.hom_dim(a, b)
        if not d or not c.hom_dim(a, a) or not c.hom_dim(b, b):
            continue
        ident = field.identity(d)
        left = c.postcompose(c.identity(b), a, b, b)
        right = c.precompose(c.identity(a), a, a, b)
        for j in range(d):
            if not np.array_equal(left[:, j], ident[:, j]):
                violations.append(
                    Violation(
                        kind="left-unit",
                        objects=[a, b],
                        morphisms=[
                            c.describe(c.identity(b), b, b),
                            c.hom_labels[(a, b)][j],
                        ],
                    )
                )
            if not np.array_equal(right[:, j], ident[:, j]):
                violations.append(
                    Violation(
                        kind="right-unit",
                        objects=[a, b],
                        morphisms=[
                            c.hom_labels[(a, b)][j],
                            c.describe(c.identity(a), a, a),
                        ],
                    )
                )
    for a, b, cc, d in itertools.product(c.objects, repeat=4):
        if not (c.hom_dim(a, b) and c.hom_dim(b, cc) and c.hom_dim(cc, d)):
            continue
        # h∘(g∘f) indexed (out, h, g, f)
        inner = field.tensordot(
            c.composition(a, cc, d), c.composition(a, b, cc), ([2], [0])
        )
        # (h∘g)∘f indexed (out, f, h, g)
        outer = field.tensordot(
            c.composition(a, b, d), c.composition(b, cc, d), ([1], [0])
        )
        diff = field.reduce(inner - outer.transpose(0, 2, 3, 1))
        bad = sorted({tuple(ix[1:]) for ix in np.argwhere(diff != 0).tolist()})
        for h, g, f in bad:
            violations.append(
                Violation(
                    kind="associativity",
                    objects=[a, b, cc, d],
                    morphisms=[
                        c.hom_labels[(cc, d)][h],
                        c.hom_labels[(b, cc)][g],
                        c.hom_labels[(a, b)][f],
                    ],
                )
            )
    LOGGER.debug("Validated category %s: %d violations", c.name, len(violations))
    return ValidationReport.from_violations(c.name or "category", violations)


def full_subcategory(
    c: FiniteLinearCategory, objects: Sequence[str], name: Optional[str] = None
) -> Tuple[FiniteLinearCategory, "LinearFunctor"]:
    """Return the full subcategory on some objects and its inclusion functor."""
    for obj in objects:
        c.check_object(obj)
    sub = FiniteLinearCategory(
        c.field,
        objects,
        {(a, b): c.hom_dim(a, b) for a in objects for b in objects},
        {a: c.identity(a) for a in objects},
        {k: c.composition(*k) for k in itertools.product(objects, repeat=3)},
        hom_labels={(a, b): c.hom_labels[(a, b)] for a in objects for b in objects},
        name=name,
    )
    inclusion = LinearFunctor(
        sub,
        c,
        {a: a for a in objects},
        {
            (a, b): c.field.identity(c.hom_dim(a, b))
            for a in objects
            for b in objects
        },
        name=f"{name or 'sub'}->{c.name or 'category'}",
    )
    return sub, inclusion


class LinearFunctor:
    """A linear functor given by an object map and matrices on hom spaces."""

    def __init__(
        self,
        source: FiniteLinearCategory,
        target: FiniteLinearCategory,
        object_map: Mapping[str, str],
        hom_maps: Mapping[Tuple[str, str], np.ndarray],
        name: Optional[str] = None,
    ):
        """Initialize a functor; validate_functor checks the axioms."""
        require_same_field(source.field, target.field)
        self.source = source
        self.target = target
        self.object_map = dict(object_map)
        self.name = name
        self.hom_maps = {
            key: source.field.array(
                m, (target.hom_dim(self(key[0]), self(key[1])), source.hom_dim(*key))
            )
            for key, m in hom_maps.items()
        }

    def __call__(self, obj: str) -> str:
        """Return the image of an object."""
        try:
            return self.object_map[obj]
        except KeyError:
            raise UnknownObject(f"{obj!r} is not mapped by {self.name or 'functor'}")

    def __repr__(self) -> str:
        """Return a short description."""
        return f"LinearFunctor({self.name or '?'})"

    @property
    def field(self) -> Field:
        """Return the ground field."""
        return self.source.field

    def hom_map(self, a: str, b: str) -> np.ndarray:
        """Return the matrix hom_source(a,b) → hom_target(φa,φb)."""
        m = self.hom_maps.get((a, b))
        if m is None:
            return self.field.zeros(
                (self.target.hom_dim(self(a), self(b)), self.source.hom_dim(a, b))
            )
        return m

    def apply(self, v, a: str, b: str) -> np.ndarray:
        """Return φ(v) for v ∈ hom(a, b)."""
        return self.field.matmul(self.hom_map(a, b), self.field.array(v))


def validate_functor(phi: LinearFunctor) -> ValidationReport:
    """Check preservation of identities and composition on basis morphisms."""
    src, tgt, field = phi.source, phi.target, phi.field
    violations: List[Violation] = []
    for a in src.objects:
        if a not in phi.object_map or phi(a) not in tgt.objects:
            violations.append(Violation(kind="object-map", objects=[a]))
    if violations:
        return ValidationReport.from_violations(phi.name or "functor", violations)
    for a in src.objects:
        if not np.array_equal(phi.apply(src.identity(a), a, a), tgt.identity(phi(a))):
            violations.append(Violation(kind="identity", objects=[a]))
    for a, b, c in itertools.product(src.objects, repeat=3):
        if not (src.hom_dim(a, b) and src.hom_dim(b, c)):
            continue
        lhs = field.tensordot(phi.hom_map(a, c), src.composition(a, b, c), ([1], [0]))
        rhs = field.tensordot(
            field.tensordot(
                tgt.composition(phi(a), phi(b), phi(c)), phi.hom_map(b, c), ([1], [0])
            ),
            phi.hom_map(a, b),
            ([1], [0]),
        )
        for _, g, f in sorted({tuple(ix) for ix in np.argwhere(lhs != rhs).tolist()}):
            violations.append(
                Violation(
                    kind="composition",
                    objects=[a, b, c],
                    morphisms=[src.hom_labels[(b, c)][g], src.hom_labels[(a, b)][f]],
                )
            )
    return ValidationReport.from_violations(phi.name or "functor", violations)


def identity_functor(c: FiniteLinearCategory) -> LinearFunctor:
    """Return the identity functor."""
    return LinearFunctor(
        c,
        c,
        {a: a for a in c.objects},
        {(a, b): c.field.identity(c.hom_dim(a, b)) for a in c.objects for b in c.objects},
        name=f"id_{c.name or 'category'}",
    )


def compose_functors(psi: LinearFunctor, phi: LinearFunctor) -> LinearFunctor:
    """Return ψ∘φ."""
    require_same_category(phi.target, psi.source)
    src = phi.source
    return LinearFunctor(
        src,
        psi.target,
        {a: psi(phi(a)) for a in src.objects},
        {
            (a, b): phi.field.matmul(psi.hom_map(phi(a), phi(b)), phi.hom_map(a, b))
            for a in src.objects
            for b in src.objects
        },
        name=f"{psi.name}.{phi.name}",
    )


def same_functor(phi: LinearFunctor, psi: LinearFunctor) -> bool:
    """Return whether two functors agree on objects and all hom matrices."""
    if phi.source != psi.source or phi.target != psi.target:
        return False
    return all(
        phi(a) == psi(a) for a in phi.source.objects
    ) and all(
        np.array_equal(phi.hom_map(a, b), psi.hom_map(a, b))
        for a in phi.source.objects
        for b in phi.source.objects
    )


def _kron_table(t1: np.ndarray, t2: np.ndarray) -> np.ndarray:
    """Kronecker product of two 3-index structure-constant tables."""
    outer = np.multiply.outer(t1, t2)
    shape = tuple(x * y for x, y in zip(t1.shape, t2.shape))
    return outer.transpose(0, 3, 1, 4, 2, 5).reshape(shape)


def tensor_category(
    a: FiniteLinearCategory, b: FiniteLinearCategory, name: Optional[str] = None
) -> FiniteLinearCategory:
    """Return a ⊗ b: pair objects, tensor hom spaces, Kronecker composition."""
    require_same_field(a.field, b.field)
    field = a.field
    pairs = {
        pair_name(x, y): (x, y) for x in a.objects for y in b.objects
    }
    objects = list(pairs)
    hom_dims = {}
    labels = {}
    for p, (x, y) in pairs.items():
        for q, (x2, y2) in pairs.items():
            hom_dims[(p, q)] = a.hom_dim(x, x2) * b.hom_dim(y, y2)
            labels[(p, q)] = [
                f"{la}⊗{lb}"
                for la in a.hom_labels[(x, x2)]
                for lb in b.hom_labels[(y, y2)]
            ]
    identities = {
        p: field.reduce(np.kron(a.identity(x), b.identity(y)))
        for p, (x, y) in pairs.items()
    }
    composition = {}
    for p, q, r in itertools.product(objects, repeat=3):
        (x1, y1), (x2, y2), (x3, y3) = pairs[p], pairs[q], pairs[r]
        if not (hom_dims[(p, q)] and hom_dims[(q, r)] and hom_dims[(p, r)]):
            continue
        composition[(p, q, r)] = field.reduce(
            _kron_table(a.composition(x1, x2, x3), b.composition(y1, y2, y3))
        )
    return FiniteLinearCategory(
        field,
        objects,
        hom_dims,
        identities,
        composition,
        hom_labels=labels,
        name=name or f"{a.name}⊗{b.name}",
        factors=(a, b),
        pairs=pairs,
    )


def tensor_functor(phi: LinearFunctor, psi: LinearFunctor) -> LinearFunctor:
    """Return φ ⊗ ψ: a ⊗ b → c ⊗ d with Kronecker hom maps."""
    require_same_field(phi.field, psi.field)
    source = tensor_category(phi.source, psi.source)
    target = tensor_category(phi.target, psi.target)
    object_map = {
        p: pair_name(phi(x), psi(y)) for p, (x, y) in source.pairs.items()
    }
    hom_maps = {}
    for p, (x, y) in source.pairs.items():
        for q, (x2, y2) in source.pairs.items():
            hom_maps[(p, q)] = phi.field.reduce(
                np.kron(phi.hom_map(x, x2), psi.hom_map(y, y2))
            )
    return LinearFunctor(
        source, target, object_map, hom_maps, name=f"{phi.name}⊗{psi.name}"
    )


class PresheafModule:
    """A contravariant linear functor from a finite category to vector spaces."""

    def __init__(
        self,
        category: FiniteLinearCategory,
        dims: Mapping[str, int],
        action: Mapping[Tuple[str, str], np.ndarray],
        name: Optional[str] = None,
    ):
        """Initialize from per-object dimensions and action tables."""
        self.category = category
        self.name = name
        self.dims = {a: int(dims.get(a, 0)) for a in category.objects}
        field = category.field
        self.action = {
            (b, a): field.array(
                table, (self.dims[b], category.hom_dim(b, a), self.dims[a])
            )
            for (b, a), table in action.items()
        }
        self._key = None

    def __repr__(self) -> str:
        """Return a short description."""
        return f"PresheafModule({self.name or '?'}, dims={self.dims})"

    @property
    def field(self) -> Field:
        """Return the ground field."""
        return self.category.field

    def dim(self, a: str) -> int:
        """Return dim F(a)."""
        self.category.check_object(a)
        return self.dims[a]

    @property
    def total_dim(self) -> int:
        """Return Σ dim F(a)."""
        return sum(self.dims.values())

    @property
    def is_zero(self) -> bool:
        """Return whether every space is zero."""
        return self.total_dim == 0

    def action_table(self, b: str, a: str) -> np.ndarray:
        """Return the table for hom(b,a) ⊗ F(a) → F(b)."""
        table = self.action.get((b, a))
        if table is None:
            return self.field.zeros(
                (self.dim(b), self.category.hom_dim(b, a), self.dim(a))
            )
        return table

    def act(self, f, b: str, a: str) -> np.ndarray:
        """Return the matrix F(f): F(a) → F(b) for f ∈ hom(b, a)."""
        return self.field.tensordot(
            self.action_table(b, a), self.field.array(f), ([1], [0])
        )

    @property
    def key(self) -> tuple:
        """Return a hashable structural representation."""
        if self._key is None:
            self._key = (
                tuple(sorted(self.dims.items())),
                repr(
                    tuple(
                        (k, self.action_table(*k).tolist())
                        for k in itertools.product(self.category.objects, repeat=2)
                        if not is_zero(self.action_table(*k))
                    )
                ),
            )
        return self._key

    def __eq__(self, other) -> bool:
        """Structural equality over equal categories."""
        if not isinstance(other, PresheafModule):
            return NotImplemented
        return self.category == other.category and self.key == other.key

    def __hash__(self) -> int:
        """Hash the structure."""
        return hash(self.key)


def validate_module(m: PresheafModule) -> ValidationReport:
    """Check unitality and compatibility with composition on basis elements."""
    c, field = m.category, m.field
    violations: List[Violation] = []
    for a in c.objects:
        if m.dim(a) and not np.array_equal(
            m.act(c.identity(a), a, a), field.identity(m.dim(a))
        ):
            violations.append(Violation(kind="unit", objects=[a]))
    for cc, b, a in itertools.product(c.objects, repeat=3):
        # g: cc → b, f: b → a; need F(f∘g) = F(g)F(f)
        if not (c.hom_dim(cc, b) and c.hom_dim(b, a) and m.dim(cc) and m.dim(a)):
            continue
        # (out, in, f, g)
        lhs = field.tensordot(m.action_table(cc, a), c.composition(cc, b, a), ([1], [0]))
        # (out, g, f, in)
        rhs = field.tensordot(m.action_table(cc, b), m.action_table(b, a), ([2], [0]))
        diff = field.reduce(lhs - rhs.transpose(0, 3, 2, 1))
        bad = sorted({(ix[2], ix[3]) for ix in np.argwhere(diff != 0).tolist()})
        for f, g in bad:
            violations.append(
                Violation(
                    kind="composition",
                    objects=[cc, b, a],
                    morphisms=[c.hom_labels[(b, a)][f], c.hom_labels[(cc, b)][g]],
                )
            )
    return ValidationReport.from_violations(m.name or "module", violations)


def representable(c: FiniteLinearCategory, a: str, name: Optional[str] = None):
    """Return the representable module c(−, a)."""
    c.check_object(a)
    dims = {b: c.hom_dim(b, a) for b in c.objects}
    action = {
        (b2, b): c.composition(b2, b, a).transpose(0, 2, 1)
        for b2 in c.objects
        for b in c.objects
        if c.hom_dim(b2, b) and dims[b] and dims[b2]
    }
    return PresheafModule(c, dims, action, name=name or f"h({a})")


def zero_module(c: FiniteLinearCategory, name: Optional[str] = None) -> PresheafModule:
    """Return the zero module."""
    return PresheafModule(c, {}, {}, name=name or "0")


def restrict_module(phi: LinearFunctor, f: PresheafModule) -> PresheafModule:
    """Return φ*F with (φ*F)(A) = F(φA)."""
    require_same_category(phi.target, f.category)
    src, field = phi.source, phi.field
    dims = {a: f.dim(phi(a)) for a in src.objects}
    action = {}
    for b, a in itertools.product(src.objects, repeat=2):
        if not (src.hom_dim(b, a) and dims[a] and dims[b]):
            continue
        table = field.tensordot(
            f.action_table(phi(b), phi(a)), phi.hom_map(b, a), ([1], [0])
        )
        action[(b, a)] = table.transpose(0, 2, 1)
    return PresheafModule(src, dims, action, name=f"{phi.name}*{f.name}")


def external_tensor_module(
    m: PresheafModule,
    n: PresheafModule,
    category: Optional[FiniteLinearCategory] = None,
) -> PresheafModule:
    """Return M ⊠ N on a ⊗ b with (M ⊠ N)(A,B) = M(A) ⊗ N(B)."""
    require_same_field(m.field, n.field)
    c = category or tensor_category(m.category, n.category)
    field = c.field
    dims = {p: m.dim(x) * n.dim(y) for p, (x, y) in c.pairs.items()}
    action = {}
    for p, (x, y) in c.pairs.items():
        for q, (x2, y2) in c.pairs.items():
            if not (c.hom_dim(p, q) and dims[p] and dims[q]):
                continue
            action[(p, q)] = field.reduce(
                _kron_table(m.action_table(x, x2), n.action_table(y, y2))
            )
    return PresheafModule(c, dims, action, name=f"{m.name}⊠{n.name}")


def is_submodule(m: PresheafModule, spaces: Mapping[str, Subspace]) -> bool:
    """Return whether a tuple of subspaces is stable under the action."""
    c, field = m.category, m.field
    for b, a in itertools.product(c.objects, repeat=2):
        w = spaces[a]
        if w.is_zero or not c.hom_dim(b, a) or not m.dim(b):
            continue
        moved = np.tensordot(m.action_table(b, a), w.basis, axes=([2], [1]))
        rows = field.reduce(moved.transpose(1, 2, 0).reshape((-1, m.dim(b))))
        if not is_zero(spaces[b].residue(rows)):
            return False
    return True


def submodule(
    m: PresheafModule, spaces: Mapping[str, Subspace], name: Optional[str] = None
) -> PresheafModule:
    """Return the submodule on stable subspaces, in their canonical bases."""
    c, field = m.category, m.field
    dims = {a: spaces[a].dim for a in c.objects}
    action = {}
    for b, a in itertools.product(c.objects, repeat=2):
        if not (c.hom_dim(b, a) and dims[a] and dims[b]):
            continue
        moved = field.reduce(
            np.tensordot(m.action_table(b, a), spaces[a].basis, axes=([2], [1]))
        )
        action[(b, a)] = moved[list(spaces[b].pivots)]
    return PresheafModule(c, dims, action, name=name or f"sub({m.name})")


def quotient_module(
    m: PresheafModule, spaces: Mapping[str, Subspace], name: Optional[str] = None
) -> PresheafModule:
    """Return M/W with quotient coordinates on the non-pivot columns of W."""
    c, field = m.category, m.field
    columns = {a: list(spaces[a].complement_columns()) for a in c.objects}
    dims = {a: len(columns[a]) for a in c.objects}
    action = {}
    for b, a in itertools.product(c.objects, repeat=2):
        if not (c.hom_dim(b, a) and dims[a] and dims[b]):
            continue
        moved = m.action_table(b, a)[:, :, columns[a]].transpose(1, 2, 0)
        reduced = spaces[b].residue(moved)[..., columns[b]]
        action[(b, a)] = reduced.transpose(2, 0, 1)
    return PresheafModule(c, dims, action, name=name or f"quot({m.name})")


def subquotient(
    m: PresheafModule,
    upper: Mapping[str, Subspace],
    lower: Mapping[str, Subspace],
) -> PresheafModule:
    """Return upper/lower for submodules lower ⊆ upper of m."""
    top = submodule(m, upper)
    inner = {
        a: Subspace.span(m.field, upper[a].coordinates(lower[a].basis), upper[a].dim)
        for a in m.category.objects
    }
    return quotient_module(top, inner, name=f"{m.name}[{top.total_dim}/{m.total_dim}]")


def _frozen_column(c: FiniteLinearCategory, side: int, frozen: str):
    """Return the embedding matrix hom_factor → hom_pair for f ↦ f⊗id or id⊗f."""
    a, b = c.factors
    field = c.field
    if side == 1:
        ident = b.identity(frozen).reshape((-1, 1))
        return lambda x, y: field.reduce(np.kron(field.identity(a.hom_dim(x, y)), ident))
    ident = a.identity(frozen).reshape((-1, 1))
    return lambda x, y: field.reduce(np.kron(ident, field.identity(b.hom_dim(x, y))))


def _require_tensor(c: FiniteLinearCategory):
    if c.factors is None:
        raise CategoryMismatch(f"{c!r} is not a tensor category")


def partial_module(f: PresheafModule, side: int, frozen: str) -> PresheafModule:
    """Freeze one variable of a module on a ⊗ b.

    side 1 returns F(−, frozen) on a; side 2 returns F(frozen, −) on b.
    """
    c = f.category
    _require_tensor(c)
    factor = c.factors[side - 1]
    other = c.factors[2 - side]
    other.check_object(frozen)
    embed = _frozen_column(c, side, frozen)

    def obj(x: str) -> str:
        return pair_name(x, frozen) if side == 1 else pair_name(frozen, x)

    dims = {x: f.dim(obj(x)) for x in factor.objects}
    action = {}
    for y, x in itertools.product(factor.objects, repeat=2):
        if not (factor.hom_dim(y, x) and dims[x] and dims[y]):
            continue
        table = f.field.tensordot(f.action_table(obj(y), obj(x)), embed(y, x), ([1], [0]))
        action[(y, x)] = table.transpose(0, 2, 1)
    return PresheafModule(factor, dims, action, name=f"{f.name}|{side}:{frozen}")


class NatTransform:
    """A natural transformation given by its component matrices."""

    def __init__(
        self,
        source: PresheafModule,
        target: PresheafModule,
        components: Mapping[str, np.ndarray],
    ):
        """Initialize; component at A has shape (dim N(A), dim M(A))."""
        require_same_category(source.category, target.category)
        self.source = source
        self.target = target
        field = source.field
        self.components = {
            a: field.array(
                components[a] if a in components else field.zeros(
                    (target.dim(a), source.dim(a))
                ),
                (target.dim(a), source.dim(a)),
            )
            for a in source.category.objects
        }

    def __getitem__(self, a: str) -> np.ndarray:
        """Return the component at a."""
        return self.components[a]

    def is_iso(self) -> bool:
        """Return whether every component is invertible."""
        field = self.source.field
        for a, comp in self.components.items():
            if comp.shape[0] != comp.shape[1]:
                return False
            if comp.shape[0] and row_reduce(comp, field).rank != comp.shape[0]:
                return False
        return True

    def is_zero(self) -> bool:
        """Return whether every component vanishes."""
        return all(is_zero(comp) for comp in self.components.values())


def validate_nat(eta: NatTransform) -> ValidationReport:
    """Check naturality on all basis morphisms."""
    m, n = eta.source, eta.target
    c, field = m.category, m.field
    violations: List[Violation] = []
    for b, a in itertools.product(c.objects, repeat=2):
        for f in range(c.hom_dim(b, a)):
            e = field.unit(c.hom_dim(b, a), f)
            lhs = field.matmul(eta[b], m.act(e, b, a))
            rhs = field.matmul(n.act(e, b, a), eta[a])
            if not np.array_equal(lhs, rhs):
                violations.append(
                    Violation(
                        kind="naturality",
                        objects=[b, a],
                        morphisms=[c.hom_labels[(b, a)][f]],
                    )
                )
    return ValidationReport.from_violations("transformation", violations)


def identity_nat(m: PresheafModule) -> NatTransform:
    """Return the identity transformation of M."""
    return NatTransform(m, m, {a: m.field.identity(m.dim(a)) for a in m.category.objects})


def compose_nat(theta: NatTransform, eta: NatTransform) -> NatTransform:
    """Return θ∘η."""
    field = eta.source.field
    return NatTransform(
        eta.source,
        theta.target,
        {a: field.matmul(theta[a], eta[a]) for a in eta.source.category.objects},
    )


def tensor_nat(
    eta: NatTransform,
    theta: NatTransform,
    category: Optional[FiniteLinearCategory] = None,
) -> NatTransform:
    """Return η ⊠ θ: M ⊠ N → M' ⊠ N' with components kron(η_A, θ_B)."""
    source = external_tensor_module(eta.source, theta.source, category)
    target = external_tensor_module(eta.target, theta.target, source.category)
    field = source.field
    return NatTransform(
        source,
        target,
        {
            p: field.reduce(np.kron(eta[x], theta[y]))
            for p, (x, y) in source.category.pairs.items()
        },
    )


class NatSpace:
    """The space of natural transformations M → N inside the component coordinates.

    Coordinates are the row-major entries of each component matrix, object by
    object in category order.
    """

    def __init__(
        self, source: PresheafModule, target: PresheafModule, subspace: Subspace
    ):
        """Initialize from a solution subspace."""
        self.source = source
        self.target = target
        self.subspace = subspace
        self.offsets: Dict[str, Tuple[int, int]] = {}
        start = 0
        for a in source.category.objects:
            size = target.dim(a) * source.dim(a)
            self.offsets[a] = (start, start + size)
            start += size

    @property
    def dim(self) -> int:
        """Return the dimension."""
        return self.subspace.dim

    def transformation(self, vector) -> NatTransform:
        """Return the transformation with given ambient coordinates."""
        vector = self.source.field.array(vector)
        components = {
            a: vector[lo:hi].reshape((self.target.dim(a), self.source.dim(a)))
            for a, (lo, hi) in self.offsets.items()
        }
        return NatTransform(self.source, self.target, components)

    def basis(self) -> List[NatTransform]:
        """Return the canonical basis as transformations."""
        return [self.transformation(row) for row in self.subspace.basis]

    def vector(self, eta: NatTransform) -> np.ndarray:
        """Return the ambient coordinates of a transformation."""
        field = self.source.field
        parts = [eta[a].reshape(-1) for a in self.source.category.objects]
        if not parts:
            return field.zeros(0)
        return field.array(np.concatenate(parts))

    def coordinates(self, eta: NatTransform) -> np.ndarray:
        """Return the coordinates of a transformation in the canonical basis."""
        return self.subspace.coordinates(self.vector(eta))


def hom_modules(m: PresheafModule, n: PresheafModule) -> NatSpace:
    """Solve the naturality system for all transformations M → N."""
    require_same_category(m.category, n.category)
    c, field = m.category, m.field
    space = NatSpace(m, n, Subspace.zero(field, 0))
    total = sum(hi - lo for lo, hi in space.offsets.values())
    blocks = []
    for b, a in itertools.product(c.objects, repeat=2):
        rows = n.dim(b) * m.dim(a)
        if not (c.hom_dim(b, a) and rows):
            continue
        for f in range(c.hom_dim(b, a)):
            mf = m.action_table(b, a)[:, f, :]
            nf = n.action_table(b, a)[:, f, :]
            eq = field.zeros((rows, total))
            lo_b, hi_b = space.offsets[b]
            lo_a, hi_a = space.offsets[a]
            eq[:, lo_b:hi_b] = field.reduce(
                eq[:, lo_b:hi_b] + np.kron(field.identity(n.dim(b)), mf.T)
            )
            eq[:, lo_a:hi_a] = field.reduce(
                eq[:, lo_a:hi_a] - np.kron(nf, field.identity(m.dim(a)))
            )
            blocks.append(eq)
    if blocks:
        solutions = kernel(np.vstack(blocks), field)
    else:
        solutions = Subspace.full(field, total)
    return NatSpace(m, n, solutions)


def partial_transport(f: PresheafModule, side: int, g, source: str, target: str):
    """Return the transformation F(−,source) → F(−,target) induced by g.

    For side 1, g ∈ hom_b(target, source) and the component at A is
    F(id_A ⊗ g). Side 2 is symmetric.
    """
    c = f.category
    _require_tensor(c)
    field = c.field
    factor = c.factors[side - 1]
    g = field.array(g)
    m = partial_module(f, side, source)
    n = partial_module(f, side, target)
    components = {}
    for x in factor.objects:
        if side == 1:
            src, dst = pair_name(x, source), pair_name(x, target)
            morph = field.reduce(np.kron(factor.identity(x), g))
        else:
            src, dst = pair_name(source, x), pair_name(target, x)
            morph = field.reduce(np.kron(g, factor.identity(x)))
        components[x] = f.act(morph, dst, src)
    return NatTransform(m, n, components)


def enumerate_modules(
    c: FiniteLinearCategory, max_dim: Optional[int] = None
) -> Iterator[PresheafModule]:
    """Yield every module with dim F(A) ≤ max_dim at each object.

    Action slices along identity basis vectors are fixed to the identity; all
    remaining table entries range over the field and candidates are filtered
    by validate_module.
    """
    field = c.field
    field.require_prime("module enumeration")
    bound = Limits.get().module_dim_bound if max_dim is None else max_dim
    cap = Limits.get().enum_cap
    count = 0
    for dims_tuple in itertools.product(range(bound + 1), repeat=len(c.objects)):
        dims = dict(zip(c.objects, dims_tuple))
        slots = []
        fixed = {}
        for b, a in itertools.product(c.objects, repeat=2):
            d = c.hom_dim(b, a)
            if not (d and dims[a] and dims[b]):
                continue
            unit_index = None
            if a == b:
                ident = c.identity(a)
                nz = np.flatnonzero(ident)
                if len(nz) == 1 and ident[nz[0]] == 1:
                    unit_index = int(nz[0])
            base = field.zeros((dims[b], d, dims[a]))
            if unit_index is not None:
                base[:, unit_index, :] = field.identity(dims[a])
            fixed[(b, a)] = base
            for i, f, j in itertools.product(range(dims[b]), range(d), range(dims[a])):
                if f != unit_index:
                    slots.append(((b, a), (i, f, j)))
        size = field.p ** len(slots)
        count += size
        if count > cap:
            raise CapExceeded("enum_cap", cap, count)
        for values in itertools.product(range(field.p), repeat=len(slots)):
            action = {k: v.copy() for k, v in fixed.items()}
            for (key, index), value in zip(slots, values):
                action[key][index] = value
            candidate = PresheafModule(c, dims, action)
            if validate_module(candidate).valid:
                yield candidate

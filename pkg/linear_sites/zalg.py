"""Graded algebras, windowed Z-algebras and the diagonal functor.

A windowed Z-algebra on [lo, hi] is stored as a finite linear category with
objects "lo".."hi"; hom(n, m) = a(n, m) is nonzero only for n ≥ m and
composition of f ∈ a(n, l) with g ∈ a(l, m) is the product g·f ∈ a(n, m).
"""

import itertools
import logging
import re
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel

from .error import PreconditionFailed, WindowError, WorkspaceError
from .exactlin import Field, Subspace
from .functoriality import (
    Property,
    PropertyReport,
    SiteMorphism,
    check_cocontinuous,
    check_LC,
)
from .lincat import (
    FiniteLinearCategory,
    LinearFunctor,
    ValidationReport,
    Violation,
    _kron_table,
    full_subcategory,
    pair_name,
    require_same_field,
    tensor_category,
)
from .sieves import Sieve, representable_sieve, sieve_from_generators, tensor_sieve
from .topology.cover import CoverSystem, Mode, tensor_topology


LOGGER = logging.getLogger(__name__)

Monomial = Tuple[int, ...]


class GradedAlgebra:
    """A positively graded algebra truncated at a degree bound."""

    def __init__(
        self,
        field: Field,
        dims: Sequence[int],
        mult: Dict[Tuple[int, int], np.ndarray],
        unit: Sequence,
        labels: Optional[Sequence[Sequence[str]]] = None,
        name: Optional[str] = None,
        monomials: Optional[Sequence[Sequence[Monomial]]] = None,
        weights: Optional[Sequence[int]] = None,
        variables: Optional[Sequence[str]] = None,
    ):
        """Initialize from degree dimensions and multiplication tables.

        mult[(n, m)] has shape (dims[n+m], dims[n], dims[m]) for n + m ≤ bound.
        """
        self.field = field
        self.dims = list(dims)
        self.bound = len(self.dims) - 1
        self.name = name
        self.mult = {}
        for n, m in itertools.product(range(self.bound + 1), repeat=2):
            if n + m > self.bound:
                continue
            shape = (self.dims[n + m], self.dims[n], self.dims[m])
            table = mult.get((n, m))
            self.mult[(n, m)] = field.zeros(shape) if table is None else field.array(
                table, shape
            )
        self.unit = field.array(unit, (self.dims[0],))
        self.labels = [
            list(labels[n]) if labels else [f"e{n}_{i}" for i in range(d)]
            for n, d in enumerate(self.dims)
        ]
        self.monomials = [list(ms) for ms in monomials] if monomials else None
        self.weights = list(weights) if weights else None
        self.variables = list(variables) if variables else None

    def __repr__(self) -> str:
        """Return a short description."""
        return f"GradedAlgebra({self.name or '?'}, dims={self.dims})"

    @property
    def connected(self) -> bool:
        """Return whether A_0 is the ground field."""
        return self.dims[0] == 1

    def multiply(self, u, v, n: int, m: int) -> np.ndarray:
        """Return u·v for u ∈ A_n and v ∈ A_m."""
        field = self.field
        partial = field.tensordot(self.mult[(n, m)], field.array(u), ([1], [0]))
        return field.matmul(partial, field.array(v))


def validate_graded(g: GradedAlgebra) -> ValidationReport:
    """Check unit and associativity on basis triples within the bound."""
    field = g.field
    violations = []
    for n in range(g.bound + 1):
        d = g.dims[n]
        if not d:
            continue
        left = field.tensordot(g.mult[(0, n)], g.unit, ([1], [0]))
        right = field.tensordot(g.mult[(n, 0)], g.unit, ([2], [0]))
        ident = field.identity(d)
        if not np.array_equal(left, ident) or not np.array_equal(right, ident):
            violations.append(Violation(kind="unit", objects=[str(n)]))
    for n, m, k in itertools.product(range(g.bound + 1), repeat=3):
        if n + m + k > g.bound or not (g.dims[n] and g.dims[m] and g.dims[k]):
            continue
        # (ab)c indexed (out, a, b, c)
        ab_c = field.tensordot(g.mult[(n + m, k)], g.mult[(n, m)], ([1], [0]))
        # a(bc) indexed (out, a, b, c)
        a_bc = field.tensordot(g.mult[(n, m + k)], g.mult[(m, k)], ([2], [0]))
        if not np.array_equal(ab_c.transpose(0, 2, 3, 1), a_bc):
            violations.append(
                Violation(kind="associativity", objects=[str(n), str(m), str(k)])
            )
    return ValidationReport.from_violations(g.name or "graded algebra", violations)


def _monomials(weights: Sequence[int], degree: int) -> List[Monomial]:
    found = []

    def extend(prefix: Tuple[int, ...], remaining: int):
        i = len(prefix)
        if i == len(weights):
            if remaining == 0:
                found.append(prefix)
            return
        for e in range(remaining // weights[i] + 1):
            extend(prefix + (e,), remaining - e * weights[i])

    extend((), degree)
    return sorted(found, reverse=True)


def _monomial_label(variables: Sequence[str], mono: Monomial) -> str:
    parts = [
        v if e == 1 else f"{v}^{e}" for v, e in zip(variables, mono) if e
    ]
    return "*".join(parts) or "1"


def _monomial_algebra(
    field: Field,
    variables: Sequence[str],
    weights: Sequence[int],
    bases: List[List[Monomial]],
    name: str,
) -> GradedAlgebra:
    bound = len(bases) - 1
    index = [{mono: i for i, mono in enumerate(ms)} for ms in bases]
    mult = {}
    for n, m in itertools.product(range(bound + 1), repeat=2):
        if n + m > bound:
            continue
        table = field.zeros((len(bases[n + m]), len(bases[n]), len(bases[m])))
        for i, u in enumerate(bases[n]):
            for j, v in enumerate(bases[m]):
                k = index[n + m].get(tuple(a + b for a, b in zip(u, v)))
                if k is not None:
                    table[k, i, j] = 1
        mult[(n, m)] = table
    return GradedAlgebra(
        field,
        [len(ms) for ms in bases],
        mult,
        [1] if bases[0] else [],
        labels=[[_monomial_label(variables, mono) for mono in ms] for ms in bases],
        name=name,
        monomials=bases,
        weights=weights,
        variables=variables,
    )


def polynomial_algebra(
    field: Field,
    variables,
    bound: int,
    degrees: Optional[Sequence[int]] = None,
) -> GradedAlgebra:
    """Return k[x_1..x_r] truncated at bound; variables is a count or names."""
    if bound < 0:
        raise WindowError(f"Negative degree bound {bound}")
    names = [f"x{i}" for i in range(variables)] if isinstance(variables, int) else list(
        variables
    )
    weights = list(degrees) if degrees else [1] * len(names)
    if len(weights) != len(names) or any(w < 1 for w in weights):
        raise PreconditionFailed("Generator degrees must be positive, one per variable")
    bases = [_monomials(weights, d) for d in range(bound + 1)]
    label = ",".join(
        n if w == 1 else f"{n}:{w}" for n, w in zip(names, weights)
    )
    return _monomial_algebra(field, names, weights, bases, f"k[{label}]")


def monomial_quotient(g: GradedAlgebra, relations: Sequence[Monomial]) -> GradedAlgebra:
    """Return g modulo monomial relations: relations and their multiples vanish."""
    if g.monomials is None:
        raise PreconditionFailed(f"{g!r} has no monomial basis")
    rels = [tuple(r) for r in relations]
    for r in rels:
        if len(r) != len(g.weights):
            raise WindowError(f"Relation {r} does not match {len(g.weights)} variables")
        if sum(e * w for e, w in zip(r, g.weights)) > g.bound:
            raise WindowError(f"Relation {r} lies above the degree bound {g.bound}")

    def killed(mono: Monomial) -> bool:
        return any(all(a >= b for a, b in zip(mono, r)) for r in rels)

    bases = [[mono for mono in ms if not killed(mono)] for ms in g.monomials]
    text = ",".join(_monomial_label(g.variables, r) for r in rels)
    return _monomial_algebra(
        g.field, g.variables, g.weights, bases, f"{g.name}/({text})"
    )


def segre(g1: GradedAlgebra, g2: GradedAlgebra) -> GradedAlgebra:
    """Return the Segre product with degree-n piece A_n ⊗ B_n."""
    if g1.bound != g2.bound:
        raise WindowError(f"Degree bounds differ: {g1.bound} != {g2.bound}")
    require_same_field(g1.field, g2.field)
    field = g1.field
    dims = [d1 * d2 for d1, d2 in zip(g1.dims, g2.dims)]
    mult = {
        key: field.reduce(_kron_table(g1.mult[key], g2.mult[key])) for key in g1.mult
    }
    labels = [
        [f"{a}⊗{b}" for a in g1.labels[n] for b in g2.labels[n]]
        for n in range(len(dims))
    ]
    return GradedAlgebra(
        field,
        dims,
        mult,
        field.reduce(np.kron(g1.unit, g2.unit)),
        labels=labels,
        name=f"{g1.name}×{g2.name}",
    )


_ALGEBRA = re.compile(
    r"^\s*k\s*(?:\[(?P<vars>[^\]]*)\])?"
    r"\s*(?:/\s*\((?P<rels>[^)]*)\))?\s*$"
)
_FACTOR = re.compile(r"^(?P<var>[A-Za-z]\w*)(?:\^(?P<exp>\d+))?$")


def _parse_monomial(text: str, names: Sequence[str]) -> Monomial:
    exps = [0] * len(names)
    for factor in filter(None, (f.strip() for f in text.split("*"))):
        match = _FACTOR.match(factor)
        if not match or match["var"] not in names:
            raise WorkspaceError(f"Cannot parse monomial factor {factor!r}")
        exps[names.index(match["var"])] += int(match["exp"] or 1)
    return tuple(exps)


def parse_algebra(text: str, bound: int, field: Field) -> GradedAlgebra:
    """Build an algebra from strings such as "k[x,y]/(x^2)" or "k[x:2]"."""
    match = _ALGEBRA.match(text)
    if not match:
        raise WorkspaceError(f"Cannot parse algebra {text!r}")
    names, weights = [], []
    for item in filter(None, (v.strip() for v in (match["vars"] or "").split(","))):
        name, _, weight = item.partition(":")
        names.append(name.strip())
        try:
            weights.append(int(weight) if weight else 1)
        except ValueError as err:
            raise WorkspaceError(f"Invalid degree in {item!r}") from err
    g = polynomial_algebra(field, names, bound, weights or None)
    if match["rels"]:
        rels = [
            _parse_monomial(r, names) for r in match["rels"].split(",") if r.strip()
        ]
        g = monomial_quotient(g, rels)
    g.name = text.strip()
    return g


class WindowedZAlgebra:
    """Pieces a(n, m), lo ≤ m ≤ n ≤ hi, with composition, as a linear category."""

    def __init__(self, lo: int, hi: int, category: FiniteLinearCategory, name=None):
        """Wrap a category whose objects are the window's integers."""
        if hi < lo:
            raise WindowError(f"Empty window [{lo},{hi}]")
        self.lo = lo
        self.hi = hi
        self.category = category
        self.name = name or category.name

    def __repr__(self) -> str:
        """Return a short description."""
        return f"WindowedZAlgebra({self.name or '?'}, [{self.lo},{self.hi}])"

    @property
    def field(self) -> Field:
        """Return the ground field."""
        return self.category.field

    @property
    def window(self) -> range:
        """Return the object degrees."""
        return range(self.lo, self.hi + 1)

    def piece_dim(self, n: int, m: int) -> int:
        """Return dim a(n, m)."""
        return self.category.hom_dim(str(n), str(m))

    @property
    def connected(self) -> bool:
        """Return whether every a(n, n) is one-dimensional."""
        return all(self.piece_dim(n, n) == 1 for n in self.window)


def _zalgebra(
    field: Field,
    lo: int,
    hi: int,
    dim,
    table,
    unit,
    labels,
    name: str,
) -> WindowedZAlgebra:
    window = range(lo, hi + 1)
    objects = [str(n) for n in window]
    hom_dims = {
        (str(n), str(m)): dim(n, m) for n in window for m in window if n >= m
    }
    composition = {
        (str(n), str(l), str(m)): table(n, l, m)
        for n in window
        for l in window
        for m in window
        if n >= l >= m
    }
    category = FiniteLinearCategory(
        field,
        objects,
        hom_dims,
        {str(n): unit(n) for n in window},
        composition,
        hom_labels={
            (str(n), str(m)): labels(n, m) for n in window for m in window if n >= m
        },
        name=name,
    )
    return WindowedZAlgebra(lo, hi, category, name=name)


def from_graded(g: GradedAlgebra, lo: int, hi: int) -> WindowedZAlgebra:
    """Return the Z-algebra a(n, m) = A_{n−m} on [lo, hi]."""
    if hi - lo > g.bound:
        raise WindowError(f"Window [{lo},{hi}] is taller than degree bound {g.bound}")
    return _zalgebra(
        g.field,
        lo,
        hi,
        lambda n, m: g.dims[n - m],
        lambda n, l, m: g.mult[(l - m, n - l)],
        lambda n: g.unit,
        lambda n, m: list(g.labels[n - m]),
        f"a({g.name})[{lo},{hi}]",
    )


def restrict_window(z: WindowedZAlgebra, lo: int, hi: int) -> WindowedZAlgebra:
    """Return the sub-window [lo, hi]."""
    if lo < z.lo or hi > z.hi:
        raise WindowError(f"[{lo},{hi}] is not inside [{z.lo},{z.hi}]")
    sub, _ = full_subcategory(
        z.category, [str(n) for n in range(lo, hi + 1)], name=f"{z.name}|[{lo},{hi}]"
    )
    return WindowedZAlgebra(lo, hi, sub)


def same_structure(z1: WindowedZAlgebra, z2: WindowedZAlgebra) -> bool:
    """Return whether two windowed Z-algebras agree piecewise in matched bases."""
    if (z1.lo, z1.hi) != (z2.lo, z2.hi) or z1.field != z2.field:
        return False
    c1, c2 = z1.category, z2.category
    return all(
        c1.hom_dim(*k) == c2.hom_dim(*k) for k in c1.hom_dims
    ) and all(
        np.array_equal(c1.identity(a), c2.identity(a)) for a in c1.objects
    ) and all(
        np.array_equal(c1.composition(*k), c2.composition(*k))
        for k in itertools.product(c1.objects, repeat=3)
    )


def diagonal(a: WindowedZAlgebra, b: WindowedZAlgebra):
    """Return (c, Δ) with c(n, m) = a(n, m) ⊗ b(n, m) and Δ: n ↦ (n, n)."""
    if (a.lo, a.hi) != (b.lo, b.hi):
        raise WindowError(f"Windows differ: [{a.lo},{a.hi}] vs [{b.lo},{b.hi}]")
    ca, cb = a.category, b.category
    field = a.field
    c = _zalgebra(
        field,
        a.lo,
        a.hi,
        lambda n, m: a.piece_dim(n, m) * b.piece_dim(n, m),
        lambda n, l, m: field.reduce(
            _kron_table(
                ca.composition(str(n), str(l), str(m)),
                cb.composition(str(n), str(l), str(m)),
            )
        ),
        lambda n: field.reduce(np.kron(ca.identity(str(n)), cb.identity(str(n)))),
        lambda n, m: [
            f"{x}⊗{y}"
            for x in ca.hom_labels[(str(n), str(m))]
            for y in cb.hom_labels[(str(n), str(m))]
        ],
        f"({a.name}⊗{b.name})_Δ",
    )
    target = tensor_category(ca, cb)
    objects = c.category.objects
    delta = LinearFunctor(
        c.category,
        target,
        {n: pair_name(n, n) for n in objects},
        {
            (n, m): field.identity(c.category.hom_dim(n, m))
            for n in objects
            for m in objects
        },
        name="Δ",
    )
    return c, delta


def tails_sieve(z: WindowedZAlgebra, m: int, n: int) -> Sieve:
    """Return a(−, m)_{≥n}: full at objects l ≥ n, zero elsewhere."""
    c = z.category
    field = z.field
    return Sieve(
        c,
        str(m),
        {
            str(l): Subspace.full(field, z.piece_dim(l, m))
            for l in z.window
            if l >= n and l >= m
        },
    )


def tails_system(z: WindowedZAlgebra, mode: Mode = Mode.UP) -> CoverSystem:
    """Return the tails system: covers a(−, m)_{≥n} for m ≤ n ≤ hi."""
    return CoverSystem(
        z.category,
        {
            str(m): [tails_sieve(z, m, n) for n in range(m, z.hi + 1)]
            for m in z.window
        },
        mode,
        name=f"tails({z.name})",
    )


def _generated_piece(
    z: WindowedZAlgebra, n: int, m: int, degrees: Sequence[int], memo: Dict
) -> Subspace:
    """Return the span of products of pieces of the given degrees inside a(n, m)."""
    key = (n, m)
    if key in memo:
        return memo[key]
    c, field = z.category, z.field
    d = z.piece_dim(n, m)
    rows = []
    if n - m in degrees:
        rows.append(field.identity(d))
    for step in degrees:
        mid = m + step
        if not m < mid < n:
            continue
        inner = _generated_piece(z, n, mid, degrees, memo)
        if inner.is_zero or not z.piece_dim(mid, m):
            continue
        rows.append(
            c.composites(
                str(n), str(mid), str(m), field.identity(z.piece_dim(mid, m)), inner.basis
            )
        )
    memo[key] = Subspace.span(field, np.vstack(rows) if rows else field.zeros((0, d)), d)
    return memo[key]


def check_generated_in_degrees(z: WindowedZAlgebra, degrees: Sequence[int]) -> bool:
    """Return whether every a(n, m), n > m, is spanned by products in the degrees."""
    memo: Dict = {}
    for n in z.window:
        for m in z.window:
            if n > m and not _generated_piece(z, n, m, list(degrees), memo).is_full:
                LOGGER.debug("a(%d,%d) is not generated in degrees %s", n, m, degrees)
                return False
    return True


def check_generated_in_degree_one(z: WindowedZAlgebra) -> bool:
    """Return whether a(n, m+1) ⊗ a(m+1, m) → a(n, m) is onto for all n > m."""
    return check_generated_in_degrees(z, [1])


def generator_degrees(z: WindowedZAlgebra) -> List[int]:
    """Return the smallest set of degrees in which z is generated on its window."""
    degrees: List[int] = []
    for d in range(1, z.hi - z.lo + 1):
        memo: Dict = {}
        needed = any(
            not _generated_piece(z, m + d, m, degrees, memo).is_full
            for m in range(z.lo, z.hi - d + 1)
        )
        if needed:
            degrees.append(d)
    return degrees


def check_finitely_generated(z: WindowedZAlgebra, max_degree: int) -> bool:
    """Return whether z is generated in degrees ≤ max_degree on its window."""
    return all(d <= max_degree for d in generator_degrees(z))


def adjoin_free_elements(z: WindowedZAlgebra, n: int, m: int, count: int = 1):
    """Enlarge a(n, m) by elements that compose to zero with all but identities."""
    if not n > m or n not in z.window or m not in z.window:
        raise WindowError(f"Cannot enlarge a({n},{m}) on [{z.lo},{z.hi}]")
    c, field = z.category, z.field
    sn, sm = str(n), str(m)
    old = c.hom_dim(sn, sm)
    hom_dims = dict(c.hom_dims)
    hom_dims[(sn, sm)] = old + count
    composition = {}
    for key in itertools.product(c.objects, repeat=3):
        x, y, w = key
        table = c.composition(*key)
        pads = [(0, 0), (0, 0), (0, 0)]
        if (x, w) == (sn, sm):
            pads[0] = (0, count)
        if (y, w) == (sn, sm):
            pads[1] = (0, count)
        if (x, y) == (sn, sm):
            pads[2] = (0, count)
        if any(p[1] for p in pads):
            table = field.array(np.pad(table, pads))
        composition[key] = table
    id_n = int(np.flatnonzero(c.identity(sn))[0])
    id_m = int(np.flatnonzero(c.identity(sm))[0])
    for t in range(old, old + count):
        composition[(sn, sm, sm)][t, id_m, t] = 1
        composition[(sn, sn, sm)][t, t, id_n] = 1
    labels = dict(c.hom_labels)
    labels[(sn, sm)] = list(labels[(sn, sm)]) + [f"u{i}" for i in range(count)]
    category = FiniteLinearCategory(
        field,
        c.objects,
        hom_dims,
        c.identities,
        composition,
        hom_labels=labels,
        name=f"{z.name}+u({n},{m})",
    )
    return WindowedZAlgebra(z.lo, z.hi, category)


def delta_functor(a: WindowedZAlgebra, b: WindowedZAlgebra, mode: Mode = Mode.UP):
    """Return Δ as a site morphism from the tails diagonal to the tensor tails site."""
    c, delta = diagonal(a, b)
    target = tensor_topology(tails_system(a), tails_system(b), delta.target)
    return SiteMorphism(delta, tails_system(c, mode), target, name="Δ")


class DeltaWitness(BaseModel):
    """The family x ⊗ 1 (or 1 ⊗ y) generating a(−,m1)_{≥m2} ⊠ b(−,m2)."""

    source: str
    target: str
    generators: List[str]
    generates: bool


def delta_generators(a: WindowedZAlgebra, b: WindowedZAlgebra, m1: int, m2: int):
    """Return the witness family for the object (m1, m2) of the tensor category."""
    ca, cb = a.category, b.category
    tensor = tensor_category(ca, cb)
    field = a.field
    top = max(m1, m2)
    source = pair_name(str(top), str(top))
    target = pair_name(str(m1), str(m2))
    vectors, labels = [], []
    if m2 >= m1:
        ident = cb.identity(str(m2))
        for i, label in enumerate(ca.hom_labels[(str(m2), str(m1))]):
            e = field.unit(a.piece_dim(m2, m1), i)
            vectors.append(field.reduce(np.kron(e, ident)))
            labels.append(f"{label}⊗1")
        expected = tensor_sieve(
            tails_sieve(a, m1, m2),
            representable_sieve(cb, str(m2)),
            tensor,
        )
    else:
        ident = ca.identity(str(m1))
        for i, label in enumerate(cb.hom_labels[(str(m1), str(m2))]):
            e = field.unit(b.piece_dim(m1, m2), i)
            vectors.append(field.reduce(np.kron(ident, e)))
            labels.append(f"1⊗{label}")
        expected = tensor_sieve(
            representable_sieve(ca, str(m1)),
            tails_sieve(b, m2, m1),
            tensor,
        )
    generated = sieve_from_generators(tensor, target, [(source, v) for v in vectors])
    return DeltaWitness(
        source=source, target=target, generators=labels, generates=generated == expected
    )


def check_delta_LC_on_window(a: WindowedZAlgebra, b: WindowedZAlgebra) -> PropertyReport:
    """Run the (LC) checks for Δ on the window; verdicts are window-limited."""
    a.field.require_prime("the windowed (LC) check")
    if a.hi - a.lo < 2:
        raise WindowError("The window must have height at least 2")
    for z in (a, b):
        if not check_generated_in_degree_one(z):
            raise PreconditionFailed(f"{z.name} is not generated in degree one")
    m = delta_functor(a, b)
    report = check_LC(m)
    report.merge(check_cocontinuous(m))
    report.window_limited = True
    report.details["witnesses"] = [
        delta_generators(a, b, m1, m2).dict()
        for m1 in a.window
        for m2 in b.window
        if m1 != m2
    ]
    report.details["window"] = [a.lo, a.hi]
    LOGGER.info("Windowed LC for %s and %s: %s", a.name, b.name, report.verdict)
    return report


class SweepRow(BaseModel):
    """Windowed (LC) verdict for one window height."""

    lo: int
    hi: int
    verdict: bool
    method: Optional[str] = None


class SweepReport(BaseModel):
    """Verdicts across growing windows; no limit is asserted."""

    property: Property = Property.LC
    window_limited: bool = True
    rows: List[SweepRow]


def window_sweep(g1: GradedAlgebra, g2: GradedAlgebra, lo: int, his: Sequence[int]):
    """Tabulate the windowed (LC) verdict for each upper end in his."""
    rows = []
    for hi in his:
        report = check_delta_LC_on_window(
            from_graded(g1, lo, hi), from_graded(g2, lo, hi)
        )
        rows.append(
            SweepRow(
                lo=lo, hi=hi, verdict=report.verdict, method=report.details.get("method")
            )
        )
    return SweepReport(rows=rows)


def is_connected(z) -> bool:
    """Return whether a graded algebra or windowed Z-algebra is connected."""
    return z.connected

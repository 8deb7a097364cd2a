"""Sheaves, null presheaves and sheafification over a linear topology.

All tests run against the minimal cover J(A) of each object: F is a sheaf iff
F(A) → hom(J(A), F) is bijective for every A, and null iff J(A) kills F(A).
"""

import logging
from typing import Dict, Optional

import numpy as np

from ..error import CategoryMismatch, NotATopology
from ..exactlin import row_reduce
from ..lincat import (
    NatSpace,
    NatTransform,
    PresheafModule,
    compose_nat,
    hom_modules,
    pair_name,
    partial_module,
    partial_transport,
    require_same_category,
)
from ..sieves import (
    Sieve,
    quotient_of_representable,
    sieve_from_generators,
    sieve_module,
    sum_sieves,
)
from .cover import CoverSystem, Mode, enumerate_sieves, minimal_cover


LOGGER = logging.getLogger(__name__)

SAMPLE_SEED = 0


def _evaluation(f: PresheafModule, cover: Sieve) -> np.ndarray:
    """Return the matrix of x ↦ (r ↦ F(r)x) in NatSpace ambient coordinates."""
    c, field = f.category, f.field
    a = cover.target
    blocks = []
    for b in c.objects:
        comp = cover[b]
        if not (comp.dim and f.dim(b)):
            continue
        rows = f.dim(b) * comp.dim
        if not f.dim(a):
            blocks.append(field.zeros((rows, 0)))
            continue
        moved = np.tensordot(f.action_table(b, a), comp.basis, axes=([1], [1]))
        blocks.append(field.reduce(moved.transpose(0, 2, 1).reshape((rows, f.dim(a)))))
    if not blocks:
        return field.zeros((0, f.dim(a)))
    return np.vstack(blocks)


def _bijective_on(f: PresheafModule, cover: Sieve) -> bool:
    space = hom_modules(sieve_module(cover), f)
    d = f.dim(cover.target)
    if space.dim != d:
        return False
    if d == 0:
        return True
    return row_reduce(_evaluation(f, cover), f.field).rank == d


def _random_cover(cover: Sieve, rng: np.random.Generator) -> Sieve:
    c = cover.category
    gens = []
    for b in c.objects:
        d = c.hom_dim(b, cover.target)
        if d:
            gens.append((b, rng.integers(0, c.field.p, size=d)))
    return sum_sieves(cover, sieve_from_generators(c, cover.target, gens))


def is_sheaf(f: PresheafModule, t: CoverSystem, sample: int = 1) -> bool:
    """Return whether F(A) ≅ hom(J(A), F) for every object A.

    sample larger covers per object are drawn with a fixed seed and must give
    the same verdict.
    """
    require_same_category(f.category, t.category)
    rng = np.random.default_rng(SAMPLE_SEED)
    verdict = True
    for a in f.category.objects:
        cover = minimal_cover(t, a)
        ok = _bijective_on(f, cover)
        if f.field.is_prime:
            for _ in range(sample):
                larger = _random_cover(cover, rng)
                if ok and not _bijective_on(f, larger):
                    raise NotATopology(f"Sheaf condition on {a} differs between covers")
        LOGGER.debug("Sheaf condition of %s at %s: %s", f.name, a, ok)
        verdict = verdict and ok
    return verdict


def is_null_presheaf(f: PresheafModule, t: CoverSystem) -> bool:
    """Return whether every minimal cover acts by zero."""
    require_same_category(f.category, t.category)
    for a in f.category.objects:
        if f.dim(a) and np.count_nonzero(_evaluation(f, minimal_cover(t, a))):
            return False
    return True


is_in_W = is_null_presheaf


class PlusConstruction:
    """F^+ with F^+(A) = hom(J(A), F) in the canonical basis of the solution space."""

    def __init__(self, f: PresheafModule, t: CoverSystem):
        """Compute F^+ and the unit F → F^+."""
        require_same_category(f.category, t.category)
        self.source = f
        self.system = t
        c, field = f.category, f.field
        self.covers: Dict[str, Sieve] = {a: minimal_cover(t, a) for a in c.objects}
        self.spaces: Dict[str, NatSpace] = {
            a: hom_modules(sieve_module(self.covers[a]), f) for a in c.objects
        }
        dims = {a: self.spaces[a].dim for a in c.objects}
        action = {}
        for b in c.objects:
            for a in c.objects:
                d = c.hom_dim(b, a)
                if not (d and dims[a] and dims[b]):
                    continue
                table = field.zeros((dims[b], d, dims[a]))
                for i in range(d):
                    table[:, i, :] = self._restriction(field.unit(d, i), b, a)
                action[(b, a)] = table
        self.module = PresheafModule(c, dims, action, name=f"{f.name}+")
        self.unit = NatTransform(
            f,
            self.module,
            {a: self._unit_component(a) for a in c.objects},
        )

    def _unit_component(self, a: str) -> np.ndarray:
        evaluation = _evaluation(self.source, self.covers[a])
        return self.spaces[a].subspace.coordinates(evaluation.T).T

    def _restriction(self, g, b: str, a: str) -> np.ndarray:
        """Return the matrix of θ ↦ θ∘(g∘−): hom(J(a),F) → hom(J(b),F)."""
        c, field = self.source.category, self.source.field
        source_space, target_space = self.spaces[a], self.spaces[b]
        ja, jb = self.covers[a], self.covers[b]
        glue = {}
        for x in c.objects:
            if not jb[x].dim:
                glue[x] = field.zeros((ja[x].dim, 0))
                continue
            moved = field.matmul(c.postcompose(g, x, b, a), jb[x].basis.T)
            glue[x] = ja[x].coordinates(moved.T).T
        columns = []
        for theta in source_space.basis():
            restricted = NatTransform(
                target_space.source,
                target_space.target,
                {x: field.matmul(theta[x], glue[x]) for x in c.objects},
            )
            columns.append(target_space.coordinates(restricted))
        return field.array(np.array(columns, dtype=columns[0].dtype).T)

    def lift(self, alpha: NatTransform, other: "PlusConstruction") -> NatTransform:
        """Return α^+: F^+ → G^+ for α: F → G, with other the construction of G."""
        field = self.source.field
        components = {}
        for a, space in self.spaces.items():
            target_space = other.spaces[a]
            columns = []
            for theta in space.basis():
                moved = NatTransform(
                    target_space.source,
                    target_space.target,
                    {x: field.matmul(alpha[x], theta[x]) for x in theta.components},
                )
                columns.append(target_space.coordinates(moved))
            if columns:
                components[a] = field.array(np.array(columns, dtype=columns[0].dtype).T)
            else:
                components[a] = field.zeros((target_space.dim, 0))
        return NatTransform(self.module, other.module, components)


def plus_morphism(alpha: NatTransform, t: CoverSystem) -> NatTransform:
    """Return the induced transformation F^+ → G^+."""
    target = PlusConstruction(alpha.target, t)
    return PlusConstruction(alpha.source, t).lift(alpha, target)


class Sheafification:
    """F^{++} together with both plus stages and the unit F → F^{++}."""

    def __init__(self, f: PresheafModule, t: CoverSystem):
        """Apply the plus construction twice."""
        self.first = PlusConstruction(f, t)
        self.second = PlusConstruction(self.first.module, t)
        self.module = self.second.module
        self.module.name = f"a({f.name})"
        self.unit = compose_nat(self.second.unit, self.first.unit)

    def lift(self, alpha: NatTransform, other: "Sheafification") -> NatTransform:
        """Return a(α): a(F) → a(G)."""
        once = self.first.lift(alpha, other.first)
        return self.second.lift(once, other.second)


def sheafify(f: PresheafModule, t: CoverSystem):
    """Return (a(F), unit F → a(F))."""
    result = Sheafification(f, t)
    LOGGER.debug(
        "Sheafified %s: dims %s -> %s", f.name, f.dims, result.module.dims
    )
    return result.module, result.unit


def onesided_sheafify(f: PresheafModule, side: int, t: CoverSystem) -> PresheafModule:
    """Sheafify F on a ⊗ b in one variable, object by object of the other."""
    c = f.category
    if c.factors is None:
        raise CategoryMismatch(f"{c!r} is not a tensor category")
    field = c.field
    factor, other = c.factors[side - 1], c.factors[2 - side]
    require_same_category(factor, t.category)
    stages = {z: Sheafification(partial_module(f, side, z), t) for z in other.objects}

    def obj(x: str, z: str) -> str:
        return pair_name(x, z) if side == 1 else pair_name(z, x)

    dims = {
        obj(x, z): stages[z].module.dim(x) for x in factor.objects for z in other.objects
    }
    transports = {}
    for z2 in other.objects:
        for z in other.objects:
            for j in range(other.hom_dim(z2, z)):
                g = field.unit(other.hom_dim(z2, z), j)
                alpha = partial_transport(f, side, g, z, z2)
                transports[(z2, z, j)] = stages[z].lift(alpha, stages[z2])
    action = {}
    for x2 in factor.objects:
        for x in factor.objects:
            dx = factor.hom_dim(x2, x)
            for z2 in other.objects:
                for z in other.objects:
                    dz = other.hom_dim(z2, z)
                    src, dst = obj(x, z), obj(x2, z2)
                    if not (dx and dz and dims[src] and dims[dst]):
                        continue
                    table = field.zeros((dims[dst], dx * dz, dims[src]))
                    module = stages[z2].module
                    for i in range(dx):
                        act = module.act(field.unit(dx, i), x2, x)
                        for j in range(dz):
                            index = i * dz + j if side == 1 else j * dx + i
                            transport = transports[(z2, z, j)][x]
                            table[:, index, :] = field.matmul(act, transport)
                    action[(dst, src)] = table
    return PresheafModule(c, dims, action, name=f"a{side}({f.name})")


def in_w1(f: PresheafModule, ta: CoverSystem) -> bool:
    """Return whether F(−, B) is null for every B."""
    return all(
        is_null_presheaf(partial_module(f, 1, b), ta)
        for b in f.category.factors[1].objects
    )


def in_w2(f: PresheafModule, tb: CoverSystem) -> bool:
    """Return whether F(A, −) is null for every A."""
    return all(
        is_null_presheaf(partial_module(f, 2, a), tb)
        for a in f.category.factors[0].objects
    )


def in_l1(f: PresheafModule, ta: CoverSystem) -> bool:
    """Return whether F(−, B) is a sheaf for every B."""
    return all(
        is_sheaf(partial_module(f, 1, b), ta, sample=0)
        for b in f.category.factors[1].objects
    )


def in_l2(f: PresheafModule, tb: CoverSystem) -> bool:
    """Return whether F(A, −) is a sheaf for every A."""
    return all(
        is_sheaf(partial_module(f, 2, a), tb, sample=0)
        for a in f.category.factors[0].objects
    )


def topology_from_null_class(
    t_witness: CoverSystem, name: Optional[str] = None
) -> CoverSystem:
    """Return the raw system of sieves R with c(−, A)/R null for t_witness."""
    c = t_witness.category
    basics = {
        a: [
            r
            for r in enumerate_sieves(c, a)
            if is_null_presheaf(quotient_of_representable(r), t_witness)
        ]
        for a in c.objects
    }
    return CoverSystem(c, basics, Mode.RAW, name=name or f"T_W({t_witness.name})")


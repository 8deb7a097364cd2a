"""Property checkers for functors between finite linear sites."""

from enum import Enum
import logging
from typing import Any, Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel

from .error import CapExceeded, PreconditionFailed
from .exactlin import Subspace, enumerate_vectors, image, kernel, preimage
from .lincat import (
    LinearFunctor,
    PresheafModule,
    compose_functors,
    enumerate_modules,
    require_same_category,
    restrict_module,
    tensor_functor,
)
from .sieves import (
    Sieve,
    SieveData,
    functor_preimage_sieve,
    image_sieve,
    intersect_sieves,
    representable_sieve,
    sieve_from_generators,
    sum_sieves,
)
from .topology.cover import (
    CoverSystem,
    Mode,
    covers,
    enumerate_sieves,
    minimal_covers,
    tensor_topology,
)
from .topology.sheaves import is_sheaf


LOGGER = logging.getLogger(__name__)


class Property(str, Enum):
    """Checkable functor properties."""

    G = "G"
    F = "F"
    FF = "FF"
    LC = "LC"
    CONTINUOUS = "continuous"
    COCONTINUOUS = "cocontinuous"


class Convention(str, Enum):
    """How φ^{-1}T_c is read on sieves."""

    IMAGE = "image"
    POINTWISE = "pointwise"


class SiteMorphism:
    """A linear functor between categories carrying cover systems."""

    def __init__(
        self,
        functor: LinearFunctor,
        source_system: CoverSystem,
        target_system: CoverSystem,
        name: Optional[str] = None,
    ):
        """Initialize; the systems must live on the functor's categories."""
        require_same_category(functor.source, source_system.category)
        require_same_category(functor.target, target_system.category)
        self.functor = functor
        self.source_system = source_system
        self.target_system = target_system
        self.name = name or functor.name

    def __repr__(self) -> str:
        """Return a short description."""
        return f"SiteMorphism({self.name})"


class Counterexample(BaseModel):
    """Replayable data for one failed instance."""

    kind: str
    objects: List[str]
    morphism: Optional[List] = None
    sieve: Optional[SieveData] = None


class PropertyReport(BaseModel):
    """Verdict of a property checker."""

    property: Property
    verdict: bool
    counterexamples: List[Counterexample] = []
    severity: str = "normal"
    window_limited: bool = False
    details: Dict[str, Any] = {}

    def merge(self, *others: "PropertyReport") -> "PropertyReport":
        """Fold sub-reports into this one."""
        for other in others:
            self.verdict = self.verdict and other.verdict
            self.counterexamples.extend(other.counterexamples)
            self.details[other.property.value] = other.verdict
        return self


def _report(prop: Property, counterexamples: List[Counterexample], **details):
    LOGGER.debug("%s: %d counterexamples", prop.value, len(counterexamples))
    return PropertyReport(
        property=prop,
        verdict=not counterexamples,
        counterexamples=counterexamples,
        details=details,
    )


def image_generated_sieve(m: SiteMorphism, c: str) -> Sieve:
    """Return the sieve on c generated by all morphisms out of φ-images."""
    phi = m.functor
    tgt = phi.target
    gens = []
    for a in phi.source.objects:
        d = tgt.hom_dim(phi(a), c)
        gens.extend((phi(a), tgt.field.unit(d, i)) for i in range(d))
    return sieve_from_generators(tgt, c, gens)


def _image_sieve_by_composites(m: SiteMorphism, c: str) -> Sieve:
    phi = m.functor
    tgt = phi.target
    field = tgt.field
    parts = []
    for a in phi.source.objects:
        x = phi(a)
        d = tgt.hom_dim(x, c)
        if not d:
            continue
        comps = {}
        for b in tgt.objects:
            rows = tgt.composites(
                b, x, c, field.identity(d), field.identity(tgt.hom_dim(b, x))
            )
            comps[b] = Subspace.span(field, rows, tgt.hom_dim(b, c))
        parts.append(Sieve(tgt, c, comps))
    if not parts:
        return Sieve(tgt, c, {})
    return sum_sieves(*parts)


def check_G(m: SiteMorphism) -> PropertyReport:
    """Check that the φ-images cover every target object."""
    failures = []
    for c in m.functor.target.objects:
        s = image_generated_sieve(m, c)
        if s != _image_sieve_by_composites(m, c):
            raise PreconditionFailed(f"Image sieves on {c} disagree")
        if not covers(m.target_system, s):
            failures.append(
                Counterexample(kind="G", objects=[c], sieve=SieveData.from_sieve(s))
            )
    return _report(Property.G, failures)


def f_sieve(m: SiteMorphism, c_vec, a: str, a2: str) -> Sieve:
    """Return S_c on a: the g with c∘φ(g) in the image of φ on hom(−, a2)."""
    phi = m.functor
    src, tgt = phi.source, phi.target
    field = src.field
    comps = {}
    for b in src.objects:
        if not src.hom_dim(b, a):
            continue
        moved = field.matmul(
            tgt.postcompose(c_vec, phi(b), phi(a), phi(a2)), phi.hom_map(b, a)
        )
        comps[b] = preimage(moved, image(phi.hom_map(b, a2), field))
    return Sieve(src, a, comps)


def _coset_representatives(phi: LinearFunctor, a: str, a2: str) -> List:
    field = phi.field
    d = phi.target.hom_dim(phi(a), phi(a2))
    img = image(phi.hom_map(a, a2), field)
    units = [field.unit(d, j) for j in img.complement_columns()]
    return list(enumerate_vectors(Subspace.span(field, units, d)))


def check_F(m: SiteMorphism) -> PropertyReport:
    """Check that every S_c covers, c ranging over hom(φa, φa') modulo φ."""
    phi = m.functor
    field = phi.field
    field.require_prime("the (F) check")
    failures = []
    for a in phi.source.objects:
        for a2 in phi.source.objects:
            for c_vec in _coset_representatives(phi, a, a2):
                s = f_sieve(m, c_vec, a, a2)
                if not covers(m.source_system, s):
                    failures.append(
                        Counterexample(
                            kind="F",
                            objects=[a, a2],
                            morphism=field.encode_array(c_vec),
                            sieve=SieveData.from_sieve(s),
                        )
                    )
    return _report(Property.F, failures)


def ff_sieve(m: SiteMorphism, a_vec, a: str, a2: str) -> Sieve:
    """Return K_a = {h | a∘h = 0} on a."""
    src = m.functor.source
    return Sieve(
        src,
        a,
        {
            b: kernel(src.postcompose(a_vec, b, a, a2), src.field, cols=src.hom_dim(b, a))
            for b in src.objects
            if src.hom_dim(b, a)
        },
    )


def check_FF(m: SiteMorphism) -> PropertyReport:
    """Check that K_a covers for every nonzero a killed by φ."""
    phi = m.functor
    field = phi.field
    field.require_prime("the (FF) check")
    failures = []
    for a in phi.source.objects:
        for a2 in phi.source.objects:
            d = phi.source.hom_dim(a, a2)
            if not d:
                continue
            for a_vec in enumerate_vectors(kernel(phi.hom_map(a, a2), field, cols=d)):
                if not a_vec.any():
                    continue
                s = ff_sieve(m, a_vec, a, a2)
                if not covers(m.source_system, s):
                    failures.append(
                        Counterexample(
                            kind="FF",
                            objects=[a, a2],
                            morphism=field.encode_array(a_vec),
                            sieve=SieveData.from_sieve(s),
                        )
                    )
    return _report(Property.FF, failures)


def _target_generating_covers(m: SiteMorphism, c: str) -> List[Sieve]:
    t = m.target_system
    return t.covers(c) if t.mode is Mode.RAW else minimal_covers(t, c)


def check_cocontinuous(m: SiteMorphism) -> PropertyReport:
    """Check that φ^{-1}R covers for every generating target cover R on φ(a)."""
    phi = m.functor
    failures = []
    for a in phi.source.objects:
        for r in _target_generating_covers(m, phi(a)):
            s = functor_preimage_sieve(phi, r, a)
            if not covers(m.source_system, s):
                failures.append(
                    Counterexample(
                        kind="cocontinuous",
                        objects=[a, phi(a)],
                        sieve=SieveData.from_sieve(r),
                    )
                )
    return _report(Property.COCONTINUOUS, failures)


def check_continuous(
    m: SiteMorphism,
    probes: Sequence[PresheafModule] = (),
    bound: Optional[int] = None,
) -> PropertyReport:
    """Check that restriction along φ preserves sheaves, relative to probes.

    When the target is small enough, all modules up to the per-object
    dimension bound are enumerated and added to the probes.
    """
    phi = m.functor
    pool = list(probes)
    enumerated: Optional[int] = None
    try:
        extra = list(enumerate_modules(phi.target, bound))
        enumerated = len(extra)
        pool.extend(extra)
    except CapExceeded as err:
        LOGGER.debug("Module enumeration skipped: %s", err)
    failures = []
    sheaves = 0
    for i, f in enumerate(pool):
        require_same_category(f.category, phi.target)
        if not is_sheaf(f, m.target_system, sample=0):
            continue
        sheaves += 1
        if not is_sheaf(restrict_module(phi, f), m.source_system, sample=0):
            failures.append(
                Counterexample(kind="continuous", objects=[f.name or f"probe#{i}"])
            )
    return _report(
        Property.CONTINUOUS,
        failures,
        probes=len(probes),
        enumerated=enumerated,
        bound=bound,
        sheaves_tested=sheaves,
    )


def covers_by_convention(
    m: SiteMorphism, r: Sieve, convention: Convention = Convention.IMAGE
) -> bool:
    """Return whether r lies in φ^{-1}T_c."""
    phi = m.functor
    if Convention(convention) is Convention.IMAGE:
        return covers(m.target_system, image_sieve(phi, r))
    return any(
        functor_preimage_sieve(phi, j, r.target) <= r
        for j in _target_generating_covers(m, phi(r.target))
    )


def _topology_equality(
    m: SiteMorphism, convention: Convention
) -> Tuple[List[Counterexample], List[Counterexample], str]:
    src = m.functor.source
    forward: List[Counterexample] = []
    backward: List[Counterexample] = []
    try:
        per_object = {a: enumerate_sieves(src, a) for a in src.objects}
    except CapExceeded as err:
        LOGGER.debug("Falling back to minimal covers: %s", err)
        for a in src.objects:
            for j in minimal_covers(m.source_system, a):
                if not covers_by_convention(m, j, convention):
                    forward.append(
                        Counterexample(
                            kind="source-not-pulled-back",
                            objects=[a],
                            sieve=SieveData.from_sieve(j),
                        )
                    )
        cocontinuous = check_cocontinuous(m)
        for ce in cocontinuous.counterexamples:
            backward.append(ce.copy(update={"kind": "pulled-back-not-source"}))
        return forward, backward, "minimal-covers"
    for a, sieves in per_object.items():
        for r in sieves:
            lhs = covers(m.source_system, r)
            rhs = covers_by_convention(m, r, convention)
            if lhs and not rhs:
                forward.append(
                    Counterexample(
                        kind="source-not-pulled-back",
                        objects=[a],
                        sieve=SieveData.from_sieve(r),
                    )
                )
            elif rhs and not lhs:
                backward.append(
                    Counterexample(
                        kind="pulled-back-not-source",
                        objects=[a],
                        sieve=SieveData.from_sieve(r),
                    )
                )
    return forward, backward, "exhaustive"


def check_LC(
    m: SiteMorphism, convention: Convention = Convention.IMAGE
) -> PropertyReport:
    """Check (G), (F), (FF) and T_a = φ^{-1}T_c."""
    convention = Convention(convention)
    forward, backward, method = _topology_equality(m, convention)
    report = PropertyReport(
        property=Property.LC,
        verdict=not forward and not backward,
        counterexamples=forward + backward,
        details={
            "method": method,
            "convention": convention.value,
            "source_in_pullback": not forward,
            "pullback_in_source": not backward,
        },
    )
    return report.merge(check_G(m), check_F(m), check_FF(m))


CHECKERS = {
    Property.G: check_G,
    Property.F: check_F,
    Property.FF: check_FF,
    Property.LC: check_LC,
    Property.COCONTINUOUS: check_cocontinuous,
    Property.CONTINUOUS: check_continuous,
}


def run_check(m: SiteMorphism, prop: Property) -> PropertyReport:
    """Run a checker by property name."""
    return CHECKERS[Property(prop)](m)


def tensor_morphism(m1: SiteMorphism, m2: SiteMorphism) -> SiteMorphism:
    """Return φ ⊗ ψ between the tensor topologies."""
    functor = tensor_functor(m1.functor, m2.functor)
    return SiteMorphism(
        functor,
        tensor_topology(m1.source_system, m2.source_system, functor.source),
        tensor_topology(m1.target_system, m2.target_system, functor.target),
        name=f"{m1.name}⊗{m2.name}",
    )


def verify_tensor_preservation(
    m1: SiteMorphism, m2: SiteMorphism, prop: Property
) -> PropertyReport:
    """Check that a property of φ and ψ passes to φ ⊗ ψ."""
    prop = Property(prop)
    for m in (m1, m2):
        if not run_check(m, prop).verdict:
            raise PreconditionFailed(f"{m.name} does not satisfy {prop.value}")
    report = run_check(tensor_morphism(m1, m2), prop)
    if not report.verdict:
        LOGGER.error("%s fails for the tensor of %s and %s", prop.value, m1.name, m2.name)
        report.severity = "high"
    return report


def common_cover(
    m: SiteMorphism, a: str, cs: Sequence[Tuple[Any, str]]
) -> Tuple[Sieve, bool]:
    """Intersect S_{c_i} for c_i ∈ hom(φa, φa_i) and report whether it covers."""
    src = m.functor.source
    sieves = [f_sieve(m, m.functor.field.array(c), a, a2) for c, a2 in cs]
    meet = intersect_sieves(*sieves) if sieves else representable_sieve(src, a)
    return meet, covers(m.source_system, meet)


def compose_morphisms(m2: SiteMorphism, m1: SiteMorphism) -> SiteMorphism:
    """Return m2 ∘ m1."""
    require_same_category(m1.target_system.category, m2.source_system.category)
    return SiteMorphism(
        compose_functors(m2.functor, m1.functor),
        m1.source_system,
        m2.target_system,
        name=f"{m2.name}.{m1.name}",
    )

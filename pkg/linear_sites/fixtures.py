"""Named fixtures: the two-object category S1, its relatives, and graded algebras."""

import logging
from typing import Optional

from .error import PreconditionFailed
from .exactlin import Field
from .functoriality import SiteMorphism
from .lincat import (
    FiniteLinearCategory,
    LinearFunctor,
    PresheafModule,
    full_subcategory,
    representable,
)
from .sieves import representable_sieve, sieve_from_generators
from .topology.cover import CoverSystem, Mode, single_deflation_system, trivial_system
from .zalg import GradedAlgebra, parse_algebra


LOGGER = logging.getLogger(__name__)

DEFAULT_FIELD = Field.prime(2)

# Objects of S1 and its single non-identity morphism α: 1 → 2.
ONE = "1"
TWO = "2"
ALPHA = [1]


def s1(field: Optional[Field] = None) -> FiniteLinearCategory:
    """Return the category 1 → 2 with hom(1,2) = span{α}."""
    field = field or DEFAULT_FIELD
    return FiniteLinearCategory(
        field,
        [ONE, TWO],
        {(ONE, ONE): 1, (TWO, TWO): 1, (ONE, TWO): 1},
        {ONE: [1], TWO: [1]},
        {
            (ONE, ONE, ONE): [[[1]]],
            (TWO, TWO, TWO): [[[1]]],
            (ONE, ONE, TWO): [[[1]]],
            (ONE, TWO, TWO): [[[1]]],
        },
        hom_labels={(ONE, ONE): ["id1"], (TWO, TWO): ["id2"], (ONE, TWO): ["α"]},
        name="S1",
    )


def s1_mod_alpha(field: Optional[Field] = None) -> FiniteLinearCategory:
    """Return S1 with α killed: two objects and only identities."""
    field = field or DEFAULT_FIELD
    return FiniteLinearCategory(
        field,
        [ONE, TWO],
        {(ONE, ONE): 1, (TWO, TWO): 1},
        {ONE: [1], TWO: [1]},
        {(ONE, ONE, ONE): [[[1]]], (TWO, TWO, TWO): [[[1]]]},
        hom_labels={(ONE, ONE): ["id1"], (TWO, TWO): ["id2"]},
        name="S1/α",
    )


def point(field: Optional[Field] = None) -> FiniteLinearCategory:
    """Return the one-object category with hom = k."""
    field = field or DEFAULT_FIELD
    return FiniteLinearCategory(
        field,
        ["*"],
        {("*", "*"): 1},
        {"*": [1]},
        {("*", "*", "*"): [[[1]]]},
        hom_labels={("*", "*"): ["id"]},
        name="pt",
    )


def quotient_functor(c: FiniteLinearCategory) -> LinearFunctor:
    """Return S1 → S1/α, sending α to zero."""
    field = c.field
    target = s1_mod_alpha(field)
    return LinearFunctor(
        c,
        target,
        {ONE: ONE, TWO: TWO},
        {
            (ONE, ONE): field.identity(1),
            (TWO, TWO): field.identity(1),
            (ONE, TWO): field.zeros((0, 1)),
        },
        name="S1->S1/α",
    )


def inclusion(c: FiniteLinearCategory, obj: str) -> LinearFunctor:
    """Return the inclusion of the full subcategory on one object."""
    _, functor = full_subcategory(c, [obj], name=f"{{{obj}}}")
    functor.name = f"{{{obj}}}->{c.name}"
    return functor


def alpha_sieve(c: FiniteLinearCategory):
    """Return ⟨α⟩ on object 2."""
    return sieve_from_generators(c, TWO, [(ONE, ALPHA)])


def alpha_system(c: FiniteLinearCategory, mode: Mode = Mode.UP) -> CoverSystem:
    """Return the ⟨α⟩-system: ⟨α⟩ covers 2 and only the full sieve covers 1."""
    deflations = single_deflation_system(
        c, [(ALPHA, ONE, TWO), (c.identity(ONE), ONE, ONE)]
    )
    return CoverSystem(c, deflations.basic_covers, mode, name="alpha")


def raw_singleton_system(c: FiniteLinearCategory) -> CoverSystem:
    """Return the raw system {⟨α⟩ at 2} with nothing at 1."""
    return CoverSystem(c, {TWO: [alpha_sieve(c)]}, Mode.RAW, name="raw-singleton")


def empty_cover_system(c: FiniteLinearCategory) -> CoverSystem:
    """Return an up-system with no covers at object 1."""
    return CoverSystem(
        c, {TWO: [representable_sieve(c, TWO)]}, Mode.UP, name="empty-at-1"
    )


def simple_module(c: FiniteLinearCategory, obj: str, name: Optional[str] = None):
    """Return the simple module k concentrated at obj."""
    c.check_object(obj)
    d = c.hom_dim(obj, obj)
    if d != 1:
        raise PreconditionFailed(f"End({obj}) is not k; no canonical simple module")
    return PresheafModule(c, {obj: 1}, {(obj, obj): [[[1]]]}, name=name or f"S({obj})")


def site_morphisms(c: FiniteLinearCategory):
    """Return the standard site morphisms out of and into S1."""
    alpha = alpha_system(c)
    incl1, incl2 = inclusion(c, ONE), inclusion(c, TWO)
    quotient = quotient_functor(c)
    return {
        "incl1": SiteMorphism(incl1, trivial_system(incl1.source), alpha, name="incl1"),
        "incl2": SiteMorphism(incl2, trivial_system(incl2.source), alpha, name="incl2"),
        "quotient": SiteMorphism(
            quotient, trivial_system(c), trivial_system(quotient.target), name="quotient"
        ),
    }


GRADED = {
    "k[x]": ("k[x]", 4),
    "k[y]": ("k[y]", 4),
    "k[x,y]": ("k[x,y]", 3),
    "k[u,v]": ("k[u,v]", 3),
    "k[x0,x1]": ("k[x0,x1]", 3),
    "k[y0,y1]": ("k[y0,y1]", 3),
    "k[x,y]/(x^2)": ("k[x,y]/(x^2)", 3),
    "k[x:2]": ("k[x:2]", 4),
}


def graded_algebra(name: str, field: Optional[Field] = None) -> GradedAlgebra:
    """Return a catalogue algebra by name, at its catalogue degree bound."""
    text, bound = GRADED[name]
    return parse_algebra(text, bound, field or DEFAULT_FIELD)


def catalogue(field: Optional[Field] = None) -> dict:
    """Return every named fixture, grouped the way a workspace stores them.

    Site morphisms are given as (functor, source system, target system) names.
    """
    field = field or DEFAULT_FIELD
    c = s1(field)
    quotient = quotient_functor(c)
    incl1, incl2 = inclusion(c, ONE), inclusion(c, TWO)
    pt = point(field)
    categories = {
        "S1": c,
        "S1/α": quotient.target,
        "{1}": incl1.source,
        "{2}": incl2.source,
        "pt": pt,
    }
    systems = {
        "alpha": alpha_system(c),
        "trivial": trivial_system(c),
        "raw-singleton": raw_singleton_system(c),
        "empty-at-1": empty_cover_system(c),
        "trivial-S1/α": trivial_system(quotient.target),
        "trivial-{1}": trivial_system(incl1.source),
        "trivial-{2}": trivial_system(incl2.source),
        "trivial-pt": trivial_system(pt),
    }
    modules = {
        "S(1)": simple_module(c, ONE),
        "S(2)": simple_module(c, TWO),
        "h(1)": representable(c, ONE),
        "h(2)": representable(c, TWO),
    }
    LOGGER.debug("Catalogue over F_%s built", field.name)
    return {
        "categories": categories,
        "functors": {"incl1": incl1, "incl2": incl2, "quotient": quotient},
        "systems": systems,
        "modules": modules,
        "morphisms": {
            "incl1": ("incl1", "trivial-{1}", "alpha"),
            "incl2": ("incl2", "trivial-{2}", "alpha"),
            "quotient": ("quotient", "trivial", "trivial-S1/α"),
        },
        "graded_algebras": {name: graded_algebra(name, field) for name in GRADED},
    }

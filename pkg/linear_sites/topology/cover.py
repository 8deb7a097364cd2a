"""Cover systems, their closures and the axioms of a linear topology.

A cover system is intensional: basic covers per object plus a closure mode.
In mode upglue the covering sieves are the up-set of a family of minimal
covers J, the greatest family below the meet of the basic covers that is
stable under pullback (f∘J(B) ⊆ J(A)) and glue (J(A) ⊆ J(A)∘J).
"""

from enum import Enum
import itertools
import logging
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel

from ..error import CapExceeded, CategoryMismatch, NotATopology, UnsupportedField
from ..exactlin import (
    Subspace,
    enumerate_subspaces,
    enumerate_vectors,
    kernel,
    subspace_count,
    vector_key,
)
from ..lincat import FiniteLinearCategory, ValidationReport, Violation
from ..lincat import require_same_category
from ..limits import Limits
from ..sieves import (
    Sieve,
    SieveData,
    compose_sieve,
    intersect_sieves,
    pullback_sieve,
    representable_sieve,
    sieve_from_generators,
    sum_sieves,
    tensor_sieve,
    validate_sieve,
    zero_sieve,
)


LOGGER = logging.getLogger(__name__)

# pullbacks a single explicit glue search may compute before giving up
SEARCH_BUDGET = 4096


class Mode(str, Enum):
    """Closure mode of a cover system."""

    RAW = "raw"
    UP = "up"
    UPGLUE = "upglue"


def _dedupe(sieves: Iterable[Sieve]) -> List[Sieve]:
    seen = {}
    for s in sieves:
        seen.setdefault(s.key, s)
    return list(seen.values())


def minimal_elements(sieves: Iterable[Sieve]) -> List[Sieve]:
    """Return the inclusion-minimal sieves of a family, deduplicated."""
    pool = _dedupe(sieves)
    return [
        s for s in pool if not any(t is not s and t <= s and t != s for t in pool)
    ]


class CoverSystem:
    """Basic covers per object together with a closure mode."""

    def __init__(
        self,
        category: FiniteLinearCategory,
        basic_covers: Mapping[str, Sequence[Sieve]],
        mode: Mode = Mode.UP,
        name: Optional[str] = None,
    ):
        """Initialize; validate_system checks targets and closure."""
        self.category = category
        self.mode = Mode(mode)
        self.name = name
        self.basic_covers = {
            a: _dedupe(basic_covers.get(a, ())) for a in category.objects
        }
        for a in basic_covers:
            category.check_object(a)
        self._closure: Optional["Closure"] = None

    def __repr__(self) -> str:
        """Return a short description."""
        counts = {a: len(cs) for a, cs in self.basic_covers.items()}
        return f"CoverSystem({self.name or '?'}, mode={self.mode.value}, covers={counts})"

    def covers(self, a: str) -> List[Sieve]:
        """Return the basic covers on a."""
        self.category.check_object(a)
        return self.basic_covers[a]

    @property
    def closure(self) -> "Closure":
        """Return the minimal-cover closure, computing it once."""
        if self._closure is None:
            self._closure = compute_closure(self)
        return self._closure


class ClosureRound(BaseModel):
    """Minimal covers after one round of the closure iteration."""

    index: int
    minimal: Dict[str, SieveData]


class Closure:
    """Minimal covers of ⟨R⟩_top and the rounds that produced them."""

    def __init__(self, minimal: Dict[str, Sieve], rounds: List[Dict[str, Sieve]]):
        """Initialize."""
        self.minimal = minimal
        self.rounds = rounds

    def round_data(self) -> List[ClosureRound]:
        """Return the serializable trace."""
        return [
            ClosureRound(
                index=i, minimal={a: SieveData.from_sieve(s) for a, s in rnd.items()}
            )
            for i, rnd in enumerate(self.rounds)
        ]


def _initial_family(t: CoverSystem) -> Dict[str, Sieve]:
    c = t.category
    family = {}
    for a in c.objects:
        covers = t.covers(a)
        family[a] = intersect_sieves(*covers) if covers else representable_sieve(c, a)
    return family


def pullback_stable_part(c: FiniteLinearCategory, family: Mapping[str, Sieve]):
    """Return P(J).

    At B it holds the g with f∘g ∈ J(A) for every A and basis f ∈ hom(B,A).
    """
    field = c.field
    result = {}
    for b in c.objects:
        comps = {}
        for x in c.objects:
            d = c.hom_dim(x, b)
            if not d:
                continue
            blocks = []
            for a in c.objects:
                target = family[a][x]
                if target.is_full or not c.hom_dim(b, a) or not c.hom_dim(x, a):
                    continue
                # (d(x,a), d(b,a), d(x,b)) reduced mod J(a)(x) along the first axis
                table = field.tensordot(
                    target.residue_matrix(), c.composition(x, b, a), ([1], [0])
                )
                blocks.append(table.reshape((-1, d)))
            if blocks:
                comps[x] = kernel(np.vstack(blocks), field, cols=d)
            else:
                comps[x] = Subspace.full(field, d)
        result[b] = Sieve(c, b, comps)
    return result


def compute_closure(t: CoverSystem) -> Closure:
    """Iterate J ← J ∩ P(J) ∩ J∘J from the meet of the basic covers."""
    c = t.category
    family = _initial_family(t)
    rounds = [family]
    while True:
        stable = pullback_stable_part(c, family)
        glued = {a: compose_sieve(family[a], family) for a in c.objects}
        step = {a: family[a] & stable[a] & glued[a] for a in c.objects}
        if all(step[a] == family[a] for a in c.objects):
            break
        family = step
        rounds.append(family)
        LOGGER.debug(
            "Closure round %d: dims %s", len(rounds) - 1,
            {a: sum(s.dims.values()) for a, s in family.items()},
        )
    return Closure(family, rounds)


class GlueCase(BaseModel):
    """Vectors of one component of a glue cover sharing a pulled-back sieve."""

    source: str
    morphisms: List[List]
    derivation: "Derivation"


class Derivation(BaseModel):
    """A derivation tree showing a sieve is covering.

    kind is one of identity (the sieve is full), up (contains a basic cover),
    or glue (every pullback along the basic cover is derived).
    """

    kind: str
    sieve: SieveData
    cover: Optional[SieveData] = None
    cases: List[GlueCase] = []

    @property
    def depth(self) -> int:
        """Return the number of steps along the longest branch."""
        return 1 + max((case.derivation.depth for case in self.cases), default=0)


GlueCase.update_forward_refs()


class CoveringWitness(BaseModel):
    """Evidence for a covering verdict.

    kind basic means the sieve is a basic cover, up that it contains one, tree
    that it has an explicit glue derivation, closure that it contains the
    minimal cover produced by the recorded rounds.
    """

    kind: str
    cover: Optional[SieveData] = None
    tree: Optional[Derivation] = None
    rounds: List[ClosureRound] = []


class CoveringVerdict(BaseModel):
    """Result of a covering test."""

    covering: bool
    mode: Mode
    witness: Optional[CoveringWitness] = None


def _require_upglue_field(t: CoverSystem):
    if not t.category.field.is_prime:
        raise UnsupportedField("upglue closure requires a prime field")


def covers(t: CoverSystem, s: Sieve) -> bool:
    """Return whether s is covering, without a witness."""
    require_same_category(t.category, s.category)
    if t.mode is Mode.RAW:
        return s in t.covers(s.target)
    if t.mode is Mode.UP:
        return any(r <= s for r in t.covers(s.target))
    _require_upglue_field(t)
    return t.closure.minimal[s.target] <= s


class _GlueSearch:
    """Depth-bounded search for an explicit glue derivation."""

    def __init__(self, t: CoverSystem, depth: int):
        self.t = t
        self.depth = depth
        self.budget = SEARCH_BUDGET
        self.memo: Dict[Tuple[tuple, int], Optional[Derivation]] = {}

    def derive(self, s: Sieve, depth: int) -> Optional[Derivation]:
        key = (s.key, depth)
        if key not in self.memo:
            self.memo[key] = self._derive(s, depth)
        return self.memo[key]

    def _derive(self, s: Sieve, depth: int) -> Optional[Derivation]:
        if s.is_full:
            return Derivation(kind="identity", sieve=SieveData.from_sieve(s))
        basics = self.t.covers(s.target)
        for r in basics:
            if r <= s:
                return Derivation(
                    kind="up",
                    sieve=SieveData.from_sieve(s),
                    cover=SieveData.from_sieve(r),
                )
        if depth == 0:
            return None
        c = s.category
        for r in basics:
            cases: Dict[Tuple[str, tuple], GlueCase] = {}
            failed = False
            for b in c.objects:
                if not r[b].ambient_dim:
                    continue
                for f in enumerate_vectors(r[b]):
                    self.budget -= 1
                    if self.budget < 0:
                        raise CapExceeded("glue_search", SEARCH_BUDGET, SEARCH_BUDGET + 1)
                    pulled = pullback_sieve(s, f, b)
                    case = cases.get((b, pulled.key))
                    if case is None:
                        sub = self.derive(pulled, depth - 1)
                        if sub is None:
                            failed = True
                            break
                        case = GlueCase(source=b, morphisms=[], derivation=sub)
                        cases[(b, pulled.key)] = case
                    case.morphisms.append(c.field.encode_array(f))
                if failed:
                    break
            if not failed:
                return Derivation(
                    kind="glue",
                    sieve=SieveData.from_sieve(s),
                    cover=SieveData.from_sieve(r),
                    cases=list(cases.values()),
                )
        return None


def find_glue_derivation(
    t: CoverSystem, s: Sieve, depth: Optional[int] = None
) -> Optional[Derivation]:
    """Search for a derivation tree of bounded depth using basic covers only."""
    _require_upglue_field(t)
    depth = Limits.get().glue_depth if depth is None else depth
    try:
        return _GlueSearch(t, depth).derive(s, depth)
    except CapExceeded as err:
        LOGGER.debug("Glue search on %s abandoned: %s", s.target, err)
        return None


def is_covering(t: CoverSystem, s: Sieve, witness: bool = True) -> CoveringVerdict:
    """Decide whether s is covering and attach a witness when it is."""
    verdict = covers(t, s)
    if not verdict or not witness:
        return CoveringVerdict(covering=verdict, mode=t.mode)
    if t.mode is Mode.RAW:
        evidence = CoveringWitness(kind="basic", cover=SieveData.from_sieve(s))
    elif t.mode is Mode.UP:
        cover = next(r for r in t.covers(s.target) if r <= s)
        evidence = CoveringWitness(kind="up", cover=SieveData.from_sieve(cover))
    else:
        tree = find_glue_derivation(t, s)
        if tree is not None:
            evidence = CoveringWitness(kind="tree", tree=tree)
        else:
            evidence = CoveringWitness(kind="closure", rounds=t.closure.round_data())
    return CoveringVerdict(covering=True, mode=t.mode, witness=evidence)


def _is_basic(t: CoverSystem, data: Optional[SieveData]) -> Optional[Sieve]:
    if data is None:
        return None
    r = data.to_sieve(t.category)
    return r if r in t.covers(r.target) else None


def _replay_tree(t: CoverSystem, s: Sieve, node: Derivation) -> bool:
    c = t.category
    if node.sieve.to_sieve(c) != s:
        return False
    if node.kind == "identity":
        return s.is_full
    r = _is_basic(t, node.cover)
    if r is None or r.target != s.target:
        return False
    if node.kind == "up":
        return r <= s
    if node.kind != "glue":
        return False
    index = {}
    for case in node.cases:
        for f in case.morphisms:
            index[(case.source, vector_key(c.field.array(f)))] = case
    for b in c.objects:
        if not r[b].ambient_dim:
            continue
        for f in enumerate_vectors(r[b]):
            case = index.get((b, vector_key(f)))
            if case is None:
                return False
            if not _replay_tree(t, pullback_sieve(s, f, b), case.derivation):
                return False
    return True


def replay_witness(t: CoverSystem, s: Sieve, witness: CoveringWitness) -> bool:
    """Check that a witness derives s as covering in t."""
    c = t.category
    if witness.kind == "basic":
        return t.mode is Mode.RAW and s in t.covers(s.target)
    if witness.kind == "up":
        r = _is_basic(t, witness.cover)
        return r is not None and r.target == s.target and r <= s
    if witness.kind == "tree":
        return witness.tree is not None and _replay_tree(t, s, witness.tree)
    if witness.kind == "closure":
        expected = compute_closure(t)
        recorded = [
            {a: data.to_sieve(c) for a, data in rnd.minimal.items()}
            for rnd in witness.rounds
        ]
        if len(recorded) != len(expected.rounds):
            return False
        if any(rec != exp for rec, exp in zip(recorded, expected.rounds)):
            return False
        return bool(recorded) and recorded[-1][s.target] <= s
    return False


def enumerate_sieves(c: FiniteLinearCategory, a: str) -> List[Sieve]:
    """Return every sieve on a, in a deterministic order."""
    field = c.field
    field.require_prime("sieve enumeration")
    c.check_object(a)
    objects = [b for b in c.objects if c.hom_dim(b, a)]
    count = 1
    for b in objects:
        count *= subspace_count(field, c.hom_dim(b, a))
    cap = Limits.get().sieve_cap
    if count > cap:
        raise CapExceeded("sieve_cap", cap, count)
    choices = [list(enumerate_subspaces(field, c.hom_dim(b, a))) for b in objects]
    sieves = []
    for combo in itertools.product(*choices):
        candidate = Sieve(c, a, dict(zip(objects, combo)))
        if validate_sieve(candidate).valid:
            sieves.append(candidate)
    LOGGER.debug("Enumerated %d sieves on %s out of %d tuples", len(sieves), a, count)
    return sieves


def enumerate_covering_sieves(t: CoverSystem, a: str) -> List[Sieve]:
    """Return the covering sieves on a."""
    return [s for s in enumerate_sieves(t.category, a) if covers(t, s)]


def minimal_covers(t: CoverSystem, a: str) -> List[Sieve]:
    """Return the inclusion-minimal covering sieves on a."""
    if t.mode is Mode.UPGLUE:
        _require_upglue_field(t)
        return [t.closure.minimal[a]]
    return minimal_elements(t.covers(a))


def minimal_cover(t: CoverSystem, a: str) -> Sieve:
    """Return the intersection of all covering sieves, which must itself cover."""
    mins = minimal_covers(t, a)
    if not mins:
        raise NotATopology(f"No covering sieve on {a}")
    meet = intersect_sieves(*mins)
    if not covers(t, meet):
        raise NotATopology(f"Covering sieves on {a} are not closed under intersection")
    return meet


class AxiomViolation(BaseModel):
    """A failed instance of a topology axiom."""

    axiom: str
    target: str
    source: Optional[str] = None
    sieve: Optional[SieveData] = None
    morphism: Optional[List] = None


class AxiomReport(BaseModel):
    """Verdicts of the localizing and topology checks."""

    subject: str
    localizing: bool
    topology: Optional[bool] = None
    violations: List[AxiomViolation] = []


def _localizing_violations(t: CoverSystem) -> List[AxiomViolation]:
    c = t.category
    field = c.field
    field.require_prime("axiom checks")
    violations = []
    for a in c.objects:
        if not covers(t, representable_sieve(c, a)):
            violations.append(AxiomViolation(axiom="identity", target=a))
    for a in c.objects:
        for r in enumerate_covering_sieves(t, a):
            for b in c.objects:
                d = c.hom_dim(b, a)
                if not d:
                    continue
                for f in enumerate_vectors(Subspace.full(field, d)):
                    if not covers(t, pullback_sieve(r, f, b)):
                        violations.append(
                            AxiomViolation(
                                axiom="pullback",
                                target=a,
                                source=b,
                                sieve=SieveData.from_sieve(r),
                                morphism=field.encode_array(f),
                            )
                        )
    return violations


def check_localizing(t: CoverSystem) -> AxiomReport:
    """Check the identity and pullback axioms exhaustively."""
    violations = _localizing_violations(t)
    return AxiomReport(
        subject=t.name or "system", localizing=not violations, violations=violations
    )


def check_topology(t: CoverSystem) -> AxiomReport:
    """Check identity, pullback and glue axioms exhaustively."""
    c = t.category
    violations = _localizing_violations(t)
    localizing = not violations
    for a in c.objects:
        sieves = enumerate_sieves(c, a)
        covering = [s for s in sieves if covers(t, s)]
        for s in sieves:
            if covers(t, s):
                continue
            for r in covering:
                if all(
                    covers(t, pullback_sieve(s, f, b))
                    for b in c.objects
                    for f in enumerate_vectors(r[b])
                ):
                    violations.append(
                        AxiomViolation(
                            axiom="glue",
                            target=a,
                            sieve=SieveData.from_sieve(s),
                        )
                    )
                    break
    LOGGER.debug("Topology check of %s: %d violations", t.name, len(violations))
    return AxiomReport(
        subject=t.name or "system",
        localizing=localizing,
        topology=not violations,
        violations=violations,
    )


def validate_system(t: CoverSystem) -> ValidationReport:
    """Check that basic covers are sieves on their objects."""
    violations = []
    for a, sieves in t.basic_covers.items():
        if t.mode is not Mode.RAW and not sieves:
            violations.append(Violation(kind="no-basic-cover", objects=[a]))
        for r in sieves:
            if r.target != a:
                violations.append(Violation(kind="cover-target", objects=[a, r.target]))
            elif not validate_sieve(r).valid:
                violations.append(Violation(kind="cover-not-sieve", objects=[a]))
    return ValidationReport.from_violations(t.name or "system", violations)


def glue_fixed_point(t: CoverSystem) -> Dict[str, List[Sieve]]:
    """Iterate the literal transitivity closure over all enumerated sieves.

    Cov_0 is the up-closure of the basic covers (the full sieve where an
    object has none); a sieve joins once some covering R on its target has
    every pullback f^{-1}s covering, f ranging over all vectors of R.
    """
    c = t.category
    _require_upglue_field(t)
    sieves = {a: enumerate_sieves(c, a) for a in c.objects}
    covering: Dict[str, Dict[tuple, Sieve]] = {}
    for a in c.objects:
        basics = t.covers(a) or [representable_sieve(c, a)]
        covering[a] = {s.key: s for s in sieves[a] if any(r <= s for r in basics)}
    rounds = 0
    changed = True
    while changed:
        changed = False
        rounds += 1
        for a in c.objects:
            for s in sieves[a]:
                if s.key in covering[a]:
                    continue
                for r in list(covering[a].values()):
                    if all(
                        pullback_sieve(s, f, b).key in covering[b]
                        for b in c.objects
                        for f in enumerate_vectors(r[b])
                    ):
                        covering[a][s.key] = s
                        changed = True
                        break
    LOGGER.debug("Glue fixed point stabilized after %d rounds", rounds)
    return {a: list(found.values()) for a, found in covering.items()}


def same_topology(t1: CoverSystem, t2: CoverSystem) -> bool:
    """Return whether two systems have the same covering sieves."""
    require_same_category(t1.category, t2.category)
    c = t1.category
    if Mode.RAW in (t1.mode, t2.mode):
        return all(
            set(enumerate_covering_sieves(t1, a)) == set(enumerate_covering_sieves(t2, a))
            for a in c.objects
        )
    return all(
        set(minimal_covers(t1, a)) == set(minimal_covers(t2, a)) for a in c.objects
    )


def trivial_system(c: FiniteLinearCategory) -> CoverSystem:
    """Return the system whose only covers are the representables."""
    return CoverSystem(
        c, {a: [representable_sieve(c, a)] for a in c.objects}, Mode.UP, name="trivial"
    )


def discrete_system(c: FiniteLinearCategory) -> CoverSystem:
    """Return the system in which every sieve covers."""
    return CoverSystem(
        c, {a: [zero_sieve(c, a)] for a in c.objects}, Mode.UP, name="discrete"
    )


def single_deflation_system(
    c: FiniteLinearCategory, deflations: Iterable[Tuple[Sequence, str, str]]
) -> CoverSystem:
    """Return the system of sieves ⟨d⟩ generated by single deflations d."""
    basics: Dict[str, List[Sieve]] = {a: [] for a in c.objects}
    for vector, source, target in deflations:
        basics[target].append(sieve_from_generators(c, target, [(source, vector)]))
    return CoverSystem(c, basics, Mode.UP, name="deflations")


def topology_inf(systems: Sequence[CoverSystem]) -> CoverSystem:
    """Return the system whose covering sieves cover in every input."""
    c = systems[0].category
    for t in systems[1:]:
        require_same_category(c, t.category)
    raw = [t for t in systems if t.mode is Mode.RAW]
    basics: Dict[str, List[Sieve]] = {}
    if raw:
        for a in c.objects:
            candidates = raw[0].covers(a)
            basics[a] = [
                s
                for s in candidates
                if all(covers(t, s) for t in systems if t is not raw[0])
            ]
        return CoverSystem(c, basics, Mode.RAW, name="inf")
    for a in c.objects:
        choices = [minimal_covers(t, a) for t in systems]
        basics[a] = minimal_elements(
            sum_sieves(*combo) for combo in itertools.product(*choices)
        )
    return CoverSystem(c, basics, Mode.UP, name="inf")


def topology_sup(systems: Sequence[CoverSystem]) -> CoverSystem:
    """Return the least topology containing every input."""
    c = systems[0].category
    for t in systems[1:]:
        require_same_category(c, t.category)
    basics = {a: [r for t in systems for r in t.covers(a)] for a in c.objects}
    return CoverSystem(c, basics, Mode.UPGLUE, name="sup")


def _generating_covers(t: CoverSystem, a: str) -> List[Sieve]:
    return t.covers(a) if t.mode is Mode.RAW else minimal_covers(t, a)


def _factor_check(c: FiniteLinearCategory, ta: CoverSystem, tb: CoverSystem):
    if c.factors is None:
        raise CategoryMismatch(f"{c!r} is not a tensor category")
    require_same_category(c.factors[0], ta.category)
    require_same_category(c.factors[1], tb.category)


def tensor_topology(
    ta: CoverSystem,
    tb: CoverSystem,
    category: FiniteLinearCategory,
) -> CoverSystem:
    """Return the least topology on a ⊗ b containing R ⊠ full and full ⊠ S."""
    _factor_check(category, ta, tb)
    basics = {}
    for p, (x, y) in category.pairs.items():
        left = [
            tensor_sieve(r, representable_sieve(tb.category, y), category)
            for r in _generating_covers(ta, x)
        ]
        right = [
            tensor_sieve(representable_sieve(ta.category, x), s, category)
            for s in _generating_covers(tb, y)
        ]
        basics[p] = left + right
    return CoverSystem(
        category, basics, Mode.UPGLUE, name=f"{ta.name}⊠{tb.name}"
    )


def one_sided(t: CoverSystem, side: int, category: FiniteLinearCategory) -> CoverSystem:
    """Return T_1 (side 1) or T_2 (side 2): the up-closure of R ⊠ full or full ⊠ S."""
    if category.factors is None:
        raise CategoryMismatch(f"{category!r} is not a tensor category")
    a, b = category.factors
    require_same_category(category.factors[side - 1], t.category)
    basics = {}
    for p, (x, y) in category.pairs.items():
        if side == 1:
            basics[p] = [
                tensor_sieve(r, representable_sieve(b, y), category)
                for r in _generating_covers(t, x)
            ]
        else:
            basics[p] = [
                tensor_sieve(representable_sieve(a, x), s, category)
                for s in _generating_covers(t, y)
            ]
    return CoverSystem(category, basics, Mode.UP, name=f"{t.name}_{side}")


def product_system(
    ta: CoverSystem,
    tb: CoverSystem,
    category: FiniteLinearCategory,
    mode: Mode = Mode.RAW,
) -> CoverSystem:
    """Return the system of all R ⊠ S with R and S covering."""
    _factor_check(category, ta, tb)
    left = {x: enumerate_covering_sieves(ta, x) for x in ta.category.objects}
    right = {y: enumerate_covering_sieves(tb, y) for y in tb.category.objects}
    basics = {
        p: [tensor_sieve(r, s, category) for r in left[x] for s in right[y]]
        for p, (x, y) in category.pairs.items()
    }
    return CoverSystem(category, basics, mode, name=f"{ta.name}x{tb.name}")


def proper_cover_count(t: CoverSystem) -> int:
    """Return the number of basic covers that are not representables."""
    return sum(1 for covers_ in t.basic_covers.values() for r in covers_ if not r.is_full)

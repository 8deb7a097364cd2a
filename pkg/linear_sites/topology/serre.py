"""Serre-subcategory side: submodule search, Gabriel products and hulls."""

import itertools
import logging
from typing import Callable, Dict, Iterable, List, Optional, Sequence

from pydantic import BaseModel

from ..error import CapExceeded
from ..exactlin import Subspace, enumerate_subspaces
from ..lincat import PresheafModule, is_submodule, quotient_module, submodule, subquotient
from ..limits import Limits
from .cover import CoverSystem
from .sheaves import in_w1, in_w2


LOGGER = logging.getLogger(__name__)

Predicate = Callable[[PresheafModule], bool]
Spaces = Dict[str, Subspace]


def enumerate_submodules(m: PresheafModule) -> List[Spaces]:
    """Return every submodule of M as a tuple of action-stable subspaces."""
    field = m.field
    field.require_prime("submodule enumeration")
    cap = Limits.get().subspace_cap
    if m.total_dim > cap:
        raise CapExceeded("subspace_cap", cap, m.total_dim)
    objects = m.category.objects
    choices = [list(enumerate_subspaces(field, m.dim(a))) for a in objects]
    found = []
    for combo in itertools.product(*choices):
        spaces = dict(zip(objects, combo))
        if is_submodule(m, spaces):
            found.append(spaces)
    LOGGER.debug("Module %s has %d submodules", m.name, len(found))
    return found


def _contains(upper: Spaces, lower: Spaces) -> bool:
    return all(lower[a] <= upper[a] for a in upper)


def _same(s1: Spaces, s2: Spaces) -> bool:
    return all(s1[a] == s2[a] for a in s1)


def is_simple(m: PresheafModule) -> bool:
    """Return whether M is nonzero with no proper nonzero submodule."""
    if m.is_zero:
        return False
    return len(enumerate_submodules(m)) == 2


def supported_on(objects: Iterable[str]) -> Predicate:
    """Return the predicate "vanishes outside the given objects"."""
    allowed = set(objects)

    def test(m: PresheafModule) -> bool:
        return all(m.dim(a) == 0 for a in m.category.objects if a not in allowed)

    return test


def either(*tests: Predicate) -> Predicate:
    """Return the union of membership predicates."""
    return lambda m: any(test(m) for test in tests)


def gabriel_product_member(
    c: PresheafModule, w1_test: Predicate, w2_test: Predicate
) -> bool:
    """Return whether 0 → W → C → C/W → 0 exists with W in W1 and C/W in W2."""
    for spaces in enumerate_submodules(c):
        if w1_test(submodule(c, spaces)) and w2_test(quotient_module(c, spaces)):
            return True
    return False


def sloc_hull_member(c: PresheafModule, h_test: Predicate, max_len: int) -> bool:
    """Search for a filtration 0 = M_0 ⊂ … ⊂ M_n = C with factors in H.

    Filtrations longer than max_len are not tried.
    """
    subs = enumerate_submodules(c)
    top = {a: Subspace.full(c.field, c.dim(a)) for a in c.category.objects}
    bottom = {a: Subspace.zero(c.field, c.dim(a)) for a in c.category.objects}
    failed = set()

    def search(current: Spaces, budget: int) -> bool:
        if _same(current, top):
            return True
        key = (tuple(current[a].key for a in c.category.objects), budget)
        if budget == 0 or key in failed:
            return False
        for spaces in subs:
            if _same(spaces, current) or not _contains(spaces, current):
                continue
            if h_test(subquotient(c, spaces, current)) and search(spaces, budget - 1):
                return True
        failed.add(key)
        return False

    return search(bottom, max_len)


def tensor_null_member(
    f: PresheafModule,
    ta: CoverSystem,
    tb: CoverSystem,
    max_len: Optional[int] = None,
) -> bool:
    """Return whether F lies in the Serre hull of W_1 ∪ W_2 on a ⊗ b."""
    test = either(lambda m: in_w1(m, ta), lambda m: in_w2(m, tb))
    return sloc_hull_member(f, test, f.total_dim if max_len is None else max_len)


class CommuteRow(BaseModel):
    """Gabriel product memberships of one module in both orders."""

    module: str
    forward: bool
    backward: bool


class CommuteReport(BaseModel):
    """Whether W1 ∗ W2 and W2 ∗ W1 agree on a module list."""

    commute: bool
    rows: List[CommuteRow]


def gabriel_commute(
    modules: Sequence[PresheafModule], w1_test: Predicate, w2_test: Predicate
) -> CommuteReport:
    """Compare W1 ∗ W2 with W2 ∗ W1 module by module."""
    rows = [
        CommuteRow(
            module=m.name or f"#{i}",
            forward=gabriel_product_member(m, w1_test, w2_test),
            backward=gabriel_product_member(m, w2_test, w1_test),
        )
        for i, m in enumerate(modules)
    ]
    return CommuteReport(commute=all(r.forward == r.backward for r in rows), rows=rows)


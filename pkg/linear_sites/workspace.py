"""JSON workspace files: named categories, functors, modules, systems and algebras.

Entities refer to each other by name only. Tables are stored sparsely as
lists of [index..., value] rows; values are ints over F_p and strings over Q.
"""

import itertools
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ValidationError

from .encode import canonical_json, content_hash
from .error import WorkspaceError
from .exactlin import Field
from .functoriality import SiteMorphism
from .lincat import (
    FiniteLinearCategory,
    LinearFunctor,
    PresheafModule,
    ValidationReport,
    tensor_category,
    validate_category,
    validate_functor,
    validate_module,
)
from .sieves import SieveData
from .topology.cover import CoverSystem, Mode, validate_system
from .zalg import GradedAlgebra, WindowedZAlgebra, parse_algebra, validate_graded


LOGGER = logging.getLogger(__name__)

VERSION = "1"

Scalar = Union[int, str]


class TableData(BaseModel):
    """A sparse array keyed by the objects (or degrees) it belongs to."""

    key: List[Scalar]
    entries: List[List[Scalar]] = []


class HomData(BaseModel):
    """Dimension and basis labels of one hom space."""

    source: str
    target: str
    dim: int
    labels: Optional[List[str]] = None


class CategoryData(BaseModel):
    """A finite linear category, or the tensor product of two named ones."""

    objects: List[str] = []
    homs: List[HomData] = []
    identities: Dict[str, List[Scalar]] = {}
    composition: List[TableData] = []
    tensor_of: Optional[Tuple[str, str]] = None


class FunctorData(BaseModel):
    """A linear functor between named categories."""

    source: str
    target: str
    object_map: Dict[str, str]
    hom_maps: List[TableData] = []


class ModuleData(BaseModel):
    """A presheaf module on a named category."""

    category: str
    dims: Dict[str, int]
    action: List[TableData] = []


class SystemData(BaseModel):
    """A cover system on a named category."""

    category: str
    mode: Mode = Mode.UP
    covers: List[SieveData] = []


class MorphismData(BaseModel):
    """A site morphism: a functor between two named systems."""

    functor: str
    source_system: str
    target_system: str


class GradedData(BaseModel):
    """A graded algebra, by presentation or by explicit tables."""

    presentation: Optional[str] = None
    bound: int
    dims: Optional[List[int]] = None
    mult: List[TableData] = []
    unit: List[Scalar] = []
    labels: Optional[List[List[str]]] = None


class ZAlgebraData(BaseModel):
    """A windowed Z-algebra stored as a named category with integer objects."""

    category: str
    lo: int
    hi: int


class WorkspaceFile(BaseModel):
    """Top level of a workspace file."""

    version: str = VERSION
    field: str = "2"
    categories: Dict[str, CategoryData] = {}
    functors: Dict[str, FunctorData] = {}
    modules: Dict[str, ModuleData] = {}
    cover_systems: Dict[str, SystemData] = {}
    morphisms: Dict[str, MorphismData] = {}
    graded_algebras: Dict[str, GradedData] = {}
    zalgebras: Dict[str, ZAlgebraData] = {}


def _sparse(field: Field, arr: np.ndarray) -> List[List[Scalar]]:
    return [
        [int(i) for i in index] + [field.encode(arr[tuple(index)])]
        for index in np.argwhere(arr != 0).tolist()
    ]


def _dense(field: Field, entries: List[List[Scalar]], shape) -> np.ndarray:
    arr = field.zeros(shape)
    for row in entries:
        *index, value = row
        try:
            arr[tuple(int(i) for i in index)] = field.array([value])[0]
        except (IndexError, ValueError) as err:
            raise WorkspaceError(f"Entry {row} does not fit shape {shape}") from err
    return arr


class Workspace:
    """Resolved, in-memory entities of a workspace file."""

    def __init__(self, field: Field):
        """Initialize an empty workspace over a field."""
        self.field = field
        self.categories: Dict[str, FiniteLinearCategory] = {}
        self.functors: Dict[str, LinearFunctor] = {}
        self.modules: Dict[str, PresheafModule] = {}
        self.systems: Dict[str, CoverSystem] = {}
        self.morphisms: Dict[str, Tuple[str, str, str]] = {}
        self.graded: Dict[str, GradedAlgebra] = {}
        self.zalgebras: Dict[str, WindowedZAlgebra] = {}

    # Lookup

    def _get(self, kind: str, name: str):
        table = getattr(self, kind)
        try:
            return table[name]
        except KeyError:
            raise WorkspaceError(f"No {kind} entry named {name!r}")

    def category(self, name: str) -> FiniteLinearCategory:
        """Return a category by name."""
        return self._get("categories", name)

    def functor(self, name: str) -> LinearFunctor:
        """Return a functor by name."""
        return self._get("functors", name)

    def module(self, name: str) -> PresheafModule:
        """Return a module by name."""
        return self._get("modules", name)

    def system(self, name: str) -> CoverSystem:
        """Return a cover system by name."""
        return self._get("systems", name)

    def morphism(self, name: str) -> SiteMorphism:
        """Return a site morphism by name."""
        functor, source, target = self._get("morphisms", name)
        return SiteMorphism(
            self.functor(functor), self.system(source), self.system(target), name=name
        )

    def graded_algebra(self, name: str) -> GradedAlgebra:
        """Return a graded algebra by name."""
        return self._get("graded", name)

    def zalgebra(self, name: str) -> WindowedZAlgebra:
        """Return a windowed Z-algebra by name."""
        return self._get("zalgebras", name)

    def category_name(self, c: FiniteLinearCategory) -> str:
        """Return the name of a stored category, adding it if it is new."""
        for name, stored in self.categories.items():
            if stored is c:
                return name
        for name, stored in self.categories.items():
            if stored == c:
                return name
        if c.factors is not None:
            for factor in c.factors:
                self.category_name(factor)
        base = name = c.name or "category"
        suffix = 1
        while name in self.categories:
            suffix += 1
            name = f"{base}#{suffix}"
        self.categories[name] = c
        return name

    # Adding

    def add_functor(self, name: str, phi: LinearFunctor):
        """Store a functor together with its categories."""
        self.category_name(phi.source)
        self.category_name(phi.target)
        self.functors[name] = phi

    def add_module(self, name: str, m: PresheafModule):
        """Store a module together with its category."""
        self.category_name(m.category)
        self.modules[name] = m

    def add_system(self, name: str, t: CoverSystem):
        """Store a cover system together with its category."""
        self.category_name(t.category)
        self.systems[name] = t

    def add_zalgebra(self, name: str, z: WindowedZAlgebra):
        """Store a windowed Z-algebra together with its category."""
        self.category_name(z.category)
        self.zalgebras[name] = z

    @classmethod
    def from_catalogue(cls, entries: Dict[str, Any], field: Field) -> "Workspace":
        """Build a workspace from fixtures.catalogue output."""
        ws = cls(field)
        for name, c in entries["categories"].items():
            ws.categories[name] = c
        for name, phi in entries["functors"].items():
            ws.add_functor(name, phi)
        for name, t in entries["systems"].items():
            ws.add_system(name, t)
        for name, m in entries["modules"].items():
            ws.add_module(name, m)
        ws.morphisms.update(entries["morphisms"])
        ws.graded.update(entries["graded_algebras"])
        return ws

    # Encoding

    def _register_factors(self):
        pending = [c for c in self.categories.values() if c.factors is not None]
        while pending:
            c = pending.pop()
            for factor in c.factors:
                if factor not in self.categories.values():
                    self.category_name(factor)
                    if factor.factors is not None:
                        pending.append(factor)

    def _encode_category(self, c: FiniteLinearCategory) -> CategoryData:
        if c.factors is not None:
            a, b = (self.category_name(f) for f in c.factors)
            if tensor_category(*c.factors) == c:
                return CategoryData(tensor_of=(a, b))
        field = c.field
        return CategoryData(
            objects=list(c.objects),
            homs=[
                HomData(source=a, target=b, dim=d, labels=c.hom_labels[(a, b)])
                for (a, b), d in c.hom_dims.items()
                if d
            ],
            identities={a: field.encode_array(c.identity(a)) for a in c.objects},
            composition=[
                TableData(key=list(k), entries=_sparse(field, c.composition(*k)))
                for k in itertools.product(c.objects, repeat=3)
                if np.count_nonzero(c.composition(*k))
            ],
        )

    def _encode_graded(self, g: GradedAlgebra) -> GradedData:
        if g.monomials is not None:
            return GradedData(presentation=g.name, bound=g.bound)
        field = g.field
        return GradedData(
            bound=g.bound,
            dims=g.dims,
            mult=[
                TableData(key=list(k), entries=_sparse(field, t))
                for k, t in sorted(g.mult.items())
                if np.count_nonzero(t)
            ],
            unit=field.encode_array(g.unit),
            labels=g.labels,
        )

    def to_file(self) -> WorkspaceFile:
        """Encode every entity."""
        field = self.field
        self._register_factors()
        return WorkspaceFile(
            field=field.name,
            categories={
                name: self._encode_category(c)
                for name, c in list(self.categories.items())
            },
            functors={
                name: FunctorData(
                    source=self.category_name(phi.source),
                    target=self.category_name(phi.target),
                    object_map=phi.object_map,
                    hom_maps=[
                        TableData(key=list(k), entries=_sparse(field, m))
                        for k, m in sorted(phi.hom_maps.items())
                        if np.count_nonzero(m)
                    ],
                )
                for name, phi in self.functors.items()
            },
            modules={
                name: ModuleData(
                    category=self.category_name(m.category),
                    dims=m.dims,
                    action=[
                        TableData(key=list(k), entries=_sparse(field, t))
                        for k, t in sorted(m.action.items())
                        if np.count_nonzero(t)
                    ],
                )
                for name, m in self.modules.items()
            },
            cover_systems={
                name: SystemData(
                    category=self.category_name(t.category),
                    mode=t.mode,
                    covers=[
                        SieveData.from_sieve(r)
                        for a in t.category.objects
                        for r in t.covers(a)
                    ],
                )
                for name, t in self.systems.items()
            },
            morphisms={
                name: MorphismData(functor=f, source_system=s, target_system=t)
                for name, (f, s, t) in self.morphisms.items()
            },
            graded_algebras={
                name: self._encode_graded(g) for name, g in self.graded.items()
            },
            zalgebras={
                name: ZAlgebraData(
                    category=self.category_name(z.category), lo=z.lo, hi=z.hi
                )
                for name, z in self.zalgebras.items()
            },
        )

    # Decoding

    @classmethod
    def from_file(cls, data: WorkspaceFile) -> "Workspace":
        """Resolve every entity of a parsed file."""
        if data.version != VERSION:
            raise WorkspaceError(f"Unsupported workspace version {data.version!r}")
        field = Field.parse(data.field)
        ws = cls(field)
        pending = dict(data.categories)
        while pending:
            ready = [
                name
                for name, entry in pending.items()
                if entry.tensor_of is None
                or all(f in ws.categories for f in entry.tensor_of)
            ]
            if not ready:
                raise WorkspaceError(f"Unresolved tensor factors in {sorted(pending)}")
            for name in ready:
                ws.categories[name] = ws._decode_category(name, pending.pop(name))
        for name, entry in data.functors.items():
            source, target = ws.category(entry.source), ws.category(entry.target)
            hom_maps = {}
            for table in entry.hom_maps:
                a, b = (str(x) for x in table.key)
                shape = (
                    target.hom_dim(entry.object_map.get(a), entry.object_map.get(b)),
                    source.hom_dim(a, b),
                )
                hom_maps[(a, b)] = _dense(field, table.entries, shape)
            ws.functors[name] = LinearFunctor(
                source, target, entry.object_map, hom_maps, name=name
            )
        for name, entry in data.modules.items():
            c = ws.category(entry.category)
            action = {}
            for table in entry.action:
                b, a = (str(x) for x in table.key)
                shape = (entry.dims.get(b, 0), c.hom_dim(b, a), entry.dims.get(a, 0))
                action[(b, a)] = _dense(field, table.entries, shape)
            ws.modules[name] = PresheafModule(c, entry.dims, action, name=name)
        for name, entry in data.cover_systems.items():
            c = ws.category(entry.category)
            basics: Dict[str, list] = {}
            for sieve in entry.covers:
                basics.setdefault(sieve.target, []).append(sieve.to_sieve(c))
            ws.systems[name] = CoverSystem(c, basics, entry.mode, name=name)
        for name, entry in data.morphisms.items():
            ws.functor(entry.functor)
            ws.system(entry.source_system)
            ws.system(entry.target_system)
            ws.morphisms[name] = (entry.functor, entry.source_system, entry.target_system)
        for name, entry in data.graded_algebras.items():
            ws.graded[name] = ws._decode_graded(name, entry)
        for name, entry in data.zalgebras.items():
            ws.zalgebras[name] = WindowedZAlgebra(
                entry.lo, entry.hi, ws.category(entry.category), name=name
            )
        return ws

    def _decode_category(self, name: str, entry: CategoryData) -> FiniteLinearCategory:
        if entry.tensor_of is not None:
            a, b = (self.category(f) for f in entry.tensor_of)
            return tensor_category(a, b, name=name)
        field = self.field
        hom_dims = {(h.source, h.target): h.dim for h in entry.homs}
        for a, b in hom_dims:
            if a not in entry.objects or b not in entry.objects:
                raise WorkspaceError(f"hom({a},{b}) of {name} names an unknown object")
        composition = {}
        for table in entry.composition:
            a, b, c = (str(x) for x in table.key)
            shape = (
                hom_dims.get((a, c), 0), hom_dims.get((b, c), 0), hom_dims.get((a, b), 0)
            )
            composition[(a, b, c)] = _dense(field, table.entries, shape)
        return FiniteLinearCategory(
            field,
            entry.objects,
            hom_dims,
            {a: field.array(v) for a, v in entry.identities.items()},
            composition,
            hom_labels={(h.source, h.target): h.labels for h in entry.homs if h.labels},
            name=name,
        )

    def _decode_graded(self, name: str, entry: GradedData) -> GradedAlgebra:
        field = self.field
        if entry.presentation is not None:
            return parse_algebra(entry.presentation, entry.bound, field)
        if entry.dims is None or len(entry.dims) != entry.bound + 1:
            raise WorkspaceError(f"Graded algebra {name} needs dims for degrees 0..bound")
        dims = entry.dims
        mult = {}
        for table in entry.mult:
            n, m = (int(x) for x in table.key)
            if n + m > entry.bound:
                raise WorkspaceError(
                    f"Product of degrees {n}+{m} exceeds bound in {name}"
                )
            mult[(n, m)] = _dense(field, table.entries, (dims[n + m], dims[n], dims[m]))
        return GradedAlgebra(
            field, dims, mult, field.array(entry.unit), labels=entry.labels, name=name
        )

    def hashes(self) -> Dict[str, str]:
        """Return content hashes of every encoded entity, keyed "kind/name"."""
        data = json.loads(self.to_file().json())
        return {
            f"{kind}/{name}": content_hash(entry)
            for kind in (
                "categories",
                "functors",
                "modules",
                "cover_systems",
                "morphisms",
                "graded_algebras",
                "zalgebras",
            )
            for name, entry in data[kind].items()
        }

    def validate(self) -> List[ValidationReport]:
        """Run every validator on every entity."""
        reports = []
        for name, c in self.categories.items():
            reports.append(_named(validate_category(c), "category", name))
        for name, phi in self.functors.items():
            reports.append(_named(validate_functor(phi), "functor", name))
        for name, m in self.modules.items():
            reports.append(_named(validate_module(m), "module", name))
        for name, t in self.systems.items():
            reports.append(_named(validate_system(t), "system", name))
        for name, g in self.graded.items():
            reports.append(_named(validate_graded(g), "graded", name))
        return reports


def _named(report: ValidationReport, kind: str, name: str) -> ValidationReport:
    report.subject = f"{kind}/{name}"
    return report


def load(path: Union[str, Path]) -> Workspace:
    """Read and resolve a workspace file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise WorkspaceError(f"Cannot read {path}: {err}") from err
    try:
        data = WorkspaceFile.parse_raw(text)
    except (ValidationError, ValueError) as err:
        raise WorkspaceError(f"Cannot parse {path}: {err}") from err
    ws = Workspace.from_file(data)
    LOGGER.debug("Loaded %s: %d categories", path, len(ws.categories))
    return ws


def dump(ws: Workspace) -> str:
    """Return the canonical JSON text of a workspace."""
    return canonical_json(json.loads(ws.to_file().json()), indent=2) + "\n"


def save(ws: Workspace, path: Union[str, Path]):
    """Write a workspace file."""
    Path(path).write_text(dump(ws), encoding="utf-8")
    LOGGER.info("Wrote workspace %s", path)

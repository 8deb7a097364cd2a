"""Command line interface for linear sites."""

import logging
import sys
import time
from typing import Dict, List, Optional, Sequence

from configargparse import ArgumentParser, YAMLConfigFileParser

from .error import PreconditionFailed, WorkspaceError, problem_reporter
from .exactlin import Field
from .fixtures import catalogue
from .functoriality import (
    Convention,
    Property,
    check_continuous,
    check_LC,
    run_check,
    verify_tensor_preservation,
)
from .limits import limits
from .lincat import enumerate_modules, tensor_category
from .report import Report, emit
from .sieves import SieveData
from .topology.cover import (
    Mode,
    check_localizing,
    check_topology,
    enumerate_covering_sieves,
    enumerate_sieves,
    is_covering,
    minimal_covers,
    proper_cover_count,
    tensor_topology,
)
from .topology.serre import (
    Predicate,
    either,
    enumerate_submodules,
    gabriel_product_member,
    is_simple,
    sloc_hull_member,
    supported_on,
)
from .topology.sheaves import is_null_presheaf, is_sheaf, sheafify
from .workspace import Workspace, load, save
from .zalg import (
    GradedAlgebra,
    WindowedZAlgebra,
    check_delta_LC_on_window,
    check_generated_in_degree_one,
    diagonal,
    from_graded,
    parse_algebra,
    segre,
    tails_sieve,
    tails_system,
    window_sweep,
)


LOGGER = logging.getLogger("linear_sites")

PROPERTIES = [p.value for p in Property]


def config(argv: Optional[Sequence[str]] = None):
    """Parse command line, environment and config file."""
    parser = ArgumentParser(
        config_file_parser_class=YAMLConfigFileParser, prog="linear-sites"
    )
    parser.add_argument("-c", "--config", is_config_file=True, help="YAML config file")
    parser.add_argument("--field", env_var="FIELD", type=str, default="2")
    parser.add_argument("--cap-enum", env_var="CAP_ENUM", type=int, default=2**20)
    parser.add_argument("--cap-sieve", env_var="CAP_SIEVE", type=int, default=2**16)
    parser.add_argument("--cap-subspace", env_var="CAP_SUBSPACE", type=int, default=8)
    parser.add_argument(
        "--module-dim-bound", env_var="MODULE_DIM_BOUND", type=int, default=1
    )
    parser.add_argument("--glue-depth", env_var="GLUE_DEPTH", type=int, default=2)
    parser.add_argument("--log-level", env_var="LOG_LEVEL", type=str, default="WARNING")
    parser.add_argument("--json", action="store_true", help="no summary on stderr")
    parser.add_argument("--timing", action="store_true", help="add timing to reports")

    commands = parser.add_subparsers(dest="command", required=True)

    init = commands.add_parser("init", help="write the fixture catalogue")
    init.add_argument("out")

    validate = commands.add_parser("validate", help="run every validator")
    validate.add_argument("file")

    axioms = commands.add_parser("axioms", help="check the topology axioms")
    axioms.add_argument("file")
    axioms.add_argument("system")

    closure = commands.add_parser("closure", help="minimal covers and closure trace")
    closure.add_argument("file")
    closure.add_argument("system")
    closure.add_argument("--object")
    closure.add_argument("--sieve", help="JSON sieve to test for covering")

    tensor_site = commands.add_parser("tensor-site", help="build T_a ⊠ T_b")
    tensor_site.add_argument("file")
    tensor_site.add_argument("a_system")
    tensor_site.add_argument("b_system")
    tensor_site.add_argument("--name")
    tensor_site.add_argument("--out")

    check = commands.add_parser("check-functor", help="run property checkers")
    check.add_argument("file")
    check.add_argument("morphism")
    check.add_argument("properties", nargs="*", help=", ".join(PROPERTIES))
    check.add_argument(
        "--convention", choices=[c.value for c in Convention], default="image"
    )
    check.add_argument("--probe", action="append", default=[])

    tensor_functor = commands.add_parser("tensor-functor", help="φ ⊗ ψ preservation")
    tensor_functor.add_argument("file")
    tensor_functor.add_argument("first")
    tensor_functor.add_argument("second")
    tensor_functor.add_argument("property", choices=PROPERTIES)

    sheaf = commands.add_parser("sheaf", help="sheaf and null-presheaf tests")
    sheaf.add_argument("file")
    sheaf.add_argument("module")
    sheaf.add_argument("system")
    sheaf.add_argument("--sample", type=int, default=1)

    sheafify_ = commands.add_parser("sheafify", help="sheafify a module")
    sheafify_.add_argument("file")
    sheafify_.add_argument("module")
    sheafify_.add_argument("system")
    sheafify_.add_argument("--name")
    sheafify_.add_argument("--out")

    serre = commands.add_parser("serre", help="Gabriel products and hulls")
    serre_commands = serre.add_subparsers(dest="serre_command", required=True)
    gabriel = serre_commands.add_parser("gabriel")
    gabriel.add_argument("file")
    gabriel.add_argument("module")
    gabriel.add_argument("--w1", required=True)
    gabriel.add_argument("--w2", required=True)
    hull = serre_commands.add_parser("hull")
    hull.add_argument("file")
    hull.add_argument("module")
    hull.add_argument("--member", action="append", required=True)
    hull.add_argument("--max-len", type=int)

    enumerate_ = commands.add_parser("enumerate", help="exhaustive listings")
    enumerate_.add_argument(
        "kind", choices=["sieves", "covering", "modules", "submodules"]
    )
    enumerate_.add_argument("file")
    enumerate_.add_argument("name", help="category, system or module name")
    enumerate_.add_argument("object", nargs="?")

    zalg = commands.add_parser("zalg", help="graded and Z-algebra constructions")
    zalg_commands = zalg.add_subparsers(dest="zalg_command", required=True)
    graded = zalg_commands.add_parser("from-graded")
    graded.add_argument("file")
    graded.add_argument("algebra")
    graded.add_argument("--lo", type=int, default=0)
    graded.add_argument("--hi", type=int, required=True)
    graded.add_argument("--name")
    graded.add_argument("--out")
    segre_ = zalg_commands.add_parser("segre")
    segre_.add_argument("file")
    segre_.add_argument("first")
    segre_.add_argument("second")
    segre_.add_argument("--bound", type=int, default=3)
    segre_.add_argument("--name")
    segre_.add_argument("--out")
    diagonal_ = zalg_commands.add_parser("diagonal")
    diagonal_.add_argument("file")
    diagonal_.add_argument("first")
    diagonal_.add_argument("second")
    diagonal_.add_argument("--name")
    diagonal_.add_argument("--out")
    tails = zalg_commands.add_parser("tails")
    tails.add_argument("file")
    tails.add_argument("zalgebra")
    tails.add_argument("--mode", choices=[Mode.UP.value, Mode.UPGLUE.value], default="up")
    tails.add_argument("--name")
    tails.add_argument("--out")
    delta = zalg_commands.add_parser("check-delta")
    delta.add_argument("file")
    delta.add_argument("first")
    delta.add_argument("second")
    delta.add_argument("--lo", type=int, default=0)
    delta.add_argument("--hi", type=int, default=3)
    sweep = zalg_commands.add_parser("window-sweep")
    sweep.add_argument("file")
    sweep.add_argument("first")
    sweep.add_argument("second")
    sweep.add_argument("--lo", type=int, default=0)
    sweep.add_argument("--hi", type=int, default=3)

    args = parser.parse_args(argv)

    # Configure logs
    logging.basicConfig(
        format="%(asctime)s %(name)s %(levelname)s %(message)s", level=args.log_level
    )
    logging.root.warning("Log level set to: %s", args.log_level)

    return args


def _inputs(ws: Workspace, *refs: str) -> Dict[str, str]:
    hashes = ws.hashes()
    return {ref: hashes[ref] for ref in refs if ref in hashes}


def _write(ws: Workspace, args) -> str:
    path = args.out or args.file
    save(ws, path)
    return path


def cmd_init(args) -> Report:
    """Write the fixture catalogue."""
    field = Field.parse(args.field)
    ws = Workspace.from_catalogue(catalogue(field), field)
    save(ws, args.out)
    report = Report.start("init", inputs=ws.hashes())
    report.data["out"] = args.out
    return report


def cmd_validate(args) -> Report:
    """Run every validator."""
    ws = load(args.file)
    report = Report.start("validate", inputs=ws.hashes())
    for result in ws.validate():
        report.verdicts[result.subject] = result.valid
        report.counterexamples.extend(
            {"subject": result.subject, **v.dict()} for v in result.violations
        )
    return report


def cmd_axioms(args) -> Report:
    """Check the localizing and topology axioms of a system."""
    ws = load(args.file)
    t = ws.system(args.system)
    localizing = check_localizing(t)
    report = Report.start("axioms", inputs=_inputs(ws, f"cover_systems/{args.system}"))
    report.verdicts["localizing"] = localizing.localizing
    violations = localizing.violations
    if localizing.localizing:
        topology = check_topology(t)
        report.verdicts["topology"] = bool(topology.topology)
        violations = topology.violations
    else:
        report.verdicts["topology"] = False
    report.counterexamples = [v.dict(exclude_none=True) for v in violations]
    return report


def cmd_closure(args) -> Report:
    """Report minimal covers, the closure trace and optionally one covering test."""
    ws = load(args.file)
    t = ws.system(args.system)
    c = t.category
    objects = [args.object] if args.object else list(c.objects)
    report = Report.start("closure", inputs=_inputs(ws, f"cover_systems/{args.system}"))
    report.data["mode"] = t.mode.value
    report.data["minimal_covers"] = {
        a: [SieveData.from_sieve(r).dict() for r in minimal_covers(t, a)] for a in objects
    }
    if t.mode is Mode.UPGLUE:
        report.data["rounds"] = [r.dict() for r in t.closure.round_data()]
    if args.sieve:
        try:
            sieve = SieveData.parse_raw(args.sieve).to_sieve(c)
        except ValueError as err:
            raise WorkspaceError(f"Cannot parse sieve: {err}") from err
        verdict = is_covering(t, sieve)
        report.verdicts["covering"] = verdict.covering
        if verdict.witness is not None:
            report.witnesses.append(verdict.witness.dict(exclude_none=True))
    return report


def cmd_tensor_site(args) -> Report:
    """Build the tensor site of two topologies and write it to the workspace."""
    ws = load(args.file)
    ta, tb = ws.system(args.a_system), ws.system(args.b_system)
    for t in (ta, tb):
        if not check_topology(t).topology:
            raise PreconditionFailed(f"{t.name} is not a topology")
    category = tensor_category(ta.category, tb.category)
    t = tensor_topology(ta, tb, category)
    name = args.name or f"{args.a_system}x{args.b_system}"
    ws.add_system(name, t)
    report = Report.start(
        "tensor-site",
        inputs=_inputs(
            ws, f"cover_systems/{args.a_system}", f"cover_systems/{args.b_system}"
        ),
    )
    report.data.update(
        system=name,
        category=ws.category_name(category),
        objects=len(category.objects),
        proper_basic_covers=proper_cover_count(t),
        basic_covers={
            a: [r.describe() for r in t.covers(a) if not r.is_full]
            for a in category.objects
        },
        out=_write(ws, args),
    )
    return report


def cmd_check_functor(args) -> Report:
    """Run the requested checkers on a site morphism."""
    ws = load(args.file)
    m = ws.morphism(args.morphism)
    report = Report.start(
        "check-functor", inputs=_inputs(ws, f"morphisms/{args.morphism}")
    )
    for prop in dict.fromkeys(args.properties or [Property.LC.value]):
        prop = Property(prop)
        if prop is Property.LC:
            result = check_LC(m, Convention(args.convention))
        elif prop is Property.CONTINUOUS:
            probes = [ws.module(name) for name in args.probe]
            result = check_continuous(m, probes)
        else:
            result = run_check(m, prop)
        report.verdicts[prop.value] = result.verdict
        report.counterexamples.extend(
            {"property": prop.value, **ce.dict(exclude_none=True)}
            for ce in result.counterexamples
        )
        report.data[prop.value] = result.details
    return report


def cmd_tensor_functor(args) -> Report:
    """Check that a property passes from two site morphisms to their tensor."""
    ws = load(args.file)
    m1, m2 = ws.morphism(args.first), ws.morphism(args.second)
    result = verify_tensor_preservation(m1, m2, Property(args.property))
    report = Report.start(
        "tensor-functor",
        inputs=_inputs(ws, f"morphisms/{args.first}", f"morphisms/{args.second}"),
    )
    report.verdicts[result.property.value] = result.verdict
    report.counterexamples = [
        ce.dict(exclude_none=True) for ce in result.counterexamples
    ]
    report.data["severity"] = result.severity
    return report


def cmd_sheaf(args) -> Report:
    """Test the sheaf and null-presheaf conditions."""
    ws = load(args.file)
    f, t = ws.module(args.module), ws.system(args.system)
    report = Report.start(
        "sheaf",
        inputs=_inputs(ws, f"modules/{args.module}", f"cover_systems/{args.system}"),
    )
    report.data["sheaf"] = is_sheaf(f, t, sample=args.sample)
    report.data["null_presheaf"] = is_null_presheaf(f, t)
    return report


def cmd_sheafify(args) -> Report:
    """Sheafify a module and write the result to the workspace."""
    ws = load(args.file)
    f, t = ws.module(args.module), ws.system(args.system)
    module, unit = sheafify(f, t)
    name = args.name or f"a({args.module})"
    module.name = name
    ws.add_module(name, module)
    report = Report.start(
        "sheafify",
        inputs=_inputs(ws, f"modules/{args.module}", f"cover_systems/{args.system}"),
    )
    report.verdicts["output_is_sheaf"] = is_sheaf(module, t, sample=0)
    report.data.update(
        module=name,
        dims_before=f.dims,
        dims_after=module.dims,
        unit_iso=unit.is_iso(),
        null_presheaf=is_null_presheaf(f, t),
        out=_write(ws, args),
    )
    return report


def _predicate(ws: Workspace, text: str) -> Predicate:
    """Parse "null:SYSTEM", "supported:A,B" or "simple"."""
    kind, _, arg = text.partition(":")
    if kind == "null":
        t = ws.system(arg)
        return lambda m: is_null_presheaf(m, t)
    if kind == "supported":
        return supported_on(x for x in arg.split(",") if x)
    if kind == "simple":
        return is_simple
    raise WorkspaceError(f"Unknown membership predicate {text!r}")


def cmd_serre(args) -> Report:
    """Gabriel product or semilocalizing hull membership."""
    ws = load(args.file)
    c = ws.module(args.module)
    report = Report.start(
        f"serre {args.serre_command}", inputs=_inputs(ws, f"modules/{args.module}")
    )
    if args.serre_command == "gabriel":
        w1, w2 = _predicate(ws, args.w1), _predicate(ws, args.w2)
        report.data["member"] = gabriel_product_member(c, w1, w2)
    else:
        test = either(*(_predicate(ws, text) for text in args.member))
        max_len = c.total_dim if args.max_len is None else args.max_len
        report.data["member"] = sloc_hull_member(c, test, max_len)
        report.data["max_len"] = max_len
    return report


def cmd_enumerate(args) -> Report:
    """List sieves, covering sieves, modules or submodules."""
    ws = load(args.file)
    report = Report.start(f"enumerate {args.kind}")
    if args.kind in ("sieves", "covering"):
        if args.kind == "sieves":
            c = ws.category(args.name)
            objects = [args.object] if args.object else list(c.objects)
            found = {a: enumerate_sieves(c, a) for a in objects}
        else:
            t = ws.system(args.name)
            objects = [args.object] if args.object else list(t.category.objects)
            found = {a: enumerate_covering_sieves(t, a) for a in objects}
        report.data["counts"] = {a: len(sieves) for a, sieves in found.items()}
        report.data["items"] = {
            a: [r.describe() for r in sieves] for a, sieves in found.items()
        }
    elif args.kind == "modules":
        modules = list(enumerate_modules(ws.category(args.name)))
        report.data["count"] = len(modules)
        report.data["dims"] = [m.dims for m in modules]
    else:
        subs = enumerate_submodules(ws.module(args.name))
        report.data["count"] = len(subs)
        report.data["dims"] = [{a: s.dim for a, s in spaces.items()} for spaces in subs]
    return report


def _algebra(ws: Workspace, spec: str, bound: int) -> GradedAlgebra:
    """Return a stored graded algebra, or parse a presentation."""
    if spec in ws.graded:
        return ws.graded_algebra(spec)
    return parse_algebra(spec, bound, ws.field)


def _pieces(z: WindowedZAlgebra) -> Dict[str, int]:
    return {
        f"{n},{m}": z.piece_dim(n, m) for n in z.window for m in z.window if n >= m
    }


def cmd_zalg(args) -> Report:
    """Graded algebra and Z-algebra constructions and checks."""
    ws = load(args.file)
    sub = args.zalg_command
    report = Report.start(f"zalg {sub}")
    if sub == "from-graded":
        g = _algebra(ws, args.algebra, args.hi - args.lo)
        z = from_graded(g, args.lo, args.hi)
        name = args.name or z.name
        ws.add_zalgebra(name, z)
        report.data.update(
            zalgebra=name,
            pieces=_pieces(z),
            generated_in_degree_one=check_generated_in_degree_one(z),
            out=_write(ws, args),
        )
    elif sub == "segre":
        g = segre(
            _algebra(ws, args.first, args.bound), _algebra(ws, args.second, args.bound)
        )
        name = args.name or g.name
        ws.graded[name] = g
        report.data.update(algebra=name, dims=g.dims, out=_write(ws, args))
    elif sub == "diagonal":
        c, delta = diagonal(ws.zalgebra(args.first), ws.zalgebra(args.second))
        name = args.name or c.name
        ws.add_zalgebra(name, c)
        ws.add_functor(f"Δ({name})", delta)
        report.data.update(
            zalgebra=name,
            functor=f"Δ({name})",
            pieces=_pieces(c),
            generated_in_degree_one=check_generated_in_degree_one(c),
            out=_write(ws, args),
        )
    elif sub == "tails":
        z = ws.zalgebra(args.zalgebra)
        t = tails_system(z, Mode(args.mode))
        name = args.name or f"tails({args.zalgebra})"
        ws.add_system(name, t)
        report.data.update(
            system=name,
            sieve_dims={
                f"{m}>={n}": [tails_sieve(z, m, n).dims[str(l)] for l in z.window]
                for m in z.window
                for n in z.window
                if n >= m
            },
            out=_write(ws, args),
        )
    elif sub == "check-delta":
        bound = args.hi - args.lo
        a = from_graded(_algebra(ws, args.first, bound), args.lo, args.hi)
        b = from_graded(_algebra(ws, args.second, bound), args.lo, args.hi)
        result = check_delta_LC_on_window(a, b)
        report.window_limited = True
        report.verdicts["LC"] = result.verdict
        report.counterexamples = [
            ce.dict(exclude_none=True) for ce in result.counterexamples
        ]
        report.witnesses = result.details.get("witnesses", [])
        report.data["details"] = {
            k: v for k, v in result.details.items() if k != "witnesses"
        }
    else:
        his = list(range(args.lo + 2, args.hi + 1))
        a = _algebra(ws, args.first, args.hi - args.lo)
        b = _algebra(ws, args.second, args.hi - args.lo)
        sweep = window_sweep(a, b, args.lo, his)
        report.window_limited = True
        report.data["rows"] = [row.dict() for row in sweep.rows]
    return report


COMMANDS = {
    "init": cmd_init,
    "validate": cmd_validate,
    "axioms": cmd_axioms,
    "closure": cmd_closure,
    "tensor-site": cmd_tensor_site,
    "check-functor": cmd_check_functor,
    "tensor-functor": cmd_tensor_functor,
    "sheaf": cmd_sheaf,
    "sheafify": cmd_sheafify,
    "serre": cmd_serre,
    "enumerate": cmd_enumerate,
    "zalg": cmd_zalg,
}


@problem_reporter
def run(args) -> int:
    """Run one command under the configured caps and emit its report."""
    with limits(
        enum_cap=args.cap_enum,
        sieve_cap=args.cap_sieve,
        subspace_cap=args.cap_subspace,
        module_dim_bound=args.module_dim_bound,
        glue_depth=args.glue_depth,
    ):
        started = time.perf_counter()
        report = COMMANDS[args.command](args)
        if args.timing:
            report.timing = round(time.perf_counter() - started, 6)
        return emit(report, quiet=args.json)


def main(argv: Optional[List[str]] = None) -> int:
    """Main."""
    args = config(argv)
    LOGGER.debug("Running %s", args.command)
    return run(args)


if __name__ == "__main__":
    sys.exit(main())

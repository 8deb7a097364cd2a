import pytest

from linear_sites import fixtures
from linear_sites.exactlin import Field
from linear_sites.lincat import representable
from linear_sites.topology.cover import trivial_system
from linear_sites.workspace import Workspace, save


@pytest.fixture
def f2():
    """The field with two elements."""
    return Field.prime(2)


@pytest.fixture
def s1(f2):
    """The category 1 → 2 over F_2."""
    return fixtures.s1(f2)


@pytest.fixture
def alpha(s1):
    """The ⟨α⟩-topology on S1: ⟨α⟩ covers 2, only the full sieve covers 1."""
    return fixtures.alpha_system(s1)


@pytest.fixture
def trivial(s1):
    """The trivial topology on S1."""
    return trivial_system(s1)


@pytest.fixture
def simple1(s1):
    """The simple module at object 1."""
    return fixtures.simple_module(s1, fixtures.ONE)


@pytest.fixture
def simple2(s1):
    """The simple module at object 2."""
    return fixtures.simple_module(s1, fixtures.TWO)


@pytest.fixture
def rep2(s1):
    """The representable module s1(−, 2)."""
    return representable(s1, fixtures.TWO)


@pytest.fixture
def morphisms(s1):
    """Inclusions of {1} and {2} into the ⟨α⟩-site, and the quotient by α."""
    return fixtures.site_morphisms(s1)


@pytest.fixture
def kxy(f2):
    """k[x,y] up to degree 3."""
    return fixtures.graded_algebra("k[x,y]", f2)


@pytest.fixture
def kuv(f2):
    """k[u,v] up to degree 3."""
    return fixtures.graded_algebra("k[u,v]", f2)


@pytest.fixture
def workspace_file(tmp_path, f2):
    """A workspace file holding the fixture catalogue."""
    path = tmp_path / "workspace.json"
    save(Workspace.from_catalogue(fixtures.catalogue(f2), f2), path)
    return path

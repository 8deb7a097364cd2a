"""Tests for workspace files."""

import json

import pytest

from linear_sites import fixtures
from linear_sites.error import WorkspaceError
from linear_sites.lincat import tensor_category
from linear_sites.topology.cover import same_topology, tensor_topology
from linear_sites.workspace import Workspace, dump, load, save
from linear_sites.zalg import from_graded, same_structure


@pytest.fixture
def ws(workspace_file):
    return load(workspace_file)


def test_round_trip(ws, workspace_file, alpha, rep2):
    assert dump(ws) == workspace_file.read_text(encoding="utf-8")
    assert same_topology(ws.system("alpha"), alpha)
    assert ws.module("h(2)").dims == rep2.dims
    assert ws.category("S1") == alpha.category


def test_dump_is_deterministic(f2):
    first = Workspace.from_catalogue(fixtures.catalogue(f2), f2)
    second = Workspace.from_catalogue(fixtures.catalogue(f2), f2)
    assert dump(first) == dump(second)
    assert first.hashes() == second.hashes()
    assert "cover_systems/alpha" in first.hashes()


def test_hash_changes_with_content(ws):
    before = ws.hashes()
    ws.add_system("alpha", fixtures.raw_singleton_system(ws.category("S1")))
    after = ws.hashes()
    assert before["cover_systems/alpha"] != after["cover_systems/alpha"]
    assert before["modules/h(2)"] == after["modules/h(2)"]


def test_unknown_names(ws):
    with pytest.raises(WorkspaceError):
        ws.system("missing")
    with pytest.raises(WorkspaceError):
        ws.module("S(3)")
    with pytest.raises(WorkspaceError):
        ws.morphism("incl3")


def test_morphism_resolves(ws):
    m = ws.morphism("incl1")
    assert m.name == "incl1"
    assert m.target_system is ws.system("alpha")


def test_load_errors(tmp_path):
    with pytest.raises(WorkspaceError):
        load(tmp_path / "absent.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    with pytest.raises(WorkspaceError):
        load(bad)
    wrong = tmp_path / "wrong.json"
    wrong.write_text(json.dumps({"version": "0"}), encoding="utf-8")
    with pytest.raises(WorkspaceError):
        load(wrong)


def test_bad_table_entry(tmp_path, workspace_file):
    data = json.loads(workspace_file.read_text(encoding="utf-8"))
    data["modules"]["h(2)"]["action"][0]["entries"].append([5, 5, 5, 1])
    path = tmp_path / "broken.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    with pytest.raises(WorkspaceError):
        load(path)


def test_validate_reports(ws):
    reports = {r.subject: r for r in ws.validate()}
    assert reports["category/S1"].valid
    assert reports["functor/quotient"].valid
    assert reports["module/h(2)"].valid
    assert reports["graded/k[x,y]"].valid
    assert not reports["system/empty-at-1"].valid
    assert [
        subject for subject, r in reports.items() if not r.valid
    ] == ["system/empty-at-1"]


def test_tensor_category_stored_by_factors(ws, tmp_path):
    s1 = ws.category("S1")
    c = tensor_category(s1, s1)
    alpha = ws.system("alpha")
    ws.add_system("alpha2", tensor_topology(alpha, alpha, c))
    data = ws.to_file()
    name = ws.category_name(c)
    assert data.categories[name].tensor_of == ("S1", "S1")
    path = tmp_path / "tensor.json"
    save(ws, path)
    reloaded = load(path)
    assert reloaded.category(name) == c
    assert same_topology(reloaded.system("alpha2"), ws.system("alpha2"))


def test_zalgebra_round_trip(ws, tmp_path, kxy):
    z = from_graded(kxy, 0, 2)
    ws.add_zalgebra("a(k[x,y])", z)
    path = tmp_path / "z.json"
    save(ws, path)
    reloaded = load(path).zalgebra("a(k[x,y])")
    assert (reloaded.lo, reloaded.hi) == (0, 2)
    assert same_structure(reloaded, z)

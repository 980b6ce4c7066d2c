import json

import pytest

from tcryst.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_enumerate_c_i(capsys):
    code, out, _ = run(capsys, "enumerate", "--dim", "2", "--type", "c-i", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["total"] == 26 and len(data["entries"]) == 26


def test_enumerate_frieze_total(capsys):
    code, out, _ = run(capsys, "enumerate", "--dim", "1", "--type", "all")
    assert code == 0
    assert out.strip().splitlines()[-1] == "counts: a=2, b=2, c-i=1, c-ii=2; total=7"
    code, out, _ = run(capsys, "enumerate", "--dim", "1", "--type", "a", "--format", "json")
    assert json.loads(out)["total"] == 2


@pytest.mark.parametrize(
    "argv,expected",
    [
        (["--group", "Z2xZ2", "--coeff", "T", "--phi", "pr1", "--degree", "2"], "Z_2 ⊕ Z_2"),
        (["--group", "p4-point", "--coeff", "Z2", "--degree", "1"], "Z_2"),
        (["--group", "trivial", "--coeff", "Z", "--degree", "1"], "0"),
        (["--group", "Z4", "--coeff", "ZN:4", "--degree", "2"], "Z_4"),
    ],
)
def test_cohomology(capsys, argv, expected):
    code, out, _ = run(capsys, "cohomology", *argv)
    assert code == 0 and out.strip() == expected


def test_cohomology_from_file(capsys, tmp_path):
    from tcryst.groups import named_group

    path = tmp_path / "g.json"
    path.write_text(json.dumps(named_group("Z2").to_json()), encoding="utf-8")
    code, out, _ = run(capsys, "cohomology", "--group", str(path), "--coeff", "Z", "--degree", "2")
    assert code == 0 and out.strip() == "Z_2"


def test_budget_exit_code(capsys):
    code, _, err = run(capsys, "cohomology", "--group", "D6", "--coeff", "Z", "--degree", "4", "--budget", "100")
    assert code == 3 and "budget" in err


def test_ahss_pages(capsys):
    code, out, _ = run(capsys, "ahss", "--example", "1d-bw", "--side", "momentum", "--class", "AI", "--pages", "E2")
    assert code == 0
    lines = out.splitlines()
    assert lines[1].split("|")[1].split() == ["Z_2", "0"]  # q = 7
    code, out, _ = run(capsys, "ahss", "--example", "pg-grey", "--side", "position", "--pages", "E1,E2", "--format", "json")
    data = json.loads(out)
    assert set(data["pages"]) == {"E1", "E2"}


def test_tduality(capsys):
    code, out, _ = run(capsys, "tduality", "--example", "1d-bw", "--classes", "AI", "--format", "json")
    assert code == 0
    rows = json.loads(out)["reports"][0]["momentum"]
    assert [r["text"] for r in rows] == ["Z", "0", "Z_2", "Z"]
    assert rows[3]["status"] == "resolved-by-duality"
    code, out, _ = run(capsys, "tduality", "--example", "pg-grey", "--classes", "all", "--format", "json")
    assert len(json.loads(out)["reports"]) == 8


def test_atomic(capsys):
    code, out, _ = run(capsys, "atomic", "--group", "p4", "--wyckoff", "d", "--rep", "1", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["bundle"]["rank"] == 4
    assert data["invariant"]["points"][0]["multiplicities"] == [1, 1, 1, 1]
    code, out, _ = run(capsys, "atomic", "--group", "p4", "--wyckoff", "a", "--rep", "0", "--format", "json")
    data = json.loads(out)
    assert data["bundle"]["rank"] == 0
    assert all(x == 0 for p in data["invariant"]["points"] for x in p["multiplicities"])


def test_atomic_cocycle_exit_code(capsys, tmp_path):
    from tcryst.registry import load_json

    path = tmp_path / "b.json"
    path.write_text(json.dumps(load_json("atomic.json")["displayed"]["p4-b"]["displayed"]), encoding="utf-8")
    code, _, err = run(capsys, "atomic", "--bundle", str(path))
    assert code == 6 and "cocycle" in err


def test_atomic_displayed(capsys):
    code, out, _ = run(capsys, "atomic", "--displayed", "p4-b")
    assert code == 0
    assert "invalid" in out.splitlines()[0]
    assert "matches induced bundle" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["enumerate", "--dim", "3"],
        ["enumerate", "--dim", "2", "--bogus"],
        ["cohomology", "--group", "nope", "--degree", "1"],
        ["cohomology", "--group", "Z2", "--coeff", "Q", "--degree", "1"],
        ["ahss", "--example", "nope", "--side", "position"],
        ["ahss", "--example", "1d-bw", "--side", "position", "--pages", "E9"],
        ["atomic", "--wyckoff", "a", "--displayed", "p4-b"],
        ["atomic", "--wyckoff", "z"],
        ["atomic", "--wyckoff", "a", "--rep", "1-t"],
        [],
    ],
)
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err


def test_output_is_deterministic(capsys):
    outs = [run(capsys, "tduality", "--example", "pg-grey", "--classes", "all", "--jobs", str(j))[1] for j in (1, 3, 1)]
    assert outs[0] == outs[1] == outs[2]


def test_output_file(capsys, tmp_path):
    path = tmp_path / "t.json"
    code, out, _ = run(capsys, "tables", "--format", "json", "--output", str(path))
    assert code == 0 and out == ""
    rows = json.loads(path.read_text(encoding="utf-8"))
    assert len(rows) == 19


def test_data_dir_override(capsys, tmp_path, monkeypatch):
    from tcryst.registry import data_path

    for name in ("space_groups.json", "magnetic.json", "examples.json", "atomic.json"):
        (tmp_path / name).write_text(data_path(name).read_text(encoding="utf-8"), encoding="utf-8")
    data = json.loads((tmp_path / "examples.json").read_text(encoding="utf-8"))
    data["examples"]["1d-bw"]["aliases"].append("renamed")
    (tmp_path / "examples.json").write_text(json.dumps(data), encoding="utf-8")
    monkeypatch.setenv("TCRYST_DATA_DIR", str(tmp_path))
    code, out, _ = run(capsys, "tduality", "--example", "renamed")
    assert code == 0 and "1d-bw" in out


def _data_dir_with(tmp_path, monkeypatch, edit):
    from tcryst.registry import data_path

    for name in ("space_groups.json", "magnetic.json", "examples.json", "atomic.json"):
        (tmp_path / name).write_text(data_path(name).read_text(encoding="utf-8"), encoding="utf-8")
    data = json.loads((tmp_path / "examples.json").read_text(encoding="utf-8"))
    edit(data)
    (tmp_path / "examples.json").write_text(json.dumps(data), encoding="utf-8")
    monkeypatch.setenv("TCRYST_DATA_DIR", str(tmp_path))


def test_mismatch_exit_code(capsys, tmp_path, monkeypatch):
    def drop_rules(data):
        data["examples"]["pg-grey"]["position"]["rules"] = {}

    _data_dir_with(tmp_path, monkeypatch, drop_rules)
    code, _, err = run(capsys, "tduality", "--example", "pg-grey")
    assert code == 5 and "mismatch" in err


def test_spectral_failure_exit_code(capsys, tmp_path, monkeypatch):
    def bad_rule(data):
        data["examples"]["pg-grey"]["position"]["rules"] = {"e0[0,0]->e1[0,1/4]": {"map": "cplx"}}

    _data_dir_with(tmp_path, monkeypatch, bad_rule)
    code, _, err = run(capsys, "ahss", "--example", "pg-grey", "--side", "position")
    assert code == 4 and "spectral" in err

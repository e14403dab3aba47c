import json

import pytest

from mahler_measures import cli
from mahler_measures.mahler_catalog import builtin, system_to_json


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_list(capsys):
    code, out, _ = run(capsys, "list")
    assert code == 0
    assert [line.split()[0] for line in out.splitlines()] == ["thue", "stern", "lambert3", "rudin", "dilcher"]


def test_list_custom_dir(capsys, tmp_path):
    data = system_to_json(builtin("thue"))
    data["name"] = "mythue"
    (tmp_path / "mythue.json").write_text(json.dumps(data))
    code, out, _ = run(capsys, "list", "--custom-dir", str(tmp_path), "--format", "json")
    assert code == 0
    assert [s["name"] for s in json.loads(out)][-1] == "mythue"


def test_expand_tsv(capsys):
    code, out, _ = run(capsys, "expand", "--system", "thue", "--order", "7", "--format", "tsv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "n\tF\tG" and [l.split("\t")[1] for l in lines[1:]] == ["1", "-1", "-1", "1", "-1", "1", "1", "-1"]


def test_approx_json(capsys):
    code, out, _ = run(capsys, "approx", "--system", "lambert3", "--k", "19", "--pattern", "thm3")
    assert code == 0
    data = json.loads(out)
    assert data["o"] == 59 and data["degrees"] == [19, 19, 19] and data["kernel_dimension"] == 1


def test_approx_default_pattern(capsys):
    code, out, _ = run(capsys, "approx", "--system", "rudin", "--k", "17")
    assert code == 0 and json.loads(out)["o"] == 53


def test_det(capsys):
    code, out, _ = run(capsys, "det", "--system", "rudin", "--k", "17")
    assert code == 0
    data = json.loads(out)
    assert data["o1"] == 53 and data["nonvanishing"]


def test_scan_text(capsys):
    code, out, _ = run(capsys, "scan", "--system", "stern", "--k-min", "1", "--k-max", "6", "--format", "text")
    assert code == 0 and out.splitlines()[-1] == "6/6 nonvanishing"


def test_certify_json(capsys):
    code, out, _ = run(capsys, "certify", "--system", "dilcher", "--k-list", "10,26", "--a", "1", "--b", "2")
    assert code == 0
    data = json.loads(out)
    assert data["mu_at_zero"] == "167/25" and data["condition12"]["holds"]


def test_witness_tsv(capsys):
    code, out, _ = run(capsys, "witness", "--system", "rudin", "--k", "17", "--a", "1", "--b", "3", "--m", "0,1",
                       "--format", "tsv")
    assert code == 0 and len(out.splitlines()) == 3


@pytest.mark.parametrize("theorem", ["thm3", "thm4", "thm5"])
def test_reproduce_matches(capsys, theorem):
    code, out, _ = run(capsys, "reproduce", theorem)
    assert code == 0 and out.splitlines()[-1] == f"{theorem}: match"


def test_reproduce_reports_mismatch(capsys, monkeypatch):
    golden = cli.load_golden()
    golden["theorems"]["thm5"]["lambda0"] = "1/6"
    monkeypatch.setattr(cli, "load_golden", lambda: golden)
    code, out, _ = run(capsys, "reproduce", "thm5", "--format", "json")
    assert code == 1
    data = json.loads(out)
    assert not data["match"] and any("lambda0" in d for d in data["diffs"])


def test_output_is_deterministic(capsys):
    first = run(capsys, "certify", "--system", "rudin", "--k-list", "17,21,26")[1]
    second = run(capsys, "certify", "--system", "rudin", "--k-list", "17,21,26")[1]
    assert first == second


def test_output_file_and_env_dir(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUTPUT_DIR_ENV, str(tmp_path))
    code, out, _ = run(capsys, "expand", "--system", "rudin", "--order", "5", "--output", "sub/r.json")
    assert code == 0 and out == ""
    data = json.loads((tmp_path / "sub" / "r.json").read_text())
    assert data["F"] == ["1", "1", "1", "-1", "1", "1"]


def test_custom_system_file(capsys, tmp_path):
    path = tmp_path / "sys.json"
    path.write_text(json.dumps(system_to_json(builtin("rudin"))))
    code, out, _ = run(capsys, "approx", "--system", str(path), "--k", "17", "--pattern", "thm4")
    assert code == 0 and json.loads(out)["o"] == 53


def test_config_errors_exit_3(capsys):
    assert run(capsys, "approx", "--system", "nosuch", "--k", "3")[0] == 3
    assert run(capsys, "certify", "--system", "thue", "--k-list", "5,12")[0] == 3
    assert run(capsys, "witness", "--system", "thue", "--k", "5", "--a", "3", "--b", "2")[0] == 3
    with pytest.raises(SystemExit) as info:
        cli.main(["scan", "--bogus"])
    assert info.value.code == 3


def test_custom_system_requires_pattern(capsys, tmp_path):
    data = system_to_json(builtin("rudin"))
    data["name"] = "other"
    path = tmp_path / "other.json"
    path.write_text(json.dumps(data))
    code, _, err = run(capsys, "approx", "--system", str(path), "--k", "3")
    assert code == 3 and "pattern" in err


def test_computation_failure_exit_2(capsys):
    code, _, err = run(capsys, "approx", "--system", "thue", "--degrees", "2,3,1", "--order", "7")
    assert code == 2 and "approx" in err

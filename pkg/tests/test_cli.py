import json
import subprocess
import sys
from fractions import Fraction

import pytest

from cmes.cli import main
from cmes.relations import run_all


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_series_G2(capsys):
    assert run(capsys, "series", "G", "2", "--qorder", "4") == (0, "-1/24, 1, 3, 4, 7\n")


def test_series_g21(capsys):
    assert run(capsys, "series", "g", "2", "1", "--qorder", "3") == (0, "0, 0, 0, 1\n")


def test_series_G32(capsys, beta63):
    code, out = run(capsys, "series", "G", "3", "2", "--qorder", "1")
    assert code == 0
    assert [Fraction(x) for x in out.split(", ")] == [beta63(3, 2), Fraction(-1, 24)]


def test_series_bi_index_formats_agree(capsys):
    _, as_csv = run(capsys, "series", "G", "1,1;1,1", "--qorder", "5", "--format", "csv")
    _, as_json = run(capsys, "series", "G", "1,1;1,1", "--qorder", "5", "--format", "json")
    rows = as_csv.splitlines()[1:]
    assert [Fraction(r.split(",")[3]) for r in rows] == [Fraction(e["value"]) for e in json.loads(as_json)]
    assert Fraction(rows[0].split(",")[3]) == Fraction(1, 1152)


def test_series_out_of_truncation(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["series", "G", "5", "--weight", "4", "--depth", "2"])
    assert exc.value.code == 2


def test_beta_show(capsys):
    assert run(capsys, "beta", "show", "1", "1") == (0, "1/48\n")


def test_beta_solve_document(capsys):
    code, out = run(capsys, "beta", "solve", "--weight", "7", "--depth", "3")
    doc = json.loads(out)
    assert code == 0
    assert doc["free_params"] == []
    assert {"index": [2], "value": "-1/24"} in doc["values"]


def test_beta_solve_logs_free_parameters(capsys):
    code = main(["beta", "solve", "--weight", "8", "--depth", "2", "--free", "6,2=1"])
    captured = capsys.readouterr()
    assert code == 0
    assert "beta(6,2)" in captured.err
    assert {"index": [6, 2], "value": "1"} in json.loads(captured.out)["values"]


def test_beta_solve_csv(capsys):
    code, out = run(capsys, "beta", "solve", "--weight", "4", "--depth", "2", "--format", "csv")
    assert out.splitlines()[0] == "index,value"
    assert "1 1,1/48" in out.splitlines()


@pytest.mark.parametrize("argv", [
    ["beta", "solve", "--weight", "1"],
    ["beta", "solve", "--weight", "4", "--depth", "5"],
    ["beta", "show"],
    ["check", "all", "--qorder", "-1"],
])
def test_usage_errors(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_unknown_identity_lists_registry(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["check", "nosuchid"])
    assert exc.value.code == 2
    err = capsys.readouterr().err
    assert "weight4" in err and "g-span" in err


def test_check_weight4(capsys):
    code, out = run(capsys, "check", "weight4")
    assert code == 0
    assert json.loads(out)["status"] == "pass"


def test_check_skipped_is_not_success(capsys):
    code, out = run(capsys, "check", "depth2times3", "--weight", "4", "--depth", "2", "--qorder", "4")
    assert code == 1
    assert json.loads(out)["status"] == "skipped-out-of-truncation"


def test_round_trip_through_beta_file(tmp_path, capsys, ctx63):
    path = tmp_path / "beta.json"
    assert main(["beta", "solve", "--weight", "6", "--depth", "3", "--out", str(path)]) == 0
    out = tmp_path / "reports.jsonl"
    code = main(["check", "all", "--weight", "6", "--depth", "3", "--qorder", "30", "--beta", str(path),
                 "--out", str(out)])
    assert code == 0
    from_file = out.read_text().splitlines()
    in_memory = [r.to_json() for r in run_all(ctx63)]
    assert from_file == in_memory


def test_beta_file_too_small(tmp_path, capsys):
    path = tmp_path / "beta.json"
    main(["beta", "solve", "--weight", "4", "--depth", "2", "--out", str(path)])
    with pytest.raises(SystemExit) as exc:
        main(["series", "G", "2", "--weight", "6", "--depth", "3", "--beta", str(path)])
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        main(["beta", "show", "2", "--beta", str(tmp_path / "missing.json")])


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cmes", "beta", "show", "2"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.strip() == "-1/24"

import io
import json

import pytest

from slicelab.main import build_parser, main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_family_output(capsys, tmp_path, name, *argv):
    code, out, _ = run(capsys, "family", *argv)
    assert code == 0
    path = tmp_path / name
    path.write_text(out)
    return str(path)


def test_bounds(capsys):
    code, out, _ = run(capsys, "bounds", "2")
    assert code == 0
    data = json.loads(out)
    assert data["result"]["profile"]["n_of_r"] == "33/4"
    assert data["command"] == ["bounds", "2"]


def test_bounds_text_format(capsys):
    code, out, _ = run(capsys, "bounds", "3", "--format", "text")
    assert code == 0
    assert "n_of_r: 16" in out


def test_family_fn_prints_a_polynomial_file(capsys):
    code, out, _ = run(capsys, "family", "fn", "2")
    assert code == 0
    assert out == "vars: x1 x2 y12\nx1*x2*y12\n"


def test_rank_of_generated_fixture(capsys, tmp_path):
    path = write_family_output(capsys, tmp_path, "f3.txt", "fn", "3")
    code, out, _ = run(capsys, "rank", path, "--workers", "1")
    assert code == 0
    result = json.loads(out)["result"]
    assert result["rank"] == 2
    assert result["ranks_excluded"] == 1
    assert result["certificate_valid"] is True
    assert result["witness"]["dim"] == 2
    assert "GF(2)" in result["field_note"]


def test_rank_from_stdin(capsys, monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO("x1*x2*x3\n"))
    code, out, _ = run(capsys, "rank", "-", "--workers", "1")
    assert code == 0
    assert json.loads(out)["result"]["rank"] == 1


def test_reports_repeat_exactly(capsys, tmp_path):
    path = write_family_output(capsys, tmp_path, "f2.txt", "fn", "2")
    _, first, _ = run(capsys, "lspace", path, "--workers", "1")
    _, second, _ = run(capsys, "lspace", path, "--workers", "1")
    a, b = json.loads(first), json.loads(second)
    assert a["result"] == b["result"]
    assert a["inputs_digest"] == b["inputs_digest"]


def test_verify_reports_repeat_exactly(capsys):
    _, first, _ = run(capsys, "verify", "segre", "--workers", "1", "--seed", "1")
    _, second, _ = run(capsys, "verify", "segre", "--workers", "1", "--seed", "1")
    a, b = json.loads(first), json.loads(second)
    assert json.dumps(a["result"], sort_keys=True) == json.dumps(b["result"], sort_keys=True)
    assert "wall_time" not in a["result"]["verdict"]
    assert a["search_stats"]["wall_time"] >= 0


def test_lspace_with_analysis(capsys, tmp_path):
    path = write_family_output(capsys, tmp_path, "f3.txt", "fn", "3")
    code, out, _ = run(capsys, "lspace", path, "--workers", "1", "--analyze")
    assert code == 0
    result = json.loads(out)["result"]
    assert result["rank"] == 2
    assert result["l_dim"] == 6
    assert result["within_bound"] is True
    assert result["bound_nr"] == "33/4"
    assert "w_dim" in result["analysis"]


def test_gens2_on_rank3_case(capsys, tmp_path):
    path = write_family_output(capsys, tmp_path, "c3.txt", "c3", "1d")
    code, out, _ = run(capsys, "gens2", path, "--basis")
    assert code == 0
    result = json.loads(out)["result"]
    assert result["generator_count"] == 5
    assert result["i2_dim"] == 5
    assert len(result["i2"]["basis"]) == 5
    assert "x1*x4" in result["i2"]["basis"]


def test_dim_of_normal_form_triple(capsys, tmp_path):
    path = write_family_output(capsys, tmp_path, "triple.txt", "lemma22", "3", "2", "--field", "gf3")
    code, out, _ = run(capsys, "dim", path, "--degree", "2", "--field", "gf3")
    assert code == 0
    assert json.loads(out)["result"]["dim"] == 1


def test_verify_segre(capsys):
    code, out, _ = run(capsys, "verify", "segre", "--workers", "1")
    assert code == 0
    assert json.loads(out)["result"]["all_passed"] is True


def test_verify_with_skipped_cases_exits_3(capsys):
    code, out, _ = run(capsys, "verify", "fn", "--workers", "1", "--max-visits", "20000")
    assert code == 3
    assert json.loads(out)["result"]["verdict"]["skipped"] == ["fn:4:gf2"]


def test_budget_exceeded_exits_3(capsys, tmp_path):
    path = write_family_output(capsys, tmp_path, "f3.txt", "fn", "3")
    code, _, err = run(capsys, "rank", path, "--workers", "1", "--max-visits", "100")
    assert code == 3
    payload = json.loads(err)
    assert payload["error"] == "BudgetExceededError"
    assert payload["details"]["ranks_excluded"] == 1


@pytest.mark.parametrize(
    "argv",
    [
        ("verify", "nope"),
        ("bounds",),
        ("rank", "/nonexistent/file.txt"),
        ("family", "fn", "two"),
        ("bounds", "2", "--format", "yaml"),
    ],
)
def test_input_errors_exit_4(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 4
    assert json.loads(err)["exit_code"] == 4


def test_bad_polynomial_file_exits_4(capsys, tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("x1 + x1*x2\n")
    code, _, err = run(capsys, "rank", str(path))
    assert code == 4
    assert json.loads(err)["error"] == "InhomogeneousError"


def test_rationals_are_rejected_for_rank(capsys, tmp_path):
    path = tmp_path / "f.txt"
    path.write_text("x1*x2*x3\n")
    code, _, err = run(capsys, "rank", str(path), "--field", "rat")
    assert code == 4
    assert json.loads(err)["error"] == "FieldError"


def test_parser_lists_every_command():
    parser = build_parser()
    for command in ("rank", "lspace", "gens2", "dim", "family", "verify", "bounds"):
        args = {
            "rank": ["rank", "f"],
            "lspace": ["lspace", "f"],
            "gens2": ["gens2", "f"],
            "dim": ["dim", "f", "--degree", "2"],
            "family": ["family", "fn", "2"],
            "verify": ["verify", "segre"],
            "bounds": ["bounds", "1"],
        }[command]
        assert parser.parse_args(args).command == command


def test_run_event_names_the_command_once(capsys, monkeypatch):
    messages = []
    monkeypatch.setattr("slicelab.cli.commands.log_run_event", messages.append)
    assert run(capsys, "bounds", "2")[0] == 0
    assert messages == ["bounds 2"]


def test_time_cap_reports_partial_progress(capsys, tmp_path):
    path = write_family_output(capsys, tmp_path, "f3.txt", "fn", "3")
    code, _, err = run(capsys, "rank", path, "--workers", "1", "--max-seconds", "1e-9")
    assert code == 3
    payload = json.loads(err)
    assert payload["error"] == "BudgetExceededError"
    assert payload["partial"]["units"] >= 1

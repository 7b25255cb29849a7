import json

import pytest

from groupevo.cli import main, percent_list


def scenario_file(tmp_path, name="figure1"):
    path = tmp_path / f"{name}.json"
    assert main(["scenario", name, "--out", str(path)]) == 0
    return path


def test_percent_list():
    assert percent_list("50,70%") == [0.5, 0.7]


def test_generate_then_run(tmp_path, capsys):
    script = scenario_file(tmp_path)
    log = tmp_path / "log.csv"
    assert main(["generate", str(script), "--out", str(log)]) == 0
    out = tmp_path / "out"
    code = main(["run", str(log), "--windows", "s30o30,s_o30", "--alpha", "50,70",
                 "--beta", "70", "--out", str(out), "--write-frames"])
    assert code == 0
    assert "timeframe_type" in capsys.readouterr().out
    assert (out / "s30o30" / "a70_b70" / "events.csv").exists()
    assert (out / "s30o30" / "frames" / "manifest.csv").exists()
    assert (out / "s_o30" / "a50_b70" / "chains.csv").exists()
    assert (out / "report.json").exists()


def test_window_type_flags(tmp_path):
    script = scenario_file(tmp_path)
    out = tmp_path / "o"
    assert main(["run", str(script), "--window-type", "overlapping", "--size", "60",
                 "--offset", "30", "--alpha", "50", "--beta", "50", "--out", str(out)]) == 0
    assert (out / "s60o30").is_dir()


def test_verify_pass_and_artifacts(tmp_path):
    script = scenario_file(tmp_path)
    out = tmp_path / "v"
    assert main(["verify", str(script), "--out", str(out)]) == 0
    verdict = json.loads((out / "verdict.json").read_text())
    assert verdict["passed"] is True


def test_verify_wrong_truth_exit_two(tmp_path, capsys):
    script = scenario_file(tmp_path, "stable")
    truth = tmp_path / "t.csv"
    truth.write_text(
        "from_frame,to_frame,from_group,to_group,event\n"
        "1,2,,g2,Forming\n2,3,g2,g3,Continuing\n3,4,g3,g4,Merging\n"
    )
    assert main(["verify", str(script), "--truth", str(truth)]) == 2
    assert "unexpected" in capsys.readouterr().out


@pytest.mark.parametrize(
    "content",
    ["", "source,target,timestamp\n", "1,2,not-a-date\n"],
    ids=["empty", "header-only", "bad-timestamp"],
)
def test_bad_input_exit_one(tmp_path, content, capsys):
    path = tmp_path / "log.csv"
    path.write_text(content)
    assert main(["run", str(path)]) == 1
    assert "error" in capsys.readouterr().err


def test_missing_input_exit_one(tmp_path):
    assert main(["run", str(tmp_path / "nope.csv")]) == 1


def test_window_too_large_exit_one(tmp_path):
    script = scenario_file(tmp_path)
    assert main(["run", str(script), "--windows", "s900o900"]) == 1


def test_non_convergence_exit_three(tmp_path):
    # random scenarios carry one-way noise, so SP moves away from 1
    script = scenario_file(tmp_path, "random")
    assert main(["run", str(script), "--max-iter", "1"]) == 3

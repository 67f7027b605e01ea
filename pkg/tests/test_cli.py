import pytest

from chflow.cli import main

TINY = ("grid.n = 16\n"
        "init.kind = constant\n"
        "flow.t_end = 0.05\n"
        "diag.theta_radius = 1.0\n")


def write_cfg(tmp_path, text=TINY, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_run_subcommand(tmp_path):
    cfg = write_cfg(tmp_path)
    out = tmp_path / "out"
    assert main(["run", "--config", cfg, "--out", str(out)]) == 0
    assert (out / "run.csv").is_file()
    assert (out / "meta.txt").is_file()


def test_run_uses_output_dir_key(tmp_path):
    out = tmp_path / "from_key"
    cfg = write_cfg(tmp_path, TINY + f"output.dir = {out}\n")
    assert main(["run", "--config", cfg]) == 0
    assert (out / "run.csv").is_file()


def test_run_missing_config_file(tmp_path, capsys):
    code = main(["run", "--config", str(tmp_path / "nope.cfg"),
                 "--out", str(tmp_path / "out")])
    assert code == 1
    assert "io error" in capsys.readouterr().err


def test_run_malformed_config(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "init.kind = constant\nflow.gamma = 2\n")
    code = main(["run", "--config", cfg, "--out", str(tmp_path / "out")])
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_compare_subcommand(tmp_path):
    cfg_a = write_cfg(tmp_path, name="a.cfg")
    cfg_b = write_cfg(
        tmp_path, TINY.replace("flow.t_end", "flow.a = 0\nflow.b = 0\nflow.t_end"),
        name="b.cfg")
    out = tmp_path / "cmp"
    code = main(["compare", "--config-a", cfg_a, "--config-b", cfg_b,
                 "--out", str(out)])
    assert code == 0
    assert (out / "compare.csv").is_file()
    assert (out / "run_a" / "run.csv").is_file()
    assert (out / "run_b" / "run.csv").is_file()


def test_compare_mismatch_reports_error(tmp_path, capsys):
    cfg_a = write_cfg(tmp_path, name="a.cfg")
    cfg_b = write_cfg(tmp_path, TINY.replace("grid.n = 16", "grid.n = 24"),
                      name="b.cfg")
    code = main(["compare", "--config-a", cfg_a, "--config-b", cfg_b,
                 "--out", str(tmp_path / "cmp")])
    assert code == 1
    assert "grid.n" in capsys.readouterr().err


def test_check_subcommand(capsys):
    assert main(["check"]) == 0
    out = capsys.readouterr().out
    assert "all checks passed" in out
    assert " FAIL" not in out


def test_no_arguments_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2

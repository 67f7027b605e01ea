import pytest

from plotkit import load_run_table, load_snapshot, plot_snapshot, plot_timeseries
from plotkit.cli import main

from flowdata import final_snapshot

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def test_plot_timeseries(constant_run, tmp_path):
    table = load_run_table(constant_run / "run.csv")
    out = tmp_path / "vs.png"
    plot_timeseries(table, ["min_v", "max_v"], out, logy=True,
                    title="conformal factor decay")
    assert out.read_bytes().startswith(PNG_MAGIC)


def test_plot_timeseries_unknown_column(constant_run, tmp_path):
    table = load_run_table(constant_run / "run.csv")
    with pytest.raises(KeyError, match="unknown columns"):
        plot_timeseries(table, ["min_v", "nope"], tmp_path / "x.png")


def test_plot_snapshot(bubble_run, tmp_path):
    out = tmp_path / "snap.png"
    plot_snapshot(load_snapshot(final_snapshot(bubble_run)), out)
    assert out.read_bytes().startswith(PNG_MAGIC)


def test_cli_timeseries(constant_run, tmp_path):
    out = tmp_path / "cli.png"
    code = main(["timeseries", "--csv", str(constant_run / "run.csv"),
                 "--cols", "min_v,max_v", "--logy", "--out", str(out)])
    assert code == 0
    assert out.read_bytes().startswith(PNG_MAGIC)


def test_cli_snapshot(bubble_run, tmp_path):
    out = tmp_path / "cli_snap.png"
    code = main(["snapshot", "--file", str(final_snapshot(bubble_run)),
                 "--out", str(out)])
    assert code == 0
    assert out.read_bytes().startswith(PNG_MAGIC)


def test_cli_errors(constant_run, tmp_path, capsys):
    assert main(["timeseries", "--csv", str(tmp_path / "nope.csv"),
                 "--cols", "t", "--out", str(tmp_path / "x.png")]) == 1
    assert "error:" in capsys.readouterr().err
    assert main(["timeseries", "--csv", str(constant_run / "run.csv"),
                 "--cols", "bogus", "--out", str(tmp_path / "x.png")]) == 1
    assert "error:" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        main([])

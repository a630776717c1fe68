import numpy as np

from qslcorr import cli, qsl, report
from qslcorr.channels import OunParams


def test_render_report_writes_files(tmp_path):
    run = qsl.run_scenario("oun", "bell-psi-plus", OunParams(1.0, 0.1), 1.0, 100)
    paths = report.render_report(run, tmp_path / "out")
    names = {p.name for p in paths}
    assert names == {"trajectory.csv", "measures.png", "speed_limit.png", "norm_averages.png"}
    for path in paths:
        assert path.exists() and path.stat().st_size > 0
    csv_text = (tmp_path / "out" / "trajectory.csv").read_text()
    assert csv_text == cli.emit_trajectory_csv(run)


def test_render_report_with_sweep(tmp_path):
    run = qsl.run_scenario("oun", "bell-psi-plus", OunParams(1.0, 0.1), 1.0, 100)
    rows = qsl.sweep_scenario(
        "oun", "bell-psi-plus", OunParams(1.0, 0.1), 1.0, 100,
        "entanglement", "kappa", np.linspace(0.5, 2, 3), lambda_ratio=0.1,
    )
    paths = report.render_report(run, tmp_path / "out", sweep_rows=rows, sweep_param="kappa")
    names = {p.name for p in paths}
    assert "sweep.csv" in names and "sweep.png" in names


def test_report_subcommand(tmp_path, capsys):
    outdir = tmp_path / "report"
    code = cli.main(["report", "--steps", "100", "--outdir", str(outdir)])
    assert code == 0
    listed = capsys.readouterr().out.strip().splitlines()
    assert len(listed) == 4
    assert (outdir / "measures.png").exists()

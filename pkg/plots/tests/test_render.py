import csv
from pathlib import Path

import pytest

from grushin_plots import PlotJob, RenderError, render
from grushin_plots.render import load_export, main

DATA = Path(__file__).parent / "data"

REGIME_FILES = [str(DATA / "golden_regime_singular.csv"),
                str(DATA / "golden_regime_planar.csv"),
                str(DATA / "golden_regime_orbit.csv")]


def test_regimes_renders(tmp_path):
    out = tmp_path / "regimes.png"
    info = render(PlotJob(kind="regimes", inputs=REGIME_FILES, output=str(out)))
    assert out.exists() and out.stat().st_size > 0
    assert len(info["curves"]) == 3


def test_ball_renders_and_silhouette_is_untouched(tmp_path):
    out = tmp_path / "ball.png"
    golden = DATA / "golden_ball.csv"
    info = render(PlotJob(kind="ball", inputs=[str(golden)], output=str(out)))
    assert out.exists() and out.stat().st_size > 0
    with open(golden, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        rows = [row for row in reader if row]
    rho = [float(r[2]) for r in rows]
    z = [float(r[3]) for r in rows]
    # view-only contract: the drawn polyline equals the input bit for bit
    assert list(info["silhouette_rho"]) == rho
    assert list(info["silhouette_z"]) == z


def test_cutlocus_renders_with_shared_meeting_point(tmp_path):
    out = tmp_path / "cutlocus.png"
    info = render(PlotJob(kind="cutlocus", inputs=[str(DATA / "golden_cutlocus.csv")],
                          output=str(out)))
    assert out.exists() and out.stat().st_size > 0
    assert info["n_fans"] == 12
    ends = info["meeting_points"]
    spread = max(abs(ends[:, i] - ends[0, i]).max() for i in range(3))
    assert spread < 1e-7


def test_schema_mismatch_rejected(tmp_path):
    with pytest.raises(RenderError):
        render(PlotJob(kind="ball", inputs=REGIME_FILES[:1],
                       output=str(tmp_path / "x.png")))


def test_cli_exit_codes(tmp_path):
    out = tmp_path / "fig.png"
    assert main(["--kind", "ball", "--in", str(DATA / "golden_ball.csv"),
                 "--out", str(out)]) == 0
    assert out.exists()
    assert main(["--kind", "cutlocus", "--in", str(DATA / "golden_ball.csv"),
                 "--out", str(tmp_path / "y.png")]) == 2


def test_loader_validates(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("w0,t,rho,z\n1,2,3\n")
    with pytest.raises(RenderError):
        load_export(str(bad), "ball")
    empty = tmp_path / "empty.csv"
    empty.write_text("w0,t,rho,z\n")
    with pytest.raises(RenderError):
        load_export(str(empty), "ball")


def test_job_validation():
    with pytest.raises(RenderError):
        PlotJob(kind="volume", inputs=["x"], output="y.png")
    with pytest.raises(RenderError):
        PlotJob(kind="ball", inputs=["a", "b"], output="y.png")
    with pytest.raises(RenderError):
        PlotJob(kind="regimes", inputs=[], output="y.png")

import subprocess
import sys

import numpy as np
import pytest

from spheregrf.cli import format_table, main, run_benchmark
from spheregrf.fieldio import read_binary, write_binary
from spheregrf.circulant import FieldRealization
from spheregrf import SphereGrid

from conftest import EXP

EXP_FLAGS = ["--model", "exp", "--phi0", "0.5243"]


def test_simulate_binary_reproducible(tmp_path, capsys):
    args = ["simulate", *EXP_FLAGS, "--N", "12", "--M", "6", "--seed", "7", "--count", "2"]
    assert main([*args, "--out", str(tmp_path / "a")]) == 0
    assert main([*args, "--out", str(tmp_path / "b")]) == 0
    files = sorted((tmp_path / "a").iterdir())
    assert [p.name for p in files] == ["field_0000.sgrf", "field_0001.sgrf"]
    for p in files:
        assert p.read_bytes() == (tmp_path / "b" / p.name).read_bytes()
    out = capsys.readouterr().out
    assert "clipped 11 eigenvalue(s)" in out and "wall time" in out
    assert read_binary(files[1]).pair_id == "B"


def test_simulate_spacetime_csv(tmp_path):
    out = tmp_path / "st"
    assert main(["simulate", "--model", "st-exp", "--delta", "0.95", "--tau", "0.25",
                 "--c0", "1.8951", "--N", "8", "--M", "4", "--T", "3", "--H", "3",
                 "--seed", "1", "--format", "csv", "--out", str(out)]) == 0
    lines = (out / "field_0000.csv").read_text().splitlines()
    assert lines[0] == "lon_deg,colat_deg,time,value" and len(lines) == 1 + 96


def test_simulate_model_file(tmp_path):
    spec = tmp_path / "model.txt"
    spec.write_text("model=matern\nphi2=0.7079 nu=0.25\n")
    assert main(["simulate", "--model-file", str(spec), "--N", "6", "--M", "3", "--seed", "1",
                 "--out", str(tmp_path / "o")]) == 0


@pytest.mark.parametrize("argv", [
    ["simulate", "--model", "exp", "--N", "1", "--M", "4", "--seed", "1"],
    ["simulate", "--model", "matern", "--phi2", "1", "--nu", "0.8", "--N", "4", "--M", "4",
     "--seed", "1"],
    ["simulate", "--N", "4", "--M", "4", "--seed", "1"],
    ["simulate", "--model", "st-exp", "--delta", "0.9", "--tau", "1", "--c0", "1", "--N", "4",
     "--M", "4", "--seed", "1"],
    ["benchmark", "--methods", "circulant,lu"],
])
def test_validation_exit_code(argv, tmp_path):
    assert main([*argv, "--out", str(tmp_path / "x")] if argv[0] == "simulate" else argv) == 2
    assert not (tmp_path / "x").exists()


def test_variogram_command(tmp_path):
    fields = tmp_path / "f"
    assert main(["simulate", *EXP_FLAGS, "--N", "12", "--M", "6", "--seed", "2", "--count", "4",
                 "--out", str(fields)]) == 0
    files = sorted(str(p) for p in fields.iterdir())
    out = tmp_path / "vg.csv"
    assert main(["variogram", *files, *EXP_FLAGS, "--out", str(out), "--per-replicate",
                 str(tmp_path / "per"), "--plot", str(tmp_path / "vg.png")]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "theta,u,gamma,count,truth" and len(lines) == 21
    assert len(list((tmp_path / "per").iterdir())) == 4
    assert (tmp_path / "vg.png").stat().st_size > 1000
    # mean file equals the mean of per-replicate files
    per = [np.loadtxt(p, delimiter=",", skiprows=1, usecols=2)
           for p in sorted((tmp_path / "per").iterdir())]
    mean = np.loadtxt(out, delimiter=",", skiprows=1, usecols=2)
    np.testing.assert_allclose(mean, np.mean(per, axis=0), rtol=1e-12)
    # re-run is byte-identical
    out2 = tmp_path / "vg2.csv"
    main(["variogram", *files, *EXP_FLAGS, "--out", str(out2)])
    assert out2.read_bytes() == out.read_bytes()


def test_variogram_spacetime_plot(tmp_path):
    fields = tmp_path / "f"
    assert main(["simulate", "--model", "st", "--gkind", "cauchy", "--delta", "0.95", "--tau",
                 "0.25", "--c1", "1.525", "--N", "8", "--M", "4", "--T", "3", "--seed", "1",
                 "--count", "2", "--out", str(fields)]) == 0
    files = sorted(str(p) for p in fields.iterdir())
    assert main(["variogram", *files, "--model", "st-cauchy", "--delta", "0.95", "--tau",
                 "0.25", "--c1", "1.525", "--out", str(tmp_path / "v.csv"),
                 "--plot", str(tmp_path / "v.png")]) == 0
    header, first = (tmp_path / "v.csv").read_text().splitlines()[:2]
    assert header == "theta,u,gamma,count,truth" and first.split(",")[1] == "0.0"
    assert (tmp_path / "v.png").exists()


def test_variogram_constant_field(tmp_path):
    path = tmp_path / "c.sgrf"
    write_binary(path, FieldRealization(np.full((8, 4), 2.0), 0, "A"))
    out = tmp_path / "c.csv"
    assert main(["variogram", str(path), "--out", str(out)]) == 0
    assert np.all(np.loadtxt(out, delimiter=",", skiprows=1, usecols=2) == 0)


def test_variogram_errors(tmp_path, capsys):
    assert main(["variogram", str(tmp_path / "missing.sgrf"), "--out", str(tmp_path / "o")]) == 1
    bad = tmp_path / "bad.sgrf"
    bad.write_bytes(b"SGRF" + b"\0" * 10)
    assert main(["variogram", str(bad), "--out", str(tmp_path / "o")]) == 2
    assert "offset" in capsys.readouterr().err


def test_benchmark_table_and_refusals(tmp_path, capsys):
    rows = run_benchmark([(18, 6), (360, 180)], ["cholesky", "eigen"], EXP,
                         max_bytes=2 * 2**30)
    assert rows[0]["cholesky"] is not None and rows[0]["eigen"] is not None
    assert rows[1]["cholesky"] is None and rows[1]["eigen"] is None
    table = format_table(rows, ["cholesky", "eigen"])
    assert "N=360, M=180" in table and table.splitlines()[-1].split()[-2:] == ["--", "--"]
    assert main(["benchmark", "--grids", "18x6,24x8", "--out", str(tmp_path / "b.csv"),
                 "--plot", str(tmp_path / "b.png")]) == 0
    lines = (tmp_path / "b.csv").read_text().splitlines()
    assert lines[0] == "N,M,n,circulant,cholesky,eigen" and len(lines) == 3
    assert (tmp_path / "b.png").exists()


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "spheregrf", "simulate", *EXP_FLAGS, "--N", "4",
                           "--M", "3", "--seed", "1", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    proc = subprocess.run([sys.executable, "-m", "spheregrf", "simulate", "--N", "4"],
                          capture_output=True, text=True)
    assert proc.returncode == 2

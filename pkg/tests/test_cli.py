import subprocess
import sys

import pytest

from murmur import cli, frame

import numpy as np


def run_cli(args):
    return cli.main(args)


GOOD_FAMILY = """#murmur-family v1
label,conductor,root_number
a,10,1
b,15,1

a,2,1
a,3,-1
b,2,-2
b,3,2
"""


def test_emit_csv_schema(tmp_path):
    path = tmp_path / "one.csv"
    cli.emit_csv(path, [(1.0, 0.5, 3)], "y,value,count")
    assert path.read_text() == "y,value,count\n1.0,0.5,3\n"


def test_emit_csv_atoms_precede_rows(tmp_path):
    path = tmp_path / "atoms.csv"
    cli.emit_csv(path, [(1.0, 2.0)], "y,value", atoms=[(4.0, 8.0 / 3.0)])
    lines = path.read_text().splitlines()
    assert lines[0].startswith("#atom 4.0 ")
    assert lines[1] == "y,value"


def test_emit_svg_two_polylines(tmp_path):
    path = tmp_path / "plot.svg"
    cli.emit_svg(
        path,
        [("a", [0.0, 1.0], [0.0, 1.0]), ("b", [0.0, 1.0], [1.0, 0.0])],
        atoms=[(0.5, 2.0)],
    )
    text = path.read_text()
    assert text.count("<polyline") == 2
    assert text.count('stroke="#d62728" stroke-width="2"') == 1
    assert text.startswith("<svg")
    assert text.rstrip().endswith("</svg>")


def test_density_ils_zero_below_support(tmp_path):
    out = tmp_path / "ils"
    code = run_cli([
        "density-ils", "--phi", "bump", "1", "2", "--sign", "+1",
        "--y-min", "0.001", "--y-max", "0.02", "--grid", "50", "--out", str(out),
    ])
    assert code == 0
    lines = (tmp_path / "ils.csv").read_text().splitlines()[1:]
    import math
    threshold = 1.0 / (16 * math.pi**2)
    for line in lines:
        y, value = map(float, line.split(","))
        if y < threshold:
            assert value == 0.0


def test_dirichlet_row_count(tmp_path):
    out = tmp_path / "dir"
    code = run_cli([
        "dirichlet", "--x", "2000", "--phi", "indicator", "1", "2",
        "--sign", "+1", "--bins", "40", "--y-min", "0.05", "--y-max", "0.9",
        "--out", str(out),
    ])
    assert code == 0
    lines = (tmp_path / "dir.csv").read_text().splitlines()
    assert lines[0] == "y,value,count"
    assert len(lines) == 1 + 40


def test_cli_determinism_byte_identical(tmp_path):
    args = [
        "dirichlet", "--x", "1500", "--phi", "indicator", "1", "2",
        "--sign", "both", "--bins", "25", "--y-min", "0.05", "--y-max", "0.8",
    ]
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    assert run_cli(args + ["--out", str(out1), "--svg"]) == 0
    assert run_cli(args + ["--out", str(out2), "--svg"]) == 0
    assert (tmp_path / "r1.csv").read_bytes() == (tmp_path / "r2.csv").read_bytes()
    assert (tmp_path / "r1-minus.csv").read_bytes() == (tmp_path / "r2-minus.csv").read_bytes()
    assert (tmp_path / "r1.svg").read_bytes() == (tmp_path / "r2.svg").read_bytes()


def test_petersson_negative_sign_peak(tmp_path):
    out = tmp_path / "pet"
    code = run_cli([
        "petersson", "--k", "40", "--phi", "bump", "1", "2", "--sign", "-1",
        "--y-min", "0.006", "--y-max", "0.013", "--out", str(out),
    ])
    assert code == 0
    rows = [line.split(",") for line in (tmp_path / "pet.csv").read_text().splitlines()[1:]]
    values = np.array([float(r[1]) for r in rows])
    assert values[np.argmax(np.abs(values))] < 0.0


def test_symsq_runs(tmp_path):
    out = tmp_path / "sym"
    code = run_cli(["symsq", "--k", "24", "--p-max", "13", "--phi", "bump", "1", "2", "--out", str(out)])
    assert code == 0
    assert (tmp_path / "sym.csv").exists()


def test_density_nu_atom_lines(tmp_path):
    out = tmp_path / "nu"
    code = run_cli([
        "density-nu", "--e-min", "0.5", "--e-max", "10", "--q-max", "50", "--out", str(out),
    ])
    assert code == 0
    lines = (tmp_path / "nu.csv").read_text().splitlines()
    atom_lines = [ln for ln in lines if ln.startswith("#atom")]
    assert atom_lines
    assert lines.index("y,value") == len(atom_lines)
    locs = [float(ln.split()[1]) for ln in atom_lines]
    assert any(abs(l - 1.0) < 1e-12 for l in locs)
    assert any(abs(l - 4.0) < 1e-12 for l in locs)


def test_old_kernel_fourier(tmp_path):
    out = tmp_path / "ok"
    code = run_cli(["old-kernel", "--parity", "odd", "--hat", "--out", str(out), "--svg"])
    assert code == 0
    lines = (tmp_path / "ok.csv").read_text().splitlines()
    assert lines[0].startswith("#atom 0.0 1.0")


def test_ingest_run(tmp_path):
    fam = tmp_path / "fam.txt"
    fam.write_text(GOOD_FAMILY)
    out = tmp_path / "run"
    code = run_cli([
        "ingest-run", "--file", str(fam), "--x", "10", "--phi", "indicator", "1", "2",
        "--out", str(out),
    ])
    assert code == 0
    lines = (tmp_path / "run.csv").read_text().splitlines()
    assert lines[0] == "y,value,count"
    assert len(lines) == 3  # primes 2 and 3


# ---------------------------------------------------------------------------
# exit codes


def test_exit_usage():
    assert run_cli(["dirichlet", "--x", "100", "--sign", "maybe", "--out", "/tmp/x"]) == 1
    assert run_cli(["nonsense"]) == 1


def test_exit_data(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("not a family file\n")
    assert run_cli(["ingest-run", "--file", str(bad), "--x", "10", "--out", str(tmp_path / "o")]) == 2


def test_exit_accuracy(tmp_path):
    # k = 4 cannot certify the default tail tolerance within budget
    code = run_cli([
        "petersson", "--k-window", "4", "4", "--k", "5",
        "--phi", "indicator", "0.5", "1.5", "--sign", "+1",
        "--y-min", "0.3", "--y-max", "0.9", "--out", str(tmp_path / "acc"),
    ])
    assert code == 3


def test_exit_window(tmp_path):
    code = run_cli([
        "dirichlet", "--x", "1000", "--phi", "indicator", "1", "2", "--sign", "+1",
        "--y-min", "0.00001", "--y-max", "0.0000111", "--out", str(tmp_path / "w"),
    ])
    assert code == 4


def test_module_entrypoint_smoke(tmp_path):
    result = subprocess.run(
        [sys.executable, "-m", "murmur", "old-kernel", "--parity", "even",
         "--out", str(tmp_path / "m")],
        capture_output=True, text=True,
    )
    assert result.returncode == 0
    assert "old-kernel:" in result.stdout


def test_worker_env_override_is_deterministic(tmp_path, monkeypatch):
    args = [
        "petersson", "--k", "30", "--phi", "bump", "1", "2", "--sign", "+1",
        "--y-min", "0.006", "--y-max", "0.013",
    ]
    monkeypatch.setenv("MURMUR_WORKERS", "1")
    assert run_cli(args + ["--out", str(tmp_path / "w1")]) == 0
    monkeypatch.setenv("MURMUR_WORKERS", "4")
    assert run_cli(args + ["--out", str(tmp_path / "w4")]) == 0
    assert (tmp_path / "w1.csv").read_bytes() == (tmp_path / "w4.csv").read_bytes()
    monkeypatch.setenv("MURMUR_WORKERS", "soon")
    assert run_cli(args + ["--out", str(tmp_path / "bad")]) == 1

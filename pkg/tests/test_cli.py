import json
import subprocess
import sys

import pytest

from grazing_maps.cli import main
from grazing_maps.report import read_csv_column


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_list_systems(capsys):
    code, out, _ = run(capsys, "list-systems")
    assert code == 0
    assert "paper-hamiltonian" in out and "monomial4" in out and "parabola2" in out


def test_classify_order4(capsys):
    code, out, _ = run(capsys, "classify", "--system", "paper-hamiltonian", "--point", "0,0")
    assert code == 0
    assert out.splitlines()[0] == "order 4, L_X^4 H = 6.000000"


def test_classify_order2_gate(capsys):
    code, out, _ = run(capsys, "classify", "--system", "parabola2", "--point", "0,0")
    assert code == 3
    assert out.startswith("order 2")


def test_classify_off_boundary(capsys):
    code, _, err = run(capsys, "classify", "--system", "monomial4", "--point", "0,1")
    assert code == 2
    assert "NotOnBoundary" in err


def test_classify_json(capsys):
    code, out, _ = run(capsys, "classify", "--system", "monomial4", "--json")
    d = json.loads(out)
    assert code == 0 and d["order"] == 4 and d["lie_values"][3] == 36.0


def test_param_override(capsys):
    code, out, _ = run(capsys, "classify", "--system", "monomial4", "--param", "c=2", "--json")
    assert json.loads(out)["lie_values"][3] == 12.0


@pytest.mark.parametrize(
    "argv",
    [
        ["classify", "--system", "nope"],
        ["classify", "--system", "monomial4", "--param", "c"],
        ["classify", "--system", "monomial4", "--param", "zz=1"],
        ["classify", "--system", "monomial4", "--point", "0,0,0"],
        ["sweep", "--system", "monomial4", "--eps", "0:1e-4"],
        ["sweep", "--system", "monomial4", "--eps", "abc"],
        ["fit", "/no/such.csv", "--column", "eps"],
        ["frobnicate"],
        ["sweep"],
    ],
)
def test_usage_errors(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_parse_error_in_file(capsys, tmp_path):
    bad = tmp_path / "bad.sys"
    bad.write_text("dim 2; X=[1,]")
    code, _, err = run(capsys, "classify", "--system", str(bad))
    assert code == 2 and "line 1" in err


def test_sweep_gate(capsys):
    code, _, err = run(capsys, "sweep", "--system", "parabola2", "--map", "zdm")
    assert code == 3 and "order 2" in err


def test_sweep_identity_row(capsys):
    code, out, _ = run(capsys, "sweep", "--system", "monomial4", "--eps", "0", "--n", "1", "--map", "zdm")
    assert code == 0
    header, row = out.strip().splitlines()
    rec = dict(zip(header.split(","), row.split(",")))
    assert rec["x4_num_1"] == rec["x1_1"] and rec["x4_num_2"] == rec["x1_2"]


def test_sweep_delta_and_fit(capsys, tmp_path):
    out_csv = tmp_path / "delta.csv"
    code, _, _ = run(capsys, "sweep", "--system", "monomial4", "--map", "delta",
                     "--eps", "1e-8:1e-4", "--n", "9", "--out", str(out_csv))
    assert code == 0
    for suffix in (".json", ".dat", ".svg"):
        assert out_csv.with_suffix(suffix).is_file()
    code, out, _ = run(capsys, "fit", str(out_csv), "--column", "delta_num", "--json")
    fit = json.loads(out)
    assert code == 0 and abs(fit["slope"] - 0.25) <= 1e-4
    code, out, _ = run(capsys, "fit", str(out_csv), "--column", "delta_num")
    assert out.startswith("delta_num: slope 0.250000")


def test_sweep_zdm_gap_slope(capsys, tmp_path):
    out_csv = tmp_path / "zdm.csv"
    code, _, _ = run(capsys, "sweep", "--system", "paper-hamiltonian", "--map", "zdm",
                     "--eps", "1e-8:1e-4", "--n", "9", "--out", str(out_csv), "--plot", "png")
    assert code == 0 and out_csv.with_suffix(".png").is_file()
    code, out, _ = run(capsys, "fit", str(out_csv), "--column", "gap_zdm", "--json")
    assert json.loads(out)["slope"] >= 0.95
    code, out, _ = run(capsys, "fit", str(out_csv), "--column", "shift_zdm", "--json")
    assert abs(json.loads(out)["slope"] - 0.75) <= 0.03


def test_fit_constant_column(capsys, tmp_path):
    path = tmp_path / "c.csv"
    path.write_text("eps,val\n" + "".join(f"{10.0**-k!r},2.5\n" for k in range(8, 3, -1)))
    code, out, _ = run(capsys, "fit", str(path), "--column", "val", "--json")
    assert code == 0 and abs(json.loads(out)["slope"]) <= 1e-10


def test_fit_errors(capsys, tmp_path):
    path = tmp_path / "c.csv"
    path.write_text("eps,val\n1e-8,1\n1e-7,0\n1e-6,1\n1e-5,1\n1e-4,1\n")
    code, _, err = run(capsys, "fit", str(path), "--column", "val")
    assert code == 2 and "NonPositiveValues" in err
    path.write_text("eps,val\n1e-8,1\n1e-7,2\n1e-6,1\n")
    code, _, err = run(capsys, "fit", str(path), "--column", "val")
    assert code == 2 and "TooFewPoints" in err


def test_deterministic_reports(capsys, tmp_path, monkeypatch):
    outputs = []
    for threads in ("1", "3"):
        monkeypatch.setenv("GRAZING_MAPS_THREADS", threads)
        code, out, _ = run(capsys, "sweep", "--system", "paper-hamiltonian", "--map", "pdm",
                           "--eps", "1e-8:1e-4", "--n", "5", "--json")
        outputs.append(out)
    assert outputs[0] == outputs[1]
    d1 = tmp_path / "a.csv"
    d2 = tmp_path / "b.csv"
    for d in (d1, d2):
        run(capsys, "sweep", "--system", "monomial4", "--map", "pdm", "--n", "5", "--out", str(d))
    assert d1.read_bytes() == d2.read_bytes()
    assert d1.with_suffix(".svg").read_bytes() == d2.with_suffix(".svg").read_bytes()
    fits = [run(capsys, "fit", str(d), "--column", "shift_zdm", "--json")[1] for d in (d1, d2)]
    assert fits[0] == fits[1]


@pytest.mark.parametrize("cmd, key", [("zdm", "x4_num"), ("pdm", "x5_num"), ("delta", "delta_num")])
def test_single_point_commands(capsys, cmd, key):
    code, out, _ = run(capsys, cmd, "--system", "monomial4", "--eps", "1e-4")
    assert code == 0 and key in out
    code, out, _ = run(capsys, cmd, "--system", "monomial4", "--eps", "1e-4", "--json")
    d = json.loads(out)
    if cmd == "delta":
        assert abs(d["delta_num"] + 0.0903602) <= 1e-7
    elif cmd == "zdm":
        assert abs(d["analytic"]["x4"][0] + 4.4267e-3) <= 1e-7


def test_explicit_input_point(capsys):
    code, out, _ = run(capsys, "zdm", "--system", "monomial4", "--eps", "1e-4", "--x1", "0,-1e-4", "--json")
    assert code == 0 and json.loads(out)["x1"] == [0.0, -1e-4]


def test_numeric_failure_exit_code(capsys, tmp_path):
    # order-4 tangency from the wrong side (L_X^4 H < 0): every row fails, the CSV is still written
    src = tmp_path / "wrong_side.sys"
    src.write_text("dim 2; X=[1, -6*x^3]; H=y; W=[1,0]")
    out_csv = tmp_path / "w.csv"
    code, _, err = run(capsys, "sweep", "--system", str(src), "--map", "pdm", "--eps", "1e-6:1e-4", "--n", "3",
                       "--out", str(out_csv))
    assert code == 4
    assert "NonpositiveRadicand" in err and "3 of 3 rows failed" in err
    assert len(out_csv.read_text().splitlines()) == 4


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "grazing_maps", "list-systems"], capture_output=True, text=True)
    assert proc.returncode == 0 and "monomial4" in proc.stdout

import csv
import io
import json
import subprocess
import sys

import pytest

from dsgain import ds_gain, dump_floorplan, generate_grid, load_floorplan
from dsgain.cli import main


@pytest.fixture
def grid_file(tmp_path):
    path = tmp_path / "grid.json"
    path.write_text(dump_floorplan(generate_grid(3, 2, 10, 10)))
    return path


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_evaluate_json(grid_file, capsys, params):
    code, out, _ = run(["evaluate", grid_file], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["floorplan_id"] == generate_grid(3, 2, 10, 10).id
    assert doc["ds_gain"] == pytest.approx(ds_gain(generate_grid(3, 2, 10, 10), params).ds_gain, abs=1e-9)


def test_evaluate_csv_to_file(grid_file, tmp_path, capsys):
    out_path = tmp_path / "out.csv"
    code, out, _ = run(["evaluate", grid_file, "--format", "csv", "-o", out_path], capsys)
    assert code == 0 and out == ""
    rows = list(csv.reader(out_path.open()))
    assert rows[0][:4] == ["floorplan_id", "e_tau_indoor_ns", "e_tau_open_ns", "ds_gain_ns"]


def test_global_options_before_subcommand(grid_file, capsys):
    a = run(["--format", "csv", "--tolerance", "1e-9", "evaluate", grid_file], capsys)
    b = run(["evaluate", grid_file, "--format", "csv", "--tolerance", "1e-9"], capsys)
    assert a == b and a[0] == 0


def test_evaluate_strict_mode(grid_file, capsys):
    _, var, _ = run(["evaluate", grid_file], capsys)
    _, strict, _ = run(["evaluate", grid_file, "--reliability-mode", "strict"], capsys)
    assert json.loads(strict)["reliability_mode"] == "strict"
    assert json.loads(strict)["reliability_sigma"] != json.loads(var)["reliability_sigma"]


def test_simulate_outputs(grid_file, tmp_path, capsys):
    samples, pdf, cdf = tmp_path / "s.csv", tmp_path / "p.csv", tmp_path / "c.csv"
    code, out, _ = run(["simulate", grid_file, "--links", 3000, "--seed", 3, "--emit-samples", samples,
                        "--distance-pdf", pdf, "--tau-cdf", cdf, "--at-distance", 10, "--window", 2], capsys)
    assert code == 0
    assert json.loads(out)["n_links"] == 3000
    assert len(samples.read_text().splitlines()) == 3001
    assert pdf.read_text().startswith("d_m,density\n")
    assert cdf.read_text().startswith("tau_ns,cdf\n")


def test_simulate_conditioned_cdf(grid_file, tmp_path, capsys):
    cdf = tmp_path / "c.csv"
    code, _, _ = run(["simulate", grid_file, "--links", 500, "--tau-cdf", cdf, "--at-distance", 5,
                      "--conditioned"], capsys)
    assert code == 0
    assert len(cdf.read_text().splitlines()) == 501


def test_simulate_is_byte_identical_across_threads(grid_file, tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(["simulate", grid_file, "--links", 20000, "--seed", 1, "--emit-samples", a, "--threads", 1], capsys)
    run(["simulate", grid_file, "--links", 20000, "--seed", 1, "--emit-samples", b, "--threads", 8], capsys)
    assert a.read_bytes() == b.read_bytes()


def test_compare_csv(grid_file, capsys):
    code, out, _ = run(["compare", grid_file, "--links", 20000, "--seeds", "0-2"], capsys)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert [r[0] for r in rows] == ["seed", "0", "1", "2", "mean"]
    assert all(abs(float(r[5])) < 4 for r in rows[1:4])


def test_compare_json(grid_file, capsys):
    code, out, _ = run(["compare", grid_file, "--links", 5000, "--seeds", "4,7", "--format", "json"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert [r["seed"] for r in doc["rows"]] == [4, 7]


def test_sweep_flags(capsys):
    code, out, _ = run(["sweep", "--kind", "grid_n_by_n", "--values", "1,2,3"], capsys)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["grid_n_by_n", "ds_gain_ns", "reliability_ns"]
    gains = [float(r[1]) for r in rows[1:]]
    assert gains == sorted(gains)


def test_sweep_spec_file(tmp_path, capsys):
    spec = tmp_path / "sweep.json"
    out_path = tmp_path / "sweep.csv"
    spec.write_text(json.dumps({"kind": "room_count", "values": [1, 2], "base": {"room_w": 5, "room_h": 5},
                                "output": str(out_path)}))
    code, out, _ = run(["sweep", "--spec", spec], capsys)
    assert code == 0 and out == ""
    assert len(out_path.read_text().splitlines()) == 3


def test_generate_round_trip(tmp_path, capsys):
    path = tmp_path / "g.json"
    code, _, _ = run(["generate", "grid", "--rows", 2, "--cols", 5, "--room-w", 4, "--room-h", 3, "-o", path],
                     capsys)
    assert code == 0
    fp = load_floorplan(path)
    assert fp.n_rooms == 10 and (fp.x, fp.y) == (20.0, 6.0)


def test_generate_winner(capsys):
    code, out, _ = run(["generate", "winner-a1"], capsys)
    assert code == 0 and len(json.loads(out)["rooms"]) == 42


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["evaluate"],
        ["frobnicate"],
        ["simulate", "x.json", "--links", "0"],
        ["simulate", "x.json", "--seed", "-1"],
        ["evaluate", "x.json", "--format", "xml"],
        ["sweep", "--kind", "grid_n_by_n"],
    ],
)
def test_usage_errors_exit_1(argv, capsys):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 1
    capsys.readouterr()


def test_tau_cdf_without_distance(grid_file, tmp_path, capsys):
    code, _, err = run(["simulate", grid_file, "--tau-cdf", tmp_path / "c.csv"], capsys)
    assert code == 1 and "--at-distance" in err


def test_input_errors_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run(["evaluate", bad], capsys)[0] == 2
    assert run(["evaluate", tmp_path / "missing.json"], capsys)[0] == 2
    overlap = tmp_path / "overlap.json"
    overlap.write_text(json.dumps({"outline": {"x": 10, "y": 10}, "tx_height": 4, "rx_height": 3, "rooms": [
        {"id": "a", "type": "office", "origin": [0, 0], "size": [6, 10]},
        {"id": "b", "type": "office", "origin": [4, 0], "size": [6, 10]}]}))
    code, _, err = run(["evaluate", overlap], capsys)
    assert code == 2 and "overlap" in err


def test_unknown_room_type_exit_2(capsys):
    assert run(["generate", "grid", "--rows", 1, "--cols", 1, "--room-w", 1, "--room-h", 1, "--type", "lab"],
               capsys)[0] == 2


def test_numeric_errors_exit_3(grid_file, capsys):
    assert run(["simulate", grid_file, "--links", 100, "--tau-cdf", "/dev/null", "--at-distance", 30],
               capsys)[0] == 3
    code, _, err = run(["simulate", grid_file, "--links", 100, "--tau-cdf", "/dev/null", "--at-distance", 40,
                        "--conditioned"], capsys)
    assert code == 3 and "numerical" in err


def test_params_override(grid_file, tmp_path, capsys):
    params = tmp_path / "p.json"
    params.write_text(json.dumps({"rows": [
        {"room_type": "office", "blockage": b, "k": 0.4, "B": 0.0, "sigma": 2.0, "n": 2.0, "C": 0.0, "sigma_s": 3.0}
        for b in ("LOS", "NLOS")]}))
    _, base, _ = run(["evaluate", grid_file], capsys)
    code, over, _ = run(["evaluate", grid_file, "--params", params], capsys)
    assert code == 0
    assert json.loads(over)["ds_gain"] != json.loads(base)["ds_gain"]


def test_module_entry_point(grid_file):
    proc = subprocess.run([sys.executable, "-m", "dsgain", "evaluate", str(grid_file), "--format", "csv"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.startswith("floorplan_id,")

import csv
import json

import pytest

from uvhom.cli import main
from uvhom.experiments import ExperimentSpec, LadderSpec, run_experiment
from uvhom.errors import InputError
from uvhom.generate import circle, discrete, generate, rational_circle
from uvhom.io import dump_json


def run(capsys, *argv):
    code = main(list(map(str, argv)))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def hexagon_csv(tmp_path, capsys):
    p = tmp_path / "hex.csv"
    assert run(capsys, "generate", "circle", "--param", "n=6", "--out", p)[0] == 0
    return p


def test_generator_examples():
    X = circle(6)
    assert abs(X.distances[0, 1] - 1.0) < 1e-12
    D = discrete(3).distances
    assert D.tolist() == [[0, 1, 1], [1, 0, 1], [1, 1, 0]]
    assert rational_circle(3).n == 4
    with pytest.raises(InputError):
        generate("circle", n=0)
    with pytest.raises(InputError):
        generate("sphere", n=3)


def test_ladder_spec_parsing():
    assert LadderSpec.parse("2:0.5:3").resolve(circle(4)) == [2, 1, 0.5]
    assert len(LadderSpec.parse("::").resolve(circle(4))) == 12
    with pytest.raises(InputError):
        LadderSpec.parse("1:2")
    with pytest.raises(InputError):
        LadderSpec.from_list("1,2")
    with pytest.raises(InputError):
        LadderSpec(ratio=1.2)


def test_tower_command_with_csv(tmp_path, capsys, hexagon_csv):
    csv_path = tmp_path / "t.csv"
    code, out, _ = run(capsys, "tower", "--input", hexagon_csv, "--scales", "2.1,1,0.4", "--csv", csv_path)
    assert code == 0
    rep = json.loads(out)
    assert [r["degrees"]["1"]["betti"] for r in rep["rungs"]] == [0, 1, 0]
    rows = list(csv.reader(open(csv_path)))
    assert rows[0] == ["scale", "degree", "betti"] and len(rows) == 7


def test_homology_of_complex_file(tmp_path, capsys):
    p = tmp_path / "rp2.cx"
    from oracles import RP2
    p.write_text("".join(" ".join(map(str, s)) + "\n" for s in RP2))
    code, out, _ = run(capsys, "homology", "--input", p, "--ring", "z")
    assert code == 0
    groups = json.loads(out)["groups"]
    assert groups["1"]["torsion"] == [2] and groups["0"]["betti"] == 1


def test_complex_export(tmp_path, capsys, hexagon_csv):
    out_cx = tmp_path / "x.cx"
    code, out, _ = run(capsys, "complex", "--input", hexagon_csv, "--scale", 1.0, "--export", out_cx)
    assert code == 0 and json.loads(out)["f_vector"] == [6, 12, 6]
    assert len(out_cx.read_text().splitlines()) == 6


def test_components_and_bounded(tmp_path, capsys):
    p = tmp_path / "line.csv"
    run(capsys, "generate", "line", "--param", "n=10", "--out", p)
    code, out, _ = run(capsys, "bounded", "--input", p, "--scale", 1)
    assert code == 0 and json.loads(out)["hu_bound_points"] == 11
    code, out, _ = run(capsys, "components", "--input", p, "--scale", 0.5)
    assert json.loads(out)["components"] == 11
    code, out, _ = run(capsys, "bounded", "--input", p, "--scale", 0.5, "--expect-bounded")
    assert code == 1


def test_excise_exit_codes(tmp_path, capsys):
    X = tmp_path / "c.csv"
    run(capsys, "generate", "circle", "--param", "n=40", "--out", X)
    (tmp_path / "a").write_text("\n".join(map(str, range(20))))
    (tmp_path / "b").write_text("\n".join(map(str, range(20, 40))))
    code, out, _ = run(capsys, "excise", "--input", X, "--A", tmp_path / "a", "--B", tmp_path / "b",
                       "--scales", "0.5,0.3,0.16")
    assert code == 1 and json.loads(out)["stages"][0]["ok"] is False


def test_homotopy_command(tmp_path, capsys, hexagon_csv):
    (tmp_path / "f.map").write_text("".join(f"{i} {i}\n" for i in range(6)))
    (tmp_path / "g.map").write_text("".join(f"{i} {(i + 1) % 6}\n" for i in range(6)))
    code, out, _ = run(capsys, "homotopy", "--input", hexagon_csv, "--f", tmp_path / "f.map",
                       "--g", tmp_path / "g.map", "--V", 2.0, "--scales", "1,0.4", "--degrees", "0,1")
    assert code == 0 and json.loads(out)["ok"]


def test_resolution_command(tmp_path, capsys, hexagon_csv):
    (tmp_path / "id.map").write_text("".join(f"{i} {i}\n" for i in range(6)))
    code, out, _ = run(capsys, "resolution", "--input", hexagon_csv, "--system", hexagon_csv,
                       "--cone", tmp_path / "id.map", "--scales", "1.5,1")
    assert code == 0 and json.loads(out)["ok"]


def test_input_errors_exit_2(tmp_path, capsys):
    assert run(capsys, "tower", "--input", tmp_path / "missing.csv")[0] == 2
    assert run(capsys, "tower")[0] == 2
    assert run(capsys, "generate", "circle", "--param", "n=-1")[0] == 2
    bad = tmp_path / "bad.rel"
    bad.write_text("0 z\n")
    code, _, err = run(capsys, "components", "--input", bad)
    assert code == 2 and "bad.rel:1" in err


def test_experiment_command_and_failure_exit(capsys, tmp_path):
    code, out, _ = run(capsys, "experiment", "discrete_additivity")
    assert code == 0 and json.loads(out)["passed"]
    # a ladder that never reaches the loop scale cannot show the degree-1 plateau
    code, out, _ = run(capsys, "experiment", "circle_h1", "--scales", "0.05,0.04,0.03")
    assert code == 1 and not json.loads(out)["passed"]


@pytest.mark.parametrize("name", ["circle_h1", "excision", "discrete_additivity", "line_boundedness"])
def test_bundles_are_byte_identical(name):
    spec = ExperimentSpec(name, seed=7)
    assert dump_json(run_experiment(spec)) == dump_json(run_experiment(ExperimentSpec(name, seed=7)))


def test_interval_is_contractible():
    bundle = run_experiment(ExperimentSpec("interval_contractible"))
    assert bundle["passed"]


def test_unknown_experiment():
    with pytest.raises(InputError):
        ExperimentSpec("nope")

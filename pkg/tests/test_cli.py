import json
from pathlib import Path

import pytest

from cywork import __version__
from cywork.cli import EXIT_INPUT, EXIT_OK, EXIT_VERDICT, main
from cywork.tiling import CHECK_LABEL

INPUTS = Path(__file__).resolve().parent.parent / "inputs"


def inp(name):
    return str(INPUTS / name)


T3 = ["--quiver", inp("torus3_quiver.json"), "--potential", inp("torus3_potential.json")]


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out else None), out


@pytest.mark.parametrize("argv, expected", [
    (["homology", "--input", inp("torus_simplicial.json")], EXIT_OK),
    (["cohomology", "--input", inp("torus_simplicial.json"), "--compact"], EXIT_OK),
    (["jacobi", *T3], EXIT_OK),
    (["ginzburg", *T3], EXIT_OK),
    (["dsq-check", *T3], EXIT_OK),
    (["witness", *T3], EXIT_OK),
    (["witness", "--quiver", inp("loop_quiver.json"), "--potential", inp("loop_potential.json")], EXIT_OK),
    (["hochschild", "--model", "torus", "--class", "all", "--radius", "1"], EXIT_OK),
    (["cyclic", "--model", "circle", "--degree", "2", "--radius", "4"], EXIT_OK),
    (["obstruction", "--model", "t3", "--radius", "1"], EXIT_OK),
    (["obstruction", "--model", "genus2", "--radius", "2"], EXIT_OK),
    (["hochschild", "--model", "klein"], EXIT_VERDICT),
    (["klein", "--char", "2", "--radius", "2"], EXIT_OK),
    (["tiling", "to-qp", "--contract"], EXIT_OK),
    (["weights", "--tiling", inp("genus2_tiling.json")], EXIT_OK),
    (["weights", "--qp", inp("genus2_modified_qp.json")], EXIT_VERDICT),
], ids=lambda v: " ".join(v[:2]) if isinstance(v, list) else None)
def test_exit_codes(capsys, argv, expected):
    code, report, _ = run(capsys, argv)
    assert code == expected
    assert report["ok"] == (expected == EXIT_OK)


def test_explicit_model_inputs(capsys):
    code, report, _ = run(capsys, ["hochschild", "--simplicial", inp("torus_simplicial.json"),
                                   "--group", inp("torus_group.json"), "--edges", inp("torus_edges.json")])
    assert code == EXIT_OK
    assert report["result"]["betti"] == [1, 2, 1]


def test_genus2_obstruction_verdict(capsys):
    _, report, _ = run(capsys, ["obstruction", "--model", "genus2", "--radius", "2"])
    assert report["result"]["verdict"] == "NO_WITNESS_FOUND(2)"


def test_klein_rational_names_error(capsys):
    _, report, _ = run(capsys, ["hochschild", "--model", "klein"])
    assert report["result"]["error"] == "NOT_ORIENTABLE"


@pytest.mark.parametrize("argv", [
    ["homology", "--input", inp("empty.json")],
    ["homology", "--input", inp("does_not_exist.json")],
    ["jacobi", "--quiver", inp("empty.json"), "--potential", inp("empty.json")],
])
def test_input_errors(capsys, argv):
    assert main(argv) == EXIT_INPUT
    captured = capsys.readouterr()
    assert captured.out == "" and "input error" in captured.err


def test_mutated_dga_is_rejected(capsys, tmp_path):
    _, report, _ = run(capsys, ["ginzburg", *T3])
    dga = report["result"]["dga"]
    for g in dga["generators"]:
        if g["name"] == "t":
            g["d"]["terms"] = g["d"]["terms"][:2]
    path = tmp_path / "dga.json"
    path.write_text(json.dumps(dga))
    code, report, _ = run(capsys, ["dsq-check", *T3, "--dga", str(path)])
    assert code == EXIT_VERDICT
    assert report["result"]["failing_generator"] == "t"


def test_output_is_byte_deterministic(capsys, tmp_path):
    argv = ["hochschild", "--model", "torus", "--class", "all", "--radius", "1"]
    outs = []
    for i in range(2):
        path = tmp_path / f"out{i}.json"
        assert main([*argv, "--output", str(path)]) == EXIT_OK
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_report_metadata(capsys):
    _, report, _ = run(capsys, ["hochschild", "--model", "genus2", "--class", "a1", "--radius", "3",
                                "--field", "fp:2"])
    assert report["version"] == __version__
    assert report["field"] == "F2"
    assert report["cutoffs"]["radius"] == 3
    assert report["flags"] == sorted(report["flags"])
    assert "TRUNCATED(3)" in report["flags"]


def test_tiling_label(capsys):
    _, report, _ = run(capsys, ["tiling", "to-qp", "--tiling", inp("genus2_tiling.json")])
    assert CHECK_LABEL in report["flags"] or report["result"].get("label") == CHECK_LABEL

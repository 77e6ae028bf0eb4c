import json

import pytest

from wms.cli import EXIT_BUDGET, EXIT_INPUT, EXIT_NOT_FOUND, EXIT_OK, main, split_top_level
from wms.families import half_graph, matching
from wms.logic import complete_graph, linear_order


@pytest.fixture
def files(tmp_path):
    def write(name, data):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return str(path)

    return {
        "half": write("half.json", half_graph(4).structure.to_json()),
        "matching": write("matching.json", matching(3).structure.to_json()),
        "k3": write("k3.json", complete_graph(3).to_json()),
        "chain": write("chain.json", linear_order(4).to_json()),
        "trivial": write("trivial.json", {"kind": "trivial"}),
        "half_ideal": write("fraction.json", {"kind": "fraction", "epsilon": "1/2"}),
        "bad_json": str(tmp_path / "bad.json"),
        "dir": tmp_path,
    }


def run(capsys, argv):
    code = main(argv)
    return code, capsys.readouterr().out


def test_split_top_level():
    assert split_top_level("E(x,y), x = y ,E(y,x)") == ["E(x,y)", "x = y", "E(y,x)"]


def test_eval_json_and_csv(capsys, files):
    code, out = run(capsys, ["eval", "--structure", files["k3"], "--formula", "E(x,#0)"])
    assert code == EXIT_OK and json.loads(out) == {"context": ["x"], "size": 2, "tuples": [[1], [2]]}
    code, out = run(capsys, ["eval", "--structure", files["k3"], "--formula", "E(x,#0)", "--out", "csv"])
    assert out.splitlines() == ["x", "1", "2"]


def test_order_found_and_not_found(capsys, files):
    common = ["--ideal", files["trivial"], "--phi", "E(x,y)"]
    code, out = run(capsys, ["order", "--structure", files["half"], *common, "--len", "4"])
    assert code == EXIT_OK and json.loads(out)["found"]
    code, out = run(capsys, ["order", "--structure", files["k3"], *common, "--len", "2"])
    assert code == EXIT_NOT_FOUND and json.loads(out) == {"found": False, "witness": None}


def test_wsop_and_wip(capsys, files):
    code, out = run(capsys, ["wsop", "--structure", files["chain"], "--ideal", files["trivial"], "--phi", "LEQ(x,y)", "--len", "3"])
    assert code == EXIT_OK and json.loads(out)["witness"]["b"] == [[0], [1], [2]]
    code, _ = run(capsys, ["wip", "--structure", files["k3"], "--ideal", files["trivial"], "--phi", "E(x,y)", "--len", "2"])
    assert code == EXIT_NOT_FOUND


def test_rank_types_divide(capsys, files):
    code, out = run(capsys, ["rank", "--structure", files["k3"], "--ideal", files["trivial"], "--phi", "E(x,y)", "--max", "4"])
    assert code == EXIT_OK and json.loads(out)["value"] == 1
    code, out = run(capsys, ["types", "--structure", files["k3"], "--ideal", files["trivial"]])
    assert code == EXIT_OK and json.loads(out)["total"] >= 1
    divide = ["divide", "--ideal", files["trivial"], "--psi", "E(x,y)", "--c", "0", "--k", "2", "--len", "3"]
    code, out = run(capsys, [*divide, "--structure", files["matching"]])
    assert code == EXIT_OK and json.loads(out)["witness"]["sequence"] == [[0], [1], [2]]
    code, _ = run(capsys, [*divide, "--structure", files["k3"]])
    assert code == EXIT_NOT_FOUND


def test_input_errors(capsys, files):
    assert main(["eval", "--structure", str(files["dir"] / "missing.json"), "--formula", "x=x"]) == EXIT_INPUT
    assert main(["eval", "--structure", files["k3"], "--formula", "R(x,y)", "--context", "x,y"]) == EXIT_INPUT
    assert main(["eval", "--structure", files["k3"], "--formula", "E(x,"]) == EXIT_INPUT
    with open(files["bad_json"], "w") as fh:
        fh.write("{not json")
    assert main(["rank", "--structure", files["k3"], "--ideal", files["bad_json"], "--phi", "E(x,y)", "--max", "2"]) == EXIT_INPUT
    assert main(["family", "ladder", "--n", "A..B"]) == EXIT_INPUT


def test_explicit_ladder_cap_is_a_budget_failure(capsys):
    assert main(["family", "ladder", "--n", "7", "--mode", "explicit"]) == EXIT_BUDGET


def test_budget_exit_code(capsys, files):
    argv = ["order", "--structure", files["half"], "--ideal", files["trivial"], "--phi", "E(x,y)", "--len", "4", "--budget", "2"]
    assert main(argv) == EXIT_BUDGET


def test_family_generate_round_trip(capsys, files):
    out_path = files["dir"] / "ladder.json"
    assert main(["family", "generate", "ladder_clique", "--param", "n=2", "--out", str(out_path)]) == EXIT_OK
    data = json.loads(out_path.read_text())
    assert data["universe"] == 8 and data["parts"]["u"] == [4, 6]
    code, out = run(capsys, ["eval", "--structure", str(out_path), "--formula", "E(#4,x)"])
    assert json.loads(out)["tuples"] == [[6], [7]]


def test_family_ladder_report(capsys, files):
    report = files["dir"] / "ladder.csv"
    code, out = run(capsys, ["family", "ladder", "--n", "4..6", "--mode", "cross_check", "--report", str(report)])
    assert code == EXIT_OK and report.read_text().startswith("n,row_sizes,prod,ratio,bound,pass")
    assert [row["n"] for row in json.loads(out)["rows"]] == [4, 5, 6]


SEARCHES = {
    "rank": ["rank", "--structure", "half", "--ideal", "trivial", "--phi", "E(x,y)", "--max", "5"],
    "order": ["order", "--structure", "half", "--ideal", "trivial", "--phi", "E(x,y)", "--len", "4"],
    "wip": ["wip", "--structure", "half", "--ideal", "trivial", "--phi", "E(x,y)", "--len", "2"],
    "wsop": ["wsop", "--structure", "chain", "--ideal", "trivial", "--phi", "LEQ(x,y)", "--len", "3"],
    "divide": ["divide", "--structure", "matching", "--ideal", "trivial", "--psi", "E(x,y)", "--c", "0", "--k", "2", "--len", "3"],
}


def resolve(argv, files):
    return [files.get(a, a) for a in argv]


@pytest.mark.parametrize("name", sorted(SEARCHES))
def test_search_output_is_worker_independent(capsys, files, name):
    argv = resolve(SEARCHES[name], files)
    outputs = set()
    for workers in ("1", "3"):
        code, out = run(capsys, [*argv, "--workers", workers])
        outputs.add((code, out))
    assert len(outputs) == 1


def test_type_counts_are_repeatable(capsys, files):
    argv = resolve(["types", "--structure", "half", "--ideal", "half_ideal", "--delta", "E(x,y)"], files)
    assert run(capsys, argv) == run(capsys, argv)

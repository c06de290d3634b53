import json

import pandas as pd
import pytest
import yaml

from psmodules.cli import Command, main, parse_input
from psmodules.config import EXIT_FOUND, EXIT_REFUTED, EXIT_UNKNOWN, EXIT_USAGE, SCHEMA_VERSION
from psmodules.refine import Instance

NOT_PS = [
    "refine", "--domain", "Z[w,-5]", "--module", "rank 1 gens [(1)]",
    "--a", "2", "--b", "1+w", "--x", "3", "--y", "1-w",
]


def run(capsys, *argv):
    code = main([*argv, "--json"])
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_refine_reports_missing_refinement(capsys):
    code, doc = run(capsys, *NOT_PS)
    assert code == EXIT_REFUTED
    assert doc["schema"] == SCHEMA_VERSION
    assert doc["command"] == "refine"
    assert doc["outcome"] == "not_refinable"
    assert [c["element"] for c in doc["candidates"]] == ["1"]


def test_refine_over_integers_finds_witness(capsys):
    code, doc = run(
        capsys, "refine", "--domain", "Z", "--module", "rank 2 gens [(1,0),(0,1)]",
        "--a", "4", "--b", "6", "--x", "(3,6)", "--y", "(2,4)",
    )
    assert code == EXIT_FOUND
    assert doc["outcome"] == "found"
    assert doc["refinement"]["c"] == "2"


def test_refine_methods_agree(capsys):
    codes = {}
    for method in ("criterion", "oracle"):
        codes[method], _ = run(capsys, *NOT_PS, "--method", method)
    assert codes == {"criterion": EXIT_REFUTED, "oracle": EXIT_REFUTED}


def test_reduce_lists_steps(capsys):
    code, doc = run(
        capsys, "reduce", "--domain", "Z", "--module", "rank 1 gens [(1)]",
        "--a", "4", "--b", "6", "--x", "3", "--y", "2",
    )
    assert code == EXIT_FOUND
    assert {"kind": "ab", "factor": "2"} in doc["reductions"]
    assert doc["reduced"]["a"] == "2"


def test_human_output_is_the_same_document(capsys):
    code = main(NOT_PS)
    out = capsys.readouterr().out
    assert code == EXIT_REFUTED
    assert "outcome: not_refinable" in out
    assert "schema: 1" in out


def test_principal(capsys):
    code, doc = run(capsys, "principal", "--domain", "Z[w,-5]", "--ideal", "[3, 1+w]")
    assert code == EXIT_REFUTED
    assert doc["principal"] is False
    assert doc["norm"] == 3

    code, doc = run(capsys, "principal", "--domain", "Z[w,-5]", "--ideal", "[2, 2w]")
    assert code == EXIT_FOUND
    assert doc["generator"] in ("2", "-2")


def test_colon_on_nonprincipal_ideal(capsys):
    code, doc = run(capsys, "colon", "--domain", "Z[w,-5]", "--module", "rank 1 gens [(1)]", "--a", "2", "--x", "1+w")
    assert code == EXIT_FOUND
    assert doc["principal"] is False
    assert "generator" not in doc


def test_saturate_and_dm(capsys):
    code, doc = run(capsys, "saturate", "--domain", "Z", "--ideal", "[12]", "--s", "2")
    assert code == EXIT_FOUND
    assert doc["steps"] >= 1

    code, doc = run(capsys, "dm-exponent", "--domain", "Z", "--f", "[2, 4]", "--g", "[3, 6]")
    assert code == EXIT_FOUND
    assert doc["m"] == 1 and doc["gauss_holds"] is True


def test_envelope_over_integers_is_stable(capsys):
    code, doc = run(
        capsys, "envelope", "--domain", "Z", "--module", "rank 1 gens [(2)]",
        "--ambient", "rank 1 gens [(1)]", "--norm-bound", "5",
    )
    assert code == EXIT_FOUND
    assert doc["stabilized"] is True and doc["steps"] == 0
    assert doc["bounds"]["norm_bound"] == 5


def test_atoms_and_split_check(capsys):
    code, doc = run(capsys, "atoms", "--domain", "Z[w,-3]", "--norm-bound", "4")
    assert code == EXIT_FOUND
    assert "2" in doc["generators"]

    code, doc = run(capsys, "split-check", "--domain", "Z", "--S", "[2]", "--primes", "[3, 5]")
    assert code == EXIT_FOUND
    assert doc["all_pass"] is True


def test_lcm(capsys):
    code, doc = run(capsys, "lcm", "--a", "4", "--b", "6", "--multiples", "[24, 36]")
    assert code == EXIT_FOUND
    assert doc["lcm"] == "12"

    code, _ = run(capsys, "lcm", "--a", "4", "--b", "6", "--multiples", "[18]")
    assert code == EXIT_USAGE


def test_classify_nonprincipal_ideal_module(capsys):
    code, doc = run(capsys, "classify", "--domain", "Z[w,-5]", "--module", "rank 1 gens [(2),(1+w)]", "--budget", "30", "--seed", "2")
    assert code == EXIT_REFUTED
    assert "refuted" in (doc["atomic"], doc["factorable"])


def test_sample_writes_csv(capsys, tmp_path):
    out = tmp_path / "sample.csv"
    code, doc = run(
        capsys, "sample", "--domain", "Z", "--module", "rank 2 gens [(1,0),(0,1)]",
        "--count", "20", "--seed", "3", "--norm-bound", "50", "--out", str(out),
    )
    assert code == EXIT_FOUND
    assert doc["count"] == 20
    assert doc["oracle_disagreements"] == 0
    assert len(pd.read_csv(out)) == 20


def test_paper_suite_filtered(capsys):
    code, doc = run(capsys, "paper-suite", "--filter", "colon", "--workers", "1")
    assert code == EXIT_FOUND
    assert doc["failed"] == []


def test_paper_suite_with_tampered_fixture(capsys, tmp_path):
    checks = [{"name": "lcm-wrong", "kind": "lcm", "a": 4, "b": 6, "multiples": "[12]", "expect": 24}]
    (tmp_path / "paper_suite.yaml").write_text(yaml.safe_dump({"checks": checks}))
    code, doc = run(capsys, "paper-suite", "--fixtures", str(tmp_path))
    assert code == EXIT_REFUTED
    assert doc["failed"]


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate"],
        ["principal", "--domain", "Z[w,-4]", "--ideal", "[2]"],
        ["principal", "--domain", "Z[w,-5]", "--ideal", "[3, 1+"],
        ["refine", "--domain", "Z", "--module", "rank 1 gens [(1)]", "--a", "2", "--b", "3", "--x", "3"],
        ["refine", "--domain", "Z", "--module", "rank 1 gens [(1)]", "--a", "2", "--b", "3", "--x", "1", "--y", "1"],
        ["colon", "--domain", "Z", "--module", "rank 1 gens [(2)]", "--a", "3", "--x", "5"],
    ],
)
def test_usage_errors_exit_3(capsys, argv):
    assert main(argv) == EXIT_USAGE
    assert capsys.readouterr().out == ""


def test_parse_input_builds_command():
    command = parse_input([*NOT_PS, "--json"])
    assert isinstance(command, Command)
    assert command.subcommand == "refine"
    assert command.output_mode == "json"
    assert isinstance(command.arguments["instance"], Instance)
    assert command.arguments["method"] == "criterion"


def test_sqrt5_sample_over_localized_module(capsys):
    code, doc = run(
        capsys, "sample", "--domain", "Z[w,-5]", "--module", "rank 1 gens [(1)] loc by [2]",
        "--count", "10", "--seed", "1", "--norm-bound", "40",
    )
    assert code in (EXIT_FOUND, EXIT_UNKNOWN)
    assert doc["count"] == 10

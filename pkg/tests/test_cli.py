"""Command-line behavior: output shapes, exit codes, determinism."""

import json
from pathlib import Path

import pytest

from onemotives.cli import main, parse_inline_spec
from onemotives.crystal import OneMotiveSpec, module_from_jsonable, module_to_jsonable

GOLDEN = Path(__file__).parent / "golden"


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_realize_kummer_json(capsys):
    code, out, _ = run_cli(
        capsys, "realize", "--p", "5", "--f", "1", "--lattice", "1", "--torus", "1"
    )
    assert code == 0
    obj = json.loads(out)
    assert obj["dim"] == 2
    assert obj["phi"]["entries"] == ["1/1", "0/1", "0/1", "5/1"]
    assert obj["weights"] == [[0, 1], [-2, 1]]
    assert obj["fil1"]["entries"] == ["0/1", "1/1"]


def test_realize_empty_spec_is_zero_module(capsys):
    code, out, _ = run_cli(capsys, "realize", "--p", "5", "--f", "1")
    assert code == 0
    assert json.loads(out)["dim"] == 0


def test_realize_hasse_violation_exits_2(capsys):
    code, _, err = run_cli(capsys, "realize", "--p", "5", "--f", "1", "--elliptic", "7")
    assert code == 2
    assert "t^2" in err


def test_realize_bad_prime_exits_2(capsys):
    code, _, err = run_cli(capsys, "realize", "--p", "6", "--f", "1", "--lattice", "1")
    assert code == 2
    assert "not prime" in err


def test_realize_json_roundtrip(capsys):
    code, out, _ = run_cli(
        capsys, "realize", "--p", "5", "--f", "1", "--lattice", "1", "--elliptic", "1"
    )
    assert code == 0
    obj = json.loads(out)
    module = module_from_jsonable(obj)
    assert module_to_jsonable(module) == obj


def test_end_kummer(capsys):
    code, out, _ = run_cli(capsys, "end", "--p", "5", "--f", "1", "--lattice", "1", "--torus", "1")
    assert code == 0
    obj = json.loads(out)
    assert obj["dimension"] == 2
    assert obj["classification"] == "lattice_scalars+torus_scalars"


def test_end_ordinary(capsys):
    code, out, _ = run_cli(
        capsys, "end", "--p", "5", "--f", "1", "--lattice", "1", "--elliptic", "1"
    )
    obj = json.loads(out)
    assert obj["dimension"] == 3
    assert obj["classification"].endswith("polynomial_algebra_of_phi")


def test_hom_motivic_direction(capsys):
    code, out, _ = run_cli(
        capsys, "hom", "--p", "5", "--f", "1", "--a", "torus:1", "--b", "elliptic:1"
    )
    assert code == 0
    assert json.loads(out)["dimension"] == 0


def test_hom_end_agreement(capsys):
    _, out, _ = run_cli(
        capsys, "hom", "--p", "5", "--f", "1",
        "--a", "lattice:1,torus:1", "--b", "lattice:1,torus:1",
    )
    assert json.loads(out)["dimension"] == 2


def test_spec_file(tmp_path, capsys):
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(
        json.dumps({"lattice_rank": 1, "elliptic_traces": [0]}), encoding="utf-8"
    )
    code, out, _ = run_cli(capsys, "end", "--p", "5", "--f", "1", "--spec", str(spec_path))
    assert code == 0
    assert json.loads(out)["dimension"] == 2


def test_survey_matches_golden_p5_f1(capsys):
    code, out, _ = run_cli(capsys, "survey", "--p", "5", "--f", "1")
    assert code == 0
    assert out == (GOLDEN / "survey_p5_f1.txt").read_text(encoding="utf-8")


def test_survey_matches_golden_p5_f2(capsys):
    code, out, _ = run_cli(capsys, "survey", "--p", "5", "--f", "2")
    assert code == 0
    assert out == (GOLDEN / "survey_p5_f2.txt").read_text(encoding="utf-8")


def test_survey_is_byte_stable(capsys):
    _, first, _ = run_cli(capsys, "survey", "--p", "5", "--f", "2")
    _, second, _ = run_cli(capsys, "survey", "--p", "5", "--f", "2")
    assert first == second


def test_survey_p2_rows(capsys):
    code, out, _ = run_cli(capsys, "survey", "--p", "2", "--f", "1", "--format", "json")
    assert code == 0
    rows = [json.loads(line) for line in out.splitlines()]
    assert [r["t"] for r in rows] == [-2, -1, 0, 1, 2]
    for r in rows:
        if r["ordinary"]:
            assert r["slopes"] == ["0", "1"]
            assert r["end_dim"] == 3
        else:
            assert r["slopes"] == ["1/2", "1/2"]
            assert r["end_dim"] == 2


def test_survey_json_scalar_jordan_rows(capsys):
    _, out, _ = run_cli(capsys, "survey", "--p", "5", "--f", "2", "--format", "json")
    rows = [json.loads(line) for line in out.splitlines()]
    by_key = {(r["t"], r["mode"]): r for r in rows}
    assert by_key[(10, "scalar")]["end_dim"] == 4
    assert by_key[(10, "scalar")]["class"] == "upper_triangular_full"
    assert by_key[(10, "jordan")]["end_dim"] == 3
    assert by_key[(-10, "auto")]["end_dim"] == 3
    assert len(rows) == 25


def test_motivic_hom_shift_vanishing(capsys):
    code, out, _ = run_cli(
        capsys, "motivic-hom", "--p", "5", "--f", "1",
        "--a", "lattice:1,torus:1@0", "--b", "lattice:1,torus:1@1",
    )
    assert code == 0
    assert json.loads(out)["dimension"] == 0


def test_motivic_hom_same_degree(capsys):
    code, out, _ = run_cli(
        capsys, "motivic-hom", "--p", "5", "--f", "1",
        "--a", "lattice:1,torus:1@0", "--b", "lattice:1,torus:1@0",
    )
    obj = json.loads(out)
    assert obj["dimension"] == 2
    assert obj["by_degree"] == {"0": 2}


def test_motivic_hom_empty(capsys):
    code, out, _ = run_cli(
        capsys, "motivic-hom", "--p", "5", "--f", "1", "--a", "", "--b", "lattice:1@0"
    )
    assert code == 0
    assert json.loads(out)["dimension"] == 0


def test_parse_inline_spec():
    spec = parse_inline_spec("lattice:2,torus:1,elliptic:3,elliptic:-1")
    assert spec == OneMotiveSpec(lattice_rank=2, torus_dim=1, elliptic_traces=(3, -1))
    with pytest.raises(ValueError):
        parse_inline_spec("gerbe:1")


def test_fil_mode_flag(capsys):
    code, out, _ = run_cli(
        capsys, "end", "--p", "5", "--f", "2",
        "--lattice", "1", "--elliptic", "10", "--fil-mode", "scalar",
    )
    assert code == 0
    assert json.loads(out)["dimension"] == 4
    code, _, _ = run_cli(
        capsys, "end", "--p", "5", "--f", "1",
        "--lattice", "1", "--elliptic", "1", "--fil-mode", "scalar",
    )
    assert code == 2


def test_spec_file_with_kummer_lambda(tmp_path, capsys):
    spec_path = tmp_path / "ext.json"
    spec_path.write_text(
        json.dumps({"lattice_rank": 1, "torus_dim": 1, "kummer_lambda": "3/1"}),
        encoding="utf-8",
    )
    code, out, _ = run_cli(capsys, "realize", "--p", "5", "--f", "1", "--spec", str(spec_path))
    assert code == 0
    obj = json.loads(out)
    assert obj["graded"] is False
    assert obj["phi"]["entries"] == ["1/1", "3/1", "0/1", "5/1"]
    code, out, _ = run_cli(capsys, "end", "--p", "5", "--f", "1", "--spec", str(spec_path))
    assert code == 0
    assert json.loads(out)["dimension"] == 1


def test_spec_file_with_abelian_explicit(tmp_path, capsys):
    spec_path = tmp_path / "ab.json"
    spec_path.write_text(
        json.dumps(
            {
                "lattice_rank": 1,
                "abelian_explicit": [
                    {
                        "phi": {"rows": 2, "cols": 2, "entries": ["0/1", "-5/1", "1/1", "1/1"]},
                        "fil1": {"rows": 2, "cols": 1, "entries": ["1/1", "0/1"]},
                    }
                ],
            }
        ),
        encoding="utf-8",
    )
    code, out, _ = run_cli(capsys, "realize", "--p", "5", "--f", "1", "--spec", str(spec_path))
    assert code == 0
    assert json.loads(out)["dim"] == 3


def test_missing_spec_file_exits_2(capsys):
    code, _, err = run_cli(capsys, "realize", "--p", "5", "--f", "1", "--spec", "/nonexistent.json")
    assert code == 2
    assert err


def test_end_table_format_prints_basis(capsys):
    code, out, _ = run_cli(
        capsys, "end", "--p", "5", "--f", "1", "--lattice", "1", "--torus", "1",
        "--format", "table",
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "end dimension: 2"
    assert lines[1] == "classification: lattice_scalars+torus_scalars"
    assert sum(1 for ln in lines if ln.startswith("basis[")) == 2

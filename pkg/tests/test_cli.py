import json

import pytest

from cantorspectra.cli import create_parser, main
from cantorspectra.config import THREADS_ENV
from cantorspectra.data import SCHEMA

GOLDEN_ANGLE = "(-1+sqrt(5))/2"


@pytest.fixture(autouse=True)
def clean_env(monkeypatch, tmp_path):
    monkeypatch.setenv("HOME", str(tmp_path))
    monkeypatch.delenv(THREADS_ENV, raising=False)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out) if out else None, err


def walk(value):
    yield value
    if isinstance(value, dict):
        for v in value.values():
            yield from walk(v)
    elif isinstance(value, list):
        for v in value:
            yield from walk(v)


def test_parser():
    parser = create_parser()
    args = parser.parse_args(["--max-degree", "3", "eigen", "-c", "fibonacci", "--alpha", "1", "--N", "12"])
    assert args.command == "eigen"
    assert args.max_field_degree == 3
    assert (args.catalog, args.alpha, args.N) == ("fibonacci", "1", 12)
    with pytest.raises(SystemExit):
        parser.parse_args(["eigen", "--alpha", "1"])
    with pytest.raises(SystemExit):
        parser.parse_args(["rational", "-c", "fibonacci", "-s", "x.json", "--frac", "1/2"])


def test_no_command(capsys):
    code, out, _ = run(capsys)
    assert code == 1
    assert "Examples:" in out


def test_catalog(capsys):
    code, data, _ = run_json(capsys, "catalog")
    assert code == 0
    assert data["schema"] == SCHEMA
    assert data["command"] == "catalog"
    names = [e["name"] for e in data["results"]["entries"]]
    assert "fibonacci" in names and "sec43" in names


class TestEigen:
    def test_golden_angle_passes(self, capsys):
        code, data, _ = run_json(capsys, "eigen", "--catalog", "fibonacci", "--alpha", GOLDEN_ANGLE, "--N", "30")
        assert code == 0
        assert data["results"]["verdict"] == "PassesUpTo(30)"
        criteria = data["results"]["criteria"]
        assert criteria["decomposition"]["w"] == [2, 1]
        assert criteria["orthogonality"]["2"] is True
        assert len(data["provenance"]) == 3

    def test_half_angle_refuted(self, capsys):
        code, data, _ = run_json(capsys, "eigen", "-c", "fibonacci", "--alpha", "(-1+sqrt(5))/4",
                                 "--expect", "refuted")
        assert code == 0
        assert data["results"]["verdict"] == "RefutedNecessary(orthogonality)"

    @pytest.mark.parametrize("extra", [(), ("--use-declared",)])
    def test_candidate_outside_field(self, capsys, extra):
        code, data, _ = run_json(capsys, "eigen", "-c", "fibonacci", "--alpha", "sqrt(2)",
                                 "--expect", "refuted", *extra)
        assert code == 0
        assert data["results"]["verdict"] == "RefutedNecessary(orthogonality)"

    def test_expectation_contradicted(self, capsys):
        code, data, _ = run_json(capsys, "eigen", "-c", "fibonacci", "--alpha", "1/2", "--expect", "eigen")
        assert code == 2
        assert data["results"]["verdict"] == "RefutedNecessary(rational-certified-non-member)"

    def test_declared(self, capsys):
        code, data, _ = run_json(capsys, "eigen", "-c", "fibonacci", "--alpha", GOLDEN_ANGLE, "--use-declared")
        assert data["results"]["verdict"] == "CertifiedEigen(declared-by-construction)"

    def test_alpha_in_named_field(self, capsys):
        code, data, _ = run_json(capsys, "eigen", "-c", "fibonacci", "--field", "x^2-x-1",
                                 "--alpha", "coords:[-1,1]@x^2-x-1", "--N", "20")
        assert code == 0
        assert data["results"]["verdict"] == "PassesUpTo(20)"

    def test_reports_are_byte_identical(self, capsys):
        argv = ("eigen", "-c", "fibonacci", "--alpha", GOLDEN_ANGLE, "--N", "20")
        _, first, _ = run(capsys, *argv)
        _, second, _ = run(capsys, *argv)
        assert first == second

    def test_no_floats_in_report(self, capsys):
        _, data, _ = run_json(capsys, "eigen", "-c", "fibonacci", "--alpha", GOLDEN_ANGLE, "--N", "20")
        assert not any(isinstance(v, float) for v in walk(data))


class TestRational:
    def test_third_in_dyadics(self, capsys):
        code, data, _ = run_json(capsys, "rational", "-c", "odometer2", "--frac", "1/3", "--expect", "non-member")
        assert code == 0
        assert data["results"]["verdict"] == "CertifiedNonMember"
        assert data["results"]["membership"]["cycle_length"] == 2

    def test_dyadic_member(self, capsys):
        code, data, _ = run_json(capsys, "rational", "-c", "odometer2", "--frac", "1/8")
        assert data["results"]["verdict"] == "MemberAtLevel(4)"
        assert data["results"]["membership"]["value"] == "exact:1/8"

    def test_bad_fraction(self, capsys):
        code, out, err = run(capsys, "rational", "-c", "odometer2", "--frac", "1/0")
        assert code == 1
        assert out == ""
        assert "ERROR: SpecFormatError" in err


class TestGroups:
    def test_golden_index_two(self, capsys):
        code, data, _ = run_json(capsys, "torsion", "--catalog", "sec43")
        assert code == 0
        assert data["results"]["quotient"]["torsion"] == "Z/2Z"
        assert data["results"]["torsion_order"] == 2

    def test_factorial_level(self, capsys):
        _, data, _ = run_json(capsys, "torsion", "--catalog", "sec42", "--level", "6")
        assert data["results"]["quotient"]["invariant_factors"] == [720]

    def test_explicit_generators(self, capsys):
        _, data, _ = run_json(capsys, "torsion", "--field", "x^2-5", "--igens", "1, (-1+sqrt(5))/2",
                              "--egens", "1, -1+sqrt(5)")
        assert data["results"]["torsion_order"] == 2
        assert data["results"]["I"]["rank"] == 2

    def test_missing_generators(self, capsys):
        code, _, err = run(capsys, "torsion", "--igens", "1")
        assert code == 1
        assert "ERROR: SpecFormatError" in err

    def test_tower_entry_is_not_a_group(self, capsys):
        code, _, err = run(capsys, "torsion", "--catalog", "fibonacci")
        assert code == 1
        assert "SpecFormatError" in err

    @pytest.mark.parametrize("ggens,expected", [(f"1, {GOLDEN_ANGLE}", True), ("1, -1+sqrt(5)", False)])
    def test_admissible(self, capsys, ggens, expected):
        code, data, _ = run_json(capsys, "admissible", "--catalog", "sec43", "--ggens", ggens)
        assert code == 0
        assert data["results"]["admissible"] is expected


class TestTowerCommands:
    def test_measures(self, capsys):
        code, data, _ = run_json(capsys, "measures", "-c", "fibonacci", "--level", "2")
        assert code == 0
        results = data["results"]
        assert results["ergodicity"]["verdict"] == "UniquelyErgodicCertified"
        assert results["perron_root"]["exact"]["minpoly"] == [1, -3, 1]
        assert results["measure"]["level"] == 2
        assert all(v.startswith("interval:[") for v in results["measure_approx"])
        assert results["enclosure"]["converged"] is True

    def test_measures_without_exact_field(self, capsys):
        code, data, _ = run_json(capsys, "measures", "-c", "sturmian-cf:1,1,2")
        assert code == 0
        assert "measure" not in data["results"]
        assert any(note.startswith("no exact measure") for note in data["provenance"])

    def test_invariants(self, capsys):
        code, data, _ = run_json(capsys, "invariants", "-c", "inf-demo")
        assert code == 0
        assert data["results"]["infinitesimals"]["verdict"] == "NonTrivial"
        assert data["results"]["infinitesimals"]["witness"] == [1, -1]

    def test_suffixes(self, capsys):
        code, data, _ = run_json(capsys, "suffixes", "-c", "fibonacci", "--level", "1",
                                 "--alpha", GOLDEN_ANGLE, "--N", "10")
        assert code == 0
        first = data["results"]["suffix_vectors"]["per_vertex"][0]
        assert first["tails"] == [[2, 1], [1, 1], [1, 0], [0, 0]]
        assert sorted(data["results"]["suffix_criterion"]["deltas"], key=int) == [str(n) for n in range(1, 11)]

    def test_suffixes_from_spec_file(self, capsys, tmp_path):
        path = tmp_path / "tower.json"
        path.write_text(json.dumps({"kind": "stationary", "matrix": [[2, 1], [1, 1]]}))
        code, data, _ = run_json(capsys, "suffixes", "--spec", str(path), "--level", "2")
        assert code == 0
        assert data["results"]["suffix_vectors"]["level"] == 2

    def test_spec_file_not_utf8(self, capsys, tmp_path):
        path = tmp_path / "spec.json"
        path.write_bytes(b"\xff\xfe{}")
        code, _, err = run(capsys, "suffixes", "--spec", str(path))
        assert code == 1
        assert "ERROR: SpecFormatError" in err

    def test_missing_spec_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "suffixes", "--spec", str(tmp_path / "absent.json"))
        assert code == 1
        assert "ERROR: SpecFormatError" in err

    def test_diagnostic(self, capsys):
        code, data, _ = run_json(capsys, "diagnostic", "-c", "fibonacci", "--m", "1", "--N", "20")
        assert code == 0
        assert len(data["results"]["diagnostic"]["terms"]) == 19

    def test_audit_independent_of_threads(self, capsys, monkeypatch):
        argv = ("audit", "-c", "fibonacci", "--m", "1", "--N", "25", "--wbox", "4", "--kmax", "5")
        outputs = []
        for threads in ("1", "4", "4", "1"):
            monkeypatch.setenv(THREADS_ENV, threads)
            code, out, _ = run(capsys, *argv)
            assert code == 0
            outputs.append(out)
        single = outputs[0]
        assert all(out == single for out in outputs)
        assert json.loads(single)["results"]["flag_count"] == 0


class TestGlobalOptions:
    def test_text_format(self, capsys):
        code, out, _ = run(capsys, "--format", "text", "catalog")
        assert code == 0
        assert f"schema: {SCHEMA}" in out

    def test_output_file(self, capsys, tmp_path):
        target = tmp_path / "report.json"
        code, out, _ = run(capsys, "--output", str(target), "rational", "-c", "odometer2", "--frac", "1/2")
        assert code == 0
        assert out == ""
        _, expected, _ = run(capsys, "rational", "-c", "odometer2", "--frac", "1/2")
        assert target.read_text() == expected

    def test_invalid_configuration(self, capsys):
        code, _, err = run(capsys, "--bits", "8", "catalog")
        assert code == 1
        assert "ERROR: CantorSpectraException" in err

    def test_timing(self, capsys):
        _, data, _ = run_json(capsys, "--timing", "catalog")
        assert data["timing"]["seconds"] >= 0

    def test_version(self, capsys):
        with pytest.raises(SystemExit):
            main(["--version"])
        assert "cantorspectra" in capsys.readouterr().out

    def test_directory_config(self, capsys, monkeypatch, tmp_path):
        (tmp_path / ".cantorspectra_config.json").write_text(json.dumps({"format": "text"}))
        monkeypatch.chdir(tmp_path)
        _, out, _ = run(capsys, "catalog")
        assert f"schema: {SCHEMA}" in out
        _, data, _ = run_json(capsys, "--config-level", "global", "catalog")
        assert data["schema"] == SCHEMA

    def test_config_levels(self):
        parser = create_parser()
        assert parser.parse_args(["catalog"]).config_level == "directory"
        with pytest.raises(SystemExit):
            parser.parse_args(["--config-level", "file", "catalog"])

import json
from dataclasses import dataclass
from fractions import Fraction

import pytest

from cantorspectra.data import SCHEMA, SpectraReport, encode
from cantorspectra.exactnum import RATIONALS, IntervalReal, quadratic_field
from cantorspectra.intlattice import QLattice, quotient_invariants
from cantorspectra.operations.spectra import PASSES, Verdict


@dataclass
class Sample:
    name: str
    value: Fraction
    parts: tuple


class TestEncode:
    def test_scalars(self):
        assert encode(None) is None
        assert encode(True) is True
        assert encode(7) == 7
        assert encode(Fraction(1, 2)) == "exact:1/2"
        assert encode(RATIONALS.from_rational(Fraction(3, 4))) == "exact:3/4"

    def test_irrational_element(self):
        data = encode(quadratic_field(2).theta(), digits=10)
        assert data["exact"]["coords"] == ["0", "1"]
        assert data["approx"] == "interval:[1.4142135623,1.4142135624]"

    def test_interval_and_verdict(self):
        assert encode(IntervalReal(Fraction(1, 4), Fraction(1, 2)), digits=2) == "interval:[0.25,0.50]"
        assert encode(Verdict(PASSES, depth=12)) == "PassesUpTo(12)"

    def test_quotient(self):
        q = quotient_invariants(QLattice([(2, 0), (0, 2)]), QLattice([(1, 0), (0, 1)]))
        assert encode(q) == {
            "invariant_factors": [2, 2],
            "free_rank": 0,
            "torsion": "Z/2Z + Z/2Z",
            "torsion_free": False,
        }

    def test_nested(self):
        data = encode(Sample("x", Fraction(2, 3), (1, Fraction(1, 3))))
        assert data == {"name": "x", "value": "exact:2/3", "parts": [1, "exact:1/3"]}
        assert encode({1: [Fraction(1)]}) == {"1": ["exact:1"]}


class TestReport:
    def make(self):
        report = SpectraReport(command="eigen", version="0.1.0", config={"m": 2, "eps": "1/1000"})
        report.add_result("verdict", Verdict(PASSES, depth=30))
        report.add_result("values", [Fraction(1, 2), Fraction(1, 3)])
        report.add_note("orthogonality is exact")
        report.add_note("orthogonality is exact")
        return report

    def test_structure(self):
        report = self.make()
        assert report.get_schema() == SCHEMA
        assert report.get_command() == "eigen"
        assert report.get_result("verdict") == "PassesUpTo(30)"
        assert report.get_notes() == ["orthogonality is exact"]

    def test_json_is_deterministic(self):
        first, second = self.make().to_json(), self.make().to_json()
        assert first == second
        assert first.endswith("\n")
        assert list(json.loads(first)) == sorted(json.loads(first))

    def test_text_rendering(self):
        text = self.make().to_text()
        assert f"schema: {SCHEMA}" in text
        assert "verdict: PassesUpTo(30)" in text
        assert "values: [exact:1/2, exact:1/3]" in text

    def test_file_roundtrip(self, tmp_path):
        path = tmp_path / "report.json"
        assert self.make().save_to_file(str(path))
        loaded = SpectraReport.from_file(str(path))
        assert loaded.to_json() == self.make().to_json()

    def test_from_file_rejects(self, tmp_path):
        other = tmp_path / "other.json"
        other.write_text(json.dumps({"schema": "something-else"}))
        with pytest.raises(ValueError):
            SpectraReport.from_file(str(other))
        broken = tmp_path / "broken.json"
        broken.write_text("[")
        with pytest.raises(ValueError):
            SpectraReport.from_file(str(broken))

    def test_save_failure(self, tmp_path):
        assert not self.make().save_to_file(str(tmp_path / "missing" / "report.json"))

"""
Report data for cantorspectra runs.
"""

import json
import dataclasses
from fractions import Fraction
from typing import Any, Dict, List

from .exactnum import FieldElement, IntervalReal, NumberField
from .intlattice import QLattice, QuotientInvariants

SCHEMA = "cantor-spectra/1"


def encode(value: Any, digits: int = 30) -> Any:
    """
    Convert results into JSON-ready data. Every rational carries an
    "exact:" tag and every enclosure an "interval:[lo,hi]" tag.
    """
    # late import: operations depend on this module's siblings
    from .operations.dimgroup import SubgroupOfR
    from .operations.spectra import Verdict

    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return f"exact:{value}"
    if isinstance(value, FieldElement):
        if value.is_rational():
            return f"exact:{value.coords[0]}"
        return {"exact": value.to_json(), "approx": value.enclosure(4 * digits + 8).to_str(digits)}
    if isinstance(value, IntervalReal):
        return value.to_str(digits)
    if isinstance(value, NumberField):
        return value.to_json()
    if isinstance(value, Verdict):
        return value.describe()
    if isinstance(value, QuotientInvariants):
        return {
            "invariant_factors": list(value.invariant_factors),
            "free_rank": value.free_rank,
            "torsion": value.describe(),
            "torsion_free": value.is_torsion_free,
        }
    if isinstance(value, QLattice):
        return {"rank": value.rank, "hnf_basis": [[f"exact:{x}" for x in row] for row in value.hnf_basis]}
    if isinstance(value, SubgroupOfR):
        return {
            "field": value.field.to_json(),
            "rank": value.lattice.rank,
            "basis": [encode(b, digits) for b in value.basis_elements()],
            "generators": [encode(g, digits) for g in value.generators_display],
        }
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {f.name: encode(getattr(value, f.name), digits) for f in dataclasses.fields(value)}
    if isinstance(value, dict):
        return {str(k): encode(v, digits) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [encode(v, digits) for v in value]
    return str(value)


class SpectraReport:
    """
    Abstract Data Type (ADT) for a cantorspectra report.

    Wraps the report dictionary so that commands only add results and
    notes; serialization is byte-deterministic for a fixed configuration.
    """

    def __init__(self, data=None, command=None, version=None, config=None, digits=30):
        """
        Initialize with existing data or create a new report structure.

        Args:
            data (dict, optional): Existing report data. If None, creates a new structure.
            command (str, optional): Command that produced the report.
            version (str, optional): Tool version.
            config (dict, optional): Configuration echo.
            digits (int): Decimal digits for interval tags.
        """
        self.digits = digits
        if data is None:
            self.data = {
                "schema": SCHEMA,
                "tool_version": version,
                "command": command,
                "config": dict(config or {}),
                "results": {},
                "provenance": [],
            }
        else:
            self.data = data

    # Getters and setters
    def get_schema(self):
        return self.data.get("schema")

    def get_command(self):
        return self.data.get("command")

    def get_results(self) -> Dict[str, Any]:
        return self.data.get("results", {})

    def get_result(self, key, default=None):
        return self.get_results().get(key, default)

    def add_result(self, key, value):
        """Store an encoded result under key."""
        self.data["results"][key] = encode(value, self.digits)

    def add_note(self, note: str):
        """Provenance note (which checks are exact and which are interval bounds)."""
        if note not in self.data["provenance"]:
            self.data["provenance"].append(note)

    def get_notes(self) -> List[str]:
        return list(self.data.get("provenance", []))

    def set_timing(self, seconds: float):
        self.data["timing"] = {"seconds": round(seconds, 6)}

    # I/O operations
    def to_dict(self):
        return self.data

    def to_json(self) -> str:
        return json.dumps(self.data, sort_keys=True, indent=2) + "\n"

    def to_text(self) -> str:
        lines = []
        _render(self.data, 0, lines)
        return "\n".join(lines) + "\n"

    def render(self, fmt: str = "json") -> str:
        return self.to_text() if fmt == "text" else self.to_json()

    @classmethod
    def from_file(cls, file_path):
        """
        Load a report from a JSON file.

        Raises:
            ValueError: If the file is not a cantorspectra report.
        """
        try:
            with open(file_path, 'r', encoding='utf-8') as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ValueError(f"Error reading report {file_path}: {str(e)}")
        if not isinstance(data, dict) or data.get("schema") != SCHEMA:
            raise ValueError(f"Not a {SCHEMA} report: {file_path}")
        return cls(data)

    def save_to_file(self, file_path, fmt: str = "json") -> bool:
        try:
            with open(file_path, 'w', encoding='utf-8') as f:
                f.write(self.render(fmt))
            return True
        except OSError as e:
            print(f"Error saving report {file_path}: {str(e)}")
            return False


def _render(value, indent, lines, key=None):
    pad = "  " * indent
    prefix = f"{pad}{key}: " if key is not None else pad
    if isinstance(value, dict):
        if key is not None:
            lines.append(f"{pad}{key}:")
            indent += 1
        for k in sorted(value):
            _render(value[k], indent, lines, k)
    elif isinstance(value, list) and any(isinstance(v, (dict, list)) for v in value):
        if key is not None:
            lines.append(f"{pad}{key}:")
        for item in value:
            _render(item, indent + 1, lines, "-")
    elif isinstance(value, list):
        lines.append(f"{prefix}[{', '.join(str(v) for v in value)}]")
    else:
        lines.append(f"{prefix}{value}")

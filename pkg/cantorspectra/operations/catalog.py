"""
Built-in example systems.

Tower entries build a DiagramSpec; group entries carry only the
subgroups I and E of R needed by the torsion commands.
"""

import re
import math
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Tuple

from ..exceptions import SpecFormatError
from ..exactnum import RATIONALS, field_from_string, parse_element
from .dimgroup import SubgroupOfR, subgroup_from_generators
from .tower import DiagramSpec, stationary_spec, sturmian_spec

logger = logging.getLogger(__name__)

TOWER = "tower"
GROUP = "group"

FACTORIAL_DEFAULT_LEVEL = 6


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    kind: str
    description: str
    declared: Tuple[str, ...] = ()
    aliases: Tuple[str, ...] = ()
    spec_factory: Optional[Callable[[], DiagramSpec]] = None
    groups_factory: Optional[Callable[[Optional[int]], Tuple[SubgroupOfR, SubgroupOfR]]] = None

    def spec(self) -> DiagramSpec:
        if self.spec_factory is None:
            raise SpecFormatError(f"Catalog entry {self.name!r} is group-level data, not a tower")
        return self.spec_factory()

    def groups(self, level: Optional[int] = None) -> Tuple[SubgroupOfR, SubgroupOfR]:
        """(I, E) for group-level entries."""
        if self.groups_factory is None:
            raise SpecFormatError(f"Catalog entry {self.name!r} has no group-level data")
        return self.groups_factory(level)

    def declared_group(self) -> Optional[SubgroupOfR]:
        """Eigenvalues known by construction (e.g. 1 and the Sturmian angle)."""
        if not self.declared:
            return None
        elements = [parse_element(text) for text in self.declared]
        field_ = next((e.field for e in elements if not e.is_rational()), RATIONALS)
        return subgroup_from_generators(field_, elements)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "description": self.description,
            "declared_eigenvalues": list(self.declared),
            "aliases": list(self.aliases),
        }


def _factorial_groups(level: Optional[int]) -> Tuple[SubgroupOfR, SubgroupOfR]:
    # I approximated by (1/k!)Z at level k, E = Z
    k = FACTORIAL_DEFAULT_LEVEL if level is None else level
    if k < 1:
        raise SpecFormatError(f"sec42 level must be >= 1, got {k}")
    one = RATIONALS.one()
    I = subgroup_from_generators(RATIONALS, [RATIONALS.from_rational(Fraction(1, math.factorial(k)))])
    E = subgroup_from_generators(RATIONALS, [one])
    return I, E


def _golden_index_groups(level: Optional[int]) -> Tuple[SubgroupOfR, SubgroupOfR]:
    # I = Z + alpha Z, E = Z + 2 alpha Z with alpha the golden angle
    field_ = field_from_string("x^2-5")
    alpha = parse_element("(-1+sqrt(5))/2", field_)
    I = subgroup_from_generators(field_, [field_.one(), alpha])
    E = subgroup_from_generators(field_, [field_.one(), alpha * 2])
    return I, E


_ENTRIES = [
    CatalogEntry("fibonacci", TOWER, "Sturmian system of the golden angle (cf 1,1,1,...)",
                 declared=("1", "(-1+sqrt(5))/2"), spec_factory=lambda: sturmian_spec((1,))),
    CatalogEntry("silver", TOWER, "Sturmian system with partial quotients 2,2,2,... (angle 1-sqrt(2)/2)",
                 declared=("1", "(2-sqrt(2))/2"), spec_factory=lambda: sturmian_spec((2,))),
    CatalogEntry("odometer2", TOWER, "Dyadic odometer, stationary [[2]]",
                 spec_factory=lambda: stationary_spec(((2,),))),
    CatalogEntry("odometer3", TOWER, "Triadic odometer, stationary [[3]]",
                 spec_factory=lambda: stationary_spec(((3,),))),
    CatalogEntry("inf-demo", TOWER, "Stationary [[3,1],[1,3]] with nontrivial infinitesimals",
                 spec_factory=lambda: stationary_spec(((3, 1), (1, 3)))),
    CatalogEntry("sec42", GROUP, "Field Q: I approximated by (1/k!)Z at level k, E = Z; I/E is torsion",
                 aliases=("rational-factorial",), groups_factory=_factorial_groups),
    CatalogEntry("sec43", GROUP, "Field Q(sqrt 5): I = Z + alpha Z, E = Z + 2 alpha Z; I/E = Z/2Z",
                 aliases=("golden-index2",), groups_factory=_golden_index_groups),
]

_PATTERNS = [
    ("sturmian-cf:<list>", "Sturmian system with periodic partial quotients, e.g. sturmian-cf:1,2"),
    ("odometer<d>", "Stationary odometer [[d]] for any d >= 2"),
]

_ODOMETER_RE = re.compile(r"^odometer(\d+)$")
_STURMIAN_RE = re.compile(r"^sturmian-cf:([\d,\s]+)$")


def catalog() -> List[CatalogEntry]:
    return list(_ENTRIES)


def catalog_listing() -> List[dict]:
    listing = [entry.to_dict() for entry in _ENTRIES]
    listing += [{"name": name, "kind": TOWER, "description": text,
                 "declared_eigenvalues": [], "aliases": []}
                for name, text in _PATTERNS]
    return listing


def lookup(name: str) -> CatalogEntry:
    for entry in _ENTRIES:
        if name == entry.name or name in entry.aliases:
            return entry
    m = _ODOMETER_RE.match(name)
    if m:
        d = int(m.group(1))
        if d < 2:
            raise SpecFormatError(f"Odometer base must be >= 2, got {d}")
        return CatalogEntry(name, TOWER, f"Stationary odometer [[{d}]]",
                            spec_factory=lambda: stationary_spec(((d,),)))
    m = _STURMIAN_RE.match(name)
    if m:
        cf = tuple(int(a) for a in m.group(1).split(",") if a.strip())
        return CatalogEntry(name, TOWER, f"Sturmian system with partial quotients {list(cf)}",
                            spec_factory=lambda: sturmian_spec(cf))
    raise SpecFormatError(f"Unknown catalog entry {name!r}")

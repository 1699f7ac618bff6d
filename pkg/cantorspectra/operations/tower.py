"""
Kakutani-Rohlin tower sequences.

A Tower is the incidence data of a nested sequence of tower partitions:
matrices M_n (C_n x C_{n-1}) with M_1 the all-ones column, Vershik orders
on the incoming edges of every vertex, and cached heights H_n and products
P_{n,m} = M_n ... M_{m+1}.
"""

import os
import sys
import json
import logging
import threading
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from ..exceptions import TowerError, SpecFormatError
from ..intlattice import (
    IntMatrix, IntVector, as_int_matrix, identity, is_positive, mat_mul, mat_vec
)

VERBOSE = os.environ.get('CANTOR_SPECTRA_VERBOSE', '0') == '1'
logger = logging.getLogger(__name__)

DEFAULT_TELESCOPE_BOUND = 10

SPEC_KINDS = ("stationary", "explicit", "sturmian", "odometer")

# Per level: for each vertex, the ordered tuple of source vertices of its edges
Orders = Tuple[Tuple[int, ...], ...]


def debug_print(message):
    """Print debug messages if VERBOSE is enabled"""
    if VERBOSE:
        print(f"DEBUG: {message}", file=sys.stderr)
        logger.debug(message)


def default_order(M: IntMatrix) -> Orders:
    """Sources in increasing vertex index, each repeated by its multiplicity."""
    return tuple(tuple(k for k, count in enumerate(row) for _ in range(count)) for row in M)


def compose_orders(upper: Orders, lower: Orders) -> Orders:
    """Order of a composed level: each upper edge expands into the lower edge list of its source."""
    return tuple(tuple(s for k in row for s in lower[k]) for row in upper)


def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _check_order(M: IntMatrix, vertex: int, sources: Sequence[int], level) -> None:
    if not 0 <= vertex < len(M):
        raise TowerError(f"Order for vertex {vertex} at level {level}: no such vertex")
    expected = Counter({k: c for k, c in enumerate(M[vertex]) if c})
    if Counter(sources) != expected:
        raise TowerError(
            f"Order {list(sources)} for vertex {vertex} at level {level} "
            f"is inconsistent with matrix row {list(M[vertex])}")


@dataclass
class DiagramSpec:
    """
    Input description of a tower sequence.

    Raw levels are numbered from 2: `matrices[0]` is M_2. Order entries are
    {"level": n, "vertex": l, "sources": [k, ...]} with 0-based vertices;
    an entry without "level" applies to every level.
    """
    kind: str
    matrix: Optional[IntMatrix] = None
    matrices: Optional[List[IntMatrix]] = None
    cf: Optional[Tuple[int, ...]] = None
    bases: Optional[Tuple[int, ...]] = None
    m1: Optional[IntMatrix] = None
    orders: List[dict] = field(default_factory=list)

    def validate(self) -> "DiagramSpec":
        if self.kind not in SPEC_KINDS:
            raise TowerError(f"Unknown diagram kind {self.kind!r}; expected one of {SPEC_KINDS}")
        if self.kind == "stationary":
            if not self.matrix:
                raise TowerError("Stationary spec needs a matrix")
            if any(len(row) != len(self.matrix) for row in self.matrix):
                raise TowerError("Stationary matrix must be square")
            self._check_nonnegative(self.matrix)
        elif self.kind == "explicit":
            if not self.matrices:
                raise TowerError("Explicit spec needs at least one matrix")
            for M in self.matrices:
                if not M or not M[0]:
                    raise TowerError("Explicit spec contains an empty matrix")
                self._check_nonnegative(M)
            for lower, upper in zip(self.matrices, self.matrices[1:]):
                if len(upper[0]) != len(lower):
                    raise TowerError(
                        f"Consecutive matrices do not compose: {len(upper[0])} columns "
                        f"above {len(lower)} rows")
            if self.m1 is not None:
                if any(len(row) != 1 or row[0] != 1 for row in self.m1):
                    raise TowerError("First-level matrix must be the all-ones column (h_1 = 1)")
                if len(self.m1) != len(self.matrices[0][0]):
                    raise TowerError("First-level matrix does not match the width of M_2")
        elif self.kind == "sturmian":
            if not self.cf:
                raise TowerError("Continued fraction list is empty")
            if any(a < 1 for a in self.cf):
                raise TowerError("Continued fraction entries must be >= 1")
        elif self.kind == "odometer":
            if not self.bases:
                raise TowerError("Odometer spec needs at least one base")
            if any(b < 2 for b in self.bases):
                raise TowerError("Odometer bases must be >= 2")
        for entry in self.orders:
            if not isinstance(entry, dict):
                raise SpecFormatError(f"Order entry {entry!r} must be an object")
            if "vertex" not in entry or "sources" not in entry:
                raise TowerError(f"Order entry {entry} needs 'vertex' and 'sources'")
            level = entry.get("level")
            if not _is_int(entry["vertex"]) or not (level is None or _is_int(level)):
                raise SpecFormatError(f"Order entry {entry} needs integer 'vertex' and 'level'")
            sources = entry["sources"]
            if not isinstance(sources, (list, tuple)) or not all(_is_int(k) for k in sources):
                raise SpecFormatError(f"Order entry {entry} needs a list of integer 'sources'")
            if level is not None and level < 2:
                raise TowerError(f"Order entry {entry} refers to level < 2")
        return self

    @staticmethod
    def _check_nonnegative(M: IntMatrix) -> None:
        if any(x < 0 for row in M for x in row):
            raise TowerError("Incidence matrices must have nonnegative entries")

    @property
    def raw_levels(self) -> Optional[int]:
        """Highest raw level the spec defines (None for periodic kinds)."""
        if self.kind == "explicit":
            return len(self.matrices) + 1
        if self.kind == "odometer":
            return len(self.bases) + 1
        return None

    @property
    def period(self) -> Optional[int]:
        """Period of the raw matrix sequence when periodic by construction."""
        if self.kind == "stationary":
            return 1
        if self.kind == "sturmian":
            return len(self.cf)
        return None

    def first_width(self) -> int:
        return len(self.raw_matrix(2)[0])

    def raw_matrix(self, n: int) -> IntMatrix:
        if n < 2:
            raise TowerError(f"Raw level {n} < 2")
        if self.raw_levels is not None and n > self.raw_levels:
            raise TowerError(f"Spec defines levels up to {self.raw_levels}, level {n} requested")
        if self.kind == "stationary":
            return self.matrix
        if self.kind == "explicit":
            return self.matrices[n - 2]
        if self.kind == "sturmian":
            a = self.cf[(n - 2) % len(self.cf)]
            return ((a, 1), (1, 0))
        return ((self.bases[n - 2],),)

    def raw_order(self, n: int, M: IntMatrix) -> Orders:
        overrides = {}
        for entry in self.orders:
            if entry.get("level") in (None, n):
                overrides[int(entry["vertex"])] = tuple(int(k) for k in entry["sources"])
        order = list(default_order(M))
        for vertex, sources in overrides.items():
            _check_order(M, vertex, sources, n)
            order[vertex] = sources
        return tuple(order)

    @classmethod
    def from_dict(cls, data: dict) -> "DiagramSpec":
        if not isinstance(data, dict) or "kind" not in data:
            raise SpecFormatError("Diagram spec must be a JSON object with a 'kind' key")
        try:
            spec = cls(
                kind=data["kind"],
                matrix=as_int_matrix(data["matrix"]) if "matrix" in data else None,
                matrices=[as_int_matrix(M) for M in data["matrices"]] if "matrices" in data else None,
                cf=tuple(int(a) for a in data["cf"]) if "cf" in data else None,
                bases=tuple(int(b) for b in data["bases"]) if "bases" in data else None,
                m1=as_int_matrix(data["m1"]) if "m1" in data else None,
                orders=list(data.get("orders", [])),
            )
        except (TypeError, ValueError) as e:
            raise SpecFormatError(f"Malformed diagram spec: {e}")
        return spec.validate()

    def to_dict(self) -> dict:
        data = {"kind": self.kind}
        if self.matrix is not None:
            data["matrix"] = [list(r) for r in self.matrix]
        if self.matrices is not None:
            data["matrices"] = [[list(r) for r in M] for M in self.matrices]
        if self.cf is not None:
            data["cf"] = list(self.cf)
        if self.bases is not None:
            data["bases"] = list(self.bases)
        if self.m1 is not None:
            data["m1"] = [list(r) for r in self.m1]
        if self.orders:
            data["orders"] = self.orders
        return data


def load_spec(path: str) -> DiagramSpec:
    """Read a DiagramSpec JSON file."""
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise SpecFormatError(f"Invalid JSON in spec file {path}: {e}")
    except UnicodeDecodeError as e:
        raise SpecFormatError(f"Spec file {path} is not UTF-8 text: {e}")
    except OSError as e:
        raise SpecFormatError(f"Cannot read spec file {path}: {e}")
    return DiagramSpec.from_dict(data)


def stationary_spec(matrix: Sequence[Sequence[int]], orders: Optional[List[dict]] = None) -> DiagramSpec:
    return DiagramSpec(kind="stationary", matrix=as_int_matrix(matrix), orders=orders or []).validate()


def explicit_spec(matrices: Sequence[Sequence[Sequence[int]]],
                  orders: Optional[List[dict]] = None) -> DiagramSpec:
    return DiagramSpec(kind="explicit", matrices=[as_int_matrix(M) for M in matrices],
                       orders=orders or []).validate()


def sturmian_spec(cf: Sequence[int]) -> DiagramSpec:
    """
    Continued-fraction model: level matrices [[a_n, 1], [1, 0]] with the
    partial quotients read periodically. A constant expansion is stationary.
    """
    cf = tuple(int(a) for a in cf)
    if not cf:
        raise TowerError("Continued fraction list is empty")
    if len(set(cf)) == 1:
        return stationary_spec(((cf[0], 1), (1, 0)))
    return DiagramSpec(kind="sturmian", cf=cf).validate()


def odometer_spec(bases: Sequence[int]) -> DiagramSpec:
    return DiagramSpec(kind="odometer", bases=tuple(int(b) for b in bases)).validate()


@dataclass(frozen=True)
class SuffixSet:
    """Tail-count vectors per vertex l at level n+1, full row first, zero vector last."""
    level: int
    vectors: Tuple[Tuple[IntVector, ...], ...]

    def attained(self, vertex: int) -> Tuple[IntVector, ...]:
        """Suffix vectors realized by points (the full-row tail never is)."""
        return self.vectors[vertex][1:]

    def all_attained(self) -> Tuple[IntVector, ...]:
        seen = []
        for l in range(len(self.vectors)):
            for s in self.attained(l):
                if s not in seen:
                    seen.append(s)
        return tuple(seen)


@dataclass(frozen=True)
class TowerPath:
    """
    A point at finite resolution: the tower `vertex` at level n and the
    0-based edge positions chosen at levels n, n-1, ..., 2.
    """
    vertex: int
    edges: Tuple[int, ...]

    @property
    def level(self) -> int:
        return len(self.edges) + 1


class Tower:
    """
    Validated tower sequence with cached heights and products.

    `matrices[n-1]` is M_n, `orders[n-1]` the Vershik order at level n and
    `composition[n-1]` the range of raw spec levels composed into level n.
    """

    def __init__(self, matrices: Sequence[IntMatrix], orders: Sequence[Orders],
                 composition: Sequence[Tuple[int, int]], spec: Optional[DiagramSpec] = None):
        self.matrices: Tuple[IntMatrix, ...] = tuple(as_int_matrix(M) for M in matrices)
        self.orders: Tuple[Orders, ...] = tuple(orders)
        self.composition: Tuple[Tuple[int, int], ...] = tuple(composition)
        self.spec = spec
        self._heights: List[IntVector] = []
        self._products: Dict[Tuple[int, int], IntMatrix] = {}
        # measures and other results computed from this tower
        self.derived: Dict[tuple, object] = {}
        self._lock = threading.Lock()
        self._validate()

    def _validate(self):
        if len(self.matrices) < 2:
            raise TowerError("A tower needs at least 2 levels")
        if any(row != (1,) for row in self.matrices[0]):
            raise TowerError("M_1 must be the all-ones column")
        for n in range(2, self.levels + 1):
            M = self.matrix(n)
            if len(M[0]) != len(self.matrix(n - 1)):
                raise TowerError(f"M_{n} has {len(M[0])} columns, level {n - 1} has {len(self.matrix(n - 1))} vertices")
            if not is_positive(M):
                raise TowerError(f"M_{n} has a zero entry")
            for vertex, sources in enumerate(self.order(n)):
                _check_order(M, vertex, sources, n)

    def __repr__(self):
        return f"Tower(levels={self.levels}, widths={list(self.widths)})"

    @property
    def levels(self) -> int:
        return len(self.matrices)

    @property
    def widths(self) -> Tuple[int, ...]:
        return tuple(len(M) for M in self.matrices)

    def _check_level(self, n: int, low: int = 1) -> None:
        if not low <= n <= self.levels:
            raise TowerError(f"Level {n} out of range [{low}, {self.levels}]")

    def width(self, n: int) -> int:
        self._check_level(n)
        return len(self.matrices[n - 1])

    def matrix(self, n: int) -> IntMatrix:
        self._check_level(n)
        return self.matrices[n - 1]

    def order(self, n: int) -> Orders:
        self._check_level(n)
        return self.orders[n - 1]

    @property
    def stationary_matrix(self) -> Optional[IntMatrix]:
        """B when M_n = B for every n >= 2."""
        first = self.matrices[1]
        if any(M != first for M in self.matrices[2:]):
            return None
        if self.levels < 3 and not (self.spec is not None and self.spec.kind == "stationary"):
            return None
        return first

    @property
    def is_stationary(self) -> bool:
        return self.stationary_matrix is not None

    def period(self) -> Optional[Tuple[int, int]]:
        """
        (start, p) such that M_{n+p} = M_n for all n >= start, certified from
        the construction: a periodic spec telescoped deterministically repeats
        once the raw phase at a level start repeats.
        """
        if self.is_stationary:
            return 2, 1
        raw_period = self.spec.period if self.spec is not None else None
        if raw_period is None:
            return None
        seen = {}
        for n in range(2, self.levels + 1):
            phase = (self.composition[n - 1][0] - 2) % raw_period
            if phase in seen:
                return seen[phase], n - seen[phase]
            seen[phase] = n
        return None

    def heights(self, n: int) -> IntVector:
        """H_n, with H_1 the all-ones vector."""
        self._check_level(n)
        if len(self._heights) < n:
            with self._lock:
                if not self._heights:
                    self._heights.append(tuple(1 for _ in range(self.width(1))))
                while len(self._heights) < n:
                    k = len(self._heights) + 1
                    self._heights.append(mat_vec(self.matrix(k), self._heights[-1]))
        return self._heights[n - 1]

    def products(self, n: int, m: int) -> IntMatrix:
        """P_{n,m} = M_n ... M_{m+1}; the identity when m == n."""
        self._check_level(n)
        self._check_level(m)
        if m > n:
            raise TowerError(f"P_{{{n},{m}}} needs m <= n")
        if m == n:
            return identity(self.width(n))
        key = (n, m)
        cached = self._products.get(key)
        if cached is not None:
            return cached
        P = self.matrix(n) if n == m + 1 else mat_mul(self.matrix(n), self.products(n - 1, m))
        if mat_vec(P, self.heights(m)) != self.heights(n):
            raise TowerError(f"P_{{{n},{m}}} H_{m} != H_{n}")
        self._products[key] = P
        return P

    def to_dict(self) -> dict:
        return {
            "levels": self.levels,
            "widths": list(self.widths),
            "composition": [list(c) for c in self.composition],
            "stationary_matrix": ([list(r) for r in self.stationary_matrix]
                                  if self.is_stationary else None),
        }


def build_tower(spec: DiagramSpec, levels: int,
                telescope_bound: int = DEFAULT_TELESCOPE_BOUND) -> Tower:
    """
    Unroll a spec to `levels` levels. Raw levels with a zero entry are
    composed with the following ones (at most `telescope_bound` at a time)
    until the product is strictly positive.
    """
    spec.validate()
    if levels < 2:
        raise TowerError(f"levels must be >= 2, got {levels}")
    c1 = spec.first_width()
    matrices: List[IntMatrix] = [tuple((1,) for _ in range(c1))]
    orders: List[Orders] = [tuple((0,) for _ in range(c1))]
    composition: List[Tuple[int, int]] = [(1, 1)]

    raw = 2
    while len(matrices) < levels:
        start = raw
        M = spec.raw_matrix(raw)
        order = spec.raw_order(raw, M)
        while not is_positive(M):
            if raw - start + 1 >= telescope_bound:
                raise TowerError(
                    f"Positivity unreachable: levels {start}..{raw} compose to a matrix with zero entries")
            if spec.raw_levels is not None and raw + 1 > spec.raw_levels:
                raise TowerError(
                    f"Positivity unreachable within the {spec.raw_levels} levels of the spec")
            raw += 1
            upper = spec.raw_matrix(raw)
            M = mat_mul(upper, M)
            order = compose_orders(spec.raw_order(raw, upper), order)
        if raw > start:
            debug_print(f"level {len(matrices) + 1}: composed raw levels {start}..{raw}")
        matrices.append(M)
        orders.append(order)
        composition.append((start, raw))
        raw += 1

    tower = Tower(matrices, orders, composition, spec)
    logger.debug(f"built tower with widths {tower.widths}")
    return tower


def telescope(t: Tower, cuts: Sequence[int]) -> Tower:
    """Keep the levels in `cuts`; new M_i = P_{cuts[i-1], cuts[i-2]}."""
    cuts = list(cuts)
    if not cuts:
        raise TowerError("Telescoping needs a nonempty cut list")
    if cuts[0] != 1:
        raise TowerError("Cuts must start at level 1")
    if any(b <= a for a, b in zip(cuts, cuts[1:])):
        raise TowerError(f"Cuts {cuts} are not strictly increasing")
    if cuts[-1] > t.levels:
        raise TowerError(f"Cut {cuts[-1]} beyond the tower's {t.levels} levels")
    if len(cuts) < 2:
        raise TowerError("Telescoping must keep at least 2 levels")

    matrices = [t.matrix(1)]
    orders = [t.order(1)]
    composition = [t.composition[0]]
    for lower, upper in zip(cuts, cuts[1:]):
        matrices.append(t.products(upper, lower))
        order = t.order(lower + 1)
        for n in range(lower + 2, upper + 1):
            order = compose_orders(t.order(n), order)
        orders.append(order)
        composition.append((t.composition[lower][0], t.composition[upper - 1][1]))
    spec = t.spec if len(set(b - a for a, b in zip(cuts, cuts[1:]))) == 1 else None
    return Tower(matrices, orders, composition, spec)


def heights(t: Tower, n: int) -> IntVector:
    return t.heights(n)


def products(t: Tower, n: int, m: int) -> IntMatrix:
    return t.products(n, m)


def suffix_vectors(t: Tower, n: int) -> SuffixSet:
    """Tail counts s^(j)_k = #{i > j : k_i = k}, j = 0..q, for every vertex at level n+1."""
    if not 1 <= n < t.levels:
        raise TowerError(f"Suffix level {n} out of range [1, {t.levels - 1}]")
    width = t.width(n)
    per_vertex = []
    for sources in t.order(n + 1):
        counts = [0] * width
        for k in sources:
            counts[k] += 1
        tails = [tuple(counts)]
        for k in sources:
            counts[k] -= 1
            tail = tuple(counts)
            if tail not in tails:
                tails.append(tail)
        per_vertex.append(tuple(tails))
    return SuffixSet(n, tuple(per_vertex))


def path_vertices(t: Tower, path: TowerPath) -> List[int]:
    """Vertices visited by the path, indexed by level (entry 0 unused)."""
    n = path.level
    t._check_level(n)
    if not 0 <= path.vertex < t.width(n):
        raise TowerError(f"Vertex {path.vertex} does not exist at level {n}")
    vertices = [0] * (n + 1)
    vertices[n] = path.vertex
    for level, e in zip(range(n, 1, -1), path.edges):
        sources = t.order(level)[vertices[level]]
        if not 0 <= e < len(sources):
            raise TowerError(f"Edge position {e} invalid at level {level} (vertex has {len(sources)} edges)")
        vertices[level - 1] = sources[e]
    return vertices


def suffix_of_path(t: Tower, path: TowerPath, k: int) -> IntVector:
    """s_k of the point described by the path, for 1 <= k < path level."""
    n = path.level
    if not 1 <= k < n:
        raise TowerError(f"Suffix index {k} out of range [1, {n - 1}]")
    vertices = path_vertices(t, path)
    edge = {level: e for level, e in zip(range(n, 1, -1), path.edges)}
    sources = t.order(k + 1)[vertices[k + 1]]
    p = edge[k + 1]
    in_base = all(edge[j] == 0 for j in range(2, k + 1))
    if in_base and p == 0:
        start = len(sources)
    elif in_base:
        start = p
    else:
        start = p + 1
    counts = [0] * t.width(k)
    for source in sources[start:]:
        counts[source] += 1
    return tuple(counts)


def path_height(t: Tower, path: TowerPath) -> int:
    """Height of the point above the base of its level-n tower."""
    vertices = path_vertices(t, path)
    n = path.level
    height = 0
    for level, e in zip(range(n, 1, -1), path.edges):
        sources = t.order(level)[vertices[level]]
        below = t.heights(level - 1)
        height += sum(below[s] for s in sources[:e])
    return height


def enumerate_paths(t: Tower, n: int) -> List[TowerPath]:
    """All level-n paths (one per level-1 sub-column), bottom to top within each tower."""
    paths = []

    def walk(level, vertex, prefix, top):
        if level == 1:
            paths.append(TowerPath(top, tuple(prefix)))
            return
        for e, source in enumerate(t.order(level)[vertex]):
            walk(level - 1, source, prefix + [e], top)

    for top in range(t.width(n)):
        walk(n, top, [], top)
    return paths

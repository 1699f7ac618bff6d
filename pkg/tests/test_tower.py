import json

import pytest

from cantorspectra.exceptions import SpecFormatError, TowerError
from cantorspectra.intlattice import identity, mat_vec
from cantorspectra.operations.tower import (
    DiagramSpec,
    TowerPath,
    build_tower,
    enumerate_paths,
    explicit_spec,
    load_spec,
    odometer_spec,
    path_height,
    path_vertices,
    stationary_spec,
    sturmian_spec,
    suffix_of_path,
    suffix_vectors,
    telescope,
)


class TestBuild:
    def test_fibonacci_is_telescoped_to_positive(self, fibonacci):
        assert fibonacci.matrix(2) == ((2, 1), (1, 1))
        assert fibonacci.composition[1] == (2, 3)
        assert fibonacci.matrix(1) == ((1,), (1,))
        assert fibonacci.is_stationary
        assert fibonacci.period() == (2, 1)

    def test_fibonacci_heights(self, fibonacci):
        assert fibonacci.heights(1) == (1, 1)
        assert fibonacci.heights(2) == (3, 2)
        assert fibonacci.heights(3) == (8, 5)
        for n in range(2, fibonacci.levels + 1):
            assert fibonacci.heights(n) == mat_vec(fibonacci.matrix(n), fibonacci.heights(n - 1))

    def test_products(self, fibonacci):
        assert fibonacci.products(5, 5) == identity(2)
        P = fibonacci.products(7, 3)
        assert mat_vec(P, fibonacci.heights(3)) == fibonacci.heights(7)
        with pytest.raises(TowerError):
            fibonacci.products(3, 7)

    def test_level_range(self, fibonacci):
        with pytest.raises(TowerError):
            fibonacci.heights(fibonacci.levels + 1)
        with pytest.raises(TowerError):
            fibonacci.matrix(0)

    def test_odometer_spec(self):
        t = build_tower(odometer_spec([2, 3, 2]), 4)
        assert [t.heights(n) for n in range(1, 5)] == [(1,), (2,), (6,), (12,)]
        assert not t.is_stationary
        assert t.period() is None
        with pytest.raises(TowerError):
            build_tower(odometer_spec([2, 3, 2]), 5)

    def test_periodic_sturmian(self):
        t = build_tower(sturmian_spec((1, 1, 2)), 12)
        assert not t.is_stationary
        assert t.period() == (2, 3)
        assert t.matrix(5) == t.matrix(2)

    def test_constant_sturmian_is_stationary(self):
        spec = sturmian_spec((1, 2))
        assert spec.kind == "sturmian"
        t = build_tower(spec, 6)
        assert t.is_stationary
        assert t.matrix(2) == ((3, 2), (1, 1))
        assert sturmian_spec((3,)).kind == "stationary"

    def test_positivity_unreachable(self):
        with pytest.raises(TowerError):
            build_tower(stationary_spec([[1, 0], [0, 1]]), 4)

    def test_telescope_bound(self):
        t = build_tower(stationary_spec([[1, 1, 1], [1, 0, 0], [0, 1, 0]]), 4)
        assert all(x > 0 for row in t.matrix(2) for x in row)
        assert t.composition[1] == (2, 4)
        with pytest.raises(TowerError):
            build_tower(stationary_spec([[1, 1, 1], [1, 0, 0], [0, 1, 0]]), 4, telescope_bound=2)

    def test_explicit_must_compose(self):
        with pytest.raises(TowerError):
            explicit_spec([[[1, 1]], [[1, 1], [1, 1]]])

    def test_negative_entries(self):
        with pytest.raises(TowerError):
            stationary_spec([[1, -1], [1, 1]])

    def test_order_override_must_match_row(self):
        with pytest.raises(TowerError):
            build_tower(stationary_spec([[2, 1], [1, 1]], orders=[{"vertex": 0, "sources": [0, 1]}]), 3)


class TestSpecFiles:
    def test_from_dict_errors(self):
        with pytest.raises(SpecFormatError):
            DiagramSpec.from_dict({"matrix": [[1]]})
        with pytest.raises(SpecFormatError):
            DiagramSpec.from_dict({"kind": "stationary", "matrix": [["a"]]})
        with pytest.raises(TowerError):
            DiagramSpec.from_dict({"kind": "stationary"})
        with pytest.raises(TowerError):
            DiagramSpec.from_dict({"kind": "substitution", "matrix": [[1]]})

    def test_load_roundtrip(self, tmp_path):
        spec = stationary_spec([[2, 1], [1, 1]], orders=[{"vertex": 0, "sources": [1, 0, 0]}])
        path = tmp_path / "spec.json"
        path.write_text(json.dumps(spec.to_dict()))
        loaded = load_spec(str(path))
        assert loaded.to_dict() == spec.to_dict()
        t = build_tower(loaded, 3)
        assert t.order(2)[0] == (1, 0, 0)

    def test_load_bad_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(SpecFormatError):
            load_spec(str(path))
        with pytest.raises(SpecFormatError):
            load_spec(str(tmp_path / "missing.json"))

    def test_load_non_utf8(self, tmp_path):
        path = tmp_path / "latin1.json"
        path.write_bytes(b'{"kind": "stationary", "matrix": [[1]], "note": "\xe9"}')
        with pytest.raises(SpecFormatError):
            load_spec(str(path))

    @pytest.mark.parametrize("entry", [
        {"level": "2", "vertex": 0, "sources": [0, 1]},
        {"level": 2.5, "vertex": 0, "sources": [0, 1]},
        {"vertex": "0", "sources": [0, 1]},
        {"vertex": 0, "sources": "01"},
        ["vertex", 0],
    ])
    def test_malformed_order_entries(self, entry):
        with pytest.raises(SpecFormatError):
            DiagramSpec.from_dict({"kind": "stationary", "matrix": [[1, 1], [1, 0]], "orders": [entry]})


class TestTelescope:
    def test_cuts(self, fibonacci):
        t = telescope(fibonacci, [1, 2, 4, 6])
        assert t.levels == 4
        assert t.matrix(3) == fibonacci.products(4, 2)
        assert t.heights(3) == fibonacci.heights(4)
        assert t.heights(4) == fibonacci.heights(6)
        assert not t.is_stationary
        assert t.spec is None

    def test_bad_cuts(self, fibonacci):
        with pytest.raises(TowerError):
            telescope(fibonacci, [2, 3])
        with pytest.raises(TowerError):
            telescope(fibonacci, [1, 3, 3])
        with pytest.raises(TowerError):
            telescope(fibonacci, [1, fibonacci.levels + 1])


class TestSuffixes:
    def test_fibonacci_level_one(self, fibonacci):
        assert fibonacci.order(2) == ((0, 1, 0), (0, 1))
        s = suffix_vectors(fibonacci, 1)
        assert s.vectors[0] == ((2, 1), (1, 1), (1, 0), (0, 0))
        assert s.attained(1) == ((0, 1), (0, 0))
        assert set(s.all_attained()) == {(1, 1), (1, 0), (0, 0), (0, 1)}

    def test_suffix_level_range(self, fibonacci):
        with pytest.raises(TowerError):
            suffix_vectors(fibonacci, fibonacci.levels)

    @pytest.mark.parametrize("n", [1, 2])
    def test_paths_realize_exactly_the_attained_vectors(self, small_explicit, n):
        paths = enumerate_paths(small_explicit, 3)
        from_paths = {suffix_of_path(small_explicit, p, n) for p in paths}
        assert from_paths == set(suffix_vectors(small_explicit, n).all_attained())

    def test_path_count_matches_heights(self, small_explicit):
        paths = enumerate_paths(small_explicit, 3)
        assert len(paths) == sum(small_explicit.heights(3))
        heights = sorted((p.vertex, path_height(small_explicit, p)) for p in paths)
        expected = sorted((l, h) for l, top in enumerate(small_explicit.heights(3)) for h in range(top))
        assert heights == expected

    def test_invalid_path(self, small_explicit):
        with pytest.raises(TowerError):
            path_vertices(small_explicit, TowerPath(0, (5, 0)))
        with pytest.raises(TowerError):
            path_vertices(small_explicit, TowerPath(7, (0, 0)))


def test_tower_to_dict(fibonacci):
    data = fibonacci.to_dict()
    assert data["levels"] == 40
    assert data["stationary_matrix"] == [[2, 1], [1, 1]]
    assert data["widths"][:2] == [2, 2]

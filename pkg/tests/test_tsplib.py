import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from islandea import (TspInstance, TsplibParseError, edge_weight,
                      known_optimum, parse_file, parse_instance,
                      register_optimum)

MINIMAL_EUC = """\
NAME : tiny3
TYPE : TSP
DIMENSION : 3
EDGE_WEIGHT_TYPE : EUC_2D
NODE_COORD_SECTION
1 0 0
2 0 1
3 1 0
EOF
"""


def make_text(dimension, coords, metric="EUC_2D", name="test"):
    lines = [f"NAME : {name}", "TYPE : TSP", f"DIMENSION : {dimension}",
             f"EDGE_WEIGHT_TYPE : {metric}", "NODE_COORD_SECTION"]
    for i, (x, y) in enumerate(coords, start=1):
        lines.append(f"{i} {x} {y}")
    lines.append("EOF")
    return "\n".join(lines)


class TestParsing:
    def test_minimal_instance(self):
        inst = parse_instance(MINIMAL_EUC)
        assert inst.name == "tiny3"
        assert inst.dimension == 3
        assert inst.metric == "EUC_2D"
        assert np.allclose(inst.coords, [[0, 0], [0, 1], [1, 0]])

    def test_unknown_keywords_ignored(self):
        text = MINIMAL_EUC.replace("TYPE : TSP",
                                   "TYPE : TSP\nCOMMENT : whatever\nBOGUS_KEY : 7")
        inst = parse_instance(text)
        assert inst.dimension == 3

    def test_eof_terminates(self):
        text = MINIMAL_EUC + "garbage that would not parse\n"
        inst = parse_instance(text)
        assert inst.dimension == 3

    def test_missing_eof_accepted(self):
        inst = parse_instance(MINIMAL_EUC.replace("EOF\n", ""))
        assert inst.dimension == 3

    def test_coordinate_count_mismatch(self):
        text = make_text(4, [(0, 0), (0, 1), (1, 0)])
        with pytest.raises(TsplibParseError, match="coordinate lines"):
            parse_instance(text)

    def test_duplicate_index(self):
        bad = MINIMAL_EUC.replace("3 1 0", "2 1 0")
        with pytest.raises(TsplibParseError, match="duplicate"):
            parse_instance(bad)

    def test_unsupported_edge_weight_type(self):
        bad = MINIMAL_EUC.replace("EUC_2D", "MAX_2D")
        with pytest.raises(TsplibParseError, match="EDGE_WEIGHT_TYPE"):
            parse_instance(bad)

    def test_missing_dimension_before_section(self):
        bad = "\n".join(["NAME : x", "EDGE_WEIGHT_TYPE : EUC_2D",
                         "NODE_COORD_SECTION", "1 0 0", "EOF"])
        with pytest.raises(TsplibParseError, match="DIMENSION"):
            parse_instance(bad)

    def test_error_carries_line_number(self):
        bad = MINIMAL_EUC.replace("2 0 1", "2 zero one")
        with pytest.raises(TsplibParseError) as exc:
            parse_instance(bad)
        assert exc.value.line_no == 7
        assert exc.value.fieldname == "NODE_COORD_SECTION"

    def test_pcb442_shaped_header(self):
        # same header shape as the pcb442 benchmark file
        rng = np.random.default_rng(42)
        coords = rng.integers(0, 5000, size=(442, 2))
        text = make_text(442, coords.tolist(), name="pcb442-shaped")
        inst = parse_instance(text)
        assert inst.dimension == 442
        assert inst.metric == "EUC_2D"

    def test_dimension_below_three_rejected(self):
        text = make_text(2, [(0, 0), (1, 1)])
        with pytest.raises(TsplibParseError, match="DIMENSION"):
            parse_instance(text)

    def test_atsp_rejected(self):
        bad = MINIMAL_EUC.replace("TYPE : TSP", "TYPE : ATSP")
        with pytest.raises(TsplibParseError, match="TYPE"):
            parse_instance(bad)

    def test_parse_file_uses_stem(self, tmp_path):
        path = tmp_path / "mystery.tsp"
        path.write_text(MINIMAL_EUC.replace("NAME : tiny3\n", ""))
        inst = parse_file(path)
        assert inst.name == "mystery"

    def test_header_round_trip(self):
        inst = parse_instance(MINIMAL_EUC)
        reparsed = parse_instance("\n".join(
            inst.header_lines()
            + ["NODE_COORD_SECTION", "1 0 0", "2 0 1", "3 1 0", "EOF"]))
        assert reparsed.name == inst.name
        assert reparsed.dimension == inst.dimension
        assert reparsed.metric == inst.metric

    def test_explicit_full_matrix(self):
        text = "\n".join([
            "NAME : m3", "TYPE : TSP", "DIMENSION : 3",
            "EDGE_WEIGHT_TYPE : EXPLICIT", "EDGE_WEIGHT_FORMAT : FULL_MATRIX",
            "EDGE_WEIGHT_SECTION",
            "0 2 9", "2 0 4", "9 4 0", "EOF"])
        inst = parse_instance(text)
        assert inst.metric == "EXPLICIT"
        assert edge_weight(inst, 0, 2) == 9
        assert edge_weight(inst, 2, 1) == 4

    def test_explicit_asymmetric_rejected(self):
        text = "\n".join([
            "NAME : m3", "DIMENSION : 3",
            "EDGE_WEIGHT_TYPE : EXPLICIT", "EDGE_WEIGHT_FORMAT : FULL_MATRIX",
            "EDGE_WEIGHT_SECTION",
            "0 2 9", "3 0 4", "9 4 0", "EOF"])
        with pytest.raises(TsplibParseError, match="symmetric"):
            parse_instance(text)


class TestEdgeWeights:
    def test_euc_345_triangle(self):
        inst = parse_instance(make_text(3, [(0, 0), (3, 4), (10, 10)]))
        assert edge_weight(inst, 0, 1) == 5

    def test_euc_nint_rule(self):
        # sqrt(2) = 1.41421... rounds down under nint
        inst = parse_instance(make_text(3, [(0, 0), (1, 1), (9, 9)]))
        assert edge_weight(inst, 0, 1) == 1

    def test_ceil_rule(self):
        inst = parse_instance(make_text(3, [(0, 0), (1, 1), (9, 9)],
                                        metric="CEIL_2D"))
        assert edge_weight(inst, 0, 1) == 2

    def test_nint_half_boundary(self):
        # distance exactly 2.5 rounds up: floor(2.5 + 0.5) = 3
        inst = parse_instance(make_text(3, [(0.0, 0.0), (2.5, 0.0), (9, 9)]))
        assert edge_weight(inst, 0, 1) == 3

    def test_att_reference_definition(self):
        coords = [(0.0, 0.0), (10.0, 0.0), (50.0, 50.0)]
        inst = parse_instance(make_text(3, coords, metric="ATT"))
        # r = sqrt(100/10) = 3.1622..; nint(r) = 3 < r so weight is 4
        assert edge_weight(inst, 0, 1) == 4

    def test_geo_matches_high_precision_reference(self):
        # independent evaluation of the reference formula with mpmath
        import mpmath
        coords = [(48.15, 11.35), (52.31, 13.25), (41.54, 12.29)]
        inst = parse_instance(make_text(3, coords, metric="GEO"))

        def ref_rad(v):
            deg = math.floor(v + 0.5)
            return mpmath.mpf("3.141592") * (deg + mpmath.mpf(5) * (mpmath.mpf(repr(v)) - deg) / 3) / 180

        def ref_dist(a, b):
            la, lo = ref_rad(coords[a][0]), ref_rad(coords[a][1])
            lb, lob = ref_rad(coords[b][0]), ref_rad(coords[b][1])
            q1 = mpmath.cos(lo - lob)
            q2 = mpmath.cos(la - lb)
            q3 = mpmath.cos(la + lb)
            return int(mpmath.mpf("6378.388")
                       * mpmath.acos(0.5 * ((1 + q1) * q2 - (1 - q1) * q3)) + 1)

        for a in range(3):
            for b in range(3):
                if a != b:
                    assert edge_weight(inst, a, b) == ref_dist(a, b)

    def test_index_out_of_range(self, tiny_instance):
        with pytest.raises(IndexError):
            edge_weight(tiny_instance, 0, 3)
        with pytest.raises(IndexError):
            edge_weight(tiny_instance, -1, 0)

    def test_deterministic(self, tiny_instance):
        assert all(edge_weight(tiny_instance, 0, 1) == edge_weight(tiny_instance, 0, 1)
                   for _ in range(10))

    def test_matrix_matches_scalar_path(self):
        rng = np.random.default_rng(3)
        coords = rng.uniform(0, 1000, size=(20, 2))
        for metric in ("EUC_2D", "CEIL_2D", "ATT", "GEO"):
            cs = coords if metric != "GEO" else coords / 20.0
            on_demand = TspInstance(name="a", dimension=20, metric=metric,
                                    coords=cs, matrix_threshold=0)
            cached = TspInstance(name="b", dimension=20, metric=metric, coords=cs)
            m = cached.distance_matrix()
            for a in range(20):
                for b in range(20):
                    assert on_demand.edge_weight(a, b) == m[a, b]

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.tuples(st.floats(-1000, 1000), st.floats(-1000, 1000)),
                    min_size=3, max_size=8),
           st.sampled_from(["EUC_2D", "CEIL_2D", "ATT"]))
    def test_metric_properties(self, coords, metric):
        k = len(coords)
        inst = TspInstance(name="prop", dimension=k, metric=metric,
                           coords=np.array(coords))
        for a in range(k):
            assert inst.edge_weight(a, a) == 0
            for b in range(k):
                w = inst.edge_weight(a, b)
                assert w >= 0
                assert w == inst.edge_weight(b, a)


class TestKnownOptima:
    def test_paper_benchmark_registry(self):
        expected = {
            "pcb442": 50778, "p654": 34643, "d657": 48912, "u724": 41910,
            "rat783": 8806, "dsj1000": 18659688, "pr1002": 259045,
            "vm1084": 239297,
        }
        for name, opt in expected.items():
            assert known_optimum(name) == opt

    def test_unknown_instance_absent(self):
        assert known_optimum("unknown-instance") is None

    def test_register_override(self):
        assert known_optimum("my-custom") is None
        register_optimum("my-custom", 12345)
        assert known_optimum("my-custom") == 12345

    def test_register_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            register_optimum("bad", 0)

import pytest

from coherence.complexes import missing_weight
from coherence.formats import (
    ParseError,
    format_presentation,
    parse_complex,
    parse_graph,
    parse_map,
    parse_presentation,
)

POWER5 = """\
# one generator, one relator
gens x
rel x^5
"""

GENUS2 = """\
gens a b c d
rel a b a- b- c d c- d-
"""


class TestParsePresentation:
    def test_power(self):
        p = parse_presentation(POWER5)
        assert p.generators == ("x",)
        assert p.relators == ((1, 1, 1, 1, 1),)

    def test_genus2(self):
        p = parse_presentation(GENUS2)
        assert p.generators == ("a", "b", "c", "d")
        assert p.relators == ((1, 2, -1, -2, 3, 4, -3, -4),)

    def test_negative_power(self):
        p = parse_presentation("gens x y\nrel x^-2 y")
        assert p.relators == ((-1, -1, 2),)

    def test_trivial_relator_rejected(self):
        with pytest.raises(ParseError):
            parse_presentation("gens a\nrel a a-")

    def test_unknown_generator_rejected(self):
        with pytest.raises(ParseError):
            parse_presentation("gens a\nrel b")

    def test_duplicate_generator_rejected(self):
        with pytest.raises(ParseError):
            parse_presentation("gens a a")

    def test_unknown_directive_rejected(self):
        with pytest.raises(ParseError):
            parse_presentation("generator a")

    def test_unreduced_relator_warns(self):
        with pytest.warns(UserWarning):
            p = parse_presentation("gens a b\nrel b a b-")
        assert p.relators == ((1,),)

    def test_assertions(self):
        p = parse_presentation("gens a\nrel a^3\nassert dehn\nassert lambda 1/3")
        assert p.asserted_classes == ("dehn", "lambda")
        assert str(p.asserted_lambda) == "1/3"

    def test_round_trip(self):
        for text in (POWER5, GENUS2):
            p = parse_presentation(text)
            again = parse_presentation(format_presentation(p))
            assert again.generators == p.generators
            assert again.relators == p.relators


class TestParseGraph:
    def test_basic(self):
        named = parse_graph("left r 3\nright x\nright y\nedge r x\nedge r y\n")
        assert named.graph.num_left == 1
        assert named.graph.num_right == 2
        assert named.multiplicity == {0: 3}
        assert named.graph.edges == frozenset({(0, 0), (0, 1)})

    def test_default_multiplicity(self):
        named = parse_graph("left r\nright x\nedge r x\n")
        assert named.multiplicity == {0: 1}

    def test_unknown_vertex(self):
        with pytest.raises(ParseError):
            parse_graph("left r\nedge r x\n")

    def test_bad_multiplicity(self):
        with pytest.raises(ParseError):
            parse_graph("left r 0\n")


COMPLEX_TORUS = """\
weights standard
vertex P
edge a P P
edge b P P
face f a b a- b-
"""

MAP_EDGE_INCLUSION = """\
source-vertex Q
source-edge x Q Q
map-vertex Q P
map-edge x a
"""


class TestParseComplex:
    def test_torus(self):
        named = parse_complex(COMPLEX_TORUS)
        assert named.complex.num_vertices == 1
        assert named.complex.num_edges == 2
        assert named.complex.faces == ((1, 2, -1, -2),)
        assert named.weights.default == 1

    def test_sparse_weights(self):
        text = COMPLEX_TORUS.replace("weights standard", "weights zero") + "weight f 0 3\n"
        named = parse_complex(text)
        assert named.weights.default == 0
        assert named.weights.triangle((0, 0)) == 3

    def test_open_face_rejected(self):
        bad = "vertex P\nvertex Q\nedge a P Q\nface f a a\n"
        with pytest.raises(ParseError):
            parse_complex(bad)

    def test_weight_position_out_of_range(self):
        with pytest.raises(ParseError):
            parse_complex(COMPLEX_TORUS + "weight f 9 1\n")


class TestParseMap:
    def test_edge_inclusion_missing_weight(self):
        named = parse_complex(COMPLEX_TORUS)
        phi = parse_map(MAP_EDGE_INCLUSION, named.complex)
        assert missing_weight(phi, named.weights) == 2

    def test_face_mapping_with_offset(self):
        text = """\
source-vertex Q
source-edge x Q Q
source-edge y Q Q
source-face g y x- y- x
map-vertex Q P
map-edge x b-
map-edge y a-
map-face g f 0 flip
"""
        named = parse_complex(COMPLEX_TORUS)
        phi = parse_map(text, named.complex)
        assert phi.face_map == ((0, 0, True),)

    def test_incomplete_mapping_rejected(self):
        named = parse_complex(COMPLEX_TORUS)
        with pytest.raises(ParseError):
            parse_map("source-vertex Q\nsource-edge x Q Q\nmap-vertex Q P\n", named.complex)

    def test_non_commuting_map_rejected(self):
        named = parse_complex(COMPLEX_TORUS)
        text = """\
source-vertex Q
source-edge x Q Q
source-face g x x x x
map-vertex Q P
map-edge x a
map-face g f 0
"""
        with pytest.raises(ParseError):
            parse_map(text, named.complex)

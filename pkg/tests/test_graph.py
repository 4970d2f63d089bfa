"""Data model, canonicalization, and both parsers."""

import json
import random

import pytest

from cgsim import (
    CausalGraph,
    canonical_name,
    parse_cld_text,
    parse_json,
    to_json,
    validation_warnings,
)
from cgsim.errors import (
    DanglingEndpointError,
    DuplicateEdgeError,
    DuplicateNodeIdError,
    GraphParseError,
    InvalidNameError,
    LabelConflictError,
    SelfLoopError,
    UnknownPolarityError,
)

from conftest import random_graph


class TestCanonicalName:
    def test_collapses_whitespace_and_case(self):
        assert canonical_name("Student  Enrollment ") == "student enrollment"

    def test_fixed_point(self):
        assert canonical_name("school ranking") == "school ranking"

    def test_empty_rejected(self):
        with pytest.raises(InvalidNameError):
            canonical_name("  ")

    def test_tabs_and_newlines(self):
        assert canonical_name("a\t b\nc") == "a b c"


class TestModelInvariants:
    def test_single_node(self):
        g = parse_json('{"nodes":[{"id":"p","name":"Population"}],"edges":[]}')
        assert g.n == 1 and g.m == 0
        assert g.nodes[0].name == "population"

    def test_self_loop_rejected(self):
        with pytest.raises(SelfLoopError):
            CausalGraph.build([("a", "x")], [("a", "a", "+")])

    def test_duplicate_edge_rejected(self):
        with pytest.raises(DuplicateEdgeError):
            CausalGraph.build(
                [("a", "x"), ("b", "y")], [("a", "b", "+"), ("a", "b", "-")]
            )

    def test_opposite_direction_is_not_duplicate(self):
        g = CausalGraph.build(
            [("a", "x"), ("b", "y")], [("a", "b", "+"), ("b", "a", "-")]
        )
        assert g.m == 2

    def test_duplicate_node_id_rejected(self):
        with pytest.raises(DuplicateNodeIdError):
            CausalGraph.build([("a", "x"), ("a", "y")])

    def test_duplicate_names_allowed_but_warned(self):
        g = CausalGraph.build([("a", "same"), ("b", "same")])
        warnings = validation_warnings(g)
        assert len(warnings) == 1 and "same" in warnings[0]

    def test_graphs_are_immutable(self):
        g = CausalGraph.build([("a", "x")])
        with pytest.raises(AttributeError):
            g.nodes = ()


class TestJsonParsing:
    def test_unknown_polarity(self):
        doc = {"nodes": [{"id": "a", "name": "x"}, {"id": "b", "name": "y"}],
               "edges": [{"src": "a", "dst": "b", "polarity": "±"}]}
        with pytest.raises(UnknownPolarityError):
            parse_json(json.dumps(doc))

    def test_dangling_endpoint(self):
        doc = {"nodes": [{"id": "a", "name": "x"}],
               "edges": [{"src": "x", "dst": "a", "polarity": "+"}]}
        with pytest.raises(DanglingEndpointError) as err:
            parse_json(json.dumps(doc))
        assert "edges[0]" in str(err.value)

    def test_malformed_json_reports_position(self):
        with pytest.raises(GraphParseError) as err:
            parse_json("{nope")
        assert "line 1" in str(err.value)

    def test_unknown_top_level_key_rejected(self):
        with pytest.raises(GraphParseError):
            parse_json('{"nodes":[],"edges":[],"meta":{}}')

    def test_missing_key_rejected(self):
        with pytest.raises(GraphParseError):
            parse_json('{"nodes":[]}')

    def test_empty_name_located(self):
        with pytest.raises(GraphParseError) as err:
            parse_json('{"nodes":[{"id":"a","name":" "}],"edges":[]}')
        assert "nodes[0]" in str(err.value)

    def test_round_trip_random_graphs(self):
        rng = random.Random(20240)
        for _ in range(50):
            g = random_graph(rng, max_nodes=6)
            assert parse_json(to_json(g)) == g

    def test_bytes_accepted(self):
        g = CausalGraph.build([("a", "x")])
        assert parse_json(to_json(g).encode()) == g


REFERENCE_SNIPPET = """\
graph TD
SE[Student Enrollment] -- "+" --> SC[School Capacity Strain]
SC -- "-" --> SE
SC -- "-" --> SR[school ranking]
"""


class TestCldParsing:
    def test_reference_snippet(self):
        g = parse_cld_text(REFERENCE_SNIPPET)
        assert g.n == 3 and g.m == 3
        assert g.names == ("student enrollment", "school capacity strain",
                           "school ranking")
        assert g.polarity_of[("SE", "SC")].value == "+"
        assert g.polarity_of[("SC", "SE")].value == "-"

    def test_header_only_is_empty_graph(self):
        g = parse_cld_text("graph TD\n")
        assert g.is_empty

    def test_unknown_sign(self):
        with pytest.raises(UnknownPolarityError) as err:
            parse_cld_text('A[x] -- "?" --> B[y]')
        assert "line 1" in str(err.value)

    def test_syntax_error_has_line_number(self):
        with pytest.raises(GraphParseError) as err:
            parse_cld_text('graph TD\nA[x] --> B[y]')
        assert "line 2" in str(err.value)

    def test_label_conflict(self):
        text = 'A[first] -- "+" --> B[y]\nA[second] -- "+" --> C[z]'
        with pytest.raises(LabelConflictError):
            parse_cld_text(text)

    def test_same_label_redeclaration_ok(self):
        text = 'A[Thing] -- "+" --> B[y]\nA[ thing ] -- "+" --> C[z]'
        g = parse_cld_text(text)
        assert g.name_of["A"] == "thing"

    def test_bare_id_before_declaration(self):
        with pytest.raises(GraphParseError):
            parse_cld_text('A -- "+" --> B[y]')

    def test_duplicate_edge(self):
        text = 'A[x] -- "+" --> B[y]\nA -- "-" --> B'
        with pytest.raises(DuplicateEdgeError):
            parse_cld_text(text)

    def test_comments_and_blanks_ignored(self):
        text = "# comment\n\ngraph TD\n# another\nA[x] -- \"+\" --> B[y]\n"
        g = parse_cld_text(text)
        assert g.n == 2 and g.m == 1

    def test_first_label_wins(self):
        g = parse_cld_text('A[x] -- "+" --> B[y]\nB -- "-" --> A')
        assert g.names == ("x", "y")

import random

import pytest

from gretlite import corpus
from gretlite.errors import TransformError
from gretlite.formats import load_graph, save_graph
from gretlite.model import Graph
from gretlite.transform import TraceabilityMap, execute, parse_script
from gretlite.values import OrderedSet

import genutil
import oracles


def script(body: str):
    return parse_script("transformation T;\n" + body)


class TestCreateVertices:
    def test_constant_creation(self, hello_ext_schema):
        run = execute(script("CreateVertices Person <== set(1);"),
                      target_schema=hello_ext_schema)
        assert [v.class_name for v in run.graph.vertices] == ["Person"]
        assert run.trace.image("Person", 1) is run.graph.vertices[0]

    def test_empty_set_creates_nothing(self, hello_ext_schema):
        run = execute(script("CreateVertices Person <== set();"),
                      target_schema=hello_ext_schema)
        assert run.graph.vertices == []
        assert run.op_counts == [("CreateVertices", 0)]

    def test_source_elements_as_archetypes(self, graph1_schema, sample1):
        run = execute(script("CreateVertices Node <== V{Node};"),
                      sample1, target_schema=graph1_schema)
        source_nodes = [v for v in sample1.vertices if v.class_name == "Node"]
        assert len(run.graph.vertices) == len(source_nodes)
        for v in source_nodes:
            assert run.trace.image("Node", v) is not None

    def test_non_set_query_rejected(self, hello_ext_schema):
        with pytest.raises(TransformError, match="yield a set"):
            execute(script("CreateVertices Person <== list(1);"),
                    target_schema=hello_ext_schema)

    def test_archetype_collision(self, hello_ext_schema):
        s = script("CreateVertices Person <== set(1);\n"
                   "CreateVertices Person <== set(1);")
        with pytest.raises(TransformError, match="op 2: archetype 1"):
            execute(s, target_schema=hello_ext_schema)

    def test_collision_through_shared_superclass(self):
        schema = genutil.graph1evo_schema()
        s = script("CreateVertices Node <== set(1);\n"
                   "CreateVertices Edge_ <== set(1);")
        with pytest.raises(TransformError, match="visible via class"):
            execute(s, target_schema=schema)

    def test_abstract_class_rejected(self):
        schema = genutil.graph1evo_schema()
        with pytest.raises(TransformError, match="abstract"):
            execute(script("CreateVertices GraphComponent <== set(1);"),
                    target_schema=schema)


class TestCreateEdges:
    def test_copies_with_image_endpoints(self, graph1_schema, sample1):
        s = script(
            "CreateVertices Node <== V{Node};\n"
            "CreateVertices Edge_ <== V{Edge_};\n"
            "CreateEdges Edge_LinksToSrc <== from l : E{Edge_LinksToSrc} "
            "reportSet tup(l, startVertex(l), endVertex(l)) end;"
        )
        run = execute(s, sample1, target_schema=graph1_schema)
        source_links = [e for e in sample1.edges
                        if e.class_name == "Edge_LinksToSrc"]
        copies = [e for e in run.graph.edges
                  if e.class_name == "Edge_LinksToSrc"]
        assert len(copies) == len(source_links)
        for src in source_links:
            image = run.trace.image("Edge_LinksToSrc", src)
            assert image.start is run.trace.image("Edge_", src.start)
            assert image.end is run.trace.image("Node", src.end)

    def test_union_counts(self, graph1_schema, sample1):
        target = genutil.graph1evo_schema()
        s = script(
            "CreateVertices Graph_ <== V{Graph_};\n"
            "CreateVertices Node <== V{Node};\n"
            "CreateVertices Edge_ <== V{Edge_};\n"
            "CreateEdges Graph_ContainsGcs <== "
            "from c : E{Graph_ContainsNodes, Graph_ContainsEdges} "
            "reportSet tup(c, startVertex(c), endVertex(c)) end;"
        )
        run = execute(s, sample1, target_schema=target)
        contains = [e for e in run.graph.edges
                    if e.class_name == "Graph_ContainsGcs"]
        expected = len(oracles.edges_of(sample1, "Graph_ContainsNodes")) + \
            len(oracles.edges_of(sample1, "Graph_ContainsEdges"))
        assert len(contains) == expected

    def test_unresolvable_archetype(self, hello_ext_schema):
        s = script("CreateEdges GreetingContainsPerson <== "
                   "set(tup(1, 2, 3));")
        with pytest.raises(TransformError, match="no image for archetype 2"):
            execute(s, target_schema=hello_ext_schema)

    def test_non_triple_member(self, hello_ext_schema):
        s = script("CreateEdges GreetingContainsPerson <== set(tup(1, 2));")
        with pytest.raises(TransformError, match="triples"):
            execute(s, target_schema=hello_ext_schema)


class TestSetAttributes:
    def test_single_entry_map(self, hello_ext_schema):
        s = script("CreateVertices Person <== set(1);\n"
                   'SetAttributes Person.name <== map(1 -> "Ada");')
        run = execute(s, target_schema=hello_ext_schema)
        assert run.graph.vertices[0].attr("name") == "Ada"

    def test_union_view_resolution(self, graph1_schema, sample1):
        target = genutil.graph1evo_schema()
        s = script(
            "CreateVertices Graph_ <== V{Graph_};\n"
            "CreateVertices Node <== V{Node};\n"
            "CreateVertices Edge_ <== V{Edge_};\n"
            "SetAttributes GraphComponent.text <== "
            "from gc : V{Graph_, Node, Edge_} "
            'reportMap gc -> (hasType(gc, "Node") ? gc.name : "") end;'
        )
        run = execute(s, sample1, target_schema=target)
        for v in sample1.vertices:
            image = run.trace.image("GraphComponent", v)
            if v.class_name == "Node":
                assert image.attr("text") == v.attr("name")
            else:
                assert image.attr("text") == ""

    def test_empty_map_writes_nothing(self, hello_ext_schema):
        run = execute(script("SetAttributes Person.name <== map();"),
                      target_schema=hello_ext_schema)
        assert run.op_counts == [("SetAttributes", 0)]

    def test_non_map_rejected(self, hello_ext_schema):
        with pytest.raises(TransformError, match="yield a map"):
            execute(script("SetAttributes Person.name <== set(1);"),
                    target_schema=hello_ext_schema)

    def test_type_mismatch(self, hello_ext_schema):
        s = script("CreateVertices Person <== set(1);\n"
                   "SetAttributes Person.name <== map(1 -> 42);")
        with pytest.raises(TransformError, match="op 2.*expects String"):
            execute(s, target_schema=hello_ext_schema)

    def test_unknown_attribute(self, hello_ext_schema):
        with pytest.raises(TransformError, match="no attribute"):
            execute(script("SetAttributes Person.nope <== map();"),
                    target_schema=hello_ext_schema)


SUBGRAPH = (
    "CreateSubgraph (g : Greeting | arch = $)"
    " -->{GreetingContainsGreetingMessage}"
    ' (gm : GreetingMessage | arch = $, text = "Hello"),'
    " (g) -->{GreetingContainsPerson}"
    ' (p : Person | arch = $, name = "TTC Participants")'
    " <== %s;"
)


class TestCreateSubgraph:
    def test_single_application(self, hello_ext_schema):
        run = execute(script(SUBGRAPH % "set(1)"),
                      target_schema=hello_ext_schema)
        g = run.graph
        assert sorted(v.class_name for v in g.vertices) == \
            ["Greeting", "GreetingMessage", "Person"]
        assert sorted(e.class_name for e in g.edges) == \
            ["GreetingContainsGreetingMessage", "GreetingContainsPerson"]
        for cls in ("Greeting", "GreetingMessage", "Person"):
            assert run.trace.image(cls, 1) is not None

    def test_empty_query(self, hello_ext_schema):
        run = execute(script(SUBGRAPH % "set()"),
                      target_schema=hello_ext_schema)
        assert run.graph.vertices == [] and run.graph.edges == []

    def test_two_applications(self, hello_ext_schema):
        # enumeration oracle: |template| scales with the member count
        run = execute(script(SUBGRAPH % "set(1, 2)"),
                      target_schema=hello_ext_schema)
        assert len(run.graph.vertices) == 6
        assert len(run.graph.edges) == 4
        people = [run.trace.image("Person", k) for k in (1, 2)]
        assert people[0] is not None and people[1] is not None
        assert people[0] is not people[1]

    def test_reference_items_rejected(self, hello_ext_schema):
        s = script("CreateSubgraph (a := $[0]) <== set(1);")
        with pytest.raises(TransformError, match="only create"):
            execute(s, target_schema=hello_ext_schema)

    def test_edge_archetype_registration(self, hello_ext_schema):
        s = script(
            "CreateSubgraph (g : Greeting | arch = $)"
            " -->{GreetingContainsPerson | arch = $}"
            " (p : Person | arch = $)"
            " <== set(1);"
        )
        run = execute(s, target_schema=hello_ext_schema)
        assert run.trace.image("GreetingContainsPerson", 1) is run.graph.edges[0]


def one_conceptual_edge(schema):
    g = Graph(schema)
    n1, n2 = g.create_vertex("Node"), g.create_vertex("Node")
    n1.set_attr("name", "n1")
    n2.set_attr("name", "n2")
    ev = g.create_vertex("Edge_")
    g.create_edge("Edge_LinksToSrc", ev, n1)
    g.create_edge("Edge_LinksToTrg", ev, n2)
    return g, n1, n2, ev


class TestMatchReplace:
    def test_reverse_single_edge(self, graph1_schema):
        g, n1, n2, ev = one_conceptual_edge(graph1_schema)
        reverse = parse_script(corpus.read_text("09-reverse-edges.grt"))
        run = execute(reverse, g, in_place=True)
        (ev2, src, trg), = oracles.conceptual_edges(g)
        assert ev2 is ev
        assert src == [n2] and trg == [n1]
        assert run.match_invocations[0].applied == 1

    def test_empty_match_set(self, graph1_schema, sample1):
        before = save_graph(sample1)
        s = script("MatchReplace (a := $[0]) <== set();")
        run = execute(s, sample1, in_place=True)
        assert save_graph(sample1) == before
        stats = run.match_invocations[0]
        assert (stats.applied, stats.skipped) == (0, 0)

    def test_overlapping_matches_skip(self, graph1_schema):
        # two matches share the same Edge_ vertex: second must be skipped
        g, n1, n2, ev = one_conceptual_edge(graph1_schema)
        s = script(
            "MatchReplace (a := $[0]), (b := $[1]) <== "
            "from e : V{Edge_}, n : V{Node} reportSet tup(e, n) end;"
        )
        run = execute(s, g, in_place=True)
        stats = run.match_invocations[0]
        assert (stats.applied, stats.skipped) == (1, 1)

    def test_applied_matches_are_disjoint(self, graph1_schema, sample1):
        reverse = parse_script(corpus.read_text("09-reverse-edges.grt"))
        run = execute(reverse, sample1, in_place=True)
        seen = set()
        for elements in run.match_invocations[0].applied_elements:
            ids = {id(el) for el in elements}
            assert not (ids & seen)
            seen |= ids

    def test_unreferenced_elements_deleted(self, graph1_schema):
        g, n1, n2, ev = one_conceptual_edge(graph1_schema)
        s = script(
            "MatchReplace (a := $[0]) <== "
            "from e : V{Edge_}, s : E{Edge_LinksToSrc} reportSet tup(e, s) end;"
        )
        execute(s, g, in_place=True)
        assert ev.alive
        assert oracles.edges_of(g, "Edge_LinksToSrc") == []
        oracles.assert_no_dangling(g)

    def test_deleting_vertex_cascades(self, graph1_schema):
        g, n1, n2, ev = one_conceptual_edge(graph1_schema)
        s = script(
            "MatchReplace (a := $[1]) <== "
            "from e : V{Edge_} reportSet tup(e, theElement(e -->{Edge_LinksToSrc})) end;"
        )
        execute(s, g, in_place=True)
        assert not ev.alive
        assert n1.alive
        oracles.assert_no_dangling(g)

    def test_ref_to_non_element(self, graph1_schema, sample1):
        s = script("MatchReplace (a := $[0]) <== set(tup(1));")
        with pytest.raises(TransformError, match="graph element"):
            execute(s, sample1, in_place=True)

    def test_requires_in_place(self, graph1_schema, sample1):
        s = script("MatchReplace (a := $[0]) <== set();")
        with pytest.raises(TransformError, match="in-place"):
            execute(s, sample1, target_schema=graph1_schema)

    def test_attribute_assignment_on_preserved(self, graph1_schema):
        g, n1, n2, ev = one_conceptual_edge(graph1_schema)
        s = script(
            'MatchReplace (a := $, name = "touched") <== '
            'from n : V{Node} with n.name = "n1" reportSet n end;'
        )
        execute(s, g, in_place=True)
        assert n1.attr("name") == "touched"

    def test_single_element_matches_act_as_tuples(self, graph1_schema):
        g, n1, n2, ev = one_conceptual_edge(graph1_schema)
        s = script(
            "MatchReplace (a := $[0]) <== "
            'from n : V{Node} with n.name = "n2" reportSet n end;'
        )
        execute(s, g, in_place=True)
        assert n2.alive


class TestDelete:
    def test_named_node(self, graph1_schema, sample1):
        t = parse_script(corpus.read_text("12-delete-node-n1.grt"))
        expected = oracles.expected_delete_set_single(sample1, "n1")
        before = oracles.live_ids(sample1)
        run = execute(t, sample1, in_place=True)
        assert before - oracles.live_ids(sample1) == expected
        assert run.op_counts[0][1] == len(expected)
        oracles.assert_no_dangling(sample1)

    def test_node_with_conceptual_edges(self, graph1_schema, sample1):
        t = parse_script(corpus.read_text("13-delete-node-n1-and-edges.grt"))
        expected = oracles.expected_delete_set_with_edges(sample1, "n1")
        before = oracles.live_ids(sample1)
        execute(t, sample1, in_place=True)
        assert before - oracles.live_ids(sample1) == expected
        oracles.assert_no_dangling(sample1)

    def test_empty_query(self, graph1_schema, sample1):
        before = save_graph(sample1)
        run = execute(script("Delete set();"), sample1, in_place=True)
        assert run.op_counts == [("Delete", 0)]
        assert save_graph(sample1) == before

    def test_non_element_rejected(self, graph1_schema, sample1):
        with pytest.raises(TransformError, match="graph elements only"):
            execute(script("Delete set(1);"), sample1, in_place=True)

    def test_requires_in_place(self, graph1_schema, sample1):
        with pytest.raises(TransformError, match="in-place"):
            execute(script("Delete set();"), sample1,
                    target_schema=graph1_schema)


class TestIteratively:
    def test_immediately_inapplicable_body(self, graph1_schema, sample1):
        run = execute(script("Iteratively { Delete set(); }"),
                      sample1, in_place=True)
        assert run.op_counts == [("Iteratively", 1)]

    def test_transitive_edges_on_chain(self, graph2_schema, chain4):
        t = parse_script(corpus.read_text("14-insert-transitive-edges.grt"))
        original = oracles.edge_pair_set(chain4, "NodeLinksToLinksTo")
        compositions = oracles.one_step_compositions(chain4, "NodeLinksToLinksTo")
        run = execute(t, chain4, in_place=True)
        result = oracles.edge_pair_set(chain4, "NodeLinksToLinksTo")
        assert result == original | compositions
        assert run.op_counts == [("Iteratively", 2)]

    def test_round_limit(self, graph1_schema, sample1):
        s = script(
            "Iteratively { MatchReplace "
            "(x : Node | arch = count(V{Node})) <== set(tup(1)); }"
        )
        with pytest.raises(TransformError, match="exceeded 5 rounds"):
            execute(s, sample1, in_place=True, round_limit=5)

    def test_requires_in_place(self, graph1_schema, sample1):
        with pytest.raises(TransformError, match="in-place"):
            execute(script("Iteratively { Delete set(); }"),
                    sample1, target_schema=graph1_schema)


class TestExecutionShell:
    def test_out_place_leaves_source_untouched(self, graph1_schema, sample1):
        before = save_graph(sample1)
        t = parse_script(corpus.read_text("10-simple-migration.grt"))
        execute(t, sample1, target_schema=genutil.graph1evo_schema())
        assert save_graph(sample1) == before

    def test_missing_source_defaults_to_empty(self, hello_ext_schema):
        run = execute(script("CreateVertices Person <== "
                             "from n : V{Person} reportSet n end;"),
                      target_schema=hello_ext_schema)
        assert run.graph.vertices == []

    def test_in_place_requires_source(self):
        with pytest.raises(TransformError, match="requires a source"):
            execute(script("Delete set();"), None, in_place=True)

    def test_in_place_schema_must_match(self, graph1_schema, sample1):
        with pytest.raises(TransformError, match="source graph's schema"):
            execute(script("Delete set();"), sample1,
                    target_schema=genutil.graph2_schema(), in_place=True)

    def test_out_place_requires_target_schema(self, sample1):
        with pytest.raises(TransformError, match="requires a target schema"):
            execute(script("Delete set();"), sample1)

    def test_errors_carry_op_index(self, hello_ext_schema):
        s = script("CreateVertices Person <== set(1);\n"
                   "CreateVertices Person <== list(2);")
        with pytest.raises(TransformError, match="^op 2"):
            execute(s, target_schema=hello_ext_schema)

    def test_queries_run_against_the_source(self, graph1_schema, sample1):
        run = execute(script("CreateVertices Node <== V{Node};\n"
                             "CreateVertices Graph_ <== V{Graph_};"),
                      sample1, target_schema=graph1_schema)
        # the second op counts source Graph_ vertices, not target ones
        assert run.op_counts[1] == ("CreateVertices", 1)


class TestTraceability:
    def test_bijectivity_after_migration(self, graph1_schema, sample1):
        t = parse_script(corpus.read_text("10-simple-migration.grt"))
        run = execute(t, sample1, target_schema=genutil.graph1evo_schema())
        for cls in run.trace.classes():
            entries = run.trace.entries(cls)
            images = [el for _, el in entries]
            assert len({id(el) for el in images}) == len(images)
            arch = run.trace.arch_value(cls)
            for archetype, el in entries:
                assert oracles.values_equal(arch.get(el), archetype)

    def test_union_view_lookup(self):
        schema = genutil.graph1evo_schema()
        trace = TraceabilityMap(schema)
        g = Graph(schema)
        v = g.create_vertex("Node")
        trace.register("Node", 1, v)
        assert trace.image("GraphComponent", 1) is v
        assert trace.image("Edge_", 1) is None
        assert trace.img_value("GraphComponent").get(1) is v

    def test_trace_maps_visible_to_queries(self, hello_ext_schema):
        s = script(
            "CreateVertices Person <== set(1, 2);\n"
            "CreateVertices Greeting <== keySet(img_Person);"
        )
        run = execute(s, target_schema=hello_ext_schema)
        assert run.op_counts[1] == ("CreateVertices", 2)

    def test_unknown_trace_class(self, hello_ext_schema):
        s = script("CreateVertices Person <== keySet(img_Nope);")
        with pytest.raises(TransformError, match="unknown class 'Nope'"):
            execute(s, target_schema=hello_ext_schema)


def test_reverse_involution_on_random_fixtures(graph1_schema):
    rng = random.Random(11)
    reverse = parse_script(corpus.read_text("09-reverse-edges.grt"))
    for _ in range(20):
        g = genutil.random_sample(rng, graph1_schema)
        shape_before = oracles.canonical_form(g)
        execute(reverse, g, in_place=True)
        execute(reverse, g, in_place=True)
        assert oracles.canonical_form(g) == shape_before

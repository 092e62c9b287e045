"""Text formats for schemas (.gls) and graphs (.glg), plus DOT export.

Saved graphs are canonical: vertices then edges, creation order, all
attributes in declaration order, positional labels v1../e1...  Loading a
saved document and saving it again reproduces it byte for byte.
"""

from __future__ import annotations

from gretlite import model
from gretlite.errors import GraphError, ParseError, SchemaError
from gretlite.lexer import TokenStream, tokenize
from gretlite.values import quote_string

_ATTR_TYPES = {t.value: t for t in model.AttrType}


def load_schema(text: str) -> model.Schema:
    ts = TokenStream(tokenize(text))
    ts.expect_ident("schema")
    schema = model.Schema(ts.expect_ident().text)
    ts.expect_symbol(";")
    while not ts.at_eof():
        _class_decl(ts, schema)
    return schema


def _class_decl(ts: TokenStream, schema: model.Schema):
    tok = ts.peek()
    is_aggregation = False
    is_abstract = False
    if ts.at_ident("aggregation"):
        ts.next()
        is_aggregation = True
    if ts.at_ident("abstract"):
        ts.next()
        is_abstract = True
    if ts.at_ident("vertexclass"):
        if is_aggregation:
            ts.error("'aggregation' applies to edge classes only")
        ts.next()
        name = ts.expect_ident().text
        supers = _supertypes(ts)
        attrs = _attr_block(ts)
        ts.expect_symbol(";")
        define = lambda: schema.define_vertex_class(
            name, is_abstract=is_abstract, supertypes=supers, attributes=attrs
        )
    elif ts.at_ident("edgeclass"):
        ts.next()
        name = ts.expect_ident().text
        supers = _supertypes(ts)
        ts.expect_ident("from")
        from_class = ts.expect_ident().text
        _skip_multiplicity(ts)
        ts.expect_ident("to")
        to_class = ts.expect_ident().text
        _skip_multiplicity(ts)
        attrs = _attr_block(ts)
        ts.expect_symbol(";")
        define = lambda: schema.define_edge_class(
            name, from_class, to_class, is_abstract=is_abstract,
            supertypes=supers, is_aggregation=is_aggregation, attributes=attrs,
        )
    else:
        ts.error("expected a class declaration")
    try:
        define()
    except SchemaError as exc:
        raise ParseError(str(exc), tok.line, tok.column) from None


def _supertypes(ts: TokenStream) -> tuple[str, ...]:
    if not ts.at_symbol(":"):
        return ()
    ts.next()
    supers = [ts.expect_ident().text]
    while ts.at_symbol(","):
        ts.next()
        supers.append(ts.expect_ident().text)
    return tuple(supers)


def _attr_block(ts: TokenStream) -> tuple:
    if not ts.at_symbol("{"):
        return ()
    ts.next()
    attrs = []
    while not ts.at_symbol("}"):
        name = ts.expect_ident().text
        ts.expect_symbol(":")
        type_tok = ts.expect_ident()
        atype = _ATTR_TYPES.get(type_tok.text)
        if atype is None:
            raise ParseError(
                f"unknown attribute type '{type_tok.text}'",
                type_tok.line, type_tok.column,
            )
        attrs.append((name, atype))
        if ts.at_symbol(","):
            ts.next()
    ts.next()
    return tuple(attrs)


def _skip_multiplicity(ts: TokenStream):
    # multiplicities like (0,*) are accepted and ignored
    if not ts.at_symbol("("):
        return
    ts.next()
    if ts.peek().kind != "NUMBER":
        ts.error("expected a multiplicity lower bound")
    ts.next()
    ts.expect_symbol(",")
    if ts.at_symbol("*"):
        ts.next()
    elif ts.peek().kind == "NUMBER":
        ts.next()
    else:
        ts.error("expected a multiplicity upper bound")
    ts.expect_symbol(")")


def save_schema(schema: model.Schema) -> str:
    lines = [f"schema {schema.name};"]
    for cls in schema.vertex_classes:
        head = "abstract vertexclass" if cls.is_abstract else "vertexclass"
        lines.append(f"{head} {cls.name}{_supers_text(cls)}{_attrs_text(cls)};")
    for cls in schema.edge_classes:
        head = "edgeclass"
        if cls.is_abstract:
            head = f"abstract {head}"
        if cls.is_aggregation:
            head = f"aggregation {head}"
        lines.append(
            f"{head} {cls.name}{_supers_text(cls)} "
            f"from {cls.from_class} to {cls.to_class}{_attrs_text(cls)};"
        )
    return "\n".join(lines) + "\n"


def _supers_text(cls) -> str:
    return f" : {', '.join(cls.supertypes)}" if cls.supertypes else ""


def _attrs_text(cls) -> str:
    if not cls.attributes:
        return ""
    body = ", ".join(f"{a}: {t.value}" for a, t in cls.attributes)
    return " { " + body + " }"


def load_graph(text: str, schema: model.Schema) -> model.Graph:
    ts = TokenStream(tokenize(text))
    ts.expect_ident("graph")
    name_tok = ts.expect_ident()
    ts.expect_ident("conforms")
    schema_tok = ts.expect_ident()
    if schema_tok.text != schema.name:
        raise ParseError(
            f"graph conforms to '{schema_tok.text}' but schema "
            f"'{schema.name}' was given",
            schema_tok.line, schema_tok.column,
        )
    ts.expect_symbol(";")
    graph = model.Graph(schema, name=name_tok.text)
    labels: dict[str, model.Element] = {}
    while not ts.at_eof():
        _element_line(ts, graph, labels)
    return graph


def _element_line(ts: TokenStream, graph: model.Graph, labels):
    label_tok = ts.expect_ident()
    label = label_tok.text
    if label in labels:
        raise ParseError(f"duplicate element id '{label}'",
                         label_tok.line, label_tok.column)
    ts.expect_symbol(":")
    class_tok = ts.expect_ident()
    class_name = class_tok.text
    if not graph.schema.has_class(class_name):
        raise ParseError(f"unknown class '{class_name}'",
                         class_tok.line, class_tok.column)
    try:
        if graph.schema.is_vertex_class(class_name):
            element = graph.create_vertex(class_name)
        else:
            start = _endpoint(ts, labels)
            ts.expect_symbol("->")
            end = _endpoint(ts, labels)
            element = graph.create_edge(class_name, start, end)
    except GraphError as exc:
        raise ParseError(str(exc), class_tok.line, class_tok.column) from None
    labels[label] = element
    if ts.at_symbol("{"):
        ts.next()
        while not ts.at_symbol("}"):
            attr_tok = ts.expect_ident()
            ts.expect_symbol("=")
            value = _literal(ts)
            try:
                element.set_attr(attr_tok.text, value)
            except GraphError as exc:
                raise ParseError(str(exc), attr_tok.line,
                                 attr_tok.column) from None
            if ts.at_symbol(","):
                ts.next()
        ts.next()
    ts.expect_symbol(";")


def _endpoint(ts: TokenStream, labels) -> model.Vertex:
    tok = ts.expect_ident()
    element = labels.get(tok.text)
    if element is None:
        raise ParseError(f"edge references undeclared element '{tok.text}'",
                         tok.line, tok.column)
    if not isinstance(element, model.Vertex):
        raise ParseError(f"edge endpoint '{tok.text}' is not a vertex",
                         tok.line, tok.column)
    return element


def _literal(ts: TokenStream):
    tok = ts.peek()
    if tok.kind == "STRING":
        return ts.next().value
    if tok.kind == "NUMBER":
        return ts.next().value
    if ts.at_symbol("-"):
        ts.next()
        num = ts.peek()
        if num.kind != "NUMBER":
            ts.error("expected a number after '-'")
        return -ts.next().value
    if ts.at_ident("true"):
        ts.next()
        return True
    if ts.at_ident("false"):
        ts.next()
        return False
    ts.error("expected a literal")


def _render_literal(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return quote_string(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def save_graph(graph: model.Graph) -> str:
    lines = [f"graph {graph.name} conforms {graph.schema.name};"]
    vertex_labels = {v.id: f"v{i}" for i, v in enumerate(graph.vertices, 1)}
    for i, v in enumerate(graph.vertices, 1):
        lines.append(f"v{i} : {v.class_name}{_attr_store_text(v)};")
    for i, e in enumerate(graph.edges, 1):
        endpoints = f" {vertex_labels[e.start.id]} -> {vertex_labels[e.end.id]}"
        lines.append(f"e{i} : {e.class_name}{endpoints}{_attr_store_text(e)};")
    return "\n".join(lines) + "\n"


def _attr_store_text(element: model.Element) -> str:
    names = element.attr_names()
    if not names:
        return ""
    body = ", ".join(
        f"{name} = {_render_literal(element.attr(name))}" for name in names
    )
    return " { " + body + " }"


def export_dot(graph: model.Graph) -> str:
    """DOT rendering for inspection: one node per vertex, labeled with
    class, id, and attribute values; one arrow per edge."""
    lines = ["digraph G {"]
    vertex_labels = {v.id: f"v{i}" for i, v in enumerate(graph.vertices, 1)}
    for i, v in enumerate(graph.vertices, 1):
        parts = [v.class_name, f"v{i}"]
        parts += [
            f"{name} = {_render_literal(v.attr(name))}"
            for name in v.attr_names()
        ]
        label = _dot_escape("\\n".join(parts))
        lines.append(f'  v{i} [label="{label}"];')
    for e in graph.edges:
        lines.append(
            f"  {vertex_labels[e.start.id]} -> {vertex_labels[e.end.id]} "
            f'[label="{_dot_escape(e.class_name)}"];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def _dot_escape(text: str) -> str:
    return text.replace('"', '\\"')

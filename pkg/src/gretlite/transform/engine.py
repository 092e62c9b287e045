"""Execution engine for transformation scripts.

Out-place runs read the source graph and build a separate target graph;
in-place runs rewrite the source graph itself.  Every element created for
an archetype is recorded in a TraceabilityMap, and queries evaluated
during execution see those maps as `img_T` / `arch_T` bindings.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from gretlite import model
from gretlite.errors import GretliteError, QueryError, TransformError
from gretlite.query.evaluator import Bindings, evaluate
from gretlite.transform import ops
from gretlite.values import (
    UNDEFINED,
    OrderedSet,
    ValueMap,
    is_collection,
    render_value,
)

DEFAULT_ROUND_LIMIT = 10_000

_MISSING = object()


class TraceabilityMap:
    """Per-class archetype-to-image bookkeeping.

    Each class holds a bijection archetype -> created element.  Lookups
    through a class T consult T and all subclasses of T (the union view),
    so an archetype registered for a concrete class resolves through any
    of its supertypes.  Registration rejects an archetype that is already
    visible through any lookup class shared with the new entry.
    """

    def __init__(self, schema: model.Schema):
        self._schema = schema
        self._maps: dict[str, ValueMap] = {}

    def register(self, class_name: str, archetype, element: model.Element):
        self._schema.element_class(class_name)
        for related in self._related(class_name):
            existing = self._maps.get(related)
            if existing is not None and archetype in existing:
                raise TransformError(
                    f"archetype {render_value(archetype)} already has an "
                    f"image visible via class '{related}'"
                )
        self._maps.setdefault(class_name, ValueMap()).put(archetype, element)

    def _related(self, class_name: str) -> set[str]:
        out: set[str] = set()
        for sup in self._schema.superclasses(class_name):
            out.update(self._schema.subclasses(sup))
        return out

    def image(self, class_name: str, archetype) -> model.Element | None:
        for cls in self._schema.subclasses(class_name):
            entries = self._maps.get(cls)
            if entries is not None and archetype in entries:
                return entries.get(archetype)
        return None

    def img_value(self, class_name: str) -> ValueMap:
        """Union-view archetype -> image map for a class, as a query value."""
        out = ValueMap()
        for cls in self._schema.subclasses(class_name):
            entries = self._maps.get(cls)
            if entries is not None:
                for arch, el in entries.items():
                    out.put(arch, el)
        return out

    def arch_value(self, class_name: str) -> ValueMap:
        out = ValueMap()
        for cls in self._schema.subclasses(class_name):
            entries = self._maps.get(cls)
            if entries is not None:
                for arch, el in entries.items():
                    out.put(el, arch)
        return out

    def classes(self) -> list[str]:
        ordered = [c.name for c in self._schema.vertex_classes]
        ordered += [c.name for c in self._schema.edge_classes]
        return [c for c in ordered if self._maps.get(c)]

    def entries(self, class_name: str) -> list[tuple[object, model.Element]]:
        entries = self._maps.get(class_name)
        return entries.items() if entries is not None else []


@dataclass
class MatchReplaceStats:
    applied: int
    skipped: int
    applied_elements: list  # one element list per applied match


@dataclass
class ExecutionResult:
    graph: model.Graph
    trace: TraceabilityMap
    op_counts: list[tuple[str, int]] = field(default_factory=list)
    match_invocations: list[MatchReplaceStats] = field(default_factory=list)


class ExecutionContext:
    def __init__(self, source: model.Graph, target: model.Graph,
                 trace: TraceabilityMap, in_place: bool):
        self.source = source
        self.target = target
        self.trace = trace
        self.in_place = in_place
        self.result = ExecutionResult(target, trace)

    def eval(self, expr, dollar=_MISSING):
        env = Bindings(fallback=self._trace_lookup, dollar=dollar)
        return evaluate(expr, self.source, env)

    def _trace_lookup(self, name: str):
        for prefix, fn in (("img_", self.trace.img_value),
                           ("arch_", self.trace.arch_value)):
            if name.startswith(prefix):
                cls = name[len(prefix):]
                if not self.target.schema.has_class(cls):
                    raise QueryError(f"unknown class '{cls}' in '{name}'")
                return fn(cls)
        return None


def execute(transformation: ops.Transformation,
            source_graph: model.Graph | None = None,
            *,
            target_schema: model.Schema | None = None,
            in_place: bool = False,
            round_limit: int = DEFAULT_ROUND_LIMIT) -> ExecutionResult:
    """Run a transformation and return the target graph plus trace."""
    if in_place:
        if source_graph is None:
            raise TransformError("in-place execution requires a source graph")
        if target_schema is not None and target_schema is not source_graph.schema:
            raise TransformError(
                "in-place execution rewrites the source graph; the target "
                "schema must be the source graph's schema"
            )
        target = source_graph
        source = source_graph
    else:
        if target_schema is None:
            raise TransformError("out-place execution requires a target schema")
        target = model.Graph(target_schema, name=transformation.name)
        source = source_graph
        if source is None:
            source = model.Graph(target_schema, name="empty")
    trace = TraceabilityMap(target.schema)
    ctx = ExecutionContext(source, target, trace, in_place)
    for index, op in enumerate(transformation.ops, start=1):
        try:
            count = _run_op(ctx, op, round_limit)
        except TransformError as exc:
            raise TransformError(f"op {index}: {exc}") from exc
        except GretliteError as exc:
            raise TransformError(f"op {index}: {exc}") from exc
        ctx.result.op_counts.append((type(op).__name__, count))
    return ctx.result


def _run_op(ctx: ExecutionContext, op, round_limit: int) -> int:
    match op:
        case ops.CreateVertices():
            return _create_vertices(ctx, op)
        case ops.CreateEdges():
            return _create_edges(ctx, op)
        case ops.SetAttributes():
            return _set_attributes(ctx, op)
        case ops.CreateSubgraph():
            return _create_subgraph(ctx, op)
        case ops.MatchReplace():
            return _match_replace(ctx, op)
        case ops.Delete():
            return _delete(ctx, op)
        case ops.Iteratively():
            return _iteratively(ctx, op, round_limit)
    raise TransformError(f"unknown operation {op!r}")


def _require_set(value, op_name: str) -> OrderedSet:
    if not isinstance(value, OrderedSet):
        raise TransformError(f"{op_name} expects its query to yield a set")
    return value


def _create_vertices(ctx, op: ops.CreateVertices) -> int:
    members = _require_set(ctx.eval(op.query), "CreateVertices")
    for archetype in members:
        vertex = ctx.target.create_vertex(op.class_name)
        ctx.trace.register(op.class_name, archetype, vertex)
    return len(members)


def _create_edges(ctx, op: ops.CreateEdges) -> int:
    members = _require_set(ctx.eval(op.query), "CreateEdges")
    edge_class = ctx.target.schema.edge_class(op.class_name)
    for member in members:
        if not isinstance(member, tuple) or len(member) != 3:
            raise TransformError(
                "CreateEdges expects a set of (edge archetype, start "
                "archetype, end archetype) triples"
            )
        edge_arch, start_arch, end_arch = member
        start = _resolve_image(ctx, edge_class.from_class, start_arch)
        end = _resolve_image(ctx, edge_class.to_class, end_arch)
        edge = ctx.target.create_edge(op.class_name, start, end)
        ctx.trace.register(op.class_name, edge_arch, edge)
    return len(members)


def _resolve_image(ctx, class_name: str, archetype) -> model.Element:
    image = ctx.trace.image(class_name, archetype)
    if image is None:
        raise TransformError(
            f"no image for archetype {render_value(archetype)} via class "
            f"'{class_name}'"
        )
    return image


def _set_attributes(ctx, op: ops.SetAttributes) -> int:
    entries = ctx.eval(op.query)
    if not isinstance(entries, ValueMap):
        raise TransformError("SetAttributes expects its query to yield a map")
    ctx.target.schema.attribute_type(op.class_name, op.attr_name)
    for archetype, value in entries.items():
        element = _resolve_image(ctx, op.class_name, archetype)
        element.set_attr(op.attr_name, value)
    return len(entries)


def _create_subgraph(ctx, op: ops.CreateSubgraph) -> int:
    members = _require_set(ctx.eval(op.query), "CreateSubgraph")
    for tv in op.template.vertices:
        if tv.is_ref:
            raise TransformError(
                "CreateSubgraph templates only create new vertices; "
                f"'{tv.alias}' references an existing element"
            )
    for member in members:
        aliases: dict[str, model.Vertex] = {}
        for tv in op.template.vertices:
            archetype = ctx.eval(tv.arch, dollar=member)
            vertex = ctx.target.create_vertex(tv.class_name)
            ctx.trace.register(tv.class_name, archetype, vertex)
            aliases[tv.alias] = vertex
        for tv in op.template.vertices:
            _apply_assigns(ctx, aliases[tv.alias], tv.assigns, member)
        _create_template_edges(ctx, op.template, aliases, member)
    return len(members)


def _apply_assigns(ctx, element, assigns, dollar):
    for name, expr in assigns:
        element.set_attr(name, ctx.eval(expr, dollar=dollar))


def _create_template_edges(ctx, template: ops.Template, aliases, dollar):
    for te in template.edges:
        start = aliases[te.start_alias]
        end = aliases[te.end_alias]
        for endpoint, alias in ((start, te.start_alias), (end, te.end_alias)):
            if not isinstance(endpoint, model.Vertex):
                raise TransformError(
                    f"template edge endpoint '{alias}' is not a vertex"
                )
            if not endpoint.alive:
                raise TransformError(
                    f"template edge endpoint '{alias}' was deleted"
                )
        edge = ctx.target.create_edge(te.class_name, start, end)
        if te.arch is not None:
            ctx.trace.register(te.class_name, ctx.eval(te.arch, dollar=dollar),
                               edge)
        _apply_assigns(ctx, edge, te.assigns, dollar)


def _collect_elements(value, out: list, seen: set):
    if isinstance(value, model.Element):
        if id(value) not in seen:
            seen.add(id(value))
            out.append(value)
    elif is_collection(value):
        for member in value:
            _collect_elements(member, out, seen)


def _match_elements(match) -> list[model.Element]:
    out: list[model.Element] = []
    _collect_elements(match, out, set())
    return out


def _match_replace(ctx, op: ops.MatchReplace) -> int:
    if not ctx.in_place:
        raise TransformError("MatchReplace requires in-place execution")
    matches = _require_set(ctx.eval(op.query), "MatchReplace")
    touched: set[int] = set()
    applied = 0
    skipped = 0
    stats = MatchReplaceStats(0, 0, [])
    for match in matches:
        elements = _match_elements(match)
        if any(id(el) in touched or not el.alive for el in elements):
            skipped += 1
            continue
        dollar = match if isinstance(match, tuple) else (match,)
        aliases: dict[str, model.Element] = {}
        preserved: set[int] = set()
        for tv in op.template.vertices:
            if not tv.is_ref:
                continue
            element = ctx.eval(tv.ref, dollar=dollar)
            if isinstance(element, tuple) and len(element) == 1:
                # single-element matches are bound as 1-tuples; a bare `$`
                # reference means the element itself
                element = element[0]
            if not isinstance(element, model.Element):
                raise TransformError(
                    f"template reference '{tv.alias}' must name a graph "
                    f"element, got {render_value(element) if element is not None else 'nothing'}"
                )
            aliases[tv.alias] = element
            preserved.add(id(element))
        cascade: list[model.Element] = []
        doomed = [el for el in elements if id(el) not in preserved]
        for el in doomed:
            if isinstance(el, model.Edge) and el.alive:
                ctx.target.delete_edge(el)
        for el in doomed:
            if isinstance(el, model.Vertex) and el.alive:
                cascade.extend(ctx.target.delete_vertex(el))
        for tv in op.template.vertices:
            if tv.is_ref:
                continue
            archetype = ctx.eval(tv.arch, dollar=dollar)
            vertex = ctx.target.create_vertex(tv.class_name)
            ctx.trace.register(tv.class_name, archetype, vertex)
            aliases[tv.alias] = vertex
        for tv in op.template.vertices:
            element = aliases[tv.alias]
            if not element.alive:
                raise TransformError(
                    f"preserved element '{tv.alias}' was deleted by a cascade"
                )
            _apply_assigns(ctx, element, tv.assigns, dollar)
        _create_template_edges(ctx, op.template, aliases, dollar)
        touched.update(id(el) for el in elements)
        touched.update(id(el) for el in cascade)
        applied += 1
        stats.applied_elements.append(elements)
    stats.applied = applied
    stats.skipped = skipped
    ctx.result.match_invocations.append(stats)
    return applied


def _delete(ctx, op: ops.Delete) -> int:
    if not ctx.in_place:
        raise TransformError("Delete requires in-place execution")
    value = ctx.eval(op.query)
    if not is_collection(value):
        raise TransformError("Delete expects its query to yield a collection")
    flat: list = []
    _flatten_elements(value, flat)
    deleted = 0
    for el in flat:
        if isinstance(el, model.Edge) and el.alive:
            ctx.target.delete_edge(el)
            deleted += 1
    for el in flat:
        if isinstance(el, model.Vertex) and el.alive:
            deleted += len(ctx.target.delete_vertex(el))
    return deleted


def _flatten_elements(value, out: list):
    if isinstance(value, model.Element):
        out.append(value)
    elif is_collection(value):
        for member in value:
            _flatten_elements(member, out)
    else:
        raise TransformError(
            f"Delete results must contain graph elements only, got "
            f"{render_value(value) if value is not UNDEFINED else 'undefined'}"
        )


def _iteratively(ctx, op: ops.Iteratively, round_limit: int) -> int:
    if not ctx.in_place:
        raise TransformError("Iteratively requires in-place execution")
    rounds = 0
    while True:
        rounds += 1
        if rounds > round_limit:
            raise TransformError(
                f"Iteratively exceeded {round_limit} rounds; the body "
                "probably never becomes inapplicable"
            )
        changed = False
        for body_op in op.body:
            before = ctx.target.revision
            _run_op(ctx, body_op, round_limit)
            if ctx.target.revision != before:
                changed = True
        if not changed:
            return rounds

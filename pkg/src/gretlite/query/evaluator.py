"""Tree-walking evaluator for the query language.

Evaluation is a pure function of (expression, graph, bindings): repeated
runs yield structurally equal values with identical iteration orders,
because every collection is built in graph creation order.
"""

from __future__ import annotations

import math

from gretlite import model
from gretlite.errors import GraphError, QueryError, SchemaError
from gretlite.query import nodes as n
from gretlite.query.parser import parse_query
from gretlite.values import (
    UNDEFINED,
    OrderedSet,
    ValueMap,
    is_collection,
    to_text,
    value_equal,
)

_MISSING = object()


class Bindings:
    """Lexically scoped variable environment.

    `fallback` (root scope only) resolves names the chain does not hold,
    e.g. the trace maps a transformation exposes; it returns None for
    unknown names.  `dollar` carries the current-member binding.
    """

    __slots__ = ("_vars", "_parent", "_fallback", "_dollar")

    def __init__(self, variables=None, parent=None, fallback=None,
                 dollar=_MISSING):
        self._vars = dict(variables) if variables else {}
        self._parent = parent
        self._fallback = fallback
        self._dollar = dollar

    def child(self, variables=None, dollar=_MISSING):
        return Bindings(variables, parent=self, dollar=dollar)

    def lookup(self, name: str):
        scope = self
        while scope is not None:
            if name in scope._vars:
                return scope._vars[name]
            if scope._parent is None and scope._fallback is not None:
                hit = scope._fallback(name)
                if hit is not None:
                    return hit
            scope = scope._parent
        raise QueryError(f"unbound variable '{name}'")

    def dollar(self):
        scope = self
        while scope is not None:
            if scope._dollar is not _MISSING:
                return scope._dollar
            scope = scope._parent
        raise QueryError("'$' is not bound here")


def _as_bindings(bindings) -> Bindings:
    if bindings is None:
        return Bindings()
    if isinstance(bindings, Bindings):
        return bindings
    return Bindings(dict(bindings))


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _require_bool(v, what: str):
    if v is UNDEFINED or isinstance(v, bool):
        return v
    raise QueryError(f"{what} must be a boolean")


def evaluate(expr, graph: model.Graph, bindings=None):
    return Evaluator(graph).eval(expr, _as_bindings(bindings))


def run_query(text: str, graph: model.Graph, bindings=None, **parse_kwargs):
    if bindings is not None and not isinstance(bindings, Bindings):
        extra = tuple(parse_kwargs.get("extra_names", ())) + tuple(bindings)
        parse_kwargs["extra_names"] = extra
    return evaluate(parse_query(text, **parse_kwargs), graph, bindings)


def eval_path(graph: model.Graph, start: model.Vertex, steps):
    """Vertices reachable from `start` by applying each step in sequence.

    Forward steps follow start-to-end, backward steps end-to-start,
    `both` either way; aggregation steps traverse aggregation-flagged
    edge classes in forward direction only.
    """
    if not isinstance(start, model.Vertex):
        raise QueryError("path expressions start at a vertex")
    frontier = OrderedSet([start])
    for step in steps:
        allowed = _resolve_step_classes(graph.schema, step)
        out = OrderedSet()
        for v in frontier:
            for direction, edge in v.incidences("both"):
                target = _step_target(graph.schema, step, allowed,
                                      direction, edge)
                if target is not None:
                    out.add(target)
        frontier = out
    return frontier


def _resolve_step_classes(schema, step: n.PathStep):
    if not step.classes:
        return None
    allowed: set[str] = set()
    for spec in step.classes:
        try:
            cls = schema.edge_class(spec.name)
        except SchemaError as exc:
            raise QueryError(str(exc)) from None
        if step.direction == "agg" and not cls.is_aggregation:
            raise QueryError(
                f"'<>--' traverses aggregation edge classes only, and "
                f"'{spec.name}' is not one"
            )
        if spec.exact:
            allowed.add(spec.name)
        else:
            allowed.update(schema.subclasses(spec.name))
    return allowed


def _step_target(schema, step, allowed, direction, edge):
    if allowed is not None:
        if edge.class_name not in allowed:
            return None
    elif step.direction == "agg":
        if not schema.edge_class(edge.class_name).is_aggregation:
            return None
    if step.direction in ("out", "agg"):
        return edge.end if direction == "out" else None
    if step.direction == "in":
        return edge.start if direction == "in" else None
    return edge.end if direction == "out" else edge.start


class Evaluator:
    def __init__(self, graph: model.Graph):
        self.graph = graph

    def eval(self, node, env: Bindings):
        match node:
            case n.Literal(value=v):
                return v
            case n.VarRef(name=name):
                return env.lookup(name)
            case n.DollarRef():
                return env.dollar()
            case n.ElementSet():
                return self._element_set(node)
            case n.Comprehension():
                return self._comprehension(node, env)
            case n.PathApply(start=start, steps=steps):
                value = self.eval(start, env)
                if value is UNDEFINED:
                    return UNDEFINED
                return eval_path(self.graph, value, steps)
            case n.Call():
                return self._call(node, env)
            case n.MapLit(entries=entries):
                out = ValueMap()
                for k, v in entries:
                    out.put(self.eval(k, env), self.eval(v, env))
                return out
            case n.Unary(op=op, operand=operand):
                return self._unary(op, self.eval(operand, env))
            case n.Binary():
                return self._binary(node, env)
            case n.Conditional():
                cond = _require_bool(self.eval(node.condition, env),
                                     "conditional test")
                if cond is UNDEFINED:
                    return UNDEFINED
                branch = node.then_expr if cond else node.else_expr
                return self.eval(branch, env)
            case n.AttrAccess(target=target, name=name):
                value = self.eval(target, env)
                if value is UNDEFINED:
                    return UNDEFINED
                if not isinstance(value, model.Element):
                    raise QueryError(f"'.{name}' applies to graph elements")
                try:
                    return value.attr(name)
                except GraphError as exc:
                    raise QueryError(str(exc)) from None
            case n.Index(target=target, index=index):
                return self._index(self.eval(target, env),
                                   self.eval(index, env))
            case _:
                raise QueryError(f"cannot evaluate {node!r}")

    def _element_set(self, node: n.ElementSet):
        schema = self.graph.schema
        want_vertices = node.kind == "V"
        for spec in node.classes:
            if want_vertices:
                self._schema_guard(lambda: schema.vertex_class(spec.name))
            else:
                self._schema_guard(lambda: schema.edge_class(spec.name))
        pool = self.graph.vertices if want_vertices else self.graph.edges
        if not node.classes:
            return OrderedSet(pool)
        out = OrderedSet()
        for el in pool:
            for spec in node.classes:
                if spec.exact:
                    hit = el.class_name == spec.name
                else:
                    hit = schema.conforms(el.class_name, spec.name)
                if hit:
                    out.add(el)
                    break
        return out

    @staticmethod
    def _schema_guard(fn):
        try:
            return fn()
        except SchemaError as exc:
            raise QueryError(str(exc)) from None

    def _comprehension(self, node: n.Comprehension, env: Bindings):
        if node.kind == "set":
            result = OrderedSet()
        elif node.kind == "map":
            result = ValueMap()
        else:
            result = []

        def emit(scope):
            if node.condition is not None:
                keep = _require_bool(self.eval(node.condition, scope),
                                     "with-clause")
                if keep is not True:
                    return
            if node.kind == "map":
                key = self.eval(node.exprs[0], scope)
                result.put(key, self.eval(node.value_expr, scope))
                return
            values = [self.eval(e, scope) for e in node.exprs]
            row = values[0] if len(values) == 1 else tuple(values)
            if node.kind == "set":
                result.add(row)
            else:
                result.append(row)

        def loop_group(gi: int, scope):
            if gi == len(node.decls):
                emit(scope)
                return
            group = node.decls[gi]
            domain = self.eval(group.domain, scope)
            if not is_collection(domain):
                raise QueryError(
                    f"declaration domain of {', '.join(group.names)} "
                    "must be a collection"
                )
            members = list(domain)

            def loop_name(ni: int, inner):
                if ni == len(group.names):
                    loop_group(gi + 1, inner)
                    return
                for member in members:
                    loop_name(ni + 1, inner.child({group.names[ni]: member}))

            loop_name(0, scope)

        loop_group(0, env)
        return result

    # -- operators ---------------------------------------------------------

    def _unary(self, op: str, value):
        if value is UNDEFINED:
            return UNDEFINED
        if op == "neg":
            if not _is_number(value):
                raise QueryError("unary '-' expects a number")
            return -value
        if not isinstance(value, bool):
            raise QueryError("'not' expects a boolean")
        return not value

    def _binary(self, node: n.Binary, env: Bindings):
        op = node.op
        if op in ("and", "or"):
            return self._logic(op, node, env)
        left = self.eval(node.left, env)
        right = self.eval(node.right, env)
        if op == "++":
            if left is UNDEFINED or right is UNDEFINED:
                return UNDEFINED
            return to_text(left) + to_text(right)
        if op in ("=", "<>", "<", "<=", ">", ">="):
            return self._compare(op, left, right)
        return self._arith(op, left, right)

    def _logic(self, op: str, node: n.Binary, env: Bindings):
        left = _require_bool(self.eval(node.left, env), f"'{op}' operand")
        if op == "and" and left is False:
            return False
        if op == "or" and left is True:
            return True
        right = _require_bool(self.eval(node.right, env), f"'{op}' operand")
        if right is UNDEFINED or left is UNDEFINED:
            # three-valued logic: a definite right answer may still decide
            if op == "and":
                return False if right is False else UNDEFINED
            return True if right is True else UNDEFINED
        return right

    def _compare(self, op: str, left, right):
        if left is UNDEFINED or right is UNDEFINED:
            return False
        if op == "=":
            return value_equal(left, right)
        if op == "<>":
            return not value_equal(left, right)
        if _is_number(left) and _is_number(right):
            pass
        elif isinstance(left, str) and isinstance(right, str):
            pass
        else:
            raise QueryError(f"'{op}' expects two numbers or two strings")
        if op == "<":
            return left < right
        if op == "<=":
            return left <= right
        if op == ">":
            return left > right
        return left >= right

    def _arith(self, op: str, left, right):
        if left is UNDEFINED or right is UNDEFINED:
            return UNDEFINED
        if not (_is_number(left) and _is_number(right)):
            raise QueryError(f"'{op}' expects numbers")
        if op == "/":
            if right == 0:
                raise QueryError("division by zero")
            result = left / right
        elif op == "%":
            if not (isinstance(left, int) and isinstance(right, int)):
                raise QueryError("'%' expects integers")
            if right == 0:
                raise QueryError("division by zero")
            result = left % right
        elif op == "+":
            result = left + right
        elif op == "-":
            result = left - right
        else:
            result = left * right
        if isinstance(result, float) and math.isnan(result):
            return UNDEFINED
        return result

    def _index(self, target, index):
        if target is UNDEFINED:
            return UNDEFINED
        if not isinstance(target, (tuple, list)):
            raise QueryError("indexing applies to tuples and lists")
        if not isinstance(index, int) or isinstance(index, bool):
            raise QueryError("index must be an integer")
        if index < 0 or index >= len(target):
            raise QueryError(
                f"index {index} out of range for length {len(target)}"
            )
        return target[index]

    # -- function calls ----------------------------------------------------

    def _call(self, node: n.Call, env: Bindings):
        args = [self.eval(a, env) for a in node.args]
        name = node.name
        if node.classes is not None and name != "degree":
            raise QueryError(f"function '{name}' takes no class qualifier")
        if name == "degree":
            return self._degree(node.classes, args)
        fn = _BUILTINS.get(name)
        if fn is None:
            raise QueryError(f"unknown function '{name}'")
        return fn(self, args)

    def _degree(self, class_specs, args):
        _arity("degree", args, 1)
        v = args[0]
        if not isinstance(v, model.Vertex):
            raise QueryError("degree expects a vertex")
        allowed = None
        if class_specs:
            allowed = _resolve_step_classes(
                self.graph.schema, n.PathStep("both", tuple(class_specs))
            )
        count = 0
        for _, edge in v.incidences("both"):
            if allowed is None or edge.class_name in allowed:
                count += 1
        return count


def _arity(name, args, low, high=None):
    high = low if high is None else high
    if not (low <= len(args) <= high):
        raise QueryError(f"function '{name}' called with {len(args)} arguments")


def _builtin_count(ev, args):
    _arity("count", args, 1)
    coll = args[0]
    if not (is_collection(coll) or isinstance(coll, ValueMap)):
        raise QueryError("count expects a collection")
    return len(coll)


def _builtin_the_element(ev, args):
    _arity("theElement", args, 1)
    coll = args[0]
    if not is_collection(coll):
        raise QueryError("theElement expects a collection")
    if len(coll) != 1:
        raise QueryError(
            f"theElement expects exactly one element, got {len(coll)}"
        )
    return next(iter(coll))


def _builtin_contains(ev, args):
    _arity("contains", args, 2)
    coll, needle = args
    if isinstance(coll, OrderedSet):
        return needle in coll
    if isinstance(coll, (list, tuple)):
        return any(value_equal(member, needle) for member in coll)
    raise QueryError("contains expects a collection")


def _builtin_is_empty(ev, args):
    _arity("isEmpty", args, 1)
    coll = args[0]
    if not (is_collection(coll) or isinstance(coll, ValueMap)):
        raise QueryError("isEmpty expects a collection")
    return len(coll) == 0


def _builtin_key_set(ev, args):
    _arity("keySet", args, 1)
    if not isinstance(args[0], ValueMap):
        raise QueryError("keySet expects a map")
    return OrderedSet(args[0].keys())


def _builtin_flatten(ev, args):
    _arity("flatten", args, 1)
    if not is_collection(args[0]):
        raise QueryError("flatten expects a collection")
    out = []

    def walk(v):
        if is_collection(v):
            for member in v:
                walk(member)
        else:
            out.append(v)

    walk(args[0])
    return out


def _builtin_has_type(ev, args):
    _arity("hasType", args, 2)
    el, name = args
    if not isinstance(el, model.Element):
        raise QueryError("hasType expects a graph element")
    if not isinstance(name, str):
        raise QueryError("hasType expects a class name string")
    try:
        return el.is_instance_of(name)
    except SchemaError as exc:
        raise QueryError(str(exc)) from None


def _edge_endpoint(which):
    def fn(ev, args):
        _arity(which, args, 1)
        if not isinstance(args[0], model.Edge):
            raise QueryError(f"{which} expects an edge")
        return args[0].start if which == "startVertex" else args[0].end

    return fn


_BUILTINS = {
    "count": _builtin_count,
    "theElement": _builtin_the_element,
    "contains": _builtin_contains,
    "isEmpty": _builtin_is_empty,
    "keySet": _builtin_key_set,
    "flatten": _builtin_flatten,
    "hasType": _builtin_has_type,
    "startVertex": _edge_endpoint("startVertex"),
    "endVertex": _edge_endpoint("endVertex"),
    "set": lambda ev, args: OrderedSet(args),
    "list": lambda ev, args: list(args),
    "tup": lambda ev, args: tuple(args),
}

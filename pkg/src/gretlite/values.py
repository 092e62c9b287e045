"""Runtime value universe for queries and transformations.

Values are plain Python data: int, float, str, bool, graph elements,
tuples, lists, plus two containers with *structural* member identity —
OrderedSet and ValueMap.  Both keep insertion order, so every collection
the engine produces iterates deterministically.  UNDEFINED is the single
bottom value that propagates through operators.
"""

from __future__ import annotations

from gretlite import model


class _Undefined:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "undefined"


UNDEFINED = _Undefined()


def value_key(v):
    """Hashable structural identity of a value.

    ints and floats unify numerically (1 and 1.0 are the same member);
    bools are a distinct type; elements compare by identity.
    """
    if v is UNDEFINED:
        return ("u",)
    if isinstance(v, bool):
        return ("b", v)
    if isinstance(v, (int, float)):
        return ("n", v)
    if isinstance(v, str):
        return ("s", v)
    if isinstance(v, model.Element):
        return ("el", v)
    if isinstance(v, tuple):
        return ("t", tuple(value_key(x) for x in v))
    if isinstance(v, list):
        return ("l", tuple(value_key(x) for x in v))
    if isinstance(v, OrderedSet):
        return ("set", frozenset(v._items))
    if isinstance(v, ValueMap):
        return ("m", frozenset((k, value_key(x)) for k, (_, x) in v._items.items()))
    raise TypeError(f"not a value: {v!r}")


def value_equal(a, b) -> bool:
    return value_key(a) == value_key(b)


def is_collection(v) -> bool:
    return isinstance(v, (OrderedSet, list, tuple))


class OrderedSet:
    """Duplicate-free collection with insertion-order iteration."""

    __slots__ = ("_items",)

    def __init__(self, items=()):
        self._items: dict = {}
        for v in items:
            self.add(v)

    def add(self, value):
        self._items.setdefault(value_key(value), value)

    def __contains__(self, value):
        return value_key(value) in self._items

    def __iter__(self):
        return iter(self._items.values())

    def __len__(self):
        return len(self._items)

    def __eq__(self, other):
        if not isinstance(other, OrderedSet):
            return NotImplemented
        return set(self._items) == set(other._items)

    __hash__ = None

    def __repr__(self):
        return "{" + ", ".join(repr(v) for v in self) + "}"


class ValueMap:
    """Insertion-ordered map whose keys compare structurally."""

    __slots__ = ("_items",)

    def __init__(self, entries=()):
        self._items: dict = {}
        for k, v in entries:
            self.put(k, v)

    def put(self, key, value):
        self._items[value_key(key)] = (key, value)

    def get(self, key, default=None):
        hit = self._items.get(value_key(key))
        return default if hit is None else hit[1]

    def __contains__(self, key):
        return value_key(key) in self._items

    def keys(self):
        return [k for k, _ in self._items.values()]

    def values(self):
        return [v for _, v in self._items.values()]

    def items(self):
        return list(self._items.values())

    def __iter__(self):
        return iter(self.keys())

    def __len__(self):
        return len(self._items)

    def __eq__(self, other):
        if not isinstance(other, ValueMap):
            return NotImplemented
        if set(self._items) != set(other._items):
            return False
        return all(
            value_key(self._items[k][1]) == value_key(other._items[k][1])
            for k in self._items
        )

    __hash__ = None

    def __repr__(self):
        body = ", ".join(f"{k!r} -> {v!r}" for k, v in self.items())
        return "{" + body + "}"


_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\t": "\\t", "\r": "\\r"}


def quote_string(s: str) -> str:
    return '"' + "".join(_ESCAPES.get(c, c) for c in s) + '"'


def render_value(v) -> str:
    """Canonical textual rendering.

    Sets and maps are printed sorted by the rendering of their members or
    keys; lists and tuples keep their own order.
    """
    if v is UNDEFINED:
        return "undefined"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, str):
        return quote_string(v)
    if isinstance(v, model.Element):
        return v.ref()
    if isinstance(v, tuple):
        return "(" + ", ".join(render_value(x) for x in v) + ")"
    if isinstance(v, list):
        return "[" + ", ".join(render_value(x) for x in v) + "]"
    if isinstance(v, OrderedSet):
        return "{" + ", ".join(sorted(render_value(x) for x in v)) + "}"
    if isinstance(v, ValueMap):
        pairs = sorted(
            (render_value(k), render_value(x)) for k, x in v.items()
        )
        return "{" + ", ".join(f"{k} -> {x}" for k, x in pairs) + "}"
    raise TypeError(f"not a value: {v!r}")


def to_text(v) -> str:
    """Rendering used by string concatenation: bare strings stay unquoted."""
    return v if isinstance(v, str) else render_value(v)

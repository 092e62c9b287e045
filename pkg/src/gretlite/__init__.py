"""gretlite: a typed, attributed graph engine.

The package bundles a schema-conforming graph model, a query language
with comprehensions and path expressions, a transformation script
language with archetype/image traceability, text formats, and a CLI.
"""

from gretlite.errors import (
    GraphError,
    GretliteError,
    ParseError,
    QueryError,
    SchemaError,
    TransformError,
)
from gretlite.model import AttrType, Edge, EdgeClass, Graph, Schema, Vertex, VertexClass
from gretlite.values import UNDEFINED, OrderedSet, ValueMap, render_value

__all__ = [
    "AttrType",
    "Edge",
    "EdgeClass",
    "Graph",
    "GraphError",
    "GretliteError",
    "OrderedSet",
    "ParseError",
    "QueryError",
    "Schema",
    "SchemaError",
    "TransformError",
    "UNDEFINED",
    "ValueMap",
    "Vertex",
    "VertexClass",
    "render_value",
]

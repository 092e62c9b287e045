"""Operation and template types of the transformation script language."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class TemplateVertex:
    """One parenthesized template item.

    Exactly one of `class_name` (a vertex to create, with mandatory
    archetype expression) or `ref` (an expression naming an existing
    element to preserve) is set.
    """

    alias: str
    class_name: str | None = None
    arch: object | None = None
    ref: object | None = None
    assigns: tuple[tuple[str, object], ...] = ()

    @property
    def is_ref(self) -> bool:
        return self.ref is not None


@dataclass(frozen=True)
class TemplateEdge:
    class_name: str
    start_alias: str
    end_alias: str
    arch: object | None = None
    assigns: tuple[tuple[str, object], ...] = ()


@dataclass(frozen=True)
class Template:
    vertices: tuple[TemplateVertex, ...]
    edges: tuple[TemplateEdge, ...]


@dataclass(frozen=True)
class CreateVertices:
    class_name: str
    query: object


@dataclass(frozen=True)
class CreateEdges:
    class_name: str
    query: object


@dataclass(frozen=True)
class SetAttributes:
    class_name: str
    attr_name: str
    query: object


@dataclass(frozen=True)
class CreateSubgraph:
    template: Template
    query: object


@dataclass(frozen=True)
class MatchReplace:
    template: Template
    query: object


@dataclass(frozen=True)
class Delete:
    query: object


@dataclass(frozen=True)
class Iteratively:
    body: tuple


Op = (
    CreateVertices | CreateEdges | SetAttributes | CreateSubgraph
    | MatchReplace | Delete | Iteratively
)


@dataclass(frozen=True)
class Transformation:
    name: str
    ops: tuple

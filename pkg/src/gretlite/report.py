"""Canonical textual reports: query results and traceability listings."""

from __future__ import annotations

from gretlite.transform.engine import TraceabilityMap
from gretlite.values import ValueMap, render_value


def render_result(value) -> str:
    """Printable form of a query result.

    A top-level map becomes one `key -> value` line per entry (sorted by
    rendered key); everything else is the canonical one-line rendering.
    """
    if isinstance(value, ValueMap):
        pairs = sorted(
            (render_value(k), render_value(v)) for k, v in value.items()
        )
        return "".join(f"{k} -> {v}\n" for k, v in pairs)
    return render_value(value) + "\n"


def trace_report(trace: TraceabilityMap) -> str:
    """One `Class: archetype -> element` line per traceability entry."""
    lines = []
    for class_name in trace.classes():
        for archetype, element in trace.entries(class_name):
            lines.append(
                f"{class_name}: {render_value(archetype)} -> {element.ref()}"
            )
    return "".join(line + "\n" for line in lines)

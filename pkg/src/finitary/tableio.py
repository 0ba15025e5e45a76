"""Reading and writing observation tables, posets and reports.

Two table formats are supported.  JSON::

    {"observers": ["O1", "O2"],
     "events": [{"label": "0", "registered_by": ["O1"]}, ...]}

and a plain grid, one row per event, ``+``/``-`` cells under a header of
observer names (``|`` separators are optional)::

    Event | O1 | O2
    0     | +  | -
"""

from __future__ import annotations

import json
from pathlib import Path

from finitary.core import FinitaryPoset, ObservationTable, TableError


def dumps(doc) -> str:
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def table_to_dict(table: ObservationTable) -> dict:
    return {
        "observers": list(table.observers),
        "events": [
            {"label": e, "registered_by": [o for o, hit in zip(table.observers, row) if hit]}
            for e, row in zip(table.events, table.registered)
        ],
    }


def table_from_dict(doc) -> ObservationTable:
    if not isinstance(doc, dict) or "observers" not in doc or "events" not in doc:
        raise TableError("table JSON needs 'observers' and 'events'")
    try:
        items = [(ev["label"], ev["registered_by"]) for ev in doc["events"]]
    except (KeyError, TypeError) as exc:
        raise TableError(f"malformed event entry: {exc}") from exc
    return ObservationTable.from_sets(doc["observers"], items)


def table_to_text(table: ObservationTable) -> str:
    for label in (*table.events, *table.observers):
        if any(ch.isspace() for ch in label) or "|" in label:
            raise TableError(f"label {label!r} cannot be written in the grid format")
    header = ["Event", *table.observers]
    rows = [[e, *("+" if hit else "-" for hit in row)] for e, row in zip(table.events, table.registered)]
    widths = [max(len(r[k]) for r in [header, *rows]) for k in range(len(header))]
    lines = [" | ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() for r in [header, *rows]]
    return "\n".join(lines) + "\n"


def table_from_text(text: str) -> ObservationTable:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise TableError("empty table")
    split = [ln.replace("|", " ").split() for ln in lines]
    header = split[0]
    if len(header) < 2:
        raise TableError("grid header needs an event column and at least one observer")
    observers = header[1:]
    events, rows = [], []
    for cells in split[1:]:
        if len(cells) != len(header):
            raise TableError(f"row {cells[0]!r} has {len(cells) - 1} cells for {len(observers)} observers")
        marks = cells[1:]
        bad = [m for m in marks if m not in ("+", "-", "--", "−")]
        if bad:
            raise TableError(f"row {cells[0]!r} has cells {bad} that are neither '+' nor '-'")
        events.append(cells[0])
        rows.append(tuple(m == "+" for m in marks))
    return ObservationTable(tuple(events), tuple(observers), tuple(rows))


def read_table(path: str | Path) -> ObservationTable:
    """Load a table file; JSON if it parses as JSON, the grid format otherwise."""
    text = Path(path).read_text(encoding="utf-8")
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise TableError(f"{path}: invalid JSON: {exc}") from exc
        return table_from_dict(doc)
    return table_from_text(text)


def poset_to_dict(poset: FinitaryPoset) -> dict:
    return {
        "classes": [
            {"label": lab, "members": sorted(members)}
            for lab, members in zip(poset.labels, poset.classes)
        ],
        "order": sorted([list(p) for p in poset.strict_pairs()]),
        "covering": sorted([list(p) for p in poset.covering]),
    }


def poset_from_dict(doc) -> FinitaryPoset:
    """Inverse of :func:`poset_to_dict`, order taken from the strict pairs."""
    try:
        classes = [frozenset(c["members"]) for c in doc["classes"]]
        pairs = [tuple(p) for p in doc["order"]]
    except (KeyError, TypeError) as exc:
        raise TableError(f"malformed poset JSON: {exc}") from exc
    classes.sort(key=min)
    labels = [min(c) for c in classes]
    where = {lab: k for k, lab in enumerate(labels)}
    order = [[i == j for j in range(len(labels))] for i in range(len(labels))]
    for a, b in pairs:
        order[where[a]][where[b]] = True
    return FinitaryPoset(tuple(classes), order)


def poset_to_text(poset: FinitaryPoset) -> str:
    """Classes, then the strict order as ``a -> b`` lines, then the covering."""
    out = ["classes:"]
    for lab, members in zip(poset.labels, poset.classes):
        out.append(f"  {lab} = {{{', '.join(sorted(members))}}}")
    out.append("order:")
    out.extend(f"  {a} -> {b}" for a, b in sorted(poset.strict_pairs()))
    out.append("covering:")
    out.extend(f"  {a} -> {b}" for a, b in sorted(poset.covering))
    return "\n".join(out) + "\n"


def _dot_id(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def poset_to_dot(poset: FinitaryPoset, name: str = "substitute") -> str:
    """Hasse diagram; an edge ``a -> b`` means a -> b in the order."""
    lines = [f"digraph {_dot_id(name)} {{", "  rankdir=BT;"]
    for lab, members in zip(poset.labels, poset.classes):
        text = ", ".join(sorted(members))
        lines.append(f"  {_dot_id(lab)} [label={_dot_id(text)}];")
    for a, b in sorted(poset.covering):
        lines.append(f"  {_dot_id(a)} -> {_dot_id(b)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def complex_to_dot(cx, name: str = "nerve") -> str:
    """1-skeleton of a simplicial complex as an undirected graph."""
    lines = [f"graph {_dot_id(name)} {{"]
    present = {v for f in cx.faces for v in f}
    for v in cx.vertices:
        if v in present:
            lines.append(f"  {_dot_id(v)};")
    for a, b in cx.edges():
        lines.append(f"  {_dot_id(a)} -- {_dot_id(b)};")
    lines.append("}")
    return "\n".join(lines) + "\n"

"""JSON graph files, cochain export and probe report writers."""
from __future__ import annotations

import csv
import io as _io
import json
import math
from pathlib import Path

import numpy as np

from .cochains import Cochain0, Cochain1, Section
from .errors import AsymmetricWeight, GBLabError, GraphError
from .graph import Region, WeightedGraph, build_graph

__all__ = [
    "ParseError",
    "load_graph",
    "graph_to_dict",
    "dump_graph",
    "cochain_to_dict",
    "cochain_from_dict",
    "section_to_dict",
    "section_from_dict",
    "CSV_HEADER",
    "CSV_COLUMNS",
    "write_probe_csv",
    "probe_csv_text",
    "report_to_dict",
    "read_json_file",
]

CSV_HEADER = "# gblab-probe-csv v1"
CSV_COLUMNS = ("family", "radius", "M", "C", "kernel_dim", "slope", "verdict", "wall_ms")


class ParseError(GBLabError, ValueError):
    """Malformed input file; ``where`` names the line or field at fault."""

    def __init__(self, message, where=None):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


def read_json_file(path) -> object:
    text = Path(path).read_text()
    if not text.strip():
        raise ParseError("file is empty", where=str(path))
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, where=f"{path}:{exc.lineno}:{exc.colno}") from None


def _field(obj, key, where):
    if not isinstance(obj, dict) or key not in obj:
        raise ParseError(f"missing field {key!r}", where=where)
    return obj[key]


def _label(raw):
    # JSON arrays become tuples so labels stay hashable
    return tuple(_label(x) for x in raw) if isinstance(raw, list) else raw


def load_graph(source) -> WeightedGraph:
    """Read a graph from a JSON file path or an already parsed dict.

    Format: ``{"vertices": [{"id", "c"}], "edges": [{"u", "v", "r"}],
    "frontier": [ids]}`` plus optional ``"origin"`` and ``"name"``.
    """
    data = source if isinstance(source, dict) else read_json_file(source)
    if not isinstance(data, dict):
        raise ParseError("top level must be an object")
    verts = _field(data, "vertices", "graph")
    edges = _field(data, "edges", "graph")
    if not isinstance(verts, list) or not verts:
        raise ParseError("must be a nonempty list", where="vertices")
    ids, c = [], []
    for i, v in enumerate(verts):
        ids.append(_label(_field(v, "id", f"vertices[{i}]")))
        try:
            c.append(float(_field(v, "c", f"vertices[{i}]")))
        except (TypeError, ValueError):
            raise ParseError("c must be a number", where=f"vertices[{i}].c") from None
    index = {}
    for i, lab in enumerate(ids):
        if lab in index:
            raise ParseError(f"duplicate vertex id {lab!r}", where=f"vertices[{i}].id")
        index[lab] = i

    def lookup(lab, where):
        try:
            return index[_label(lab)]
        except (KeyError, TypeError):
            raise ParseError(f"unknown vertex id {lab!r}", where=where) from None

    if not isinstance(edges, list):
        raise ParseError("must be a list", where="edges")
    triples = []
    seen = {}
    for j, e in enumerate(edges):
        where = f"edges[{j}]"
        u = lookup(_field(e, "u", where), where + ".u")
        v = lookup(_field(e, "v", where), where + ".v")
        try:
            r = float(_field(e, "r", where))
        except (TypeError, ValueError):
            raise ParseError("r must be a number", where=where + ".r") from None
        if (v, u) in seen and u != v:
            if seen[(v, u)] != r:
                raise AsymmetricWeight(
                    f"{where}: r({ids[u]!r}, {ids[v]!r}) = {r} but the reverse orientation has {seen[(v, u)]}"
                )
        seen[(u, v)] = r
        triples.append((u, v, r))
    frontier = [lookup(f, f"frontier[{k}]") for k, f in enumerate(data.get("frontier", []))]
    origin = data.get("origin")
    origin = lookup(origin, "origin") if origin is not None else None
    return build_graph(c, triples, frontier=frontier, labels=ids, origin=origin, name=str(data.get("name", "")))


def _jsonable_label(lab):
    return [_jsonable_label(x) for x in lab] if isinstance(lab, tuple) else lab


def graph_to_dict(g: WeightedGraph) -> dict:
    out = {
        "name": g.name,
        "vertices": [{"id": _jsonable_label(lab), "c": float(c)} for lab, c in zip(g.labels, g.c)],
        "edges": [
            {"u": _jsonable_label(g.labels[t]), "v": _jsonable_label(g.labels[h]), "r": float(r)}
            for t, h, r in zip(g.tail.tolist(), g.head.tolist(), g.r)
        ],
        "frontier": [_jsonable_label(g.labels[i]) for i in np.flatnonzero(g.frontier)],
    }
    if g.origin is not None:
        out["origin"] = _jsonable_label(g.labels[g.origin])
    return out


def dump_graph(g: WeightedGraph, path) -> None:
    Path(path).write_text(json.dumps(graph_to_dict(g), indent=1) + "\n")


def cochain_to_dict(x: Cochain0 | Cochain1) -> dict:
    """Sparse JSON form: only nonzero entries are listed."""
    g = x.graph
    if isinstance(x, Cochain0):
        entries = [{"index": int(i), "value": float(x.values[i])} for i in np.flatnonzero(x.values)]
        return {"degree": 0, "size": g.n_vertices, "entries": entries}
    entries = [
        {"index": int(j), "tail": int(g.tail[j]), "head": int(g.head[j]), "value": float(x.values[j])}
        for j in np.flatnonzero(x.values)
    ]
    return {"degree": 1, "size": g.n_edges, "entries": entries}


def cochain_from_dict(g: WeightedGraph, data: dict):
    degree = _field(data, "degree", "cochain")
    cls = {0: Cochain0, 1: Cochain1}.get(degree)
    if cls is None:
        raise ParseError(f"degree must be 0 or 1, got {degree!r}", where="cochain.degree")
    x = cls(g)
    if _field(data, "size", "cochain") != x.values.size:
        raise GraphError(f"cochain size {data['size']} does not match the graph ({x.values.size})")
    for k, e in enumerate(_field(data, "entries", "cochain")):
        idx = int(_field(e, "index", f"entries[{k}]"))
        if degree == 1 and "tail" in e and (int(e["tail"]), int(e["head"])) != (int(g.tail[idx]), int(g.head[idx])):
            raise GraphError(f"entries[{k}]: edge {idx} is not ({e['tail']}, {e['head']})")
        x.values[idx] = float(_field(e, "value", f"entries[{k}]"))
    return x


def section_to_dict(s: Section) -> dict:
    return {"f": cochain_to_dict(s.f), "phi": cochain_to_dict(s.phi)}


def section_from_dict(g: WeightedGraph, data: dict) -> Section:
    return Section(cochain_from_dict(g, data["f"]), cochain_from_dict(g, data["phi"]))


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        return repr(x)
    return str(x)


def write_probe_csv(rows, fh, *, timing: bool = False) -> None:
    """Write report rows (dicts keyed by :data:`CSV_COLUMNS`) with the versioned header."""
    fh.write(CSV_HEADER + "\n")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in rows:
        vals = dict(row)
        if not timing:
            vals["wall_ms"] = None
        elif vals.get("wall_ms") is not None:
            vals["wall_ms"] = round(vals["wall_ms"], 3)
        w.writerow([_fmt(vals.get(col)) for col in CSV_COLUMNS])


def probe_csv_text(rows, *, timing: bool = False) -> str:
    buf = _io.StringIO()
    write_probe_csv(rows, buf, timing=timing)
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, Region):
        return {"vertices": obj.vertices.tolist(), "edges": obj.edges.tolist()}
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    return obj


def report_to_dict(rep, *, witness: bool = True) -> dict:
    """Full record of a :class:`~gblab.lab.ProbeReport`, witness included."""
    out = {k: _jsonable(v) for k, v in rep.row().items()}
    out.update(
        convention=rep.convention,
        kernel_hit=rep.kernel_hit,
        K=rep.K.tolist(),
        U=_jsonable(rep.U),
        K_labels=rep.describe_K(),
        U_labels=rep.describe_U(),
        diagnostics=_jsonable(rep.diagnostics),
    )
    if witness and rep.witness is not None:
        out["witness"] = section_to_dict(rep.witness)
    return out

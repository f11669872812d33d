"""JSON encoding of graphs, instances and reports (schema ``fibreprod/1``).

Tuples become JSON arrays and arrays are read back as tuples, so composite
ids such as product vertices ``(u, v)`` survive a round trip unchanged.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any, Optional

from .digraph import Digraph
from .errors import InvalidInput

SCHEMA = "fibreprod/1"


def _plain(x: Any) -> Any:
    if isinstance(x, (tuple, list)):
        return [_plain(y) for y in x]
    if isinstance(x, (set, frozenset)):
        return sorted((_plain(y) for y in x), key=_sort_key)
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    raise TypeError(f"cannot encode {type(x).__name__}")


def _hashable(x: Any) -> Any:
    if isinstance(x, list):
        return tuple(_hashable(y) for y in x)
    if isinstance(x, (int, str)) and not isinstance(x, bool):
        return x
    raise InvalidInput(f"ids must be integers, strings or arrays, got {x!r}")


def _sort_key(x: Any) -> str:
    return json.dumps(x, sort_keys=True)


def graph_to_json(g: Digraph) -> dict:
    edges = []
    for e, (a, b) in g.edges.items():
        rec = {"id": _plain(e), "src": _plain(a), "dst": _plain(b)}
        if g.labels is not None:
            rec["label"] = _plain(g.labels[e])
        edges.append(rec)
    return {
        "schema": SCHEMA,
        "kind": "graph",
        "vertices": [_plain(v) for v in g.vertices],
        "edges": edges,
        "initial": _plain(g.initial),
        "final": _plain(g.final),
    }


def graph_from_json(d: dict) -> Digraph:
    if not isinstance(d, dict):
        raise InvalidInput("graph must be a JSON object")
    _check_schema(d, "graph")
    try:
        verts = [_hashable(v) for v in d.get("vertices", [])]
        edges, labels = {}, {}
        for rec in d["edges"]:
            e = _hashable(rec["id"])
            if e in edges:
                raise InvalidInput(f"duplicate edge id {e!r}")
            edges[e] = (_hashable(rec["src"]), _hashable(rec["dst"]))
            if "label" in rec:
                labels[e] = _hashable(rec["label"])
    except (KeyError, TypeError) as exc:
        raise InvalidInput(f"malformed graph: {exc}") from None
    seen = set(verts)
    for a, b in edges.values():
        for v in (a, b):
            if v not in seen:
                seen.add(v)
                verts.append(v)
    if labels and len(labels) != len(edges):
        raise InvalidInput("either every edge or no edge carries a label")
    return Digraph(
        verts,
        edges,
        [_hashable(v) for v in d.get("initial", [])],
        [_hashable(v) for v in d.get("final", [])],
        labels or (None if edges else {}),
    )


def _check_schema(d: dict, kind: str) -> None:
    schema = d.get("schema", SCHEMA)
    if schema != SCHEMA:
        raise InvalidInput(f"unsupported schema {schema!r}")
    k = d.get("kind", kind)
    if k != kind:
        raise InvalidInput(f"expected a {kind}, got a {k}")


def instance_to_json(gamma: Digraph, lam: Optional[Digraph] = None, **extra) -> dict:
    d = {"schema": SCHEMA, "kind": "instance", "gamma": graph_to_json(gamma)}
    if lam is not None:
        d["lambda"] = graph_to_json(lam)
    for k, v in extra.items():
        if v is not None:
            d[k] = _plain(v)
    return d


def instance_from_json(d: dict) -> dict:
    """``{"gamma": Digraph, "lambda": Digraph | None, ...}``; other fields
    are passed through with arrays turned into tuples."""
    if not isinstance(d, dict):
        raise InvalidInput("instance must be a JSON object")
    _check_schema(d, "instance")
    if "gamma" not in d:
        raise InvalidInput("instance has no 'gamma' graph")
    out = {k: _tuplify(v) for k, v in d.items() if k not in ("gamma", "lambda", "schema", "kind")}
    out["gamma"] = graph_from_json(d["gamma"])
    out["lambda"] = graph_from_json(d["lambda"]) if "lambda" in d else None
    return out


def _tuplify(x: Any) -> Any:
    if isinstance(x, list):
        return tuple(_tuplify(y) for y in x)
    if isinstance(x, dict):
        return {k: _tuplify(v) for k, v in x.items()}
    return x


def dumps(d: Any) -> str:
    """Canonical text: sorted keys, no insignificant whitespace variance."""
    return json.dumps(_plain(d) if not isinstance(d, dict) else d, sort_keys=True, indent=2)


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"malformed JSON: {exc}") from None


def fingerprint(d: Any) -> str:
    canon = json.dumps(d, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]

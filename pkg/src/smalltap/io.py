"""JSON instance and point files with exact rational numbers.

Numbers are written as rational strings (``"5/2"``, ``"3"``).  On input a
cost may be such a string, a decimal string (``"0.25"``) or a JSON integer;
JSON floats are refused because they are not exact.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Mapping

from .errors import TapError
from .instance import Link, TapInstance


class FormatError(TapError, ValueError):
    """A file does not follow the instance or point format."""


INSTANCE_FIELDS = {"name", "vertices", "root", "tree_edges", "links"}
LINK_FIELDS = {"id", "u", "v", "cost"}


def natural_key(s: str) -> tuple:
    """Sort key that orders ``n2`` before ``n10``."""
    return tuple(int(t) if t.isdigit() else t for t in re.split(r"(\d+)", s))


def rational(value: Any, what: str = "number") -> Fraction:
    if isinstance(value, bool):
        raise FormatError(f"{what}: expected a rational, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            pass
    raise FormatError(f"{what}: expected an integer or a rational string, got {value!r}")


def fmt(q: Fraction | int | None) -> str | None:
    return None if q is None else str(Fraction(q))


def _expect(cond: bool, msg: str) -> None:
    if not cond:
        raise FormatError(msg)


def instance_from_dict(doc: Any) -> TapInstance:
    _expect(isinstance(doc, dict), "instance file must hold a JSON object")
    extra = set(doc) - INSTANCE_FIELDS
    _expect(not extra, f"unknown fields {sorted(extra)}")
    missing = {"vertices", "root", "tree_edges", "links"} - set(doc)
    _expect(not missing, f"missing fields {sorted(missing)}")
    name = doc.get("name", "")
    _expect(isinstance(name, str), "name must be a string")
    vertices = doc["vertices"]
    _expect(isinstance(vertices, list) and all(isinstance(v, str) for v in vertices),
            "vertices must be a list of strings")
    _expect(isinstance(doc["root"], str), "root must be a string")
    edges = []
    for e in doc["tree_edges"] if isinstance(doc["tree_edges"], list) else [None]:
        _expect(isinstance(e, list) and len(e) == 2 and all(isinstance(v, str) for v in e),
                f"tree edge {e!r} must be a pair of vertex names")
        edges.append((e[0], e[1]))
    links = []
    for d in doc["links"] if isinstance(doc["links"], list) else [None]:
        _expect(isinstance(d, dict), f"link {d!r} must be an object")
        extra = set(d) - LINK_FIELDS
        _expect(not extra, f"link {d.get('id')!r}: unknown fields {sorted(extra)}")
        _expect(LINK_FIELDS <= set(d), f"link {d!r} needs fields {sorted(LINK_FIELDS)}")
        _expect(all(isinstance(d[k], str) for k in ("id", "u", "v")),
                f"link {d!r}: id, u and v must be strings")
        links.append(Link(d["id"], d["u"], d["v"], rational(d["cost"], f"cost of {d['id']}")))
    return TapInstance(frozenset(vertices), doc["root"], tuple(edges), tuple(links), name)


def instance_to_dict(inst: TapInstance) -> dict:
    """Canonical form: vertices in natural order, edges and links as stored."""
    return {
        "name": inst.name or "",
        "vertices": sorted(inst.vertices, key=natural_key),
        "root": inst.root,
        "tree_edges": [list(e) for e in inst.tree_edges],
        "links": [{"id": l.id, "u": l.u, "v": l.v, "cost": fmt(l.cost)} for l in inst.links],
    }


def point_from_dict(doc: Any) -> dict[str, Fraction]:
    _expect(isinstance(doc, dict) and set(doc) == {"values"} and isinstance(doc["values"], dict),
            'point file must be {"values": {link id: rational, ...}}')
    return {k: rational(v, f"value of {k}") for k, v in doc["values"].items()}


def point_to_dict(point: Mapping[str, Fraction]) -> dict:
    return {"values": {k: fmt(v) for k, v in sorted(point.items(), key=lambda kv: natural_key(kv[0]))}}


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _load_json(path: str | Path) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text, parse_float=_no_float)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc


def _no_float(s: str):
    raise FormatError(f"floating-point literal {s} is not exact; write it as a string")


def load_instance(path: str | Path) -> TapInstance:
    return instance_from_dict(_load_json(path))


def load_point(path: str | Path) -> dict[str, Fraction]:
    return point_from_dict(_load_json(path))


def save_instance(inst: TapInstance, path: str | Path) -> None:
    Path(path).write_text(dumps(instance_to_dict(inst)))


def sorted_ids(ids: Iterable[str]) -> list[str]:
    return sorted(ids, key=natural_key)

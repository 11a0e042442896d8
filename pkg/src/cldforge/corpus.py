"""Dataset schema, loader, and the bundled golden DH–diagram pairs.

A corpus file is a UTF-8 JSON object:

    {"version": 1, "items": [{"id": ..., "dh": ..., "digraph": ...,
                              "source": ..., "expected_loops": [[2, "Reinforcing"]]}]}

`digraph` holds strict-mode digraph text; `expected_loops` is an optional
cross-check against cycle enumeration of the parsed ground truth.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .dotio import DigraphSyntaxError, ParseMode, parse_digraph
from .model import CausalLoopDiagram, LoopKind, enumerate_loops

__all__ = [
    "CorpusItem",
    "Corpus",
    "CorpusIoError",
    "SchemaError",
    "ValidationError",
    "load_corpus",
    "bundled_goldens",
]


class CorpusIoError(Exception):
    """The corpus file could not be read."""


class SchemaError(Exception):
    """The corpus file shape is wrong: bad JSON, missing/extra/mistyped fields."""


class ValidationError(Exception):
    """The corpus file parses but violates a content invariant."""


@dataclass(frozen=True)
class CorpusItem:
    id: str
    dh: str
    ground_truth: CausalLoopDiagram
    source: str
    expected_loops: tuple[tuple[int, LoopKind], ...] | None = None


@dataclass(frozen=True)
class Corpus:
    items: tuple[CorpusItem, ...]

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def get(self, item_id: str) -> CorpusItem:
        for item in self.items:
            if item.id == item_id:
                return item
        raise KeyError(item_id)

    def ids(self) -> list[str]:
        return [item.id for item in self.items]


_ITEM_REQUIRED = {"id": str, "dh": str, "digraph": str, "source": str}
_ITEM_OPTIONAL = {"expected_loops"}
_KIND_BY_NAME = {k.value: k for k in LoopKind}


def _item_schema_check(entry: object, index: int) -> dict:
    label = f"items[{index}]"
    if not isinstance(entry, dict):
        raise SchemaError(f"{label}: expected an object")
    item_id = entry.get("id")
    if isinstance(item_id, str) and item_id:
        label = f"item {item_id!r}"
    for field, typ in _ITEM_REQUIRED.items():
        if field not in entry:
            raise SchemaError(f"{label}: missing field {field!r}")
        if not isinstance(entry[field], typ):
            raise SchemaError(f"{label}: field {field!r} must be a string")
    extras = set(entry) - set(_ITEM_REQUIRED) - _ITEM_OPTIONAL
    if extras:
        raise SchemaError(f"{label}: unknown field {sorted(extras)[0]!r}")
    return entry


def _parse_expected_loops(raw: object, label: str) -> tuple[tuple[int, LoopKind], ...]:
    if not isinstance(raw, list):
        raise SchemaError(f"{label}: field 'expected_loops' must be a list")
    loops: list[tuple[int, LoopKind]] = []
    for pair in raw:
        ok = (
            isinstance(pair, list)
            and len(pair) == 2
            and isinstance(pair[0], int)
            and not isinstance(pair[0], bool)
            and isinstance(pair[1], str)
            and pair[1] in _KIND_BY_NAME
        )
        if not ok:
            raise SchemaError(
                f"{label}: field 'expected_loops' entries must be "
                f"[length, \"Reinforcing\"|\"Balancing\"], got {pair!r}")
        loops.append((pair[0], _KIND_BY_NAME[pair[1]]))
    return tuple(loops)


def _build_item(entry: dict, index: int) -> CorpusItem:
    entry = _item_schema_check(entry, index)
    item_id = entry["id"]
    if not entry["dh"].strip():
        raise ValidationError(f"item {item_id!r}: dh is empty")
    try:
        diagram, _ = parse_digraph(entry["digraph"], ParseMode.STRICT)
    except DigraphSyntaxError as exc:
        raise ValidationError(f"item {item_id!r}: invalid digraph: {exc}") from exc

    expected: tuple[tuple[int, LoopKind], ...] | None = None
    if "expected_loops" in entry:
        expected = _parse_expected_loops(entry["expected_loops"], f"item {item_id!r}")
        actual = sorted((lp.length, lp.kind.value) for lp in enumerate_loops(diagram))
        declared = sorted((length, kind.value) for length, kind in expected)
        if actual != declared:
            raise ValidationError(
                f"item {item_id!r}: expected_loops {declared} does not match "
                f"enumerated loops {actual}")

    return CorpusItem(
        id=item_id,
        dh=entry["dh"],
        ground_truth=diagram,
        source=entry["source"],
        expected_loops=expected,
    )


def load_corpus(path: str | Path) -> Corpus:
    """Load and fully validate a corpus file; see module docstring for shape."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise CorpusIoError(f"cannot read corpus file {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"corpus file {path} is not valid JSON: {exc}") from exc

    if not isinstance(data, dict):
        raise SchemaError("corpus file must be a JSON object")
    extras = set(data) - {"version", "items"}
    if extras:
        raise SchemaError(f"unknown top-level field {sorted(extras)[0]!r}")
    if data.get("version") != 1:
        raise SchemaError(f"unsupported corpus version {data.get('version')!r}")
    if not isinstance(data.get("items"), list):
        raise SchemaError("field 'items' must be a list")

    items = [_build_item(entry, i) for i, entry in enumerate(data["items"])]
    seen: set[str] = set()
    for item in items:
        if item.id in seen:
            raise ValidationError(f"duplicate item id {item.id!r}")
        seen.add(item.id)
    return Corpus(items=tuple(items))


@lru_cache(maxsize=1)
def bundled_goldens() -> Corpus:
    """The four fully specified golden DH–diagram pairs shipped in the package."""
    resource = resources.files("cldforge").joinpath("data/goldens.json")
    with resources.as_file(resource) as path:
        return load_corpus(path)

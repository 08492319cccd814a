"""Exact finite martingale tables and their on-disk document format.

A table stores one dyadic value per node of the binary tree up to a fixed
depth, flat in breadth-first order (index 2^l - 1 + v for the node of
length l and value v).  Everything here is exact: identity checks compare
dyadics with zero tolerance, and serialization round-trips losslessly.
"""

from __future__ import annotations

import json
from typing import Callable, Iterator, Optional

from .bits import BitString
from .dyadic import Dyadic
from .errors import ParseError

FORMAT_VERSION = 1
DOCUMENT_KIND = "martingale-table"


def _node_index(s: BitString) -> int:
    return (1 << len(s)) - 1 + s.v


class MartingaleTable:
    """Total dyadic-valued map on tree nodes of length ≤ depth."""

    def __init__(self, depth: int, values: list):
        if depth < 0:
            raise ValueError("depth must be ≥ 0")
        want = (1 << (depth + 1)) - 1
        if len(values) != want:
            raise ValueError(f"need {want} values for depth {depth}, got {len(values)}")
        self.depth = depth
        self.values = list(values)

    @staticmethod
    def from_function(depth: int, fn: Callable[[BitString], Dyadic]) -> "MartingaleTable":
        values = []
        for l in range(depth + 1):
            for v in range(1 << l):
                values.append(fn(BitString.raw(l, v)))
        return MartingaleTable(depth, values)

    def value(self, s: BitString) -> Dyadic:
        if len(s) > self.depth:
            raise KeyError(f"node {s!r} deeper than table depth {self.depth}")
        return self.values[_node_index(s)]

    def nodes(self) -> Iterator[tuple[BitString, Dyadic]]:
        for l in range(self.depth + 1):
            for v in range(1 << l):
                s = BitString.raw(l, v)
                yield s, self.values[_node_index(s)]

    def interior_nodes(self) -> Iterator[tuple[BitString, Dyadic]]:
        for l in range(self.depth):
            for v in range(1 << l):
                s = BitString.raw(l, v)
                yield s, self.values[_node_index(s)]

    def leaf_values(self) -> list:
        return self.values[(1 << self.depth) - 1 :]

    def leaf_average_below(self, s: BitString) -> Dyadic:
        """Mean of the depth-level leaves under N_s — the value a martingale
        table must carry at s, recomputed the slow way."""
        l = len(s)
        total = Dyadic.zero()
        count = 1 << (self.depth - l)
        base = s.v << (self.depth - l)
        leaves = self.leaf_values()
        for i in range(count):
            total = total + leaves[base + i]
        return total.mul_pow2(-(self.depth - l))

    def to_document(self, spec_echo: Optional[dict] = None, truncation: Optional[int] = None) -> dict:
        return {
            "version": FORMAT_VERSION,
            "kind": DOCUMENT_KIND,
            "spec": spec_echo,
            "truncation": truncation,
            "depth": self.depth,
            "values": [v.to_json() for v in self.values],
        }

    @staticmethod
    def from_document(doc: dict) -> tuple["MartingaleTable", Optional[dict], Optional[int]]:
        if not isinstance(doc, dict) or doc.get("kind") != DOCUMENT_KIND:
            raise ParseError("not a martingale-table document")
        if doc.get("version") != FORMAT_VERSION:
            raise ParseError(f"unsupported table version {doc.get('version')!r}")
        depth = doc.get("depth")
        raw = doc.get("values")
        if not isinstance(depth, int) or not isinstance(raw, list):
            raise ParseError("table document needs integer depth and a values array")
        try:
            values = [Dyadic.from_json(x) for x in raw]
        except (ValueError, TypeError) as e:
            raise ParseError(f"bad dyadic in table values: {e}") from None
        table = MartingaleTable(depth, values)
        return table, doc.get("spec"), doc.get("truncation")


def dumps_document(doc: dict) -> str:
    """Canonical serialization: sorted keys, no whitespace drift, newline
    terminated.  Byte-identical for identical documents."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def loads_document(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise ParseError("top-level JSON value must be an object")
    return doc

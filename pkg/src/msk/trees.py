"""Height-labelled trees: Reeb graphs and merge trees."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Any, Mapping


@dataclass(frozen=True)
class ReebGraph:
    """Nodes carry heights; each edge is stored as (lower node, upper node)."""

    heights: Mapping[str, float]
    edges: tuple[tuple[str, str], ...]
    kind: str = "reeb"

    @classmethod
    def build(cls, heights: Mapping[str, float], edges, kind: str = "reeb") -> ReebGraph:
        oriented = []
        for a, b in edges:
            if heights[a] > heights[b]:
                a, b = b, a
            oriented.append((a, b))
        oriented.sort(key=lambda e: (heights[e[0]], heights[e[1]], e))
        return cls(dict(heights), tuple(oriented), kind)

    @property
    def nodes(self) -> list[str]:
        return sorted(self.heights, key=lambda v: (self.heights[v], v))

    def degree(self, v: str) -> int:
        return sum((a == v) + (b == v) for a, b in self.edges)

    def up(self, v: str) -> list[str]:
        return [b for a, b in self.edges if a == v]

    def down(self, v: str) -> list[str]:
        return [a for a, b in self.edges if b == v]

    def is_tree(self) -> bool:
        if len(self.edges) != len(self.heights) - 1:
            return False
        parent = {v: v for v in self.heights}

        def find(x: str) -> str:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in self.edges:
            ra, rb = find(a), find(b)
            if ra == rb:
                return False
            parent[ra] = rb
        return True

    def height_edges(self) -> Counter:
        """Multiset of edges written as height pairs; heights are distinct so this fixes the graph up to iso."""
        return Counter((self.heights[a], self.heights[b]) for a, b in self.edges)

    def isomorphic(self, other: ReebGraph) -> bool:
        """Height-preserving isomorphism (forced by distinct heights)."""
        return (sorted(self.heights.values()) == sorted(other.heights.values())
                and self.height_edges() == other.height_edges())

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind,
                "nodes": [{"id": v, "height": self.heights[v]} for v in self.nodes],
                "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> ReebGraph:
        heights = {str(n["id"]): n["height"] for n in data["nodes"]}
        return cls.build(heights, [tuple(map(str, e)) for e in data["edges"]], data.get("kind", "reeb"))

    def to_dot(self, name: str | None = None) -> str:
        lines = [f"graph {name or self.kind} {{", "  rankdir=BT;"]
        for v in self.nodes:
            lines.append(f'  "{v}" [label="{v}\\n{self.heights[v]:g}"];')
        for a, b in self.edges:
            lines.append(f'  "{a}" -- "{b}";')
        lines.append("}")
        return "\n".join(lines) + "\n"

"""Information-theoretic field widths used for size accounting."""
from __future__ import annotations

from dataclasses import dataclass


def width(k: int) -> int:
    """Bits needed to write one of ``k`` distinct values (at least 1)."""
    return max(1, (int(k) - 1).bit_length())


@dataclass(frozen=True)
class BitWidths:
    """Per-graph widths: vertex ids, ports, distances and small counters."""

    vertex: int
    port: int
    dist: int
    count: int

    @classmethod
    def for_graph(cls, n: int, max_degree: int, max_dist: int) -> "BitWidths":
        return cls(
            vertex=width(n),
            port=width(max_degree),
            dist=width(max_dist + 1),
            count=width(width(n) + 1),
        )

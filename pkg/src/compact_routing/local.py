"""Routing inside vicinities: every vertex stores the first port toward each
member of ``B(u, ell)``; forwarding hop by hop stays on a shortest path."""
from __future__ import annotations

from dataclasses import dataclass

from .bits import BitWidths, width
from .graph import Graph
from .oracle import ShortestPaths, VicinityIndex


class NotInVicinity(KeyError):
    pass


@dataclass(frozen=True)
class LocalRoutingTable:
    owner: int
    ell: int
    entries: dict[int, int]  # member -> first port, owner excluded

    def __len__(self):
        return len(self.entries)

    def bits(self, bw: BitWidths, degree: int) -> int:
        return len(self.entries) * (bw.vertex + width(degree))


def local_entries(sp: ShortestPaths, vic: VicinityIndex, u: int) -> dict[int, int]:
    g = sp.g
    nh = sp.next_hop
    return {
        int(v): g.port(u, int(nh[v, u]))
        for v in vic.members[u].tolist()
        if v != u
    }


def build_local_table(g: Graph | ShortestPaths, u: int, ell: int) -> LocalRoutingTable:
    sp = g if isinstance(g, ShortestPaths) else ShortestPaths(g)
    vic = VicinityIndex(sp, ell)
    return LocalRoutingTable(u, vic.ell, local_entries(sp, vic, u))


def build_local_tables(sp: ShortestPaths, ell: int) -> list[LocalRoutingTable]:
    vic = VicinityIndex(sp, ell)
    return [LocalRoutingTable(u, vic.ell, local_entries(sp, vic, u)) for u in range(sp.n)]


def local_next_hop(table: LocalRoutingTable, dest: int) -> int | None:
    """Port toward ``dest``; ``None`` when already there."""
    if dest == table.owner:
        return None
    try:
        return table.entries[dest]
    except KeyError:
        raise NotInVicinity(f"{dest} not in vicinity of {table.owner}") from None


def local_route(g: Graph, tables: list[LocalRoutingTable], u: int, v: int) -> list[int]:
    """Forward from ``u`` to ``v`` consulting only each current vertex's table."""
    path = [u]
    x = u
    while True:
        port = local_next_hop(tables[x], v)
        if port is None:
            return path
        x = g.neighbor(x, port)
        path.append(x)
        if len(path) > g.n:
            raise RuntimeError("local routing loop")

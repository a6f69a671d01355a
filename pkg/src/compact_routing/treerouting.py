"""Interval routing on trees with a heavy-path decomposition.

Each node keeps its DFS interval, the interval end of its heavy child, the
ports toward its heavy child and its parent, and its light depth (number of
light edges on its root path).  The label of a node is its DFS number plus
the ports taken on the light edges of its root path, top-down.  A node
forwards using only its own entry and the destination label:

* destination outside my interval: go to the parent;
* inside my heavy child's interval: go to the heavy child;
* otherwise: the light port at position ``light_depth`` of the label.

Since a root path crosses at most ``log2 n`` light edges, labels and node
entries stay within ``O(log^2 n)`` bits.
"""
from __future__ import annotations

from typing import Hashable, Iterable, NamedTuple

from .bits import BitWidths, width
from .graph import Graph

ARRIVED = -1


class TreeError(ValueError):
    pass


class TreeNode(NamedTuple):
    tree: Hashable
    enter: int
    exit: int
    heavy_exit: int  # == enter when the node is a leaf
    heavy_port: int
    parent_port: int  # -1 at the root
    light_depth: int


class TreeLabel(NamedTuple):
    tree: Hashable
    enter: int
    light_ports: tuple[int, ...]


def tree_next_hop(node: TreeNode, label: TreeLabel) -> int:
    """Port toward the labelled node, or ``ARRIVED``."""
    if label.tree != node.tree:
        raise TreeError(f"foreign label: tree {label.tree!r} at a node of {node.tree!r}")
    e = label.enter
    if e == node.enter:
        return ARRIVED
    if e < node.enter or e > node.exit:
        if node.parent_port < 0:
            raise TreeError("label outside the tree")
        return node.parent_port
    if e <= node.heavy_exit:
        return node.heavy_port
    return label.light_ports[node.light_depth]


class TreeRoutingScheme:
    """Node entries and labels of one routed tree."""

    def __init__(self, tree_id, root: int, nodes: dict[int, TreeNode], labels: dict[int, TreeLabel], parent: dict[int, int]):
        self.tree_id = tree_id
        self.root = root
        self.nodes = nodes
        self.labels = labels
        self.parent = parent

    def __len__(self):
        return len(self.nodes)

    def __contains__(self, v):
        return v in self.nodes

    def route(self, g: Graph, u: int, v: int) -> list[int]:
        """Vertices visited when forwarding from ``u`` to ``v`` (``u`` excluded)."""
        label = self.labels[v]
        hops = []
        x = u
        for _ in range(len(self.nodes) + 1):
            port = tree_next_hop(self.nodes[x], label)
            if port == ARRIVED:
                return hops
            x = g.neighbor(x, port)
            hops.append(x)
        raise TreeError("tree routing did not terminate")

    def tree_path(self, u: int, v: int) -> list[int]:
        """The unique tree path ``u -> v`` computed from parent pointers."""
        def up(x):
            chain = [x]
            while chain[-1] != self.root:
                chain.append(self.parent[chain[-1]])
            return chain

        pu, pv = up(u), up(v)
        on_v = {x: i for i, x in enumerate(pv)}
        for i, x in enumerate(pu):
            if x in on_v:
                return pu[:i] + pv[: on_v[x] + 1][::-1]
        raise TreeError("nodes are not in the same tree")


def node_bits(node: TreeNode, bw: BitWidths, degree: int) -> int:
    # interval ends and heavy boundary, two local ports, light depth
    return 3 * bw.vertex + 2 * width(degree) + bw.count


def label_bits(label: TreeLabel, bw: BitWidths) -> int:
    return bw.vertex + bw.count + len(label.light_ports) * bw.port


def build_tree_routing(g: Graph, tree_edges: Iterable[tuple[int, int]], root: int, tree_id=None) -> TreeRoutingScheme:
    """Build tables and labels for the tree spanned by ``tree_edges``.

    ``tree_edges`` must be edges of ``g`` forming a tree that contains
    ``root`` (an empty edge set gives the single-node tree ``{root}``).
    """
    adj: dict[int, list[int]] = {root: []}
    count = 0
    for a, b in tree_edges:
        if not g.has_edge(a, b):
            raise TreeError(f"({a}, {b}) is not an edge of the graph")
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
        count += 1
    if count != len(adj) - 1:
        raise TreeError("edge set is not a tree (cycle or disconnected)")
    parent = {root: root}
    order = [root]
    for x in order:
        for y in adj[x]:
            if y == parent[x]:
                continue
            if y in parent:
                raise TreeError("edge set is not a tree (cycle)")
            parent[y] = x
            order.append(y)
    if len(order) != len(adj):
        raise TreeError("edge set is not a tree (disconnected)")
    return _build(g, root, parent, order, tree_id)


def build_tree_from_parents(g: Graph, root: int, parent: dict[int, int], tree_id=None) -> TreeRoutingScheme:
    """Same as :func:`build_tree_routing` from a ``child -> parent`` map.

    ``parent`` must contain every node; the root maps to itself.
    """
    children: dict[int, list[int]] = {v: [] for v in parent}
    for v, p in parent.items():
        if v != root:
            children[p].append(v)
    order = [root]
    for x in order:
        order.extend(children[x])
    if len(order) != len(parent):
        raise TreeError("parent map is not a tree rooted at the given root")
    return _build(g, root, dict(parent), order, tree_id)


def _build(g: Graph, root: int, parent: dict[int, int], bfs_order: list[int], tree_id) -> TreeRoutingScheme:
    tree_id = root if tree_id is None else tree_id
    children: dict[int, list[int]] = {v: [] for v in bfs_order}
    for v in bfs_order[1:]:
        children[parent[v]].append(v)
    size = {}
    for v in reversed(bfs_order):
        size[v] = 1 + sum(size[c] for c in children[v])
    heavy = {}
    for v, cs in children.items():
        if cs:
            cs.sort()
            heavy[v] = max(cs, key=lambda c: (size[c], -c))

    enter: dict[int, int] = {}
    light_depth: dict[int, int] = {root: 0}
    light_ports: dict[int, tuple[int, ...]] = {root: ()}
    stack = [root]
    while stack:
        v = stack.pop()
        enter[v] = len(enter)
        cs = children[v]
        if not cs:
            continue
        h = heavy[v]
        for c in reversed(cs):
            if c != h:
                light_depth[c] = light_depth[v] + 1
                light_ports[c] = light_ports[v] + (g.port(v, c),)
                stack.append(c)
        light_depth[h] = light_depth[v]
        light_ports[h] = light_ports[v]
        stack.append(h)  # popped first: heavy subtree gets the next interval

    nodes = {}
    labels = {}
    for v in bfs_order:
        ex = enter[v] + size[v] - 1
        if v in heavy:
            h = heavy[v]
            hx, hp = enter[h] + size[h] - 1, g.port(v, h)
        else:
            hx, hp = enter[v], -1
        pp = -1 if v == root else g.port(v, parent[v])
        nodes[v] = TreeNode(tree_id, enter[v], ex, hx, hp, pp, light_depth[v])
        labels[v] = TreeLabel(tree_id, enter[v], light_ports[v])
    return TreeRoutingScheme(tree_id, root, nodes, labels, parent)

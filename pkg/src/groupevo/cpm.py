"""Clique percolation communities on timeframe snapshots.

Communities are unions of k-cliques connected through shared (k-1)-subsets.
They are computed from the maximal cliques of the undirected projection: two
maximal cliques of size >= k percolate into one another exactly when they share
at least k-1 nodes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, Iterable, List, Protocol, Set

from .temporal import NodeId, SocialNetwork, TemporalSocialNetwork, node_key, sorted_nodes

Graph = Dict[NodeId, Set[NodeId]]


@dataclass(frozen=True)
class Group:
    frame_index: int
    group_id: int
    members: FrozenSet[NodeId]

    def __post_init__(self) -> None:
        if not self.members:
            raise ValueError("a group needs at least one member")
        object.__setattr__(self, "members", frozenset(self.members))

    def __len__(self) -> int:
        return len(self.members)


def undirected_projection(net: SocialNetwork) -> Graph:
    """Adjacency sets with ``{x, y}`` present iff ``x->y`` or ``y->x`` is an edge."""
    adj: Graph = {n: set() for n in net.nodes}
    for x, y in net.edges:
        adj[x].add(y)
        adj[y].add(x)
    return adj


def enumerate_maximal_cliques(graph: Graph) -> List[FrozenSet[NodeId]]:
    """All maximal cliques, via Bron-Kerbosch with Tomita pivoting.

    Isolated nodes are reported as singleton cliques; an empty graph gives an
    empty list. Output is sorted canonically (by sorted member keys).
    """
    cliques: List[FrozenSet[NodeId]] = []
    if not graph:
        return cliques

    # Iterative form of the recursion: each stack entry is (R, P, X, candidates).
    def pivot_candidates(P: set, X: set) -> list:
        pivot = max(P | X, key=lambda u: (len(P & graph[u]), node_key(u)))
        return sorted_nodes(P - graph[pivot])

    P0 = set(graph)
    stack = [([], P0, set(), pivot_candidates(P0, set()))]
    while stack:
        R, P, X, cands = stack[-1]
        if not cands:
            stack.pop()
            continue
        v = cands.pop()
        nbrs = graph[v]
        R2, P2, X2 = R + [v], P & nbrs, X & nbrs
        P.discard(v)
        X.add(v)
        if not P2:
            if not X2:
                cliques.append(frozenset(R2))
            continue
        stack.append((R2, P2, X2, pivot_candidates(P2, X2)))

    cliques.sort(key=_set_key)
    return cliques


def _set_key(members: Iterable[NodeId]) -> tuple:
    return tuple(node_key(n) for n in sorted_nodes(members))


def k_clique_communities(graph: Graph, k: int = 5) -> List[FrozenSet[NodeId]]:
    """Clique percolation communities for clique size ``k`` (k >= 3).

    Overlapping membership is allowed. Communities are sorted by their
    smallest member, then by the rest of the sorted member list.
    """
    if k < 3:
        raise ValueError("k must be at least 3")
    cliques = [c for c in enumerate_maximal_cliques(graph) if len(c) >= k]
    if not cliques:
        return []

    parent = list(range(len(cliques)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    membership: Dict[NodeId, List[int]] = {}
    for ci, clique in enumerate(cliques):
        for node in clique:
            membership.setdefault(node, []).append(ci)

    for ci, clique in enumerate(cliques):
        shared: Dict[int, int] = {}
        for node in clique:
            for cj in membership[node]:
                if cj > ci:
                    shared[cj] = shared.get(cj, 0) + 1
        for cj, count in shared.items():
            if count >= k - 1:
                ri, rj = find(ci), find(cj)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)

    merged: Dict[int, set] = {}
    for ci, clique in enumerate(cliques):
        merged.setdefault(find(ci), set()).update(clique)
    return sorted((frozenset(m) for m in merged.values()), key=_set_key)


class CommunityDetector(Protocol):
    def __call__(self, net: SocialNetwork) -> List[FrozenSet[NodeId]]: ...


@dataclass(frozen=True)
class CPMDetector:
    """Clique percolation on the undirected, unweighted projection."""

    k: int = 5

    def __call__(self, net: SocialNetwork) -> List[FrozenSet[NodeId]]:
        return k_clique_communities(undirected_projection(net), self.k)


def detect_groups(
    tsn: TemporalSocialNetwork,
    detector: Callable[[SocialNetwork], List[FrozenSet[NodeId]]] = CPMDetector(),
) -> Dict[int, List[Group]]:
    """Groups for every frame, numbered from 0 in detector output order."""
    return {
        frame.index: [
            Group(frame.index, gid, members) for gid, members in enumerate(detector(frame.snapshot))
        ]
        for frame in tsn
    }

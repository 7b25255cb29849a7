"""Per-node importance within a frame.

Two measures are provided: distinct-neighbour degree and social position. Social
position is the fixed point of

    SP(x) = (1 - eps) + eps * sum_{y -> x} SP(y) * C(y, x)

where the commitment ``C(y, x)`` is the share of ``y``'s outgoing interaction
weight directed at ``x``. Nodes without outgoing edges commit nothing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve_triangular

from .errors import NonConvergence
from .temporal import NodeId, SocialNetwork, TemporalSocialNetwork, sorted_nodes


@dataclass
class ImportanceMap:
    frame_index: int
    values: Dict[NodeId, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for node, value in self.values.items():
            if value < 0:
                raise ValueError(f"negative importance for {node!r}")

    def __getitem__(self, node: NodeId) -> float:
        return self.values[node]

    def get(self, node: NodeId, default: float = 0.0) -> float:
        return self.values.get(node, default)


def degree_importance(net: SocialNetwork, frame_index: int = 0) -> ImportanceMap:
    """In-degree plus out-degree, counting distinct neighbours per direction."""
    values = {n: 0.0 for n in net.nodes}
    for x, y in net.edges:
        values[x] += 1.0
        values[y] += 1.0
    return ImportanceMap(frame_index, values)


def social_position(
    net: SocialNetwork,
    epsilon: float = 0.9,
    tol: float = 1e-9,
    max_iter: int = 200,
    frame_index: int = 0,
    method: str = "gauss-seidel",
) -> ImportanceMap:
    """Social position of every node by iterative sweeps from SP = 1.

    With ``method="gauss-seidel"`` nodes are swept in a fixed order (sorted
    ids), each update using values already refreshed in the same sweep. With
    ``"jacobi"`` every update uses the previous sweep only; that keeps the total
    exactly at |V| on graphs without sink nodes but needs more sweeps.
    Iteration stops once the largest change in a sweep is at most ``tol``.

    Raises:
        NonConvergence: ``max_iter`` sweeps ran without reaching ``tol``.
    """
    if not 0.0 <= epsilon < 1.0:
        raise ValueError("epsilon must lie in [0, 1)")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if method not in ("gauss-seidel", "jacobi"):
        raise ValueError(f"unknown method {method!r}")
    nodes = sorted_nodes(net.nodes)
    n = len(nodes)
    if n == 0:
        return ImportanceMap(frame_index, {})
    if epsilon == 0.0:
        return ImportanceMap(frame_index, {v: 1.0 for v in nodes})

    pos = {v: i for i, v in enumerate(nodes)}
    out_weight = np.zeros(n)
    for (x, _), w in net.edges.items():
        out_weight[pos[x]] += w
    rows, cols, data = [], [], []
    for (x, y), w in net.edges.items():
        # row = receiver, col = giver
        rows.append(pos[y])
        cols.append(pos[x])
        data.append(epsilon * w / out_weight[pos[x]])
    M = sp.csr_matrix((data, (rows, cols)), shape=(n, n))
    b = np.full(n, 1.0 - epsilon)
    if method == "jacobi":
        step = lambda x: b + M @ x  # noqa: E731
    else:
        # x = b + M x  ->  (I - L) x_new = b + U x_old, L/U the strict lower/upper parts
        lower = (sp.identity(n, format="csr") - sp.tril(M, k=-1)).tocsr()
        upper = sp.triu(M, k=1).tocsr()
        step = lambda x: spsolve_triangular(lower, b + upper @ x, lower=True)  # noqa: E731

    x = np.ones(n)
    residual = np.inf
    for _ in range(max_iter):
        x_new = step(x)
        residual = float(np.max(np.abs(x_new - x)))
        x = x_new
        if residual <= tol:
            return ImportanceMap(frame_index, {v: float(x[i]) for v, i in pos.items()})
    raise NonConvergence(max_iter, residual)


def frame_importance(
    tsn: TemporalSocialNetwork,
    measure: str = "social-position",
    epsilon: float = 0.9,
    tol: float = 1e-9,
    max_iter: int = 200,
) -> Dict[int, ImportanceMap]:
    if measure == "degree":
        return {f.index: degree_importance(f.snapshot, f.index) for f in tsn}
    if measure == "social-position":
        return {
            f.index: social_position(f.snapshot, epsilon, tol, max_iter, f.index) for f in tsn
        }
    raise ValueError(f"unknown importance measure {measure!r}")

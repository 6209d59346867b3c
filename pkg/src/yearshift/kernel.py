"""Convolution partial tree kernel over ordered labeled trees.

K(a, b) sums, over every node pair with matching (kind, label), a score
counting shared ordered child subsequences: lambda decays with the span a
subsequence covers, mu with depth.  The normalized form lies in [0, 1] and
equals 1 exactly when the trees are structurally identical.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

from .grct import GrctNode, GrctTree, structure_key


class KernelError(ValueError):
    pass


@dataclass(frozen=True)
class KernelParams:
    lam: float = 0.4
    mu: float = 0.4
    tolerance: float = 1e-9

    def __post_init__(self) -> None:
        if not 0 < self.lam <= 1:
            raise KernelError(f"lambda must be in (0, 1], got {self.lam}")
        if not 0 < self.mu <= 1:
            raise KernelError(f"mu must be in (0, 1], got {self.mu}")
        if self.tolerance <= 0:
            raise KernelError(f"tolerance must be positive, got {self.tolerance}")


def _postorder(root: GrctNode) -> list[GrctNode]:
    order: list[GrctNode] = []
    stack: list[tuple[GrctNode, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
        else:
            stack.append((node, True))
            stack.extend((c, False) for c in reversed(node.children))
    return order


def ptk(a: GrctTree, b: GrctTree, params: KernelParams = KernelParams()) -> float:
    """Kernel value via the quadratic subsequence dynamic program.

    For children sequences c1, c2 of a matching node pair, T(i, j) sums the
    weights of all equal-length subsequence pairs ending exactly at (i, j);
    extending a pair by one step multiplies its weight by lambda per column
    the span grows on either side, which the prefix table S accumulates.

    Arguments are put in a canonical order first so that ptk(a, b) and
    ptk(b, a) run the identical float operations and agree bit for bit.
    """
    if structure_key(b.root) < structure_key(a.root):
        a, b = b, a
    lam, mu = params.lam, params.mu
    lam2 = lam * lam
    nodes_a = _postorder(a.root)
    nodes_b = _postorder(b.root)
    index_a = {id(n): i for i, n in enumerate(nodes_a)}
    index_b = {id(n): j for j, n in enumerate(nodes_b)}
    delta: list[list[float]] = [[0.0] * len(nodes_b) for _ in nodes_a]

    total = 0.0
    for i, n1 in enumerate(nodes_a):
        row = delta[i]
        for j, n2 in enumerate(nodes_b):
            if n1.kind is not n2.kind or n1.label != n2.label:
                continue
            c1, c2 = n1.children, n2.children
            m, n = len(c1), len(c2)
            if m == 0 or n == 0:
                d = mu * lam2
            else:
                # child rows precede their parents in postorder, so they are
                # already filled when this pair is reached
                rows = [delta[index_a[id(c)]] for c in c1]
                cols = [index_b[id(c)] for c in c2]
                s_prev = [0.0] * (n + 1)
                t_sum = 0.0
                for ci in range(m):
                    drow = rows[ci]
                    s_cur = [0.0] * (n + 1)
                    for cj in range(1, n + 1):
                        t = lam2 * drow[cols[cj - 1]] * (1.0 + s_prev[cj - 1])
                        t_sum += t
                        s_cur[cj] = t + lam * s_prev[cj] + lam * s_cur[cj - 1] - lam2 * s_prev[cj - 1]
                    s_prev = s_cur
                d = mu * (lam2 + t_sum)
            row[j] = d
            total += d
    return total


def ncptk(a: GrctTree, b: GrctTree, params: KernelParams = KernelParams()) -> float:
    """Normalized kernel K(a,b) / sqrt(K(a,a) K(b,b)), in [0, 1]."""
    kaa = ptk(a, a, params)
    kbb = ptk(b, b, params)
    if kaa <= 0 or kbb <= 0:
        raise KernelError("cannot normalize: self-kernel is zero")
    return ptk(a, b, params) / math.sqrt(kaa * kbb)


def ptk_oracle(a: GrctTree, b: GrctTree, params: KernelParams = KernelParams(),
               max_nodes: int = 12) -> float:
    """Same value as ptk, by explicit enumeration of child subsequences.

    Exponential; refuses inputs above max_nodes total nodes.  Kept free of
    the dynamic program so the two can check each other.
    """
    if a.node_count + b.node_count > max_nodes:
        raise KernelError(
            f"oracle limited to {max_nodes} total nodes, got {a.node_count + b.node_count}")
    lam, mu = params.lam, params.mu

    def delta(n1: GrctNode, n2: GrctNode) -> float:
        if n1.kind is not n2.kind or n1.label != n2.label:
            return 0.0
        c1, c2 = n1.children, n2.children
        acc = 0.0
        for p in range(1, min(len(c1), len(c2)) + 1):
            for j1 in combinations(range(len(c1)), p):
                span1 = j1[-1] - j1[0] + 1
                for j2 in combinations(range(len(c2)), p):
                    span2 = j2[-1] - j2[0] + 1
                    prod = lam ** (span1 + span2)
                    for x, y in zip(j1, j2):
                        prod *= delta(c1[x], c2[y])
                        if prod == 0.0:
                            break
                    acc += prod
        return mu * (lam * lam + acc)

    return sum(delta(n1, n2)
               for n1 in _postorder(a.root)
               for n2 in _postorder(b.root))

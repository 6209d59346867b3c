"""Identity graphs over parsed batches and maximal-clique error clusters.

Two parses belong to the same error cluster when their FEATS-mode trees
are structurally identical (normalized kernel exactly 1).  Identity is an
equivalence, so the graph falls apart into disjoint cliques; the clique
enumeration is still the general pivoting algorithm so it stays usable on
arbitrary graphs.
"""
from __future__ import annotations

from dataclasses import dataclass

from .grct import GrctTree, grct_equal, structure_key
from .kernel import KernelParams, ncptk


@dataclass(frozen=True)
class IdentityGraph:
    n: int
    edges: frozenset[tuple[int, int]]

    def neighbors(self) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in range(self.n)]
        for i, j in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        return adj


@dataclass(frozen=True)
class ErrorClusterSet:
    clusters: tuple[tuple[int, ...], ...]
    representatives: tuple[int, ...]
    pairwise_ncptk: tuple[tuple[float, ...], ...]

    @property
    def cluster_count(self) -> int:
        return len(self.clusters)

    def sizes(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.clusters)

    def between_cluster_values(self) -> list[float]:
        """NCPTK of every unordered representative pair."""
        k = len(self.representatives)
        return [self.pairwise_ncptk[i][j] for i in range(k) for j in range(i + 1, k)]


def identity_graph(trees: list[GrctTree]) -> IdentityGraph:
    """Edge (i, j) iff the trees are structurally identical."""
    buckets: dict[tuple, list[int]] = {}
    for i, tree in enumerate(trees):
        buckets.setdefault(structure_key(tree.root), []).append(i)
    edges = set()
    for members in buckets.values():
        for a in range(len(members)):
            for b in range(a + 1, len(members)):
                edges.add((members[a], members[b]))
    return IdentityGraph(len(trees), frozenset(edges))


def bron_kerbosch(graph: IdentityGraph) -> list[list[int]]:
    """All maximal cliques, with max-neighborhood pivoting.

    Each clique comes back sorted; the list is ordered lexicographically,
    i.e. by smallest member first.  Isolated vertices appear as singletons.
    """
    adj = graph.neighbors()
    cliques: list[list[int]] = []

    def expand(r: set[int], p: set[int], x: set[int]) -> None:
        if not p and not x:
            cliques.append(sorted(r))
            return
        pivot = max(p | x, key=lambda u: (len(p & adj[u]), -u))
        for v in sorted(p - adj[pivot]):
            expand(r | {v}, p & adj[v], x & adj[v])
            p.remove(v)
            x.add(v)

    if graph.n:
        expand(set(), set(range(graph.n)), set())
    return sorted(cliques)


def connected_components(graph: IdentityGraph) -> list[list[int]]:
    """Components of the graph; on identity graphs these equal the cliques."""
    adj = graph.neighbors()
    seen: set[int] = set()
    comps = []
    for start in range(graph.n):
        if start in seen:
            continue
        comp = []
        stack = [start]
        seen.add(start)
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        comps.append(sorted(comp))
    return comps


def cluster_batch(trees: list[GrctTree], params: KernelParams = KernelParams()) -> ErrorClusterSet:
    """Maximal cliques of the identity graph plus representative kernels.

    Within a cluster all trees are identical, so one representative per
    cluster (its smallest index) carries the pairwise NCPTK matrix.
    """
    cliques = bron_kerbosch(identity_graph(trees))
    reps = [c[0] for c in cliques]
    k = len(reps)
    matrix = [[1.0] * k for _ in range(k)]
    for i in range(k):
        for j in range(i + 1, k):
            value = ncptk(trees[reps[i]], trees[reps[j]], params)
            matrix[i][j] = value
            matrix[j][i] = value
    return ErrorClusterSet(tuple(tuple(c) for c in cliques), tuple(reps),
                           tuple(tuple(row) for row in matrix))


def assert_identity_cliques(trees: list[GrctTree], clusters: ErrorClusterSet,
                            params: KernelParams = KernelParams()) -> None:
    """Sanity hooks used by the test-suite: partition + representative gaps."""
    covered = sorted(i for c in clusters.clusters for i in c)
    if covered != list(range(len(trees))):
        raise AssertionError("clusters do not partition the batch")
    for c in clusters.clusters:
        first = trees[c[0]]
        for i in c[1:]:
            if not grct_equal(first, trees[i]):
                raise AssertionError("non-identical trees share a cluster")
    for value in clusters.between_cluster_values():
        if value >= 1.0 - params.tolerance:
            raise AssertionError("distinct cluster representatives too similar")

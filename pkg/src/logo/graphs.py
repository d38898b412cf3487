"""Decomposable information filtering networks: MST and TMFG clique trees.

Both builders work on a correlation matrix and are fully deterministic:
ties are always broken by lexicographic order on sorted vertex indices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import NotPositiveDefinite
from .linalg import PD_RTOL, SymMatrix, cholesky_dense, invert_spd_dense

# Exhaustive seed search up to this size; above it, restrict to 4-subsets of
# the SEED_TOP_K highest-strength vertices (C(p,4) is infeasible at p~300).
SEED_EXHAUSTIVE_P = 30
SEED_TOP_K = 20


@dataclass(frozen=True)
class CliqueTree:
    """A decomposable graph recorded as cliques plus weighted separators.

    cliques: vertex tuples (sorted within each clique, construction order).
    separators: (vertex tuple, k) pairs where k is the separator degree,
    i.e. the number of clique-tree components its removal creates.
    """

    p: int
    cliques: tuple
    separators: tuple

    def __post_init__(self):
        object.__setattr__(
            self, "cliques", tuple(tuple(int(v) for v in c) for c in self.cliques)
        )
        object.__setattr__(
            self,
            "separators",
            tuple((tuple(int(v) for v in s), int(k)) for s, k in self.separators),
        )

    @property
    def edges(self) -> frozenset:
        """Unordered vertex pairs covered by the cliques."""
        pairs = set()
        for c in self.cliques:
            for a, b in itertools.combinations(sorted(c), 2):
                pairs.add((a, b))
        return frozenset(pairs)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "cliques": [list(c) for c in self.cliques],
            "separators": [{"vertices": list(s), "k": k} for s, k in self.separators],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CliqueTree":
        return cls(
            p=int(d["p"]),
            cliques=tuple(tuple(c) for c in d["cliques"]),
            separators=tuple((tuple(s["vertices"]), int(s["k"])) for s in d["separators"]),
        )

    def to_edge_list(self) -> str:
        """Plain text edge list, 0-based, one 'i j' pair per line."""
        return "\n".join(f"{i} {j}" for i, j in sorted(self.edges)) + "\n"


def build_mst(corr: SymMatrix, variances=None) -> CliqueTree:
    """Maximum spanning tree over squared-correlation weights, as a clique tree.

    Cliques are the tree edges; separators are the internal vertices with
    k equal to the vertex degree.  The tree depends on the correlations
    only; ``variances`` is accepted for interface symmetry with the
    assembly step and is not used.

    Kruskal over edges sorted by (-weight, i, j), so equal weights resolve
    to the lexicographically smallest edge.
    """
    p = corr.dim
    w = corr.to_dense() ** 2
    iu, ju = np.triu_indices(p, 1)
    order = np.lexsort((ju, iu, -w[iu, ju]))

    parent = list(range(p))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    chosen = []
    degree = np.zeros(p, dtype=int)
    for k in order:
        i, j = int(iu[k]), int(ju[k])
        ri, rj = find(i), find(j)
        if ri == rj:
            continue
        parent[ri] = rj
        chosen.append((i, j))
        degree[i] += 1
        degree[j] += 1
        if len(chosen) == p - 1:
            break

    separators = tuple(
        ((int(v),), int(degree[v])) for v in range(p) if degree[v] >= 2
    )
    return CliqueTree(p=p, cliques=tuple(chosen), separators=separators)


def _batched_dets(r: np.ndarray, subsets: np.ndarray) -> np.ndarray:
    blocks = r[subsets[:, :, None], subsets[:, None, :]]
    return np.linalg.det(blocks)


def seed_clique_search(corr: SymMatrix, approx: bool = False) -> tuple:
    """4-subset with the smallest correlation determinant.

    Exhaustive for p <= SEED_EXHAUSTIVE_P; otherwise searches all 4-subsets
    of the SEED_TOP_K vertices with the largest squared-correlation strength.
    In approx mode the determinant is replaced by its second-order proxy,
    i.e. the subset with the largest sum of pairwise squared correlations.
    """
    p = corr.dim
    if p < 4:
        raise ValueError(f"need p >= 4 for a seed clique, got {p}")
    r = corr.to_dense()
    if p <= SEED_EXHAUSTIVE_P:
        candidates = np.arange(p)
    else:
        strength = (r**2).sum(axis=1) - 1.0
        by_strength = np.lexsort((np.arange(p), -strength))
        candidates = np.sort(by_strength[:SEED_TOP_K])
    subsets = np.array(
        list(itertools.combinations(candidates.tolist(), 4)), dtype=int
    )
    if approx:
        w = r**2
        pair_sums = np.zeros(len(subsets))
        for a, b in itertools.combinations(range(4), 2):
            pair_sums += w[subsets[:, a], subsets[:, b]]
        best = int(np.argmax(pair_sums))
    else:
        best = int(np.argmin(_batched_dets(r, subsets)))
    return tuple(int(v) for v in subsets[best])


class _FaceCache:
    """Per-face candidate scores for the greedy TMFG insertion.

    For a live triangular face we keep the score of inserting every vertex
    and the current best (score, vertex).  Scores are 'smaller is better':
    the exact mode uses the determinant ratio residual
    1 - r_v^T R_face^{-1} r_v, the approx mode uses minus the sum of the
    squared correlations between the vertex and the face.
    """

    def __init__(self, r: np.ndarray, alive: np.ndarray, approx: bool):
        self.r = r
        self.alive = alive
        self.approx = approx
        self.tris = []
        self.rows = []
        self.best = []
        self.live = []

    def add_face(self, tri: tuple):
        tri = tuple(sorted(tri))
        rv = self.r[list(tri), :]
        if self.approx:
            row = -((rv**2).sum(axis=0))
        else:
            m = invert_spd_dense(
                self.r[np.ix_(tri, tri)], label=f"face {tri}"
            )
            row = 1.0 - np.einsum("ab,av,bv->v", m, rv, rv)
        self.tris.append(tri)
        self.rows.append(row)
        self.live.append(True)
        self.best.append(self._argbest(len(self.rows) - 1))

    def _argbest(self, fi: int):
        masked = np.where(self.alive, self.rows[fi], np.inf)
        v = int(np.argmin(masked))
        return (float(masked[v]), v)

    def pick(self):
        """Best (face index, vertex); ties resolve to the smallest
        (face triple, vertex) in lexicographic order."""
        best_fi = -1
        best_key = None
        for fi in range(len(self.tris)):
            if not self.live[fi]:
                continue
            score, v = self.best[fi]
            key = (score, self.tris[fi], v)
            if best_key is None or key < best_key:
                best_key = key
                best_fi = fi
        return best_fi, best_key[2], best_key[0]

    def consume(self, fi: int, v: int):
        self.live[fi] = False
        self.alive[v] = False
        for other in range(len(self.tris)):
            if self.live[other] and self.best[other][1] == v:
                self.best[other] = self._argbest(other)


def build_tmfg(corr: SymMatrix, approx_gains: bool = False) -> CliqueTree:
    """Triangulated maximally filtered graph as a clique tree.

    Starts from the 4-clique with the smallest correlation determinant and
    repeatedly inserts, inside an existing triangular face, the vertex with
    the largest separator-to-clique determinant ratio
    det(R_face) / det(R_face+v).  The result has 3(p-2) edges, p-3
    tetrahedral cliques and p-4 triangle separators, each with k = 2.

    With ``approx_gains`` the log-determinant gain is replaced by its
    second-order proxy, the sum of squared correlations between the
    candidate vertex and the face.
    """
    p = corr.dim
    if p < 4:
        raise ValueError(f"TMFG requires p >= 4, got {p}")
    r = corr.to_dense()

    seed = seed_clique_search(corr, approx=approx_gains)
    if not approx_gains:
        cholesky_dense(r[np.ix_(seed, seed)], label=f"seed clique {seed}")

    alive = np.ones(p, dtype=bool)
    alive[list(seed)] = False
    cliques = [tuple(sorted(seed))]
    separators = []

    cache = _FaceCache(r, alive, approx_gains)
    for tri in itertools.combinations(sorted(seed), 3):
        cache.add_face(tri)

    for _ in range(p - 4):
        fi, v, score = cache.pick()
        tri = cache.tris[fi]
        if not approx_gains and score <= PD_RTOL:
            raise NotPositiveDefinite(3, label=f"clique {tuple(sorted(tri + (v,)))}")
        cliques.append(tuple(sorted(tri + (v,))))
        separators.append((tri, 2))
        cache.consume(fi, v)
        a, b, c = tri
        cache.add_face((a, b, v))
        cache.add_face((a, c, v))
        cache.add_face((b, c, v))

    return CliqueTree(p=p, cliques=tuple(cliques), separators=tuple(separators))


def validate_chordal(tree: CliqueTree):
    """Chordality check via maximum cardinality search.

    Returns (is_chordal, ordering) where the ordering is the candidate
    perfect elimination ordering (the reversed MCS visit order); it is a
    valid witness exactly when the flag is True.
    """
    p = tree.p
    adj = [set() for _ in range(p)]
    for i, j in tree.edges:
        adj[i].add(j)
        adj[j].add(i)

    visited = np.zeros(p, dtype=bool)
    weight = np.zeros(p, dtype=int)
    mcs_order = []
    for _ in range(p):
        w = np.where(visited, -1, weight)
        v = int(np.argmax(w))
        visited[v] = True
        mcs_order.append(v)
        for u in adj[v]:
            if not visited[u]:
                weight[u] += 1

    peo = list(reversed(mcs_order))
    pos = {v: i for i, v in enumerate(peo)}
    for v in peo:
        later = [u for u in adj[v] if pos[u] > pos[v]]
        if not later:
            continue
        f = min(later, key=pos.get)
        for u in later:
            if u != f and u not in adj[f]:
                return False, peo
    return True, peo

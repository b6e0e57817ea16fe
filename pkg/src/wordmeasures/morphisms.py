"""Morphisms of multi core graphs and the quotient lattices behind them.

Every surjective morphism out of a graph ``G`` is, up to isomorphism of
the codomain, the quotient of ``G`` by a vertex partition.  Partitions
whose direct quotient is already folded are called *closed* here; they are
exactly the ones that appear as first legs of decompositions.  Most of the
work in this module happens on lattices of closed partitions.

Partitions are stored as restricted-growth tuples: ``p[v]`` is the block of
vertex ``v`` and blocks are numbered by first appearance.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

from .errors import BudgetExceeded, InvariantViolation
from .graphs import (LabeledGraphDraft, MultiCoreGraph, colored_canonical_form,
                     fold, prune)

DEFAULT_MAX_VERTICES = 14
Partition = tuple[int, ...]


# ---------------------------------------------------------------- morphisms

@dataclass(frozen=True, eq=False)
class GraphMorphism:
    domain: MultiCoreGraph
    codomain: MultiCoreGraph
    vertex_map: tuple[int, ...]

    def __post_init__(self):
        vm = tuple(self.vertex_map)
        object.__setattr__(self, "vertex_map", vm)
        if self.domain.rank != self.codomain.rank:
            raise ValueError("rank mismatch")
        if len(vm) != self.domain.num_vertices:
            raise ValueError("vertex map must be total on the domain")
        for v in vm:
            if not 0 <= v < self.codomain.num_vertices:
                raise ValueError(f"vertex image {v} outside codomain")
        for t, h, lab in self.domain.edges:
            if self.codomain.out[lab][vm[t]] != vm[h]:
                raise ValueError(f"edge {(t, h, lab)} has no image in the codomain")

    @cached_property
    def edge_map(self) -> tuple[int, ...]:
        index = {(t, lab): i for i, (t, _, lab) in enumerate(self.codomain.edges)}
        return tuple(index[self.vertex_map[t], lab] for t, _, lab in self.domain.edges)

    @cached_property
    def is_surjective(self) -> bool:
        return (len(set(self.edge_map)) == self.codomain.num_edges
                and len(set(self.vertex_map)) == self.codomain.num_vertices)

    @cached_property
    def is_injective(self) -> bool:
        return len(set(self.vertex_map)) == len(self.vertex_map)

    def is_isomorphism(self) -> bool:
        return self.is_injective and self.is_surjective

    def fiber_partition(self) -> Partition:
        return canonical_partition(self.vertex_map)

    def to_json(self) -> str:
        def enc(g):
            return {"rank": g.rank, "num_vertices": g.num_vertices,
                    "edges": [list(e) for e in g.edges]}
        return json.dumps({"domain": enc(self.domain), "codomain": enc(self.codomain),
                           "vertex_map": list(self.vertex_map)})

    @staticmethod
    def from_json(text: str) -> "GraphMorphism":
        d = json.loads(text)

        def dec(x):
            return MultiCoreGraph(x["rank"], x["num_vertices"],
                                  tuple(tuple(e) for e in x["edges"]))
        return GraphMorphism(dec(d["domain"]), dec(d["codomain"]), tuple(d["vertex_map"]))

    def __repr__(self):
        return f"GraphMorphism({self.domain!r} -> {self.codomain!r})"


def make_morphism(domain: MultiCoreGraph, codomain: MultiCoreGraph,
                  vertex_map: Sequence[int]) -> GraphMorphism:
    return GraphMorphism(domain, codomain, tuple(vertex_map))


def identity(g: MultiCoreGraph) -> GraphMorphism:
    return GraphMorphism(g, g, tuple(range(g.num_vertices)))


def to_bouquet(g: MultiCoreGraph, bouquet_graph: MultiCoreGraph) -> GraphMorphism:
    """The unique morphism onto a one-vertex graph."""
    return GraphMorphism(g, bouquet_graph, (0,) * g.num_vertices)


def compose(second: GraphMorphism, first: GraphMorphism) -> GraphMorphism:
    """``second ∘ first``."""
    if first.codomain != second.domain:
        raise ValueError("domain mismatch in composition")
    return GraphMorphism(first.domain, second.codomain,
                         tuple(second.vertex_map[v] for v in first.vertex_map))


@dataclass(frozen=True)
class ImageFactorization:
    image: MultiCoreGraph
    onto: GraphMorphism
    inclusion: GraphMorphism


def image(eta: GraphMorphism) -> ImageFactorization:
    """Factor ``eta`` as a surjection onto its image followed by an inclusion."""
    cod = eta.codomain
    used_edges = sorted(set(eta.edge_map))
    used_vertices = sorted(set(eta.vertex_map))
    renum = {v: i for i, v in enumerate(used_vertices)}
    edges = tuple((renum[cod.edges[i][0]], renum[cod.edges[i][1]], cod.edges[i][2])
                  for i in used_edges)
    sigma = MultiCoreGraph(cod.rank, len(used_vertices), edges)
    onto = GraphMorphism(eta.domain, sigma, tuple(renum[v] for v in eta.vertex_map))
    inclusion = GraphMorphism(sigma, cod, tuple(used_vertices))
    return ImageFactorization(sigma, onto, inclusion)


@dataclass(frozen=True)
class Pullback:
    graph: MultiCoreGraph
    first: GraphMorphism
    second: GraphMorphism


def pullback(eta1: GraphMorphism, eta2: GraphMorphism) -> Pullback:
    """Fiber product of two morphisms with a common codomain, pruned to its core."""
    if eta1.codomain != eta2.codomain:
        raise ValueError("pullback needs a shared codomain")
    g1, g2 = eta1.domain, eta2.domain
    pairs = [(u, v) for u in range(g1.num_vertices) for v in range(g2.num_vertices)
             if eta1.vertex_map[u] == eta2.vertex_map[v]]
    index = {p: i for i, p in enumerate(pairs)}
    edges = []
    for (u, v), i in index.items():
        for lab in range(g1.rank):
            u2, v2 = g1.out[lab][u], g2.out[lab][v]
            if u2 >= 0 and v2 >= 0:
                edges.append((i, index[u2, v2], lab))
    core, renum = prune(LabeledGraphDraft(g1.rank, len(pairs), tuple(edges)))
    proj1 = [0] * core.num_vertices
    proj2 = [0] * core.num_vertices
    for (u, v), i in index.items():
        if renum[i] >= 0:
            proj1[renum[i]] = u
            proj2[renum[i]] = v
    return Pullback(core, GraphMorphism(core, g1, tuple(proj1)),
                    GraphMorphism(core, g2, tuple(proj2)))


# ---------------------------------------------------------------- partitions

def canonical_partition(labels: Sequence) -> Partition:
    """Restricted-growth form of the partition with the given block labels."""
    seen: dict = {}
    return tuple(seen.setdefault(x, len(seen)) for x in labels)


def partition_blocks(p: Partition) -> list[list[int]]:
    blocks: list[list[int]] = [[] for _ in range(max(p, default=-1) + 1)]
    for v, b in enumerate(p):
        blocks[b].append(v)
    return blocks


def partition_norm(p: Partition) -> int:
    """Number of vertex identifications: sum of (block size - 1)."""
    return len(p) - (max(p, default=-1) + 1)


def refines(p: Partition, q: Partition) -> bool:
    """True when every block of ``p`` lies inside a block of ``q``."""
    image: dict[int, int] = {}
    for a, b in zip(p, q):
        if image.setdefault(a, b) != b:
            return False
    return True


@dataclass(frozen=True)
class VertexPartition:
    blocks: Partition

    @staticmethod
    def of(labels: Sequence) -> "VertexPartition":
        return VertexPartition(canonical_partition(labels))

    @property
    def num_blocks(self) -> int:
        return max(self.blocks, default=-1) + 1

    @property
    def norm(self) -> int:
        return partition_norm(self.blocks)

    def refines(self, other: "VertexPartition") -> bool:
        return refines(self.blocks, other.blocks)


def is_closed(g: MultiCoreGraph, p: Partition) -> bool:
    """Whether the direct quotient of ``g`` by ``p`` is folded."""
    for lab in range(g.rank):
        fwd: dict[int, int] = {}
        bwd: dict[int, int] = {}
        for t, h, el in g.edges:
            if el != lab:
                continue
            a, b = p[t], p[h]
            if fwd.setdefault(a, b) != b or bwd.setdefault(b, a) != a:
                return False
    return True


def quotient_euler(g: MultiCoreGraph, p: Partition) -> int:
    """Euler characteristic of the direct quotient by a closed partition."""
    nblocks = max(p, default=-1) + 1
    return nblocks - len({(p[t], lab) for t, _, lab in g.edges})


def direct_quotient(g: MultiCoreGraph, p: Partition) -> MultiCoreGraph:
    nblocks = max(p, default=-1) + 1
    edges = tuple(sorted({(p[t], p[h], lab) for t, h, lab in g.edges}))
    return MultiCoreGraph(g.rank, nblocks, edges)


def closure(g: MultiCoreGraph, labels: Sequence[int]) -> Partition:
    """Finest closed partition coarser than the one given by ``labels``.

    This is the effect of gluing vertices and then folding.
    """
    n = g.num_vertices
    parent = list(range(n))
    first: dict[int, int] = {}
    for v, b in enumerate(labels):
        parent[v] = first.setdefault(b, v)

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b) -> bool:
        a, b = find(a), find(b)
        if a == b:
            return False
        parent[b] = a
        return True

    changed = True
    while changed:
        changed = False
        for lab in range(g.rank):
            fwd: dict[int, int] = {}
            bwd: dict[int, int] = {}
            for t, h, el in g.edges:
                if el != lab:
                    continue
                a, b = find(t), find(h)
                if a in fwd:
                    changed |= union(fwd[a], b)
                else:
                    fwd[a] = b
                a, b = find(t), find(h)
                if b in bwd:
                    changed |= union(bwd[b], a)
                else:
                    bwd[b] = a
    return canonical_partition([find(v) for v in range(n)])


def quotient(g: MultiCoreGraph, p: VertexPartition | Sequence[int]
             ) -> tuple[MultiCoreGraph, GraphMorphism]:
    """Glue the blocks of ``p``, fold, and return the induced surjection."""
    labels = p.blocks if isinstance(p, VertexPartition) else tuple(p)
    if len(labels) != g.num_vertices:
        raise ValueError("partition size does not match the graph")
    nb = max(labels, default=-1) + 1
    glued = LabeledGraphDraft(g.rank, nb, tuple((labels[t], labels[h], lab)
                                                 for t, h, lab in g.edges))
    folded, trace = fold(glued)
    core, renum = prune(folded)
    vm = tuple(renum[trace[labels[v]]] for v in range(g.num_vertices))
    if any(v < 0 for v in vm):
        raise InvariantViolation("quotient of a core graph lost a vertex")
    return core, GraphMorphism(g, core, vm)


# ---------------------------------------------------------------- enumeration

def _bfs_order(g: MultiCoreGraph) -> list[int]:
    order, seen = [], [False] * g.num_vertices
    for s in range(g.num_vertices):
        if seen[s]:
            continue
        seen[s] = True
        queue = deque([s])
        while queue:
            v = queue.popleft()
            order.append(v)
            for u in g.neighbors(v):
                if not seen[u]:
                    seen[u] = True
                    queue.append(u)
    return order


def enumerate_closed_partitions(g: MultiCoreGraph, top: Sequence[int] | None = None,
                                max_vertices: int = DEFAULT_MAX_VERTICES) -> list[Partition]:
    """All closed partitions of ``V(g)`` refining ``top`` (default: everything).

    Backtracking over vertices in BFS order.  For each label the partial
    maps block -> block along edges are kept with reference counts, so a
    conflict (two edges with one label leaving or entering a block but
    landing in different blocks) is caught as soon as it appears.
    """
    n = g.num_vertices
    if n > max_vertices:
        raise BudgetExceeded("max_vertices", max_vertices, n)
    if top is None:
        top = (0,) * n
    order = _bfs_order(g)
    rank = g.rank
    block = [-1] * n
    block_fiber: list = []
    fwd = [dict() for _ in range(rank)]
    bwd = [dict() for _ in range(rank)]
    results: list[Partition] = []

    def add(lab, a, b, log) -> bool:
        f, r = fwd[lab], bwd[lab]
        fa, rb = f.get(a), r.get(b)
        if (fa is not None and fa[0] != b) or (rb is not None and rb[0] != a):
            return False
        if fa is None:
            f[a] = [b, 1]
        else:
            fa[1] += 1
        if rb is None:
            r[b] = [a, 1]
        else:
            rb[1] += 1
        log.append((lab, a, b))
        return True

    def undo(log):
        for lab, a, b in reversed(log):
            f, r = fwd[lab], bwd[lab]
            f[a][1] -= 1
            if not f[a][1]:
                del f[a]
            r[b][1] -= 1
            if not r[b][1]:
                del r[b]

    def assign(v, k) -> list | None:
        block[v] = k
        log: list = []
        for lab in range(rank):
            u = g.out[lab][v]
            if u >= 0 and block[u] >= 0 and not add(lab, k, block[u], log):
                undo(log)
                block[v] = -1
                return None
            u = g.inn[lab][v]
            if u >= 0 and u != v and block[u] >= 0 and not add(lab, block[u], k, log):
                undo(log)
                block[v] = -1
                return None
        return log

    def rec(i):
        if i == n:
            results.append(canonical_partition(block))
            return
        v = order[i]
        fib = top[v]
        nb = len(block_fiber)
        for k in range(nb + 1):
            if k < nb:
                if block_fiber[k] != fib:
                    continue
            else:
                block_fiber.append(fib)
            log = assign(v, k)
            if log is not None:
                rec(i + 1)
                undo(log)
                block[v] = -1
            if k == nb:
                block_fiber.pop()

    rec(0)
    results.sort()
    return results


# ---------------------------------------------------------------- lattice

class ClosedPartitionLattice:
    """Closed partitions of ``V(graph)`` below ``top``, with merge steps.

    A *merge step* glues two blocks that lie in one block of ``top`` and
    takes the closure.  It lowers the Euler characteristic of the quotient
    by at most one; steps lowering it by exactly one are *exact*.
    """

    def __init__(self, graph: MultiCoreGraph, top: Sequence[int] | None = None,
                 max_vertices: int = DEFAULT_MAX_VERTICES):
        self.graph = graph
        n = graph.num_vertices
        self.top = canonical_partition(top if top is not None else (0,) * n)
        if not is_closed(graph, self.top):
            raise InvariantViolation("top partition is not closed")
        self.elements = enumerate_closed_partitions(graph, self.top, max_vertices)
        self.index = {p: i for i, p in enumerate(self.elements)}
        self.euler = [quotient_euler(graph, p) for p in self.elements]
        self.bottom = self.index[tuple(range(n))]
        self.top_index = self.index[self.top]
        self._succ: dict[int, frozenset[int]] = {}
        self._exact_pred: dict[int, list[int]] | None = None
        self._free_memo: dict[tuple[int, int], bool] = {}
        self._up: dict[int, frozenset[int]] = {}

    def __len__(self):
        return len(self.elements)

    def leq(self, i: int, j: int) -> bool:
        return refines(self.elements[i], self.elements[j])

    def up_set(self, i: int) -> frozenset[int]:
        """Indices of all elements coarser than or equal to element ``i``."""
        if i not in self._up:
            p = self.elements[i]
            self._up[i] = frozenset(j for j, q in enumerate(self.elements) if refines(p, q))
        return self._up[i]

    def merge_successors(self, i: int) -> frozenset[int]:
        if i not in self._succ:
            p = self.elements[i]
            blocks = partition_blocks(p)
            out = set()
            for a, b in combinations(range(len(blocks)), 2):
                if self.top[blocks[a][0]] != self.top[blocks[b][0]]:
                    continue
                labels = [a if x == b else x for x in p]
                out.add(self.index[closure(self.graph, labels)])
            self._succ[i] = frozenset(out)
        return self._succ[i]

    def exact_successors(self, i: int) -> list[int]:
        c = self.euler[i]
        return [j for j in self.merge_successors(i) if self.euler[j] == c - 1]

    def exact_predecessors(self, j: int) -> list[int]:
        if self._exact_pred is None:
            pred: dict[int, list[int]] = {k: [] for k in range(len(self.elements))}
            for i in range(len(self.elements)):
                for k in self.exact_successors(i):
                    pred[k].append(i)
            self._exact_pred = pred
        return self._exact_pred[j]

    def exact_predecessors_at(self, j: int, candidates: Iterable[int]) -> list[int]:
        """Exact predecessors of ``j`` found among ``candidates`` only."""
        return [i for i in candidates if j in self.exact_successors(i)]

    def is_free(self, i: int, j: int) -> bool:
        """Whether the induced morphism between the quotients is free."""
        key = (i, j)
        if key not in self._free_memo:
            if i == j:
                res = True
            else:
                q = self.elements[j]
                res = any(refines(self.elements[k], q) and self.is_free(k, j)
                          for k in self.exact_successors(i))
            self._free_memo[key] = res
        return self._free_memo[key]

    def is_algebraic(self, i: int, j: int) -> bool:
        """Whether the induced morphism between the quotients is algebraic.

        It is not exactly when some free non-isomorphic second leg exists;
        any such leg ends with an exact merge step from one level above ``j``.
        """
        p = self.elements[i]
        return not any(refines(p, self.elements[k]) for k in self.exact_predecessors(j))

    def distance(self, i: int, j: int) -> int:
        """Fewest merge steps turning element ``i`` into element ``j``."""
        target = self.elements[j]
        dist = {i: 0}
        queue = deque([i])
        while queue:
            k = queue.popleft()
            if k == j:
                return dist[k]
            for m in self.merge_successors(k):
                if m not in dist and refines(self.elements[m], target):
                    dist[m] = dist[k] + 1
                    queue.append(m)
        raise InvariantViolation("target partition not reachable by merges")

    def levels(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for i, c in enumerate(self.euler):
            out.setdefault(c, []).append(i)
        return out


# ---------------------------------------------------------------- decompositions

@dataclass(frozen=True, eq=False)
class Decomposition:
    """A factorization of ``eta`` through the quotient by ``partition``."""

    eta: GraphMorphism
    partition: Partition

    @cached_property
    def middle(self) -> MultiCoreGraph:
        return direct_quotient(self.eta.domain, self.partition)

    @cached_property
    def first(self) -> GraphMorphism:
        return GraphMorphism(self.eta.domain, self.middle, self.partition)

    @cached_property
    def second(self) -> GraphMorphism:
        vm = [0] * self.middle.num_vertices
        for v, b in enumerate(self.partition):
            vm[b] = self.eta.vertex_map[v]
        return GraphMorphism(self.middle, self.eta.codomain, tuple(vm))

    @property
    def euler_characteristic(self) -> int:
        return quotient_euler(self.eta.domain, self.partition)


def decomposition_lattice(eta: GraphMorphism, max_vertices: int = DEFAULT_MAX_VERTICES
                          ) -> ClosedPartitionLattice:
    return ClosedPartitionLattice(eta.domain, eta.fiber_partition(), max_vertices)


def enumerate_decomp_B(eta: GraphMorphism, max_vertices: int = DEFAULT_MAX_VERTICES
                       ) -> list[Decomposition]:
    parts = enumerate_closed_partitions(eta.domain, eta.fiber_partition(), max_vertices)
    return [Decomposition(eta, p) for p in parts]


def enumerate_decomp_B3(eta: GraphMorphism, max_vertices: int = DEFAULT_MAX_VERTICES
                        ) -> list[tuple[Partition, Partition]]:
    """Nested pairs ``(P1, P2)`` of closed partitions with ``P1`` refining ``P2``."""
    lat = decomposition_lattice(eta, max_vertices)
    return [(lat.elements[i], lat.elements[j])
            for i in range(len(lat)) for j in sorted(lat.up_set(i))]


# ---------------------------------------------------------------- norms

def _require_surjective(eta: GraphMorphism):
    if not eta.is_surjective:
        raise ValueError("morphism is not surjective")


def b_norm(eta: GraphMorphism, max_states: int = 1_000_000) -> int:
    """Fewest glue-and-fold steps realizing a surjective ``eta``."""
    _require_surjective(eta)
    g = eta.domain
    top = eta.fiber_partition()
    start = tuple(range(g.num_vertices))
    if start == top:
        return 0
    dist = {start: 0}
    queue = deque([start])
    while queue:
        p = queue.popleft()
        blocks = partition_blocks(p)
        for a, b in combinations(range(len(blocks)), 2):
            if top[blocks[a][0]] != top[blocks[b][0]]:
                continue
            q = closure(g, [a if x == b else x for x in p])
            if q in dist:
                continue
            dist[q] = dist[p] + 1
            if q == top:
                return dist[q]
            if len(dist) > max_states:
                raise BudgetExceeded("max_states", max_states)
            queue.append(q)
    raise InvariantViolation("fiber partition unreachable")


def norm(eta: GraphMorphism) -> int:
    """Norm of ``eta``: the B-norm of its surjective part plus the Euler
    characteristic drop of the inclusion of its image."""
    fac = image(eta)
    return (b_norm(fac.onto) + fac.image.euler_characteristic
            - eta.codomain.euler_characteristic)


def is_free(eta: GraphMorphism) -> bool:
    return norm(eta) == eta.domain.euler_characteristic - eta.codomain.euler_characteristic


def is_algebraic(eta: GraphMorphism, max_vertices: int = DEFAULT_MAX_VERTICES) -> bool:
    if not eta.is_surjective:
        return False
    lat = decomposition_lattice(eta, max_vertices)
    level = lat.euler[lat.top_index] + 1
    above = [i for i, c in enumerate(lat.euler) if c == level]
    return not lat.exact_predecessors_at(lat.top_index, above)


@dataclass(frozen=True)
class AlgebraicFreeDecomposition:
    algebraic: GraphMorphism
    free: GraphMorphism
    middle: MultiCoreGraph


def alg_free_decomposition(eta: GraphMorphism, max_vertices: int = DEFAULT_MAX_VERTICES
                           ) -> AlgebraicFreeDecomposition:
    """Split ``eta`` into an algebraic surjection followed by a free morphism.

    The middle graph is the quotient with largest Euler characteristic
    among those from which the rest of ``eta`` is free.
    """
    lat = decomposition_lattice(eta, max_vertices)
    top = lat.top_index
    free = [i for i in range(len(lat)) if lat.is_free(i, top)]
    best = max(lat.euler[i] for i in free)
    winners = [i for i in free if lat.euler[i] == best]
    if len(winners) != 1:
        raise InvariantViolation("algebraic-free decomposition is not unique")
    d = Decomposition(eta, lat.elements[winners[0]])
    return AlgebraicFreeDecomposition(d.first, d.second, d.middle)


# ---------------------------------------------------------------- critical sets

@dataclass(frozen=True)
class CriticalReport:
    """``chi_max`` is ``None`` when no algebraic non-isomorphic first leg exists."""

    chi_max: int | None
    critical: tuple[Decomposition, ...]


def algebraic_at_level(lat: ClosedPartitionLattice, level: int) -> list[int]:
    """Non-discrete elements at ``level`` whose first leg is algebraic."""
    here = [i for i, c in enumerate(lat.euler) if c == level and i != lat.bottom]
    if not here:
        return []
    above = [i for i, c in enumerate(lat.euler) if c == level + 1]
    hit: set[int] = set()
    for k in above:
        hit.update(lat.exact_successors(k))
    return [i for i in here if i not in hit]


def critical_scan(lat: ClosedPartitionLattice, below: int | None = None
                  ) -> tuple[int | None, list[int]]:
    """Highest level (optionally strictly below ``below``) holding a
    non-discrete algebraic element, and those elements."""
    for level in sorted(set(lat.euler), reverse=True):
        if below is not None and level >= below:
            continue
        found = algebraic_at_level(lat, level)
        if found:
            return level, found
    return None, []


def chi_max_and_crit(eta: GraphMorphism, max_vertices: int = DEFAULT_MAX_VERTICES
                     ) -> CriticalReport:
    lat = decomposition_lattice(eta, max_vertices)
    level, found = critical_scan(lat)
    return CriticalReport(level, tuple(Decomposition(eta, lat.elements[i]) for i in found))


# ---------------------------------------------------------------- immediate-morphism oracle

def _walks(delta: MultiCoreGraph, start: int, max_len: int):
    """Reduced walks from ``start``: yields (codes, end vertex)."""
    stack = [((), start)]
    while stack:
        codes, v = stack.pop()
        yield codes, v
        if len(codes) == max_len:
            continue
        for lab in range(delta.rank):
            for code, u in ((2 * lab, delta.out[lab][v]), (2 * lab + 1, delta.inn[lab][v])):
                if u < 0 or (codes and codes[-1] == code ^ 1):
                    continue
                stack.append((codes + (code,), u))


def _attach(state_edges, n, colors, start, end, codes, delta, start_color):
    """Add a path spelling ``codes`` from ``start`` to ``end`` (new interior vertices)."""
    edges = list(state_edges)
    colors = list(colors)
    ids = [start]
    cur = start_color
    for k, code in enumerate(codes):
        lab = code >> 1
        nxt = delta.inn[lab][cur] if code & 1 else delta.out[lab][cur]
        if k == len(codes) - 1:
            v = end
        else:
            v = n
            n += 1
            colors.append(nxt)
        a, b = ids[-1], v
        edges.append((b, a, lab) if code & 1 else (a, b, lab))
        ids.append(v)
        cur = nxt
    return edges, n, colors


def _settle(rank, edges, n, colors):
    folded, trace = fold(LabeledGraphDraft(rank, n, tuple(edges)))
    core, renum = prune(folded)
    new_colors = [0] * core.num_vertices
    for v in range(n):
        w = renum[trace[v]]
        if w >= 0:
            new_colors[w] = colors[v]
    return core, new_colors


def _component_oracle(gamma: MultiCoreGraph, colors: list[int], delta: MultiCoreGraph,
                      max_depth: int, max_walk: int, max_states: int) -> int | None:
    target_v, target_e = delta.num_vertices, delta.num_edges

    def done(g, col):
        return (g.num_vertices == target_v and g.num_edges == target_e
                and len(set(col)) == target_v)

    if done(gamma, colors):
        return 0
    seen = {colored_canonical_form(gamma, colors)}
    frontier = [(gamma, colors)]
    for depth in range(1, max_depth + 1):
        nxt = []
        for g, col in frontier:
            comps = g.components()
            moves = []
            for v in range(g.num_vertices):
                for codes, end in _walks(delta, col[v], max_walk):
                    if codes and end == col[v]:
                        moves.append((v, v, codes))
            for ci, cj in combinations(range(len(comps)), 2):
                for v in comps[ci]:
                    for w in comps[cj]:
                        for codes, end in _walks(delta, col[v], max_walk):
                            if end == col[w] and (codes or col[v] == col[w]):
                                moves.append((v, w, codes))
            for v, w, codes in moves:
                if not codes:
                    edges, n, ncol = list(g.edges), g.num_vertices, list(col)
                    edges = [(w if t == v else t, w if h == v else h, lab)
                             for t, h, lab in edges]
                    # gluing two vertices directly: renumber by dropping v
                    keep = [u for u in range(n) if u != v]
                    ren = {u: i for i, u in enumerate(keep)}
                    edges = [(ren[t], ren[h], lab) for t, h, lab in edges]
                    ncol = [col[u] for u in keep]
                    n -= 1
                elif v == w:
                    edges, n, ncol = _attach(g.edges, g.num_vertices, col, v, v, codes,
                                             delta, col[v])
                else:
                    edges, n, ncol = _attach(g.edges, g.num_vertices, col, v, w, codes,
                                             delta, col[v])
                h, hcol = _settle(g.rank, edges, n, ncol)
                key = colored_canonical_form(h, hcol)
                if key in seen:
                    continue
                if done(h, hcol):
                    return depth
                seen.add(key)
                if len(seen) > max_states:
                    return None
                nxt.append((h, hcol))
        frontier = nxt
    return None


def immediate_morphism_norm_oracle(eta: GraphMorphism, max_depth: int = 4,
                                   max_walk: int = 3, max_states: int = 200_000
                                   ) -> int | None:
    """Norm by direct search over sequences of immediate morphisms.

    Each step either attaches a cycle at a vertex (adjoining an element to
    one subgroup) or joins two components by a path (merging two conjugacy
    classes), then folds.  Returns ``None`` when the bounded search fails.
    Meant only for tiny inputs.
    """
    delta = eta.codomain
    total = 0
    dom = eta.domain
    for comp in delta.components():
        sub, ren = delta.subgraph(comp)
        pre = [v for v in range(dom.num_vertices) if eta.vertex_map[v] in ren]
        if not pre:
            total -= sub.euler_characteristic
            continue
        g, keep = dom.subgraph(pre)
        colors = [0] * g.num_vertices
        for v, i in keep.items():
            colors[i] = ren[eta.vertex_map[v]]
        res = _component_oracle(g, colors, sub, max_depth, max_walk, max_states)
        if res is None:
            return None
        total += res
    return total


# ---------------------------------------------------------------- export

def to_dot(eta: GraphMorphism, name: str = "eta") -> str:
    """Domain drawn with vertices colored by fiber."""
    palette = ["red", "blue", "green", "orange", "purple", "brown", "cyan", "magenta"]
    lines = [f"digraph {name} {{", "  node [shape=circle, style=filled];"]
    for v, img in enumerate(eta.vertex_map):
        lines.append(f'  {v} [fillcolor="{palette[img % len(palette)]}"];')
    for t, h, lab in sorted(eta.domain.edges):
        lines.append(f'  {t} -> {h} [label="b{lab + 1}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


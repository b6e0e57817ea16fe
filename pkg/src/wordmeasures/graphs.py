"""Labeled multi core graphs and Stallings folding.

A graph over a basis of rank ``r`` has directed edges labeled by generator
indices.  Reading an edge forwards spells the generator, backwards its
inverse.  Vertices are always the dense range ``0..n-1``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import InvariantViolation
from .words import CyclicWord, Word, cyclic_reduce, default_alphabet

Edge = tuple[int, int, int]  # (tail, head, label)


@dataclass(frozen=True)
class LabeledGraphDraft:
    """A labeled graph with no folding or degree requirements."""

    rank: int
    num_vertices: int
    edges: tuple[Edge, ...]

    def __post_init__(self):
        for t, h, lab in self.edges:
            if not (0 <= t < self.num_vertices and 0 <= h < self.num_vertices):
                raise ValueError(f"edge {(t, h, lab)} has a missing endpoint")
            if not 0 <= lab < self.rank:
                raise ValueError(f"label {lab} outside rank {self.rank}")

    def degrees(self) -> list[int]:
        deg = [0] * self.num_vertices
        for t, h, _ in self.edges:
            deg[t] += 1
            deg[h] += 1
        return deg

    def is_folded(self) -> bool:
        seen_out, seen_in = set(), set()
        for t, h, lab in self.edges:
            if (t, lab) in seen_out or (h, lab) in seen_in:
                return False
            seen_out.add((t, lab))
            seen_in.add((h, lab))
        return True


@dataclass(frozen=True, eq=False)
class MultiCoreGraph:
    """Folded graph in which every vertex has degree at least two.

    ``out[lab][v]`` and ``inn[lab][v]`` give the head of the ``lab``-edge
    leaving ``v`` and the tail of the one entering it, or ``-1``.
    """

    rank: int
    num_vertices: int
    edges: tuple[Edge, ...]
    out: tuple[tuple[int, ...], ...] = field(init=False, repr=False)
    inn: tuple[tuple[int, ...], ...] = field(init=False, repr=False)

    def __post_init__(self):
        draft = LabeledGraphDraft(self.rank, self.num_vertices, self.edges)
        out = [[-1] * self.num_vertices for _ in range(self.rank)]
        inn = [[-1] * self.num_vertices for _ in range(self.rank)]
        for t, h, lab in self.edges:
            if out[lab][t] != -1 or inn[lab][h] != -1:
                raise InvariantViolation("graph is not folded")
            out[lab][t] = h
            inn[lab][h] = t
        if any(d < 2 for d in draft.degrees()):
            raise InvariantViolation("graph has a vertex of degree < 2")
        object.__setattr__(self, "out", tuple(map(tuple, out)))
        object.__setattr__(self, "inn", tuple(map(tuple, inn)))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def euler_characteristic(self) -> int:
        return self.num_vertices - self.num_edges

    def is_empty(self) -> bool:
        return self.num_vertices == 0

    def draft(self) -> LabeledGraphDraft:
        return LabeledGraphDraft(self.rank, self.num_vertices, self.edges)

    def neighbors(self, v: int) -> Iterable[int]:
        for lab in range(self.rank):
            if self.out[lab][v] >= 0:
                yield self.out[lab][v]
            if self.inn[lab][v] >= 0:
                yield self.inn[lab][v]

    def components(self) -> list[list[int]]:
        """Vertex lists of connected components, ordered by least vertex."""
        comp = [-1] * self.num_vertices
        result = []
        for s in range(self.num_vertices):
            if comp[s] >= 0:
                continue
            comp[s] = len(result)
            verts = [s]
            queue = deque([s])
            while queue:
                v = queue.popleft()
                for u in self.neighbors(v):
                    if comp[u] < 0:
                        comp[u] = len(result)
                        verts.append(u)
                        queue.append(u)
            result.append(sorted(verts))
        return result

    def component_index(self) -> list[int]:
        idx = [0] * self.num_vertices
        for i, verts in enumerate(self.components()):
            for v in verts:
                idx[v] = i
        return idx

    def subgraph(self, vertices: Sequence[int]) -> tuple["MultiCoreGraph", dict[int, int]]:
        """Induced subgraph on a union of components, renumbered densely."""
        keep = {v: i for i, v in enumerate(sorted(vertices))}
        edges = tuple((keep[t], keep[h], lab) for t, h, lab in self.edges if t in keep)
        return MultiCoreGraph(self.rank, len(keep), edges), keep

    def __eq__(self, other):
        return (isinstance(other, MultiCoreGraph) and self.rank == other.rank
                and self.num_vertices == other.num_vertices
                and sorted(self.edges) == sorted(other.edges))

    def __hash__(self):
        return hash((self.rank, self.num_vertices, tuple(sorted(self.edges))))

    def __repr__(self):
        return f"MultiCoreGraph(rank={self.rank}, V={self.num_vertices}, E={self.num_edges})"


def empty_graph(rank: int) -> MultiCoreGraph:
    return MultiCoreGraph(rank, 0, ())


def disjoint_union(*graphs: MultiCoreGraph) -> MultiCoreGraph:
    if not graphs:
        raise ValueError("need at least one graph")
    rank = graphs[0].rank
    edges, offset = [], 0
    for g in graphs:
        if g.rank != rank:
            raise ValueError("rank mismatch")
        edges.extend((t + offset, h + offset, lab) for t, h, lab in g.edges)
        offset += g.num_vertices
    return MultiCoreGraph(rank, offset, tuple(edges))


# ---------------------------------------------------------------- folding

class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        a, b = self.find(a), self.find(b)
        if a == b:
            return False
        if b < a:
            a, b = b, a
        self.parent[b] = a
        return True


def fold(draft: LabeledGraphDraft, order: Sequence[int] | None = None
         ) -> tuple[LabeledGraphDraft, list[int]]:
    """Stallings-fold ``draft``; return the folded draft and old->new vertex map.

    ``order`` optionally permutes the edge processing order (the result is
    the same up to isomorphism whatever the order).
    """
    n = draft.num_vertices
    uf = _UnionFind(n)
    edges = list(draft.edges)
    if order is not None:
        edges = [edges[i] for i in order]
    changed = True
    while changed:
        changed = False
        out: dict[tuple[int, int], int] = {}
        inn: dict[tuple[int, int], int] = {}
        for t, h, lab in edges:
            t, h = uf.find(t), uf.find(h)
            prev = out.get((t, lab))
            if prev is not None and uf.find(prev) != h:
                uf.union(prev, h)
                changed = True
            out.setdefault((t, lab), h)
            prev = inn.get((h, lab))
            if prev is not None and uf.find(prev) != t:
                uf.union(prev, t)
                changed = True
            inn.setdefault((h, lab), t)
    roots = sorted({uf.find(v) for v in range(n)})
    renum = {r: i for i, r in enumerate(roots)}
    trace = [renum[uf.find(v)] for v in range(n)]
    new_edges = sorted({(trace[t], trace[h], lab) for t, h, lab in draft.edges})
    return LabeledGraphDraft(draft.rank, len(roots), tuple(new_edges)), trace


def prune(draft: LabeledGraphDraft) -> tuple[MultiCoreGraph, list[int]]:
    """Repeatedly delete vertices of degree at most one.

    Returns the core and a map from old vertices to new ones (``-1`` for
    deleted vertices).
    """
    if not draft.is_folded():
        raise ValueError("prune expects a folded graph")
    n = draft.num_vertices
    alive_edge = [True] * len(draft.edges)
    incident: list[list[int]] = [[] for _ in range(n)]
    for i, (t, h, _) in enumerate(draft.edges):
        incident[t].append(i)
        incident[h].append(i)
    deg = draft.degrees()
    alive = [True] * n
    queue = deque(v for v in range(n) if deg[v] <= 1)
    while queue:
        v = queue.popleft()
        if not alive[v] or deg[v] > 1:
            continue
        alive[v] = False
        for i in incident[v]:
            if alive_edge[i]:
                alive_edge[i] = False
                t, h, _ = draft.edges[i]
                other = h if t == v else t
                deg[t] -= 1
                deg[h] -= 1
                if alive[other] and deg[other] <= 1:
                    queue.append(other)
    renum, k = [-1] * n, 0
    for v in range(n):
        if alive[v]:
            renum[v] = k
            k += 1
    edges = tuple((renum[t], renum[h], lab)
                  for (t, h, lab), ok in zip(draft.edges, alive_edge) if ok)
    return MultiCoreGraph(draft.rank, k, edges), renum


def fold_and_prune(draft: LabeledGraphDraft) -> tuple[MultiCoreGraph, list[int]]:
    folded, trace = fold(draft)
    core, renum = prune(folded)
    return core, [renum[t] for t in trace]


# ---------------------------------------------------------------- constructors

def _loop_edges(codes: Sequence[int], start: int, base: int, next_id: int
                ) -> tuple[list[Edge], int]:
    """Edges of a closed path at ``base`` spelling ``codes``."""
    edges = []
    n = len(codes)
    ids = [base] + list(range(next_id, next_id + n - 1)) + [base]
    for i, c in enumerate(codes):
        a, b = ids[i], ids[i + 1]
        lab = c >> 1
        edges.append((b, a, lab) if c & 1 else (a, b, lab))
    return edges, next_id + n - 1


def cycle_graph(w: CyclicWord | Word) -> MultiCoreGraph:
    """The folded cycle reading ``w`` around."""
    if isinstance(w, Word):
        w = cyclic_reduce(w)[0]
    if not w.codes:
        raise ValueError("cycle of the identity is undefined")
    n = len(w.codes)
    edges = []
    for i, c in enumerate(w.codes):
        a, b = i, (i + 1) % n
        edges.append((b, a, c >> 1) if c & 1 else (a, b, c >> 1))
    draft = LabeledGraphDraft(w.rank, n, tuple(edges))
    return fold_and_prune(draft)[0]


def powers_graph(w: CyclicWord | Word, alpha: Sequence[int]) -> MultiCoreGraph:
    """Disjoint union of ``alpha[i-1]`` cycles spelling ``w^i``."""
    if isinstance(w, Word):
        w = cyclic_reduce(w)[0]
    if not alpha or sum(alpha) < 1 or any(a < 0 for a in alpha):
        raise ValueError("exponent vector must be nonnegative with positive sum")
    parts = []
    for i, a in enumerate(alpha, start=1):
        cyc = cycle_graph(CyclicWord(w.rank, w.codes * i))
        parts.extend([cyc] * a)
    return disjoint_union(*parts)


def subgroup_graph(generators: Sequence[Word]) -> tuple[MultiCoreGraph, int | None]:
    """Core graph of the subgroup generated by ``generators``.

    Returns the graph together with the base vertex, or ``None`` when the
    base vertex was pruned away (the subgroup is then a proper conjugate
    of what the core graph reads at any vertex).
    """
    gens = [g for g in generators if not g.is_identity()]
    if not gens:
        raise ValueError("all generators are trivial")
    rank = gens[0].rank
    edges: list[Edge] = []
    next_id = 1
    for g in gens:
        if g.rank != rank:
            raise ValueError("rank mismatch")
        e, next_id = _loop_edges(g.codes, 0, 0, next_id)
        edges.extend(e)
    core, vmap = fold_and_prune(LabeledGraphDraft(rank, next_id, tuple(edges)))
    base = vmap[0]
    return core, (base if base >= 0 else None)


def bouquet(r: int) -> MultiCoreGraph:
    if r < 1:
        raise ValueError("rank must be positive")
    return MultiCoreGraph(r, 1, tuple((0, 0, lab) for lab in range(r)))


# ---------------------------------------------------------------- invariants

@dataclass(frozen=True)
class GraphInvariants:
    euler_characteristic: int
    num_components: int
    rank: int
    component_euler: tuple[int, ...]


def graph_invariants(g: MultiCoreGraph) -> GraphInvariants:
    comps = g.components()
    idx = g.component_index()
    chis = [len(c) for c in comps]
    for t, _, _ in g.edges:
        chis[idx[t]] -= 1
    chi = g.euler_characteristic
    return GraphInvariants(chi, len(comps), len(comps) - chi, tuple(chis))


# ---------------------------------------------------------------- canonical forms

def _component_code(g: MultiCoreGraph, start: int, colors: Sequence[int] | None = None
                    ) -> tuple[tuple[int, ...], list[int]]:
    """BFS encoding of the component of ``start``; returns code and visit order."""
    index = {start: 0}
    order = [start]
    code: list[int] = []
    i = 0
    while i < len(order):
        v = order[i]
        i += 1
        if colors is not None:
            code.append(colors[v])
        for lab in range(g.rank):
            for arr in (g.out[lab], g.inn[lab]):
                u = arr[v]
                if u < 0:
                    code.append(-1)
                    continue
                if u not in index:
                    index[u] = len(order)
                    order.append(u)
                code.append(index[u])
    return tuple(code), order


def _component_canon(g: MultiCoreGraph, verts: Sequence[int],
                     colors: Sequence[int] | None = None):
    best = None
    for s in verts:
        code, order = _component_code(g, s, colors)
        if best is None or code < best[0]:
            best = (code, order)
    return best


def canonical_form(g: MultiCoreGraph) -> tuple:
    """An encoding equal for two graphs exactly when they are isomorphic."""
    codes = sorted(_component_canon(g, c)[0] for c in g.components())
    return (g.rank, tuple(codes))


def colored_canonical_form(g: MultiCoreGraph, colors: Sequence[int]) -> tuple:
    """Like :func:`canonical_form` but isomorphisms must also preserve ``colors``."""
    codes = sorted(_component_canon(g, c, colors)[0] for c in g.components())
    return (g.rank, tuple(codes))


def iso(g: MultiCoreGraph, h: MultiCoreGraph) -> dict[int, int] | None:
    """A label-preserving isomorphism ``g -> h`` as a vertex map, if one exists."""
    if g.rank != h.rank or g.num_vertices != h.num_vertices or g.num_edges != h.num_edges:
        return None
    gc = [_component_canon(g, c) for c in g.components()]
    hc = [_component_canon(h, c) for c in h.components()]
    pool: dict[tuple, list[list[int]]] = {}
    for code, order in hc:
        pool.setdefault(code, []).append(order)
    mapping: dict[int, int] = {}
    for code, order in gc:
        if not pool.get(code):
            return None
        target = pool[code].pop()
        mapping.update(zip(order, target))
    return mapping


def relabel(g: MultiCoreGraph, perm: Sequence[int]) -> MultiCoreGraph:
    """Rename vertex ``v`` to ``perm[v]``."""
    return MultiCoreGraph(g.rank, g.num_vertices,
                          tuple((perm[t], perm[h], lab) for t, h, lab in g.edges))


# ---------------------------------------------------------------- fundamental group

def pi1_basis(g: MultiCoreGraph, base: int) -> list[Word]:
    """Free basis of the labeled fundamental group at ``base``.

    Uses a BFS spanning tree; each non-tree edge contributes one word.
    """
    if not 0 <= base < g.num_vertices:
        raise ValueError(f"vertex {base} not in graph")
    path: dict[int, list[int]] = {base: []}
    tree_edges: set[int] = set()
    queue = deque([base])
    incident: list[list[tuple[int, int, int]]] = [[] for _ in range(g.num_vertices)]
    for i, (t, h, lab) in enumerate(g.edges):
        incident[t].append((i, h, 2 * lab))
        incident[h].append((i, t, 2 * lab + 1))
    while queue:
        v = queue.popleft()
        for i, u, code in incident[v]:
            if u not in path:
                path[u] = path[v] + [code]
                tree_edges.add(i)
                queue.append(u)
    basis = []
    for i, (t, h, lab) in enumerate(g.edges):
        if i in tree_edges or t not in path:
            continue
        codes = path[t] + [2 * lab] + [c ^ 1 for c in reversed(path[h])]
        basis.append(Word.from_codes(g.rank, codes))
    return basis


# ---------------------------------------------------------------- export

def to_dot(g: MultiCoreGraph, name: str = "G", alphabet: str | None = None) -> str:
    alphabet = alphabet or default_alphabet(g.rank)
    lines = [f"digraph {name} {{", "  node [shape=circle];"]
    for v in range(g.num_vertices):
        lines.append(f"  {v};")
    for t, h, lab in sorted(g.edges):
        lines.append(f'  {t} -> {h} [label="{alphabet[lab]}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"

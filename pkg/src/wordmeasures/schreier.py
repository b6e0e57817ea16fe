"""Random Schreier graphs of ``S_N`` acting on ordered s-tuples of distinct points.

Generator ``i`` joins each tuple ``x`` to ``sigma_i(x)`` (applied
coordinatewise), so the graph is ``2r``-regular once loops are counted twice.
Directed edges ("darts") are numbered so that dart ``j < r V`` runs forward
along edge ``j`` and dart ``j + r V`` runs backward along it.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import permutations as _tuples
from typing import Sequence

import numpy as np
from scipy import sparse
from scipy.optimize import linear_sum_assignment
from scipy.sparse.linalg import eigsh

from .errors import BudgetExceeded
from .phi import falling_factorial
from .words import enumerate_cyclically_reduced

DEFAULT_MAX_VERTICES = 2_000_000
DEFAULT_MAX_DARTS = 4_000
DENSE_EIG_LIMIT = 3_000
IHARA_BASS_RTOL = 1e-6


@dataclass(frozen=True, eq=False)
class SchreierGraph:
    r: int
    s: int
    n: int
    perms: tuple[np.ndarray, ...]
    tuples: np.ndarray      # (V, s) array of the vertex tuples
    targets: np.ndarray     # (r, V): targets[i, v] is the vertex sigma_i(v)

    @property
    def degree(self) -> int:
        return 2 * self.r

    @property
    def num_vertices(self) -> int:
        return self.tuples.shape[0]

    @property
    def num_edges(self) -> int:
        return self.r * self.num_vertices

    @property
    def num_darts(self) -> int:
        return 2 * self.num_edges

    def dart_ends(self) -> tuple[np.ndarray, np.ndarray]:
        """(tail, head) arrays over all darts."""
        src = np.tile(np.arange(self.num_vertices), self.r)
        dst = self.targets.reshape(-1)
        return np.concatenate([src, dst]), np.concatenate([dst, src])

    def reverse_dart(self, j: np.ndarray | int):
        return (j + self.num_edges) % self.num_darts

    def adjacency(self) -> sparse.csr_matrix:
        """Symmetric adjacency; a loop adds 2 on the diagonal."""
        v = self.num_vertices
        rows = np.tile(np.arange(v), self.r)
        cols = self.targets.reshape(-1)
        ones = np.ones(len(rows), dtype=np.int64)
        p = sparse.coo_matrix((ones, (rows, cols)), shape=(v, v))
        return (p + p.T).tocsr()

    def hashimoto(self) -> sparse.csr_matrix:
        """Non-backtracking matrix: ``B[e, f] = 1`` iff ``f`` ends where ``e``
        starts and ``f`` is not the reverse of ``e``."""
        tail, head = self.dart_ends()
        m = self.num_darts
        order = np.argsort(head, kind="stable")
        d = self.degree
        # incoming[v] lists the d darts ending at v
        incoming = order.reshape(self.num_vertices, d)
        e = np.repeat(np.arange(m), d)
        f = incoming[tail].reshape(-1)
        keep = f != self.reverse_dart(e)
        data = np.ones(int(keep.sum()), dtype=np.int64)
        return sparse.csr_matrix((data, (e[keep], f[keep])), shape=(m, m))

    def to_dot(self, name: str = "S") -> str:
        lines = [f"graph {name} {{"]
        for v, tup in enumerate(self.tuples):
            lines.append(f'  {v} [label="{",".join(str(int(x)) for x in tup)}"];')
        for i in range(self.r):
            for v in range(self.num_vertices):
                lines.append(f'  {v} -- {int(self.targets[i, v])} [label="{i}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def build_schreier(r: int, s: int, n: int, seed: int | None = None,
                   perms: Sequence[Sequence[int]] | None = None,
                   max_vertices: int = DEFAULT_MAX_VERTICES) -> SchreierGraph:
    """Build from explicit permutations, or from ``r`` uniform ones drawn with ``seed``."""
    if not n >= s >= 1:
        raise ValueError("need N >= s >= 1")
    if r < 1:
        raise ValueError("need r >= 1")
    size = falling_factorial(n, s)
    if size > max_vertices:
        raise BudgetExceeded("max_vertices", max_vertices, size)
    if perms is None:
        if seed is None:
            raise ValueError("give either a seed or explicit permutations")
        rng = _rng(seed)
        perms = [rng.permutation(n) for _ in range(r)]
    perms = tuple(np.asarray(p, dtype=np.int64) for p in perms)
    if len(perms) != r or any(sorted(p.tolist()) != list(range(n)) for p in perms):
        raise ValueError(f"need {r} permutations of range({n})")
    if s == 1:
        tuples = np.arange(n, dtype=np.int64).reshape(n, 1)
    else:
        tuples = np.array(list(_tuples(range(n), s)), dtype=np.int64)
    # index tuples by their base-n code
    weights = n ** np.arange(s, dtype=np.int64)
    lookup = np.full(n ** s, -1, dtype=np.int64)
    lookup[tuples @ weights] = np.arange(size)
    targets = np.stack([lookup[p[tuples] @ weights] for p in perms])
    return SchreierGraph(r, s, n, perms, tuples, targets)


# ---------------------------------------------------------------- spectra

def bound_value(d: int, s: int) -> float:
    """The a.a.s. ceiling ``2 sqrt(d-1) exp(2 s^2 / (e^2 (d-1)))``."""
    return 2 * math.sqrt(d - 1) * math.exp(2 * s * s / (math.e ** 2 * (d - 1)))


def adjacency_spectrum(g: SchreierGraph) -> np.ndarray:
    """All adjacency eigenvalues in increasing order (dense solver)."""
    a = g.adjacency().toarray().astype(float)
    return np.linalg.eigvalsh(a)


def adjacency_mu(g: SchreierGraph, full: bool = False):
    """Largest absolute value of a nontrivial adjacency eigenvalue.

    One copy of the eigenvalue ``d`` is dropped.  Returns ``(mu, spectrum)``
    with the full spectrum only when ``full`` is set or the graph is small
    enough for the dense solver anyway.
    """
    if g.num_vertices < 2:
        raise ValueError("graph needs at least two vertices")
    if full or g.num_vertices <= DENSE_EIG_LIMIT:
        eigs = adjacency_spectrum(g)
        rest = eigs[:-1]
        mu = float(max(abs(rest[-1]), abs(rest[0])))
        return mu, eigs
    a = g.adjacency().astype(float)
    top = np.sort(eigsh(a, k=2, which="LA", return_eigenvectors=False))
    bottom = eigsh(a, k=1, which="SA", return_eigenvectors=False)
    return float(max(abs(top[0]), abs(bottom[0]))), None


def ihara_bass_image(adjacency_eigs: np.ndarray, d: int, num_vertices: int,
                     num_edges: int) -> np.ndarray:
    """Non-backtracking eigenvalues predicted from the adjacency spectrum."""
    lam = np.asarray(adjacency_eigs, dtype=complex)
    disc = np.sqrt(lam * lam - 4 * (d - 1))
    extra = num_edges - num_vertices
    return np.concatenate([(lam + disc) / 2, (lam - disc) / 2,
                           np.ones(extra), -np.ones(extra)])


def match_multisets(a: np.ndarray, b: np.ndarray, rtol: float = IHARA_BASS_RTOL) -> float:
    """Largest relative mismatch under the best one-to-one pairing."""
    if len(a) != len(b):
        return math.inf
    if not len(a):
        return 0.0
    cost = np.abs(a[:, None] - b[None, :]) / np.maximum(1.0, np.abs(b))[None, :]
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


@dataclass(frozen=True)
class HashimotoReport:
    nu: float
    ihara_bass_ok: bool
    max_mismatch: float
    eigenvalues: np.ndarray
    predicted: np.ndarray


def hashimoto_spectrum(g: SchreierGraph, max_darts: int = DEFAULT_MAX_DARTS,
                       rtol: float = IHARA_BASS_RTOL) -> HashimotoReport:
    """Direct non-backtracking spectrum, checked against the adjacency image.

    ``nu`` drops one copy of the trivial eigenvalue ``d - 1``.
    """
    if g.num_darts > max_darts:
        raise BudgetExceeded("max_darts", max_darts, g.num_darts)
    b = g.hashimoto().toarray().astype(float)
    direct = np.linalg.eigvals(b)
    predicted = ihara_bass_image(adjacency_spectrum(g), g.degree, g.num_vertices, g.num_edges)
    # Eigenvalues inside Jordan blocks (at +-2 sqrt(d-1), and at +-1 for some
    # graphs) are only computed to about sqrt(machine eps); a nondefective
    # eigenvalue is accurate to machine precision.  Compare with rtol.
    mismatch = match_multisets(direct, predicted, rtol)
    k = int(np.argmin(np.abs(direct - (g.degree - 1))))
    rest = np.delete(direct, k)
    nu = float(np.abs(rest).max()) if len(rest) else 0.0
    return HashimotoReport(nu, mismatch <= rtol, mismatch, direct, predicted)


@dataclass(frozen=True)
class SpectrumReport:
    mu: float
    nu: float | None
    bound: float
    d: int

    @property
    def passed(self) -> bool:
        return self.mu < self.bound


def spectrum_report(g: SchreierGraph, with_hashimoto: bool = False) -> SpectrumReport:
    mu, _ = adjacency_mu(g)
    nu = hashimoto_spectrum(g).nu if with_hashimoto else None
    return SpectrumReport(mu, nu, bound_value(g.degree, g.s), g.degree)


def spectrum_csv(g: SchreierGraph) -> str:
    _, eigs = adjacency_mu(g, full=True)
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["index", "eigenvalue"])
    for i, x in enumerate(eigs[::-1]):
        w.writerow([i, repr(float(x))])
    return buf.getvalue()


# ---------------------------------------------------------------- traces

def _matrix_power_trace(b: sparse.csr_matrix, t: int) -> int:
    """``tr(B^t)`` in exact integer arithmetic."""
    m = b.shape[0]
    # entries of B^t are at most (d-1)^t; stay in int64 when that is safe
    rowmax = int(b.sum(axis=1).max()) if m else 0
    if rowmax ** t < 2 ** 62:
        cur = sparse.identity(m, dtype=np.int64, format="csr")
        for _ in range(t):
            cur = (cur @ b).tocsr()
        return int(cur.diagonal().sum())
    dense = b.toarray().astype(object)
    cur = np.identity(m, dtype=object)
    for _ in range(t):
        cur = cur.dot(dense)
    return int(sum(cur[i, i] for i in range(m)))


def fixed_tuple_count(perm: np.ndarray, s: int) -> int:
    """Number of s-tuples of distinct points fixed by ``perm``."""
    fixed = int(np.count_nonzero(perm == np.arange(len(perm))))
    return falling_factorial(fixed, s)


@dataclass(frozen=True)
class TraceCheck:
    lhs: int
    rhs: int

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs


def trace_identity_check(g: SchreierGraph, t: int, max_words: int = 1_000_000) -> TraceCheck:
    """Closed non-backtracking walk count versus the word-sum of fixed tuples."""
    if t < 1:
        raise ValueError("t must be positive")
    lhs = _matrix_power_trace(g.hashimoto(), t)
    words, _ = enumerate_cyclically_reduced(g.r, t, max_words)
    inv = []
    for p in g.perms:
        q = np.empty_like(p)
        q[p] = np.arange(g.n)
        inv.append(q)
    rhs = 0
    for w in words:
        cur = np.arange(g.n)
        for code in w.codes:
            cur = (inv[code >> 1] if code & 1 else g.perms[code >> 1])[cur]
        rhs += fixed_tuple_count(cur, g.s)
    return TraceCheck(lhs, rhs)


# ---------------------------------------------------------------- bound experiment

@dataclass(frozen=True)
class TrialRow:
    n: int
    trial: int
    seed: int
    mu: float
    bound: float

    @property
    def passed(self) -> bool:
        return self.mu < self.bound


@dataclass(frozen=True)
class BoundExperiment:
    r: int
    s: int
    rows: tuple[TrialRow, ...]
    target_rate: float = 0.95

    @property
    def pass_rate(self) -> float:
        return sum(r.passed for r in self.rows) / len(self.rows) if self.rows else math.nan

    @property
    def flagged(self) -> bool:
        """True when fewer trials than ``target_rate`` stayed below the bound."""
        return self.pass_rate < self.target_rate

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["N", "trial", "seed", "mu", "bound", "pass"])
        for row in self.rows:
            w.writerow([row.n, row.trial, row.seed, repr(row.mu), repr(row.bound),
                        int(row.passed)])
        return buf.getvalue()

    def to_json(self) -> dict:
        per_n = {}
        for row in self.rows:
            per_n.setdefault(row.n, []).append(row)
        return {"r": self.r, "s": self.s, "d": 2 * self.r,
                "bound": bound_value(2 * self.r, self.s),
                "trials": len(self.rows), "pass_rate": self.pass_rate,
                "flagged": self.flagged,
                "per_N": {str(n): {"trials": len(rs),
                                   "pass_rate": sum(x.passed for x in rs) / len(rs),
                                   "max_mu": max(x.mu for x in rs)}
                          for n, rs in sorted(per_n.items())}}


def trial_seed(seed: int, n: int, trial: int) -> int:
    """Independent, reproducible seed for one trial."""
    return int(np.random.SeedSequence([seed, n, trial]).generate_state(1, np.uint64)[0])


def _one_trial(args) -> TrialRow:
    r, s, n, trial, seed = args
    ts = trial_seed(seed, n, trial)
    g = build_schreier(r, s, n, seed=ts)
    mu, _ = adjacency_mu(g)
    return TrialRow(n, trial, ts, mu, bound_value(2 * r, s))


def bound_experiment(r: int, s: int, ns: Sequence[int], trials: int, seed: int,
                     workers: int = 1) -> BoundExperiment:
    """Compare ``mu`` with the bound over ``trials`` random graphs per ``N``.

    The output is independent of ``workers``.
    """
    jobs = [(r, s, n, k, seed) for n in ns for k in range(trials)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            rows = list(pool.map(_one_trial, jobs))
    else:
        rows = [_one_trial(j) for j in jobs]
    return BoundExperiment(r, s, tuple(rows))

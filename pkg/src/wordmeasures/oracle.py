"""Ground truth by brute force and by sampling.

Exact mode averages over every tuple of permutations in ``S_N^r``; Monte
Carlo mode samples tuples from a seeded PCG64 generator.  Permutations are
numpy integer arrays ``p`` with ``p[i]`` the image of ``i``; a word is
evaluated letter by letter, applying the first letter first.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Sequence

import numpy as np

from .characters import ClassFunction
from .errors import BudgetExceeded
from .morphisms import GraphMorphism
from .words import Word

DEFAULT_MAX_TUPLES = 600_000


@dataclass(frozen=True)
class OracleResult:
    """``value`` is exact in exact mode; in sampling mode it is the sample
    mean and ``stderr`` its standard error."""

    value: Fraction | float
    n: int
    samples: int
    stderr: float | None = None
    seed: int | None = None

    @property
    def exact(self) -> bool:
        return self.stderr is None

    def csv_row(self) -> list:
        return [self.n, str(self.value), "" if self.stderr is None else self.stderr,
                self.samples, "" if self.seed is None else self.seed]


def results_to_csv(results: Sequence[OracleResult]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["N", "value", "stderr", "samples", "seed"])
    for r in results:
        writer.writerow(r.csv_row())
    return buf.getvalue()


# ---------------------------------------------------------------- class functions on permutations

def cycle_type(perm: Sequence[int]) -> tuple[int, ...]:
    perm = list(perm)
    seen = [False] * len(perm)
    lengths = []
    for s in range(len(perm)):
        if seen[s]:
            continue
        k, v = 0, s
        while not seen[v]:
            seen[v] = True
            v = perm[v]
            k += 1
        lengths.append(k)
    return tuple(sorted(lengths, reverse=True))


def eval_class_function(f: ClassFunction, perm: Sequence[int]) -> Fraction:
    return f.evaluate_cycle_type(cycle_type(perm))


def _fix_power_counts(perms: np.ndarray, max_power: int) -> list[np.ndarray]:
    """``out[k-1][row]`` = number of fixed points of ``perms[row]^k``."""
    rows, n = perms.shape
    ident = np.arange(n)
    cur = perms.copy()
    out = []
    for _ in range(max_power):
        out.append(np.count_nonzero(cur == ident, axis=1))
        cur = np.take_along_axis(perms, cur, axis=1)
    return out


def _evaluate_on_rows(f: ClassFunction, perms: np.ndarray) -> tuple[Fraction, np.ndarray]:
    """Sum of ``f`` over the rows (exact) and the per-row float values."""
    g = f.convert("xi")
    max_power = max((len(e) for e in g.terms), default=0)
    fixes = _fix_power_counts(perms, max_power) if max_power else []
    total = Fraction(0)
    values = np.zeros(perms.shape[0], dtype=float)
    for e, c in g.terms.items():
        mono = np.ones(perms.shape[0], dtype=object if sum(e) > 12 else np.int64)
        for i, k in enumerate(e):
            if k:
                mono = mono * fixes[i].astype(mono.dtype) ** k
        s = int(mono.sum())
        total += c * s
        values += float(c) * mono.astype(float)
    return total, values


def _apply_word(word_codes: Sequence[int], gens: list[np.ndarray], inverses: list[np.ndarray],
                rows: int, n: int) -> np.ndarray:
    """Image array of the word on each row; ``gens[g]`` has shape (rows, n)."""
    cur = np.broadcast_to(np.arange(n), (rows, n)).copy()
    for code in word_codes:
        table = inverses[code >> 1] if code & 1 else gens[code >> 1]
        cur = np.take_along_axis(table, cur, axis=1)
    return cur


def _inverse_rows(p: np.ndarray) -> np.ndarray:
    inv = np.empty_like(p)
    rows = np.arange(p.shape[0])[:, None]
    inv[rows, p] = np.arange(p.shape[1])
    return inv


def _as_words(w) -> list[Word]:
    return [w] if isinstance(w, Word) else list(w)


def _default_function(words: list[Word], f: ClassFunction | None, alpha):
    if f is not None and len(words) > 1:
        raise ValueError("a class function applies to a single word")
    if f is None and alpha is not None:
        f = ClassFunction.monomial(alpha)
    if f is None and len(words) == 1:
        f = ClassFunction.xi(1)
    return f


def _row_values(words: list[Word], f: ClassFunction | None, gens, inverses, rows, n):
    """Exact sum and float values for one block of tuples."""
    if f is not None:
        img = _apply_word(words[0].codes, gens, inverses, rows, n)
        return _evaluate_on_rows(f, img)
    # several words: product of fixed-point counts
    prod_vals = np.ones(rows, dtype=np.int64)
    ident = np.arange(n)
    for w in words:
        img = _apply_word(w.codes, gens, inverses, rows, n)
        prod_vals *= np.count_nonzero(img == ident, axis=1)
    return Fraction(int(prod_vals.sum())), prod_vals.astype(float)


def exact_expectation(w: Word | Sequence[Word], n: int, f: ClassFunction | None = None,
                      alpha: Sequence[int] | None = None,
                      max_tuples: int = DEFAULT_MAX_TUPLES) -> OracleResult:
    """Exact average over all of ``S_n^r``.

    With one word, averages ``f`` (or the monomial ``alpha``; default
    ``xi_1``) of the word's image.  With several words, averages the
    product of their fixed-point counts.
    """
    words = _as_words(w)
    if not words:
        raise ValueError("need at least one word")
    r = words[0].rank
    f = _default_function(words, f, alpha)
    total_tuples = math.factorial(n) ** r
    if total_tuples > max_tuples:
        raise BudgetExceeded("max_tuples", max_tuples, total_tuples)
    perms = np.array(list(permutations(range(n))), dtype=np.int64).reshape(-1, n)
    invs = _inverse_rows(perms)
    m = perms.shape[0]
    if r == 1:
        total, _ = _row_values(words, f, [perms], [invs], m, n)
        return OracleResult(total / m, n, m)
    rest = r - 1
    grids = np.indices((m,) * (rest - 1)).reshape(rest - 1, -1) if rest > 1 else None
    block_rows = m ** (rest - 1) * m
    total = Fraction(0)
    for i in range(m):
        # the first generator is fixed per block, the last runs over all of S_n,
        # and any middle generators run over the grid
        first = np.broadcast_to(perms[i], (block_rows, n))
        first_inv = np.broadcast_to(invs[i], (block_rows, n))
        gens, inverses = [first], [first_inv]
        for j in range(rest - 1):
            idx = np.repeat(grids[j], m)
            gens.append(perms[idx])
            inverses.append(invs[idx])
        last_idx = np.tile(np.arange(m), m ** (rest - 1))
        gens.append(perms[last_idx])
        inverses.append(invs[last_idx])
        s, _ = _row_values(words, f, gens, inverses, block_rows, n)
        total += s
    return OracleResult(total / total_tuples, n, total_tuples)


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def random_permutations(rng: np.random.Generator, count: int, n: int) -> np.ndarray:
    """``count`` independent uniform permutations of ``range(n)`` as rows."""
    return rng.permuted(np.broadcast_to(np.arange(n), (count, n)), axis=1)


def mc_expectation(w: Word | Sequence[Word], n: int, samples: int, seed: int,
                   f: ClassFunction | None = None, alpha: Sequence[int] | None = None,
                   chunk: int = 20_000) -> OracleResult:
    """Sample mean over random tuples; deterministic for a given seed."""
    if samples < 1:
        raise ValueError("samples must be positive")
    words = _as_words(w)
    r = words[0].rank
    f = _default_function(words, f, alpha)
    rng = _rng(seed)
    values = []
    done = 0
    while done < samples:
        rows = min(chunk, samples - done)
        gens = [random_permutations(rng, rows, n) for _ in range(r)]
        invs = [_inverse_rows(g) for g in gens]
        _, vals = _row_values(words, f, gens, invs, rows, n)
        values.append(vals)
        done += rows
    allv = np.concatenate(values)
    mean = float(allv.mean())
    stderr = float(allv.std(ddof=1) / math.sqrt(samples)) if samples > 1 else float("inf")
    return OracleResult(mean, n, samples, stderr, seed)


# ---------------------------------------------------------------- lifts to random covers

def _lift_plan(eta: GraphMorphism):
    """Per component: root, tree steps and closing checks, each as
    (from vertex, to vertex, codomain edge index, forward?)."""
    g = eta.domain
    emap = eta.edge_map
    plans = []
    for comp in g.components():
        root = comp[0]
        seen = {root}
        steps, checks = [], []
        stack = [root]
        used = set()
        incident = {}
        for i, (t, h, _) in enumerate(g.edges):
            incident.setdefault(t, []).append(i)
            incident.setdefault(h, []).append(i)
        while stack:
            v = stack.pop()
            for i in incident.get(v, []):
                if i in used:
                    continue
                t, h, _ = g.edges[i]
                other, forward = (h, True) if t == v else (t, False)
                if t == h:
                    other, forward = v, True
                used.add(i)
                if other in seen:
                    checks.append((v, other, emap[i], forward))
                else:
                    seen.add(other)
                    steps.append((v, other, emap[i], forward))
                    stack.append(other)
        plans.append((root, steps, checks))
    return plans


def lift_count_expectation(eta: GraphMorphism, n: int, samples: int, seed: int) -> OracleResult:
    """Average number of lifts of ``eta`` to a random ``n``-sheeted cover of its codomain."""
    if samples < 1:
        raise ValueError("samples must be positive")
    rng = _rng(seed)
    plans = _lift_plan(eta)
    num_edges = eta.codomain.num_edges
    counts = np.empty(samples, dtype=float)
    for s in range(samples):
        perms = random_permutations(rng, num_edges, n) if num_edges else np.empty((0, n), int)
        invs = _inverse_rows(perms) if num_edges else perms
        total = 1
        for root, steps, checks in plans:
            lift = {root: np.arange(n)}
            for a, b, e, fwd in steps:
                lift[b] = (perms[e] if fwd else invs[e])[lift[a]]
            ok = np.ones(n, dtype=bool)
            for a, b, e, fwd in checks:
                ok &= (perms[e] if fwd else invs[e])[lift[a]] == lift[b]
            total *= int(np.count_nonzero(ok))
        counts[s] = total
    mean = float(counts.mean())
    stderr = float(counts.std(ddof=1) / math.sqrt(samples)) if samples > 1 else float("inf")
    return OracleResult(mean, n, samples, stderr, seed)

"""Word-level statistics: primitivity rank, critical subgroups, expectations
of fixed-point monomials, and a conjugacy decision built on core graphs.

Throughout, ``alpha`` is an exponent vector: ``alpha[i-1]`` is the power of
``xi_i`` in the monomial ``xi_1^alpha_1 * xi_2^alpha_2 * ...``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

from .characters import ClassFunction, divisors, stable_inner
from .errors import InvariantViolation
from .graphs import MultiCoreGraph, bouquet, canonical_form, cycle_graph, powers_graph
from .morphisms import (DEFAULT_MAX_VERTICES, ClosedPartitionLattice, Decomposition,
                        GraphMorphism, chi_max_and_crit, critical_scan,
                        to_bouquet)
from .phi import RationalFnOfN, phi, phi_value
from .words import Word, cyclic_reduce, format_word, max_root


def _check_alpha(alpha: Sequence[int]) -> tuple[int, ...]:
    alpha = tuple(alpha)
    if not alpha or any(a < 0 for a in alpha) or sum(alpha) < 1:
        raise ValueError("exponent vector must be nonnegative with positive sum")
    return alpha


def word_morphism(w: Word, alpha: Sequence[int] = (1,)) -> GraphMorphism:
    """The morphism from the union of cycles for ``w^i`` (``alpha[i-1]`` copies)
    onto the bouquet of the ambient rank."""
    alpha = _check_alpha(alpha)
    if w.is_identity():
        raise ValueError("the identity word has no cycle graph")
    return to_bouquet(powers_graph(w, alpha), bouquet(w.rank))


# ---------------------------------------------------------------- primitivity

@dataclass(frozen=True)
class PrimitivityReport:
    """``pi`` is ``None`` for primitive words (rank infinity)."""

    pi: int | None
    crit: tuple[Decomposition, ...]

    @property
    def crit_graphs(self) -> list[MultiCoreGraph]:
        return [d.middle for d in self.crit]

    def to_json(self) -> dict:
        return {"pi": self.pi if self.pi is not None else "inf",
                "crit": [{"num_vertices": d.middle.num_vertices,
                          "edges": [list(e) for e in d.middle.edges]} for d in self.crit]}


def primitivity(w: Word, max_vertices: int = DEFAULT_MAX_VERTICES) -> PrimitivityReport:
    """Primitivity rank and critical subgroups of ``w``."""
    if w.is_identity():
        raise ValueError("the identity word has no primitivity rank")
    report = chi_max_and_crit(word_morphism(w), max_vertices)
    if report.chi_max is None:
        return PrimitivityReport(None, ())
    return PrimitivityReport(1 - report.chi_max, report.critical)


def chi_ak_max(w: Word, alpha: Sequence[int], max_vertices: int = DEFAULT_MAX_VERTICES
               ) -> tuple[int | None, list[Decomposition]]:
    """Largest negative Euler characteristic of an algebraic quotient of the
    powers graph, and the quotients attaining it."""
    alpha = _check_alpha(alpha)
    if max_root(w)[1] != 1:
        raise ValueError("word must not be a proper power")
    eta = word_morphism(w, alpha)
    lat = ClosedPartitionLattice(eta.domain, eta.fiber_partition(), max_vertices)
    level, found = critical_scan(lat, below=0)
    return level, [Decomposition(eta, lat.elements[i]) for i in found]


# ---------------------------------------------------------------- expectations

def _set_partitions(items: list) -> list[list[list]]:
    if not items:
        return [[]]
    first, rest = items[0], items[1:]
    out = []
    for part in _set_partitions(rest):
        out.append([[first]] + part)
        for i in range(len(part)):
            out.append(part[:i] + [[first] + part[i]] + part[i + 1:])
    return out


def e_unif_monomial(alpha: Sequence[int]) -> Fraction:
    """Large-N expectation of the monomial under the uniform measure.

    Sums, over set partitions of the multiset with ``alpha_i`` copies of
    ``i``, the product over blocks ``A`` of ``sum_{d | gcd(A)} d^(|A|-1)``.
    """
    alpha = _check_alpha(alpha)
    items = [i + 1 for i, a in enumerate(alpha) for _ in range(a)]
    total = 0
    for part in _set_partitions(items):
        term = 1
        for block in part:
            g = 0
            for x in block:
                g = gcd(g, x)
            term *= sum(d ** (len(block) - 1) for d in divisors(g))
        total += term
    return Fraction(total)


def rewrite_for_root(alpha: Sequence[int], d: int) -> tuple[int, ...]:
    """Exponents for the root ``u`` when ``w = u^d``: ``xi_i`` of ``w`` is ``xi_{i d}`` of ``u``."""
    out = [0] * (len(alpha) * d)
    for i, a in enumerate(alpha, start=1):
        out[i * d - 1] += a
    return tuple(out)


@dataclass(frozen=True)
class ExpectationReport:
    word: str
    alpha: tuple[int, ...]
    root: str
    power: int
    root_alpha: tuple[int, ...]
    rational: RationalFnOfN
    e_unif: Fraction
    c_const: Fraction
    crit_count: int
    pi: int | None

    def leading_correction(self) -> tuple[int, Fraction] | None:
        """Predicted ``(exponent, coefficient)`` of the first term after ``e_unif``."""
        if self.pi is None:
            return None
        return 1 - self.pi, self.c_const * self.crit_count

    def to_json(self) -> dict:
        return {"word": self.word, "alpha": list(self.alpha), "root": self.root,
                "power": self.power, "root_alpha": list(self.root_alpha),
                "rational": self.rational.to_json(), "rational_text": str(self.rational),
                "e_unif": str(self.e_unif), "c_const": str(self.c_const),
                "crit_count": self.crit_count,
                "pi": self.pi if self.pi is not None else "inf"}


def expectation(w: Word, alpha: Sequence[int], max_vertices: int = DEFAULT_MAX_VERTICES
                ) -> ExpectationReport:
    """Exact ``E_w[xi_1^alpha_1 ...]`` as a rational function of N, plus the
    data predicting its leading behaviour."""
    alpha = _check_alpha(alpha)
    if w.is_identity():
        raise ValueError("the identity word has no cycle graph")
    root, d = max_root(w)
    root_alpha = rewrite_for_root(alpha, d)
    rational = phi(word_morphism(root, root_alpha), max_vertices)
    mono = ClassFunction.monomial(root_alpha)
    c_const = stable_inner(mono, ClassFunction.xi(1) - 1)
    prim = primitivity(root, max_vertices)
    return ExpectationReport(
        word=format_word(w), alpha=alpha, root=format_word(root), power=d,
        root_alpha=root_alpha, rational=rational, e_unif=e_unif_monomial(root_alpha),
        c_const=c_const, crit_count=len(prim.crit), pi=prim.pi)


def _monomial_terms(w: Word, f: ClassFunction):
    """Yield ``(coefficient, morphism or None)`` per monomial of ``f``; ``None``
    marks the constant term.  Powers are rewritten onto the root."""
    root, d = max_root(w)
    for e, c in sorted(f.convert("xi").terms.items()):
        if not any(e):
            yield c, None
        else:
            yield c, word_morphism(root, rewrite_for_root(e, d))


def class_function_expectation(w: Word, f: ClassFunction,
                               max_vertices: int = DEFAULT_MAX_VERTICES) -> RationalFnOfN:
    """``E_w[f]`` for any stable class function, as a rational function of N."""
    if w.is_identity():
        # every xi_k of the identity is N
        total = RationalFnOfN.constant(0)
        for e, c in f.convert("xi").terms.items():
            total = total + RationalFnOfN((0,) * sum(e) + (c.numerator,), (c.denominator,))
        return total
    total = RationalFnOfN.constant(0)
    for c, eta in _monomial_terms(w, f):
        term = RationalFnOfN((c.numerator,), (c.denominator,))
        total = total + (term if eta is None else term * phi(eta, max_vertices))
    return total


def class_function_value(w: Word, f: ClassFunction, n: int,
                         max_vertices: int = DEFAULT_MAX_VERTICES) -> Fraction:
    """Exact ``E_w[f]`` on ``S_n``, valid for every ``n >= 1``."""
    if w.is_identity():
        return f.evaluate_xi([n] * max((len(e) for e in f.convert("xi").terms), default=0))
    return sum((c if eta is None else c * phi_value(eta, n, max_vertices)
                for c, eta in _monomial_terms(w, f)), Fraction(0))


# ---------------------------------------------------------------- conjugacy

def count_morphisms(src: MultiCoreGraph, dst: MultiCoreGraph) -> int:
    """Number of morphisms from a connected graph ``src`` into ``dst``.

    A morphism is fixed by the image of one vertex, so try them all.
    """
    if src.num_vertices == 0:
        return 1
    count = 0
    for target in range(dst.num_vertices):
        vm = [-1] * src.num_vertices
        vm[0] = target
        stack, ok = [0], True
        while stack and ok:
            v = stack.pop()
            for lab in range(src.rank):
                for nbr, img in ((src.out[lab][v], dst.out[lab][vm[v]]),
                                 (src.inn[lab][v], dst.inn[lab][vm[v]])):
                    if nbr < 0:
                        continue
                    if img < 0:
                        ok = False
                        break
                    if vm[nbr] < 0:
                        vm[nbr] = img
                        stack.append(nbr)
                    elif vm[nbr] != img:
                        ok = False
                        break
                if not ok:
                    break
        if ok:
            count += 1
    return count


@dataclass(frozen=True)
class ConjugacyEvidence:
    """``roots_conjugate`` compares the cyclic subgroups generated by the
    roots; ``same_orientation`` additionally fixes the direction."""

    roots: tuple[str, str]
    exponents: tuple[int, int]
    roots_conjugate: bool
    connected_flat_quotients: int
    disconnected_flat_quotients: int
    same_orientation: bool

    def to_json(self) -> dict:
        return dict(self.__dict__)


def _flat_quotient_counts(root_u: Word, k: int, root_v: Word, m: int, same_root: bool
                          ) -> tuple[int, int]:
    """Counts of Euler-characteristic-zero quotients of the two cycles.

    Connected ones are cycles covered by both; each target cycle ``C``
    contributes ``#hom(u, C) * #hom(v, C) / #aut(C)``.
    """
    cu = cycle_graph(root_u ** k)
    cv = cycle_graph(root_v ** m)

    def own(c, root, e):
        total = 0
        for dd in divisors(e):
            target = cycle_graph(root ** dd)
            total += count_morphisms(c, target) // count_morphisms(target, target)
        return total

    disconnected = own(cu, root_u, k) * own(cv, root_v, m)
    connected = 0
    if same_root:
        for dd in divisors(gcd(k, m)):
            target = cycle_graph(root_u ** dd)
            aut = count_morphisms(target, target)
            connected += count_morphisms(cu, target) * count_morphisms(cv, target) // aut
    return connected, disconnected


def _closed_darts(g: MultiCoreGraph, w: Word) -> frozenset | None:
    """Directed edges ``(tail, label, forward)`` used by ``w`` read as a closed
    walk from some vertex of ``g``, or ``None`` when it never closes."""
    for start in range(g.num_vertices):
        v, darts = start, []
        for c in w.codes:
            lab = c >> 1
            nxt = g.inn[lab][v] if c & 1 else g.out[lab][v]
            if nxt < 0:
                break
            darts.append((nxt, lab, False) if c & 1 else (v, lab, True))
            v = nxt
        else:
            if v == start:
                return frozenset(darts)
    return None


def decide_conjugate(u: Word, v: Word) -> tuple[bool, ConjugacyEvidence]:
    """Decide conjugacy from roots and flat quotients of the two cycles.

    Equal cycle graphs only show that the roots generate conjugate
    subgroups, so ``u`` may be conjugate to ``v`` or to its inverse; the
    orientation is settled by the direction in which each root goes around
    the common cycle.
    """
    if u.is_identity() or v.is_identity():
        raise ValueError("conjugacy decision needs nontrivial words")
    if u.rank != v.rank:
        raise ValueError("rank mismatch")
    ru, k = max_root(u)
    rv, m = max_root(v)
    same = canonical_form(cycle_graph(ru)) == canonical_form(cycle_graph(rv))
    connected, disconnected = _flat_quotient_counts(ru, k, rv, m, same)
    roots_conj = connected > 0
    if roots_conj != same:
        raise InvariantViolation("flat-quotient count disagrees with root comparison")
    oriented = False
    if roots_conj:
        # both cyclic cores go once around the same cycle; compare directions
        g = cycle_graph(rv)
        core_u = cyclic_reduce(ru)[0].word()
        core_v = cyclic_reduce(rv)[0].word()
        oriented = _closed_darts(g, core_u) == _closed_darts(g, core_v)
    evidence = ConjugacyEvidence((format_word(ru), format_word(rv)), (k, m), roots_conj,
                                 connected, disconnected, oriented)
    return oriented and k == m, evidence


def report_json(obj) -> str:
    return json.dumps(obj.to_json(), indent=2, sort_keys=True)

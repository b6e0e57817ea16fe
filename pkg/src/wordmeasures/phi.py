"""Exact rational functions of N attached to graph morphisms.

The central quantity is the expected number of lifts of a morphism to a
random N-sheeted cover, written as a sum over closed partitions of the
falling-factorial ratio

    prod over codomain vertices (N)_{fiber size}
    --------------------------------------------
    prod over codomain edges    (N)_{fiber size}

Every denominator that shows up is a product of factors ``(N - i)`` with
``i`` a nonnegative integer, so rational functions are stored with a
factored denominator.  That keeps addition cheap (no polynomial gcds) and
makes the reduced form trivial to reach.
"""

from __future__ import annotations

import json
import warnings
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence

from .errors import InvariantViolation, ThresholdWarning
from .graphs import MultiCoreGraph, canonical_form
from .morphisms import (DEFAULT_MAX_VERTICES, ClosedPartitionLattice, GraphMorphism,
                        enumerate_closed_partitions, image)

Poly = tuple[int, ...]  # coefficients, lowest degree first


# ---------------------------------------------------------------- polynomials

def _trim(p: Iterable) -> tuple:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def padd(a: Sequence, b: Sequence) -> tuple:
    n = max(len(a), len(b))
    return _trim((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n))


def pneg(a: Sequence) -> tuple:
    return tuple(-x for x in a)


def pmul(a: Sequence, b: Sequence) -> tuple:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def peval(p: Sequence, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def pdivmod(a: Sequence, b: Sequence) -> tuple[tuple, tuple]:
    """Division with remainder over the rationals."""
    b = _trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    rem = [Fraction(x) for x in a]
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lead = Fraction(b[-1])
    for i in range(len(q) - 1, -1, -1):
        c = rem[i + len(b) - 1] / lead
        q[i] = c
        if c:
            for j, y in enumerate(b):
                rem[i + j] -= c * y
    return _trim(q), _trim(rem)


def pgcd(a: Sequence, b: Sequence) -> tuple:
    a, b = _trim(Fraction(x) for x in a), _trim(Fraction(x) for x in b)
    while b:
        a, b = b, pdivmod(a, b)[1]
    return a


def _primitive(p: Sequence) -> tuple[tuple[int, ...], Fraction]:
    """Split a rational polynomial into (integer primitive part, content)."""
    fr = [Fraction(x) for x in p]
    if not fr:
        return (), Fraction(0)
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = gcd(g, x)
    return tuple(x // g for x in ints), Fraction(g, den)


def linear_power(root: int, k: int) -> Poly:
    p: Poly = (1,)
    for _ in range(k):
        p = pmul(p, (-root, 1))
    return p


def falling_factorial_poly(k: int) -> Poly:
    """``(N)_k = N (N-1) ... (N-k+1)``."""
    p: Poly = (1,)
    for i in range(k):
        p = pmul(p, (-i, 1))
    return p


def falling_factorial(n: int, k: int) -> int:
    out = 1
    for i in range(k):
        out *= n - i
    return out


def _divide_linear(p: Poly, root: int) -> Poly | None:
    """``p / (N - root)`` if exact, else ``None`` (synthetic division)."""
    if not p:
        return p
    out = [0] * (len(p) - 1)
    acc = 0
    for i in range(len(p) - 1, 0, -1):
        acc = acc * root + p[i]
        out[i - 1] = acc
    if acc * root + p[0] != 0:
        return None
    return tuple(out)


def format_poly(p: Sequence, var: str = "N") -> str:
    if not p:
        return "0"
    parts = []
    for i in range(len(p) - 1, -1, -1):
        c = p[i]
        if not c:
            continue
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        mag = abs(c)
        body = str(mag) if not mono else (mono if mag == 1 else f"{mag}*{mono}")
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append((" - " if c < 0 else " + ") + body)
    return "".join(parts)


# ---------------------------------------------------------------- Laurent series

@dataclass(frozen=True)
class LaurentSeries:
    """Expansion ``sum_k coeffs[k] * N^(leading - k)`` truncated after ``order + 1`` terms."""

    leading: int
    coeffs: tuple[Fraction, ...]

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def coefficient(self, exponent: int) -> Fraction:
        k = self.leading - exponent
        if k < 0:
            return Fraction(0)
        if k >= len(self.coeffs):
            raise ValueError(f"exponent {exponent} beyond truncation order")
        return self.coeffs[k]

    def __sub__(self, other: "LaurentSeries") -> "LaurentSeries":
        top = max(self.leading, other.leading)
        low = max(self.leading - self.order, other.leading - other.order)
        coeffs = tuple(self.coefficient(e) - other.coefficient(e)
                       for e in range(top, low - 1, -1))
        return LaurentSeries(top, coeffs)

    def leading_term(self) -> tuple[int, Fraction] | None:
        """First nonzero ``(exponent, coefficient)`` within the truncation."""
        for k, c in enumerate(self.coeffs):
            if c:
                return self.leading - k, c
        return None

    def to_json(self) -> dict:
        return {"e0": self.leading, "coeffs": [str(c) for c in self.coeffs],
                "order": self.order}

    def __str__(self):
        out = ""
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            e = self.leading - k
            mag = abs(c)
            if e == 0:
                body = _fraction_text(mag)
            else:
                power = "N" if e == 1 else f"N^{e}"
                body = power if mag == 1 else f"{_fraction_text(mag)}*{power}"
            if not out:
                out = ("-" if c < 0 else "") + body
            else:
                out += (" - " if c < 0 else " + ") + body
        return (out or "0") + " + ..."


def series_inverse(coeffs: Sequence, order: int) -> list[Fraction]:
    """Power series inverse of ``sum coeffs[i] x^i`` up to ``x^order``."""
    c0 = Fraction(coeffs[0])
    if not c0:
        raise ZeroDivisionError("series with zero constant term")
    g = [Fraction(0)] * (order + 1)
    g[0] = 1 / c0
    for q in range(1, order + 1):
        acc = Fraction(0)
        for j in range(1, min(q, len(coeffs) - 1) + 1):
            acc += coeffs[j] * g[q - j]
        g[q] = -acc / c0
    return g


# ---------------------------------------------------------------- rational functions

class RationalFnOfN:
    """Reduced ratio of integer polynomials in ``N`` with a validity threshold.

    ``n_min`` is the least N from which the value is meaningful for the
    quantity it represents; arithmetic keeps the larger threshold.
    """

    __slots__ = ("num", "den", "n_min", "_roots")

    def __init__(self, num: Sequence[int], den: Sequence[int] = (1,), n_min: int = 1):
        num = _trim(Fraction(x) for x in num)
        den = _trim(Fraction(x) for x in den)
        if not den:
            raise ZeroDivisionError("zero denominator")
        g = pgcd(num, den) if num else den
        num = pdivmod(num, g)[0]
        den = pdivmod(den, g)[0]
        pn, cn = _primitive(num)
        pd, cd = _primitive(den)
        scale = cn / cd
        if pd[-1] < 0:
            pd, scale = pneg(pd), -scale
        # fold the rational scale back into integer polynomials
        self.num = tuple(x * scale.numerator for x in pn)
        self.den = tuple(x * scale.denominator for x in pd)
        if not self.num:
            self.den = (1,)
        self._roots = None
        self.n_min = max(n_min, 1, self._pole_bound())

    @classmethod
    def _from_factored(cls, num: Poly, roots: dict[int, int], n_min: int = 1) -> "RationalFnOfN":
        """``num / prod (N - r)^m`` with integer ``num``; cancels common factors."""
        num = _trim(num)
        roots = {r: m for r, m in roots.items() if m > 0}
        if not num:
            roots = {}
        for r in list(roots):
            while roots[r]:
                q = _divide_linear(num, r)
                if q is None:
                    break
                num = q
                roots[r] -= 1
            if not roots[r]:
                del roots[r]
        den: Poly = (1,)
        for r in sorted(roots):
            den = pmul(den, linear_power(r, roots[r]))
        self = object.__new__(cls)
        self.num = num
        self.den = den
        self._roots = roots
        self.n_min = max(n_min, 1, self._pole_bound())
        return self

    @classmethod
    def constant(cls, c: int, n_min: int = 1) -> "RationalFnOfN":
        return cls._from_factored((c,) if c else (), {}, n_min)

    @classmethod
    def monomial(cls, exponent: int, coeff: int = 1) -> "RationalFnOfN":
        """``coeff * N^exponent``; negative exponents put ``N`` in the denominator."""
        if exponent >= 0:
            return cls._from_factored((0,) * exponent + (coeff,), {})
        return cls._from_factored((coeff,), {0: -exponent})

    def _pole_bound(self) -> int:
        """One more than the largest nonnegative integer root of the denominator."""
        roots = self._roots if self._roots is not None else self._find_roots()
        nonneg = [r for r in roots if r >= 0]
        return max(nonneg) + 1 if nonneg else 1

    def _find_roots(self) -> dict[int, int]:
        """Integer roots of the denominator (used for non-factored inputs)."""
        out: dict[int, int] = {}
        p = self.den
        if len(p) <= 1:
            return out
        const = next(x for x in p if x)
        k = p.index(const)
        if k:
            out[0] = k
            p = p[k:]
        bound = abs(p[0])
        cands = [d for d in range(1, bound + 1) if bound % d == 0]
        for d in cands:
            for r in (d, -d):
                while True:
                    q = _divide_linear(p, r)
                    if q is None:
                        break
                    p = q
                    out[r] = out.get(r, 0) + 1
        return out

    @property
    def denominator_roots(self) -> dict[int, int] | None:
        """Multiplicities of roots when the denominator splits over the integers."""
        if self._roots is None:
            roots = self._find_roots()
            d: Poly = (1,)
            for r, m in roots.items():
                d = pmul(d, linear_power(r, m))
            if tuple(d) != tuple(self.den) or not self.den or self.den[-1] != 1:
                return None
            self._roots = roots
        return self._roots

    # arithmetic ------------------------------------------------------------

    @staticmethod
    def _coerce(x) -> "RationalFnOfN":
        if isinstance(x, RationalFnOfN):
            return x
        if isinstance(x, int):
            return RationalFnOfN.constant(x)
        if isinstance(x, Fraction):
            return RationalFnOfN((x.numerator,), (x.denominator,))
        return NotImplemented

    def _combine(self, other, sign: int) -> "RationalFnOfN":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n_min = max(self.n_min, other.n_min)
        ra, rb = self.denominator_roots, other.denominator_roots
        if ra is not None and rb is not None:
            roots = {r: max(ra.get(r, 0), rb.get(r, 0)) for r in set(ra) | set(rb)}
            na, nb = self.num, other.num
            for r, m in roots.items():
                na = pmul(na, linear_power(r, m - ra.get(r, 0)))
                nb = pmul(nb, linear_power(r, m - rb.get(r, 0)))
            nb = nb if sign > 0 else pneg(nb)
            return RationalFnOfN._from_factored(padd(na, nb), roots, n_min)
        nb = other.num if sign > 0 else pneg(other.num)
        return RationalFnOfN(padd(pmul(self.num, other.den), pmul(nb, self.den)),
                             pmul(self.den, other.den), n_min)

    def __add__(self, other):
        return self._combine(other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, -1)

    def __rsub__(self, other):
        return self._coerce(other)._combine(self, -1)

    def __neg__(self):
        if self._roots is not None:
            return RationalFnOfN._from_factored(pneg(self.num), dict(self._roots), self.n_min)
        return RationalFnOfN(pneg(self.num), self.den, self.n_min)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n_min = max(self.n_min, other.n_min)
        ra, rb = self.denominator_roots, other.denominator_roots
        if ra is not None and rb is not None:
            roots = Counter(ra)
            roots.update(rb)
            return RationalFnOfN._from_factored(pmul(self.num, other.num), dict(roots), n_min)
        return RationalFnOfN(pmul(self.num, other.num), pmul(self.den, other.den), n_min)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.num:
            raise ZeroDivisionError("division by the zero function")
        return RationalFnOfN(pmul(self.num, other.den), pmul(self.den, other.num),
                             max(self.n_min, other.n_min))

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def with_n_min(self, n_min: int) -> "RationalFnOfN":
        """Copy with the validity threshold replaced (poles still respected)."""
        out = object.__new__(RationalFnOfN)
        out.num, out.den, out._roots = self.num, self.den, self._roots
        out.n_min = max(n_min, 1)
        return out

    def is_zero(self) -> bool:
        return not self.num

    # evaluation ------------------------------------------------------------

    def __call__(self, n) -> Fraction:
        d = peval(self.den, n)
        if d == 0:
            raise ZeroDivisionError(f"pole at N={n}")
        return Fraction(peval(self.num, n)) / d

    def has_pole(self, n: int) -> bool:
        return peval(self.den, n) == 0

    def laurent(self, order: int) -> LaurentSeries:
        """Expansion at ``N -> infinity`` keeping ``order + 1`` coefficients."""
        if not self.num:
            return LaurentSeries(0, (Fraction(0),) * (order + 1))
        lead = len(self.num) - len(self.den)
        num_rev = list(reversed(self.num))
        den_rev = list(reversed(self.den))
        inv = series_inverse(den_rev, order)
        coeffs = []
        for k in range(order + 1):
            coeffs.append(sum((Fraction(num_rev[i]) * inv[k - i]
                               for i in range(min(k, len(num_rev) - 1) + 1)), Fraction(0)))
        return LaurentSeries(lead, tuple(coeffs))

    # serialization ---------------------------------------------------------

    def to_json(self) -> dict:
        return {"num": list(self.num), "den": list(self.den), "n_min": self.n_min}

    @staticmethod
    def from_json(d: dict | str) -> "RationalFnOfN":
        if isinstance(d, str):
            d = json.loads(d)
        return RationalFnOfN(d["num"], d["den"], d.get("n_min", 1))

    def __repr__(self):
        return f"RationalFnOfN({self}, n_min={self.n_min})"

    def _factored_denominator(self) -> tuple[int, dict[int, int]] | None:
        """``(lead, roots)`` with ``den = lead * prod (N - r)^m``, if it splits."""
        lead = self.den[-1]
        monic = tuple(Fraction(c, lead) for c in self.den)
        if any(c.denominator != 1 for c in monic):
            return None
        probe = RationalFnOfN.__new__(RationalFnOfN)
        probe.den = tuple(int(c) for c in monic)
        roots = probe._find_roots()
        d: Poly = (1,)
        for r, m in roots.items():
            d = pmul(d, linear_power(r, m))
        return (lead, roots) if d == probe.den else None

    def __str__(self):
        """Polynomial part plus a proper fraction with factored denominator."""
        q, r = pdivmod(self.num, self.den)
        parts: list[tuple[bool, str]] = []  # (negative, text without sign)
        if q:
            text = format_poly(q)
            parts.append((text.startswith("-"), text.lstrip("-")))
        if r:
            r_int, r_c = _primitive(r)
            if r_int[-1] < 0:
                r_int, r_c = pneg(r_int), -r_c
            split = self._factored_denominator()
            if split is None:
                factors, lead = [f"({format_poly(self.den)})"], 1
            else:
                lead, roots = split
                factors = []
                for root in sorted(roots):
                    base = "N" if root == 0 else (f"(N-{root})" if root > 0 else f"(N+{-root})")
                    factors.append(base if roots[root] == 1 else f"{base}^{roots[root]}")
            scale = r_c / lead
            if len(r_int) == 1:
                top, bottom = abs(scale.numerator) * r_int[0], scale.denominator
                body = str(top)
            else:
                top, bottom = abs(scale.numerator), scale.denominator
                body = ("" if top == 1 else f"{top}*") + f"({format_poly(r_int)})"
            if bottom != 1:
                factors.insert(0, str(bottom))
            den_text = factors[0] if len(factors) == 1 else "(" + "*".join(factors) + ")"
            parts.append((scale < 0, f"{body}/{den_text}"))
        if not parts:
            return "0"
        out = ("-" if parts[0][0] else "") + parts[0][1]
        for neg, text in parts[1:]:
            out += (" - " if neg else " + ") + text
        return out


def _fraction_text(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def ratio_of_falling_factorials(vertex_fibers: Iterable[int], edge_fibers: Iterable[int],
                                scale: int = 1) -> RationalFnOfN:
    """``scale * prod (N)_a / prod (N)_b`` in reduced form."""
    mult: Counter = Counter()
    for a in vertex_fibers:
        for i in range(a):
            mult[i] += 1
    for b in edge_fibers:
        for i in range(b):
            mult[i] -= 1
    num: Poly = (scale,)
    roots = {}
    for i, m in mult.items():
        if m > 0:
            num = pmul(num, linear_power(i, m))
        elif m < 0:
            roots[i] = -m
    return RationalFnOfN._from_factored(num, roots)


def exact_falling_ratio(n: int, vertex_fibers: Iterable[int], edge_fibers: Iterable[int]
                        ) -> Fraction:
    """Expected number of injective lifts in a random degree-``n`` cover.

    Zero when some vertex fiber exceeds ``n``; otherwise the ratio itself,
    whose denominator is then nonzero because edge fibers never exceed the
    fiber of their tail vertex.
    """
    vertex_fibers, edge_fibers = list(vertex_fibers), list(edge_fibers)
    if any(a > n for a in vertex_fibers):
        return Fraction(0)
    num = 1
    for a in vertex_fibers:
        num *= falling_factorial(n, a)
    den = 1
    for b in edge_fibers:
        den *= falling_factorial(n, b)
    return Fraction(num, den)


# ---------------------------------------------------------------- fibers and L

def fiber_signature(g: MultiCoreGraph, fine: Sequence[int], coarse: Sequence[int]
                    ) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Fiber sizes of the induced morphism between two closed quotients.

    Returns sorted vertex-fiber sizes and sorted edge-fiber sizes.
    """
    vfib: Counter = Counter()
    for b, c in set(zip(fine, coarse)):
        vfib[c] += 1
    efib: Counter = Counter()
    seen = set()
    for t, _, lab in g.edges:
        key = (fine[t], lab)
        if key not in seen:
            seen.add(key)
            efib[(coarse[t], lab)] += 1
    return tuple(sorted(vfib.values())), tuple(sorted(efib.values()))


def _signature_of_morphism(eta: GraphMorphism) -> tuple[tuple[int, ...], tuple[int, ...]]:
    vfib = Counter(eta.vertex_map)
    efib = Counter(eta.edge_map)
    return tuple(sorted(vfib.values())), tuple(sorted(efib.values()))


def L_B(eta: GraphMorphism) -> RationalFnOfN:
    """Falling-factorial ratio for a surjective morphism, with exact threshold."""
    if not eta.is_surjective:
        raise ValueError("L_B needs a surjective morphism")
    sig = _signature_of_morphism(eta)
    f = ratio_of_falling_factorials(*sig)
    top = max(sig[1], default=0)
    return _with_threshold(f, lambda n: exact_falling_ratio(n, *sig), top, "L_B")


def _with_threshold(f: RationalFnOfN, exact, top: int, what: str) -> RationalFnOfN:
    """Set ``n_min`` to the least N from which ``f`` agrees with ``exact``.

    Agreement is automatic for ``N >= top``; below that each N is checked.
    Warns when the pole-based guess would have been too small.
    """
    guess = f.n_min
    start = top if top >= 1 else 1
    n = start - 1
    while n >= 1 and not f.has_pole(n) and f(n) == exact(n):
        n -= 1
    threshold = max(n + 1, 1)
    if guess < threshold:
        warnings.warn(f"{what}: pole bound N>={guess} is too small; "
                      f"exact agreement starts at N={threshold}", ThresholdWarning,
                      stacklevel=3)
    return f.with_n_min(threshold)


# ---------------------------------------------------------------- Phi

def _phi_signatures(eta: GraphMorphism, max_vertices: int) -> Counter:
    g = eta.domain
    top = eta.fiber_partition()
    sigs: Counter = Counter()
    for p in enumerate_closed_partitions(g, top, max_vertices):
        sigs[fiber_signature(g, p, top)] += 1
    return sigs


def _sum_signatures(sigs: Counter) -> RationalFnOfN:
    total = RationalFnOfN.constant(0)
    for sig, count in sorted(sigs.items()):
        total = total + ratio_of_falling_factorials(*sig, scale=count)
    return total


_PHI_CACHE: dict = {}


def _phi_key(eta: GraphMorphism):
    if eta.codomain.num_vertices == 1:
        return ("bouquet", canonical_form(eta.domain))
    return ("exact", eta.domain.num_vertices, tuple(sorted(eta.domain.edges)),
            eta.fiber_partition())


def phi_signatures(eta: GraphMorphism, max_vertices: int = DEFAULT_MAX_VERTICES) -> Counter:
    """Multiset of fiber signatures over all decompositions of ``eta``."""
    key = _phi_key(eta)
    if key not in _PHI_CACHE:
        _PHI_CACHE[key] = _phi_signatures(eta, max_vertices)
    return _PHI_CACHE[key]


def phi(eta: GraphMorphism, max_vertices: int = DEFAULT_MAX_VERTICES) -> RationalFnOfN:
    """Expected number of lifts of ``eta`` to a random N-cover, as a function of N."""
    sigs = phi_signatures(eta, max_vertices)
    f = _sum_signatures(sigs)
    top = max((max(e, default=0) for _, e in sigs), default=0)
    return _with_threshold(f, lambda n: phi_value(eta, n, max_vertices), top, "phi")


def phi_value(eta: GraphMorphism, n: int, max_vertices: int = DEFAULT_MAX_VERTICES) -> Fraction:
    """Exact value of the lift count at a single ``N``, valid for every ``N >= 1``."""
    if n < 1:
        raise ValueError("N must be positive")
    sigs = phi_signatures(eta, max_vertices)
    return sum((c * exact_falling_ratio(n, *sig) for sig, c in sigs.items()), Fraction(0))


def decomposition_count(eta: GraphMorphism, max_vertices: int = DEFAULT_MAX_VERTICES) -> int:
    return sum(phi_signatures(eta, max_vertices).values())


# ---------------------------------------------------------------- Laurent via permutation counts

@lru_cache(maxsize=None)
def stirling_first_unsigned(n: int, k: int) -> int:
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return stirling_first_unsigned(n - 1, k - 1) + (n - 1) * stirling_first_unsigned(n - 1, k)


def norm_count_vector(fiber_sizes: Iterable[int], max_j: int) -> list[int]:
    """Counts of fiber-preserving permutations by norm ``0..max_j``.

    A permutation of an ``n``-set with ``n - j`` cycles has norm ``j``;
    independent fibers convolve.
    """
    vec = [1] + [0] * max_j
    for n in fiber_sizes:
        fib = [stirling_first_unsigned(n, n - j) if j <= n - 1 or (n == 0 and j == 0) else 0
               for j in range(max_j + 1)]
        if n == 0:
            fib = [1] + [0] * max_j
        new = [0] * (max_j + 1)
        for i, a in enumerate(vec):
            if a:
                for j in range(max_j + 1 - i):
                    new[i + j] += a * fib[j]
        vec = new
    return vec


def norm_counts(fiber_sizes: Iterable[int], j: int) -> int:
    if j < 0:
        raise ValueError("j must be nonnegative")
    return norm_count_vector(fiber_sizes, j)[j]


def laurent_L_direct(eta: GraphMorphism, order: int) -> LaurentSeries:
    """Expansion of ``L_B(eta)`` from permutation counts, without dividing polynomials."""
    if not eta.is_surjective:
        raise ValueError("needs a surjective morphism")
    vsig, esig = _signature_of_morphism(eta)
    vcount = norm_count_vector(vsig, order)
    ecount = norm_count_vector(esig, order)
    e_series = [(-1) ** j * c for j, c in enumerate(ecount)]
    g = series_inverse(e_series, order)
    coeffs = []
    for p in range(order + 1):
        coeffs.append(sum((Fraction((-1) ** j * vcount[j]) * g[p - j] for j in range(p + 1)),
                          Fraction(0)))
    chi = eta.domain.euler_characteristic
    return LaurentSeries(chi, tuple(coeffs))


def laurent(f: RationalFnOfN, order: int) -> LaurentSeries:
    return f.laurent(order)


# ---------------------------------------------------------------- Moebius inversions

class MoebiusTables:
    """L, Phi, R, C and their algebraic versions on a closed-partition lattice.

    Element ``i`` stands for the quotient morphism from the graph to the
    ``i``-th quotient; a pair ``(i, j)`` with ``i`` below ``j`` stands for the
    induced morphism between two quotients.
    """

    def __init__(self, lattice: ClosedPartitionLattice):
        self.lat = lattice
        m = len(lattice)
        order = sorted(range(m), key=lambda i: max(lattice.elements[i], default=-1))
        up = [0] * m
        for i in order:
            mask = 1 << i
            for s in lattice.merge_successors(i):
                mask |= up[s]
            up[i] = mask
        self.up = up
        down = [0] * m
        for i in range(m):
            mask = up[i]
            while mask:
                low = mask & -mask
                down[low.bit_length() - 1] |= 1 << i
                mask ^= low
        self.down = down
        self._L: dict = {}
        self._phi: dict = {}
        self._R: dict = {}
        self._C: dict = {}
        self._Lalg: dict = {}
        self._Calg: dict = {}
        self._sig_cache: dict = {}

    @staticmethod
    def _members(mask: int) -> list[int]:
        out = []
        while mask:
            low = mask & -mask
            out.append(low.bit_length() - 1)
            mask ^= low
        return out

    def interval(self, i: int, j: int) -> list[int]:
        return self._members(self.up[i] & self.down[j])

    def leq(self, i: int, j: int) -> bool:
        return bool(self.up[i] >> j & 1)

    def L(self, i: int, j: int) -> RationalFnOfN:
        key = (i, j)
        if key not in self._L:
            sig = fiber_signature(self.lat.graph, self.lat.elements[i], self.lat.elements[j])
            if sig not in self._sig_cache:
                self._sig_cache[sig] = ratio_of_falling_factorials(*sig)
            self._L[key] = self._sig_cache[sig]
        return self._L[key]

    def phi(self, i: int, j: int) -> RationalFnOfN:
        key = (i, j)
        if key not in self._phi:
            total = RationalFnOfN.constant(0)
            for k in self.interval(i, j):
                total = total + self.L(k, j)
            self._phi[key] = total
        return self._phi[key]

    def R(self, i: int, j: int) -> RationalFnOfN:
        """Right inversion: Phi(i, j) is the sum of R(i, k) over k in [i, j]."""
        key = (i, j)
        if key not in self._R:
            val = self.phi(i, j)
            for k in self.interval(i, j):
                if k != j:
                    val = val - self.R(i, k)
            self._R[key] = val
        return self._R[key]

    def C(self, i: int, j: int) -> RationalFnOfN:
        """Two-sided inversion: L(i, j) is the sum of C(i, k) over k in [i, j]."""
        key = (i, j)
        if key not in self._C:
            val = self.L(i, j)
            for k in self.interval(i, j):
                if k != j:
                    val = val - self.C(i, k)
            self._C[key] = val
        return self._C[key]

    def R_from_C(self, i: int, j: int) -> RationalFnOfN:
        total = RationalFnOfN.constant(0)
        for k in self.interval(i, j):
            total = total + self.C(k, j)
        return total

    # algebraic versions ----------------------------------------------------

    def _alg_interval(self, i: int, j: int) -> list[int]:
        lat = self.lat
        return [k for k in self.interval(i, j)
                if lat.is_algebraic(i, k) and lat.is_algebraic(k, j)]

    def L_alg(self, i: int, j: int) -> RationalFnOfN:
        key = (i, j)
        if key not in self._Lalg:
            val = self.phi(i, j)
            for k in self._alg_interval(i, j):
                if k != i:
                    val = val - self.L_alg(k, j)
            self._Lalg[key] = val
        return self._Lalg[key]

    def C_alg(self, i: int, j: int) -> RationalFnOfN:
        """Two-sided inversion restricted to chains of algebraic morphisms."""
        if not self.lat.is_algebraic(i, j):
            raise ValueError("C_alg is defined on algebraic morphisms only")
        key = (i, j)
        if key not in self._Calg:
            val = self.L_alg(i, j)
            for k in self._alg_interval(i, j):
                if k != j:
                    val = val - self.C_alg(i, k)
            self._Calg[key] = val
        return self._Calg[key]

    def C_alg_via_free(self, i: int, j: int) -> RationalFnOfN:
        """Sum of C(k, j) over k in [i, j] with the leg i -> k free."""
        total = RationalFnOfN.constant(0)
        for k in self.interval(i, j):
            if self.lat.is_free(i, k):
                total = total + self.C(k, j)
        return total


def moebius_tables(eta: GraphMorphism, max_vertices: int = DEFAULT_MAX_VERTICES) -> MoebiusTables:
    lat = ClosedPartitionLattice(eta.domain, eta.fiber_partition(), max_vertices)
    return MoebiusTables(lat)


def _require_surjective(eta: GraphMorphism):
    if not eta.is_surjective:
        raise ValueError("needs a surjective morphism")


def moebius_R(eta: GraphMorphism, max_vertices: int = DEFAULT_MAX_VERTICES) -> RationalFnOfN:
    _require_surjective(eta)
    t = moebius_tables(eta, max_vertices)
    return t.R(t.lat.bottom, t.lat.top_index)


def moebius_C(eta: GraphMorphism, max_vertices: int = DEFAULT_MAX_VERTICES) -> RationalFnOfN:
    _require_surjective(eta)
    t = moebius_tables(eta, max_vertices)
    return t.C(t.lat.bottom, t.lat.top_index)


def moebius_C_alg(eta: GraphMorphism, max_vertices: int = DEFAULT_MAX_VERTICES,
                  route: str = "definition") -> RationalFnOfN:
    """Algebraic two-sided inversion; ``route`` is ``"definition"`` or ``"free"``."""
    _require_surjective(eta)
    t = moebius_tables(eta, max_vertices)
    i, j = t.lat.bottom, t.lat.top_index
    if not t.lat.is_algebraic(i, j):
        raise ValueError("C_alg is defined on algebraic morphisms only")
    if route == "definition":
        return t.C_alg(i, j)
    if route == "free":
        return t.C_alg_via_free(i, j)
    raise ValueError(f"unknown route {route!r}")


def phi_via_image(eta: GraphMorphism, max_vertices: int = DEFAULT_MAX_VERTICES) -> RationalFnOfN:
    """Phi of the surjective part; equal to :func:`phi` (free extensions do not matter)."""
    return phi(image(eta).onto, max_vertices)


def check_identity(f: RationalFnOfN, g: RationalFnOfN) -> None:
    if f != g:
        raise InvariantViolation(f"rational functions differ: {f} vs {g}")

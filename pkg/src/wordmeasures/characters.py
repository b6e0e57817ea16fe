"""Stable class functions on symmetric groups.

Two polynomial bases are used.  ``xi_k(s)`` counts fixed points of ``s^k``
and ``a_t(s)`` counts ``t``-cycles of ``s``; they are related by
``xi_k = sum over t | k of t * a_t``.

Inner products are the large-N limits of the usual inner product on
``S_N``.  In that limit the cycle counts ``a_t`` of a uniform permutation
become independent Poisson variables with mean ``1/t``, so the inner
product of monomials in the ``a`` basis reduces to Poisson moments.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, prod
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import ParseError

Exponents = tuple[int, ...]  # position i holds the exponent of variable i+1


def _trim(e: Iterable[int]) -> Exponents:
    e = list(e)
    while e and e[-1] == 0:
        e.pop()
    return tuple(e)


# ---------------------------------------------------------------- partitions

@dataclass(frozen=True, order=True)
class IntPartition:
    parts: tuple[int, ...]

    def __post_init__(self):
        parts = tuple(self.parts)
        if any(p <= 0 for p in parts) or any(a < b for a, b in zip(parts, parts[1:])):
            raise ValueError(f"not a partition: {parts}")
        object.__setattr__(self, "parts", parts)

    @staticmethod
    def of(parts: Iterable[int]) -> "IntPartition":
        return IntPartition(tuple(sorted((p for p in parts if p), reverse=True)))

    @property
    def size(self) -> int:
        return sum(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def multiplicities(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for p in self.parts:
            out[p] = out.get(p, 0) + 1
        return out

    def z(self) -> int:
        """Size of the centralizer of a permutation with this cycle type."""
        return prod(r ** m * factorial(m) for r, m in self.multiplicities().items())

    def union(self, other: "IntPartition") -> "IntPartition":
        return IntPartition.of(self.parts + other.parts)

    def __str__(self):
        return "(" + ",".join(map(str, self.parts)) + ")"


def partitions_of(n: int, max_part: int | None = None) -> Iterator[IntPartition]:
    """Partitions of ``n`` in reverse lexicographic order."""
    def rec(rem, cap):
        if rem == 0:
            yield ()
            return
        for p in range(min(rem, cap), 0, -1):
            for rest in rec(rem - p, p):
                yield (p,) + rest
    for parts in rec(n, max_part if max_part is not None else n):
        yield IntPartition(parts)


# ---------------------------------------------------------------- number theory helpers

def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def mobius(n: int) -> int:
    out, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            out = -out
        p += 1
    return -out if m > 1 else out


@lru_cache(maxsize=None)
def stirling_second(n: int, k: int) -> int:
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return k * stirling_second(n - 1, k) + stirling_second(n - 1, k - 1)


def poisson_moment(b: int, mean: Fraction) -> Fraction:
    """``E[Z^b]`` for ``Z`` Poisson with the given mean."""
    return sum((stirling_second(b, j) * mean ** j for j in range(b + 1)), Fraction(0))


# ---------------------------------------------------------------- class functions

class ClassFunction:
    """Sparse polynomial in ``xi_1, xi_2, ...`` or in ``a_1, a_2, ...``."""

    __slots__ = ("basis", "terms")

    def __init__(self, basis: str, terms: Mapping[Sequence[int], object] | None = None):
        if basis not in ("xi", "a"):
            raise ValueError("basis must be 'xi' or 'a'")
        self.basis = basis
        clean: dict[Exponents, Fraction] = {}
        for e, c in (terms or {}).items():
            if any(x < 0 for x in e):
                raise ValueError("negative exponent")
            key = _trim(e)
            clean[key] = clean.get(key, Fraction(0)) + Fraction(c)
        self.terms = {e: c for e, c in clean.items() if c}

    # constructors ----------------------------------------------------------

    @staticmethod
    def constant(c, basis: str = "xi") -> "ClassFunction":
        return ClassFunction(basis, {(): c})

    @staticmethod
    def variable(basis: str, index: int) -> "ClassFunction":
        if index < 1:
            raise ValueError("variable indices start at 1")
        return ClassFunction(basis, {(0,) * (index - 1) + (1,): 1})

    @staticmethod
    def xi(k: int) -> "ClassFunction":
        return ClassFunction.variable("xi", k)

    @staticmethod
    def a(t: int) -> "ClassFunction":
        return ClassFunction.variable("a", t)

    @staticmethod
    def monomial(alpha: Sequence[int], basis: str = "xi") -> "ClassFunction":
        """``prod var_i ^ alpha[i-1]``."""
        return ClassFunction(basis, {tuple(alpha): 1})

    # arithmetic ------------------------------------------------------------

    def _align(self, other) -> "ClassFunction":
        if isinstance(other, (int, Fraction)):
            return ClassFunction.constant(other, self.basis)
        if not isinstance(other, ClassFunction):
            return NotImplemented
        return other if other.basis == self.basis else other.convert(self.basis)

    def __add__(self, other):
        other = self._align(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, Fraction(0)) + c
        return ClassFunction(self.basis, terms)

    __radd__ = __add__

    def __neg__(self):
        return ClassFunction(self.basis, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._align(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._align(other)
        if other is NotImplemented:
            return other
        terms: dict[Exponents, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                n = max(len(e1), len(e2))
                e = tuple((e1[i] if i < len(e1) else 0) + (e2[i] if i < len(e2) else 0)
                          for i in range(n))
                terms[e] = terms.get(e, Fraction(0)) + c1 * c2
        return ClassFunction(self.basis, terms)

    __rmul__ = __mul__

    def __truediv__(self, c):
        c = Fraction(c)
        return ClassFunction(self.basis, {e: v / c for e, v in self.terms.items()})

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not class functions")
        out = ClassFunction.constant(1, self.basis)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        other = self._align(other)
        if other is NotImplemented:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        f = self.convert("xi")
        return hash(tuple(sorted(f.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    # bases -----------------------------------------------------------------

    def convert(self, to: str) -> "ClassFunction":
        if to == self.basis:
            return self
        if to not in ("xi", "a"):
            raise ValueError("basis must be 'xi' or 'a'")
        image = _xi_in_a if to == "a" else _a_in_xi
        out = ClassFunction(to)
        for e, c in self.terms.items():
            term = ClassFunction.constant(c, to)
            for i, k in enumerate(e):
                if k:
                    term = term * image(i + 1) ** k
            out = out + term
        return out

    def weighted_degree(self) -> int:
        """Largest ``sum i * e_i`` over monomials (same in both bases)."""
        return max((sum((i + 1) * k for i, k in enumerate(e)) for e in self.terms), default=0)

    def evaluate_cycle_type(self, mu: IntPartition | Sequence[int]) -> Fraction:
        """Value on a permutation with the given cycle type."""
        parts = mu.parts if isinstance(mu, IntPartition) else tuple(mu)
        f = self.convert("a")
        counts: dict[int, int] = {}
        for p in parts:
            counts[p] = counts.get(p, 0) + 1
        total = Fraction(0)
        for e, c in f.terms.items():
            total += c * prod(counts.get(i + 1, 0) ** k for i, k in enumerate(e))
        return total

    def evaluate_xi(self, values: Sequence) -> object:
        """Substitute ``xi_j = values[j-1]``."""
        f = self.convert("xi")
        total = 0
        for e, c in f.terms.items():
            total += c * prod(values[i] ** k for i, k in enumerate(e))
        return total

    def __str__(self):
        if not self.terms:
            return "0"
        name = "xi" if self.basis == "xi" else "a"
        parts = []
        for e in sorted(self.terms, key=lambda e: (-sum((i + 1) * k for i, k in enumerate(e)),
                                                  tuple(-x for x in e))):
            c = self.terms[e]
            mono = "*".join(f"{name}{i + 1}" + (f"^{k}" if k > 1 else "")
                            for i, k in enumerate(e) if k)
            mag = abs(c)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"ClassFunction({self.basis!r}, {self})"


@lru_cache(maxsize=None)
def _xi_in_a(k: int) -> ClassFunction:
    return ClassFunction("a", {(0,) * (t - 1) + (1,): t for t in divisors(k)})


@lru_cache(maxsize=None)
def _a_in_xi(t: int) -> ClassFunction:
    return ClassFunction("xi", {(0,) * (d - 1) + (1,): Fraction(mobius(t // d), t)
                                for d in divisors(t)})


def convert(f: ClassFunction, to: str) -> ClassFunction:
    return f.convert(to)


# ---------------------------------------------------------------- inner products

def expectation_stable(f: ClassFunction) -> Fraction:
    """``<f, 1>`` in the large-N limit."""
    g = f.convert("a")
    total = Fraction(0)
    for e, c in g.terms.items():
        total += c * prod(poisson_moment(k, Fraction(1, i + 1)) for i, k in enumerate(e))
    return total


def stable_inner(f: ClassFunction, g: ClassFunction) -> Fraction:
    """Stable inner product; class functions here are real so no conjugation."""
    return expectation_stable(f * g)


def inner_product_SN(f: ClassFunction, g: ClassFunction, n: int) -> Fraction:
    """Inner product on ``S_n``, summing over cycle types with weight ``1/z``."""
    total = Fraction(0)
    for mu in partitions_of(n):
        total += f.evaluate_cycle_type(mu) * g.evaluate_cycle_type(mu) / mu.z()
    return total


def stabilization_threshold(f: ClassFunction, g: ClassFunction | None = None) -> int:
    """An ``N`` from which the finite inner product equals the stable one."""
    h = f if g is None else f * g
    return h.weighted_degree()


# ---------------------------------------------------------------- characters of S_n

def _beta_set(parts: Sequence[int], length: int) -> tuple[int, ...]:
    parts = list(parts) + [0] * (length - len(parts))
    return tuple(parts[i] + length - 1 - i for i in range(length))


@lru_cache(maxsize=None)
def _mn(beta: tuple[int, ...], mu: tuple[int, ...]) -> int:
    if not mu:
        return 1
    k, rest = mu[0], mu[1:]
    beads = set(beta)
    total = 0
    for b in beta:
        if b - k < 0 or (b - k) in beads:
            continue
        height = sum(1 for c in beta if b - k < c < b)
        new = tuple(sorted((c if c != b else b - k) for c in beta), )[::-1]
        total += (-1) ** height * _mn(new, rest)
    return total


def mn_character(lam: IntPartition | Sequence[int], mu: IntPartition | Sequence[int]) -> int:
    """Character value ``chi^lam(mu)`` by repeated rim-hook removal."""
    lam = lam if isinstance(lam, IntPartition) else IntPartition.of(lam)
    mu = mu if isinstance(mu, IntPartition) else IntPartition.of(mu)
    if lam.size != mu.size:
        raise ValueError(f"size mismatch: |{lam}| != |{mu}|")
    return _mn(_beta_set(lam.parts, len(lam.parts)), mu.parts)


def _binom_poly(var: ClassFunction, m: int) -> ClassFunction:
    out = ClassFunction.constant(1, var.basis)
    for i in range(m):
        out = out * (var - i)
    return out / factorial(m)


@lru_cache(maxsize=None)
def _stable_irreducible(parts: tuple[int, ...]) -> ClassFunction:
    lam = IntPartition(parts)
    n = lam.size
    out = ClassFunction("a")
    for rsize in range(n + 1):
        for rho in partitions_of(rsize):
            binoms = ClassFunction.constant(1, "a")
            for r, m in rho.multiplicities().items():
                binoms = binoms * _binom_poly(ClassFunction.a(r), m)
            for sigma in partitions_of(n - rsize):
                coef = Fraction((-1) ** len(sigma) * mn_character(lam, rho.union(sigma)),
                                sigma.z())
                if coef:
                    out = out + binoms * coef
    return out


def stable_irreducible(lam: IntPartition | Sequence[int]) -> ClassFunction:
    """Class function equal to the character of ``(N - |lam|, lam)`` for large N.

    Returned in the ``a`` basis.
    """
    lam = lam if isinstance(lam, IntPartition) else IntPartition.of(lam)
    return _stable_irreducible(lam.parts)


def dimension_poly(lam: IntPartition | Sequence[int]) -> tuple[Fraction, ...]:
    """Coefficients (low to high) of the dimension as a polynomial in ``N``."""
    f = stable_irreducible(lam).convert("xi")
    coeffs: dict[int, Fraction] = {}
    for e, c in f.terms.items():
        d = sum(e)
        coeffs[d] = coeffs.get(d, Fraction(0)) + c
    top = max(coeffs, default=0)
    out = [coeffs.get(i, Fraction(0)) for i in range(top + 1)]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def decompose_into_irreducibles(f: ClassFunction) -> dict[IntPartition, Fraction]:
    """Coefficients of ``f`` on the stable irreducible basis (nonzero ones only)."""
    out = {}
    for size in range(f.weighted_degree() + 1):
        for lam in partitions_of(size):
            c = stable_inner(f, stable_irreducible(lam))
            if c:
                out[lam] = c
    return out


def fixed_tuples_character(s: int) -> ClassFunction:
    """Character of the action on ordered ``s``-tuples of distinct points."""
    if s < 1:
        raise ValueError("s must be positive")
    x = ClassFunction.xi(1)
    return _binom_poly(x, s) * factorial(s)


# ---------------------------------------------------------------- expression parser

_TOKEN = re.compile(r"\s*(?:(xi|a)(\d+)|(\d+)(?:/(\d+))?|([-+*^()]))")


def parse_class_function(text: str) -> ClassFunction:
    """Parse e.g. ``"xi1^2 - 3*a2 + 1/2"``; the result uses the ``xi`` basis."""
    tokens = []
    pos = 0
    stripped = text.rstrip()
    while pos < len(stripped):
        m = _TOKEN.match(stripped, pos)
        if not m or m.end() == pos:
            col = pos + (len(stripped[pos:]) - len(stripped[pos:].lstrip()))
            raise ParseError(f"unexpected character {stripped[col]!r}", text, col)
        start = m.start() + (len(m.group(0)) - len(m.group(0).lstrip()))
        tokens.append((m, start))
        pos = m.end()
    i = 0

    def peek():
        return tokens[i][0].group(5) if i < len(tokens) else None

    def where():
        return tokens[i][1] if i < len(tokens) else len(text)

    def expr():
        nonlocal i
        val = term()
        while peek() in ("+", "-"):
            op = peek()
            i += 1
            rhs = term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def term():
        nonlocal i
        val = factor()
        while peek() == "*":
            i += 1
            val = val * factor()
        return val

    def factor():
        nonlocal i
        if peek() == "-":
            i += 1
            return -factor()
        base = atom()
        if peek() == "^":
            i += 1
            if i >= len(tokens) or tokens[i][0].group(3) is None or tokens[i][0].group(4):
                raise ParseError("exponent must be a nonnegative integer", text, where())
            k = int(tokens[i][0].group(3))
            i += 1
            base = base ** k
        return base

    def atom():
        nonlocal i
        if i >= len(tokens):
            raise ParseError("unexpected end of expression", text, len(text))
        m, col = tokens[i]
        if m.group(1):
            idx = int(m.group(2))
            if idx < 1:
                raise ParseError("variable index must be positive", text, col)
            i += 1
            v = ClassFunction.variable(m.group(1), idx)
            return v.convert("xi")
        if m.group(3) is not None:
            i += 1
            num = int(m.group(3))
            den = int(m.group(4)) if m.group(4) else 1
            if den == 0:
                raise ParseError("zero denominator", text, col)
            return ClassFunction.constant(Fraction(num, den))
        if m.group(5) == "(":
            i += 1
            val = expr()
            if peek() != ")":
                raise ParseError("expected ')'", text, where())
            i += 1
            return val
        raise ParseError(f"unexpected token {m.group(0).strip()!r}", text, col)

    if not tokens:
        raise ParseError("empty expression", text, 0)
    result = expr()
    if i != len(tokens):
        raise ParseError("trailing input", text, where())
    return result


def monomials_up_to(weight: int) -> Iterator[tuple[int, ...]]:
    """Exponent vectors ``alpha`` with ``1 <= sum i * alpha_i <= weight``."""
    for size in range(1, weight + 1):
        for lam in partitions_of(size):
            e = [0] * lam.parts[0]
            for p in lam.parts:
                e[p - 1] += 1
            yield tuple(e)

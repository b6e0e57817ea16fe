"""Words in a free group of finite rank.

Letters are stored as small integer codes: generator ``g`` is ``2g`` and
its inverse is ``2g + 1``.  That makes inversion a single xor and gives
the fixed letter order a < A < b < B < ... for free when comparing codes.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from .errors import BudgetExceeded, ParseError

ALPHABET = string.ascii_lowercase
# x, y, z name the first three generators whenever a word uses no other letter.
SHORT_ALPHABET = "xyz"


class Letter(NamedTuple):
    generator: int
    sign: int

    @property
    def code(self) -> int:
        return 2 * self.generator + (0 if self.sign > 0 else 1)

    @staticmethod
    def from_code(code: int) -> "Letter":
        return Letter(code >> 1, -1 if code & 1 else 1)


def inverse_code(code: int) -> int:
    return code ^ 1


def _free_reduce(codes: Iterable[int]) -> tuple[int, ...]:
    out: list[int] = []
    for c in codes:
        if out and out[-1] == c ^ 1:
            out.pop()
        else:
            out.append(c)
    return tuple(out)


@dataclass(frozen=True)
class Word:
    """A freely reduced word; the empty word is the identity."""

    rank: int
    codes: tuple[int, ...]

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("rank must be positive")
        for c in self.codes:
            if not 0 <= c < 2 * self.rank:
                raise ValueError(f"letter code {c} outside rank {self.rank}")
        for a, b in zip(self.codes, self.codes[1:]):
            if a == b ^ 1:
                raise ValueError("word is not freely reduced")

    @staticmethod
    def from_codes(rank: int, codes: Iterable[int]) -> "Word":
        return Word(rank, _free_reduce(codes))

    @staticmethod
    def from_letters(rank: int, letters: Iterable[Letter | tuple[int, int]]) -> "Word":
        return Word.from_codes(rank, (Letter(*l).code for l in letters))

    @staticmethod
    def generator(rank: int, g: int) -> "Word":
        return Word(rank, (2 * g,))

    @staticmethod
    def identity(rank: int) -> "Word":
        return Word(rank, ())

    @property
    def letters(self) -> tuple[Letter, ...]:
        return tuple(Letter.from_code(c) for c in self.codes)

    def __len__(self) -> int:
        return len(self.codes)

    def is_identity(self) -> bool:
        return not self.codes

    def __mul__(self, other: "Word") -> "Word":
        return multiply(self, other)

    def __pow__(self, m: int) -> "Word":
        return power(self, m)

    def inverse(self) -> "Word":
        return invert(self)

    def is_cyclically_reduced(self) -> bool:
        return len(self.codes) <= 1 or self.codes[0] != self.codes[-1] ^ 1

    def __str__(self) -> str:
        return format_word(self)


# ---------------------------------------------------------------- parsing

def _alphabet_for(letters: Iterable[str]) -> str:
    used = {ch.lower() for ch in letters}
    if used and used <= set(SHORT_ALPHABET):
        return SHORT_ALPHABET
    return ALPHABET


def default_alphabet(rank: int) -> str:
    return SHORT_ALPHABET if rank <= len(SHORT_ALPHABET) else ALPHABET


def parse_word(text: str, rank: int, alphabet: str | None = None) -> Word:
    """Parse ``text`` such as ``"xyXY"``, ``"(ab)^3 B^-2"`` into a reduced word.

    Lowercase letters are generators and uppercase letters their inverses.
    ``^k`` (k may be negative) raises the preceding letter or parenthesised
    group to the k-th power.  Whitespace is ignored.
    """
    if alphabet is None:
        alphabet = _alphabet_for(ch for ch in text if ch.isalpha())
    pos = 0
    n = len(text)

    def skip_ws():
        nonlocal pos
        while pos < n and text[pos].isspace():
            pos += 1

    def parse_exponent() -> int | None:
        nonlocal pos
        skip_ws()
        if pos >= n or text[pos] != "^":
            return None
        pos += 1
        skip_ws()
        start = pos
        if pos < n and text[pos] in "+-":
            pos += 1
        digits = pos
        while pos < n and text[pos].isdigit():
            pos += 1
        if pos == digits:
            raise ParseError("malformed exponent", text, start)
        return int(text[start:pos])

    def parse_seq(depth: int) -> list[int]:
        nonlocal pos
        out: list[int] = []
        while True:
            skip_ws()
            if pos >= n:
                if depth:
                    raise ParseError("unbalanced parenthesis", text, pos)
                return out
            ch = text[pos]
            if ch == ")":
                if not depth:
                    raise ParseError("unexpected ')'", text, pos)
                pos += 1
                return out
            if ch == "(":
                pos += 1
                block = parse_seq(depth + 1)
            elif ch.isalpha() and ch.lower() in alphabet:
                g = alphabet.index(ch.lower())
                if g >= rank:
                    raise ParseError(
                        f"generator '{ch}' has index {g} but rank is {rank}", text, pos)
                block = [2 * g + (1 if ch.isupper() else 0)]
                pos += 1
            else:
                raise ParseError(f"unknown symbol '{ch}'", text, pos)
            e = parse_exponent()
            if e is not None:
                base = list(_free_reduce(block))
                if e < 0:
                    base = [c ^ 1 for c in reversed(base)]
                block = base * abs(e)
            out.extend(block)

    codes = parse_seq(0)
    return Word.from_codes(rank, codes)


def format_word(w: Word, alphabet: str | None = None) -> str:
    """Inverse of :func:`parse_word`; the identity prints as ``1``."""
    if alphabet is None:
        alphabet = default_alphabet(w.rank)
    if not w.codes:
        return "1"
    return "".join(
        alphabet[c >> 1].upper() if c & 1 else alphabet[c >> 1] for c in w.codes)


# ---------------------------------------------------------------- algebra

def _check_ranks(*words: Word) -> int:
    ranks = {w.rank for w in words}
    if len(ranks) != 1:
        raise ValueError(f"rank mismatch: {sorted(ranks)}")
    return ranks.pop()


def multiply(*words: Word) -> Word:
    rank = _check_ranks(*words)
    codes: list[int] = []
    for w in words:
        codes.extend(w.codes)
    return Word.from_codes(rank, codes)


def invert(w: Word) -> Word:
    return Word(w.rank, tuple(c ^ 1 for c in reversed(w.codes)))


def power(w: Word, m: int) -> Word:
    base = w if m >= 0 else invert(w)
    return Word.from_codes(w.rank, base.codes * abs(m))


def word_algebra(op: str, *operands: Word, m: int | None = None) -> Word:
    """Dispatch ``multiply``, ``invert`` or ``power`` by name."""
    if op == "multiply":
        return multiply(*operands)
    if op == "invert":
        (w,) = operands
        return invert(w)
    if op == "power":
        (w,) = operands
        if m is None:
            raise ValueError("power needs an exponent")
        return power(w, m)
    raise ValueError(f"unknown operation {op!r}")


# ---------------------------------------------------------------- cyclic words

@dataclass(frozen=True)
class CyclicWord:
    """A cyclically reduced word stored as its least rotation."""

    rank: int
    codes: tuple[int, ...]

    @staticmethod
    def of(w: Word) -> "CyclicWord":
        c, _ = cyclic_reduce(w)
        return c

    def word(self) -> Word:
        return Word(self.rank, self.codes)

    def __len__(self) -> int:
        return len(self.codes)

    def __str__(self) -> str:
        return format_word(self.word())


def least_rotation(codes: Sequence[int]) -> tuple[int, ...]:
    codes = tuple(codes)
    if not codes:
        return codes
    return min(codes[i:] + codes[:i] for i in range(len(codes)))


def cyclic_reduce(w: Word) -> tuple[CyclicWord, Word]:
    """Return ``(c, u)`` with ``w = u * c' * u^-1`` where ``c'`` is the
    cyclically reduced core of ``w`` and ``c`` is its canonical rotation.

    The conjugator accounts for both the stripped prefix and the rotation.
    """
    if w.is_identity():
        raise ValueError("the identity has no cyclic reduction")
    codes = w.codes
    k = 0
    while k < len(codes) - 1 - k and codes[k] == codes[-1 - k] ^ 1:
        k += 1
    core = codes[k:len(codes) - k]
    best = least_rotation(core)
    # core = core[:i] + core[i:]; rotation best = core[i:] + core[:i]
    # so core = core[:i] * best * core[:i]^-1
    i = next(i for i in range(len(core)) if core[i:] + core[:i] == best)
    conj = Word.from_codes(w.rank, codes[:k] + core[:i])
    return CyclicWord(w.rank, best), conj


def _prefix_function(s: Sequence[int]) -> list[int]:
    pi = [0] * len(s)
    for i in range(1, len(s)):
        k = pi[i - 1]
        while k and s[i] != s[k]:
            k = pi[k - 1]
        if s[i] == s[k]:
            k += 1
        pi[i] = k
    return pi


def max_root(w: Word) -> tuple[Word, int]:
    """Return ``(u, d)`` with ``w`` conjugate to ``u^d``, ``d`` maximal."""
    c, _ = cyclic_reduce(w)
    s = c.codes
    n = len(s)
    p = n - _prefix_function(s)[-1]
    if n % p:
        p = n
    return Word(w.rank, s[:p]), n // p


def is_conjugate_rotation(u: Word, v: Word) -> bool:
    """Conjugacy test by comparing least rotations of cyclic reductions."""
    _check_ranks(u, v)
    if u.is_identity() or v.is_identity():
        return u.is_identity() and v.is_identity()
    return cyclic_reduce(u)[0] == cyclic_reduce(v)[0]


# ---------------------------------------------------------------- enumeration

def cyclically_reduced_count(r: int, t: int) -> int:
    """Closed form for the number of cyclically reduced words of length t."""
    return (2 * r - 1) ** t + r + (-1) ** t * (r - 1)


def iter_cyclically_reduced(r: int, t: int) -> Iterator[tuple[int, ...]]:
    """Yield code tuples of all cyclically reduced words of length ``t``."""
    if r < 1 or t < 1:
        raise ValueError("need r >= 1 and t >= 1")
    letters = range(2 * r)
    word = [0] * t

    def rec(i):
        if i == t:
            if t == 1 or word[0] != word[-1] ^ 1:
                yield tuple(word)
            return
        for c in letters:
            if i and c == word[i - 1] ^ 1:
                continue
            word[i] = c
            yield from rec(i + 1)

    yield from rec(0)


def enumerate_cyclically_reduced(r: int, t: int, max_count: int = 1_000_000
                                 ) -> tuple[list[Word], int]:
    """All cyclically reduced words of length exactly ``t`` (not up to rotation)."""
    expected = cyclically_reduced_count(r, t)
    if expected > max_count:
        raise BudgetExceeded("max_count", max_count, expected)
    words = [Word(r, codes) for codes in iter_cyclically_reduced(r, t)]
    return words, len(words)


def reduced_word_array(r: int, t: int, chunk_prefix: Sequence[int] = ()) -> np.ndarray:
    """All reduced words of length ``t`` extending ``chunk_prefix`` as rows."""
    prefix = np.array(chunk_prefix, dtype=np.int8).reshape(1, -1)
    arr = prefix
    letters = np.arange(2 * r, dtype=np.int8)
    for _ in range(t - prefix.shape[1]):
        rows = arr.shape[0]
        cand = np.repeat(arr, 2 * r, axis=0)
        nxt = np.tile(letters, rows)
        if arr.shape[1]:
            keep = nxt != (cand[:, -1] ^ 1)
        else:
            keep = np.ones(len(nxt), dtype=bool)
        arr = np.concatenate([cand[keep], nxt[keep, None]], axis=1)
    return arr


def count_cyclically_reduced(r: int, t: int) -> int:
    """Count cyclically reduced words by explicit (chunked) enumeration."""
    total = 0
    first_len = min(t, 3)
    for head in iter_reduced_prefixes(r, first_len):
        block = reduced_word_array(r, t, head)
        if t == 1:
            total += len(block)
        else:
            total += int(np.count_nonzero(block[:, 0] != (block[:, -1] ^ 1)))
    return total


def iter_reduced_prefixes(r: int, k: int) -> Iterator[tuple[int, ...]]:
    for row in reduced_word_array(r, k):
        yield tuple(int(x) for x in row)

import pytest
from hypothesis import given, settings, strategies as st

from wordmeasures.errors import BudgetExceeded, ParseError
from wordmeasures.words import (CyclicWord, Word, count_cyclically_reduced, cyclic_reduce,
                                cyclically_reduced_count, enumerate_cyclically_reduced,
                                format_word, invert, is_conjugate_rotation, least_rotation,
                                max_root, multiply, parse_word, power, word_algebra)

from oracles import all_cyclically_reduced, free_reduce, rotation_conjugate, strip_cyclic


def codes_strategy(rank=2, max_len=10):
    return st.lists(st.integers(0, 2 * rank - 1), max_size=max_len)


def words(rank=2, max_len=10):
    return codes_strategy(rank, max_len).map(lambda c: Word.from_codes(rank, c))


def nontrivial_words(rank=2, max_len=10):
    return words(rank, max_len).filter(lambda w: not w.is_identity())


class TestParsing:
    def test_commutator(self):
        w = parse_word("xyXY", 2)
        assert w.codes == (0, 2, 1, 3)
        assert format_word(w) == "xyXY"

    def test_power_and_groups(self):
        assert parse_word("(xy)^2", 2) == parse_word("xyxy", 2)
        assert parse_word("x^-2", 2) == parse_word("XX", 2)
        assert parse_word("(xY)^-1", 2) == parse_word("yX", 2)
        assert parse_word(" x y X ", 2) == parse_word("xyX", 2)

    def test_free_reduction_on_parse(self):
        assert parse_word("xXy", 2) == parse_word("y", 2)
        assert parse_word("xX", 2).is_identity()

    def test_positional_alphabet(self):
        assert parse_word("abA", 2).codes == (0, 2, 1)
        assert parse_word("c", 3).codes == (4,)

    @pytest.mark.parametrize("text,column", [("xy(", 3), ("x)", 1), ("x^", 2), ("x#", 1)])
    def test_errors_carry_column(self, text, column):
        with pytest.raises(ParseError) as exc:
            parse_word(text, 2)
        assert exc.value.column == column

    def test_rank_too_small(self):
        with pytest.raises(ParseError):
            parse_word("xyz", 2)

    @given(words(rank=3))
    def test_format_parse_roundtrip(self, w):
        if w.is_identity():
            assert format_word(w) == "1"
        else:
            assert parse_word(format_word(w), 3) == w


class TestAlgebra:
    @given(codes_strategy(), codes_strategy())
    def test_multiply_matches_free_reduction(self, a, b):
        u, v = Word.from_codes(2, a), Word.from_codes(2, b)
        assert multiply(u, v).codes == free_reduce(list(a) + list(b))

    @given(words())
    def test_inverse(self, w):
        assert (w * invert(w)).is_identity()
        assert invert(invert(w)) == w

    @given(words(max_len=5), st.integers(-4, 4))
    def test_power(self, w, m):
        expected = Word.identity(2)
        for _ in range(abs(m)):
            expected = expected * (w if m > 0 else invert(w))
        assert power(w, m) == expected
        assert w ** m == expected

    def test_word_algebra_dispatch(self):
        x, y = Word.generator(2, 0), Word.generator(2, 1)
        assert word_algebra("multiply", x, y) == parse_word("xy", 2)
        assert word_algebra("invert", x) == parse_word("X", 2)
        assert word_algebra("power", x, m=3) == parse_word("xxx", 2)
        with pytest.raises(ValueError):
            word_algebra("power", x)

    def test_rank_mismatch(self):
        with pytest.raises(ValueError):
            multiply(Word.generator(2, 0), Word.generator(3, 0))

    def test_reduced_invariant(self):
        with pytest.raises(ValueError):
            Word(2, (0, 1))


class TestCyclic:
    @given(nontrivial_words())
    def test_cyclic_reduce_conjugator(self, w):
        c, u = cyclic_reduce(w)
        assert u * c.word() * invert(u) == w
        assert c.word().is_cyclically_reduced()
        assert c.codes == least_rotation(strip_cyclic(w.codes))

    @given(nontrivial_words(max_len=8))
    def test_max_root(self, w):
        root, d = max_root(w)
        core = strip_cyclic(w.codes)
        # brute force: largest d such that the core is a d-fold repetition
        best = max(k for k in range(1, len(core) + 1)
                   if len(core) % k == 0 and core == core[:len(core) // k] * k)
        assert d == best
        assert rotation_conjugate((root ** d).codes, w.codes)

    @settings(max_examples=300)
    @given(nontrivial_words(max_len=6), nontrivial_words(max_len=6))
    def test_conjugacy_rotation_vs_oracle(self, u, v):
        assert is_conjugate_rotation(u, v) == rotation_conjugate(u.codes, v.codes)

    @given(nontrivial_words(max_len=6), words(max_len=4))
    def test_conjugates_detected(self, w, g):
        assert is_conjugate_rotation(w, g * w * invert(g))

    def test_cyclic_word_canonical(self):
        assert CyclicWord.of(parse_word("yxYX", 2)) == CyclicWord.of(parse_word("XyxY", 2))


class TestCounting:
    @pytest.mark.parametrize("r", [1, 2, 3])
    @pytest.mark.parametrize("t", range(1, 7))
    def test_closed_form_vs_product_enumeration(self, r, t):
        brute = sum(1 for _ in all_cyclically_reduced(r, t))
        assert cyclically_reduced_count(r, t) == brute
        words_, count = enumerate_cyclically_reduced(r, t)
        assert count == brute
        assert len(set(w.codes for w in words_)) == brute
        assert all(w.is_cyclically_reduced() and len(w) == t for w in words_)

    @pytest.mark.parametrize("r,t", [(2, 9), (3, 7), (1, 10)])
    def test_vectorized_count(self, r, t):
        assert count_cyclically_reduced(r, t) == cyclically_reduced_count(r, t)

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            enumerate_cyclically_reduced(3, 12, max_count=1000)

from fractions import Fraction
from itertools import permutations

import pytest
from hypothesis import given, settings, strategies as st

from wordmeasures.characters import (ClassFunction, IntPartition, decompose_into_irreducibles,
                                     dimension_poly, expectation_stable,
                                     fixed_tuples_character, inner_product_SN, mn_character,
                                     monomials_up_to, parse_class_function, partitions_of,
                                     stabilization_threshold, stable_inner, stable_irreducible)
from wordmeasures.errors import ParseError

from oracles import cycle_counts, frobenius_character, monomial_value, uniform_expectation

XI1, XI2 = ClassFunction.xi(1), ClassFunction.xi(2)
A1, A2 = ClassFunction.a(1), ClassFunction.a(2)


def brute_average(f: ClassFunction, n: int) -> Fraction:
    total = Fraction(0)
    count = 0
    for p in permutations(range(n)):
        counts = cycle_counts(p)
        mu = sorted((k for k, m in counts.items() for _ in range(m)), reverse=True)
        total += f.evaluate_cycle_type(mu)
        count += 1
    return total / count


@st.composite
def class_functions(draw, basis="xi"):
    f = ClassFunction.constant(draw(st.integers(-3, 3)), basis)
    for _ in range(draw(st.integers(0, 3))):
        alpha = draw(st.lists(st.integers(0, 2), min_size=1, max_size=3))
        c = Fraction(draw(st.integers(-4, 4)), draw(st.integers(1, 3)))
        f = f + ClassFunction(basis, {tuple(alpha): c})
    return f


class TestPartitions:
    def test_counts(self):
        assert [sum(1 for _ in partitions_of(n)) for n in range(8)] == [1, 1, 2, 3, 5, 7, 11, 15]

    def test_z(self):
        assert IntPartition.of([2, 1, 1]).z() == 2 * 2
        assert IntPartition.of([3]).z() == 3


class TestSymmetricGroupCharacters:
    @pytest.mark.parametrize("n", range(1, 7))
    def test_murnaghan_nakayama_vs_frobenius(self, n):
        for lam in partitions_of(n):
            for mu in partitions_of(n):
                assert mn_character(lam, mu) == frobenius_character(lam.parts, mu.parts)

    @pytest.mark.parametrize("n", range(1, 7))
    def test_column_orthogonality(self, n):
        parts = list(partitions_of(n))
        for mu in parts:
            for nu in parts:
                s = sum(mn_character(lam, mu) * mn_character(lam, nu) for lam in parts)
                assert s == (mu.z() if mu == nu else 0)

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            mn_character([2], [1])


class TestStableIrreducibles:
    def test_table_rows(self):
        assert stable_irreducible([]).convert("xi") == ClassFunction.constant(1)
        assert stable_irreducible([1]).convert("xi") == XI1 - 1
        assert stable_irreducible([2]).convert("xi") == (XI1 * XI1 + XI2) / 2 - XI1 * 2
        assert stable_irreducible([1, 1]).convert("xi") == (XI1 * XI1 - XI2) / 2 - XI1 + 1
        assert stable_irreducible([1]) == A1 - 1
        assert stable_irreducible([2]) == A1 * (A1 - 3) / 2 + A2
        assert stable_irreducible([1, 1]) == (A1 - 1) * (A1 - 2) / 2 - A2

    def test_dimensions(self):
        h = Fraction(1, 2)
        assert dimension_poly([]) == (1,)
        assert dimension_poly([1]) == (-1, 1)
        assert dimension_poly([2]) == (0, -3 * h, h)
        assert dimension_poly([1, 1]) == (1, -3 * h, h)

    @pytest.mark.parametrize("lam", [(1,), (2,), (1, 1), (3,), (2, 1), (1, 1, 1), (2, 2)])
    def test_agrees_with_padded_character(self, lam):
        f = stable_irreducible(lam)
        size = sum(lam)
        for n in range(size + lam[0], size + lam[0] + 3):
            padded = (n - size,) + lam
            for mu in partitions_of(n):
                assert f.evaluate_cycle_type(mu) == mn_character(padded, mu)

    def test_orthonormal_up_to_four(self):
        lams = [lam for k in range(5) for lam in partitions_of(k)]
        for a in lams:
            for b in lams:
                expected = 1 if a == b else 0
                assert stable_inner(stable_irreducible(a), stable_irreducible(b)) == expected

    @pytest.mark.parametrize("s", [1, 2, 3, 4])
    def test_tuple_character_pairing(self, s):
        assert stable_inner(fixed_tuples_character(s), XI1 - 1) == s

    @pytest.mark.parametrize("s", [1, 2, 3])
    def test_tuple_character_counts_tuples(self, s):
        chi = fixed_tuples_character(s)
        for p in permutations(range(5)):
            fixed = monomial_value(p, (1,))
            expected = 1
            for i in range(s):
                expected *= fixed - i
            counts = cycle_counts(p)
            mu = [k for k, m in counts.items() for _ in range(m)]
            assert chi.evaluate_cycle_type(mu) == expected

    def test_decomposition(self):
        dec = decompose_into_irreducibles(XI1 * XI2)
        assert dec[IntPartition.of([])] == 3 and dec[IntPartition.of([1])] == 4
        for k in range(4):
            for lam in partitions_of(k):
                assert dec.get(lam, 0) == stable_inner(XI1 * XI2, stable_irreducible(lam))
        rebuilt = sum((stable_irreducible(lam) * c for lam, c in dec.items()),
                      ClassFunction.constant(0, "a"))
        assert rebuilt == XI1 * XI2


class TestInnerProducts:
    @pytest.mark.parametrize("f,g,value", [("xi1", "xi1", 2), ("xi2", "xi1-1", 1),
                                           ("xi6", "1", 4), ("xi1*xi2", "xi1-1", 4),
                                           ("xi1^2", "xi1-1", 3)])
    def test_known_values(self, f, g, value):
        assert stable_inner(parse_class_function(f), parse_class_function(g)) == value

    @settings(max_examples=40, deadline=None)
    @given(class_functions(), class_functions())
    def test_stable_equals_finite_from_threshold(self, f, g):
        n = max(stabilization_threshold(f, g), 1)
        assert inner_product_SN(f, g, n) == stable_inner(f, g)
        assert inner_product_SN(f, g, n + 1) == stable_inner(f, g)

    def test_finite_inner_product_is_an_average(self):
        f = XI1 * XI2 - A2
        for n in range(1, 6):
            assert inner_product_SN(f, ClassFunction.constant(1), n) == brute_average(f, n)

    def test_uniform_monomials_by_brute_force(self):
        for alpha in monomials_up_to(5):
            weight = sum((i + 1) * a for i, a in enumerate(alpha))
            assert expectation_stable(ClassFunction.monomial(alpha)) == \
                uniform_expectation(alpha, weight)


class TestConversionsAndParsing:
    @given(class_functions("xi"))
    def test_basis_roundtrip(self, f):
        assert f.convert("a").convert("xi") == f

    @given(class_functions("a"))
    def test_values_basis_independent(self, f):
        g = f.convert("xi")
        for mu in ([3, 1], [2, 2], [1, 1, 1, 1], [4]):
            assert f.evaluate_cycle_type(mu) == g.evaluate_cycle_type(mu)

    @given(class_functions("xi"))
    def test_print_parse_roundtrip(self, f):
        assert parse_class_function(str(f)) == f

    @given(class_functions("a"))
    def test_print_parse_roundtrip_a_basis(self, f):
        assert parse_class_function(str(f)) == f

    def test_grammar(self):
        assert parse_class_function("-(xi1 - 1)^2 + 1/2*a2") == \
            -(XI1 - 1) * (XI1 - 1) + A2 / 2
        assert parse_class_function("2*xi1*xi2^2") == XI1 * XI2 * XI2 * 2

    @pytest.mark.parametrize("text,column", [("xi1 +", 5), ("xi1 $ 2", 4), ("(xi1", 4),
                                             ("xi0", 0), ("xi1^x", 4), ("1/0", 0)])
    def test_errors(self, text, column):
        with pytest.raises(ParseError) as exc:
            parse_class_function(text)
        assert exc.value.column == column

import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from wordmeasures.characters import (ClassFunction, expectation_stable, monomials_up_to,
                                     parse_class_function, stable_inner, stable_irreducible)
from wordmeasures.oracle import exact_expectation
from wordmeasures.wordstats import (chi_ak_max, class_function_expectation,
                                    class_function_value, decide_conjugate, e_unif_monomial,
                                    expectation, primitivity, report_json, rewrite_for_root,
                                    word_morphism)
from wordmeasures.words import Word, parse_word

from oracles import rotation_conjugate, uniform_expectation

XI1 = ClassFunction.xi(1)


def w(text, rank=2):
    return parse_word(text, rank)


def nontrivial(max_len=8):
    return (st.lists(st.integers(0, 3), min_size=1, max_size=max_len)
            .map(lambda c: Word.from_codes(2, c))
            .filter(lambda u: not u.is_identity()))


class TestPrimitivity:
    def test_generator_is_primitive(self):
        rep = primitivity(w("x"))
        assert rep.pi is None and rep.crit == ()
        assert primitivity(w("xxy")).pi is None
        assert primitivity(w("xyxyX")).pi is None

    @pytest.mark.parametrize("m,crit", [(2, 1), (3, 1), (4, 2), (6, 3)])
    def test_powers(self, m, crit):
        rep = primitivity(w("x" * m, 1))
        assert rep.pi == 1
        assert len(rep.crit) == crit
        # each critical subgroup is a proper root power: a single cycle of length d | m, d < m
        lengths = sorted(g.num_vertices for g in rep.crit_graphs)
        assert lengths == [d for d in range(1, m) if m % d == 0]

    def test_commutator(self):
        rep = primitivity(w("xyXY"))
        assert rep.pi == 2 and len(rep.crit) == 1
        assert rep.crit_graphs[0].euler_characteristic == -1
        assert rep.to_json()["pi"] == 2

    def test_identity_rejected(self):
        with pytest.raises(ValueError):
            primitivity(Word.identity(2))


class TestCriticalAlgebraicQuotients:
    @pytest.mark.parametrize("alpha", [(1,), (2,), (0, 1), (1, 1)])
    def test_commutator(self, alpha):
        level, crit = chi_ak_max(w("xyXY"), alpha)
        assert level == -1
        mono = ClassFunction.monomial(alpha)
        assert len(crit) == stable_inner(mono, XI1 - 1)

    def test_power_rejected(self):
        with pytest.raises(ValueError):
            chi_ak_max(w("xx"), (1,))


class TestUniformExpectation:
    @pytest.mark.parametrize("alpha,value", [((1, 1), 3), ((0, 1), 2), ((2,), 2), ((1,), 1)])
    def test_known_values(self, alpha, value):
        assert e_unif_monomial(alpha) == value

    def test_three_routes(self):
        """Partition formula, Poisson moments and S_N brute force at the
        stabilization threshold agree on every monomial of weight <= 6."""
        for alpha in monomials_up_to(6):
            weight = sum((i + 1) * a for i, a in enumerate(alpha))
            formula = e_unif_monomial(alpha)
            assert formula == expectation_stable(ClassFunction.monomial(alpha))
            assert formula == uniform_expectation(alpha, weight)

    def test_rewrite_for_root(self):
        assert rewrite_for_root((0, 1), 3) == (0, 0, 0, 0, 0, 1)
        assert rewrite_for_root((2, 1), 2) == (0, 2, 0, 1)


class TestExpectation:
    def test_commutator_report(self):
        rep = expectation(w("xyXY"), (1, 1))
        assert (rep.e_unif, rep.c_const, rep.crit_count, rep.pi) == (3, 4, 1, 2)
        assert rep.leading_correction() == (-1, 4)
        series = rep.rational.laurent(3)
        assert series.leading == 0 and series.coeffs[0] == 3 and series.coeffs[1] == 4
        json.loads(report_json(rep))

    def test_power_word(self):
        rep = expectation(w("xxx", 1), (0, 1))
        assert rep.root == "x" and rep.power == 3
        assert rep.rational(6) == 4 and rep.rational(20) == 4

    def test_generator(self):
        rep = expectation(w("x"), (1,))
        assert rep.rational(7) == 1
        assert rep.leading_correction() is None

    @pytest.mark.parametrize("word", ["xyXY", "xxyy", "xyxY", "xxYY"])
    @pytest.mark.parametrize("alpha", [(1,), (2,), (0, 1), (1, 1)])
    def test_leading_term_prediction(self, word, alpha):
        rep = expectation(w(word), alpha)
        exponent, coeff = rep.leading_correction()
        series = rep.rational.laurent(2 - exponent)
        assert series.leading == 0 and series.coeffs[0] == rep.e_unif
        assert all(c == 0 for c in series.coeffs[1:-exponent])
        assert series.coeffs[-exponent] == coeff and coeff > 0

    @pytest.mark.parametrize("word", ["xyXY", "xxy", "xxyy"])
    def test_at_least_uniform(self, word):
        rep = expectation(w(word), (1, 1))
        for n in range(rep.rational.n_min, 40):
            assert rep.rational(n) >= rep.e_unif


class TestClassFunctions:
    @pytest.mark.parametrize("word", ["xyXY", "xx", "xxy"])
    @pytest.mark.parametrize("expr", ["xi1 - 1", "xi1^2 - xi2", "a2 + 3", "(xi1-1)*xi2"])
    def test_value_matches_brute_force(self, word, expr):
        f = parse_class_function(expr)
        u = w(word)
        rational = class_function_expectation(u, f)
        for n in range(1, 5):
            truth = exact_expectation(u, n, f=f).value
            assert class_function_value(u, f, n) == truth
            if n >= rational.n_min:
                assert rational(n) == truth

    @pytest.mark.parametrize("lam,dim", [((1,), lambda n: n - 1),
                                         ((2,), lambda n: Fraction(n * (n - 3), 2)),
                                         ((1, 1), lambda n: Fraction((n - 1) * (n - 2), 2))])
    def test_commutator_averages_inverse_dimension(self, lam, dim):
        rational = class_function_expectation(w("xyXY"), stable_irreducible(lam))
        for n in range(max(4, rational.n_min), 12):
            assert rational(n) == Fraction(1) / dim(n)

    def test_identity_word(self):
        f = parse_class_function("xi1*xi2 - 1")
        assert class_function_expectation(Word.identity(2), f)(5) == 24
        assert class_function_value(Word.identity(2), f, 5) == 24


class TestConjugacy:
    @pytest.mark.parametrize("u,v,expected", [("xy", "yx", True), ("xx", "xxx", False),
                                              ("xyXY", "yXYx", True), ("xy", "xY", False),
                                              ("xxyy", "yyxx", True), ("(xy)^2", "(yx)^2", True),
                                              ("x", "X", False), ("xy", "YX", False)])
    def test_examples(self, u, v, expected):
        verdict, evidence = decide_conjugate(w(u), w(v))
        assert verdict is expected
        assert verdict == rotation_conjugate(w(u).codes, w(v).codes)

    def test_evidence(self):
        _, ev = decide_conjugate(w("xyXY"), w("yXYx"))
        assert ev.roots_conjugate and ev.connected_flat_quotients >= 1
        _, ev = decide_conjugate(w("x"), w("X"))
        assert ev.roots_conjugate and not ev.same_orientation
        _, ev = decide_conjugate(w("xx"), w("xxx"))
        assert ev.exponents == (2, 3)
        # two cycles each with tau(k) flat quotients of their own
        assert ev.disconnected_flat_quotients == 2 * 2

    @settings(max_examples=500, deadline=None)
    @given(nontrivial(), nontrivial())
    def test_matches_rotation_oracle(self, u, v):
        assert decide_conjugate(u, v)[0] == rotation_conjugate(u.codes, v.codes)

    @settings(max_examples=200, deadline=None)
    @given(nontrivial(), st.lists(st.integers(0, 3), max_size=4))
    def test_inverses_against_oracle(self, u, g):
        h = Word.from_codes(2, g)
        v = h * u.inverse() * h.inverse()
        assert decide_conjugate(u, v)[0] == rotation_conjugate(u.codes, v.codes)

    @settings(max_examples=200, deadline=None)
    @given(nontrivial(5), st.lists(st.integers(0, 3), max_size=4))
    def test_conjugates_are_detected(self, u, g):
        h = Word.from_codes(2, g)
        assert decide_conjugate(u, h * u * h.inverse())[0]


def test_word_morphism_shape():
    eta = word_morphism(w("xyXY"), (2, 1))
    assert eta.domain.num_vertices == 4 * 2 + 8
    assert eta.codomain.num_vertices == 1
    with pytest.raises(ValueError):
        word_morphism(w("x"), (0,))

import warnings
from fractions import Fraction
from itertools import permutations, product
from math import factorial

import pytest
from hypothesis import given, settings, strategies as st

from wordmeasures.errors import ThresholdWarning
from wordmeasures.graphs import bouquet, cycle_graph, powers_graph
from wordmeasures.morphisms import to_bouquet
from wordmeasures.oracle import exact_expectation
from wordmeasures.phi import (L_B, RationalFnOfN, check_identity,
                              decomposition_count, falling_factorial, format_poly,
                              laurent_L_direct, moebius_C, moebius_C_alg, moebius_R,
                              moebius_tables, norm_counts, pdivmod, peval, pmul, phi,
                              phi_value, phi_via_image, stirling_first_unsigned)
from wordmeasures.words import parse_word

from corpus import small_morphisms
from oracles import count_lifts

X2 = bouquet(2)


def to_x2(text, alpha=(1,)):
    return to_bouquet(powers_graph(parse_word(text, 2), alpha), X2)


def brute_phi(eta, n):
    """Average lift count over every N-cover of the codomain."""
    cod = eta.codomain
    perms = list(permutations(range(n)))
    total = 0
    for tup in product(perms, repeat=cod.num_edges):
        total += count_lifts(eta.domain.edges, eta.domain.num_vertices, cod.edges,
                             eta.vertex_map, tup, n)
    return Fraction(total, factorial(n) ** cod.num_edges)


polys = st.lists(st.integers(-6, 6), min_size=1, max_size=4)
linear_roots = st.dictionaries(st.integers(-2, 5), st.integers(1, 2), max_size=3)


@st.composite
def rationals(draw):
    num = draw(polys)
    den = (1,)
    for r, m in draw(linear_roots).items():
        for _ in range(m):
            den = pmul(den, (-r, 1))
    scale = draw(st.integers(1, 3))
    return RationalFnOfN(num, tuple(scale * c for c in den))


class TestPolynomials:
    @given(polys, polys.filter(lambda p: any(p)))
    def test_divmod(self, a, b):
        q, r = pdivmod(a, b)
        for x in range(-3, 4):
            assert peval(a, x) == peval(pmul(q, b), x) + peval(r, x)

    def test_format(self):
        assert format_poly((1, -2, 1)) == "N^2 - 2*N + 1"

    @pytest.mark.parametrize("n,k", [(5, 2), (6, 6), (4, 0), (3, 5)])
    def test_falling_factorial(self, n, k):
        expected = 1
        for i in range(k):
            expected *= n - i
        assert falling_factorial(n, k) == expected

    @pytest.mark.parametrize("n", range(1, 7))
    def test_stirling_first_counts_cycles(self, n):
        from oracles import cycle_counts
        counts = [0] * (n + 1)
        for p in permutations(range(n)):
            counts[sum(cycle_counts(p).values())] += 1
        assert counts == [stirling_first_unsigned(n, k) for k in range(n + 1)]


class TestRationalFunctions:
    @settings(max_examples=200)
    @given(rationals(), rationals())
    def test_arithmetic_pointwise(self, f, g):
        for n in range(6, 12):
            assert (f + g)(n) == f(n) + g(n)
            assert (f - g)(n) == f(n) - g(n)
            assert (f * g)(n) == f(n) * g(n)
            if g(n):
                assert (f / g)(n) == f(n) / g(n)

    @given(rationals())
    def test_json_roundtrip(self, f):
        assert RationalFnOfN.from_json(f.to_json()) == f

    @given(rationals())
    def test_laurent_times_denominator_is_numerator(self, f):
        order = 6
        series = f.laurent(order)
        # (sum c_k N^(e-k)) * den(N) must reproduce num(N) in the top order+1 powers
        deg_den = len(f.den) - 1
        top = series.leading + deg_den
        for k in range(order + 1):
            power = top - k
            coeff = sum((series.coeffs[i] * f.den[power - (series.leading - i)]
                         for i in range(k + 1)
                         if 0 <= power - (series.leading - i) <= deg_den), Fraction(0))
            expected = f.num[power] if 0 <= power < len(f.num) else 0
            assert coeff == expected

    def test_reduction(self):
        f = RationalFnOfN((0, 2), (0, 0, 4))
        assert f == RationalFnOfN((1,), (0, 2))
        assert f.n_min == 1

    def test_text_form(self):
        assert str(RationalFnOfN((1, 2, 1), (1,))) == "N^2 + 2*N + 1"
        assert RationalFnOfN.monomial(-2, 3)(2) == Fraction(3, 4)

    @pytest.mark.parametrize("num,den,text", [
        ((1,), (2,), "1/2"),
        ((1,), (-1, 1), "1/(N-1)"),
        ((2,), (0, -3, 1), "2/(N*(N-3))"),
        ((3, 1, 2), (0, 2), "N + 1/2 + 3/(2*N)"),
        ((-1,), (0, -12, 22, -12, 2), "-1/(2*N*(N-1)*(N-2)*(N-3))"),
        ((1, 1), (1, 1, 1), "(N + 1)/(N^2 + N + 1)"),
        ((), (1,), "0"),
    ])
    def test_text_keeps_value(self, num, den, text):
        f = RationalFnOfN(num, den)
        assert str(f) == text

    def test_laurent_text(self):
        assert str(RationalFnOfN((1,), (-1, 1)).laurent(2)) == "N^-1 + N^-2 + N^-3 + ..."
        assert str(RationalFnOfN((-7,), (3,)).laurent(1)) == "-7/3 + ..."


class TestPhiValues:
    def test_against_lift_enumeration(self):
        """phi_value is exact at every N; compare with the average lift count
        over all covers for every small morphism with at most two codomain edges."""
        checked = 0
        for eta in small_morphisms(4):
            if eta.codomain.num_edges > 2:
                continue
            for n in (1, 2, 3):
                assert phi_value(eta, n) == brute_phi(eta, n)
            checked += 1
        assert checked > 20

    @pytest.mark.parametrize("word,alpha", [("xyXY", (1,)), ("xxy", (1,)), ("xy", (2,)),
                                            ("xxY", (1, 1)), ("xyXY", (0, 1))])
    def test_against_permutation_oracle(self, word, alpha):
        eta = to_x2(word, alpha)
        f = phi(eta)
        for n in range(1, 6):
            truth = exact_expectation(parse_word(word, 2), n, alpha=alpha).value
            assert phi_value(eta, n) == truth
            if n >= f.n_min:
                assert f(n) == truth

    def test_commutator_formula(self):
        f = phi(to_x2("xyXY", (1, 1)))
        num = (-4, 38, -91, 87, -29, 3)
        den = (0, 30, -61, 41, -11, 1)
        assert f == RationalFnOfN(num, den)
        assert f.n_min == 6
        assert str(f) == "3 + 4*(N^4 - 9*N^3 + 23*N^2 - 13*N - 1)/(N*(N-1)*(N-2)*(N-3)*(N-5))"

    def test_threshold_warning(self):
        eta = to_bouquet(cycle_graph(parse_word("xx", 1)), bouquet(1))
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            f = phi(eta)
        # at N=1 the square of the only permutation has one fixed point, not two
        assert f == RationalFnOfN.constant(2)
        assert f.n_min == 2
        assert any(issubclass(c.category, ThresholdWarning) for c in caught)

    @pytest.mark.parametrize("m,count", [(1, 1), (2, 2), (4, 3), (6, 4)])
    def test_rank_one_powers(self, m, count):
        eta = to_bouquet(cycle_graph(parse_word("x" * m, 1)), bouquet(1))
        assert phi(eta) == RationalFnOfN.constant(count)
        assert decomposition_count(eta) == count

    def test_image_route(self):
        eta = to_x2("xx")
        assert phi_via_image(eta) == phi(eta)


class TestLaurentOfL:
    def test_direct_route_matches_division(self):
        for eta in small_morphisms(5):
            if eta.is_surjective:
                assert laurent_L_direct(eta, 5).coeffs == L_B(eta).laurent(5).coeffs

    def test_norm_counts(self):
        assert [norm_counts([3], j) for j in range(3)] == [1, 3, 2]
        assert [norm_counts([2, 2], j) for j in range(3)] == [1, 2, 1]


class TestMoebius:
    @pytest.mark.parametrize("word,alpha", [("xyXY", (1,)), ("xxy", (1,)), ("xy", (1, 1)),
                                            ("xyXY", (2,))])
    def test_sums(self, word, alpha):
        eta = to_x2(word, alpha)
        t = moebius_tables(eta)
        lat = t.lat
        b, top = lat.bottom, lat.top_index
        total_L = sum((t.L(k, top) for k in t.interval(b, top)), RationalFnOfN.constant(0))
        total_R = sum((t.R(b, k) for k in t.interval(b, top)), RationalFnOfN.constant(0))
        total_C = sum((t.C(k, m) for k in t.interval(b, top) for m in t.interval(k, top)),
                      RationalFnOfN.constant(0))
        f = phi(eta)
        check_identity(f, total_L)
        check_identity(f, total_R)
        check_identity(f, total_C)
        assert t.R(b, top) == t.R_from_C(b, top)

    def test_R_vanishes_off_algebraic(self):
        for word, alpha in [("xyXY", (1,)), ("xxy", (1,)), ("xy", (1, 1)), ("x", (2,))]:
            t = moebius_tables(to_x2(word, alpha))
            lat = t.lat
            for i in range(len(lat)):
                for j in t.interval(i, lat.top_index):
                    if not lat.is_algebraic(i, j):
                        assert t.R(i, j).is_zero()

    def test_C_alg_two_routes(self):
        for m in (2, 3, 4):
            eta = to_bouquet(cycle_graph(parse_word("x" * m, 1)), bouquet(1))
            assert moebius_C_alg(eta) == moebius_C_alg(eta, route="free")
        eta = to_x2("xyXY")
        assert moebius_C_alg(eta) == moebius_C_alg(eta, route="free")

    def test_wrappers(self):
        eta = to_x2("xyXY")
        t = moebius_tables(eta)
        assert moebius_R(eta) == t.R(t.lat.bottom, t.lat.top_index)
        assert moebius_C(eta) == t.C(t.lat.bottom, t.lat.top_index)
        with pytest.raises(ValueError):
            moebius_R(to_x2("xx"))

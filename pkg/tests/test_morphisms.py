import json

import pytest
from hypothesis import given, settings, strategies as st

from wordmeasures.errors import InvariantViolation
from wordmeasures.graphs import bouquet, cycle_graph, disjoint_union, empty_graph, powers_graph
from wordmeasures.morphisms import (ClosedPartitionLattice, GraphMorphism, alg_free_decomposition,
                                    b_norm, chi_max_and_crit, closure, compose,
                                    decomposition_lattice, enumerate_closed_partitions,
                                    enumerate_decomp_B, enumerate_decomp_B3, identity, image,
                                    immediate_morphism_norm_oracle, is_algebraic, is_closed,
                                    is_free, make_morphism, norm, pullback, quotient,
                                    to_bouquet, to_dot)
from wordmeasures.words import parse_word

from corpus import small_domains, small_morphisms
from oracles import all_set_partitions, quotient_is_folded
from oracles import refines as brute_refines

X2 = bouquet(2)


def w(text):
    return parse_word(text, 2)


def to_x2(text, alpha=(1,)):
    return to_bouquet(powers_graph(w(text), alpha), X2)


def to_x1(m):
    return to_bouquet(cycle_graph(parse_word("x" * m, 1)), bouquet(1))


def brute_closure(g, labels):
    """Merge blocks until the quotient is folded (one conflict at a time)."""
    labels = list(labels)
    while True:
        for lab in range(g.rank):
            fwd, bwd = {}, {}
            conflict = None
            for t, h, el in g.edges:
                if el != lab:
                    continue
                a, b = labels[t], labels[h]
                if a in fwd and fwd[a] != b:
                    conflict = (fwd[a], b)
                    break
                if b in bwd and bwd[b] != a:
                    conflict = (bwd[b], a)
                    break
                fwd[a], bwd[b] = b, a
            if conflict:
                keep, drop = conflict
                labels = [keep if x == drop else x for x in labels]
                break
        else:
            seen = {}
            return tuple(seen.setdefault(x, len(seen)) for x in labels)


def brute_b_norm(eta):
    """BFS over partitions using the brute closure."""
    g = eta.domain
    top = eta.fiber_partition()
    start = tuple(range(g.num_vertices))
    frontier, dist = [start], {start: 0}
    while frontier:
        nxt = []
        for p in frontier:
            if p == top:
                return dist[p]
            blocks = sorted(set(p))
            for i, a in enumerate(blocks):
                for b in blocks[i + 1:]:
                    va, vb = p.index(a), p.index(b)
                    if top[va] != top[vb]:
                        continue
                    q = brute_closure(g, [a if x == b else x for x in p])
                    if q not in dist:
                        dist[q] = dist[p] + 1
                        nxt.append(q)
        frontier = nxt
    raise AssertionError("unreachable")


class TestMorphismBasics:
    def test_validation(self):
        g = cycle_graph(w("xy"))
        with pytest.raises(ValueError):
            make_morphism(g, cycle_graph(w("x")), (0, 0))
        with pytest.raises(ValueError):
            make_morphism(g, X2, (0,))

    def test_compose_identity(self):
        eta = to_x2("xyXY")
        assert compose(eta, identity(eta.domain)).vertex_map == eta.vertex_map
        assert compose(identity(X2), eta).vertex_map == eta.vertex_map

    def test_image_factorization(self):
        eta = to_x2("xx")
        fac = image(eta)
        assert fac.image.num_edges == 1
        assert fac.onto.is_surjective
        assert compose(fac.inclusion, fac.onto).vertex_map == eta.vertex_map
        assert fac.inclusion.is_injective

    def test_json_roundtrip(self):
        eta = to_x2("xyXY", (1, 1))
        back = GraphMorphism.from_json(eta.to_json())
        assert back.domain == eta.domain and back.vertex_map == eta.vertex_map
        json.loads(eta.to_json())

    def test_dot(self):
        assert "fillcolor" in to_dot(to_x2("xy"))


class TestPullback:
    @pytest.mark.parametrize("a,b,expected", [(2, 3, 6), (2, 4, 4), (1, 5, 5)])
    def test_powers_of_x(self, a, b, expected):
        p = pullback(to_x2("x" * a), to_x2("x" * b))
        # gcd(a,b) cycles of length lcm(a,b)
        from math import gcd
        comps = p.graph.components()
        assert len(comps) == gcd(a, b)
        assert all(len(c) == expected for c in comps)

    def test_commuting_square(self):
        e1, e2 = to_x2("xyXY"), to_x2("xxy")
        p = pullback(e1, e2)
        assert compose(e1, p.first).vertex_map == compose(e2, p.second).vertex_map

    def test_trivial_intersection(self):
        p = pullback(to_x2("x"), to_x2("y"))
        assert p.graph.num_vertices == 0


class TestClosedPartitions:
    @pytest.mark.parametrize("g", small_domains(5), ids=lambda g: f"V{g.num_vertices}E{g.num_edges}")
    def test_enumeration_matches_brute_force(self, g):
        brute = {p for p in all_set_partitions(g.num_vertices)
                 if quotient_is_folded(g.edges, p, g.rank)}
        fast = enumerate_closed_partitions(g)
        assert len(fast) == len(set(fast))
        assert set(fast) == brute

    def test_enumeration_respects_top(self):
        eta = to_x2("xyXY", (2,))
        top = eta.fiber_partition()
        fast = set(enumerate_closed_partitions(eta.domain, top))
        brute = {p for p in all_set_partitions(eta.domain.num_vertices)
                 if brute_refines(p, top) and quotient_is_folded(eta.domain.edges, p, 2)}
        assert fast == brute

    @settings(max_examples=60)
    @given(st.data())
    def test_closure_matches_brute(self, data):
        g = data.draw(st.sampled_from(small_domains(5)))
        labels = data.draw(st.lists(st.integers(0, 3), min_size=g.num_vertices,
                                    max_size=g.num_vertices))
        c = closure(g, labels)
        assert c == brute_closure(g, labels)
        assert is_closed(g, c)

    def test_quotient_is_fold(self):
        g = cycle_graph(w("xyXY"))
        core, eta = quotient(g, [0, 0, 1, 2])
        assert eta.is_surjective
        assert eta.fiber_partition() == closure(g, [0, 0, 1, 2]) == (0, 0, 1, 1)
        assert (core.num_vertices, core.num_edges) == (2, 3)
        core, eta = quotient(g, [0, 0, 0, 0])
        assert core == X2

    def test_decomp_counts(self):
        assert len(enumerate_decomp_B(to_x2("xyXY"))) == 7
        assert len(enumerate_decomp_B(to_x1(2))) == 2
        triples = enumerate_decomp_B3(to_x1(2))
        assert len(triples) == 3

    def test_budget(self):
        from wordmeasures.errors import BudgetExceeded
        with pytest.raises(BudgetExceeded):
            enumerate_closed_partitions(cycle_graph(w("xyxyXYY")), max_vertices=5)


class TestNorms:
    def test_known_values(self):
        assert b_norm(to_x2("xyXY")) == 2
        assert norm(to_x2("xyXY")) == 2
        assert b_norm(to_x1(2)) == 1
        assert norm(to_bouquet(cycle_graph(w("x")), X2)) == 1

    def test_empty_domain(self):
        eta = make_morphism(empty_graph(2), X2, ())
        assert norm(eta) == 1
        assert immediate_morphism_norm_oracle(eta) == 1

    def test_b_norm_matches_brute_bfs(self):
        for eta in small_morphisms(5):
            if eta.is_surjective:
                assert b_norm(eta) == brute_b_norm(eta)

    def test_b_norm_bounds(self):
        for eta in small_morphisms(5):
            if not eta.is_surjective:
                continue
            g, d = eta.domain, eta.codomain
            bn = b_norm(eta)
            assert g.euler_characteristic - d.euler_characteristic <= bn
            assert bn <= len(g.components()) - d.euler_characteristic

    def test_norm_matches_immediate_oracle_with_extra_component(self):
        g = cycle_graph(w("xx"))
        extra = cycle_graph(w("yyX"))
        delta = disjoint_union(cycle_graph(w("x")), extra)
        eta = make_morphism(g, delta, (0, 0))
        assert norm(eta) == immediate_morphism_norm_oracle(eta) == 1

    def test_free_iff_norm_equality(self):
        for eta in small_morphisms(5):
            expected = norm(eta) == (eta.domain.euler_characteristic
                                     - eta.codomain.euler_characteristic)
            assert is_free(eta) == expected


class TestFreeAndAlgebraic:
    def test_examples(self):
        assert not is_free(to_x2("xyXY"))
        assert is_algebraic(to_x2("xyXY"))
        assert is_free(to_bouquet(disjoint_union(cycle_graph(w("x")), cycle_graph(w("y"))), X2))
        assert not is_algebraic(to_bouquet(disjoint_union(cycle_graph(w("x")),
                                                         cycle_graph(w("y"))), X2))
        assert is_algebraic(to_x1(2))
        assert not is_algebraic(to_x2("xx"))

    def test_identity_is_free_and_algebraic(self):
        g = cycle_graph(w("xyy"))
        assert is_free(identity(g))
        assert is_algebraic(identity(g))

    def test_alg_free_decomposition_legs(self):
        for eta in small_morphisms(4):
            if not eta.is_surjective:
                continue
            dec = alg_free_decomposition(eta)
            assert is_algebraic(dec.algebraic)
            assert is_free(dec.free)
            assert compose(dec.free, dec.algebraic).vertex_map == eta.vertex_map

    def test_alg_free_middle_for_two_equal_cycles(self):
        g = disjoint_union(cycle_graph(w("x")), cycle_graph(w("x")))
        dec = alg_free_decomposition(to_bouquet(g, X2))
        assert dec.middle.num_vertices == 1 and dec.middle.num_edges == 1

    def test_lattice_free_agrees_with_norm(self):
        eta = to_x2("xyXY")
        lat = decomposition_lattice(eta)
        for i in range(len(lat)):
            d = lat.elements[i]
            core, first = quotient(eta.domain, d)
            second = make_morphism(core, X2, (0,) * core.num_vertices)
            assert lat.is_free(i, lat.top_index) == is_free(second)

    def test_lattice_distance_is_b_norm(self):
        for eta in small_morphisms(5):
            if eta.is_surjective:
                lat = decomposition_lattice(eta)
                assert lat.distance(lat.bottom, lat.top_index) == b_norm(eta)


class TestCritical:
    def test_commutator(self):
        rep = chi_max_and_crit(to_x2("xyXY"))
        assert rep.chi_max == -1 and len(rep.critical) == 1

    def test_power(self):
        rep = chi_max_and_crit(to_x1(2))
        assert rep.chi_max == 0 and len(rep.critical) == 1

    def test_primitive(self):
        assert chi_max_and_crit(to_x2("x")).chi_max is None
        assert chi_max_and_crit(to_x2("xy")).chi_max is None

    def test_invalid_top(self):
        g = cycle_graph(w("xyXY"))
        with pytest.raises(InvariantViolation):
            ClosedPartitionLattice(g, (0, 0, 1, 2))

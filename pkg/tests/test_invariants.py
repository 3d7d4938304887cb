# tests/test_invariants.py
from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest

from conftest import CASE_NAMES, load_example, random_graph, random_instances
from cristalq.errors import NotACycle, NotDirectSummand, NotIndependent, WrongCorank
from cristalq.services.graph_core import Graph, OneChain, homology_basis
from cristalq.services.invariants import (
    gram_matrix,
    intersection_determinant,
    invariant_report,
    is_vanishing_subgroup,
    tree_number,
)


def bouquet(n: int) -> Graph:
    return Graph.from_edges(["v"], [(f"e{i}", "v", "v") for i in range(1, n + 1)])


def chain(**coefficients: int) -> OneChain:
    return OneChain.from_mapping(coefficients)


# ----------------------------
# Subgrupos
# ----------------------------

def test_subgroup_checks_in_order():
    g = bouquet(3)
    theta = Graph.from_edges(["x", "y"], [("e1", "x", "y"), ("e2", "x", "y"), ("e3", "x", "y")])
    with pytest.raises(NotACycle):
        is_vanishing_subgroup(theta, [chain(e1=1)])
    with pytest.raises(WrongCorank):
        is_vanishing_subgroup(g, [chain(e1=1), chain(e2=1)])
    with pytest.raises(NotDirectSummand):
        is_vanishing_subgroup(g, [chain(e1=2)])
    with pytest.raises(NotIndependent):
        is_vanishing_subgroup(bouquet(4), [chain(e1=1), chain(e1=2)])


def test_zero_subgroup_needs_betti_two():
    theta = Graph.from_edges(["x", "y"], [("e1", "x", "y"), ("e2", "x", "y"), ("e3", "x", "y")])
    assert is_vanishing_subgroup(theta, []).rank == 0
    with pytest.raises(WrongCorank):
        is_vanishing_subgroup(bouquet(3), [])


def test_hnf_ignores_choice_of_basis():
    g = bouquet(4)
    first = is_vanishing_subgroup(g, [chain(e1=1, e2=1), chain(e3=1, e4=-1)])
    second = is_vanishing_subgroup(
        g, [chain(e1=1, e2=1, e3=1, e4=-1), chain(e1=2, e2=2, e3=1, e4=-1)]
    )
    assert first.hnf() == second.hnf()


# ----------------------------
# Invariantes numéricos
# ----------------------------

def test_theta_report():
    g = Graph.from_edges(["x", "y"], [("e1", "x", "y"), ("e2", "x", "y"), ("e3", "x", "y")])
    report = invariant_report(g, is_vanishing_subgroup(g, []))
    assert report.to_json() == {
        "b1": 2,
        "kappa": 3,
        "I": 1,
        "D": 3,
        "vol_albanese_sq": "3/1",
        "vol_generalized_albanese_sq": "3/1",
        "min_energy_sq": "16/3",
    }


@pytest.mark.parametrize(
    "coefficients, i_h, d, energy",
    [
        ({"e1": 1, "e2": 1, "e3": 1}, 3, 3, Fraction(48)),
        ({"e1": 1, "e2": 1, "e3": 2}, 6, 6, Fraction(96)),
    ],
)
def test_bouquet_reports(coefficients, i_h, d, energy):
    g = bouquet(3)
    report = invariant_report(g, is_vanishing_subgroup(g, [OneChain.from_mapping(coefficients)]))
    assert (report.kappa, report.i_h, report.d) == (1, i_h, d)
    assert report.min_energy_sq == energy


def test_square_bouquet_has_d_one():
    g = bouquet(2)
    assert invariant_report(g, is_vanishing_subgroup(g, [])).d == 1


@pytest.mark.parametrize("name", CASE_NAMES)
def test_fixture_invariants(name, manifest):
    g, h = load_example(name)
    report = invariant_report(g, h)
    expected = manifest[name]
    assert report.kappa == expected["kappa"]
    assert report.i_h == expected["I"]
    assert report.d == expected["D"]
    assert report.to_json()["min_energy_sq"] == expected["energy_sq"]


def test_gram_of_kagome_generators():
    _, h = load_example("kagome")
    assert gram_matrix(h.generators) == [[3, 0], [0, 3]]
    assert intersection_determinant(h) == 9


def spanning_tree_count(g: Graph) -> int:
    """Cuenta a mano: subconjuntos de |V| − 1 aristas sin ciclos."""
    count = 0
    for subset in itertools.combinations(g.edges, g.n_vertices - 1):
        parent = {v: v for v in g.vertices}

        def root(v: str) -> str:
            while parent[v] != v:
                v = parent[v]
            return v

        acyclic = True
        for edge in subset:
            a, b = root(edge.origin), root(edge.terminus)
            if a == b:
                acyclic = False
                break
            parent[a] = b
        count += acyclic
    return count


@pytest.mark.parametrize("seed", [11, 12, 13, 14, 15])
def test_tree_number_matches_spanning_tree_count(seed):
    rng = random.Random(seed)
    for _ in range(100):
        g = random_graph(rng, rng.randint(1, 5), rng.randint(0, 4))
        assert tree_number(g) == spanning_tree_count(g), g.edges


@pytest.mark.parametrize("seed", [21, 22])
def test_intersection_determinant_is_basis_invariant(seed):
    for g, h in random_instances(seed, 4):
        if h.rank < 2:
            continue
        a, b = h.generators[0], h.generators[1]
        swapped = [a + b, b] + list(h.generators[2:])
        other = is_vanishing_subgroup(g, swapped, homology_basis(g))
        assert intersection_determinant(other) == intersection_determinant(h)
        assert other.hnf() == h.hnf()

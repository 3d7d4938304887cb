# tests/test_tiling.py
from __future__ import annotations

import random
import time
from fractions import Fraction
from typing import Dict, Tuple

import pytest

from conftest import CASE_NAMES, TILING_CASES, load_example
from cristalq.errors import BudgetExceeded, EdgeCrossing, EdgeDegenerate, RankTooLarge
from cristalq.services.exact_arith import QuadElem, segments_conflict
from cristalq.services.graph_core import Graph, OneChain, homology_basis
from cristalq.services.invariants import VanishingSubgroup, intersection_determinant, is_vanishing_subgroup
from cristalq.services.realization import place, standard_point
from cristalq.services.tiling import (
    _collect_subgroups,
    enumerate_vanishing_subgroups,
    face_bound,
    fundamental_tiles,
    height,
    is_tiling,
    screen_tiling,
    subgroup_table,
    tiling_candidates,
    tiling_census,
    torus_embedding,
)


def bouquet(n: int) -> Graph:
    return Graph.from_edges(["v"], [(f"e{i}", "v", "v") for i in range(1, n + 1)])


def theta() -> Graph:
    return Graph.from_edges(["x", "y"], [("e1", "x", "y"), ("e2", "x", "y"), ("e3", "x", "y")])


def point(a, b) -> QuadElem:
    return QuadElem(Fraction(a), Fraction(b), 1)


def skewed_case() -> Tuple[Graph, VanishingSubgroup]:
    """Dos vértices y un H de coeficientes grandes: la HNF del retículo queda muy sesgada."""
    g = Graph.from_edges(
        ["v0", "v1"],
        [("e1", "v1", "v0"), ("e2", "v1", "v0"), ("e3", "v0", "v1"), ("e4", "v1", "v1")],
    )
    generator = OneChain.from_mapping({"e1": -33, "e2": 94, "e3": 61, "e4": -43})
    return g, is_vanishing_subgroup(g, [generator])


def relabeled(g: Graph, seed: int) -> Tuple[Graph, Dict[str, str]]:
    """Mismo grafo con vértices y aristas renombrados y reordenados; devuelve la vuelta de aristas."""
    rng = random.Random(seed)
    vertices = list(g.vertices)
    rng.shuffle(vertices)
    names = {v: f"w{i}" for i, v in enumerate(vertices)}
    edges = list(g.edges)
    rng.shuffle(edges)
    back = {f"f{i}": e.id for i, e in enumerate(edges)}
    renamed = Graph.from_edges(
        [names[v] for v in vertices],
        [(f"f{i}", names[e.origin], names[e.terminus]) for i, e in enumerate(edges)],
    )
    return renamed, back


def original_key(g: Graph, generators, back: Dict[str, str]):
    chains = [
        OneChain.from_mapping({back[edge]: value for edge, value in chain.as_dict().items()})
        for chain in generators
    ]
    return is_vanishing_subgroup(g, chains).hnf()


# ----------------------------
# Predicados exactos
# ----------------------------

def test_segments_conflict():
    assert segments_conflict(point(0, 0), point(2, 0), point(1, -1), point(1, 1), 1)
    assert not segments_conflict(point(0, 0), point(1, 0), point(1, 0), point(1, 1), 1)
    assert segments_conflict(point(0, 0), point(2, 0), point(1, 0), point(1, 1), 1)
    assert segments_conflict(point(0, 0), point(2, 0), point(1, 0), point(3, 0), 1)
    assert not segments_conflict(point(0, 0), point(1, 0), point(1, 0), point(2, 0), 1)
    assert not segments_conflict(point(0, 0), point(1, 1), point(2, 0), point(3, 1), 1)


def test_segments_conflict_with_irrational_coordinates():
    # (0,0)–(1,√3) contra (1,0)–(0,√3): se cortan en (1/2, √3/2)
    a, b = QuadElem(0, 0, 3), QuadElem(1, 1, 3)
    c, e = QuadElem(1, 0, 3), QuadElem(0, 1, 3)
    assert segments_conflict(a, b, c, e, 3)
    assert not segments_conflict(a, b, QuadElem(2, 0, 3), QuadElem(3, 1, 3), 3)


# ----------------------------
# Encaje y veredicto
# ----------------------------

@pytest.mark.parametrize("name", TILING_CASES)
def test_fixture_tilings(name, manifest):
    g, h = load_example(name)
    verdict = is_tiling(g, h)
    assert verdict.is_tiling, verdict.reason
    embedding = verdict.embedding
    assert embedding.face_sizes == manifest[name]["face_sizes"]
    assert embedding.euler_characteristic(g) == 0
    assert sum(embedding.face_sizes) == 2 * g.n_edges


@pytest.mark.parametrize("name", TILING_CASES)
def test_fundamental_tiles_generate_subgroup(name):
    g, h = load_example(name)
    embedding = is_tiling(g, h).embedding
    chains = fundamental_tiles(embedding, h)
    assert len(chains) == h.rank + 1
    total = OneChain()
    for chain in chains:
        total = total + chain
    assert total.is_zero()


def test_sqrt6_edges_cross():
    g, h = load_example("sqrt6")
    verdict = is_tiling(g, h)
    assert not verdict.is_tiling
    assert verdict.reason.startswith("EdgeCrossing")
    with pytest.raises(EdgeCrossing):
        torus_embedding(g, standard_point(g, h))


def test_degenerate_edge_is_rejected():
    g = bouquet(3)
    h = is_vanishing_subgroup(g, [OneChain.from_mapping({"e1": 1})])
    verdict = is_tiling(g, h)
    assert not verdict.is_tiling
    assert verdict.reason.startswith("EdgeDegenerate")
    with pytest.raises(EdgeDegenerate):
        torus_embedding(g, standard_point(g, h))


def test_collinear_loops_are_rejected():
    g = bouquet(3)
    h = is_vanishing_subgroup(g, [OneChain.from_mapping({"e1": 1, "e2": 1})])
    assert not is_tiling(g, h).is_tiling


def test_overlapping_loops_are_degenerate():
    # z(e1) = −z(e2): los dos lazos quedan sobre la misma recta
    g = bouquet(3)
    h = is_vanishing_subgroup(g, [OneChain.from_mapping({"e1": 1, "e2": 1})])
    crystal = place(g, standard_point(g, h), 1)
    assert crystal.degenerate


def test_skewed_lattice_is_screened_without_geometry():
    g, h = skewed_case()
    assert height(h).height == 231
    verdict = screen_tiling(g, h)
    assert verdict is not None
    assert not verdict.is_tiling
    assert verdict.reason.startswith("Altura 231 > 5")


def test_skewed_lattice_embedding_terminates():
    g, h = skewed_case()
    start = time.perf_counter()
    verdict = is_tiling(g, h)
    assert not verdict.is_tiling
    assert time.perf_counter() - start < 30


def test_screen_keeps_fixture_tilings():
    for name in TILING_CASES:
        g, h = load_example(name)
        assert screen_tiling(g, h) is None


def test_theta_rotation_system_and_faces():
    g = theta()
    embedding = is_tiling(g, is_vanishing_subgroup(g, [])).embedding
    assert embedding.face_sizes == [6]
    assert set(embedding.rotation_system) == {"x", "y"}
    assert sorted(embedding.rotation_system["x"]) == [("e1", 1), ("e2", 1), ("e3", 1)]
    data = embedding.to_json()
    assert data["faces"][0]["size"] == 6
    assert data["faces"][0]["boundary"] == {}


def test_tiling_ignores_edge_order_and_orientation(manifest):
    g, h = load_example("kagome")
    reordered = Graph.from_edges(
        list(g.vertices),
        [(e.id, e.origin, e.terminus) for e in reversed(g.edges)],
    )
    generators = [OneChain.from_mapping(gen.as_dict()) for gen in h.generators]
    verdict = is_tiling(reordered, is_vanishing_subgroup(reordered, generators))
    assert verdict.embedding.face_sizes == manifest["kagome"]["face_sizes"]

    flipped = g.with_reversed_edge("e4")
    flipped_gens = [gen.reversed_edge("e4") for gen in h.generators]
    verdict = is_tiling(flipped, is_vanishing_subgroup(flipped, flipped_gens))
    assert verdict.embedding.face_sizes == manifest["kagome"]["face_sizes"]


# ----------------------------
# Altura
# ----------------------------

@pytest.mark.parametrize(
    "name, expected",
    [("triangular", 3), ("sqrt6", 4), ("kagome", 3), ("eight-four", 4), ("square", 0)],
)
def test_height_of_fixtures(name, expected):
    _, h = load_example(name)
    report = height(h)
    assert report.height == expected
    assert report.optimal
    assert len(report.witness_basis) == h.rank


def test_height_finds_shorter_basis():
    g = bouquet(4)
    long_basis = [
        OneChain.from_mapping({"e1": 1, "e2": 1, "e3": 1}),
        OneChain.from_mapping({"e1": 2, "e2": 2, "e3": 1, "e4": 1}),
    ]
    h = is_vanishing_subgroup(g, long_basis)
    report = height(h)
    assert report.height == 3
    witness = is_vanishing_subgroup(g, list(report.witness_basis))
    assert witness.hnf() == h.hnf()


def test_height_rank_too_large():
    g = bouquet(7)
    gens = [OneChain.from_mapping({f"e{i}": 1}) for i in range(1, 6)]
    h = is_vanishing_subgroup(g, gens)
    report = height(h)
    assert not report.optimal
    assert report.height == 1
    with pytest.raises(RankTooLarge):
        height(h, strict=True)


# ----------------------------
# Enumeración y censo
# ----------------------------

def test_enumerate_bouquet_three():
    g = bouquet(3)
    small = enumerate_vanishing_subgroups(g, 3)
    assert len(small) == 25
    keys = {h.hnf() for h in small}
    assert ((1, 1, 1),) in keys
    assert ((1, 1, 2),) not in keys
    bigger = {h.hnf() for h in enumerate_vanishing_subgroups(g, 4)}
    assert ((1, 1, 2),) in bigger
    assert keys < bigger


def test_enumeration_is_sorted_and_unique():
    g = bouquet(3)
    keys = [h.hnf() for h in enumerate_vanishing_subgroups(g, 4)]
    assert keys == sorted(set(keys))


def test_enumeration_budget():
    with pytest.raises(BudgetExceeded):
        enumerate_vanishing_subgroups(bouquet(12), 40)


def test_tiling_candidates_cover_fixture_tilings():
    for name in ("triangular", "kagome"):
        g, h = load_example(name)
        keys = {candidate.hnf() for candidate in tiling_candidates(g)}
        assert h.hnf() in keys


def test_theta_census():
    report = tiling_census(theta(), threads=1)
    assert report.hmax == 6
    assert report.total == 1
    assert report.tiling_count == 1
    row = report.rows[0]
    assert row.face_sizes == (6,)
    assert (row.d, row.kappa, row.i_h) == (3, 3, 1)
    assert row.height == 0


def test_bouquet_census():
    report = tiling_census(bouquet(3), hmax=3, threads=2)
    assert report.total == 25
    assert report.tiling_count == 4
    tilings = [row for row in report.rows if row.is_tiling]
    assert all(row.face_sizes == (3, 3) for row in tilings)
    assert all(row.d == 3 and row.i_h == 3 for row in tilings)
    only = tiling_census(bouquet(3), tilings_only=True, threads=2)
    assert [row.hnf for row in only.rows] == [row.hnf for row in tilings]
    data = only.to_json()
    assert data["tiling_count"] == 4
    assert data["rows"][0]["face_sizes"] == [3, 3]


def test_kagome_tilings_only_census(manifest):
    g, h = load_example("kagome")
    report = tiling_census(g, tilings_only=True)
    assert all(row.is_tiling for row in report.rows)
    keys = {row.hnf: row for row in report.rows}
    assert h.hnf() in keys
    assert list(keys[h.hnf()].face_sizes) == manifest["kagome"]["face_sizes"]


def test_face_bound():
    g, _ = load_example("kagome")
    assert face_bound(g, 2) == 6
    assert face_bound(bouquet(3), 1) == 3
    assert face_bound(theta(), 0) == 3


def test_rank_two_table_matches_subset_search():
    g = bouquet(4)
    hb = homology_basis(g)
    table = subgroup_table(g, 3)
    slow = _collect_subgroups(g, hb, 3, None)
    assert [table.key(k) for k in range(len(table))] == [h.hnf() for h in slow]
    for k, h in enumerate(slow):
        assert int(table.heights[k]) == height(h).height
        assert table.subgroup(k, hb).hnf() == h.hnf()


def test_table_intersection_numbers():
    g = bouquet(4)
    table = subgroup_table(g, 2)
    numbers = table.intersection_numbers()
    for k in range(len(table)):
        assert int(numbers[k]) == intersection_determinant(table.subgroup(k))


def test_bouquet_full_census_default_height():
    g = bouquet(3)
    report = tiling_census(g, threads=2)
    assert report.hmax == 12
    assert report.total == 1057
    assert report.tiling_count == 4
    keys = [row.hnf for row in report.iter_rows()]
    assert keys == sorted(set(keys))
    only = tiling_census(g, tilings_only=True, threads=2)
    assert {row.hnf for row in report.tilings} == {row.hnf for row in only.rows}


@pytest.fixture(scope="module")
def kagome_census():
    g, h = load_example("kagome")
    start = time.perf_counter()
    report = tiling_census(g)
    return g, h, report, time.perf_counter() - start


def test_kagome_full_census(kagome_census, manifest):
    g, h, report, elapsed = kagome_census
    assert elapsed < 60
    assert report.hmax == 18
    assert report.total == 4_573_466
    tilings = {row.hnf: row for row in report.tilings}
    assert h.hnf() in tilings
    assert list(tilings[h.hnf()].face_sizes) == manifest["kagome"]["face_sizes"]
    only = tiling_census(g, tilings_only=True)
    assert set(tilings) == {row.hnf for row in only.rows}
    assert report.tiling_keys == only.tiling_keys


def test_kagome_census_rows_are_consistent(kagome_census):
    g, h, report, _ = kagome_census
    k = report.table.index_of(h.hnf())
    row = report.row(k)
    assert row.is_tiling
    assert (row.height, row.height_optimal) == (3, True)
    assert (row.d, row.kappa, row.i_h) == (3, 12, 9)
    assert is_vanishing_subgroup(g, list(row.generators)).hnf() == h.hnf()
    last = report.row(report.total - 1)
    assert last.height <= 18


@pytest.mark.parametrize("seed", [3, 11])
def test_bouquet_census_ignores_labels(seed):
    g = bouquet(3)
    report = tiling_census(g, threads=1)
    renamed, back = relabeled(g, seed)
    other = tiling_census(renamed, threads=1)
    assert other.total == report.total
    assert {original_key(g, row.generators, back) for row in other.iter_rows()} == {
        row.hnf for row in report.iter_rows()
    }
    assert {original_key(g, row.generators, back) for row in other.tilings} == report.tiling_keys


def test_kagome_census_ignores_labels(kagome_census):
    g, _, report, _ = kagome_census
    renamed, back = relabeled(g, 7)
    other = tiling_census(renamed)
    assert other.total == report.total
    assert {original_key(g, row.generators, back) for row in other.tilings} == report.tiling_keys


@pytest.mark.parametrize("name", CASE_NAMES)
def test_verdict_matches_manifest(name, manifest):
    g, h = load_example(name)
    assert is_tiling(g, h).is_tiling == manifest[name]["is_tiling"]

# tests/conftest.py
"""
Utilidades compartidas por los tests:
  - lectura de los ejemplos de fixtures/ y de manifest.json,
  - generador de grafos aleatorios sin puentes (semillas fijas),
  - subgrupos que se anulan aleatorios a partir de matrices unimodulares.
"""

from __future__ import annotations

import json
import random
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import pytest

from cristalq.schemas import load_graph_file, load_point_file
from cristalq.services.graph_core import Graph, HomologyBasis, homology_basis
from cristalq.services.invariants import VanishingSubgroup, is_vanishing_subgroup
from cristalq.services.quadric import ProjectivePoint

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
MANIFEST = json.loads((FIXTURES / "manifest.json").read_text(encoding="utf-8"))["cases"]
CASE_NAMES = sorted(MANIFEST)
TILING_CASES = sorted(name for name, info in MANIFEST.items() if info["is_tiling"])


def load_example(name: str) -> Tuple[Graph, VanishingSubgroup]:
    graph, generators = load_graph_file(FIXTURES / MANIFEST[name]["graph"])
    return graph, is_vanishing_subgroup(graph, generators or [])


def load_example_point(name: str) -> ProjectivePoint:
    return load_point_file(FIXTURES / MANIFEST[name]["point"])


@pytest.fixture
def manifest() -> Dict[str, dict]:
    return MANIFEST


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


# ----------------------------
# Instancias aleatorias
# ----------------------------

def random_graph(rng: random.Random, n_vertices: int, extra_edges: int) -> Graph:
    """
    Un ciclo que pasa por todos los vértices (conexo y sin puentes) más
    aristas al azar, lazos incluidos, hasta que todo vértice tenga grado >= 3.
    """
    vertices = [f"v{i}" for i in range(n_vertices)]
    degree = {v: 0 for v in vertices}
    edges: List[Tuple[str, str, str]] = []

    def add(origin: str, terminus: str) -> None:
        if rng.random() < 0.5:
            origin, terminus = terminus, origin
        edges.append((f"e{len(edges) + 1}", origin, terminus))
        degree[origin] += 1
        degree[terminus] += 1

    for i, vertex in enumerate(vertices):
        add(vertex, vertices[(i + 1) % n_vertices])

    remaining = extra_edges
    while remaining > 0 or min(degree.values()) < 3:
        low = [v for v in vertices if degree[v] < 3]
        origin = rng.choice(low) if low else rng.choice(vertices)
        add(origin, rng.choice(vertices))
        remaining -= 1

    return Graph.from_edges(vertices, edges)


def random_unimodular(rng: random.Random, size: int, steps: int = 12) -> List[List[int]]:
    matrix = [[int(i == j) for j in range(size)] for i in range(size)]
    for _ in range(steps):
        if size < 2:
            break
        i, j = rng.sample(range(size), 2)
        factor = rng.choice([-2, -1, 1, 2])
        matrix[i] = [x + factor * y for x, y in zip(matrix[i], matrix[j])]
    rng.shuffle(matrix)
    return matrix


def random_subgroup(
    rng: random.Random,
    g: Graph,
    hb: Optional[HomologyBasis] = None,
    steps: int = 12,
) -> VanishingSubgroup:
    """H = primeras b−2 filas de una matriz unimodular, en la base de ciclos."""
    hb = hb or homology_basis(g)
    rows = random_unimodular(rng, hb.rank, steps)[: hb.rank - 2]
    return is_vanishing_subgroup(g, [hb.from_coordinates(row) for row in rows], hb)


def random_instances(seed: int, count: int, steps: int = 12) -> List[Tuple[Graph, VanishingSubgroup]]:
    """Con más pasos los coeficientes de H crecen (y el retículo se sesga)."""
    rng = random.Random(seed)
    instances = []
    while len(instances) < count:
        g = random_graph(rng, rng.randint(1, 4), rng.randint(0, 3))
        if g.betti_number < 2:
            continue
        instances.append((g, random_subgroup(rng, g, steps=steps)))
    return instances

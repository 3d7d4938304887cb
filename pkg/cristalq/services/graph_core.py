# cristalq/services/graph_core.py
"""
Núcleo combinatorio de CristalQ: grafos finitos orientados, 1-cadenas
enteras, árbol generador, base de homología y borde.

Cada arista se guarda una sola vez con una orientación fija; la arista
inversa es implícita (coeficiente con el signo cambiado).
Se admiten lazos y aristas múltiples.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Mapping, Sequence, Tuple

import networkx as nx

from cristalq.errors import DegreeTooLow, Disconnected, InvalidGraph, UnknownEdge

logger = logging.getLogger(__name__)


# ----------------------------
# Tipos
# ----------------------------

@dataclass(frozen=True)
class Edge:
    id: str
    origin: str
    terminus: str

    @property
    def is_loop(self) -> bool:
        return self.origin == self.terminus


@dataclass(frozen=True)
class Graph:
    """
    Multigrafo finito. El orden de `vertices` y `edges` es el de entrada
    y fija todas las coordenadas (z1..zN siguen el orden de las aristas).
    """

    vertices: Tuple[str, ...]
    edges: Tuple[Edge, ...]
    _edge_pos: Dict[str, int] = field(init=False, repr=False, compare=False, hash=False)
    _vertex_pos: Dict[str, int] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))

        vertex_pos: Dict[str, int] = {}
        for index, vertex in enumerate(self.vertices):
            if vertex in vertex_pos:
                raise InvalidGraph(f"Vértice repetido: '{vertex}'.")
            vertex_pos[vertex] = index

        edge_pos: Dict[str, int] = {}
        for index, edge in enumerate(self.edges):
            if edge.id in edge_pos:
                raise InvalidGraph(f"Arista repetida: '{edge.id}'.")
            for endpoint in (edge.origin, edge.terminus):
                if endpoint not in vertex_pos:
                    raise InvalidGraph(
                        f"La arista '{edge.id}' usa el vértice desconocido '{endpoint}'."
                    )
            edge_pos[edge.id] = index

        object.__setattr__(self, "_vertex_pos", vertex_pos)
        object.__setattr__(self, "_edge_pos", edge_pos)

    @classmethod
    def from_edges(
        cls,
        vertices: Iterable[str],
        edges: Iterable[Tuple[str, str, str]],
    ) -> "Graph":
        """Atajo: Graph.from_edges(["x", "y"], [("e1", "x", "y"), ...])."""
        return cls(tuple(vertices), tuple(Edge(*edge) for edge in edges))

    # --- consultas ---

    @property
    def edge_ids(self) -> Tuple[str, ...]:
        return tuple(edge.id for edge in self.edges)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def betti_number(self) -> int:
        """b1 = |E| − |V| + 1 (grafo conexo)."""
        return self.n_edges - self.n_vertices + 1

    def edge(self, edge_id: str) -> Edge:
        try:
            return self.edges[self._edge_pos[edge_id]]
        except KeyError:
            raise UnknownEdge(edge_id) from None

    def edge_index(self, edge_id: str) -> int:
        try:
            return self._edge_pos[edge_id]
        except KeyError:
            raise UnknownEdge(edge_id) from None

    def vertex_index(self, vertex: str) -> int:
        return self._vertex_pos[vertex]

    def incident(self, vertex: str) -> List[Tuple[Edge, int]]:
        """
        Aristas que tocan `vertex`, en orden de entrada, con +1 si salen
        del vértice y −1 si llegan. Un lazo aparece dos veces (+1 y −1).
        """
        darts: List[Tuple[Edge, int]] = []
        for edge in self.edges:
            if edge.origin == vertex:
                darts.append((edge, 1))
            if edge.terminus == vertex:
                darts.append((edge, -1))
        return darts

    def degree(self, vertex: str) -> int:
        return len(self.incident(vertex))

    def to_networkx(self) -> nx.MultiGraph:
        multigraph = nx.MultiGraph()
        multigraph.add_nodes_from(self.vertices)
        for edge in self.edges:
            multigraph.add_edge(edge.origin, edge.terminus, key=edge.id)
        return multigraph

    def with_reversed_edge(self, edge_id: str) -> "Graph":
        """Mismo grafo con la orientación de una arista invertida."""
        target = self.edge(edge_id)
        flipped = tuple(
            Edge(e.id, e.terminus, e.origin) if e.id == target.id else e
            for e in self.edges
        )
        return Graph(self.vertices, flipped)


@dataclass(frozen=True)
class OneChain:
    """
    1-cadena entera: coeficientes por id de arista, sin ceros.
    Invertir la orientación de una arista equivale a cambiar el signo
    de su coeficiente.
    """

    terms: Tuple[Tuple[str, int], ...] = ()

    def __post_init__(self) -> None:
        cleaned = tuple(sorted((k, int(v)) for k, v in self.terms if v))
        object.__setattr__(self, "terms", cleaned)

    @classmethod
    def from_mapping(cls, coefficients: Mapping[str, int]) -> "OneChain":
        return cls(tuple(coefficients.items()))

    @classmethod
    def from_vector(cls, g: Graph, vector: Sequence[int]) -> "OneChain":
        return cls(tuple(zip(g.edge_ids, vector)))

    def as_dict(self) -> Dict[str, int]:
        return dict(self.terms)

    def coefficient(self, edge_id: str) -> int:
        return self.as_dict().get(edge_id, 0)

    def to_vector(self, g: Graph) -> Tuple[int, ...]:
        vector = [0] * g.n_edges
        for edge_id, value in self.terms:
            vector[g.edge_index(edge_id)] = value
        return tuple(vector)

    def is_zero(self) -> bool:
        return not self.terms

    def __iter__(self) -> Iterator[Tuple[str, int]]:
        return iter(self.terms)

    def __add__(self, other: "OneChain") -> "OneChain":
        merged = self.as_dict()
        for edge_id, value in other.terms:
            merged[edge_id] = merged.get(edge_id, 0) + value
        return OneChain.from_mapping(merged)

    def __neg__(self) -> "OneChain":
        return OneChain(tuple((k, -v) for k, v in self.terms))

    def __sub__(self, other: "OneChain") -> "OneChain":
        return self + (-other)

    def __mul__(self, factor: int) -> "OneChain":
        return OneChain(tuple((k, factor * v) for k, v in self.terms))

    __rmul__ = __mul__

    def norm_l1(self) -> int:
        return sum(abs(value) for _, value in self.terms)

    def reversed_edge(self, edge_id: str) -> "OneChain":
        """Coordenadas de la misma cadena si `edge_id` se orienta al revés."""
        return OneChain(tuple((k, -v if k == edge_id else v) for k, v in self.terms))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for edge_id, value in self.terms:
            sign = "-" if value < 0 else "+"
            magnitude = "" if abs(value) == 1 else str(abs(value))
            parts.append(f"{sign}{magnitude}{edge_id}")
        text = "".join(parts)
        return text[1:] if text.startswith("+") else text


@dataclass(frozen=True)
class HomologyBasis:
    """
    Ciclos fundamentales (uno por cuerda, en orden de entrada).
    La coordenada de un ciclo en esta base es su coeficiente en cada cuerda.
    """

    cycles: Tuple[OneChain, ...]
    tree_edges: Tuple[str, ...]
    chords: Tuple[str, ...]

    @property
    def rank(self) -> int:
        return len(self.cycles)

    def coordinates(self, cycle: OneChain) -> Tuple[int, ...]:
        return tuple(cycle.coefficient(chord) for chord in self.chords)

    def from_coordinates(self, coordinates: Sequence[int]) -> OneChain:
        total = OneChain()
        for coefficient, cycle in zip(coordinates, self.cycles):
            if coefficient:
                total = total + cycle * coefficient
        return total


# ----------------------------
# Operaciones
# ----------------------------

def validate(g: Graph) -> None:
    """Conexo y con grado >= 3 en cada vértice (los lazos suman 2)."""
    if not g.vertices or not nx.is_connected(g.to_networkx()):
        raise Disconnected("El grafo no es conexo.")
    multigraph = g.to_networkx()
    for vertex in g.vertices:
        degree = multigraph.degree(vertex)
        if degree < 3:
            raise DegreeTooLow(vertex, degree)


def _bfs_parents(g: Graph) -> Dict[str, Tuple[Edge, str]]:
    """
    BFS desde el menor id de vértice; en cada vértice se recorren las
    aristas (no lazos) en orden de entrada. Devuelve hijo -> (arista, padre).
    """
    root = min(g.vertices)
    parents: Dict[str, Tuple[Edge, str]] = {}
    seen = {root}
    queue = deque([root])
    while queue:
        current = queue.popleft()
        for edge, _ in g.incident(current):
            if edge.is_loop:
                continue
            other = edge.terminus if edge.origin == current else edge.origin
            if other not in seen:
                seen.add(other)
                parents[other] = (edge, current)
                queue.append(other)
    return parents


def spanning_tree(g: Graph) -> Tuple[str, ...]:
    """Ids de las aristas del árbol generador, en orden de entrada."""
    in_tree = {edge.id for edge, _ in _bfs_parents(g).values()}
    return tuple(edge_id for edge_id in g.edge_ids if edge_id in in_tree)


def root_paths(g: Graph) -> Dict[str, OneChain]:
    """Para cada vértice, la cadena del camino en el árbol desde la raíz."""
    parents = _bfs_parents(g)
    paths: Dict[str, OneChain] = {min(g.vertices): OneChain()}

    def path_to(vertex: str) -> OneChain:
        if vertex not in paths:
            edge, parent = parents[vertex]
            step = 1 if edge.origin == parent else -1
            paths[vertex] = path_to(parent) + OneChain(((edge.id, step),))
        return paths[vertex]

    for vertex in g.vertices:
        path_to(vertex)
    return paths


def homology_basis(g: Graph) -> HomologyBasis:
    """
    Un ciclo fundamental por cuerda: la cuerda con coeficiente +1 más el
    camino del árbol que vuelve de su terminal a su origen.
    """
    tree = spanning_tree(g)
    in_tree = set(tree)
    paths = root_paths(g)
    chords = tuple(edge.id for edge in g.edges if edge.id not in in_tree)
    cycles = []
    for chord_id in chords:
        chord = g.edge(chord_id)
        cycle = OneChain(((chord_id, 1),)) + paths[chord.origin] - paths[chord.terminus]
        cycles.append(cycle)
    logger.debug("Base de homología: %d ciclos, árbol %s", len(cycles), tree)
    return HomologyBasis(tuple(cycles), tree, chords)


def chain_norm_l1(a: OneChain) -> int:
    return a.norm_l1()


def boundary(a: OneChain, g: Graph) -> Tuple[int, ...]:
    """
    Borde de una 1-cadena, indexado como g.vertices:
    +coeficiente en el terminal, −coeficiente en el origen.
    """
    values = [0] * g.n_vertices
    for edge_id, coefficient in a:
        edge = g.edge(edge_id)
        values[g.vertex_index(edge.terminus)] += coefficient
        values[g.vertex_index(edge.origin)] -= coefficient
    return tuple(values)


def is_cycle(a: OneChain, g: Graph) -> bool:
    return not any(boundary(a, g))

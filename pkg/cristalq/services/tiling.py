# cristalq/services/tiling.py
"""
Teselaciones del toro por realizaciones estándar.

- torus_embedding: reduce la realización módulo el retículo de períodos,
  controla colisiones de vértices y cruces de segmentos con predicados
  exactos, arma el sistema de rotación y recorre las caras.
- is_tiling / fundamental_tiles: criterio de teselación y chequeo de que
  los bordes de b−2 caras forman una ℤ-base de H.
- face_bound / screen_tiling: cota de altura que cumple toda teselación.
- height: altura h(H) = mín sobre ℤ-bases de la máxima norma ℓ¹.
- subgroup_table: todos los H con h(H) <= hmax como arreglos numpy.
- enumerate_vanishing_subgroups / tiling_candidates / tiling_census:
  enumeración acotada de subgrupos y su clasificación.
"""

from __future__ import annotations

import functools
import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Set, Tuple

import numpy as np
import sympy

from cristalq import config
from cristalq.errors import (
    BasisCheckFailed,
    BudgetExceeded,
    EdgeCrossing,
    EdgeDegenerate,
    InternalError,
    RankTooLarge,
    VertexCollision,
)
from cristalq.services.exact_arith import (
    QuadElem,
    cross_sign,
    determinant,
    hermite_normal_form,
    segments_conflict,
    smith_invariants,
    squarefree_part,
)
from cristalq.services.graph_core import Graph, HomologyBasis, OneChain, homology_basis
from cristalq.services.invariants import (
    VanishingSubgroup,
    gram_matrix,
    is_vanishing_subgroup,
    tree_number,
)
from cristalq.services.realization import (
    PeriodLattice,
    PlacedCrystal,
    PlacedSegment,
    PlacedVertex,
    StandardPoint,
    base_positions,
    lattice_coordinates,
    nearby_shifts,
    period_lattice,
    segment_box,
    standard_point,
)

logger = logging.getLogger(__name__)

Dart = Tuple[str, int]  # (id de arista, +1 a favor / −1 en contra)
HnfKey = Tuple[Tuple[int, ...], ...]


# ----------------------------
# Tipos
# ----------------------------

@dataclass(frozen=True)
class Face:
    darts: Tuple[Dart, ...]

    @property
    def size(self) -> int:
        return len(self.darts)

    @property
    def chain(self) -> OneChain:
        """ω(c): suma con signo de las aristas del borde."""
        total: Dict[str, int] = {}
        for edge_id, sign in self.darts:
            total[edge_id] = total.get(edge_id, 0) + sign
        return OneChain.from_mapping(total)


@dataclass(frozen=True)
class TorusEmbedding:
    point: StandardPoint
    placed: PlacedCrystal
    rotation_system: Dict[str, Tuple[Dart, ...]]
    faces: Tuple[Face, ...]

    @property
    def face_sizes(self) -> List[int]:
        return sorted(face.size for face in self.faces)

    def euler_characteristic(self, g: Graph) -> int:
        return g.n_vertices - g.n_edges + len(self.faces)

    def to_json(self) -> dict:
        return {
            "face_sizes": self.face_sizes,
            "faces": [
                {"size": face.size, "boundary": face.chain.as_dict()} for face in self.faces
            ],
            "rotation_system": {
                vertex: [[edge_id, sign] for edge_id, sign in darts]
                for vertex, darts in self.rotation_system.items()
            },
        }


@dataclass(frozen=True)
class TilingVerdict:
    is_tiling: bool
    reason: Optional[str]
    embedding: Optional[TorusEmbedding]


@dataclass(frozen=True)
class HeightReport:
    height: int
    witness_basis: Tuple[OneChain, ...]
    optimal: bool = True

    def to_json(self) -> dict:
        return {
            "height": self.height,
            "optimal": self.optimal,
            "witness_basis": [chain.as_dict() for chain in self.witness_basis],
        }


# ----------------------------
# Orden angular
# ----------------------------

def _half_plane(v: QuadElem) -> int:
    """0 para ángulos en [0, π), 1 para [π, 2π)."""
    if v.b > 0 or (v.b == 0 and v.a > 0):
        return 0
    return 1


# ----------------------------
# Encaje en el toro
# ----------------------------

def _fractional(value: Fraction) -> Fraction:
    return value - math.floor(value)


def _edge_vector(z: StandardPoint, g: Graph, edge_id: str) -> QuadElem:
    return z.coords[g.edge_index(edge_id)]


def _reduce_vertices(
    g: Graph, positions: Dict[str, QuadElem], pl: PeriodLattice
) -> Dict[str, QuadElem]:
    reduced: Dict[str, QuadElem] = {}
    seen: Dict[Tuple[Fraction, Fraction], str] = {}
    for vertex in g.vertices:
        m, n = lattice_coordinates(pl, positions[vertex])
        key = (_fractional(m), _fractional(n))
        if key in seen:
            raise VertexCollision(
                f"Los vértices '{seen[key]}' y '{vertex}' caen en el mismo punto del toro."
            )
        seen[key] = vertex
        reduced[vertex] = positions[vertex] - pl.point(math.floor(m), math.floor(n))
    return reduced


def _check_crossings(
    g: Graph,
    z: StandardPoint,
    reduced: Dict[str, QuadElem],
    pl: PeriodLattice,
) -> None:
    """
    Compara cada segmento base con todos los trasladados de los demás
    cuyas cajas (en coordenadas del retículo) se tocan con la suya.
    `pl` tiene que venir reducido: con la HNF cruda las cajas pueden
    abarcar cientos de miles de celdas.
    """
    segments = []
    for edge in g.edges:
        start = reduced[edge.origin]
        end = start + _edge_vector(z, g, edge.id)
        segments.append((edge.id, start, end, segment_box(pl, start, end)))

    for i, j in itertools.combinations_with_replacement(range(len(segments)), 2):
        id_i, start_i, end_i, box_i = segments[i]
        id_j, start_j, end_j, box_j = segments[j]
        for dm, dn in nearby_shifts(box_i, box_j):
            if i == j and dm == 0 and dn == 0:
                continue
            offset = pl.point(dm, dn)
            if segments_conflict(start_i, end_i, start_j + offset, end_j + offset, pl.d):
                raise EdgeCrossing(
                    f"Las aristas '{id_i}' y '{id_j}' (trasladada {dm}, {dn}) se cruzan."
                )


def _rotation_system(g: Graph, z: StandardPoint) -> Dict[str, Tuple[Dart, ...]]:
    d = z.d

    def direction(dart: Dart) -> QuadElem:
        edge_id, sign = dart
        vector = _edge_vector(z, g, edge_id)
        return vector if sign > 0 else -vector

    def compare(left: Dart, right: Dart) -> int:
        u, v = direction(left), direction(right)
        hu, hv = _half_plane(u), _half_plane(v)
        if hu != hv:
            return hu - hv
        return -cross_sign(u, v, d)

    rotation = {}
    for vertex in g.vertices:
        darts = [(edge.id, sign) for edge, sign in g.incident(vertex)]
        rotation[vertex] = tuple(sorted(darts, key=functools.cmp_to_key(compare)))
    return rotation


def _trace_faces(g: Graph, rotation: Dict[str, Tuple[Dart, ...]]) -> Tuple[Face, ...]:
    """
    Caras a la izquierda de cada dardo: después de llegar a v por d se
    sigue con el dardo inmediatamente en sentido horario desde el inverso.
    """
    position = {
        vertex: {dart: index for index, dart in enumerate(darts)}
        for vertex, darts in rotation.items()
    }

    def head(dart: Dart) -> str:
        edge = g.edge(dart[0])
        return edge.terminus if dart[1] > 0 else edge.origin

    def following(dart: Dart) -> Dart:
        vertex = head(dart)
        darts = rotation[vertex]
        back = position[vertex][(dart[0], -dart[1])]
        return darts[(back - 1) % len(darts)]

    visited: Set[Dart] = set()
    faces = []
    for edge in g.edges:
        for sign in (1, -1):
            start = (edge.id, sign)
            if start in visited:
                continue
            walk = []
            current = start
            while current not in visited:
                visited.add(current)
                walk.append(current)
                current = following(current)
            faces.append(Face(tuple(walk)))
    return tuple(faces)


def torus_embedding(
    g: Graph,
    z: StandardPoint,
    hb: Optional[HomologyBasis] = None,
) -> TorusEmbedding:
    hb = hb or homology_basis(g)
    for edge in g.edges:
        if _edge_vector(z, g, edge.id).is_zero():
            raise EdgeDegenerate(f"La arista '{edge.id}' tiene vector nulo.")

    pl = period_lattice(z, hb, g)
    search = pl.reduced()
    reduced = _reduce_vertices(g, base_positions(g, z), search)
    _check_crossings(g, z, reduced, search)

    rotation = _rotation_system(g, z)
    faces = _trace_faces(g, rotation)
    placed = PlacedCrystal(
        base_positions=reduced,
        lattice=pl,
        vertices=tuple(PlacedVertex(v, (0, 0), reduced[v]) for v in g.vertices),
        segments=tuple(
            PlacedSegment(e.id, (0, 0), reduced[e.origin], reduced[e.origin] + _edge_vector(z, g, e.id))
            for e in g.edges
        ),
        window=0,
        degenerate=False,
    )
    logger.debug("Encaje en el toro: %d caras %s", len(faces), [f.size for f in faces])
    return TorusEmbedding(z, placed, rotation, faces)


def is_tiling(g: Graph, h: VanishingSubgroup) -> TilingVerdict:
    z = standard_point(g, h)
    try:
        embedding = torus_embedding(g, z, h.basis)
    except (VertexCollision, EdgeCrossing, EdgeDegenerate) as exc:
        return TilingVerdict(False, f"{type(exc).__name__}: {exc}", None)

    if len(embedding.faces) != g.betti_number - 1:
        return TilingVerdict(
            False,
            f"Euler: {len(embedding.faces)} caras, se esperaban {g.betti_number - 1}.",
            None,
        )
    if any(face.size < 3 for face in embedding.faces):
        return TilingVerdict(False, "Hay caras con menos de 3 lados.", None)
    return TilingVerdict(True, None, embedding)


def face_bound(g: Graph, rank: int) -> int:
    """
    Si H sale de una teselación, los bordes de `rank` de sus caras son una
    base. Las caras tienen >= 3 lados y suman 2e, así que ninguna cara de
    esa base pasa de 2e − 3 − 3·(rank − 1) lados.
    """
    return 2 * g.n_edges - 3 - 3 * max(rank - 1, 0)


def screen_tiling(g: Graph, h: VanishingSubgroup) -> Optional[TilingVerdict]:
    """Descarte por altura, sin geometría. None si no alcanza para decidir."""
    if h.rank == 0:
        return None
    report = height(h)
    bound = face_bound(g, h.rank)
    if report.optimal and report.height > bound:
        return TilingVerdict(
            False, f"Altura {report.height} > {bound}: ninguna base de bordes de caras alcanza.", None
        )
    return None


def fundamental_tiles(te: TorusEmbedding, h: VanishingSubgroup) -> Tuple[OneChain, ...]:
    g = h.graph
    chains = tuple(face.chain for face in te.faces)
    if len(chains) != h.rank + 1:
        raise BasisCheckFailed(
            f"Se esperaban {h.rank + 1} caras y hay {len(chains)}."
        )
    total = OneChain()
    for chain in chains:
        total = total + chain
    if not total.is_zero():
        raise BasisCheckFailed(f"La suma de los bordes no es cero: {total}.")
    basis_rows = [chain.to_vector(g) for chain in chains[:-1]]
    if hermite_normal_form(basis_rows) != h.hnf():
        raise BasisCheckFailed("Los bordes de las caras no generan H.")
    return chains


# ----------------------------
# Altura
# ----------------------------

def _combine(coefficients: Sequence[int], vectors: Sequence[Sequence[int]]) -> Tuple[int, ...]:
    size = len(vectors[0])
    return tuple(
        sum(c * vector[k] for c, vector in zip(coefficients, vectors)) for k in range(size)
    )


def _first_nonzero_positive(vector: Sequence[int]) -> bool:
    for value in vector:
        if value:
            return value > 0
    return False


def height(h: VanishingSubgroup, strict: bool = False) -> HeightReport:
    """
    Busca en H los elementos de norma ℓ¹ <= h(S0) (S0 la base dada) y el
    menor umbral t para el que r de ellos con norma <= t forman base.
    Si el rango o la caja superan la escala de escritorio se devuelve
    h(S0) con optimal = False.
    """
    rank = h.rank
    if rank == 0:
        return HeightReport(0, ())

    g = h.graph
    generators = h.generators
    bound = max(gen.norm_l1() for gen in generators)
    fallback = HeightReport(bound, generators, optimal=False)
    if rank > config.MAX_HEIGHT_RANK:
        if strict:
            raise RankTooLarge(f"Rango {rank} > {config.MAX_HEIGHT_RANK}; cota superior {bound}.")
        return fallback

    inverse = sympy.Matrix(gram_matrix(generators)).inv()
    limits = [
        math.isqrt(int(sympy.floor(bound * bound * inverse[i, i]))) for i in range(rank)
    ]
    if math.prod(2 * limit + 1 for limit in limits) > config.HEIGHT_CANDIDATE_CAP:
        if strict:
            raise RankTooLarge(f"La caja de búsqueda supera {config.HEIGHT_CANDIDATE_CAP}.")
        return fallback

    vectors = [gen.to_vector(g) for gen in generators]
    elements = []
    for coefficients in itertools.product(*(range(-l, l + 1) for l in limits)):
        if not _first_nonzero_positive(coefficients):
            continue
        element = _combine(coefficients, vectors)
        norm = sum(abs(x) for x in element)
        if norm <= bound:
            elements.append((norm, coefficients, element))
    elements.sort()

    tries = 0
    for threshold in sorted({norm for norm, _, _ in elements}):
        pool = [item for item in elements if item[0] <= threshold]
        for combo in itertools.combinations(pool, rank):
            if combo[-1][0] != threshold:
                continue
            tries += 1
            if tries > config.HEIGHT_CANDIDATE_CAP:
                return fallback
            if abs(determinant([item[1] for item in combo])) == 1:
                witness = tuple(OneChain.from_vector(g, item[2]) for item in combo)
                return HeightReport(threshold, witness)
    raise InternalError("La base dada no apareció en la búsqueda de altura.")




# ----------------------------
# Enumeración de subgrupos
# ----------------------------
#
# Rango 1 y 2 (b1 = 3 y 4) van vectorizados con numpy: un subgrupo de
# rango 2 es saturado sii los menores 2×2 de sus coordenadas tienen
# mcd 1, y esos menores (con signo fijo) lo identifican.

def _ball_size(dimension: int, radius: int) -> int:
    return sum(
        2 ** k * math.comb(dimension, k) * math.comb(radius, k)
        for k in range(min(dimension, radius) + 1)
    )


def _ball(dimension: int, radius: int) -> Iterator[Tuple[int, ...]]:
    if dimension == 0:
        yield ()
        return
    for head in range(-radius, radius + 1):
        for tail in _ball(dimension - 1, radius - abs(head)):
            yield (head,) + tail


def _short_cycles(hb: HomologyBasis, g: Graph, max_norm: int) -> List[Tuple[int, Tuple[int, ...], Tuple[int, ...]]]:
    """
    Ciclos α ≠ 0 con ‖α‖₁ <= max_norm, uno por par ±α, como
    (norma, coordenadas, vector en aristas). Las coordenadas son los
    coeficientes en las cuerdas, así que su norma ℓ¹ no supera ‖α‖₁.
    """
    if max_norm < 1:
        return []
    size = _ball_size(hb.rank, max_norm)
    if size > config.ENUMERATION_BUDGET:
        raise BudgetExceeded(
            f"Habría que revisar {size} ciclos (tope {config.ENUMERATION_BUDGET})."
        )
    vectors = [cycle.to_vector(g) for cycle in hb.cycles]
    found = []
    for coefficients in _ball(hb.rank, max_norm):
        if not _first_nonzero_positive(coefficients):
            continue
        element = _combine(coefficients, vectors)
        norm = sum(abs(x) for x in element)
        if norm <= max_norm:
            found.append((norm, coefficients, element))
    found.sort()
    return found


def _subsets(
    cycles: Sequence[Tuple[int, Tuple[int, ...], Tuple[int, ...]]],
    size: int,
    total_limit: Optional[int],
) -> Iterator[Tuple[int, ...]]:
    """Índices crecientes; con total_limit se poda por suma de normas."""
    if total_limit is None:
        yield from itertools.combinations(range(len(cycles)), size)
        return

    def extend(start: int, chosen: List[int], used: int) -> Iterator[Tuple[int, ...]]:
        if len(chosen) == size:
            yield tuple(chosen)
            return
        missing = size - len(chosen)
        for index in range(start, len(cycles)):
            if used + cycles[index][0] * missing > total_limit:
                break
            chosen.append(index)
            yield from extend(index + 1, chosen, used + cycles[index][0])
            chosen.pop()

    yield from extend(0, [], 0)


def _collect_subgroups(
    g: Graph,
    hb: HomologyBasis,
    max_norm: int,
    total_limit: Optional[int],
) -> List[VanishingSubgroup]:
    rank = hb.rank - 2
    if rank == 0:
        return [is_vanishing_subgroup(g, [], hb)]

    cycles = _short_cycles(hb, g, max_norm)
    if total_limit is None and math.comb(len(cycles), rank) > config.ENUMERATION_BUDGET:
        raise BudgetExceeded(
            f"{len(cycles)} ciclos dan {math.comb(len(cycles), rank)} subconjuntos "
            f"(tope {config.ENUMERATION_BUDGET})."
        )
    logger.debug("Ciclos con norma <= %d: %d", max_norm, len(cycles))

    found: Dict[HnfKey, VanishingSubgroup] = {}
    examined = 0
    for subset in _subsets(cycles, rank, total_limit):
        examined += 1
        if examined > config.ENUMERATION_BUDGET:
            raise BudgetExceeded(f"Más de {config.ENUMERATION_BUDGET} subconjuntos.")
        coordinates = [cycles[i][1] for i in subset]
        factors = smith_invariants(coordinates, cols=hb.rank)
        if len(factors) != rank or any(f != 1 for f in factors):
            continue
        rows = [cycles[i][2] for i in subset]
        key = hermite_normal_form(rows)
        if key not in found:
            generators = [OneChain.from_vector(g, row) for row in rows]
            found[key] = is_vanishing_subgroup(g, generators, hb)
    logger.debug("Subconjuntos revisados: %d, subgrupos distintos: %d", examined, len(found))
    return [found[key] for key in sorted(found)]


@dataclass(frozen=True)
class SubgroupTable:
    """
    Subgrupos que se anulan, uno por fila y ordenados por HNF.

    generators[k] es una base de la fila k (en coordenadas de aristas) y
    heights[k] su máxima norma ℓ¹; si optimal[k] esa base realiza la altura.
    """

    graph: Graph
    generators: np.ndarray  # (N, r, e)
    heights: np.ndarray     # (N,)
    optimal: np.ndarray     # (N,) bool
    hnf: np.ndarray         # (N, r, e)

    def __len__(self) -> int:
        return int(self.heights.shape[0])

    @property
    def rank(self) -> int:
        return int(self.generators.shape[1])

    def key(self, k: int) -> HnfKey:
        return tuple(tuple(int(x) for x in row) for row in self.hnf[k])

    def index_of(self, key: HnfKey) -> Optional[int]:
        target = np.array([x for row in key for x in row], dtype=np.int64)
        flat = self.hnf.reshape(len(self), -1)
        if flat.shape[1] != target.size:
            return None
        matches = np.flatnonzero((flat == target).all(axis=1))
        return int(matches[0]) if len(matches) else None

    def basis(self, k: int) -> Tuple[OneChain, ...]:
        return tuple(OneChain.from_vector(self.graph, row.tolist()) for row in self.generators[k])

    def subgroup(self, k: int, hb: Optional[HomologyBasis] = None) -> VanishingSubgroup:
        return is_vanishing_subgroup(self.graph, list(self.basis(k)), hb)

    def intersection_numbers(self) -> np.ndarray:
        """I(H) de cada fila: det de Gram de la base."""
        if self.rank == 0:
            return np.ones(len(self), dtype=np.int64)
        gram = np.einsum("kie,kje->kij", self.generators, self.generators, dtype=np.int64)
        if self.rank == 1:
            return gram[:, 0, 0]
        if self.rank == 2:
            return gram[:, 0, 0] * gram[:, 1, 1] - gram[:, 0, 1] ** 2
        return np.array([int(determinant(m.tolist())) for m in gram], dtype=np.int64)


def _sorted_table(
    g: Graph,
    generators: np.ndarray,
    heights: np.ndarray,
    optimal: np.ndarray,
    hnf: np.ndarray,
) -> SubgroupTable:
    flat = hnf.reshape(len(hnf), -1)
    order = np.lexsort(flat.T[::-1]) if flat.shape[1] else np.arange(len(hnf))
    return SubgroupTable(g, generators[order], heights[order], optimal[order], hnf[order])


def _cycle_arrays(
    cycles: Sequence[Tuple[int, Tuple[int, ...], Tuple[int, ...]]], b1: int, e: int
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    norms = np.array([c[0] for c in cycles], dtype=np.int64)
    coords = np.array([c[1] for c in cycles], dtype=np.int64).reshape(len(cycles), b1)
    edges = np.array([c[2] for c in cycles], dtype=np.int64).reshape(len(cycles), e)
    return norms, coords, edges


def _leading_sign(rows: np.ndarray) -> np.ndarray:
    """Signo de la primera entrada no nula de cada fila."""
    lead = rows[np.arange(len(rows)), np.argmax(rows != 0, axis=1)]
    return np.sign(lead)


def _extended_gcd(x: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(g, u, v) con u·x + v·y = g >= 0, elemento a elemento."""
    old_r, r = x.copy(), y.copy()
    old_u, u = np.ones_like(x), np.zeros_like(x)
    old_v, v = np.zeros_like(x), np.ones_like(x)
    while r.any():
        live = r != 0
        q = np.where(live, old_r // np.where(live, r, 1), 0)
        old_r, r = np.where(live, r, old_r), np.where(live, old_r - q * r, r)
        old_u, u = np.where(live, u, old_u), np.where(live, old_u - q * u, u)
        old_v, v = np.where(live, v, old_v), np.where(live, old_v - q * v, v)
    sign = np.where(old_r < 0, -1, 1)
    return old_r * sign, old_u * sign, old_v * sign


def _pair_hnf(first: np.ndarray, second: np.ndarray) -> np.ndarray:
    """HNF por filas de cada par (first[k], second[k]) de rango 2."""
    rows = np.arange(len(first))
    pivot = np.argmax((first != 0) | (second != 0), axis=1)
    x, y = first[rows, pivot], second[rows, pivot]
    g, u, v = _extended_gcd(x, y)
    top = u[:, None] * first + v[:, None] * second
    bottom = (-(y // g))[:, None] * first + (x // g)[:, None] * second
    bottom = bottom * _leading_sign(bottom)[:, None]
    second_pivot = np.argmax(bottom != 0, axis=1)
    top = top - (top[rows, second_pivot] // bottom[rows, second_pivot])[:, None] * bottom
    return np.stack([top, bottom], axis=1)


def _compact(values: np.ndarray, dtype: type) -> np.ndarray:
    """Baja a `dtype` si todos los valores entran; si no, deja int64."""
    if values.size and np.abs(values).max() > np.iinfo(dtype).max:
        return values
    return values.astype(dtype)


def _rank_one_table(g: Graph, hb: HomologyBasis, hmax: int) -> SubgroupTable:
    cycles = _short_cycles(hb, g, hmax)
    norms, coords, edges = _cycle_arrays(cycles, hb.rank, g.n_edges)
    keep = np.gcd.reduce(coords, axis=1) == 1 if len(cycles) else np.zeros(0, dtype=bool)
    edges, norms = edges[keep], norms[keep]
    hnf = edges * _leading_sign(edges)[:, None]
    return _sorted_table(
        g, edges[:, None, :], norms, np.ones(len(norms), dtype=bool), hnf[:, None, :]
    )


def _rank_two_table(g: Graph, hb: HomologyBasis, hmax: int) -> SubgroupTable:
    """
    Recorre los pares i < j de ciclos ordenados por norma. La primera vez
    que aparece una clave el par realiza la altura (= norma de j).
    """
    cycles = _short_cycles(hb, g, hmax)
    n = len(cycles)
    if n * (n - 1) // 2 > config.PAIR_BUDGET:
        raise BudgetExceeded(
            f"{n} ciclos dan {n * (n - 1) // 2} pares (tope {config.PAIR_BUDGET})."
        )
    norms, coords, edges = _cycle_arrays(cycles, hb.rank, g.n_edges)
    spread = 2 * int(np.abs(coords).max(initial=0)) ** 2
    base = 2 * spread + 1
    if base ** 6 >= 2 ** 63:
        raise BudgetExceeded(f"Coordenadas demasiado grandes para hmax = {hmax}.")
    powers = base ** np.arange(5, -1, -1, dtype=np.int64)
    minor_index = list(itertools.combinations(range(4), 2))

    keys, firsts, seconds = [], [], []
    for j in range(1, n):
        left, right = coords[:j], coords[j]
        minors = np.stack([left[:, r] * right[s] - left[:, s] * right[r] for r, s in minor_index], axis=1)
        primitive = np.flatnonzero(np.gcd.reduce(minors, axis=1) == 1)
        if not len(primitive):
            continue
        minors = minors[primitive]
        minors = minors * _leading_sign(minors)[:, None]
        keys.append((minors + spread) @ powers)
        firsts.append(primitive)
        seconds.append(np.full(len(primitive), j))
    if not keys:
        empty = np.zeros((0, 2, g.n_edges), dtype=np.int64)
        return SubgroupTable(g, empty, np.zeros(0, dtype=np.int64), np.zeros(0, dtype=bool), empty)

    _, index = np.unique(np.concatenate(keys), return_index=True)
    first = np.concatenate(firsts)[index]
    second = np.concatenate(seconds)[index]
    logger.debug("Pares primitivos: %d, subgrupos distintos: %d", sum(map(len, keys)), len(index))

    small = _compact(edges, np.int16)
    generators = np.stack([small[first], small[second]], axis=1)
    hnf = np.concatenate(
        [
            _compact(_pair_hnf(edges[first[chunk]], edges[second[chunk]]), np.int32)
            for chunk in np.array_split(np.arange(len(first)), max(1, len(first) // config.HNF_CHUNK))
        ]
    )
    return _sorted_table(
        g,
        generators,
        norms[second],
        np.ones(len(first), dtype=bool),
        hnf,
    )


def _table_from_subgroups(g: Graph, subgroups: Sequence[VanishingSubgroup]) -> SubgroupTable:
    """Tabla a partir de subgrupos sueltos; la altura sale de height()."""
    rank = subgroups[0].rank if subgroups else 0
    reports = [height(h) for h in subgroups]
    rows = [
        [chain.to_vector(g) for chain in report.witness_basis]
        for report in reports
    ]
    generators = np.array(rows, dtype=np.int64).reshape(len(subgroups), rank, g.n_edges)
    hnf = np.array(
        [[list(row) for row in h.hnf()] for h in subgroups], dtype=np.int64
    ).reshape(len(subgroups), rank, g.n_edges)
    heights = np.array([report.height for report in reports], dtype=np.int64)
    optimal = np.array([report.optimal for report in reports], dtype=bool)
    return _sorted_table(g, generators, heights, optimal, hnf)


def subgroup_table(g: Graph, hmax: int) -> SubgroupTable:
    """Todos los H con h(H) <= hmax, deduplicados y ordenados por HNF."""
    hb = homology_basis(g)
    rank = hb.rank - 2
    if rank == 0:
        empty = np.zeros((1, 0, g.n_edges), dtype=np.int64)
        return SubgroupTable(g, empty, np.zeros(1, dtype=np.int64), np.ones(1, dtype=bool), empty)
    if rank == 1:
        return _rank_one_table(g, hb, hmax)
    if rank == 2:
        return _rank_two_table(g, hb, hmax)
    return _table_from_subgroups(g, _collect_subgroups(g, hb, hmax, None))


def enumerate_vanishing_subgroups(g: Graph, hmax: int) -> List[VanishingSubgroup]:
    """Todos los H con h(H) <= hmax, ordenados por HNF."""
    hb = homology_basis(g)
    table = subgroup_table(g, hmax)
    return [table.subgroup(k, hb) for k in range(len(table))]


def tiling_candidates(g: Graph, hmax: Optional[int] = None) -> List[VanishingSubgroup]:
    """
    Subgrupos con una base de b−2 ciclos cuyas normas suman <= 2e − 3.
    Toda teselación está acá: los bordes de b−2 caras son una base y
    ‖ω(c_i)‖₁ <= k_i, con ∑ k_i = 2e y k_i >= 3; de ahí también la
    cota face_bound para cada ciclo.
    """
    hb = homology_basis(g)
    total_limit = 2 * g.n_edges - 3
    max_norm = face_bound(g, hb.rank - 2)
    if hmax is not None:
        max_norm = min(max_norm, hmax)
    return _collect_subgroups(g, hb, max_norm, total_limit)


# ----------------------------
# Censo
# ----------------------------

NOT_A_CANDIDATE = "Ninguna base cumple la cota de caras (2e − 3)."


@dataclass(frozen=True)
class CensusRow:
    hnf: HnfKey
    generators: Tuple[OneChain, ...]
    height: int
    height_optimal: bool
    d: int
    kappa: int
    i_h: int
    is_tiling: bool
    face_sizes: Tuple[int, ...]
    reason: Optional[str]

    def to_json(self) -> dict:
        return {
            "hnf": [list(row) for row in self.hnf],
            "generators": [chain.as_dict() for chain in self.generators],
            "height": self.height,
            "height_optimal": self.height_optimal,
            "D": self.d,
            "kappa": self.kappa,
            "I": self.i_h,
            "is_tiling": self.is_tiling,
            "face_sizes": list(self.face_sizes),
            "reason": self.reason,
        }


@dataclass(frozen=True)
class CensusReport:
    """
    Con tilings_only la tabla trae sólo los candidatos que teselan. En el
    censo completo la tabla tiene todos los subgrupos y las filas se arman
    recién al recorrerla (kagome con hmax = 18 pasa de cuatro millones).
    """

    hmax: int
    tilings_only: bool
    kappa: int
    table: SubgroupTable
    d: np.ndarray
    i_h: np.ndarray
    verdicts: Dict[HnfKey, TilingVerdict]

    @property
    def total(self) -> int:
        return len(self.table)

    @property
    def tiling_count(self) -> int:
        return len(self.tiling_keys)

    @property
    def tiling_keys(self) -> Set[HnfKey]:
        return {key for key, verdict in self.verdicts.items() if verdict.is_tiling}

    def row(self, k: int) -> CensusRow:
        key = self.table.key(k)
        verdict = self.verdicts.get(key)
        return CensusRow(
            hnf=key,
            generators=self.table.basis(k),
            height=int(self.table.heights[k]),
            height_optimal=bool(self.table.optimal[k]),
            d=int(self.d[k]),
            kappa=self.kappa,
            i_h=int(self.i_h[k]),
            is_tiling=bool(verdict and verdict.is_tiling),
            face_sizes=tuple(verdict.embedding.face_sizes) if verdict and verdict.embedding else (),
            reason=verdict.reason if verdict else NOT_A_CANDIDATE,
        )

    def iter_rows(self) -> Iterator[CensusRow]:
        for k in range(self.total):
            yield self.row(k)

    @property
    def rows(self) -> Tuple[CensusRow, ...]:
        return tuple(self.iter_rows())

    @property
    def tilings(self) -> Tuple[CensusRow, ...]:
        found = (self.table.index_of(key) for key in self.tiling_keys)
        return tuple(self.row(k) for k in sorted(k for k in found if k is not None))

    def to_json(self) -> dict:
        return {
            "hmax": self.hmax,
            "tilings_only": self.tilings_only,
            "total": self.total,
            "tiling_count": self.tiling_count,
            "rows": [row.to_json() for row in self.iter_rows()],
        }


def default_hmax(g: Graph) -> int:
    return config.CENSUS_HEIGHT_FACTOR * (g.betti_number - 1)


def _field_numbers(kappa: int, i_h: np.ndarray) -> np.ndarray:
    """D = parte libre de cuadrados de κ·I, factorizando cada I distinto una sola vez."""
    values, inverse = np.unique(i_h, return_inverse=True)
    fields = np.array([squarefree_part(kappa * int(v)) for v in values], dtype=np.int64)
    return fields[inverse.reshape(-1)]


def tiling_census(
    g: Graph,
    hmax: Optional[int] = None,
    tilings_only: bool = False,
    threads: Optional[int] = None,
) -> CensusReport:
    hmax = default_hmax(g) if hmax is None else hmax
    threads = threads or config.worker_count()
    kappa = tree_number(g)

    candidates = [h for h in tiling_candidates(g) if height(h).height <= hmax]
    logger.debug("Censo: %d candidatos, %d hilos", len(candidates), threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        verdicts = dict(zip((h.hnf() for h in candidates), pool.map(lambda h: is_tiling(g, h), candidates)))

    if tilings_only:
        tilings = [h for h in candidates if verdicts[h.hnf()].is_tiling]
        verdicts = {h.hnf(): verdicts[h.hnf()] for h in tilings}
        table = _table_from_subgroups(g, tilings)
    else:
        table = subgroup_table(g, hmax)
        logger.debug("Censo completo: %d subgrupos", len(table))

    i_h = table.intersection_numbers()
    return CensusReport(
        hmax=hmax,
        tilings_only=tilings_only,
        kappa=kappa,
        table=table,
        d=_field_numbers(kappa, i_h),
        i_h=i_h,
        verdicts=verdicts,
    )

# cristalq/services/realization.py
"""
Realización estándar de un cristal topológico 2D, en aritmética exacta.

Flujo:
  1. harmonic_basis: núcleo racional de las ecuaciones de Kirchhoff.
  2. wh_basis: se agregan las ecuaciones ∑ a_j z_j = 0 de cada generador
     de H; el resultado debe ser un plano (u, w).
  3. standard_point: z = u + τ·w con ∑ z² = 0; τ es la raíz con parte
     imaginaria positiva y vive en Q(√−D).
  4. period_lattice / energy / place: retículo de períodos, energía al
     cuadrado y vértices/segmentos en una ventana de traslaciones.

projection_point construye el mismo punto por la proyección ortogonal
sobre el complemento de H (base ortonormal de Gram–Schmidt).
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, Sequence, Tuple

import sympy

from cristalq.errors import (
    DegenerateQuadratic,
    DimensionNotTwo,
    InternalError,
    RankNotTwo,
    RealDiscriminant,
)
from cristalq.services.exact_arith import (
    QuadElem,
    collinear_overlap,
    common_denominator,
    common_field,
    cross_sign,
    format_rational,
    fraction_from_sympy,
    hermite_normal_form,
    planar_dot,
    squarefree_part,
)
from cristalq.services.graph_core import Graph, HomologyBasis, OneChain, homology_basis, root_paths
from cristalq.services.invariants import VanishingSubgroup

logger = logging.getLogger(__name__)

RationalVector = Tuple[Fraction, ...]


# ----------------------------
# Tipos
# ----------------------------

@dataclass(frozen=True)
class HarmonicBasis:
    basis: Tuple[RationalVector, ...]

    @property
    def dimension(self) -> int:
        return len(self.basis)


@dataclass(frozen=True)
class StandardPoint:
    """
    Representante proyectivo [z1, ..., zN] en Q(√−d), normalizado para
    que la primera coordenada no nula valga 1.
    """

    d: int
    coords: Tuple[QuadElem, ...]

    def conj(self) -> "StandardPoint":
        return StandardPoint(self.d, tuple(z.conj() for z in self.coords))

    def scaled(self, factor: QuadElem) -> "StandardPoint":
        """Mismo punto proyectivo, sin renormalizar."""
        return StandardPoint(self.d, tuple(z * factor for z in self.coords))

    def normalized(self) -> "StandardPoint":
        pivot = next(z for z in self.coords if not z.is_zero())
        return StandardPoint(self.d, tuple(z / pivot for z in self.coords))

    def same_projective_point(self, other: "StandardPoint", up_to_conjugation: bool = True) -> bool:
        mine = self.normalized().coords
        if mine == other.normalized().coords:
            return True
        return up_to_conjugation and mine == other.conj().normalized().coords

    def to_json(self) -> dict:
        return {
            "D": self.d,
            "coords": [
                {"a": format_rational(z.a), "b": format_rational(z.b)} for z in self.coords
            ],
        }


@dataclass(frozen=True)
class PeriodLattice:
    """
    ℤ-base (w1, w2) del grupo de períodos. covol_sq_times_4 es
    |w1·w̄2 − w2·w̄1|² = 4·(a1·b2 − a2·b1)²·D.
    """

    w1: QuadElem
    w2: QuadElem
    d: int

    @property
    def _det(self) -> Fraction:
        return self.w1.a * self.w2.b - self.w2.a * self.w1.b

    @property
    def covol_sq_times_4(self) -> Fraction:
        return 4 * self._det ** 2 * self.d

    @property
    def covolume_sq(self) -> Fraction:
        return self._det ** 2 * self.d

    def point(self, m: int, n: int) -> QuadElem:
        return self.w1 * m + self.w2 * n

    def reduced(self) -> "PeriodLattice":
        """
        El mismo retículo con base de Lagrange–Gauss: |w1| <= |w2| y
        |⟨w1, w2⟩| <= |w1|²/2. La HNF puede ser muy sesgada; las búsquedas
        de traslaciones usan siempre esta base.
        """
        u, v = self.w1, self.w2
        if v.norm_sq() < u.norm_sq():
            u, v = v, u
        while True:
            v = v - u * round(planar_dot(u, v, self.d) / u.norm_sq())
            if v.norm_sq() >= u.norm_sq():
                return PeriodLattice(u, v, self.d)
            u, v = v, u

    def to_json(self) -> dict:
        return {
            "w1": self.w1.to_json(),
            "w2": self.w2.to_json(),
            "covol_sq_times_4": format_rational(self.covol_sq_times_4),
        }


@dataclass(frozen=True)
class PlacedVertex:
    vertex: str
    shift: Tuple[int, int]
    position: QuadElem


@dataclass(frozen=True)
class PlacedSegment:
    edge: str
    shift: Tuple[int, int]
    start: QuadElem
    end: QuadElem


@dataclass(frozen=True)
class PlacedCrystal:
    base_positions: Dict[str, QuadElem]
    lattice: PeriodLattice
    vertices: Tuple[PlacedVertex, ...]
    segments: Tuple[PlacedSegment, ...]
    window: int
    degenerate: bool

    def to_json(self) -> dict:
        return {
            "window": self.window,
            "degenerate": self.degenerate,
            "lattice": self.lattice.to_json(),
            "base_positions": {
                vertex: position.to_json() for vertex, position in self.base_positions.items()
            },
            "vertices": [
                {"vertex": v.vertex, "shift": list(v.shift), "position": v.position.to_json()}
                for v in self.vertices
            ],
            "segments": [
                {
                    "edge": s.edge,
                    "shift": list(s.shift),
                    "start": s.start.to_json(),
                    "end": s.end.to_json(),
                }
                for s in self.segments
            ],
        }


# ----------------------------
# Álgebra lineal racional
# ----------------------------

def kirchhoff_rows(g: Graph) -> List[List[int]]:
    """
    Una fila por vértice: +1 por arista entrante, −1 por saliente.
    Los lazos dan 0.
    """
    rows = [[0] * g.n_edges for _ in g.vertices]
    for j, edge in enumerate(g.edges):
        rows[g.vertex_index(edge.terminus)][j] += 1
        rows[g.vertex_index(edge.origin)][j] -= 1
    return rows


def _nullspace(rows: Sequence[Sequence[int]], size: int) -> List[RationalVector]:
    matrix = sympy.Matrix(rows) if rows else sympy.zeros(1, size)
    return [
        tuple(fraction_from_sympy(x) for x in vector)
        for vector in matrix.nullspace()
    ]


def dot(x: Sequence, y: Sequence):
    total = 0
    for left, right in zip(x, y):
        total = total + left * right
    return total


def harmonic_basis(g: Graph) -> HarmonicBasis:
    basis = _nullspace(kirchhoff_rows(g), g.n_edges)
    if len(basis) != g.betti_number:
        raise InternalError(
            f"dim del espacio armónico = {len(basis)}, esperaba b1 = {g.betti_number}."
        )
    return HarmonicBasis(tuple(basis))


def wh_basis(g: Graph, h: VanishingSubgroup) -> Tuple[RationalVector, RationalVector]:
    rows = kirchhoff_rows(g) + [list(row) for row in h.edge_rows()]
    basis = _nullspace(rows, g.n_edges)
    if len(basis) != 2:
        raise DimensionNotTwo(
            f"El espacio de cocadenas que anulan H tiene dimensión {len(basis)}, no 2."
        )
    return basis[0], basis[1]


# ----------------------------
# Punto estándar
# ----------------------------

def _imaginary_root(numerator: Fraction, denominator: Fraction) -> Tuple[Fraction, int]:
    """
    Escribe √(−numerator/denominator) como c·√−D con D libre de cuadrados.
    Devuelve (c, D). Requiere un cociente positivo.
    """
    ratio = Fraction(numerator) / Fraction(denominator)
    top, bottom = ratio.numerator, ratio.denominator
    d = squarefree_part(top * bottom)
    k = math.isqrt(top * bottom // d)
    return Fraction(k, bottom), d


def _point_from_plane(u: RationalVector, w: RationalVector) -> StandardPoint:
    quad_a = dot(w, w)
    quad_b = 2 * dot(u, w)
    quad_c = dot(u, u)
    if quad_a == 0 and quad_b == 0:
        raise DegenerateQuadratic("La cuadrática en τ es idénticamente constante.")
    discriminant = 4 * quad_a * quad_c - quad_b * quad_b
    if quad_a == 0 or discriminant <= 0:
        raise RealDiscriminant("La cuadrática en τ tiene raíces reales.")

    imaginary, d = _imaginary_root(discriminant, 1)
    tau = QuadElem(-quad_b / (2 * quad_a), imaginary / (2 * quad_a), d)
    coords = tuple(QuadElem.rational(ui, d) + tau * wi for ui, wi in zip(u, w))
    logger.debug("τ = %s en Q(√−%d)", tau, d)
    return StandardPoint(d, coords).normalized()


def standard_point(g: Graph, h: VanishingSubgroup) -> StandardPoint:
    u, w = wh_basis(g, h)
    return _point_from_plane(u, w)


def projection_point(g: Graph, h: VanishingSubgroup) -> StandardPoint:
    """
    Misma realización por la otra vía: base ortonormal (p, q') del
    complemento ortogonal de H en los ciclos reales, z = p + i·(|p|/|q'|)·q'.
    """
    u, w = wh_basis(g, h)
    p = u
    q = tuple(wi - dot(w, p) / dot(p, p) * pi for wi, pi in zip(w, p))
    imaginary, d = _imaginary_root(dot(p, p), dot(q, q))
    coords = tuple(QuadElem(pi, imaginary * qi, d) for pi, qi in zip(p, q))
    return StandardPoint(d, coords).normalized()


def orthogonal_projection_matrix(g: Graph, h: VanishingSubgroup) -> List[List[Fraction]]:
    """Matriz N×N de la proyección ortogonal de C1(X0, ℝ) sobre H⊥ ∩ ciclos."""
    u, w = wh_basis(g, h)
    frame = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in col] for col in (u, w)]).T
    projector = frame * (frame.T * frame).inv() * frame.T
    return [[fraction_from_sympy(projector[i, j]) for j in range(g.n_edges)] for i in range(g.n_edges)]


def evaluate(coords: Sequence[QuadElem], chain: OneChain, g: Graph) -> QuadElem:
    """[z](α) = ∑ a_j z_j."""
    d = common_field(coords) or 1
    total = QuadElem.rational(0, d)
    for edge_id, coefficient in chain:
        total = total + coords[g.edge_index(edge_id)] * coefficient
    return total


# ----------------------------
# Verificaciones
# ----------------------------

def verify_harmonic(z: StandardPoint, g: Graph) -> bool:
    return all(
        dot(row, z.coords) == 0 for row in kirchhoff_rows(g)
    )


def verify_tight_frame(z: StandardPoint) -> bool:
    return dot(z.coords, z.coords) == 0


def annihilates(z: StandardPoint, h: VanishingSubgroup) -> bool:
    return all(evaluate(z.coords, gen, h.graph).is_zero() for gen in h.generators)


# ----------------------------
# Retículo de períodos y energía
# ----------------------------

def period_lattice(z: StandardPoint, hb: HomologyBasis, g: Graph) -> PeriodLattice:
    values = [evaluate(z.coords, cycle, g) for cycle in hb.cycles]
    scale = common_denominator([v.a for v in values] + [v.b for v in values])
    integer_rows = [(int(v.a * scale), int(v.b * scale)) for v in values]
    hnf = hermite_normal_form(integer_rows)
    if len(hnf) != 2:
        raise RankNotTwo(f"Los períodos generan un grupo de rango {len(hnf)}, no 2.")
    w1, w2 = (QuadElem(Fraction(a, scale), Fraction(b, scale), z.d) for a, b in hnf)
    return PeriodLattice(w1, w2, z.d)


def lattice_coordinates(pl: PeriodLattice, x: QuadElem) -> Tuple[Fraction, Fraction]:
    """(m, n) racionales con x = m·w1 + n·w2."""
    det = pl.w1.a * pl.w2.b - pl.w2.a * pl.w1.b
    m = (x.a * pl.w2.b - pl.w2.a * x.b) / det
    n = (pl.w1.a * x.b - x.a * pl.w1.b) / det
    return m, n


def energy(z: StandardPoint, pl: PeriodLattice) -> Fraction:
    """ℰ² = 4·(∑|z_i|²)² / vol(ℂ/T)²."""
    total = sum((c.norm_sq() for c in z.coords), Fraction(0))
    return 16 * total * total / pl.covol_sq_times_4


# ----------------------------
# Colocación
# ----------------------------

def base_positions(g: Graph, z: StandardPoint) -> Dict[str, QuadElem]:
    """Raíz del árbol en el origen; el resto sumando z por el árbol."""
    return {
        vertex: evaluate(z.coords, path, g)
        for vertex, path in root_paths(g).items()
    }


Box = Tuple[Fraction, Fraction, Fraction, Fraction]


def segment_box(pl: PeriodLattice, start: QuadElem, end: QuadElem) -> Box:
    """Caja (m_min, m_max, n_min, n_max) del segmento en coordenadas del retículo."""
    (m1, n1), (m2, n2) = lattice_coordinates(pl, start), lattice_coordinates(pl, end)
    return min(m1, m2), max(m1, m2), min(n1, n2), max(n1, n2)


def nearby_shifts(first: Box, second: Box) -> Iterator[Tuple[int, int]]:
    """Traslaciones (m, n) que llevan la segunda caja a tocar la primera."""
    for m in range(math.ceil(first[0] - second[1]), math.floor(first[1] - second[0]) + 1):
        for n in range(math.ceil(first[2] - second[3]), math.floor(first[3] - second[2]) + 1):
            yield m, n


def _has_collinear_overlap(
    g: Graph, z: StandardPoint, positions: Dict[str, QuadElem], pl: PeriodLattice
) -> bool:
    segments = []
    for index, edge in enumerate(g.edges):
        start = positions[edge.origin]
        end = start + z.coords[index]
        segments.append((z.coords[index], start, end, segment_box(pl, start, end)))

    for i, j in itertools.combinations_with_replacement(range(len(segments)), 2):
        vector_i, start_i, end_i, box_i = segments[i]
        vector_j, start_j, end_j, box_j = segments[j]
        if cross_sign(vector_i, vector_j, z.d):
            continue
        for shift in nearby_shifts(box_i, box_j):
            if i == j and shift == (0, 0):
                continue
            offset = pl.point(*shift)
            if collinear_overlap(start_i, end_i, start_j + offset, end_j + offset, z.d):
                return True
    return False


def _is_degenerate(g: Graph, z: StandardPoint, positions: Dict[str, QuadElem], pl: PeriodLattice) -> bool:
    """Aristas nulas, vértices que coinciden en el toro o aristas superpuestas sobre una recta."""
    if any(c.is_zero() for c in z.coords):
        return True
    reduced = pl.reduced()
    seen = set()
    for vertex in g.vertices:
        m, n = lattice_coordinates(reduced, positions[vertex])
        key = (m - math.floor(m), n - math.floor(n))
        if key in seen:
            return True
        seen.add(key)
    return _has_collinear_overlap(g, z, positions, reduced)


def place(g: Graph, z: StandardPoint, window: int, hb: HomologyBasis | None = None) -> PlacedCrystal:
    """
    Traslaciones (m, n) con |m|, |n| <= window de cada vértice base y un
    segmento por arista base por cada traslación de su origen.
    """
    hb = hb or homology_basis(g)
    pl = period_lattice(z, hb, g)
    positions = base_positions(g, z)
    shifts = [(m, n) for m in range(-window, window + 1) for n in range(-window, window + 1)]

    vertices = tuple(
        PlacedVertex(vertex, shift, positions[vertex] + pl.point(*shift))
        for shift in shifts
        for vertex in g.vertices
    )
    segments = []
    for shift in shifts:
        for index, edge in enumerate(g.edges):
            start = positions[edge.origin] + pl.point(*shift)
            segments.append(PlacedSegment(edge.id, shift, start, start + z.coords[index]))

    return PlacedCrystal(
        base_positions=positions,
        lattice=pl,
        vertices=vertices,
        segments=tuple(segments),
        window=window,
        degenerate=_is_degenerate(g, z, positions, pl),
    )

# cristalq/services/quadric.py
"""
La cuádrica Q(X0) y la recta L_H.

- quadric_presentation: ∑ z² = 0, relaciones de Kirchhoff (∑in = ∑out),
  relaciones del subgrupo y la forma reducida F = AᵗA sobre una ℤ-base
  de H1(X0, ℤ) (det F = κ).
- on_quadric / detect_field / point_to_realization: verificación exacta
  de puntos proyectivos dados por el usuario.
- secant_point: segunda intersección de una recta racional con la cuádrica.
- find_congruence: busca una ℤ-base de H1 cuya forma de Gram sea una
  forma dada.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import sympy

from cristalq.errors import (
    DegenerateRankOne,
    InvalidDirection,
    LineInQuadric,
    MixedFields,
    NotALine,
    NotOnQuadric,
)
from cristalq.services.exact_arith import (
    QuadElem,
    common_denominator,
    common_field,
    determinant,
    format_rational,
    integer_kernel,
)
from cristalq.services.graph_core import Graph, HomologyBasis, homology_basis
from cristalq.services.invariants import VanishingSubgroup, is_vanishing_subgroup
from cristalq.services.realization import StandardPoint, dot, evaluate, kirchhoff_rows

logger = logging.getLogger(__name__)

FieldTag = Union[int, str]  # D, "rational" o "mixed"


# ----------------------------
# Tipos
# ----------------------------

@dataclass(frozen=True)
class QuadricPresentation:
    n: int
    kirchhoff_rows: Tuple[Tuple[int, ...], ...]
    subgroup_rows: Tuple[Tuple[int, ...], ...]
    substitution: Tuple[Tuple[int, ...], ...]       # N×b: columnas = ciclos fundamentales
    reduced_form: Tuple[Tuple[Fraction, ...], ...]  # b×b

    @property
    def dimension(self) -> int:
        """Dimensión de la cuádrica proyectiva: b1 − 2."""
        return len(self.reduced_form) - 2

    def linear_rows(self) -> List[Tuple[int, ...]]:
        return list(self.kirchhoff_rows) + list(self.subgroup_rows)

    def equation_rows(self) -> List[Tuple[int, ...]]:
        """
        Filas a imprimir: sin filas nulas y sin repetir filas que
        coinciden salvo signo.
        """
        kept: List[Tuple[int, ...]] = []
        for row in self.linear_rows():
            if not any(row):
                continue
            negated = tuple(-x for x in row)
            if row in kept or negated in kept:
                continue
            kept.append(row)
        return kept

    def to_text(self, reduced: bool = False) -> str:
        lines = [" + ".join(f"z{i}^2" for i in range(1, self.n + 1)) + " = 0"]
        lines += [_format_relation(row) for row in self.equation_rows()]
        if reduced:
            lines.append("")
            lines.append("F = " + _format_form(self.reduced_form))
            for i, row in enumerate(self.substitution, start=1):
                lines.append(f"z{i} = " + _format_linear(row, "w"))
        return "\n".join(lines) + "\n"

    def to_json(self, reduced: bool = False) -> dict:
        payload: dict = {
            "n": self.n,
            "sum_of_squares": True,
            "kirchhoff": [list(row) for row in self.kirchhoff_rows],
            "subgroup": [list(row) for row in self.subgroup_rows],
            "equations": [_format_relation(row) for row in self.equation_rows()],
        }
        if reduced:
            payload["reduced_form"] = [
                [format_rational(x) for x in row] for row in self.reduced_form
            ]
            payload["substitution"] = [list(row) for row in self.substitution]
            payload["reduced_form_determinant"] = format_rational(
                reduced_form_determinant(self)
            )
        return payload


@dataclass(frozen=True)
class ProjectivePoint:
    coords: Tuple[QuadElem, ...]

    def normalized(self) -> "ProjectivePoint":
        pivot = next(z for z in self.coords if not z.is_zero())
        return ProjectivePoint(tuple(z / pivot for z in self.coords))

    def to_json(self) -> dict:
        field = common_field(self.coords) or 1
        return {
            "D": field,
            "coords": [
                {"a": format_rational(z.a), "b": format_rational(z.b)} for z in self.coords
            ],
        }


@dataclass(frozen=True)
class RecoveredRealization:
    point: StandardPoint
    subgroup: VanishingSubgroup


@dataclass(frozen=True)
class SecantPoint:
    point: ProjectivePoint
    tangent: bool


# ----------------------------
# Formato de texto
# ----------------------------

def _format_terms(terms: Sequence[Tuple[int, int]], symbol: str) -> str:
    if not terms:
        return "0"
    parts = []
    for index, coefficient in terms:
        name = f"{symbol}{index}"
        parts.append(name if coefficient == 1 else f"{coefficient}*{name}")
    return " + ".join(parts)


def _format_relation(row: Sequence[int]) -> str:
    """∑in = ∑out; si el lado izquierdo queda vacío se dan vuelta."""
    positive = [(i, c) for i, c in enumerate(row, start=1) if c > 0]
    negative = [(i, -c) for i, c in enumerate(row, start=1) if c < 0]
    if not positive:
        positive, negative = negative, positive
    return f"{_format_terms(positive, 'z')} = {_format_terms(negative, 'z')}"


def _format_linear(row: Sequence[int], symbol: str) -> str:
    text = ""
    for index, coefficient in enumerate(row, start=1):
        if not coefficient:
            continue
        magnitude = "" if abs(coefficient) == 1 else f"{abs(coefficient)}*"
        sign = "-" if coefficient < 0 else "+"
        text += f" {sign} {magnitude}{symbol}{index}"
    if not text:
        return "0"
    text = text.strip()
    return text[2:] if text.startswith("+ ") else "-" + text[2:]


def _format_form(form: Sequence[Sequence[Fraction]]) -> str:
    terms = []
    size = len(form)
    for i in range(size):
        for j in range(i, size):
            coefficient = form[i][j] if i == j else 2 * form[i][j]
            if not coefficient:
                continue
            monomial = f"w{i + 1}^2" if i == j else f"w{i + 1}*w{j + 1}"
            terms.append((coefficient, monomial))
    if not terms:
        return "0"
    text = ""
    for coefficient, monomial in terms:
        sign = "-" if coefficient < 0 else "+"
        magnitude = "" if abs(coefficient) == 1 else f"{abs(coefficient)}*"
        text += f" {sign} {magnitude}{monomial}"
    text = text.strip()
    return text[2:] if text.startswith("+ ") else "-" + text[2:]


# ----------------------------
# Presentación
# ----------------------------

def quadric_presentation(
    g: Graph,
    h: Optional[VanishingSubgroup] = None,
    hb: Optional[HomologyBasis] = None,
) -> QuadricPresentation:
    hb = hb or homology_basis(g)
    substitution = tuple(
        tuple(cycle.to_vector(g)[i] for cycle in hb.cycles) for i in range(g.n_edges)
    )
    columns = [cycle.to_vector(g) for cycle in hb.cycles]
    reduced = tuple(
        tuple(Fraction(dot(x, y)) for y in columns) for x in columns
    )
    return QuadricPresentation(
        n=g.n_edges,
        kirchhoff_rows=tuple(tuple(row) for row in kirchhoff_rows(g)),
        subgroup_rows=tuple(h.edge_rows()) if h is not None else (),
        substitution=substitution,
        reduced_form=reduced,
    )


def reduced_form_determinant(q: QuadricPresentation) -> Fraction:
    """Con la base de ciclos fundamentales coincide con κ(X0)."""
    return determinant(q.reduced_form)


def kirchhoff_rank(q: QuadricPresentation) -> int:
    return int(sympy.Matrix(q.kirchhoff_rows).rank()) if q.kirchhoff_rows else 0


def is_positive_definite(form: Sequence[Sequence[Fraction]]) -> bool:
    """Criterio de Sylvester: todos los menores principales líderes > 0."""
    return all(
        determinant([row[:k] for row in form[:k]]) > 0
        for k in range(1, len(form) + 1)
    )


# ----------------------------
# Puntos
# ----------------------------

def on_quadric(p: ProjectivePoint, q: QuadricPresentation) -> bool:
    if len(p.coords) != q.n or all(z.is_zero() for z in p.coords):
        return False
    try:
        if dot(p.coords, p.coords) != 0:
            return False
        return all(dot(row, p.coords) == 0 for row in q.linear_rows())
    except MixedFields:
        return False


def detect_field(p: ProjectivePoint) -> FieldTag:
    """D tal que todos los cocientes z_i/z_1 están en Q(√−D)."""
    if all(z.is_zero() for z in p.coords):
        return "rational"
    try:
        ratios = p.normalized().coords
        field = common_field(ratios)
    except MixedFields:
        return "mixed"
    return "rational" if field is None else field


def point_to_realization(p: ProjectivePoint, g: Graph) -> RecoveredRealization:
    """
    Cocadena de construcción z(e_i) = z_i y subgrupo H = Ker[z] ∩ H1(X0, ℤ),
    calculado como núcleo entero de la matriz 2×b de partes (a, b) de los
    períodos.
    """
    field = detect_field(p)
    if field == "mixed":
        raise MixedFields("Las coordenadas no comparten un mismo Q(√−D).")
    if field == "rational":
        raise DegenerateRankOne("Todas las coordenadas son múltiplos reales de una sola.")
    hb = homology_basis(g)
    if not on_quadric(p, quadric_presentation(g, hb=hb)):
        raise NotOnQuadric("El punto no satisface las ecuaciones de la cuádrica.")

    point = StandardPoint(int(field), p.normalized().coords)
    periods = [evaluate(point.coords, cycle, g) for cycle in hb.cycles]
    scale = common_denominator([v.a for v in periods] + [v.b for v in periods])
    value_rows = [
        [int(v.a * scale) for v in periods],
        [int(v.b * scale) for v in periods],
    ]
    kernel = integer_kernel(value_rows, cols=hb.rank)
    if len(kernel) != hb.rank - 2:
        raise DegenerateRankOne("Los períodos generan un grupo de rango menor que 2.")
    generators = [hb.from_coordinates(vector) for vector in kernel]
    subgroup = is_vanishing_subgroup(g, generators, hb)
    logger.debug("Subgrupo recuperado: %s", [str(gen) for gen in generators])
    return RecoveredRealization(point, subgroup)


def direction_from_weights(q: QuadricPresentation, weights: Sequence[int]) -> Tuple[Fraction, ...]:
    """Vector de ℍ a partir de coordenadas w en la base de ciclos."""
    return tuple(Fraction(dot(row, weights)) for row in q.substitution)


def secant_point(
    base: ProjectivePoint,
    direction: Sequence[Union[int, Fraction]],
    q: QuadricPresentation,
) -> SecantPoint:
    """
    Segunda raíz de ∑(base + t·dir)² = 0: como base está en la cuádrica,
    t = −2·⟨base, dir⟩ / ⟨dir, dir⟩.
    """
    direction = tuple(Fraction(x) for x in direction)
    if len(direction) != q.n or not any(direction):
        raise InvalidDirection("La dirección debe ser un vector no nulo de largo N.")
    if any(dot(row, direction) != 0 for row in q.linear_rows()):
        raise InvalidDirection("La dirección no cumple las relaciones lineales de la cuádrica.")
    if not on_quadric(base, q):
        raise NotOnQuadric("El punto base no está en la cuádrica.")

    coords = base.coords
    proportional = all(
        coords[i] * direction[j] == coords[j] * direction[i]
        for i, j in itertools.combinations(range(q.n), 2)
    )
    if proportional:
        raise NotALine("La dirección es proporcional al punto base.")

    linear = dot(coords, direction)
    quadratic = dot(direction, direction)
    if quadratic == 0:
        raise LineInQuadric("La recta está contenida en la cuádrica.")
    if linear == 0:
        return SecantPoint(base.normalized(), tangent=True)
    t = linear * Fraction(-2) / quadratic
    moved = tuple(z + t * x for z, x in zip(coords, direction))
    return SecantPoint(ProjectivePoint(moved).normalized(), tangent=False)


# ----------------------------
# Congruencia con una forma dada
# ----------------------------

def _vectors_of_norm(
    form: Sequence[Sequence[Fraction]],
    target: Fraction,
    inverse_diagonal: Sequence[Fraction],
) -> List[Tuple[int, ...]]:
    bounds = [math.isqrt(int(target * inv)) for inv in inverse_diagonal]
    size = len(form)
    found = []
    for vector in itertools.product(*(range(-b, b + 1) for b in bounds)):
        value = sum(
            form[i][j] * vector[i] * vector[j] for i in range(size) for j in range(size)
        )
        if value == target:
            found.append(vector)
    return found


def find_congruence(
    q: QuadricPresentation,
    target: Sequence[Sequence[int]],
) -> Optional[List[List[int]]]:
    """
    Busca c_1..c_b en ℤ^b con c_iᵗ F c_j = target_ij y det[c] = ±1.
    Devuelve la matriz de sustitución N×b (columnas = A·c_i) o None.
    """
    form = q.reduced_form
    size = len(form)
    if len(target) != size:
        return None
    target = [[Fraction(x) for x in row] for row in target]
    inverse = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in form]).inv()
    inverse_diagonal = [Fraction(int(inverse[i, i].p), int(inverse[i, i].q)) for i in range(size)]

    pools: Dict[Fraction, List[Tuple[int, ...]]] = {}
    for i in range(size):
        if target[i][i] not in pools:
            pools[target[i][i]] = _vectors_of_norm(form, target[i][i], inverse_diagonal)

    def pair(x: Sequence[int], y: Sequence[int]) -> Fraction:
        return sum(form[i][j] * x[i] * y[j] for i in range(size) for j in range(size))

    chosen: List[Tuple[int, ...]] = []

    def search(position: int) -> bool:
        if position == size:
            return abs(determinant(chosen)) == 1
        for candidate in pools[target[position][position]]:
            if all(pair(candidate, chosen[k]) == target[position][k] for k in range(position)):
                chosen.append(candidate)
                if search(position + 1):
                    return True
                chosen.pop()
        return False

    if not search(0):
        return None
    return [
        [sum(row[k] * c[k] for k in range(size)) for c in chosen]
        for row in q.substitution
    ]

# cristalq/services/invariants.py
"""
Invariantes de un grafo base y de un subgrupo que se anula:

- producto interno de 1-cadenas (coeficiente a coeficiente),
- número de árboles κ (cofactor del laplaciano, Bareiss exacto),
- determinante de intersección I(H) (Gram de una ℤ-base de H),
- D = parte libre de cuadrados de κ·I, volúmenes de Albanese al cuadrado
  y energía mínima al cuadrado 16·I/κ.

Volúmenes y energías se guardan al cuadrado para que sean racionales.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from cristalq.errors import NotACycle, NotDirectSummand, NotIndependent, WrongCorank
from cristalq.services.exact_arith import (
    determinant,
    format_rational,
    hermite_normal_form,
    rational_rank,
    smith_invariants,
    squarefree_part,
)
from cristalq.services.graph_core import Graph, HomologyBasis, OneChain, boundary, homology_basis

logger = logging.getLogger(__name__)


# ----------------------------
# Subgrupo que se anula
# ----------------------------

@dataclass(frozen=True)
class VanishingSubgroup:
    """
    Sumando directo H de H1(X0, ℤ) de corrango 2, dado por una ℤ-base.
    Sólo se construye a través de is_vanishing_subgroup.
    """

    generators: Tuple[OneChain, ...]
    graph: Graph
    basis: HomologyBasis

    @property
    def rank(self) -> int:
        return len(self.generators)

    def edge_rows(self) -> List[Tuple[int, ...]]:
        return [gen.to_vector(self.graph) for gen in self.generators]

    def coordinate_rows(self) -> List[Tuple[int, ...]]:
        return [self.basis.coordinates(gen) for gen in self.generators]

    def hnf(self) -> Tuple[Tuple[int, ...], ...]:
        """
        Clave canónica: HNF de la matriz de generadores en coordenadas de
        aristas. H es saturado, así que no hace falta saturar.
        """
        return hermite_normal_form(self.edge_rows())

    def to_json(self) -> List[Dict[str, int]]:
        return [gen.as_dict() for gen in self.generators]


def is_vanishing_subgroup(
    g: Graph,
    gens: Sequence[OneChain],
    basis: Optional[HomologyBasis] = None,
) -> VanishingSubgroup:
    """
    Controla, en este orden: ciclos, corrango 2, independencia lineal y
    sumando directo (factores de Smith todos iguales a 1).
    """
    basis = basis or homology_basis(g)
    gens = tuple(gens)

    for index, gen in enumerate(gens, start=1):
        if any(boundary(gen, g)):
            raise NotACycle(f"El generador #{index} ({gen}) no es un ciclo.")

    expected = basis.rank - 2
    if len(gens) != expected:
        raise WrongCorank(
            f"Se necesitan b1 − 2 = {expected} generadores; llegaron {len(gens)}."
        )

    coordinates = [basis.coordinates(gen) for gen in gens]
    if rational_rank(coordinates) < len(gens):
        raise NotIndependent("Los generadores no son linealmente independientes.")

    factors = smith_invariants(coordinates, cols=basis.rank)
    if any(factor != 1 for factor in factors):
        raise NotDirectSummand(
            f"El subgrupo no es sumando directo (factores de Smith {factors})."
        )

    return VanishingSubgroup(gens, g, basis)


# ----------------------------
# Invariantes numéricos
# ----------------------------

def chain_inner_product(a: OneChain, b: OneChain) -> int:
    other = b.as_dict()
    return sum(value * other.get(edge_id, 0) for edge_id, value in a)


def gram_matrix(chains: Sequence[OneChain]) -> List[List[int]]:
    return [[chain_inner_product(x, y) for y in chains] for x in chains]


def laplacian(g: Graph) -> List[List[int]]:
    """Laplaciano con multiplicidades; los lazos no aportan."""
    size = g.n_vertices
    matrix = [[0] * size for _ in range(size)]
    for edge in g.edges:
        if edge.is_loop:
            continue
        i, j = g.vertex_index(edge.origin), g.vertex_index(edge.terminus)
        matrix[i][i] += 1
        matrix[j][j] += 1
        matrix[i][j] -= 1
        matrix[j][i] -= 1
    return matrix


def tree_number(g: Graph) -> int:
    """κ(X0): cofactor (0, 0) del laplaciano."""
    minor = [row[1:] for row in laplacian(g)[1:]]
    value = determinant(minor)
    return int(value)


def intersection_determinant(h: VanishingSubgroup) -> int:
    """I(H) = det(⟨αi, αj⟩); vale 1 para la base vacía."""
    return int(determinant(gram_matrix(h.generators)))


@dataclass(frozen=True)
class InvariantReport:
    kappa: int
    i_h: int
    d: int
    b1: int
    vol_albanese_sq: Fraction
    vol_generalized_albanese_sq: Fraction
    min_energy_sq: Fraction

    def to_json(self) -> dict:
        return {
            "b1": self.b1,
            "kappa": self.kappa,
            "I": self.i_h,
            "D": self.d,
            "vol_albanese_sq": format_rational(self.vol_albanese_sq),
            "vol_generalized_albanese_sq": format_rational(self.vol_generalized_albanese_sq),
            "min_energy_sq": format_rational(self.min_energy_sq),
        }


def invariant_report(g: Graph, h: VanishingSubgroup) -> InvariantReport:
    kappa = tree_number(g)
    i_h = intersection_determinant(h)
    report = InvariantReport(
        kappa=kappa,
        i_h=i_h,
        d=squarefree_part(kappa * i_h),
        b1=h.basis.rank,
        vol_albanese_sq=Fraction(kappa),
        vol_generalized_albanese_sq=Fraction(kappa, i_h),
        min_energy_sq=Fraction(16 * i_h, kappa),
    )
    logger.debug("Invariantes: κ=%d I=%d D=%d", kappa, i_h, report.d)
    return report

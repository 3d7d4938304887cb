# cristalq/errors.py
"""
Jerarquía de errores de CristalQ.

- CrystalError: entrada inválida (grafo, subgrupo, punto, archivo). El CLI
  la traduce a código de salida 1.
- InternalError: se violó un invariante matemático. Siempre es un bug;
  el CLI la traduce a código de salida 2.
"""

from __future__ import annotations


class CrystalError(ValueError):
    """Base de todos los errores de entrada."""


class InternalError(AssertionError):
    """Un invariante que debería cumplirse siempre no se cumplió."""


# ----------------------------
# Grafo
# ----------------------------

class InvalidGraph(CrystalError):
    pass


class Disconnected(InvalidGraph):
    pass


class DegreeTooLow(InvalidGraph):
    def __init__(self, vertex: str, degree: int) -> None:
        super().__init__(
            f"El vértice '{vertex}' tiene grado {degree}; se necesita grado >= 3."
        )
        self.vertex = vertex
        self.degree = degree


class UnknownEdge(CrystalError):
    def __init__(self, edge_id: str) -> None:
        super().__init__(f"La arista '{edge_id}' no existe en el grafo.")
        self.edge_id = edge_id


# ----------------------------
# Subgrupos que se anulan
# ----------------------------

class NotACycle(CrystalError):
    pass


class WrongCorank(CrystalError):
    pass


class NotIndependent(CrystalError):
    pass


class NotDirectSummand(CrystalError):
    pass


# ----------------------------
# Aritmética exacta
# ----------------------------

class MixedFields(CrystalError):
    pass


class DivisionByZero(CrystalError, ZeroDivisionError):
    pass


class NonPositive(CrystalError):
    pass


# ----------------------------
# Realización
# ----------------------------

class DimensionNotTwo(CrystalError):
    pass


class DegenerateQuadratic(InternalError):
    pass


class RealDiscriminant(InternalError):
    pass


class RankNotTwo(CrystalError):
    pass


# ----------------------------
# Cuádrica
# ----------------------------

class NotOnQuadric(CrystalError):
    pass


class DegenerateRankOne(CrystalError):
    pass


class InvalidDirection(CrystalError):
    pass


class NotALine(CrystalError):
    pass


class LineInQuadric(CrystalError):
    pass


# ----------------------------
# Teselaciones
# ----------------------------

class VertexCollision(CrystalError):
    pass


class EdgeCrossing(CrystalError):
    pass


class EdgeDegenerate(CrystalError):
    pass


class BasisCheckFailed(InternalError):
    pass


class RankTooLarge(CrystalError):
    pass


class BudgetExceeded(CrystalError):
    pass


# ----------------------------
# Archivos
# ----------------------------

class InvalidFile(CrystalError):
    pass

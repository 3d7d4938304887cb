# cristalq/schemas.py
"""
Formatos de archivo de entrada (pydantic v2).

GraphFile:
    {"vertices": ["x", "y"],
     "edges": [{"id": "e1", "from": "x", "to": "y"}, ...],
     "vanishing_group": [{"e1": 1, "e2": -1}, ...]}     # opcional

PointFile:
    {"D": 3, "coords": [{"a": "1/1", "b": "0/1"}, ...]}

Las claves desconocidas y los coeficientes no enteros son errores; todo
error de validación sale como InvalidFile con la ruta del campo.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, StrictInt, ValidationError, field_validator

from cristalq.errors import InvalidFile
from cristalq.services.exact_arith import QuadElem, parse_rational
from cristalq.services.graph_core import Edge, Graph, OneChain
from cristalq.services.quadric import ProjectivePoint

RationalText = Union[StrictInt, str]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class EdgeEntry(_Strict):
    id: str
    origin: str = Field(alias="from")
    terminus: str = Field(alias="to")


class GraphFile(_Strict):
    vertices: List[str]
    edges: List[EdgeEntry]
    vanishing_group: Optional[List[Dict[str, StrictInt]]] = None


class CoordEntry(_Strict):
    a: RationalText
    b: RationalText = 0

    @field_validator("a", "b")
    @classmethod
    def _rational(cls, value: RationalText) -> RationalText:
        parse_rational(value)
        return value


class PointFile(_Strict):
    D: StrictInt = Field(ge=1)
    coords: List[CoordEntry] = Field(min_length=1)


# ----------------------------
# Lectura
# ----------------------------

def _describe(exc: ValidationError) -> str:
    problems = []
    for error in exc.errors():
        location = ".".join(str(part) for part in error["loc"]) or "(raíz)"
        problems.append(f"{location}: {error['msg']}")
    return "; ".join(problems)


def _read_json(path: Union[str, Path]) -> object:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InvalidFile(f"{path}: JSON inválido ({exc.msg}, línea {exc.lineno}).") from exc
    except OSError as exc:
        raise InvalidFile(f"No se pudo leer {path}: {exc.strerror}.") from exc


def parse_graph(payload: object) -> Tuple[Graph, Optional[List[OneChain]]]:
    try:
        document = GraphFile.model_validate(payload)
    except ValidationError as exc:
        raise InvalidFile(_describe(exc)) from exc

    graph = Graph(
        tuple(document.vertices),
        tuple(Edge(e.id, e.origin, e.terminus) for e in document.edges),
    )
    if document.vanishing_group is None:
        return graph, None

    generators = []
    for coefficients in document.vanishing_group:
        for edge_id in coefficients:
            graph.edge_index(edge_id)  # UnknownEdge si no existe
        generators.append(OneChain.from_mapping(coefficients))
    return graph, generators


def parse_point(payload: object) -> ProjectivePoint:
    try:
        document = PointFile.model_validate(payload)
    except ValidationError as exc:
        raise InvalidFile(_describe(exc)) from exc

    coords = tuple(
        QuadElem.from_radicand(parse_rational(c.a), parse_rational(c.b), document.D)
        for c in document.coords
    )
    if all(z.is_zero() for z in coords):
        raise InvalidFile("El punto tiene todas las coordenadas nulas.")
    return ProjectivePoint(coords)


def load_graph_file(path: Union[str, Path]) -> Tuple[Graph, Optional[List[OneChain]]]:
    return parse_graph(_read_json(path))


def load_point_file(path: Union[str, Path]) -> ProjectivePoint:
    return parse_point(_read_json(path))


# cristalq/router.py
"""
Router principal de CristalQ.

Cada subcomando del CLI termina en una función de este módulo:
  1. Lee y valida los archivos (cristalq.schemas).
  2. Llama a los servicios (graph_core, invariants, realization, quadric,
     tiling, plots).
  3. Devuelve algo listo para imprimir: un dict serializable a JSON, texto
     o la ruta de un archivo generado.

No imprime nada ni conoce códigos de salida: eso es cosa de cristalq.cli.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from cristalq import config
from cristalq.schemas import load_graph_file, load_point_file
from cristalq.services.exact_arith import format_rational
from cristalq.services.graph_core import Graph, HomologyBasis, homology_basis, validate
from cristalq.services.invariants import VanishingSubgroup, invariant_report, is_vanishing_subgroup
from cristalq.services.plots import render_png, render_svg
from cristalq.services.quadric import (
    detect_field,
    direction_from_weights,
    on_quadric,
    point_to_realization,
    quadric_presentation,
    secant_point,
)
from cristalq.services.realization import energy, period_lattice, place, standard_point
from cristalq.services.tiling import CensusReport, is_tiling, screen_tiling, tiling_census

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


# ----------------------------
# Helpers
# ----------------------------

@dataclass(frozen=True)
class Case:
    """Grafo validado, base de homología y (si hay) subgrupo validado."""

    graph: Graph
    basis: HomologyBasis
    subgroup: Optional[VanishingSubgroup]


def dump_json(payload: Any) -> str:
    """JSON estable: claves ordenadas, sangría fija y salto final."""
    return json.dumps(payload, sort_keys=True, indent=config.JSON_INDENT, ensure_ascii=False) + "\n"


def load_case(path: PathLike, require_subgroup: bool = True) -> Case:
    """
    Sin "vanishing_group" se toma H = 0, que sólo es válido si b1 = 2
    (si no, is_vanishing_subgroup lanza WrongCorank).
    """
    graph, generators = load_graph_file(path)
    validate(graph)
    basis = homology_basis(graph)
    if generators is None and not require_subgroup:
        return Case(graph, basis, None)
    subgroup = is_vanishing_subgroup(graph, generators or [], basis)
    logger.debug("Caso %s: b1=%d, rango de H=%d", path, basis.rank, subgroup.rank)
    return Case(graph, basis, subgroup)


# ----------------------------
# Subcomandos
# ----------------------------

def validate_file(path: PathLike) -> Dict[str, Any]:
    case = load_case(path, require_subgroup=False)
    return {
        "valid": True,
        "vertices": case.graph.n_vertices,
        "edges": case.graph.n_edges,
        "b1": case.basis.rank,
        "vanishing_group": case.subgroup.to_json() if case.subgroup else None,
    }


def invariants(path: PathLike) -> Dict[str, Any]:
    case = load_case(path)
    return invariant_report(case.graph, case.subgroup).to_json()


def realize(path: PathLike, window: int = config.DEFAULT_WINDOW_RADIUS) -> Dict[str, Any]:
    case = load_case(path)
    z = standard_point(case.graph, case.subgroup)
    lattice = period_lattice(z, case.basis, case.graph)
    crystal = place(case.graph, z, window, case.basis)
    verdict = screen_tiling(case.graph, case.subgroup) or is_tiling(case.graph, case.subgroup)

    payload = crystal.to_json()
    payload["point"] = z.to_json()
    payload["energy_sq"] = format_rational(energy(z, lattice))
    payload["tiling"] = {
        "is_tiling": verdict.is_tiling,
        "reason": verdict.reason,
        **(verdict.embedding.to_json() if verdict.embedding else {}),
    }
    return payload


def realize_drawing(
    path: PathLike,
    window: int = config.DEFAULT_WINDOW_RADIUS,
    fmt: str = "svg",
    show_lattice: bool = False,
) -> str:
    """SVG como texto, o la ruta del PNG generado."""
    case = load_case(path)
    z = standard_point(case.graph, case.subgroup)
    crystal = place(case.graph, z, window, case.basis)
    if fmt == "png":
        return render_png(crystal, base_name=Path(path).stem.split(".")[0], show_lattice=show_lattice)
    return render_svg(crystal, show_lattice=show_lattice)


def quadric(
    path: PathLike,
    reduced: bool = False,
    fmt: str = "text",
    with_subgroup: bool = False,
) -> Union[str, Dict[str, Any]]:
    """Q(X0); con with_subgroup se agregan las ecuaciones de la recta L_H."""
    case = load_case(path, require_subgroup=False)
    subgroup = case.subgroup if with_subgroup else None
    presentation = quadric_presentation(case.graph, subgroup, case.basis)
    if fmt == "json":
        return presentation.to_json(reduced=reduced)
    return presentation.to_text(reduced=reduced)


def verify_point(graph_path: PathLike, point_path: PathLike) -> Dict[str, Any]:
    """
    Veredicto sobre un punto dado: si está en la cuádrica, su cuerpo y,
    cuando corresponde, el subgrupo H recuperado.
    """
    case = load_case(graph_path, require_subgroup=False)
    point = load_point_file(point_path)
    presentation = quadric_presentation(case.graph, hb=case.basis)

    field = detect_field(point)
    verdict: Dict[str, Any] = {
        "on_quadric": on_quadric(point, presentation),
        "D": field,
    }
    if field == "rational":
        verdict["degenerate"] = "rank-one"
        return verdict
    if not verdict["on_quadric"] or field == "mixed":
        return verdict

    recovered = point_to_realization(point, case.graph)
    subgroup = recovered.subgroup
    verdict["point"] = recovered.point.to_json()
    verdict["recovered_H"] = subgroup.to_json()
    verdict["hnf"] = [list(row) for row in subgroup.hnf()]
    verdict["is_standard_realization"] = standard_point(case.graph, subgroup).same_projective_point(
        recovered.point
    )
    if case.subgroup is not None:
        verdict["matches_file_subgroup"] = subgroup.hnf() == case.subgroup.hnf()
    return verdict


def secant(
    graph_path: PathLike,
    point_path: PathLike,
    direction: Sequence[Union[int, Fraction]],
    weights: bool = False,
) -> Dict[str, Any]:
    """
    Segundo punto de la recta base + t·direction sobre la cuádrica.
    Con weights=True la dirección viene en coordenadas de la base de ciclos.
    """
    case = load_case(graph_path, require_subgroup=False)
    base = load_point_file(point_path)
    presentation = quadric_presentation(case.graph, hb=case.basis)
    vector = direction_from_weights(presentation, direction) if weights else direction
    result = secant_point(base, vector, presentation)
    return {
        "point": result.point.to_json(),
        "tangent": result.tangent,
        "D": detect_field(result.point),
    }


def census(
    path: PathLike,
    height: Optional[int] = None,
    tilings_only: bool = False,
) -> CensusReport:
    case = load_case(path, require_subgroup=False)
    return tiling_census(case.graph, hmax=height, tilings_only=tilings_only)


def census_table_rows(report: CensusReport) -> List[List[str]]:
    """Filas de texto para la tabla de rich."""
    rows = []
    for row in report.iter_rows():
        rows.append(
            [
                " ".join(str(list(r)) for r in row.hnf) or "0",
                str(row.height) + ("" if row.height_optimal else "*"),
                str(row.d),
                str(row.kappa),
                str(row.i_h),
                "sí" if row.is_tiling else "no",
                ",".join(str(k) for k in row.face_sizes),
            ]
        )
    return rows

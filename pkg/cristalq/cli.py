# cristalq/cli.py
"""
Interfaz de línea de comandos de CristalQ.

Subcomandos: validate, invariants, realize, quadric, verify-point,
secant y census. La salida de máquina (JSON, SVG, ecuaciones) va a stdout
o a --output; los mensajes de log van a stderr con rich.

Códigos de salida:
  0  todo bien
  1  entrada inválida (CrystalError, flags o archivos inexistentes)
  2  error interno (InternalError: se violó un invariante, es un bug)
"""

from __future__ import annotations

import functools
import logging
import sys
from pathlib import Path
from typing import Callable, List, Optional, Sequence

import click
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from cristalq import config, router
from cristalq.errors import CrystalError, InternalError
from cristalq.services.exact_arith import parse_rational

logger = logging.getLogger("cristalq")

GRAPH_FILE = click.Path(exists=True, dir_okay=False, path_type=Path)


# ---------------------------
# Helpers
# ---------------------------

def _setup_logging(verbose: bool) -> None:
    handler = RichHandler(console=Console(stderr=True), show_path=False, show_time=False)
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[handler],
        force=True,
    )


def _emit(text: str, output: Optional[Path]) -> None:
    if output is None:
        click.echo(text, nl=False)
        return
    output.write_text(text, encoding="utf-8")
    logger.info("Salida escrita en %s", output)


def handle_errors(command: Callable) -> Callable:
    """
    Traduce los errores del dominio a códigos de salida y deja un mensaje
    "<Clase>: <mensaje>" en stderr.
    """

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            return command(*args, **kwargs)
        except CrystalError as exc:
            click.echo(f"{type(exc).__name__}: {exc}", err=True)
            ctx.exit(config.EXIT_INVALID_INPUT)
        except InternalError as exc:
            click.echo(f"Error interno ({type(exc).__name__}): {exc}", err=True)
            ctx.exit(config.EXIT_INTERNAL)

    return wrapper


def _parse_direction(text: str) -> List:
    return [parse_rational(part) for part in text.split(",") if part.strip()]


# ---------------------------
# Comandos
# ---------------------------

@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--verbose", is_flag=True, help="Log en nivel DEBUG.")
@click.version_option(config.TOOL_VERSION, prog_name=config.TOOL_NAME)
def main(verbose: bool) -> None:
    """CristalQ: realizaciones estándar exactas de cristales topológicos 2D."""
    _setup_logging(verbose)


@main.command()
@click.argument("graph", type=GRAPH_FILE)
@handle_errors
def validate(graph: Path) -> None:
    """Valida el grafo y, si viene, el subgrupo que se anula."""
    _emit(router.dump_json(router.validate_file(graph)), None)


@main.command()
@click.argument("graph", type=GRAPH_FILE)
@click.option("--output", "-o", type=click.Path(dir_okay=False, path_type=Path))
@handle_errors
def invariants(graph: Path, output: Optional[Path]) -> None:
    """κ, I(H), D, volúmenes y energía mínima (al cuadrado)."""
    _emit(router.dump_json(router.invariants(graph)), output)


@main.command()
@click.argument("graph", type=GRAPH_FILE)
@click.option("--window", type=click.IntRange(min=0), default=config.DEFAULT_WINDOW_RADIUS, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["json", "svg", "png"]), default="json", show_default=True)
@click.option("--show-lattice", is_flag=True, help="Dibuja la base del retículo de períodos.")
@click.option("--output", "-o", type=click.Path(dir_okay=False, path_type=Path))
@handle_errors
def realize(graph: Path, window: int, fmt: str, show_lattice: bool, output: Optional[Path]) -> None:
    """Punto estándar, retículo de períodos y colocación en una ventana."""
    if fmt == "json":
        _emit(router.dump_json(router.realize(graph, window)), output)
    elif fmt == "svg":
        _emit(router.realize_drawing(graph, window, "svg", show_lattice), output)
    else:
        click.echo(router.realize_drawing(graph, window, "png", show_lattice))


@main.command()
@click.argument("graph", type=GRAPH_FILE)
@click.option("--reduced", is_flag=True, help="Agrega la forma F y la sustitución z = A·w.")
@click.option("--with-subgroup", is_flag=True, help="Agrega las ecuaciones de H (recta L_H).")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False, path_type=Path))
@handle_errors
def quadric(graph: Path, reduced: bool, with_subgroup: bool, fmt: str, output: Optional[Path]) -> None:
    """Ecuaciones de la cuádrica Q(X0)."""
    result = router.quadric(graph, reduced=reduced, fmt=fmt, with_subgroup=with_subgroup)
    _emit(router.dump_json(result) if fmt == "json" else result, output)


@main.command("verify-point")
@click.argument("graph", type=GRAPH_FILE)
@click.argument("point", type=GRAPH_FILE)
@handle_errors
def verify_point(graph: Path, point: Path) -> None:
    """Verifica un punto proyectivo y recupera su subgrupo H."""
    _emit(router.dump_json(router.verify_point(graph, point)), None)


@main.command()
@click.argument("graph", type=GRAPH_FILE)
@click.argument("point", type=GRAPH_FILE)
@click.option("--direction", required=True, help='Vector separado por comas, ej. "1,-1,0".')
@click.option("--weights", is_flag=True, help="La dirección está en la base de ciclos.")
@handle_errors
def secant(graph: Path, point: Path, direction: str, weights: bool) -> None:
    """Otro punto de la cuádrica por una recta secante racional."""
    vector = _parse_direction(direction)
    _emit(router.dump_json(router.secant(graph, point, vector, weights=weights)), None)


@main.command()
@click.argument("graph", type=GRAPH_FILE)
@click.option("--height", type=click.IntRange(min=1), default=None, help="hmax (por defecto 6·(b1 − 1)).")
@click.option("--tilings-only", is_flag=True, help="Sólo candidatos a teselación (más rápido).")
@click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="json", show_default=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False, path_type=Path))
@handle_errors
def census(graph: Path, height: Optional[int], tilings_only: bool, fmt: str, output: Optional[Path]) -> None:
    """Subgrupos que se anulan de altura acotada y cuáles dan teselaciones."""
    report = router.census(graph, height=height, tilings_only=tilings_only)
    if fmt == "json":
        _emit(router.dump_json(report.to_json()), output)
        return

    table = Table(title=f"Censo (hmax={report.hmax}): {report.tiling_count}/{report.total} teselaciones")
    for column in ("HNF de H", "h(H)", "D", "κ", "I", "tesela", "caras"):
        table.add_column(column)
    for row in router.census_table_rows(report):
        table.add_row(*row)
    Console().print(table)


# ---------------------------
# Entrada
# ---------------------------

def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Corre el CLI y devuelve el código de salida. Los errores de uso de
    click (flags desconocidos, archivos que no existen) salen con 1.
    """
    try:
        result = main.main(args=list(argv) if argv is not None else None, prog_name="cristalq", standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        return config.EXIT_INVALID_INPUT
    except click.Abort:
        return config.EXIT_INVALID_INPUT
    return result if isinstance(result, int) else config.EXIT_OK


if __name__ == "__main__":
    sys.exit(run())

# cristalq/config.py
"""
Topes, códigos de salida y parámetros de dibujo de CristalQ.
Los servicios leen de acá los límites de búsqueda del censo y de la
altura; el CLI, los códigos de salida.

Las variables de entorno (CRYSTAL_THREADS, CRYSTAL_OUT_DIR) se leen
desde un .env si existe, igual que el resto de la configuración local.
"""

from __future__ import annotations

import os

from dotenv import load_dotenv, find_dotenv

load_dotenv(find_dotenv(usecwd=True))

# Identidad de la herramienta
TOOL_NAME = "CristalQ"
TOOL_VERSION = "1.0"

# Carpeta para guardar PNGs (se puede pisar con CRYSTAL_OUT_DIR)
OUT_DIR_NAME = "out"

# Códigos de salida del CLI
EXIT_OK = 0
EXIT_INVALID_INPUT = 1
EXIT_INTERNAL = 2

# Realización / colocación
DEFAULT_WINDOW_RADIUS = 1

# Búsquedas acotadas (altura, enumeración de subgrupos)
HEIGHT_CANDIDATE_CAP = 1_000_000
MAX_HEIGHT_RANK = 4            # rango máximo de H para buscar la altura exacta
ENUMERATION_BUDGET = 1_000_000  # subconjuntos candidatos antes de BudgetExceeded
CENSUS_HEIGHT_FACTOR = 6       # hmax por defecto = 6 * (b1 - 1)
PAIR_BUDGET = 20_000_000        # pares de ciclos en el censo de rango 2
HNF_CHUNK = 500_000             # filas por tanda al calcular HNF con numpy

# Salida JSON / SVG
JSON_INDENT = 2
SVG_SIGNIFICANT_DIGITS = 12
SVG_MARGIN_RATIO = 0.05
SVG_VERTEX_RADIUS_RATIO = 0.012  # radio de los discos, relativo al ancho
PNG_DPI = 160


def worker_count() -> int:
    """
    Cantidad de hilos para clasificar subgrupos en el censo.
    Lee CRYSTAL_THREADS; cualquier valor inválido o < 1 se toma como 1.
    """
    raw_value = os.getenv("CRYSTAL_THREADS", "1").strip()
    try:
        threads = int(raw_value)
    except ValueError:
        return 1
    return max(threads, 1)


def output_dir() -> str:
    """Carpeta donde se guardan los PNG (CRYSTAL_OUT_DIR o ./out)."""
    return os.getenv("CRYSTAL_OUT_DIR", OUT_DIR_NAME)

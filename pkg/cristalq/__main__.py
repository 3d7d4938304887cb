# cristalq/__main__.py
"""Permite correr `python -m cristalq ...`."""

import sys

from cristalq.cli import run

sys.exit(run())

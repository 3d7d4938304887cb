# cristalq/__init__.py
"""CristalQ: realizaciones estándar exactas de cristales topológicos 2D."""

from cristalq.config import TOOL_VERSION as __version__  # noqa: F401

"""
fblab - numerical laboratory for the exterior p-Laplacian free boundary problem
"""

__version__ = "0.1.0"

from .main import cli  # noqa: F401

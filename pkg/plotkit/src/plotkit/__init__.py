"""Deterministic vector-figure rendering for nsg probe tables."""

from .figures import (
    DEFAULT_SCALES,
    FIGURE_KINDS,
    REQUIRED_COLUMNS,
    FigureSpec,
    RenderError,
    render,
)

__all__ = [
    "DEFAULT_SCALES",
    "FIGURE_KINDS",
    "REQUIRED_COLUMNS",
    "FigureSpec",
    "RenderError",
    "render",
]

__version__ = "0.1.0"

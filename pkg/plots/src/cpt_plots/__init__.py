"""Figure rendering for the dark-resonance cavity simulator's CSV tables."""

from .figures import (
    SCHEMAS,
    FigureSpec,
    SchemaError,
    read_table,
    render,
    render_figure,
    validate_columns,
)

__version__ = "0.1.0"

__all__ = [
    "SCHEMAS",
    "FigureSpec",
    "SchemaError",
    "read_table",
    "render",
    "render_figure",
    "validate_columns",
    "__version__",
]

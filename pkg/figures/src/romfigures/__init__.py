"""Figure rendering for eulerrom reports and binary artifacts."""

from .readers import SchemaError
from .render import KINDS, render

__all__ = ["KINDS", "SchemaError", "render"]

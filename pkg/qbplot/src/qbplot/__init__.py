"""Render qbsim CSV artifacts as SVG figures.

Communicates with the simulator only through its CSV files; nothing in
this package imports the simulator.
"""
from .readers import SCHEMAS, SchemaError, read_table
from .render import KINDS, render

__all__ = ["KINDS", "SCHEMAS", "SchemaError", "read_table", "render"]
__version__ = "0.1.0"

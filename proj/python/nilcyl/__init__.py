"""Periodic potentials, closing conditions and Sym surfaces in Nil3 and L3."""

from ._nilcyl import (
    Error,
    balance_radius,
    closing_report,
    curves,
    iwasawa,
    preset_names,
    run,
    signed_area,
    surface,
    twisted_circle_area,
    twisted_circle_radius,
)

__all__ = [
    "Error",
    "balance_radius",
    "closing_report",
    "curves",
    "iwasawa",
    "preset_names",
    "run",
    "signed_area",
    "surface",
    "twisted_circle_area",
    "twisted_circle_radius",
]

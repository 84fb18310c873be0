"""Exact embedding of ICN and traditional core-network slices onto a virtualized EPC substrate."""

__version__ = "0.1.0"

"""Compile QAOA-MaxCut circuits onto nearest-neighbour hardware as temporal plans."""

__version__ = "0.1.0"

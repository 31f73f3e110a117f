"""Algebraic machinery for building BP from E-infinity cells: dual Steenrod
comodules, cobar complexes, Dyer-Lashof operations and the Kunneth spectral
sequence for cell attachments."""

__version__ = "0.1.0"

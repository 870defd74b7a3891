"""Exact periods of tropical 1-cycles on wall structures.

The package is organised bottom-up:

``exact``     exact scalars, integer lattices, multiplicative values
``series``    truncated graded series with log/exp, factorisation, normalisation
``scene``     affine complexes with kinks, gluing data and parallel transport
``walls``     walls, slabs, wall crossing and consistency checks
``amoeba``    complement orders, numeric Ronkin integrals, raster plots
``cycles``    tropical cycles, normalization, crossings, twisted homology
``period``    the pairings and the assembled period
``cli``       command line front end
"""
from __future__ import annotations

__version__ = "0.1.0"

"""Equidistant sets on triangulated Alexandrov surfaces.

Pipeline: build a surface, compute geodesic distance fields to two disjoint
focal sets, extract the equidistant set as an embedded 1-complex, and run
structural checks (wedge/bisector geometry, separation, cycle rank bounds,
length and box-counting dimension estimates).
"""

__version__ = "0.1.0"

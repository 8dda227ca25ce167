"""Quantum state discrimination toolkit.

Submodules:
  linalg          dense Hermitian kernel (eigendecompositions, trace norms,
                  tensor products, partial traces)
  angular         exact SU(2) combinatorics and block decompositions
  discrimination  known-state binary discrimination and Chernoff distances
  programmable    programmable discrimination machines and error margins
  learning        learning machines, estimate-and-discriminate, seeds
  reading         coherent-state quantum reading
  povmdec         decomposition of POVMs into extremal measurements
  cli             command-line interface
"""

from . import (  # noqa: F401
    angular,
    discrimination,
    learning,
    linalg,
    povmdec,
    programmable,
    reading,
)

__all__ = [
    "angular",
    "discrimination",
    "learning",
    "linalg",
    "povmdec",
    "programmable",
    "reading",
]

__version__ = "0.1.0"

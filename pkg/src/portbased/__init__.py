"""Port-based teleportation in the Gelfand-Tsetlin basis.

Representation theory of the partially transposed permutation algebra,
the pretty good measurement and its dilations, circuit synthesis, and
resource states.
"""

__version__ = "0.1.0"

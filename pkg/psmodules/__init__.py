"""Pre-Schreier refinement checks for modules over small commutative domains."""

__version__ = "0.1.0"

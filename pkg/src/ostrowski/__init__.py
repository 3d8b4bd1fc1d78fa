"""Pólya groups of quadratic fields and Ostrowski quotients of elliptic curves.

Exact arithmetic throughout: forms and units for the class-group side, rational
points and Tate's algorithm for the elliptic-curve side, and a chain of order
formulas that decides on exactness of the global-to-local sequence.
"""

from .errors import OstrowskiError

__version__ = "0.1.0"

__all__ = ["OstrowskiError", "__version__"]

"""Finite relational G-sets as a modal category: subobject lattices and
the diamond operator, law checks, quotients and disjoint unions, a modal
first-order language with its semantics and proof checker, and a
counterpart harness over finite classical models."""

from pathlib import Path

DATA = Path(__file__).parent / "data"

__version__ = "0.1.0"

"""Interactive knowledge-based evolutionary multi-objective optimization.

Mines inter-variable rules (constants, power laws, equalities,
inequalities) from the evolving non-dominated set, lets a decision
maker rank or exclude them, and repairs offspring through variable
relation graph traversal to speed up convergence.
"""

__version__ = "0.1.0"

from .kernels import BACKEND as kernel_backend  # noqa: F401

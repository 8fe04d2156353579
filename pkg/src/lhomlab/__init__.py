"""List homomorphism lab: exact solvers for restricted instance classes,
hardness reductions with verified gadgets, and an exhaustive oracle."""

from .errors import BudgetExceeded, InvalidInput, LabError, PreconditionError
from .graph import Graph
from .instance import EdgeInstance, Instance
from .oracle import solve_brute
from .target import TargetGraph

__version__ = "0.1.0"

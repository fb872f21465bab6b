"""Classical simulation of finite-group lattice gauge theories with matter.

The package covers two model families on small lattices:

* a pure-gauge / Higgs-coupled cyclic-group model on a periodic 2x2
  square lattice, and
* a quaternion-group chain with staggered fermionic matter.

Both come with a gate-level state-vector simulator, an exact sparse
evolution oracle, observable extraction, state preparation routines,
and gate/pulse resource estimates.
"""

from .circuits import ChainModel, Circuit, SquareModel
from .errors import (
    InvalidParameterError,
    NumericFailureError,
    UnsupportedFeatureError,
)
from .gates import RESOURCE_CLASSES, GateOp
from .groups import CyclicGroup, FiniteGroup, QuaternionGroup, make_group
from .register import Register
from .resources import (
    ResourceReport,
    count_gates,
    fidelity_estimate,
    pulse_estimate,
    step_budget,
)

__all__ = [
    "InvalidParameterError",
    "NumericFailureError",
    "UnsupportedFeatureError",
    "CyclicGroup",
    "FiniteGroup",
    "QuaternionGroup",
    "make_group",
    "Circuit",
    "SquareModel",
    "ChainModel",
    "GateOp",
    "RESOURCE_CLASSES",
    "Register",
    "ResourceReport",
    "count_gates",
    "fidelity_estimate",
    "pulse_estimate",
    "step_budget",
]

__version__ = "0.1.0"

"""
Master-equation package.

Exact Liouville (states) and Heisenberg (observables) evolution of the
hybrid system, reductions and expectation values. Serves as the oracle
for trajectory ensembles.
"""

from master.block_form import (
    block_heisenberg_rhs,
    block_liouville_rhs,
    conditional_expectation,
    coupling_matrix,
    from_block,
    to_block,
)
from master.integrator import integrate_heisenberg, integrate_master
from master.liouville import heisenberg_rhs, liouville_rhs
from master.states import (
    HybridDensityState,
    HybridObservable,
    classical_observable,
    expectation,
    from_components,
    identity_observable,
    pointer_observable,
    pure_product,
    purity,
    quantum_observable,
    reduce_classical,
    reduce_quantum,
)

__all__ = [
    "HybridDensityState",
    "HybridObservable",
    "block_heisenberg_rhs",
    "block_liouville_rhs",
    "classical_observable",
    "conditional_expectation",
    "coupling_matrix",
    "expectation",
    "from_block",
    "from_components",
    "heisenberg_rhs",
    "identity_observable",
    "integrate_heisenberg",
    "integrate_master",
    "liouville_rhs",
    "pointer_observable",
    "pure_product",
    "purity",
    "quantum_observable",
    "reduce_classical",
    "reduce_quantum",
    "to_block",
]

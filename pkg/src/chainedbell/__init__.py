"""Chained d-outcome Bell functionals, local-fraction bounds and no-signalling monogamy."""

from .boxes import (
    BipartiteBox,
    BoxFormatError,
    NoSignallingReport,
    ScenarioSpec,
    SignallingError,
    ValidationResult,
    load_box,
    marginal_alice,
    marginal_bob,
    no_signalling_violation,
    save_box,
    uniform_box,
    validate_box,
)
from .functionals import (
    ChainedReport,
    SideOrder,
    algebraic_minimum,
    chained_value,
    i2_value,
    local_bound,
    modular_expectation,
)
from .lhv import (
    DeterministicStrategy,
    LocalFractionBound,
    lhv_minimum,
    local_fraction_bound,
    simulation_bits_bound,
    strategy_box,
)
from .monogamy import (
    LPProblem,
    LPSolution,
    lp_max_marginal,
    proof_chain_check,
    theorem_bound,
    verify_theorem,
)
from .quantum import (
    alice_basis,
    asymptotic_value,
    bob_basis,
    closed_form_probability,
    gamma_coefficient,
    joint_probability,
    maximally_entangled_state,
    noisy_quantum_box,
    quantum_box,
)

__version__ = "0.1.0"

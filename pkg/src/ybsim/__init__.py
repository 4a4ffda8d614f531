"""Unitary Yang-Baxter gates, braid circuits and their classical simulation."""

from .braid import BraidWord, Circuit, Op, braid_to_circuit, parse_braid, parse_circuit
from .clifford import (
    CliffordCircuit,
    Observable,
    PauliElement,
    ProductState,
    conjugate_pauli,
    dense_expectation,
    expectation,
    s4t_clifford,
)
from .errors import (
    BraidParseError,
    ConstraintError,
    GateMismatchError,
    InputError,
    OracleCapError,
    PropertyGError,
    YbsimError,
)
from .mc_sim import AmplitudeEstimate, estimate_amplitude, exact_mean
from .solutions import (
    FamilyParams,
    R4Gate,
    YbNormalForm,
    build_commuting_swap_solution,
    build_diagonal_solution,
    build_family,
    check_property_g,
)
from .ybe import TwoQuditGate, check_aybe, check_qybe

__version__ = "0.1.0"

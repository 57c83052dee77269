"""Communication-assisted local-hidden-variable model of GHZ correlations.

The package pairs a hidden-variable table (one entry per qubit and
measurement basis, evolved through the GHZ-creating H/CNOT circuit) with
an n-2-bit sign-correction protocol, and checks every prediction against
an independent stabilizer oracle.
"""

from .pauli import (
    DimensionError,
    PauliParseError,
    PauliProduct,
    commutes,
    format_pauli,
    from_letters,
    identity,
    multiply,
    parse_pauli,
    support,
)
from .prediction import PredictionKind
from .circuits import Gate, cnot, ghz_circuit, h, parse_circuit, read_circuit
from .stabilizer import (
    StabilizerTableau,
    ghz_classify,
    ghz_generators,
    ghz_tableau,
    joint_distribution,
    tableau_classify,
    tableau_from_circuit,
)
from .lhv import (
    CnotConsistencyError,
    LhvEntry,
    LhvTable,
    ModelPrediction,
    apply_circuit,
    apply_cnot,
    apply_gate,
    apply_hadamard,
    discard_i,
    entry_eval,
    entry_mul,
    ghz_table,
    hidden_samples,
    initial_table,
    local_outcome,
    predict_joint,
    sample_from_index,
    xyz_phase,
)
from .protocol import (
    SubsetSettings,
    SubsetTrialRecord,
    TrialRecord,
    flip_decision,
    induced_product,
    measured_qubits,
    parse_settings,
    run_protocol,
    run_subset_protocol,
    subset_flip_decision,
    subset_settings,
)
from .optimality import (
    CommGraph,
    InsufficiencyWitness,
    SubsetOperators,
    build_subset_operators,
    component_count,
    components,
    insufficiency_witness,
    mermin_lhv_values,
    mermin_quantum_value,
)
from .verify import (
    SampleReport,
    VerificationReport,
    sample_trials,
    verify_correlations,
    verify_products,
    verify_subsets,
)

__version__ = "0.1.0"

"""Classical capacity laboratory for a two-sender quantum multiple-access channel."""
from .coding import (
    Codebook,
    codeword,
    conditional_product_state,
    error_probability,
    first_stage_povm,
    random_code_average,
    second_stage_pgm,
    typical_projector,
    typicality_report,
)
from .converse import codebook_entropies, converse_bounds
from .ensemble import (
    SignalEnsemble,
    classical_ensemble,
    conditional_density,
    joint_density,
    two_basis_example,
    validate_ensemble,
)
from .entropy import (
    EntropyProfile,
    conditional_entropies,
    holevo_information,
    shannon_entropy,
    ssa_witness_check,
    von_neumann_entropy,
)
from .linalg import eig_hermitian, func_on_support, partial_trace, tensor_product
from .region import (
    RatePair,
    RateRegion,
    SamplerPlan,
    contains,
    hull_convergence,
    pentagon,
    region_union,
    time_share,
)
from .superdense import (
    SchmidtState,
    entanglement_entropy,
    superdense_bounds,
    pauli_ensemble,
    superdense_ensemble,
)

__version__ = "0.1.0"

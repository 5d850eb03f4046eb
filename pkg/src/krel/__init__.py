"""krel: numerics for linear relations in doubled spaces with an indefinite metric.

The package computes with linear relations (possibly multivalued operators)
between finite-dimensional complex spaces, classifies boundary relations as
isometric or unitary with respect to the canonical second-Pauli metric,
evaluates their boundary-image families together with three independent
adjoint computations, verifies dissipativity, symmetry and analyticity, and
reproduces a finite-rank singular perturbation of a diagonal operator at
controllable truncation levels.
"""

__version__ = "0.1.0"

from .subspaces import (
    Subspace,
    SubspaceComparison,
    combine,
    compare,
    complement,
    containment_residual,
    kernel,
    set_tol_scale,
    span,
    tol_scale,
)
from .relations import (
    DissipativityReport,
    EigenPair,
    LinearRelation,
    adjoint,
    apply_to_subspace,
    componentwise_sum,
    compose,
    dissipative_class,
    dom,
    eigenspace,
    full_relation,
    graph_of_matrix,
    identity_relation,
    inverse,
    ker,
    make_relation,
    mul,
    operator_matrix,
    part,
    ran,
    relations_equal,
    shift,
    zero_relation,
)
from .krein import (
    BoundaryPair,
    Classification,
    KreinSpec,
    SignatureRealizationError,
    augment_multivalued,
    classify,
    green_residual,
    identity_pair,
    j_metric,
    krein_adjoint,
    krein_adjoint_via_hilbert,
    pauli_doubled,
    random_isometric,
    random_unitary,
)
from .weyl import (
    DELTA_IMAG,
    DefectDecomposition,
    GridError,
    NevanlinnaReport,
    NevanlinnaRow,
    RealAxisError,
    SimplicityProbe,
    WeylReport,
    cr_residual,
    defect_decomposition,
    gamma_restrict,
    mul_invariant,
    nevanlinna_verify,
    resolvent_matrix,
    simplicity_probe,
    weyl_adjoint_three_ways,
    weyl_family,
    weyl_operator_matrix,
)
from .model import (
    DESK_GRID,
    DESK_POINTS,
    DESK_PROBE,
    AdjointConsistency,
    ConvergenceRow,
    ConvergenceTable,
    DomainMembershipError,
    DomainOverlapError,
    ExplicitRestriction,
    IllConditionedGramError,
    ModelAssembly,
    SpectralModel,
    SpectrumCollisionError,
    TailSignature,
    adjoint_consistency,
    apply_perturbed,
    assemble,
    boundary_form_residual,
    boundary_values,
    deficiency_combination,
    deficiency_matrix,
    desk_model,
    explicit_gamma_z,
    gram_at,
    gram_matrix,
    inverse_quadratic_tail,
    lagrange_weights,
    model_weyl_evaluator,
    multipliers,
    r_matrix,
    random_domain_samples,
    tail_signature,
    truncate,
    weyl_vs_r,
)
from .verify import (
    STANDARD_GRID,
    CheckResult,
    CorpusEntry,
    VerificationReport,
    check_pair,
    corpus,
    run_verification,
)

"""symkoop: Koopman operator approximation for symmetric dynamical systems.

Fit a finite-dimensional Koopman operator on one invariant set from
trajectory data, then transport it to every symmetry-related set by
conjugation with the induced feature-space representation of the group
element, and assemble the verified global block-diagonal operator.
"""

from .dictionaries import (
    CustomDictionary,
    FeatureRepresentation,
    IdentityDictionary,
    MonomialDictionary,
    TransformedDictionary,
    dictionary_from_spec,
    induced_representation,
    lift,
)
from .dynamics import (
    SnapshotPairs,
    SystemDef,
    Trajectory,
    hamiltonian_energy,
    load_trajectory,
    make_system,
    merge_snapshots,
    save_trajectory,
    simulate,
    snapshots,
    step,
    vector_field,
)
from .equivariant import (
    GlobalKoopman,
    InvariantSetRegistry,
    assemble_global,
    commutator_norm,
    data_stabilizer_labels,
    global_predict,
    load_global,
    load_registry,
    save_global,
    save_registry,
    transport_case1,
    transport_case2,
    verify_commutation,
    verify_conjugation,
    verify_invariant_set_image,
)
from .errors import (
    ConfigurationError,
    DegenerateDataError,
    DictionaryNotClosedError,
    InputError,
    IsotropyRequiredError,
    NonFiniteGroupError,
    NumericalDivergenceError,
    SymkoopError,
)
from .groups import (
    FiniteMatrixGroup,
    GroupElement,
    IsotropyReport,
    act_on_function,
    act_on_state,
    builtin_group,
    check_axioms,
    check_equivariance,
    conjugate_isotropy,
    generate_group,
    isotropy_set,
    load_group,
    save_group,
    transform_snapshots,
    transform_trajectory,
)
from .koopman import (
    KoopmanApprox,
    Spectrum,
    eigenfunction_eval,
    eigenvalue_hausdorff,
    fit_edmd,
    fit_snapshots,
    fit_trajectory,
    load_operator,
    predict,
    save_operator,
    spectrum,
)

__version__ = "0.1.0"

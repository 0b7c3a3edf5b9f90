"""polyslot: holes in circuits — supermaps, combs, polyslots, and time-loop-free composition."""

from .tensor import (
    WireType,
    Morphism,
    Tolerance,
    DEFAULT_TOL,
    UNIT,
    wire,
    identity,
    compose,
    tensor,
    dagger,
    braid,
    permute_factors,
    cup,
    cap,
    contract_wire,
    approx_eq,
    max_entry_diff,
    morphism_to_json,
    morphism_from_json,
)
from .categories import (
    CategoryTag,
    ChoiMatrix,
    is_unitary,
    unitarity_defect,
    choi_of_kraus,
    choi_of_unitary,
    kraus_of_choi,
    is_cptp,
    cptp_defect,
    apply_channel,
    haar_unitary,
    random_cptp_kraus,
)
from .pathing import (
    PathConstraint,
    PathWitness,
    check_no_path_unitary,
    extract_witness,
    reassemble,
    contract_path,
)
from .supermap import (
    HigherObject,
    InternalSupermap,
    FunctionSupermap,
    VerificationReport,
    apply,
    fix_slots,
    verify,
    identity_supermap,
    seqcomp_supermap,
    pair_supermap,
    discard_reprepare_supermap,
    loop_rejection_demo,
)
from .comb import (
    Comb,
    SrepSupermap,
    apply_comb,
    compose_combs,
    comb_to_internal,
    slot_to_comb,
    srep_apply,
    srep_check,
    identity_comb,
    random_unitary_comb,
)
from .lat import (
    Lat,
    lat_from_comb,
    lat_from_internal,
    s_loop,
    s_v,
    check_naturality,
    check_slot_commutation,
    interchange_failure_demo,
)
from .polycat import (
    PolyTerm,
    make_term,
    unit_term,
    term_from_internal,
    term_from_comb,
    term_tensor,
    compose_along,
    sym_action,
    evaluate,
    check_associativity,
)
from .switch import (
    Control,
    standard_control,
    build_switch,
    build_n_switch,
    switch_comb,
    switch_closed_form,
)
from .fixtures import regen_fixtures, check_fixtures
from . import errors

__version__ = "0.1.0"

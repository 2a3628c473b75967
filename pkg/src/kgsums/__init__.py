"""Kloosterman and Gauss sums over arbitrary moduli, weighted bilinear
forms with independent evaluation paths, exact congruence-solution
counting, and an empirical bound-measurement harness."""

from .bilinear import (
    CharWeightVector,
    DyadicSet,
    Interval,
    WeightVector,
    bilinear_gauss,
    bilinear_generalized,
    bilinear_kloosterman,
    dyadic_decomposition,
    dyadic_partition,
    gamma_sum,
    make_weights,
    moment_check,
    representative,
)
from .bounds import (
    BOUND_NAMES,
    REGION_VERTICES,
    BoundSpec,
    bfkmm_condition,
    bound_value,
    improvement_region,
    region_slacks,
)
from .counting import (
    CountTable,
    dyadic_average,
    j2_reference_ratio,
    jr_congruence,
    jr_equation,
    product_table,
    reciprocal_table,
    rr_congruence,
    rr_equation,
)
from .csvio import (
    CSV_HEADER,
    RunPlan,
    default_plan,
    emit_csv,
    load_config,
    parse_csv,
    render_csv,
    save_config,
)
from .errors import (
    ConfigError,
    DomainRestriction,
    InvalidWeight,
    KgsumsError,
    ModulusMismatch,
    NotAUnit,
    ResourceLimit,
    VerificationError,
)
from .experiments import (
    ExperimentRecord,
    average_sweep,
    build_char_weight_vector,
    build_weight_vector,
    exceptional_budget,
    max_kloosterman_abs,
    run_experiment,
)
from .expsums import (
    DirichletCharacter,
    SumResult,
    char_eval,
    char_values,
    character,
    characters,
    gauss,
    gauss_row,
    kloosterman,
    kloosterman_row,
    primitive_characters,
    weil_ratio,
)
from .modmath import (
    MACHINE_EPS,
    Modulus,
    UnitGroupComponent,
    UnitGroupStructure,
    dist_q,
    eq_exp,
    factorize,
    inverse_table,
    iter_unit_exponents,
    mod_inv,
    unit_group,
    unit_mask,
    unit_residues,
)
from .prng import SplitMix64, derive_seed

__version__ = "0.1.0"

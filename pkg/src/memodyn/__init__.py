"""memodyn: memory-element oscillator models, their Newtonian reformulations,
rms-equivalent linear one-ports, and an op-amp realization emitter."""

__version__ = "0.1.0"

from .memelement import (
    MemElementKind,
    MemElementSpec,
    Polynomial,
    eval_g,
    eval_G,
    quadratic_g,
    simulate_element,
)
from .circuits import (
    AugmentedState,
    CanonicalChuaParams,
    MmoParams,
    RegularChuaParams,
    default_mmo_params,
    linear_system_matrix,
    params_from_json,
    params_to_json,
    physical_fast,
)
from .integrator import (
    IntegratorOptions,
    Trajectory,
    cumulative_integral,
    integrate,
    resample,
)
from .analysis import (
    LoopQuantities,
    PeriodEstimate,
    analysis_report,
    action_series,
    classify_mmo,
    closure_defect,
    detect_period,
    extract_period,
    loop_integral,
    refine_cycle,
    signature_string,
    table_quantities,
)
from .newtonian import (
    ForceContext,
    ResidualReport,
    derivative_chain,
    force_canonical_chua,
    force_context,
    force_mmo_w,
    force_mmo_x,
    force_mmo_y,
    force_mmo_z,
    force_regular_chua,
    force_residual,
    jounce_characteristic_coefficients,
    jounce_residual_canonical,
    jounce_residual_mmo,
    reconstruct_w_from_x,
    reconstruct_w_from_y,
    reconstruct_w_from_z,
    verify_all,
)
from .equivalence import (
    EquivalentGC,
    EquivalentRL,
    admittance_magnitude,
    gc_equivalent,
    impedance_magnitude,
    rl_equivalent,
)
from .netlist import (
    NetlistSpec,
    component_values,
    emit_netlist,
    estimated_period,
    parse_netlist,
    write_netlist,
)

__all__ = [name for name in dir() if not name.startswith("_")]

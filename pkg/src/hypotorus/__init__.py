"""Global hypoellipticity analysis for time-periodic evolution systems.

The central object is a system of m commuting operators

    L_r = D_{t_r} + (a_r + i b_r)(t_r) P(x, D_x),    r = 1, ..., m,

acting on the torus-times-plane T^m x R^n, where P is globally elliptic
(model case: the harmonic oscillator) and a_r, b_r are real-valued
2pi-periodic coefficients.  The package decides, up to explicit search
bounds, whether the system is globally hypoelliptic in time-periodic
Gelfand-Shilov regularity, and produces machine-checkable certificates:

* sign profiles of the imaginary parts b_r (condition I),
* Diophantine reports for the averaged real parts (condition II),
* infinite resonance families (zero sets of the time-independent symbol),
* explicit singular solutions (non-hypoellipticity witnesses).
"""

from hypotorus.spectrum import (
    OperatorMeta,
    EigenvalueProvider,
    CustomTable,
    CustomFormula,
    harmonic_oscillator,
    ho_eigenvalue,
    enumerate_eigenvalues,
    fit_weyl_exponent,
    load_table_csv,
)
from hypotorus.torus import (
    PeriodicFunction,
    SignProfile,
    SignClass,
    GevreyBump,
    RunningIntegralExtremum,
    average,
    antiderivative_centered,
    sign_profile,
    running_extremum,
    make_bump,
    fit_gevrey_decay,
)
from hypotorus.coeffs import (
    CoefficientField,
    FieldContext,
    DecayProfile,
    DecayClass,
    PartialField,
    classify_field,
    to_partial,
    from_partial,
    check_partial_decay,
    field_to_csv,
    field_from_csv,
)
from hypotorus.system import (
    SystemSpec,
    SymbolValue,
    ZeroSetReport,
    symbol,
    scan_zero_set,
    resonance_sets,
)
from hypotorus.diophantine import (
    DiophantineQuery,
    DiophantineReport,
    check_condition,
    torus_distance_scan,
    continued_fraction_oracle,
)
from hypotorus.conjugation import (
    NormalFormData,
    Direction,
    build_normal_form,
    apply_psi,
    verify_conjugation,
)
from hypotorus.solver import (
    ModeProblem,
    Formula,
    ThetaFactors,
    SolveReport,
    ResonantModeError,
    theta_factors,
    solve_mode,
    solve_system,
    residual,
)
from hypotorus.witness import (
    SingularWitness,
    WitnessKind,
    WitnessVerification,
    WitnessPreconditionError,
    witness_infinite_zero_set,
    witness_symbol_decay,
    witness_sign_change,
    witness_mixed,
)
from hypotorus.classify import (
    Verdict,
    Outcome,
    classify,
    single_equation_rule,
    reduce_and_classify,
)
from hypotorus.specfile import (
    LoadedSpec,
    SpecFileError,
    load_spec,
    parse_spec_dict,
)

__version__ = "0.1.0"

__all__ = [
    "OperatorMeta", "EigenvalueProvider", "CustomTable", "CustomFormula",
    "harmonic_oscillator", "ho_eigenvalue", "enumerate_eigenvalues",
    "fit_weyl_exponent", "load_table_csv",
    "PeriodicFunction", "SignProfile", "SignClass", "GevreyBump",
    "RunningIntegralExtremum", "average", "antiderivative_centered",
    "sign_profile", "running_extremum", "make_bump", "fit_gevrey_decay",
    "CoefficientField", "FieldContext", "DecayProfile", "DecayClass",
    "PartialField", "classify_field", "to_partial", "from_partial",
    "check_partial_decay", "field_to_csv", "field_from_csv",
    "SystemSpec", "SymbolValue", "ZeroSetReport", "symbol",
    "scan_zero_set", "resonance_sets",
    "DiophantineQuery", "DiophantineReport", "check_condition",
    "torus_distance_scan", "continued_fraction_oracle",
    "NormalFormData", "Direction", "build_normal_form", "apply_psi",
    "verify_conjugation",
    "ModeProblem", "Formula", "ThetaFactors", "SolveReport",
    "ResonantModeError", "theta_factors", "solve_mode", "solve_system",
    "residual",
    "SingularWitness", "WitnessKind", "WitnessVerification",
    "WitnessPreconditionError", "witness_infinite_zero_set",
    "witness_symbol_decay", "witness_sign_change", "witness_mixed",
    "Verdict", "Outcome", "classify", "single_equation_rule",
    "reduce_and_classify",
    "LoadedSpec", "SpecFileError", "load_spec", "parse_spec_dict",
    "__version__",
]

"""Exact arithmetic toolkit for permutations induced by Kronecker sequences."""

from .cfkit import (
    ABOVE,
    BELOW,
    PHI_FRAC,
    PI_CF_TABLE,
    SQRT2,
    CertifiedAlpha,
    CFStream,
    Convergent,
    EnsembleConfig,
    check_determinant_identity,
    check_palindrome_pq_biconditional,
    convergents,
    gauss_kuzmin_mass,
    gauss_kuzmin_stream,
    hurwitz_scan,
    is_palindrome_prefix,
    parse_alpha_spec,
)
from .errors import KronpermError
from .permutations import (
    CycleSignature,
    ExchangeCertificate,
    Permutation,
    build_pi_auto,
    build_pi_exact,
    build_pi_modular,
    cycle_decompose,
    exchange_check,
    invert,
    signature_of,
    signature_report,
)
from .surd import CFExpansion, QuadraticSurd, parse_surd_literal
from .theorems import (
    FixedPointFamily,
    StructureVerdict,
    cassini_check,
    classify_structure,
    fixed_point_completeness_scan,
    predicted_fixed_points,
    two_candidate_check,
    verify_fibonacci_theorem,
    verify_palindrome_proposition,
    verify_quadratic_theorem,
)

__version__ = "0.1.0"

__all__ = [
    "ABOVE",
    "BELOW",
    "PHI_FRAC",
    "PI_CF_TABLE",
    "SQRT2",
    "CFExpansion",
    "CFStream",
    "CertifiedAlpha",
    "Convergent",
    "CycleSignature",
    "EnsembleConfig",
    "ExchangeCertificate",
    "FixedPointFamily",
    "KronpermError",
    "Permutation",
    "QuadraticSurd",
    "StructureVerdict",
    "build_pi_auto",
    "build_pi_exact",
    "build_pi_modular",
    "cassini_check",
    "check_determinant_identity",
    "check_palindrome_pq_biconditional",
    "classify_structure",
    "convergents",
    "cycle_decompose",
    "exchange_check",
    "fixed_point_completeness_scan",
    "gauss_kuzmin_mass",
    "gauss_kuzmin_stream",
    "hurwitz_scan",
    "invert",
    "is_palindrome_prefix",
    "parse_alpha_spec",
    "parse_surd_literal",
    "predicted_fixed_points",
    "signature_of",
    "signature_report",
    "two_candidate_check",
    "verify_fibonacci_theorem",
    "verify_palindrome_proposition",
    "verify_quadratic_theorem",
]

"""Minimally intersective polynomials (x^2 - a_1)...(x^2 - a_n): construction,
certification and brute-force verification."""

__version__ = "0.1.0"

from .certifier import (  # noqa: E402
    IntersectivityCertificate,
    Verdict,
    certify_intersective,
    decide_by_local_solvability,
)
from .constructor import ConstructionParams, Policy, construct  # noqa: E402
from .family import QuadraticFamily, validate_family  # noqa: E402
from .minimality import MinimalityReport, certify_minimal  # noqa: E402
from .oracle import density_scan, roots_mod, sweep, verify_certificate  # noqa: E402

__all__ = [
    "ConstructionParams",
    "IntersectivityCertificate",
    "MinimalityReport",
    "Policy",
    "QuadraticFamily",
    "Verdict",
    "certify_intersective",
    "certify_minimal",
    "construct",
    "decide_by_local_solvability",
    "density_scan",
    "roots_mod",
    "sweep",
    "validate_family",
    "verify_certificate",
]

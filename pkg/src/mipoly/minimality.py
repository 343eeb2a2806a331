"""Minimal intersectivity via the n drop-one divisors.

Over Q every nonconstant proper divisor of prod (x^2 - a_i) is, up to a
unit, a product of a proper subset of the irreducible quadratics, and so
divides some drop-one divisor. Multiples of intersective polynomials are
intersective, hence the whole family is minimal iff it is intersective and
none of its n drop-one divisors is.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Any

from .certifier import DEFAULT_SCAN_BOUND, IntersectivityCertificate, certify_intersective
from .errors import NotIntersectiveBase, UnsupportedDivisorSize
from .family import QuadraticFamily, validate_family

MIN_MINIMALITY_SIZE = 4


class MinimalityVerdict(str, Enum):
    MINIMAL = "MINIMAL"
    NOT_MINIMAL = "NOT_MINIMAL"


@dataclass(frozen=True)
class MinimalityReport:
    family: tuple[int, ...]
    base_certificate: IntersectivityCertificate
    divisor_reports: tuple[tuple[int, IntersectivityCertificate], ...]
    verdict: MinimalityVerdict
    offending_indices: tuple[int, ...] = ()

    @property
    def minimal(self) -> bool:
        return self.verdict is MinimalityVerdict.MINIMAL

    def divisor(self, r: int) -> IntersectivityCertificate:
        return self.divisor_reports[r - 1][1]

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": "minimality_report",
            "family": [str(v) for v in self.family],
            "reduction": "drop-one divisors",
            "base_certificate": self.base_certificate.to_dict(),
            "divisor_reports": [
                {"dropped_index": str(r), "certificate": c.to_dict()} for r, c in self.divisor_reports
            ],
            "verdict": self.verdict.value,
            "offending_indices": [str(i) for i in self.offending_indices],
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "MinimalityReport":
        return cls(
            family=tuple(int(v) for v in d["family"]),
            base_certificate=IntersectivityCertificate.from_dict(d["base_certificate"]),
            divisor_reports=tuple(
                (int(e["dropped_index"]), IntersectivityCertificate.from_dict(e["certificate"]))
                for e in d["divisor_reports"]
            ),
            verdict=MinimalityVerdict(d["verdict"]),
            offending_indices=tuple(int(i) for i in d["offending_indices"]),
        )


def _family(family) -> QuadraticFamily:
    return family if isinstance(family, QuadraticFamily) else validate_family(family)


def drop_one(family, r: int) -> QuadraticFamily:
    fam = _family(family)
    if fam.n < MIN_MINIMALITY_SIZE:
        raise UnsupportedDivisorSize(
            f"dropping a factor from a {fam.n}-member family leaves fewer than 3 members"
        )
    if not 1 <= r <= fam.n:
        raise IndexError(f"index {r} out of range 1..{fam.n}")
    return QuadraticFamily(fam.members[: r - 1] + fam.members[r:])


def certify_minimal(
    family, scan_bound: int = DEFAULT_SCAN_BOUND, workers: int = 1
) -> MinimalityReport:
    """Raises NotIntersectiveBase when the family itself is not intersective."""
    fam = family if isinstance(family, QuadraticFamily) else validate_family(family, MIN_MINIMALITY_SIZE)
    if fam.n < MIN_MINIMALITY_SIZE:
        raise UnsupportedDivisorSize(f"minimality needs n >= {MIN_MINIMALITY_SIZE}, got {fam.n}")
    base = certify_intersective(fam, scan_bound)
    if not base.intersective:
        raise NotIntersectiveBase(f"{fam} is not intersective ({base.failure})")
    divisors = [drop_one(fam, r) for r in range(1, fam.n + 1)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            certs = list(pool.map(lambda d: certify_intersective(d, scan_bound), divisors))
    else:
        certs = [certify_intersective(d, scan_bound) for d in divisors]
    offending = tuple(r for r, c in enumerate(certs, start=1) if c.intersective)
    return MinimalityReport(
        family=fam.values,
        base_certificate=base,
        divisor_reports=tuple(enumerate(certs, start=1)),
        verdict=MinimalityVerdict.NOT_MINIMAL if offending else MinimalityVerdict.MINIMAL,
        offending_indices=offending,
    )

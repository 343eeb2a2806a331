"""Intersectivity of prod (x^2 - a_i): a three-condition decision with
explicit evidence, plus an independent local-solvability decision used
for cross-validation.

The three conditions on distinct nonzero square-free a_i != 1, n >= 3:

  1a. some odd-size subset T has a perfect-square product;
  1b. for each j in T and odd prime p | a_j, some other a_i is a nonzero
      square mod p;
  2.  some a_i is 1 mod 8 (and a_i != 1).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any

from . import gf2kernel
from .errors import SearchExhausted
from .family import QuadraticFamily, validate_family
from .gf2kernel import SubsetWitness
from .ntheory import INFINITE, legendre, next_prime, witness_exponent
from .oracle import SCAN_VERIFY_LIMIT, first_root

log = logging.getLogger(__name__)

DEFAULT_SCAN_BOUND = 100_000


class Verdict(str, Enum):
    INTERSECTIVE = "INTERSECTIVE"
    NOT_INTERSECTIVE = "NOT_INTERSECTIVE"


class FailureKind(str, Enum):
    NO_ODD_SQUARE_SUBSET = "NO_ODD_SQUARE_SUBSET"
    LEGENDRE_GAP = "LEGENDRE_GAP"
    NO_MOD8_MEMBER = "NO_MOD8_MEMBER"


@dataclass(frozen=True)
class Failure:
    kind: FailureKind
    j: int | None = None
    p: int | None = None

    def __str__(self) -> str:
        if self.kind is FailureKind.LEGENDRE_GAP:
            return f"LEGENDRE_GAP(j={self.j},p={self.p})"
        return self.kind.value


@dataclass(frozen=True)
class LegendreWitness:
    j: int
    p: int
    i: int
    symbol: int = 1


@dataclass(frozen=True)
class WitnessModulus:
    prime: int
    exponent: int
    modulus: int
    verified_by_scan: bool


@dataclass(frozen=True)
class IntersectivityCertificate:
    family: tuple[int, ...]
    verdict: Verdict
    subset_T: SubsetWitness | None = None
    legendre_witnesses: tuple[LegendreWitness, ...] = ()
    mod8_witness: int | None = None
    failure: Failure | None = None
    witness_modulus: WitnessModulus | None = None
    prop1_only: bool = False

    @property
    def intersective(self) -> bool:
        return self.verdict is Verdict.INTERSECTIVE

    def to_dict(self) -> dict[str, Any]:
        wm = self.witness_modulus
        return {
            "kind": "intersectivity_certificate",
            "family": [str(v) for v in self.family],
            "verdict": self.verdict.value,
            "subset_T": None if self.subset_T is None else [str(i) for i in self.subset_T.indices],
            "legendre_witnesses": [
                {"j": str(w.j), "p": str(w.p), "i": str(w.i), "symbol": str(w.symbol)}
                for w in self.legendre_witnesses
            ],
            "mod8_witness": None if self.mod8_witness is None else str(self.mod8_witness),
            "failure": None
            if self.failure is None
            else {
                "kind": self.failure.kind.value,
                "j": None if self.failure.j is None else str(self.failure.j),
                "p": None if self.failure.p is None else str(self.failure.p),
            },
            "witness_modulus": None
            if wm is None
            else {
                "prime": str(wm.prime),
                "exponent": str(wm.exponent),
                "modulus": str(wm.modulus),
                "verified_by_scan": wm.verified_by_scan,
            },
            "prop1_only": self.prop1_only,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "IntersectivityCertificate":
        opt = lambda x: None if x is None else int(x)  # noqa: E731
        f, wm = d["failure"], d["witness_modulus"]
        return cls(
            family=tuple(int(v) for v in d["family"]),
            verdict=Verdict(d["verdict"]),
            subset_T=None if d["subset_T"] is None else SubsetWitness(tuple(int(i) for i in d["subset_T"])),
            legendre_witnesses=tuple(
                LegendreWitness(int(w["j"]), int(w["p"]), int(w["i"]), int(w["symbol"]))
                for w in d["legendre_witnesses"]
            ),
            mod8_witness=opt(d["mod8_witness"]),
            failure=None if f is None else Failure(FailureKind(f["kind"]), opt(f["j"]), opt(f["p"])),
            witness_modulus=None
            if wm is None
            else WitnessModulus(
                int(wm["prime"]), int(wm["exponent"]), int(wm["modulus"]), bool(wm["verified_by_scan"])
            ),
            prop1_only=bool(d["prop1_only"]),
        )


def _family(family) -> QuadraticFamily:
    return family if isinstance(family, QuadraticFamily) else validate_family(family)


def check_condition_1a(family) -> SubsetWitness | None:
    return gf2kernel.odd_square_subset(gf2kernel.exponent_matrix(_family(family)))


def check_condition_1b(family, T: SubsetWitness) -> list[LegendreWitness] | Failure:
    fam = _family(family)
    a = fam.values
    witnesses = []
    for j in T.indices:
        for p in fam[j].primes:
            if p == 2:
                continue
            i = next((i for i in range(1, len(a) + 1) if i != j and legendre(a[i - 1], p) == 1), None)
            if i is None:
                return Failure(FailureKind.LEGENDRE_GAP, j, p)
            witnesses.append(LegendreWitness(j, p, i))
    return witnesses


def check_condition_2(family) -> int | None:
    for i, v in enumerate(_family(family).values, start=1):
        if v % 8 == 1 and v != 1:
            return i
    return None


def find_witness_modulus(family, scan_bound: int = DEFAULT_SCAN_BOUND) -> WitnessModulus:
    """Prime power modulo which the product has no root.

    Tries primes dividing 2*prod(a_i) first, ascending, then primes up to
    scan_bound at which every member is a non-residue.
    """
    fam = _family(family)
    a = fam.values
    bad = {2} | {p for m in fam.members for p in m.primes}
    for p in sorted(bad):
        e = witness_exponent(a, p)
        if e != INFINITE:
            return _witness(a, p, int(e))
    p = 2
    while True:
        p = next_prime(p)
        if p > scan_bound:
            raise SearchExhausted(f"no witness prime below {scan_bound} for {fam}")
        if p in bad:
            continue
        if all(legendre(v, p) == -1 for v in a):
            return _witness(a, p, 1)


def _witness(a: tuple[int, ...], p: int, e: int) -> WitnessModulus:
    m = p**e
    verified = False
    if m <= SCAN_VERIFY_LIMIT:
        if first_root(a, m) is not None:
            raise AssertionError(f"witness {p}^{e} has a root for {a}")
        verified = True
    return WitnessModulus(p, e, m, verified)


def certify_intersective(family, scan_bound: int = DEFAULT_SCAN_BOUND) -> IntersectivityCertificate:
    fam = _family(family)
    a = fam.values
    failure: Failure | None = None
    T = check_condition_1a(fam)
    witnesses: list[LegendreWitness] = []
    if T is None:
        failure = Failure(FailureKind.NO_ODD_SQUARE_SUBSET)
    else:
        res = check_condition_1b(fam, T)
        if isinstance(res, Failure):
            failure = res
        else:
            witnesses = res
    mod8 = check_condition_2(fam)
    if failure is None and mod8 is None:
        failure = Failure(FailureKind.NO_MOD8_MEMBER)

    if failure is None:
        return IntersectivityCertificate(
            family=a,
            verdict=Verdict.INTERSECTIVE,
            subset_T=T,
            legendre_witnesses=tuple(witnesses),
            mod8_witness=mod8,
        )
    try:
        wm = find_witness_modulus(fam, scan_bound)
    except SearchExhausted as exc:
        log.info("%s", exc)
        return IntersectivityCertificate(
            family=a, verdict=Verdict.NOT_INTERSECTIVE, failure=failure, prop1_only=True
        )
    return IntersectivityCertificate(
        family=a, verdict=Verdict.NOT_INTERSECTIVE, failure=failure, witness_modulus=wm
    )


def decide_by_local_solvability(family) -> Verdict:
    """Decide via roots modulo prime powers, without the three-condition test.

    Primes dividing 2*prod(a_i): some factor must be a square mod every
    power of p. Every other prime: Hensel reduces to a square mod p, which
    fails for infinitely many p exactly when a quadratic character equal
    to -1 on all members exists.
    """
    fam = _family(family)
    a = fam.values
    for p in sorted({2} | {p for m in fam.members for p in m.primes}):
        if witness_exponent(a, p) != INFINITE:
            return Verdict.NOT_INTERSECTIVE
    chi = gf2kernel.all_nonresidue_character(gf2kernel.exponent_matrix(fam))
    return Verdict.INTERSECTIVE if chi is None else Verdict.NOT_INTERSECTIVE

"""Brute-force ground truth.

Root searches evaluate prod (x^2 - a_i) mod m directly, certificate
re-verification uses only :mod:`mipoly.ntheory` and those root searches,
and density estimates are direct counts. Nothing here imports the
certifier, so it can be used to check it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Any, Iterable, Mapping

import numpy as np

from .errors import DomainError, SchemaError
from .ntheory import (
    INFINITE,
    ResidueClass,
    crt,
    factorize,
    is_prime,
    legendre,
    primes_up_to,
    solvability_profile,
)

SCAN_VERIFY_LIMIT = 10**6
_NUMPY_SAFE_MODULUS = 3_000_000_000  # m*m < 2**63
_SUBSET_ENUMERATION_LIMIT = 20


def _values(family) -> tuple[int, ...]:
    return tuple(int(v) for v in getattr(family, "values", family))


def _eval(values: tuple[int, ...], x: np.ndarray, m: int) -> np.ndarray:
    """prod (x^2 - a) mod m up to sign; zero exactly at the roots.

    Factors are left in (-m, m) and only the running product is reduced,
    so every intermediate stays below m**2 in absolute value.
    """
    sq = x * x % m
    acc = np.ones_like(x)
    for a in values:
        acc = acc * (sq - a % m) % m
    return acc


def roots_mod(family, m: int) -> list[int]:
    """All x in [0, m) with prod (x^2 - a_i) = 0 mod m."""
    if m < 2:
        raise DomainError("modulus must be >= 2")
    a = _values(family)
    if m <= 1 << 24:
        x = np.arange(m, dtype=np.int64)
        return np.flatnonzero(_eval(a, x, m) == 0).tolist()
    return [x for x in range(m) if _eval_int(a, x, m) == 0]


def _eval_int(a: tuple[int, ...], x: int, m: int) -> int:
    acc = 1
    for v in a:
        acc = acc * ((x * x - v) % m) % m
    return acc


def first_root(family, m: int) -> int | None:
    """Smallest root mod m, or None. Scans in growing chunks so that
    moduli with a small root cost little."""
    if m < 2:
        raise DomainError("modulus must be >= 2")
    a = _values(family)
    if m >= _NUMPY_SAFE_MODULUS:
        return next((x for x in range(m) if _eval_int(a, x, m) == 0), None)
    start, size = 0, 256
    while start < m:
        stop = min(m, start + size)
        x = np.arange(start, stop, dtype=np.int64)
        hits = np.flatnonzero(_eval(a, x, m) == 0)
        if hits.size:
            return int(start + hits[0])
        start, size = stop, min(size * 2, 1 << 18)
    return None


@dataclass(frozen=True)
class SweepResult:
    max_checked: int
    first_failure: int | None
    roots_sample: dict[int, int] = field(default_factory=dict)
    method: str = "crt"

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": "sweep_result",
            "max_checked": str(self.max_checked),
            "first_failure": None if self.first_failure is None else str(self.first_failure),
            "roots_sample": {str(m): str(r) for m, r in sorted(self.roots_sample.items())},
            "method": self.method,
        }


def _sample_moduli(max_m: int) -> list[int]:
    picks = set(range(2, 13))
    p = 10
    while p <= max_m:
        picks.add(p)
        p *= 10
    picks.add(max_m)
    return sorted(m for m in picks if 2 <= m <= max_m)


def sweep_naive(family, max_m: int) -> SweepResult:
    a = _values(family)
    samples = set(_sample_moduli(max_m))
    roots = {}
    for m in range(2, max_m + 1):
        r = first_root(a, m)
        if r is None:
            return SweepResult(max_m, m, roots, "naive")
        if m in samples:
            roots[m] = r
    return SweepResult(max_m, None, roots, "naive")


def _prime_powers(limit: int) -> list[tuple[int, int, int]]:
    out = []
    for p in primes_up_to(limit):
        q, k = p, 1
        while q <= limit:
            out.append((q, p, k))
            q *= p
            k += 1
    out.sort()
    return out


def _first_root_prime(a: tuple[int, ...], p: int) -> int | None:
    """first_root for a prime modulus. Z/p has no zero divisors, so the
    product vanishes exactly when x^2 hits some a_i mod p; a lookup table
    replaces the per-factor products."""
    if p >= _NUMPY_SAFE_MODULUS:
        return first_root(a, p)
    table = np.zeros(p, dtype=bool)
    table[[v % p for v in a]] = True
    start, size = 0, 1024
    while start < p:
        stop = min(p, start + size)
        x = np.arange(start, stop, dtype=np.int64)
        hits = np.flatnonzero(table[x * x % p])
        if hits.size:
            return int(start + hits[0])
        start, size = stop, min(size * 2, 1 << 18)
    return None


def sweep_crt(family, max_m: int) -> SweepResult:
    """Root exists mod m iff it exists mod every prime power exactly dividing m.

    A failing m therefore has a failing prime power q <= m, so the first
    failure is the smallest failing prime power; they are checked ascending.
    Sample roots are assembled from prime-power roots by CRT.
    """
    a = _values(family)
    pp_root: dict[int, int] = {}
    first_failure = None
    for q, _, k in _prime_powers(max_m):
        r = _first_root_prime(a, q) if k == 1 else first_root(a, q)
        if r is None:
            first_failure = q
            break
        pp_root[q] = r
    limit = max_m if first_failure is None else first_failure - 1
    roots = {}
    for m in _sample_moduli(limit) if limit >= 2 else []:
        parts = [ResidueClass(pp_root[p**e], p**e) for p, e in factorize(m).factors]
        roots[m] = crt(parts).residue
    return SweepResult(max_m, first_failure, roots, "crt")


def sweep(family, max_m: int, method: str = "crt") -> SweepResult:
    if max_m < 2:
        raise DomainError("max_m must be >= 2")
    if method == "crt":
        return sweep_crt(family, max_m)
    if method == "naive":
        return sweep_naive(family, max_m)
    raise DomainError(f"unknown sweep method {method!r}")


# ---------------------------------------------------------------------------
# density


@dataclass(frozen=True)
class DensityEstimate:
    residue: int
    modulus: int
    lower_bound: int
    scan_limit: int
    qualifying_count: int
    empirical: Fraction
    formula_value: float
    relative_gap: float | None
    formula_applicable: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": "density_estimate",
            "residue": str(self.residue),
            "modulus": str(self.modulus),
            "lower_bound": str(self.lower_bound),
            "scan_limit": str(self.scan_limit),
            "qualifying_count": str(self.qualifying_count),
            "empirical": f"{self.empirical.numerator}/{self.empirical.denominator}",
            "empirical_float": repr(float(self.empirical)),
            "formula": "6/pi^2 * 1/a * prod_{p|a} (1 - 1/p^2)^-1",
            "formula_value": repr(self.formula_value),
            "relative_gap": None if self.relative_gap is None else repr(self.relative_gap),
            "formula_applicable": self.formula_applicable,
        }


def squarefree_sieve(limit: int) -> np.ndarray:
    """Boolean mask sf with sf[k] true iff k is square-free (sf[0] false)."""
    sf = np.ones(limit + 1, dtype=bool)
    sf[0] = False
    for p in primes_up_to(math.isqrt(limit)):
        sf[p * p :: p * p] = False
    return sf


def density_formula(modulus: int) -> float:
    local = Fraction(1)
    for p, _ in factorize(modulus).factors:
        local *= Fraction(p * p, p * p - 1)
    return 6 / math.pi**2 * float(local / modulus)


def density_scan(cls: ResidueClass, lower_bound: int, limit: int) -> DensityEstimate:
    """Count square-free members of cls in (lower_bound, limit].

    The reference value is exact as an asymptotic density in N when the
    residue is coprime to the modulus. When gcd(residue, modulus) is not
    square-free every member shares a square factor; the count is then 0
    and the formula is marked inapplicable.
    """
    if limit <= lower_bound:
        raise DomainError("limit must exceed lower_bound")
    sf = squarefree_sieve(limit)
    start = cls.first_above(max(lower_bound, 0))
    count = int(sf[start : limit + 1 : cls.modulus].sum()) if start <= limit else 0
    g = math.gcd(cls.residue, cls.modulus)
    applicable = all(e == 1 for _, e in factorize(g).factors) if g else False
    formula = density_formula(cls.modulus) if applicable else 0.0
    empirical = Fraction(count, limit)
    gap = abs(float(empirical) - formula) / formula if formula else None
    return DensityEstimate(
        cls.residue, cls.modulus, lower_bound, limit, count, empirical, formula, gap, applicable
    )


# ---------------------------------------------------------------------------
# certificate re-verification


class _Reject(Exception):
    pass


def _int(x: Any) -> int:
    if isinstance(x, bool) or not isinstance(x, (str, int)):
        raise SchemaError(f"expected a decimal integer string, got {x!r}")
    try:
        return int(x)
    except ValueError as exc:
        raise SchemaError(f"bad integer {x!r}") from exc


def _get(d: Mapping[str, Any], key: str) -> Any:
    if not isinstance(d, Mapping) or key not in d:
        raise SchemaError(f"missing field {key!r}")
    return d[key]


def _check(cond: bool, why: str) -> None:
    if not cond:
        raise _Reject(why)


def _check_family(values: list[int], min_size: int) -> None:
    _check(len(values) >= min_size, "family too short")
    _check(len(set(values)) == len(values), "duplicate members")
    for v in values:
        _check(v not in (0, 1), "member 0 or 1")
        _check(all(e == 1 for _, e in factorize(v).factors), f"{v} not square-free")


def _product(values: Iterable[int]) -> int:
    return math.prod(values)


def _is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def _odd_primes(v: int) -> list[int]:
    return [p for p, _ in factorize(v).factors if p != 2]


def _verify_intersectivity(doc: Mapping[str, Any]) -> None:
    a = [_int(v) for v in _get(doc, "family")]
    n = len(a)
    _check_family(a, 3)
    verdict = _get(doc, "verdict")
    T = _get(doc, "subset_T")
    failure = _get(doc, "failure")
    wm = _get(doc, "witness_modulus")
    if verdict == "INTERSECTIVE":
        _check(T is not None and failure is None and wm is None, "inconsistent positive certificate")
        idx = [_int(i) for i in T]
        _check(len(idx) % 2 == 1, "T has even cardinality")
        _check(len(set(idx)) == len(idx) and all(1 <= i <= n for i in idx), "T indices invalid")
        _check(_is_square(_product(a[i - 1] for i in idx)), "product over T is not a square")
        required = {(j, p) for j in idx for p in _odd_primes(a[j - 1])}
        seen = set()
        for w in _get(doc, "legendre_witnesses"):
            j, p, i, s = (_int(_get(w, k)) for k in ("j", "p", "i", "symbol"))
            _check((j, p) in required, f"witness for unexpected pair ({j},{p})")
            _check(1 <= i <= n and i != j, "witness index invalid")
            _check(s == 1 and legendre(a[i - 1], p) == 1, f"({a[i - 1]}/{p}) != +1")
            seen.add((j, p))
        _check(seen == required, "Legendre witnesses do not cover every (j, p)")
        m8 = _get(doc, "mod8_witness")
        _check(m8 is not None, "missing mod-8 witness")
        i = _int(m8)
        _check(1 <= i <= n and a[i - 1] % 8 == 1 and a[i - 1] != 1, "mod-8 witness invalid")
        _check(_get(doc, "prop1_only") is False, "prop1_only set on positive certificate")
        return
    _check(verdict == "NOT_INTERSECTIVE", f"unknown verdict {verdict!r}")
    _check(T is None and failure is not None, "inconsistent negative certificate")
    kind = _get(failure, "kind")
    if kind == "NO_ODD_SQUARE_SUBSET":
        if n <= _SUBSET_ENUMERATION_LIMIT:
            for r in range(1, n + 1, 2):
                for sub in combinations(a, r):
                    _check(not _is_square(_product(sub)), "an odd square subset exists")
        else:
            _check(wm is not None, "large family needs a witness modulus")
    elif kind == "LEGENDRE_GAP":
        j, p = _int(_get(failure, "j")), _int(_get(failure, "p"))
        _check(1 <= j <= n and p % 2 == 1 and is_prime(p) and a[j - 1] % p == 0, "gap pair invalid")
        _check(all(legendre(v, p) != 1 for v in a), f"some member is a residue mod {p}")
    elif kind == "NO_MOD8_MEMBER":
        _check(not any(v % 8 == 1 for v in a), "a member is 1 mod 8")
    else:
        raise SchemaError(f"unknown failure kind {kind!r}")
    _check(_get(doc, "prop1_only") is (wm is None), "prop1_only flag inconsistent")
    if wm is None:
        return
    p, e, m = (_int(_get(wm, k)) for k in ("prime", "exponent", "modulus"))
    scanned = _get(wm, "verified_by_scan")
    _check(is_prime(p) and e >= 1 and m == p**e, "witness modulus malformed")
    if m <= SCAN_VERIFY_LIMIT:
        _check(first_root(a, m) is None, f"a root exists modulo {m}")
    else:
        _check(scanned is False, "scan claimed above scan limit")
        bound = 1
        for v in a:
            k = solvability_profile(v, p).max_exponent
            _check(k != INFINITE, f"some factor is a square mod every power of {p}")
            bound += k
        _check(bound <= e, "witness exponent below the provable bound")


def _verify_minimality(doc: Mapping[str, Any]) -> None:
    a = [_int(v) for v in _get(doc, "family")]
    n = len(a)
    _check_family(a, 4)
    base = _get(doc, "base_certificate")
    _check([_int(v) for v in _get(base, "family")] == a, "base family mismatch")
    _check(_get(base, "verdict") == "INTERSECTIVE", "base not intersective")
    _verify_intersectivity(base)
    divisors = _get(doc, "divisor_reports")
    _check(len(divisors) == n, "need one report per dropped factor")
    offending = []
    for r, entry in enumerate(divisors, start=1):
        _check(_int(_get(entry, "dropped_index")) == r, "divisor reports out of order")
        cert = _get(entry, "certificate")
        _check([_int(v) for v in _get(cert, "family")] == a[: r - 1] + a[r:], "divisor family mismatch")
        _verify_intersectivity(cert)
        if _get(cert, "verdict") == "INTERSECTIVE":
            offending.append(r)
    verdict = _get(doc, "verdict")
    _check(verdict == ("MINIMAL" if not offending else "NOT_MINIMAL"), "verdict does not follow")
    _check([_int(i) for i in _get(doc, "offending_indices")] == offending, "offending list wrong")


def verify_certificate(cert: Any) -> bool:
    """Re-check every claim in a certificate or minimality report.

    Accepts the objects themselves or their dict form. Returns False for a
    well-formed document with a false claim; raises SchemaError when a
    required field is missing or mistyped.
    """
    doc = cert.to_dict() if hasattr(cert, "to_dict") else cert
    kind = _get(doc, "kind")
    try:
        if kind == "intersectivity_certificate":
            _verify_intersectivity(doc)
        elif kind == "minimality_report":
            _verify_minimality(doc)
        else:
            raise SchemaError(f"unknown document kind {kind!r}")
    except _Reject:
        return False
    return True


def rejection_reason(cert: Any) -> str | None:
    doc = cert.to_dict() if hasattr(cert, "to_dict") else cert
    try:
        if _get(doc, "kind") == "minimality_report":
            _verify_minimality(doc)
        else:
            _verify_intersectivity(doc)
    except _Reject as exc:
        return str(exc)
    return None

"""Exact integer arithmetic: primality, factorization, square-free structure,
residue symbols, CRT and solvability of x^2 = a modulo prime powers.

Everything here is a pure function of its arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import DomainError

INFINITE = math.inf

# Miller-Rabin with the first 13 prime bases is exact below this bound
# (Sorenson & Webster 2015). Above it the same test is a strong-pseudoprime
# test to 20 prime bases.
PRIMALITY_DETERMINISTIC_BELOW = 3317044064679887385961981
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_MR_EXTRA_BASES = (43, 47, 53, 59, 61, 67, 71)

_TRIAL_LIMIT = 1000
_RHO_BUDGET = 1 << 17


def primes_up_to(n: int) -> list[int]:
    """Sieve of Eratosthenes, inclusive."""
    if n < 2:
        return []
    sieve = bytearray(b"\x01") * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytes(len(range(p * p, n + 1, p)))
    return [i for i, flag in enumerate(sieve) if flag]


_SMALL_PRIMES = primes_up_to(_TRIAL_LIMIT)


def _strong_probable_prime(n: int, base: int) -> bool:
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    x = pow(base, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _SMALL_PRIMES[:25]:
        if n % p == 0:
            return n == p
    bases = _MR_BASES if n < PRIMALITY_DETERMINISTIC_BELOW else _MR_BASES + _MR_EXTRA_BASES
    return all(_strong_probable_prime(n, b) for b in bases)


def primality_provenance() -> dict[str, str]:
    return {
        "method": "miller-rabin",
        "bases": ",".join(map(str, _MR_BASES)),
        "deterministic_below": str(PRIMALITY_DETERMINISTIC_BELOW),
        "extra_bases_above": ",".join(map(str, _MR_EXTRA_BASES)),
    }


def next_prime(n: int) -> int:
    """Smallest prime strictly greater than n."""
    c = max(n + 1, 2)
    while not is_prime(c):
        c += 1
    return c


@dataclass(frozen=True)
class Factored:
    value: int
    factors: tuple[tuple[int, int], ...]
    sign: int

    def __post_init__(self):
        prod = 1
        for p, e in self.factors:
            prod *= p**e
        if self.sign * prod != self.value:
            raise DomainError(f"factorization does not reconstruct {self.value}")

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)


def _brent_rho(n: int, c: int, budget: int) -> int | None:
    """One Brent-Pollard run with x -> x^2 + c. Returns a nontrivial factor or None."""
    y, r, q, g = 2, 1, 1, 1
    m = 128
    spent = 0
    x = ys = y
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            g = math.gcd(q, n)
            k += m
        r *= 2
        spent += r
        if spent > budget:
            return None
    if g == n:
        while True:
            ys = (ys * ys + c) % n
            g = math.gcd(abs(x - ys), n)
            if g > 1:
                break
    return g if g != n else None


def _split(n: int) -> int:
    """Nontrivial divisor of composite odd n with no small factors."""
    r = math.isqrt(n)
    if r * r == n:
        return r
    for c in range(1, 9):
        d = _brent_rho(n, c, _RHO_BUDGET)
        if d:
            return d
    # rho stalled: large balanced factors. Hand over to sympy (ECM/QS).
    from sympy import factorint

    return int(min(factorint(n)))


def _factor_into(n: int, out: dict[int, int]) -> None:
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        d = _split(m)
        stack.extend((d, m // d))


@lru_cache(maxsize=4096)
def factorize(n: int) -> Factored:
    if n == 0:
        raise DomainError("cannot factor 0")
    sign = -1 if n < 0 else 1
    m = abs(n)
    counts: dict[int, int] = {}
    for p in _SMALL_PRIMES:
        if p * p > m:
            break
        while m % p == 0:
            counts[p] = counts.get(p, 0) + 1
            m //= p
    if m > 1:
        _factor_into(m, counts)
    return Factored(n, tuple(sorted(counts.items())), sign)


def is_squarefree(n: int) -> bool:
    if n == 0:
        raise DomainError("0 is not square-free or otherwise")
    return all(e == 1 for _, e in factorize(n).factors)


def rad(n: int) -> int:
    """Square-free kernel of |n|: the product of primes dividing n to an ODD power.

    This is *not* the radical (product of all prime divisors); 12 -> 3.
    """
    if n == 0:
        raise DomainError("rad(0) is undefined")
    out = 1
    for p, e in factorize(n).factors:
        if e % 2:
            out *= p
    return out


def largest_square_divisor(n: int) -> int:
    if n == 0:
        raise DomainError("undefined for 0")
    out = 1
    for p, e in factorize(n).factors:
        out *= p ** (e - e % 2)
    return out


def is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def _require_odd_prime(p: int) -> None:
    if p % 2 == 0 or not is_prime(p):
        raise DomainError(f"{p} is not an odd prime")


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p) for odd prime p, via reciprocity."""
    _require_odd_prime(p)
    a %= p
    result = 1
    m = p
    while a:
        while a % 2 == 0:
            a //= 2
            if m % 8 in (3, 5):
                result = -result
        a, m = m, a
        if a % 4 == 3 and m % 4 == 3:
            result = -result
        a %= m
    return result if m == 1 else 0


def sqrt_mod_prime(a: int, p: int) -> int:
    """Tonelli-Shanks. Returns the root in [0, (p-1)/2]."""
    if legendre(a, p) != 1:
        raise DomainError(f"{a} is not a nonzero quadratic residue mod {p}")
    a %= p
    if p % 4 == 3:
        r = pow(a, (p + 1) // 4, p)
    else:
        q, s = p - 1, 0
        while q % 2 == 0:
            q //= 2
            s += 1
        z = 2
        while legendre(z, p) != -1:
            z += 1
        m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
        while t != 1:
            i, t2 = 0, t
            while t2 != 1:
                t2 = t2 * t2 % p
                i += 1
            b = pow(c, 1 << (m - i - 1), p)
            m, c = i, b * b % p
            t, r = t * c % p, r * b % p
    return min(r, p - r)


@dataclass(frozen=True)
class ResidueClass:
    residue: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 2:
            raise DomainError(f"modulus must be >= 2, got {self.modulus}")
        if not 0 <= self.residue < self.modulus:
            raise DomainError(f"residue {self.residue} not reduced mod {self.modulus}")

    @classmethod
    def of(cls, residue: int, modulus: int) -> "ResidueClass":
        return cls(residue % modulus, modulus)

    def contains(self, x: int) -> bool:
        return x % self.modulus == self.residue

    def first_above(self, bound: int) -> int:
        """Smallest member strictly greater than bound."""
        return bound + 1 + (self.residue - bound - 1) % self.modulus


def crt(classes: Sequence[ResidueClass]) -> ResidueClass:
    if not classes:
        raise DomainError("crt needs at least one class")
    r, m = classes[0].residue, classes[0].modulus
    for cls in classes[1:]:
        if math.gcd(m, cls.modulus) != 1:
            raise DomainError(f"moduli {m} and {cls.modulus} are not coprime")
        t = (cls.residue - r) * pow(m, -1, cls.modulus) % cls.modulus
        r, m = r + m * t, m * cls.modulus
    return ResidueClass(r % m, m)


def valuation(n: int, p: int) -> int:
    if n == 0:
        raise DomainError("valuation of 0 is infinite")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _unit_square_depth(u: int, p: int) -> float:
    """Largest k with u a square mod p^k, for u a p-adic unit (INFINITE if all k)."""
    if p == 2:
        if u % 8 == 1:
            return INFINITE
        return 2 if u % 4 == 1 else 1
    return INFINITE if legendre(u, p) == 1 else 0


@dataclass(frozen=True)
class SolvabilityProfile:
    prime: int
    max_exponent: float  # an int, or INFINITE

    @property
    def infinite(self) -> bool:
        return self.max_exponent == INFINITE


def solvability_profile(a: int, p: int) -> SolvabilityProfile:
    """Largest k such that x^2 = a (mod p^k) is solvable."""
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    if a == 0:
        return SolvabilityProfile(p, INFINITE)
    v = valuation(a, p)
    if v % 2:
        return SolvabilityProfile(p, v)
    depth = _unit_square_depth(a // p**v, p)
    return SolvabilityProfile(p, depth if depth == INFINITE else v + depth)


def quad_solvable_mod_pk(a: int, p: int, k: int) -> bool:
    if k < 1:
        raise DomainError("exponent must be >= 1")
    return k <= solvability_profile(a, p).max_exponent


def _members(family) -> tuple[int, ...]:
    return tuple(int(a) for a in getattr(family, "values", family))


def witness_exponent(family: Iterable[int], p: int) -> float:
    """Exponent E with no root of prod(x^2 - a_i) mod p^E, or INFINITE.

    v_p(x^2 - a_i) <= max_exponent_i for every x, so E = 1 + sum of the
    per-factor maxima is a sharp bound.
    """
    total = 0
    for a in _members(family):
        k = solvability_profile(a, p).max_exponent
        if k == INFINITE:
            return INFINITE
        total += k
    return 1 + total


@dataclass(frozen=True)
class SquarefreeInt:
    value: int
    factorization: Factored

    @classmethod
    def of(cls, n: int) -> "SquarefreeInt":
        if n in (0, 1):
            raise DomainError(f"{n} is excluded (must be nonzero and != 1)")
        f = factorize(n)
        if any(e > 1 for _, e in f.factors):
            raise DomainError(f"{n} is not square-free")
        return cls(n, f)

    @property
    def primes(self) -> tuple[int, ...]:
        return self.factorization.primes

    def __int__(self) -> int:
        return self.value

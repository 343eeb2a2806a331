"""Step-by-step construction of minimally intersective families.

Given n >= 4 and distinct odd seed primes p1, p2 with non-residues b_i and
residues c_i, the members are

  a_1          = p1 * p2
  a_2..a_{n-3} = square-free, = b_1 (mod p1), = b_2 (mod p2)
  a_{n-2}      = square-free, = b_1 (n even) or c_1 (n odd) (mod p1), = b_2 (mod p2)
  a_{n-1}      = rad(a_1 ... a_{n-2}) for n even, rad(a_1 ... a_{n-3}) for n odd
  a_n          = square-free, = 1 (mod 8), a residue mod every odd prime
                 dividing a_1..a_{n-1} except at p1, where it is c_1 (n even)
                 or b_1 (n odd)

and every searched member exceeds rad of every subset product of the
earlier ones. Each step records its congruence targets, lower bound and
the candidates it looked at. The output is certified minimal before it is
returned.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Iterator, Sequence

from . import gf2kernel
from .certifier import DEFAULT_SCAN_BOUND
from .errors import DomainError, NotIntersectiveBase, SearchExhausted
from .family import QuadraticFamily, validate_family
from .minimality import MinimalityReport, certify_minimal
from .ntheory import (
    ResidueClass,
    SquarefreeInt,
    crt,
    factorize,
    is_prime,
    is_square,
    is_squarefree,
    legendre,
    primes_up_to,
    rad,
)

log = logging.getLogger(__name__)

DEFAULT_SEARCH_CAP = 1_000_000
MAX_POSTCONDITION_RETRIES = 50
_QUICK_SQUARES = [p * p for p in primes_up_to(1000)]


@dataclass(frozen=True)
class Policy:
    """SMALLEST takes the first square-free candidate; OFFSET(k) the (k+1)-th."""

    offset: int = 0

    def __post_init__(self):
        if self.offset < 0:
            raise DomainError("offset must be >= 0")

    @classmethod
    def parse(cls, text: str) -> "Policy":
        text = text.strip().lower()
        if text == "smallest":
            return cls(0)
        if text.startswith("offset:"):
            try:
                return cls(int(text.split(":", 1)[1]))
            except ValueError:
                pass
        raise DomainError(f"bad policy {text!r}; expected 'smallest' or 'offset:k'")

    def __str__(self) -> str:
        return "smallest" if self.offset == 0 else f"offset:{self.offset}"


SMALLEST = Policy(0)


@dataclass(frozen=True)
class ConstructionParams:
    n: int
    p1: int = 3
    p2: int = 5
    # seed prime -> (b, c) with b a non-residue and c a residue
    residue_choices: dict[int, tuple[int, int]] = field(default_factory=dict)
    # step-6 prime -> residue target, for primes other than p1, p2
    extra_residues: dict[int, int] = field(default_factory=dict)
    policy: Policy = SMALLEST
    # member index -> policy, overriding the global one at that step
    step_policies: dict[int, Policy] = field(default_factory=dict)
    search_cap: int = DEFAULT_SEARCH_CAP
    a1: int | None = None

    def policy_at(self, i: int) -> Policy:
        return self.step_policies.get(i, self.policy)


@dataclass(frozen=True)
class StepTrace:
    index: int
    rule: str  # "seed", "search" or "rad"
    targets: tuple[ResidueClass, ...] = ()
    lower_bound: int | None = None
    combined: ResidueClass | None = None
    candidates_examined: int = 0
    skipped: int = 0  # square-free candidates passed over (policy offset + rejections)
    rejected: tuple[int, ...] = ()  # a_n candidates that failed the minimality check
    rad_of: tuple[int, ...] = ()
    chosen: int = 0

    def to_dict(self) -> dict[str, Any]:
        cls = lambda c: {"residue": str(c.residue), "modulus": str(c.modulus)}  # noqa: E731
        return {
            "index": str(self.index),
            "rule": self.rule,
            "targets": [cls(t) for t in self.targets],
            "lower_bound": None if self.lower_bound is None else str(self.lower_bound),
            "combined": None if self.combined is None else cls(self.combined),
            "candidates_examined": str(self.candidates_examined),
            "skipped": str(self.skipped),
            "rejected": [str(r) for r in self.rejected],
            "rad_of": [str(i) for i in self.rad_of],
            "chosen": str(self.chosen),
        }


@dataclass(frozen=True)
class ConstructionTrace:
    n: int
    p1: int
    p2: int
    seed_residues: dict[int, tuple[int, int]]
    step6_primes: tuple[int, ...]
    step6_targets: dict[int, int]
    designed_subset: tuple[int, ...]
    steps: tuple[StepTrace, ...]
    search_cap: int

    @property
    def family_values(self) -> tuple[int, ...]:
        return tuple(s.chosen for s in self.steps)

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": "construction_trace",
            "n": str(self.n),
            "p1": str(self.p1),
            "p2": str(self.p2),
            "seed_residues": {
                str(p): {"b": str(b), "c": str(c)} for p, (b, c) in self.seed_residues.items()
            },
            "step6_primes": [str(p) for p in self.step6_primes],
            "step6_targets": {str(p): str(c) for p, c in self.step6_targets.items()},
            "designed_subset": [str(i) for i in self.designed_subset],
            "search_cap": str(self.search_cap),
            "steps": [s.to_dict() for s in self.steps],
        }


def pick_residue_pair(p: int) -> tuple[int, int]:
    """(smallest positive non-residue, 1) for an odd prime p."""
    if p % 2 == 0 or not is_prime(p):
        raise DomainError(f"{p} is not an odd prime")
    b = next(x for x in range(2, p) if legendre(x, p) == -1)
    return b, 1


def step6_residue(p: int) -> int:
    """Smallest residue mod p that is not a perfect square as an integer,
    falling back to 1 when every residue below p is a square (p = 3, 5)."""
    return next((c for c in range(2, p) if not is_square(c) and legendre(c, p) == 1), 1)


def _may_be_squarefree(x: int) -> bool:
    for q in _QUICK_SQUARES:
        if q > x:
            break
        if x % q == 0:
            return False
    return True


def _squarefree_members(
    cls: ResidueClass, lower_bound: int, cap: int
) -> Iterator[tuple[SquarefreeInt, int]]:
    """Square-free members of cls above lower_bound, ascending, excluding 1.

    Yields (member, candidates examined so far); raises SearchExhausted
    after cap candidates.
    """
    g = math.gcd(cls.residue, cls.modulus)
    if not is_squarefree(g):
        raise DomainError(f"gcd({cls.residue}, {cls.modulus}) = {g} is not square-free")
    x = cls.first_above(max(lower_bound, 0))
    examined = 0
    while examined < cap:
        examined += 1
        if x != 1 and _may_be_squarefree(x) and is_squarefree(x):
            yield SquarefreeInt(x, factorize(x)), examined
        x += cls.modulus
    raise SearchExhausted(f"no square-free member of {cls.residue} mod {cls.modulus} within {cap} candidates")


def search_squarefree_in_ap(
    cls: ResidueClass, lower_bound: int, cap: int = DEFAULT_SEARCH_CAP, policy: Policy = SMALLEST
) -> SquarefreeInt:
    for k, (value, _) in enumerate(_squarefree_members(cls, lower_bound, cap)):
        if k == policy.offset:
            return value
    raise AssertionError("unreachable")


def lower_bound_for(members: Sequence[int]) -> int:
    """max over subsets A of rad(prod_{j in A} a_j); the empty product gives 1.

    rad of a subset product depends only on the XOR of the members'
    exponent vectors, so the maximum is taken over the span, which has
    2**rank elements instead of 2**len(members).
    """
    values = [int(v) for v in members]
    if not values:
        return 1
    mat = gf2kernel.exponent_matrix(values)
    span = {0}
    for row in mat.rows:
        span |= {v ^ row for v in span}
    best = 1
    for v in span:
        prod = 1
        for c, label in enumerate(mat.column_labels):
            if c and (v >> c) & 1:
                prod *= label
        best = max(best, prod)
    return best


def _check_seed(p: int, b: int, c: int) -> None:
    if legendre(b, p) != -1:
        raise DomainError(f"b={b} is not a non-residue mod {p}")
    if legendre(c, p) != 1:
        raise DomainError(f"c={c} is not a nonzero residue mod {p}")


def _validate(params: ConstructionParams) -> dict[int, tuple[int, int]]:
    if params.n < 4:
        raise DomainError(f"n must be >= 4, got {params.n}")
    for p in (params.p1, params.p2):
        if p % 2 == 0 or not is_prime(p):
            raise DomainError(f"{p} is not an odd prime")
    if params.p1 == params.p2:
        raise DomainError("seed primes must be distinct")
    if params.search_cap < 1:
        raise DomainError("search cap must be positive")
    seeds = {}
    for p in (params.p1, params.p2):
        b, c = params.residue_choices.get(p) or pick_residue_pair(p)
        _check_seed(p, b, c)
        seeds[p] = (b % p, c % p)
    if params.a1 is not None:
        a1 = params.a1
        if a1 % 2 == 0 or a1 < 0 or not is_squarefree(a1) or a1 % params.p1 or a1 % params.p2:
            raise DomainError(f"a1={a1} must be odd, square-free and divisible by p1 and p2")
    for p, c in params.extra_residues.items():
        if p in (params.p1, params.p2) or legendre(c, p) != 1:
            raise DomainError(f"extra residue {c} mod {p} is not usable")
    return seeds


def _search_step(
    index: int, targets: list[ResidueClass], prev: list[int], params: ConstructionParams
) -> StepTrace:
    combined = crt(targets)
    lb = lower_bound_for(prev)
    policy = params.policy_at(index)
    for k, (value, examined) in enumerate(_squarefree_members(combined, lb, params.search_cap)):
        if k == policy.offset:
            return StepTrace(
                index, "search", tuple(targets), lb, combined, examined, k, (), (), value.value
            )
    raise AssertionError("unreachable")


def designed_subset(n: int) -> tuple[int, ...]:
    """Odd subset whose product is a square by construction of a_{n-1}."""
    if n % 2 == 0:
        return tuple(range(1, n))
    return tuple(range(1, n - 2)) + (n - 1,)


def construct(
    params: ConstructionParams, scan_bound: int = DEFAULT_SCAN_BOUND
) -> tuple[QuadraticFamily, ConstructionTrace, MinimalityReport]:
    """Build a family and certify it minimal.

    If the first a_n candidate allowed by the policy fails the minimality
    check, later candidates in the same class are tried (logged).
    """
    seeds = _validate(params)
    n, p1, p2 = params.n, params.p1, params.p2
    (b1, c1), (b2, c2) = seeds[p1], seeds[p2]
    even = n % 2 == 0

    a1 = params.a1 if params.a1 is not None else p1 * p2
    steps = [StepTrace(1, "seed", chosen=a1)]
    values = [a1]

    for i in range(2, n - 2):
        targets = [ResidueClass(b1, p1), ResidueClass(b2, p2)]
        steps.append(_search_step(i, targets, values, params))
        values.append(steps[-1].chosen)

    targets = [ResidueClass(b1 if even else c1, p1), ResidueClass(b2, p2)]
    steps.append(_search_step(n - 2, targets, values, params))
    values.append(steps[-1].chosen)

    rad_of = tuple(range(1, n - 1)) if even else tuple(range(1, n - 2))
    a_rad = rad(math.prod(values[i - 1] for i in rad_of))
    if a_rad == 1:
        raise DomainError("designed product is already a square; seeds violate the growth condition")
    steps.append(StepTrace(n - 1, "rad", rad_of=rad_of, chosen=a_rad))
    values.append(a_rad)

    odd_primes = sorted({p for v in values for p, _ in factorize(v).factors if p != 2})
    step6_primes = (p1, p2) + tuple(p for p in odd_primes if p not in (p1, p2))
    step6_targets = {p1: c1 if even else b1, p2: c2}
    for p in step6_primes[2:]:
        step6_targets[p] = params.extra_residues.get(p, step6_residue(p))
    targets = [ResidueClass(step6_targets[p] % p, p) for p in step6_primes] + [ResidueClass(1, 8)]
    combined = crt(targets)
    lb = lower_bound_for(values)

    policy = params.policy_at(n)
    rejected: list[int] = []
    report = None
    for k, (value, examined) in enumerate(_squarefree_members(combined, lb, params.search_cap)):
        if k < policy.offset:
            continue
        fam = validate_family(values + [value.value])
        try:
            report = certify_minimal(fam, scan_bound)
        except NotIntersectiveBase:
            report = None
        if report is not None and report.minimal:
            steps.append(
                StepTrace(n, "search", tuple(targets), lb, combined, examined, k, tuple(rejected), (), value.value)
            )
            break
        log.warning("candidate a_%d = %d failed the minimality check; trying the next one", n, value.value)
        rejected.append(value.value)
        if len(rejected) > MAX_POSTCONDITION_RETRIES:
            raise SearchExhausted(f"no minimal family after {len(rejected)} a_{n} candidates")

    trace = ConstructionTrace(
        n=n,
        p1=p1,
        p2=p2,
        seed_residues=seeds,
        step6_primes=step6_primes,
        step6_targets=step6_targets,
        designed_subset=designed_subset(n),
        steps=tuple(steps),
        search_cap=params.search_cap,
    )
    return fam, trace, report


def replay(trace: ConstructionTrace) -> tuple[int, ...]:
    """Recompute the family from the recorded targets, bounds and skip counts."""
    values: list[int] = []
    for step in trace.steps:
        if step.rule == "seed":
            values.append(step.chosen)
        elif step.rule == "rad":
            values.append(rad(math.prod(values[i - 1] for i in step.rad_of)))
        else:
            cls = crt(list(step.targets))
            v = search_squarefree_in_ap(cls, step.lower_bound, trace.search_cap, Policy(step.skipped))
            values.append(v.value)
    return tuple(values)

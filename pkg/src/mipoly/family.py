"""Validated families a_1..a_n standing for prod (x^2 - a_i)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import FamilyError
from .ntheory import SquarefreeInt, factorize, is_square

MIN_FAMILY_SIZE = 3


@dataclass(frozen=True)
class QuadraticFamily:
    members: tuple[SquarefreeInt, ...]

    @property
    def values(self) -> tuple[int, ...]:
        return tuple(m.value for m in self.members)

    @property
    def n(self) -> int:
        return len(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __getitem__(self, i: int) -> SquarefreeInt:
        """1-based access, matching the index convention used in certificates."""
        if not 1 <= i <= len(self.members):
            raise IndexError(i)
        return self.members[i - 1]

    def odd_primes(self) -> list[int]:
        """Odd primes dividing some member, ascending."""
        return sorted({p for m in self.members for p in m.primes if p != 2})

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.values)) + ")"


def validate_family(raw: Iterable[int], min_size: int = MIN_FAMILY_SIZE) -> QuadraticFamily:
    values = [int(v) for v in raw]
    if len(values) < min_size:
        raise FamilyError(f"need at least {min_size} members, got {len(values)}", "TOO_SHORT")
    seen: set[int] = set()
    members = []
    for v in values:
        if v in seen:
            raise FamilyError(f"duplicate member {v}", "DUPLICATE")
        seen.add(v)
        if v in (0, 1):
            raise FamilyError(f"member {v} is excluded (0 and 1 are not allowed)", "ZERO_OR_ONE")
        f = factorize(v)
        if any(e > 1 for _, e in f.factors):
            raise FamilyError(f"member {v} is not square-free", "NOT_SQUAREFREE")
        members.append(SquarefreeInt(v, f))
    # square-free and not in {0, 1} => not a square => no rational root
    assert not any(is_square(v) for v in values)
    return QuadraticFamily(tuple(members))

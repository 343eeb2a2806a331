"""GF(2) linear algebra on square classes.

Each square-free integer maps to its exponent vector mod 2: one bit for the
sign and one bit per prime. A subset product is a perfect square exactly
when the member vectors XOR to zero, so square subsets are the kernel of
the row-combination map. Vectors are Python int bitsets.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .ntheory import factorize

SIGN = "SIGN"
EXHAUSTIVE_KERNEL_DIM = 16


@dataclass(frozen=True)
class ExponentMatrix:
    """rows[i] has bit 0 set iff member i is negative and bit c set iff
    column_labels[c] divides it."""

    rows: tuple[int, ...]
    column_labels: tuple[object, ...]
    values: tuple[int, ...]

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_cols(self) -> int:
        return len(self.column_labels)

    def row_bits(self, i: int) -> list[int]:
        """Row i (0-based) as a 0/1 list in column order."""
        return [(self.rows[i] >> c) & 1 for c in range(self.n_cols)]


@dataclass(frozen=True)
class SubsetWitness:
    indices: tuple[int, ...]  # 1-based, ascending

    @classmethod
    def from_mask(cls, mask: int) -> "SubsetWitness":
        return cls(tuple(i + 1 for i in range(mask.bit_length()) if (mask >> i) & 1))

    @property
    def mask(self) -> int:
        m = 0
        for i in self.indices:
            m |= 1 << (i - 1)
        return m

    def __len__(self) -> int:
        return len(self.indices)

    def is_odd(self) -> bool:
        return len(self.indices) % 2 == 1


def exponent_matrix(family) -> ExponentMatrix:
    values = tuple(int(v) for v in getattr(family, "values", family))
    factored = [factorize(v) for v in values]
    primes = sorted({p for f in factored for p in f.primes})
    col = {p: c + 1 for c, p in enumerate(primes)}
    rows = []
    for v, f in zip(values, factored):
        bits = 1 if v < 0 else 0
        for p, e in f.factors:
            if e % 2:
                bits |= 1 << col[p]
        rows.append(bits)
    return ExponentMatrix(tuple(rows), (SIGN, *primes), values)


def _eliminate(rows: Sequence[int]) -> tuple[dict[int, tuple[int, int]], list[int]]:
    """Reduce rows tracking which originals were combined.

    Returns the pivot table (lowest bit -> (vector, combination)) and the
    combinations that reduced to zero.
    """
    pivots: dict[int, tuple[int, int]] = {}
    dependent = []
    for i, row in enumerate(rows):
        v, c = row, 1 << i
        while v:
            low = v & -v
            if low not in pivots:
                pivots[low] = (v, c)
                break
            pv, pc = pivots[low]
            v ^= pv
            c ^= pc
        if not v:
            dependent.append(c)
    return pivots, dependent


def rank(rows: Sequence[int]) -> int:
    return len(_eliminate(rows)[0])


def _reduced_echelon(vectors: Iterable[int]) -> list[int]:
    """Canonical basis of the span: fully reduced, keyed by highest bit, ascending."""
    basis: dict[int, int] = {}
    for v in vectors:
        for top in sorted(basis, reverse=True):
            if (v >> top) & 1:
                v ^= basis[top]
        if v:
            top = v.bit_length() - 1
            for t in list(basis):
                if (basis[t] >> top) & 1:
                    basis[t] ^= v
            basis[top] = v
    return [basis[t] for t in sorted(basis)]


def square_subsets_basis(matrix: ExponentMatrix) -> list[SubsetWitness]:
    _, dependent = _eliminate(matrix.rows)
    return [SubsetWitness.from_mask(m) for m in _reduced_echelon(dependent)]


def _key(mask: int) -> tuple[int, tuple[int, ...]]:
    return bin(mask).count("1"), SubsetWitness.from_mask(mask).indices


def odd_square_subset(matrix: ExponentMatrix) -> SubsetWitness | None:
    """Odd-cardinality square subset, or None.

    Canonical choice: minimum cardinality, then lexicographically smallest
    index tuple. Exact by enumeration when the kernel has dimension <= 16;
    above that a deterministic greedy descent from the first odd basis vector.
    """
    basis = [w.mask for w in square_subsets_basis(matrix)]
    odd = [b for b in basis if bin(b).count("1") % 2]
    if not odd:
        return None
    if len(basis) <= EXHAUSTIVE_KERNEL_DIM:
        best = None
        for r in range(1, len(basis) + 1):
            for combo in combinations(basis, r):
                v = 0
                for b in combo:
                    v ^= b
                if bin(v).count("1") % 2 and (best is None or _key(v) < _key(best)):
                    best = v
        return SubsetWitness.from_mask(best)
    # parity-preserving moves: even basis vectors and sums of two odd ones
    moves = [b for b in basis if b not in odd] + [odd[0] ^ o for o in odd[1:]]
    v = odd[0]
    improved = True
    while improved:
        improved = False
        for m in moves:
            if _key(v ^ m) < _key(v):
                v ^= m
                improved = True
    return SubsetWitness.from_mask(v)


def all_nonresidue_character(matrix: ExponentMatrix) -> int | None:
    """A column assignment chi with <row_i, chi> = 1 for every row, or None.

    Such a chi is a quadratic character that is -1 on every member. It
    exists iff no odd square subset exists; this solves the dual linear
    system directly instead of going through the kernel.
    """
    rhs = 1 << matrix.n_cols
    pivots: dict[int, int] = {}
    for row in matrix.rows:
        v = row | rhs
        while v & (rhs - 1):
            low = v & -v
            if low not in pivots:
                pivots[low] = v
                break
            v ^= pivots[low]
        if v == rhs:
            return None
    # back-substitute, free variables set to 0
    chi = 0
    for low in sorted(pivots, reverse=True):
        v = pivots[low]
        parity = bin((v & (rhs - 1) & ~low) & chi).count("1") % 2
        if ((v >> matrix.n_cols) & 1) ^ parity:
            chi |= low
    return chi

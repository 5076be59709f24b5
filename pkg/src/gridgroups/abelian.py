"""Integer Smith normal form and abelianized presentation invariants."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .present import Presentation, Word


def smith_normal_form(mat: Sequence[Sequence[int]], track_cols: bool = True):
    """Diagonalise an integer matrix by row/column operations.

    Returns (diag, V) where diag holds the invariant factors d1 | d2 | ...
    (nonnegative, zeros trailing) and V is the accumulated column transform:
    for the input A there are unimodular U, V with U A V diagonal, and the
    class of a row vector x in Z^n / rowspace(A) has coordinates x V.
    Entries are exact Python ints; coefficient growth is harmless.
    """
    A = [list(row) for row in mat]
    m = len(A)
    n = len(A[0]) if m else 0
    V = [[1 if i == j else 0 for j in range(n)] for i in range(n)] if track_cols else None

    def col_add(dst: int, src: int, q: int) -> None:
        for row in A:
            row[dst] += q * row[src]
        if V is not None:
            for row in V:
                row[dst] += q * row[src]

    def col_swap(i: int, j: int) -> None:
        for row in A:
            row[i], row[j] = row[j], row[i]
        if V is not None:
            for row in V:
                row[i], row[j] = row[j], row[i]

    def col_neg(i: int) -> None:
        for row in A:
            row[i] = -row[i]
        if V is not None:
            for row in V:
                row[i] = -row[i]

    t = 0
    while t < m and t < n:
        # pivot: smallest nonzero magnitude in the remaining block
        piv = None
        for i in range(t, m):
            for j in range(t, n):
                v = A[i][j]
                if v and (piv is None or abs(v) < abs(A[piv[0]][piv[1]])):
                    piv = (i, j)
        if piv is None:
            break
        i, j = piv
        if i != t:
            A[i], A[t] = A[t], A[i]
        if j != t:
            col_swap(j, t)
        if A[t][t] < 0:
            col_neg(t)
        dirty = False
        for i in range(t + 1, m):
            v = A[i][t]
            if v:
                q = v // A[t][t]
                if q:
                    for k in range(t, n):
                        A[i][k] -= q * A[t][k]
                if A[i][t]:
                    dirty = True
        for j in range(t + 1, n):
            v = A[t][j]
            if v:
                q = v // A[t][t]
                if q:
                    col_add(j, t, -q)
                if A[t][j]:
                    dirty = True
        if dirty:
            continue  # remainders became new, smaller pivot candidates
        # pivot must divide the rest of the block for true invariant factors
        d = A[t][t]
        offender = None
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if A[i][j] % d:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            for k in range(t, n):
                A[t][k] += A[offender][k]
            continue
        t += 1

    diag = [A[k][k] for k in range(min(m, n))]
    return diag, V


@dataclass(frozen=True)
class AbelianInvariants:
    free_rank: int
    torsion: tuple[int, ...]  # d1 | d2 | ..., each >= 2

    def group_order(self):
        """Order of the abelian group, or None when infinite."""
        if self.free_rank:
            return None
        order = 1
        for d in self.torsion:
            order *= d
        return order

    def __str__(self) -> str:
        parts = ["Z"] * self.free_rank + [f"Z{d}" for d in self.torsion]
        return " x ".join(parts) if parts else "1"


class Abelianization:
    """Abelianised presentation with coordinates for word images."""

    def __init__(self, pres: Presentation):
        n = pres.generator_count
        rows = []
        for rel in pres.relators:
            vec = [0] * n
            for x in rel:
                vec[abs(x) - 1] += 1 if x > 0 else -1
            rows.append(vec)
        if not rows:
            rows = [[0] * n] if n else []
        diag, V = smith_normal_form(rows)
        self._n = n
        self._V = V
        self._diag = [abs(d) for d in diag] + [0] * (n - len(diag))
        self.invariants = AbelianInvariants(
            free_rank=sum(1 for d in self._diag if d == 0),
            torsion=tuple(d for d in self._diag if d > 1),
        )

    def image(self, word: Word) -> tuple[int, ...]:
        """Canonical coordinates of a word's class in the abelianisation.

        Positions with invariant factor 1 are dropped; torsion positions are
        reduced mod their factor; free positions stay exact integers.
        """
        n = self._n
        vec = [0] * n
        for x in word:
            vec[abs(x) - 1] += 1 if x > 0 else -1
        V = self._V
        out = []
        for j in range(n):
            d = self._diag[j]
            if d == 1:
                continue
            coord = 0
            for i in range(n):
                if vec[i]:
                    coord += vec[i] * V[i][j]
            out.append(coord % d if d else coord)
        return tuple(out)


def abelian_invariants(pres: Presentation) -> AbelianInvariants:
    return Abelianization(pres).invariants


def _prime_factors(n: int) -> list[int]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out.append(n)
    return out


def _ppart(o: int, p: int) -> int:
    r = 1
    while o % p == 0:
        o //= p
        r *= p
    return r


def invariants_from_order_counts(order_counts: dict[int, int]) -> AbelianInvariants:
    """Invariant factors of a finite abelian group from its element orders.

    For each prime p, counting elements whose order's p-part divides p^k
    recovers the partition of the Sylow p-subgroup; matching the prime
    powers largest-with-largest yields the divisibility chain.
    """
    total = sum(order_counts.values())
    if total == 1:
        return AbelianInvariants(0, ())
    per_prime: list[list[int]] = []
    for p in _prime_factors(total):
        def count_div(k: int) -> int:
            cap = p ** k
            return sum(c for o, c in order_counts.items() if _ppart(o, p) <= cap)

        coprime = count_div(0)
        sigma = [0]
        k = 1
        while True:
            q, r = divmod(count_div(k), coprime)
            if r:
                raise ValueError("order counts are not those of an abelian group")
            e = 0
            while p ** e < q:
                e += 1
            if p ** e != q:
                raise ValueError("order counts are not those of an abelian group")
            if e == sigma[-1]:
                break
            sigma.append(e)
            k += 1
        parts_ge = [sigma[k] - sigma[k - 1] for k in range(1, len(sigma))]
        height = parts_ge[0] if parts_ge else 0
        exponents = [sum(1 for g in parts_ge if g >= i) for i in range(1, height + 1)]
        per_prime.append(sorted((p ** e for e in exponents), reverse=True))
    width = max((len(ps) for ps in per_prime), default=0)
    factors = []
    for col in range(width):
        f = 1
        for ps in per_prime:
            if col < len(ps):
                f *= ps[col]
        factors.append(f)
    factors.sort()
    check = 1
    for f in factors:
        check *= f
    if check != total:
        raise ValueError("factor product does not match the group order")
    return AbelianInvariants(0, tuple(f for f in factors if f > 1))

"""Coset enumeration over a finite presentation, plus finite-group probes.

The enumerator is the fill-as-you-scan variant with a union-find over coset
numbers: scanning a relator from a coset defines missing edges outright and
queues coincidences when paths close inconsistently.  Runs are budgeted by
the total number of cosets ever defined.  An overrun is a status, not an
error, and the partial graph still certifies word equalities: two words
tracing to the same vertex are provably equal in the group.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .abelian import AbelianInvariants, invariants_from_order_counts
from .present import Presentation, Word, free_reduce, invert

UNDEF = -1


def _paths(relators: Sequence[Word]) -> list[tuple[int, ...]]:
    """Words over signed letters -> direction paths (gen g: 2g, inverse: 2g+1)."""
    out = []
    for rel in relators:
        out.append(tuple((x - 1) * 2 if x > 0 else (-x - 1) * 2 + 1 for x in rel))
    return out


class _Graph:
    __slots__ = ("nd", "neigh", "label", "live", "defined")

    def __init__(self, nd: int):
        self.nd = nd
        self.neigh: list[list[int]] = []
        self.label: list[int] = []
        self.live = 0
        self.defined = 0

    def find(self, c: int) -> int:
        label = self.label
        while label[c] != c:
            label[c] = label[label[c]]
            c = label[c]
        return c

    def add(self) -> int:
        c = len(self.label)
        self.label.append(c)
        self.neigh.append([UNDEF] * self.nd)
        self.live += 1
        self.defined += 1
        return c


class EnumerationExhausted(Exception):
    pass


@dataclass
class CosetEnumeration:
    """Outcome of a run: complete table, or a partial graph worth keeping."""

    status: str  # "complete" | "exhausted" | "open"
    table: Optional["CosetTable"]
    graph: Optional[_Graph]
    cosets_defined: int

    def equal_words(self, w1: Word, w2: Word) -> Optional[bool]:
        """Sound equality from the run: True is a proof, None no conclusion."""
        if self.table is not None:
            return self.table.element(w1) == self.table.element(w2)
        a = _trace_partial(self.graph, w1)
        b = _trace_partial(self.graph, w2)
        if a is not None and a == b:
            return True
        return None


def _trace_partial(g: _Graph, word: Word) -> Optional[int]:
    c = g.find(0)
    for x in word:
        d = (x - 1) * 2 if x > 0 else (-x - 1) * 2 + 1
        nxt = g.neigh[c][d]
        if nxt == UNDEF:
            return None
        c = g.find(nxt)
    return c


def todd_coxeter(pres: Presentation, subgroup: Sequence[Word] = (),
                 max_cosets: int = 200_000) -> CosetEnumeration:
    """Enumerate cosets of the subgroup generated by the given words.

    A complete run yields the permutation action on the cosets: for the
    trivial subgroup that is the regular action and the coset count is the
    group order.  `max_cosets` bounds the total number of cosets defined.
    """
    if max_cosets < 1:
        raise ValueError("max_cosets must be at least 1")
    ngens = pres.generator_count
    nd = 2 * ngens
    for w in subgroup:
        for x in w:
            if not 1 <= abs(x) <= ngens:
                raise ValueError(f"letter {x} out of range for {ngens} generators")
    rel_paths = _paths(pres.relators)
    sub_paths = _paths([free_reduce(w) for w in subgroup])
    g = _Graph(nd)
    g.add()
    neigh = g.neigh
    find = g.find

    pending: list[tuple[int, int]] = []

    def merge(a: int, b: int) -> None:
        pending.append((a, b))
        label = g.label
        while pending:
            x, y = pending.pop()
            x, y = find(x), find(y)
            if x == y:
                continue
            if x > y:
                x, y = y, x
            label[y] = x
            g.live -= 1
            row_x, row_y = neigh[x], neigh[y]
            for d in range(nd):
                ny = row_y[d]
                if ny != UNDEF:
                    nx = row_x[d]
                    if nx == UNDEF:
                        row_x[d] = ny
                    else:
                        pending.append((nx, ny))

    def scan_and_fill(alpha: int, path: tuple[int, ...]) -> None:
        if not path:
            return
        f = alpha
        i = 0
        b = alpha
        r = len(path) - 1
        while True:
            while i <= r:
                nxt = neigh[f][path[i]]
                if nxt == UNDEF:
                    break
                f = find(nxt)
                i += 1
            if i > r:
                if f != b:
                    merge(f, b)
                return
            while r >= i:
                nxt = neigh[b][path[r] ^ 1]
                if nxt == UNDEF:
                    break
                b = find(nxt)
                r -= 1
            if r < i:
                merge(f, b)
                return
            if r == i:
                d = path[i]
                neigh[f][d] = b
                back = neigh[b][d ^ 1]
                if back == UNDEF:
                    neigh[b][d ^ 1] = f
                else:
                    merge(back, f)
                return
            if g.defined >= max_cosets:
                raise EnumerationExhausted
            c = g.add()
            d = path[i]
            neigh[f][d] = c
            neigh[c][d ^ 1] = f
            f = c
            i += 1

    status = "complete"
    try:
        for path in sub_paths:
            scan_and_fill(0, path)
        alpha = 0
        while alpha < len(g.label):
            if g.label[alpha] == alpha:
                for path in rel_paths:
                    scan_and_fill(alpha, path)
                    if g.label[alpha] != alpha:
                        break
            alpha += 1
    except EnumerationExhausted:
        status = "exhausted"

    if status == "complete":
        live = [c for c in range(len(g.label)) if g.label[c] == c]
        if any(neigh[c][d] == UNDEF for c in live for d in range(nd)):
            status = "open"  # some generator never constrained: cannot close
    if status != "complete":
        return CosetEnumeration(status, None, g, g.defined)

    renum = {c: k for k, c in enumerate(live)}
    action = [[renum[find(neigh[c][d])] for d in range(nd)] for c in live]
    table = CosetTable(ngens, action, pres)
    return CosetEnumeration("complete", table, None, g.defined)


class CosetTable:
    """Completed enumeration: each generator acts as a permutation of cosets."""

    def __init__(self, ngens: int, action: list[list[int]], pres: Optional[Presentation] = None):
        self.ngens = ngens
        self.action = action
        self.presentation = pres
        self._words: Optional[list[Word]] = None
        self._inv: Optional[list[int]] = None
        self._orders: Optional[list[int]] = None

    @property
    def coset_count(self) -> int:
        return len(self.action)

    def trace(self, coset: int, word: Word) -> int:
        action = self.action
        for x in word:
            coset = action[coset][(x - 1) * 2 if x > 0 else (-x - 1) * 2 + 1]
        return coset

    def element(self, word: Word) -> int:
        return self.trace(0, word)

    def check_closed(self) -> bool:
        """Every relator acts trivially from every coset."""
        if self.presentation is None:
            return True
        return all(self.trace(c, rel) == c
                   for rel in self.presentation.relators
                   for c in range(self.coset_count))

    # -- group structure on cosets (regular action: trivial subgroup) -------

    def element_words(self) -> list[Word]:
        """A shortest word reaching each coset from 0, in search order."""
        if self._words is None:
            n = self.coset_count
            words: list[Optional[Word]] = [None] * n
            words[0] = ()
            queue = [0]
            qi = 0
            while qi < len(queue):
                c = queue[qi]
                qi += 1
                for d in range(2 * self.ngens):
                    nxt = self.action[c][d]
                    if words[nxt] is None:
                        letter = d // 2 + 1 if d % 2 == 0 else -(d // 2 + 1)
                        words[nxt] = words[c] + (letter,)
                        queue.append(nxt)
            if any(w is None for w in words):
                raise ValueError("coset table is not transitive")
            self._words = words  # type: ignore[assignment]
        return self._words

    def mult(self, i: int, j: int) -> int:
        return self.trace(i, self.element_words()[j])

    def inverse(self, i: int) -> int:
        if self._inv is None:
            self._inv = [self.element(invert(w)) for w in self.element_words()]
        return self._inv[i]

    def order_of(self, i: int) -> int:
        if self._orders is None:
            self._orders = [0] * self.coset_count
        if self._orders[i] == 0:
            k, c = 1, i
            while c != 0:
                c = self.mult(c, i)
                k += 1
            self._orders[i] = k
        return self._orders[i]

    def order_counts(self) -> dict[int, int]:
        counts: dict[int, int] = {}
        for i in range(self.coset_count):
            o = self.order_of(i)
            counts[o] = counts.get(o, 0) + 1
        return counts

    def generator_elements(self) -> list[int]:
        return [self.action[0][2 * k] for k in range(self.ngens)]

    def center_order(self) -> int:
        gens = self.generator_elements()
        count = 0
        for z in range(self.coset_count):
            if all(self.mult(z, h) == self.mult(h, z) for h in gens):
                count += 1
        return count

    def subgroup_closure(self, elements: Sequence[int]) -> set[int]:
        seen = {0}
        frontier = [0]
        gens = [e for e in elements if e != 0]
        while frontier:
            nxt = []
            for x in frontier:
                for h in gens:
                    y = self.mult(x, h)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return seen

    def derived_subgroup(self) -> set[int]:
        gens = self.generator_elements()
        comms = set()
        for x in gens:
            for y in gens:
                c = self.mult(self.mult(self.mult(self.inverse(x), self.inverse(y)), x), y)
                comms.add(c)
        sub = self.subgroup_closure(sorted(comms))
        while True:
            extra = set()
            for h in gens:
                hinv = self.inverse(h)
                for s in sub:
                    t = self.mult(self.mult(hinv, s), h)
                    if t not in sub:
                        extra.add(t)
            if not extra:
                return sub
            sub = self.subgroup_closure(sorted(sub | extra))

    def abelianization(self) -> AbelianInvariants:
        derived = self.derived_subgroup()
        n = self.coset_count
        rep: dict[int, int] = {}
        coset_of = [UNDEF] * n
        for e in range(n):
            if coset_of[e] != UNDEF:
                continue
            members = sorted(self.mult(e, s) for s in derived)
            lead = members[0]
            for m in members:
                coset_of[m] = lead
        counts: dict[int, int] = {}
        for e in range(n):
            if coset_of[e] != e:
                continue
            k, c = 1, e
            while coset_of[c] != 0:
                c = coset_of[self.mult(c, e)]
                k += 1
            counts[k] = counts.get(k, 0) + 1
        return invariants_from_order_counts(counts)


@dataclass(frozen=True)
class GroupFingerprint:
    """Isomorphism probe computed from a complete regular coset table."""

    order: int
    abelianization: AbelianInvariants
    element_orders: tuple[tuple[int, int], ...]  # (order, count) ascending
    center_order: int
    derived_order: int

    def key(self):
        return (self.order, self.abelianization.torsion, self.element_orders,
                self.center_order, self.derived_order)


def fingerprint(table: CosetTable) -> GroupFingerprint:
    counts = table.order_counts()
    return GroupFingerprint(
        order=table.coset_count,
        abelianization=table.abelianization(),
        element_orders=tuple(sorted(counts.items())),
        center_order=table.center_order(),
        derived_order=len(table.derived_subgroup()),
    )

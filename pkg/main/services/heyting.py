"""
Finite distributive lattices and Heyting algebras given by operation tables,
their prime filters, and the Birkhoff units eta and theta.
"""
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Optional, Sequence, Tuple

import numpy as np

from main.config import get_limits
from main.errors import AlgebraConditionError, UsageError, guard
from main.services.posets import Poset, PosetMap, mask_of, upset_masks


def _table(values) -> np.ndarray:
    table = np.array(values, dtype=np.int32)
    table.flags.writeable = False
    return table


class FinDL:
    """
    Finite bounded distributive lattice on elements 0..size-1.

    ``labels`` optionally names the elements (for upset algebras: the upset
    bitmasks). Lattice laws and distributivity are checked on construction
    below the eager-check cap.
    """

    def __init__(self, meet, join, labels: Optional[Sequence] = None, validate: bool = True):
        self.meet_table = _table(meet)
        self.join_table = _table(join)
        self.size = self.meet_table.shape[0]
        if self.size == 0:
            raise AlgebraConditionError('a bounded lattice needs at least one element')
        index = np.arange(self.size)
        leq = self.meet_table == index[:, None]
        leq.flags.writeable = False
        self.leq = leq
        self.labels = tuple(labels) if labels is not None else tuple(range(self.size))
        self._meet = self.meet_table.tolist()
        self._join = self.join_table.tolist()
        self.top = self._find_bound(leq.all(axis=0), 'top')
        self.bottom = self._find_bound(leq.all(axis=1), 'bottom')
        if validate and self.size <= get_limits().eager_check_size:
            self._check_lattice()

    def _find_bound(self, candidates: np.ndarray, name: str) -> int:
        found = np.flatnonzero(candidates)
        if len(found) != 1:
            raise AlgebraConditionError(f'lattice has no {name} element')
        return int(found[0])

    def meet(self, a: int, b: int) -> int:
        return self._meet[a][b]

    def join(self, a: int, b: int) -> int:
        return self._join[a][b]

    def le(self, a: int, b: int) -> bool:
        return self._meet[a][b] == a

    def _check_lattice(self) -> None:
        m, j, n = self.meet_table, self.join_table, self.size
        index = np.arange(n)
        checks = [
            ('meet commutative', m == m.T),
            ('join commutative', j == j.T),
            ('absorption a & (a | b) = a', m[index[:, None], j] == index[:, None]),
            ('absorption a | (a & b) = a', j[index[:, None], m] == index[:, None]),
        ]
        for name, ok in checks:
            bad = np.argwhere(~ok)
            if len(bad):
                raise AlgebraConditionError(name, tuple(int(v) for v in bad[0]))
        assoc = m[m[:, :, None], index[None, None, :]] == m[index[:, None, None], m[None, :, :]]
        distributive = (m[index[:, None, None], j[None, :, :]]
                        == j[m[:, :, None], m[:, None, :]])
        for name, ok in (('meet associative', assoc), ('distributivity', distributive)):
            bad = np.argwhere(~ok)
            if len(bad):
                raise AlgebraConditionError(name, tuple(int(v) for v in bad[0]))

    def index_of(self, label) -> int:
        return self._label_index[label]

    @cached_property
    def _label_index(self):
        return {label: i for i, label in enumerate(self.labels)}

    @cached_property
    def spectrum(self) -> 'Spectrum':
        return build_spectrum(self)

    def __eq__(self, other) -> bool:
        return (type(self) is type(other) and np.array_equal(self.meet_table, other.meet_table)
                and np.array_equal(self.join_table, other.join_table) and self._extra_eq(other))

    def _extra_eq(self, other) -> bool:
        return True

    def __hash__(self) -> int:
        return hash((self.size, self.meet_table.tobytes(), self.join_table.tobytes()))

    def __repr__(self) -> str:
        return f'{type(self).__name__}(size={self.size})'


class FinHA(FinDL):
    """FinDL with an implication table; residuation is checked eagerly"""

    def __init__(self, meet, join, imp, labels: Optional[Sequence] = None, validate: bool = True):
        super().__init__(meet, join, labels=labels, validate=validate)
        self.imp_table = _table(imp)
        self._imp = self.imp_table.tolist()
        if validate and self.size <= get_limits().eager_check_size:
            self._check_residuation()

    def imp(self, a: int, b: int) -> int:
        return self._imp[a][b]

    def _check_residuation(self) -> None:
        n = self.size
        index = np.arange(n)
        # c <= (a -> b)  iff  a & c <= b, indexed [a, b, c]
        left = self.leq[index[None, None, :], self.imp_table[:, :, None]]
        right = self.leq[self.meet_table[:, None, :], index[None, :, None]]
        bad = np.argwhere(left != right)
        if len(bad):
            raise AlgebraConditionError('residuation a & c <= b iff c <= a -> b', tuple(int(v) for v in bad[0]))

    def _extra_eq(self, other) -> bool:
        return np.array_equal(self.imp_table, other.imp_table)

    def __hash__(self) -> int:
        return hash((super().__hash__(), self.imp_table.tobytes()))


@dataclass(frozen=True)
class PrimeFilter:
    members: int
    generator: int
    algebra: FinDL = field(compare=False, repr=False)

    def __contains__(self, element: int) -> bool:
        return bool(self.members >> element & 1)


@dataclass
class Spectrum:
    """Prime filters of a FinDL, their inclusion order, and theta"""
    algebra: FinDL
    filters: List[PrimeFilter]
    poset: Poset
    theta: List[int]

    @cached_property
    def theta_index(self):
        return {mask: a for a, mask in enumerate(self.theta)}

    def index_of_members(self, members: int) -> int:
        return self._by_members[members]

    @cached_property
    def _by_members(self):
        return {p.members: k for k, p in enumerate(self.filters)}


def _principal(algebra: FinDL, a: int) -> int:
    return mask_of(np.flatnonzero(algebra.leq[a]))


def _is_prime_principal(algebra: FinDL, a: int) -> bool:
    if a == algebra.bottom:
        return False
    above = algebra.leq[a]
    # a <= b | c must force a <= b or a <= c
    covered = above[algebra.join_table]
    return not np.any(covered & ~(above[:, None] | above[None, :]))


def _join_irreducibles(algebra: FinDL) -> List[int]:
    strict_below = algebra.leq.T & ~np.eye(algebra.size, dtype=bool)  # [a, c]: c < a
    found = []
    for a in range(algebra.size):
        below = np.flatnonzero(strict_below[a])
        if len(below) == 0:
            continue
        maximal = [c for c in below if not any(algebra.leq[c, d] and c != d for d in below)]
        if len(maximal) == 1:
            found.append(a)
    return found


def _is_prime_filter(algebra: FinDL, members: int) -> bool:
    if not members or members >> int(algebra.bottom) & 1:
        return False
    inside = [a for a in range(algebra.size) if members >> a & 1]
    if any(not members >> b & 1 for a in inside for b in map(int, np.flatnonzero(algebra.leq[a]))):
        return False
    if any(not members >> int(algebra.meet_table[a, b]) & 1 for a in inside for b in inside):
        return False
    return all(members >> b & 1 or members >> c & 1
               for b in range(algebra.size) for c in range(algebra.size)
               if members >> int(algebra.join_table[b, c]) & 1)


def _subset_scan(algebra: FinDL) -> List[int]:
    guard('subset scan 2^size', 1 << algebra.size, get_limits().max_subset_scan)
    generators = []
    for members in range(1 << algebra.size):
        if _is_prime_filter(algebra, members):
            generators.extend(a for a in range(algebra.size)
                              if members >> a & 1 and _principal(algebra, a) == members)
    return generators


def prime_filters(algebra: FinDL, method: str = 'auto') -> Tuple[Poset, List[PrimeFilter]]:
    """
    Prime filters in ascending order of their member bitmask, ordered by inclusion.

    ``subsets`` tests every subset of the carrier against the filter and
    primeness conditions, which only fits tiny algebras. Every filter of a
    finite lattice is principal, so ``principal`` runs the same scan over the
    |D| principal filters and returns the same list. ``join_irreducible`` uses
    the Birkhoff shortcut. ``auto`` picks ``principal`` up to the configured
    threshold.
    """
    limits = get_limits()
    guard('prime filter scan', algebra.size, limits.max_algebra_size)
    if method == 'auto':
        method = 'principal' if algebra.size <= limits.join_irreducible_threshold else 'join_irreducible'
    if method == 'subsets':
        generators = _subset_scan(algebra)
    elif method == 'principal':
        generators = [a for a in range(algebra.size) if _is_prime_principal(algebra, a)]
    elif method == 'join_irreducible':
        generators = _join_irreducibles(algebra)
    else:
        raise UsageError(f"unknown prime filter method '{method}'")
    filters = sorted((PrimeFilter(_principal(algebra, a), a, algebra) for a in generators),
                     key=lambda p: p.members)
    leq = [[p.members & ~q.members == 0 for q in filters] for p in filters]
    return Poset(np.array(leq, dtype=bool).reshape(len(filters), len(filters))), filters


def build_spectrum(algebra: FinDL) -> Spectrum:
    poset, filters = prime_filters(algebra)
    theta = [mask_of(k for k, p in enumerate(filters) if a in p) for a in range(algebra.size)]
    logging.debug(f"spectrum of {algebra!r}: {len(filters)} prime filters")
    return Spectrum(algebra, filters, poset, theta)


def up_algebra(poset: Poset) -> FinHA:
    """Heyting algebra of upsets; elements are labelled by their bitmask in ascending order"""
    masks = upset_masks(poset)
    index = {mask: i for i, mask in enumerate(masks)}
    meet = [[index[a & b] for b in masks] for a in masks]
    join = [[index[a | b] for b in masks] for a in masks]
    imp = [[index[implication_mask(poset, a, b)] for b in masks] for a in masks]
    return FinHA(meet, join, imp, labels=masks)


def implication_mask(poset: Poset, a: int, b: int) -> int:
    """{x | every y >= x in a is in b}"""
    return mask_of(x for x in range(poset.size) if poset.up[x] & a & ~b == 0)


def eta(poset: Poset, algebra: Optional[FinHA] = None) -> PosetMap:
    """x -> {a in Up(P) | x in a}, as a map into the prime filter poset"""
    algebra = algebra or up_algebra(poset)
    spectrum = algebra.spectrum
    graph = []
    for x in range(poset.size):
        members = mask_of(i for i, label in enumerate(algebra.labels) if label >> x & 1)
        graph.append(spectrum.index_of_members(members))
    return PosetMap(poset, spectrum.poset, tuple(graph))


def theta(algebra: FinDL) -> List[int]:
    """a -> {p | a in p} as bitmasks over the prime filter indices"""
    return list(algebra.spectrum.theta)


def is_closed_upset(upset: int, algebra: FinDL) -> bool:
    spectrum = algebra.spectrum
    meet_of = spectrum.poset.full
    for mask in spectrum.theta:
        if upset & ~mask == 0:
            meet_of &= mask
    return meet_of == upset


def is_open_upset(upset: int, algebra: FinDL) -> bool:
    join_of = 0
    for mask in algebra.spectrum.theta:
        if mask & ~upset == 0:
            join_of |= mask
    return join_of == upset

"""
Finite posets on dense indices 0..n-1.

Subsets are Python ints used as bitmasks (bit i set iff element i is a
member); the order itself is a read-only boolean numpy matrix.
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations, product
from typing import Iterable, Iterator, List, Sequence, Tuple

import numpy as np

from main.config import get_limits
from main.errors import CycleError, FormatError, guard


def iter_bits(mask: int) -> Iterator[int]:
    index = 0
    while mask:
        if mask & 1:
            yield index
        mask >>= 1
        index += 1


def mask_of(indices: Iterable[int]) -> int:
    mask = 0
    for index in indices:
        mask |= 1 << int(index)
    return mask


def permute_mask(mask: int, perm: Sequence[int]) -> int:
    """Image of a subset under the relabelling i -> perm[i]"""
    return mask_of(perm[i] for i in iter_bits(mask))


class Poset:
    """
    Immutable finite partial order.

    leq[i, j] is True iff i <= j. Construct through validate_poset() unless
    the matrix is already known to be a partial order.
    """

    def __init__(self, leq):
        leq = np.array(leq, dtype=bool)
        assert leq.ndim == 2 and leq.shape[0] == leq.shape[1], f'leq must be square {leq.shape}'
        leq.flags.writeable = False
        self.leq = leq
        self.size = leq.shape[0]
        self.full = (1 << self.size) - 1
        self.up = tuple(mask_of(np.flatnonzero(leq[i])) for i in range(self.size))
        self.down = tuple(mask_of(np.flatnonzero(leq[:, i])) for i in range(self.size))

    def le(self, i: int, j: int) -> bool:
        return bool(self.leq[i, j])

    def is_upset(self, mask: int) -> bool:
        return all(self.up[i] & ~mask == 0 for i in iter_bits(mask))

    def up_closure(self, mask: int) -> int:
        closed = 0
        for i in iter_bits(mask):
            closed |= self.up[i]
        return closed

    def covers(self) -> List[Tuple[int, int]]:
        """Pairs (i, j) with j covering i; these generate the order"""
        strict = self.leq & ~np.eye(self.size, dtype=bool)
        between = (strict.astype(np.int32) @ strict.astype(np.int32)) > 0
        return [(int(i), int(j)) for i, j in np.argwhere(strict & ~between)]

    def __eq__(self, other) -> bool:
        return isinstance(other, Poset) and self.size == other.size and bool(np.array_equal(self.leq, other.leq))

    def __hash__(self) -> int:
        return hash((self.size, self.leq.tobytes()))

    def __repr__(self) -> str:
        return f'Poset(size={self.size}, covers={self.covers()})'


@dataclass(frozen=True)
class UpSet:
    carrier: Poset
    members: int

    def __post_init__(self):
        assert self.carrier.is_upset(self.members), f'{self.members:b} is not up-closed'

    @property
    def elements(self) -> Tuple[int, ...]:
        return tuple(iter_bits(self.members))


@dataclass(frozen=True)
class PosetMap:
    dom: Poset
    cod: Poset
    graph: Tuple[int, ...]

    def __call__(self, x: int) -> int:
        return self.graph[x]

    def image(self, mask: int) -> int:
        return mask_of(self.graph[x] for x in iter_bits(mask))

    def preimage(self, mask: int) -> int:
        return mask_of(x for x in range(self.dom.size) if mask >> self.graph[x] & 1)

    def is_monotone(self) -> bool:
        return all(self.cod.le(self.graph[i], self.graph[j])
                   for i in range(self.dom.size) for j in iter_bits(self.dom.up[i]))

    def is_surjective(self) -> bool:
        return len(set(self.graph)) == self.cod.size

    def is_embedding(self) -> bool:
        """Order embedding: x <= y iff f(x) <= f(y)"""
        return all(self.dom.le(i, j) == self.cod.le(self.graph[i], self.graph[j])
                   for i in range(self.dom.size) for j in range(self.dom.size))

    def compose(self, after: 'PosetMap') -> 'PosetMap':
        """after o self"""
        return PosetMap(self.dom, after.cod, tuple(after.graph[y] for y in self.graph))


def identity_map(poset: Poset) -> PosetMap:
    return PosetMap(poset, poset, tuple(range(poset.size)))


def validate_poset(size: int, generating_pairs: Iterable[Sequence[int]] = ()) -> Poset:
    """Reflexive-transitive closure of the generating pairs; fails on cycles"""
    if size < 0:
        raise FormatError('$.size', f'size must be non-negative, got {size}')
    guard('poset size', size, max(get_limits().max_poset_size, get_limits().max_enum_size))
    leq = np.eye(size, dtype=bool)
    for k, pair in enumerate(generating_pairs):
        i, j = int(pair[0]), int(pair[1])
        if not (0 <= i < size and 0 <= j < size):
            raise FormatError(f'$.leq[{k}]', f'pair ({i}, {j}) out of range for size {size}')
        leq[i, j] = True
    for k in range(size):
        leq |= leq[:, k, None] & leq[None, k, :]
    cycle = np.argwhere(leq & leq.T & ~np.eye(size, dtype=bool))
    if len(cycle):
        i, j = (int(v) for v in cycle[0])
        raise CycleError('antisymmetry violated', (i, j))
    return Poset(leq)


def is_p_morphism(f: PosetMap) -> bool:
    """Monotone, and every successor of f(x) is the image of a successor of x"""
    return f.is_monotone() and all(f.image(f.dom.up[x]) == f.cod.up[f.graph[x]] for x in range(f.dom.size))


def upset_masks(poset: Poset) -> Tuple[int, ...]:
    guard('upset scan 2^size', 1 << poset.size, get_limits().max_subset_scan)
    return _upset_masks(poset)


@lru_cache(maxsize=256)
def _upset_masks(poset: Poset) -> Tuple[int, ...]:
    return tuple(mask for mask in range(1 << poset.size) if poset.is_upset(mask))


def upsets(poset: Poset) -> List[UpSet]:
    """All upsets in ascending bitmask order"""
    return [UpSet(poset, mask) for mask in upset_masks(poset)]


def poset_coproduct(posets: Sequence[Poset]) -> Tuple[Poset, List[PosetMap]]:
    if not posets:
        raise FormatError('$', 'coproduct of an empty list')
    total = sum(p.size for p in posets)
    guard('coproduct size', total, get_limits().max_poset_size)
    leq = np.zeros((total, total), dtype=bool)
    offset = 0
    offsets = []
    for p in posets:
        leq[offset:offset + p.size, offset:offset + p.size] = p.leq
        offsets.append(offset)
        offset += p.size
    union = Poset(leq)
    injections = [PosetMap(p, union, tuple(range(o, o + p.size))) for p, o in zip(posets, offsets)]
    return union, injections


def relabel(poset: Poset, perm: Sequence[int]) -> Poset:
    """Poset with element i renamed perm[i]"""
    inverse = np.argsort(perm)
    return Poset(poset.leq[np.ix_(inverse, inverse)])


def _permuted_code(leq: np.ndarray, perm: Sequence[int]) -> int:
    inverse = np.argsort(perm)
    bits = leq[np.ix_(inverse, inverse)].flatten()
    return int(''.join('1' if b else '0' for b in bits) or '0', 2)


@lru_cache(maxsize=1024)
def canonizing_perms(poset: Poset) -> Tuple[int, Tuple[Tuple[int, ...], ...]]:
    """Minimal adjacency code over all relabellings and the relabellings reaching it"""
    best = None
    winners = []
    for perm in permutations(range(poset.size)):
        code = _permuted_code(poset.leq, perm)
        if best is None or code < best:
            best, winners = code, [perm]
        elif code == best:
            winners.append(perm)
    return (best or 0), tuple(winners)


def automorphisms(poset: Poset) -> List[Tuple[int, ...]]:
    return [perm for perm in permutations(range(poset.size))
            if np.array_equal(relabel(poset, perm).leq, poset.leq)]


def enumerate_posets(n: int) -> Tuple[Poset, ...]:
    """One poset per isomorphism class on n points, deterministic order"""
    guard('poset enumeration size', n, get_limits().max_enum_size)
    return _enumerate_posets(n)


# caps are checked by the public wrappers on every call, the caches only hold results
@lru_cache(maxsize=16)
def _enumerate_posets(n: int) -> Tuple[Poset, ...]:
    # every finite poset has a natural labelling, so strict pairs i < j suffice
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    seen = set()
    found = []
    for chosen in product((False, True), repeat=len(pairs)):
        leq = np.eye(n, dtype=bool)
        for (i, j), take in zip(pairs, chosen):
            leq[i, j] = take
        closed = leq.copy()
        for k in range(n):
            closed |= closed[:, k, None] & closed[None, k, :]
        if not np.array_equal(closed, leq):
            continue
        poset = Poset(leq)
        key, _ = canonizing_perms(poset)
        if key in seen:
            continue
        seen.add(key)
        found.append(poset)
    logging.debug(f"enumerate_posets({n}): {len(found)} isomorphism classes")
    return tuple(found)


def poset_morphisms(dom: Poset, cod: Poset, surjective: bool = False) -> Tuple[Tuple[int, ...], ...]:
    """Graphs of all p-morphisms dom -> cod in lexicographic order"""
    guard('map search |cod|^|dom|', cod.size ** dom.size, get_limits().max_maps)
    return _poset_morphisms(dom, cod, surjective)


@lru_cache(maxsize=4096)
def _poset_morphisms(dom: Poset, cod: Poset, surjective: bool) -> Tuple[Tuple[int, ...], ...]:
    found = []
    for graph in product(range(cod.size), repeat=dom.size):
        if surjective and len(set(graph)) != cod.size:
            continue
        if is_p_morphism(PosetMap(dom, cod, graph)):
            found.append(graph)
    return tuple(found)

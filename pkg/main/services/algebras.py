"""
Finite modal Heyting algebras, complex algebras of frames, and the
homomorphic-image / subalgebra / product operations.
"""
import logging
from itertools import product as cartesian
from typing import Dict, List, Mapping, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from main.config import get_limits
from main.constants.signatures import SIGNATURE_MODALITIES, Kind, get_kind
from main.errors import AlgebraConditionError, KindMismatch, MissingLetterError, SignatureError, guard
from main.services.frames import Frame, modal_operator
from main.services.heyting import FinHA, up_algebra
from main.services.posets import iter_bits
from main.services.syntax import Formula, letters, modal_nodes

BINARY_OPS = {'sto'}


def _op_table(values, arity: int, size: int, name: str) -> np.ndarray:
    table = np.array(values, dtype=np.int32)
    if table.shape != (size,) * arity:
        raise AlgebraConditionError(f'{name} table must have shape {(size,) * arity}', table.shape)
    if table.size and (table.min() < 0 or table.max() >= size):
        raise AlgebraConditionError(f'{name} table values lie in 0..{size - 1}')
    table.flags.writeable = False
    return table


class ModalAlgebra:
    """
    A FinHA with operator tables keyed by modality name.

    box operators must be normal (preserve top and meets), tri operators
    monotone; cin and si operators carry no equations.
    """

    def __init__(self, kind, base: FinHA, ops: Mapping[str, Sequence], validate: bool = True):
        self.kind = get_kind(kind)
        self.base = base
        expected = SIGNATURE_MODALITIES[self.kind]
        if set(ops) != set(expected):
            raise SignatureError(f'{self.kind.value} algebras need operators {sorted(expected)}, got {sorted(ops)}')
        self.ops = {name: _op_table(table, 2 if name in BINARY_OPS else 1, base.size, name)
                    for name, table in ops.items()}
        self._lists = {name: table.tolist() for name, table in self.ops.items()}
        if validate:
            self._check_operators()

    @property
    def size(self) -> int:
        return self.base.size

    def apply(self, name: str, *args: int) -> int:
        value = self._lists[name]
        for a in args:
            value = value[a]
        return value

    def _check_operators(self) -> None:
        base = self.base
        if self.kind == Kind.BOX:
            op = self.ops['box']
            if op[base.top] != base.top:
                raise AlgebraConditionError('box T = T', base.top)
            bad = np.argwhere(op[base.meet_table] != base.meet_table[op[:, None], op[None, :]])
            if len(bad):
                raise AlgebraConditionError('box a & box b = box (a & b)', tuple(int(v) for v in bad[0]))
        elif self.kind == Kind.IM:
            op = self.ops['tri']
            bad = np.argwhere(base.leq & ~base.leq[op[:, None], op[None, :]])
            if len(bad):
                raise AlgebraConditionError('a <= b implies tri a <= tri b', tuple(int(v) for v in bad[0]))

    def __eq__(self, other) -> bool:
        return (isinstance(other, ModalAlgebra) and self.kind == other.kind and self.base == other.base
                and all(np.array_equal(self.ops[k], other.ops[k]) for k in self.ops))

    def __hash__(self) -> int:
        return hash((self.kind, self.base, tuple(self.ops[k].tobytes() for k in sorted(self.ops))))

    def __repr__(self) -> str:
        return f'ModalAlgebra(kind={self.kind.value}, size={self.size})'


def complex_algebra(frame: Frame) -> ModalAlgebra:
    """Upsets of the frame with the operators induced by the predicate liftings"""
    base = up_algebra(frame.base)
    guard('complex algebra size', base.size, get_limits().max_algebra_size)
    labels = base.labels
    ops = {}
    for name in SIGNATURE_MODALITIES[frame.kind]:
        if name in BINARY_OPS:
            ops[name] = [[base.index_of(modal_operator(frame, name, a, b)) for b in labels] for a in labels]
        else:
            ops[name] = [base.index_of(modal_operator(frame, name, a)) for a in labels]
    logging.debug(f"complex algebra of {frame!r}: {base.size} elements")
    return ModalAlgebra(frame.kind, base, ops)


def two_element_algebra(kind, **ops) -> ModalAlgebra:
    """The 2-chain 0 < 1 with given operator tables (identity by default)"""
    kind = get_kind(kind)
    base = FinHA([[0, 0], [0, 1]], [[0, 1], [1, 1]], [[1, 1], [0, 1]])
    tables = {}
    for name in SIGNATURE_MODALITIES[kind]:
        default = [[1, 1], [0, 1]] if name in BINARY_OPS else [0, 1]
        tables[name] = ops.get(name, default)
    return ModalAlgebra(kind, base, tables)


# Evaluation

Assignment = Dict[str, int]


def _check_signature(algebra: ModalAlgebra, formula: Formula) -> None:
    for node in modal_nodes(formula):
        if node not in algebra.ops:
            raise SignatureError(f'modality {node!r} is not in the {algebra.kind.value} signature')


def algebra_eval(algebra: ModalAlgebra, formula: Formula, assignment: Assignment,
                 memo: Optional[Dict[Formula, int]] = None) -> int:
    base = algebra.base
    memo = {} if memo is None else memo

    def evaluate(sub: Formula) -> int:
        if sub in memo:
            return memo[sub]
        node = sub.node
        if node == 'top':
            value = base.top
        elif node == 'bot':
            value = base.bottom
        elif node == 'letter':
            if sub.name not in assignment:
                raise MissingLetterError(f'assignment has no value for {sub.name!r}')
            value = assignment[sub.name]
        elif node == 'and':
            value = base.meet(evaluate(sub.left), evaluate(sub.right))
        elif node == 'or':
            value = base.join(evaluate(sub.left), evaluate(sub.right))
        elif node == 'imp':
            value = base.imp(evaluate(sub.left), evaluate(sub.right))
        else:
            if node not in algebra.ops:
                raise SignatureError(f'modality {node!r} is not in the {algebra.kind.value} signature')
            value = algebra.apply(node, *(evaluate(child) for child in sub.children()))
        memo[sub] = value
        return value

    return evaluate(formula)


class AlgebraVerdict(NamedTuple):
    valid: bool
    counterexample: Optional[Assignment] = None
    value: Optional[int] = None


def algebra_validates(algebra: ModalAlgebra, formula: Formula) -> AlgebraVerdict:
    """The formula evaluates to top under every assignment of its letters"""
    _check_signature(algebra, formula)
    names = sorted(letters(formula))
    guard('assignments |A|^letters', algebra.size ** len(names), get_limits().max_valuations)
    for chosen in cartesian(range(algebra.size), repeat=len(names)):
        assignment = dict(zip(names, chosen))
        value = algebra_eval(algebra, formula, assignment)
        if value != algebra.base.top:
            return AlgebraVerdict(False, assignment, value)
    return AlgebraVerdict(True)


# Homomorphisms

def homomorphism_witness(h: Sequence[int], source: ModalAlgebra, target: ModalAlgebra) -> Optional[Tuple]:
    """None if h preserves the bounds, meet, join, implication and every operator"""
    if source.kind != target.kind:
        raise KindMismatch(f'{source.kind.value} algebra mapped to {target.kind.value} algebra')
    h = np.asarray(h, dtype=np.int64)
    a, b = source.base, target.base
    if h[a.top] != b.top:
        return ('top', int(a.top))
    if h[a.bottom] != b.bottom:
        return ('bottom', int(a.bottom))
    for name, src, dst in (('meet', a.meet_table, b.meet_table), ('join', a.join_table, b.join_table),
                           ('imp', a.imp_table, b.imp_table)):
        bad = np.argwhere(h[src] != dst[h[:, None], h[None, :]])
        if len(bad):
            return (name,) + tuple(int(v) for v in bad[0])
    for name, table in source.ops.items():
        other = target.ops[name]
        if name in BINARY_OPS:
            bad = np.argwhere(h[table] != other[h[:, None], h[None, :]])
        else:
            bad = np.argwhere(h[table] != other[h])
        if len(bad):
            return (name,) + tuple(int(v) for v in bad[0])
    return None


def check_modal_homomorphism(h: Sequence[int], source: ModalAlgebra, target: ModalAlgebra) -> bool:
    return homomorphism_witness(h, source, target) is None


def modal_homomorphisms(source: ModalAlgebra, target: ModalAlgebra, limit: Optional[int] = None,
                        surjective: bool = False) -> List[Tuple[int, ...]]:
    """All modal homomorphisms, as graphs in lexicographic order; top and bottom are pinned"""
    a, b = source.base, target.base
    free = [x for x in range(a.size) if x not in (a.top, a.bottom)]
    if a.top == a.bottom and b.top != b.bottom:
        return []
    guard('homomorphism search |B|^|A|', b.size ** len(free), get_limits().max_maps)
    found = []
    graph = [0] * a.size
    graph[a.top], graph[a.bottom] = b.top, b.bottom
    for chosen in cartesian(range(b.size), repeat=len(free)):
        for x, y in zip(free, chosen):
            graph[x] = y
        if surjective and len(set(graph)) != b.size:
            continue
        if homomorphism_witness(graph, source, target) is None:
            found.append(tuple(graph))
            if limit is not None and len(found) >= limit:
                break
    return found


def is_homomorphic_image(source: ModalAlgebra, target: ModalAlgebra) -> Tuple[bool, Optional[Tuple[int, ...]]]:
    """Whether some surjective modal homomorphism source -> target exists, with the first one found"""
    if target.size > source.size:
        return False, None
    found = modal_homomorphisms(source, target, limit=1, surjective=True)
    return (True, found[0]) if found else (False, None)


# Subalgebras and products

def _closed(algebra: ModalAlgebra, members: int) -> bool:
    base = algebra.base
    elements = list(iter_bits(members))
    for x in elements:
        for name, table in algebra._lists.items():
            if name not in BINARY_OPS and not members >> table[x] & 1:
                return False
        for y in elements:
            results = [base.meet(x, y), base.join(x, y), base.imp(x, y)]
            results += [algebra.apply(name, x, y) for name in algebra.ops if name in BINARY_OPS]
            if any(not members >> r & 1 for r in results):
                return False
    return True


def restrict_algebra(algebra: ModalAlgebra, members: int) -> ModalAlgebra:
    """The subalgebra on a closed set of elements, renumbered in ascending order"""
    keep = list(iter_bits(members))
    position = {x: k for k, x in enumerate(keep)}
    base = algebra.base

    def local(table) -> list:
        return [[position[table[x][y]] for y in keep] for x in keep]

    sub_base = FinHA(local(base._meet), local(base._join), local(base._imp),
                     labels=[base.labels[x] for x in keep])
    ops = {}
    for name, table in algebra._lists.items():
        ops[name] = local(table) if name in BINARY_OPS else [position[table[x]] for x in keep]
    return ModalAlgebra(algebra.kind, sub_base, ops)


def subalgebras(algebra: ModalAlgebra) -> List[Tuple[ModalAlgebra, Tuple[int, ...]]]:
    """Every subalgebra with its inclusion, by ascending member bitmask"""
    guard('subalgebra scan size', algebra.size, get_limits().subalgebra_scan)
    base = algebra.base
    bounds = (1 << base.top) | (1 << base.bottom)
    found = []
    for members in range(1 << algebra.size):
        if members & bounds != bounds or not _closed(algebra, members):
            continue
        found.append((restrict_algebra(algebra, members), tuple(iter_bits(members))))
    return found


def _pair_table(first: np.ndarray, second: np.ndarray) -> np.ndarray:
    n1, n2 = first.shape[0], second.shape[0]
    table = first[:, None, :, None] * n2 + second[None, :, None, :]
    return table.reshape(n1 * n2, n1 * n2)


def product(first: ModalAlgebra, second: ModalAlgebra) -> ModalAlgebra:
    """Componentwise product; the pair (a, b) is element a * |second| + b"""
    if first.kind != second.kind:
        raise KindMismatch(f'cannot multiply {first.kind.value} and {second.kind.value} algebras')
    guard('product size', first.size * second.size, get_limits().max_algebra_size)
    a, b = first.base, second.base
    labels = list(cartesian(a.labels, b.labels))
    base = FinHA(_pair_table(a.meet_table, b.meet_table), _pair_table(a.join_table, b.join_table),
                 _pair_table(a.imp_table, b.imp_table), labels=labels)
    ops = {}
    for name, table in first.ops.items():
        other = second.ops[name]
        if name in BINARY_OPS:
            ops[name] = _pair_table(table, other)
        else:
            ops[name] = (table[:, None] * second.size + other[None, :]).reshape(-1)
    return ModalAlgebra(first.kind, base, ops)


def projection(first: ModalAlgebra, second: ModalAlgebra, index: int) -> Tuple[int, ...]:
    """Graph of the projection from product(first, second) onto a factor"""
    n2 = second.size
    return tuple((k // n2) if index == 0 else (k % n2) for k in range(first.size * n2))

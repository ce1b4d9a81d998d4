"""
The four frame kinds as dialgebras x -> gamma(x) in T(X, <=).

T-values per kind:
    box  successor set R[x], an upset (P_up, ordered by reverse inclusion)
    si   successor set R_s[x], any subset (powerset, reverse inclusion)
    im   neighbourhood N(x), an up-closed family of upsets (the functor M)
    cin  pair (N_box(x), N_dia(x)) of arbitrary subset families (the functor N)

Subsets are bitmasks; families are frozensets of bitmasks.
"""
import logging
from dataclasses import dataclass
from itertools import product
from typing import Callable, Dict, FrozenSet, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from main.config import get_limits
from main.constants.signatures import SIGNATURE_MODALITIES, Kind, get_kind
from main.errors import (CoherenceError, FormatError, FrameConditionError, KindError, KindMismatch,
                         MissingLetterError, SignatureError, ValuationError, guard)
from main.services.heyting import implication_mask
from main.services.posets import (Poset, PosetMap, canonizing_perms, is_p_morphism, iter_bits, mask_of,
                                  permute_mask, poset_coproduct, poset_morphisms, relabel, upset_masks,
                                  validate_poset)
from main.services.syntax import Formula, letters, modal_nodes

CIN_MAX_SIZE = 4

Family = FrozenSet[int]


class Frame:
    """
    A frame of one kind over a finite poset.

    ``structure[x]`` is the T-value gamma(x): a mask for box/si, a family for
    im, a pair of families for cin. Build through validate_frame() or
    make_frame() so the frame conditions are checked.
    """

    def __init__(self, kind: Kind, base: Poset, structure: Sequence):
        self.kind = get_kind(kind)
        self.base = base
        self.structure = tuple(structure)
        self._operators: Dict[Tuple, int] = {}

    @property
    def size(self) -> int:
        return self.base.size

    @property
    def full(self) -> int:
        return self.base.full

    def gamma(self, x: int):
        return self.structure[x]

    def successors(self, x: int) -> int:
        if self.kind not in (Kind.BOX, Kind.SI):
            raise KindError(f'{self.kind.value} frames have no relation')
        return self.structure[x]

    def relation_pairs(self) -> List[Tuple[int, int]]:
        return [(x, y) for x in range(self.size) for y in iter_bits(self.successors(x))]

    def __eq__(self, other) -> bool:
        return (isinstance(other, Frame) and self.kind == other.kind and self.base == other.base
                and self.structure == other.structure)

    def __hash__(self) -> int:
        return hash((self.kind, self.base, self.structure))

    def __repr__(self) -> str:
        return f'Frame(kind={self.kind.value}, size={self.size})'


# Families

def all_masks(poset: Poset) -> range:
    guard('subset scan 2^size', 1 << poset.size, get_limits().max_subset_scan)
    return range(1 << poset.size)


def up_family(poset: Poset, generators: Iterable[int]) -> Family:
    """The upsets lying above some generator"""
    generators = list(generators)
    return frozenset(u for u in upset_masks(poset) if any(g & ~u == 0 for g in generators))


def minimal_members(family: Iterable[int]) -> List[int]:
    family = sorted(family)
    return [a for a in family if not any(b != a and b & ~a == 0 for b in family)]


# Frame conditions

def _check_box(frame: Frame, relation_name: str, require_upsets: bool) -> None:
    poset, rel = frame.base, frame.structure
    for x in range(frame.size):
        for y in iter_bits(poset.up[x]):
            bad = rel[y] & ~rel[x]
            if bad:
                z = next(iter_bits(bad))
                raise FrameConditionError(f'x <= y {relation_name} z requires x {relation_name} z', (x, y, z))
    if not require_upsets:
        return
    for x in range(frame.size):
        for y in iter_bits(rel[x]):
            bad = poset.up[y] & ~rel[x]
            if bad:
                z = next(iter_bits(bad))
                raise FrameConditionError(f'x {relation_name} y <= z requires x {relation_name} z', (x, y, z))


def _check_im(frame: Frame) -> None:
    poset = frame.base
    upsets = upset_masks(poset)
    for x, family in enumerate(frame.structure):
        for a in sorted(family):
            if not poset.is_upset(a):
                raise FrameConditionError('neighbourhoods contain only upsets', (x, a))
            for b in upsets:
                if a & ~b == 0 and b not in family:
                    raise FrameConditionError('neighbourhoods are closed under upset supersets', (x, a, b))
    _check_monotone(frame, lambda v: v, 'x <= y implies N(x) subset of N(y)')


def _check_monotone(frame: Frame, component: Callable, condition: str, antitone: bool = False) -> None:
    poset = frame.base
    for x in range(frame.size):
        for y in iter_bits(poset.up[x]):
            small, large = component(frame.structure[x]), component(frame.structure[y])
            if antitone:
                small, large = large, small
            missing = sorted(small - large)
            if missing:
                raise FrameConditionError(condition, (x, y, missing[0]))


def _check_cin(frame: Frame) -> None:
    guard('cin frame size', frame.size, CIN_MAX_SIZE)
    for x, pair in enumerate(frame.structure):
        if not (isinstance(pair, tuple) and len(pair) == 2):
            raise FrameConditionError('cin structure is a pair of families', x)
        for a in sorted(pair[0] | pair[1]):
            if a & ~frame.full:
                raise FrameConditionError('neighbourhood members are subsets of the carrier', (x, a))
    _check_monotone(frame, lambda v: v[0], 'x <= y implies N_box(x) subset of N_box(y)')
    _check_monotone(frame, lambda v: v[1], 'x <= y implies N_dia(x) superset of N_dia(y)', antitone=True)


def check_frame_conditions(frame: Frame) -> Frame:
    if len(frame.structure) != frame.size:
        raise FrameConditionError('one structure entry per state', len(frame.structure))
    if frame.kind == Kind.BOX:
        _check_box(frame, 'R', require_upsets=True)
    elif frame.kind == Kind.SI:
        _check_box(frame, 'R_s', require_upsets=False)
    elif frame.kind == Kind.IM:
        _check_im(frame)
    else:
        _check_cin(frame)
    return frame


def make_frame(kind, base: Poset, structure: Sequence, validate: bool = True) -> Frame:
    frame = Frame(kind, base, structure)
    return check_frame_conditions(frame) if validate else frame


def _index_list(value, path: str, size: int) -> List[int]:
    if not isinstance(value, list):
        raise FormatError(path, 'expected a list of state indices')
    for k, v in enumerate(value):
        if not isinstance(v, int) or isinstance(v, bool) or not 0 <= v < size:
            raise FormatError(f'{path}[{k}]', f'state index out of range for size {size}: {v!r}')
    return value


def _pair_list(raw: dict, key: str, size: int) -> List[Tuple[int, int]]:
    pairs = raw.get(key, [])
    if not isinstance(pairs, list):
        raise FormatError(f'$.{key}', 'expected a list of [i, j] pairs')
    for k, pair in enumerate(pairs):
        if not (isinstance(pair, list) and len(pair) == 2):
            raise FormatError(f'$.{key}[{k}]', 'expected a pair [i, j]')
        _index_list(pair, f'$.{key}[{k}]', size)
    return [tuple(pair) for pair in pairs]


def _families(raw: dict, key: str, size: int) -> List[List[int]]:
    per_state = raw.get(key)
    if not isinstance(per_state, list) or len(per_state) != size:
        raise FormatError(f'$.{key}', f'expected one list of subsets per state ({size})')
    decoded = []
    for x, family in enumerate(per_state):
        if not isinstance(family, list):
            raise FormatError(f'$.{key}[{x}]', 'expected a list of subsets')
        decoded.append([mask_of(_index_list(member, f'$.{key}[{x}][{k}]', size))
                        for k, member in enumerate(family)])
    return decoded


def validate_frame(raw: dict) -> Frame:
    """
    Decode frame JSON and check the frame conditions.

    ``nbhd`` lists generate the im neighbourhoods: each family is the upward
    closure of the listed upsets.
    """
    if not isinstance(raw, dict):
        raise FormatError('$', 'a frame is a JSON object')
    try:
        kind = get_kind(raw.get('kind'))
    except KindError as e:
        raise FormatError('$.kind', str(e))
    size = raw.get('size')
    if not isinstance(size, int) or isinstance(size, bool) or size < 0:
        raise FormatError('$.size', f'expected a non-negative integer, got {size!r}')
    base = validate_poset(size, _pair_list(raw, 'leq', size))
    if kind in (Kind.BOX, Kind.SI):
        structure = [0] * size
        for x, y in _pair_list(raw, 'rel', size):
            structure[x] |= 1 << y
    elif kind == Kind.IM:
        families = _families(raw, 'nbhd', size)
        for x, family in enumerate(families):
            for a in family:
                if not base.is_upset(a):
                    raise FrameConditionError('neighbourhoods contain only upsets', (x, a))
        structure = [up_family(base, family) for family in families]
    else:
        guard('cin frame size', size, CIN_MAX_SIZE)
        boxes, dias = _families(raw, 'nbox', size), _families(raw, 'ndia', size)
        structure = [(frozenset(b), frozenset(d)) for b, d in zip(boxes, dias)]
    frame = make_frame(kind, base, structure)
    logging.debug(f"validated {frame!r}")
    return frame


# Predicate liftings, as predicates on a T-value and upset arguments

def _lift_box(poset, value, a):
    return value & ~a == 0


def _lift_tri(poset, value, a):
    return a in value


def _lift_cin_box(poset, value, a):
    return a in value[0]


def _lift_cin_dia(poset, value, a):
    return (poset.full & ~a) not in value[1]


def _lift_sto(poset, value, a, b):
    return value & a & ~b == 0


PREDICATE_LIFTINGS: Dict[Kind, Dict[str, Callable]] = {
    Kind.BOX: {'box': _lift_box},
    Kind.IM: {'tri': _lift_tri},
    Kind.CIN: {'box': _lift_cin_box, 'dia': _lift_cin_dia},
    Kind.SI: {'sto': _lift_sto},
}


def lift(kind: Kind, modality: str, poset: Poset, value, *args: int) -> bool:
    return PREDICATE_LIFTINGS[kind][modality](poset, value, *args)


def modal_operator(frame: Frame, modality: str, *args: int) -> int:
    """{x | gamma(x) lies in the lifting of the arguments}, e.g. box_R(a) = {x | R[x] subset of a}"""
    key = (modality,) + args
    cached = frame._operators.get(key)
    if cached is None:
        if modality not in SIGNATURE_MODALITIES[frame.kind]:
            raise SignatureError(f'modality {modality!r} is not in the {frame.kind.value} signature')
        liftings = PREDICATE_LIFTINGS[frame.kind][modality]
        cached = mask_of(x for x in range(frame.size) if liftings(frame.base, frame.structure[x], *args))
        frame._operators[key] = cached
    return cached


# Models

Valuation = Dict[str, int]


@dataclass(frozen=True)
class Model:
    frame: Frame
    valuation: Tuple[Tuple[str, int], ...]

    @property
    def assignment(self) -> Valuation:
        return dict(self.valuation)


def make_model(frame: Frame, valuation: Dict[str, int]) -> Model:
    for name, mask in sorted(valuation.items()):
        if mask & ~frame.full or not frame.base.is_upset(mask):
            raise ValuationError('valuations assign upsets', (name, sorted(iter_bits(mask))))
    return Model(frame, tuple(sorted(valuation.items())))


def truth_set(model: Model, formula: Formula, memo: Optional[Dict[Formula, int]] = None) -> int:
    """The denotation of the formula as a bitmask, memoised per subformula"""
    frame = model.frame
    assignment = model.assignment
    memo = {} if memo is None else memo

    def evaluate(sub: Formula) -> int:
        if sub in memo:
            return memo[sub]
        node = sub.node
        if node == 'top':
            value = frame.full
        elif node == 'bot':
            value = 0
        elif node == 'letter':
            if sub.name not in assignment:
                raise MissingLetterError(f'valuation has no value for {sub.name!r}')
            value = assignment[sub.name]
        elif node == 'and':
            value = evaluate(sub.left) & evaluate(sub.right)
        elif node == 'or':
            value = evaluate(sub.left) | evaluate(sub.right)
        elif node == 'imp':
            value = implication_mask(frame.base, evaluate(sub.left), evaluate(sub.right))
        else:
            value = modal_operator(frame, node, *(evaluate(child) for child in sub.children()))
        memo[sub] = value
        return value

    return evaluate(formula)


def satisfies(model: Model, x: int, formula: Formula) -> bool:
    return bool(truth_set(model, formula) >> x & 1)


class Verdict(NamedTuple):
    valid: bool
    counterexample: Optional[Valuation] = None
    state: Optional[int] = None


def valuations(poset: Poset, names: Sequence[str]) -> Iterable[Valuation]:
    """Every valuation of the given letters, in lexicographic order of upset indices"""
    masks = upset_masks(poset)
    guard('valuations |Up|^letters', len(masks) ** len(names), get_limits().max_valuations)
    for chosen in product(masks, repeat=len(names)):
        yield dict(zip(names, chosen))


def frame_validates(frame: Frame, formula: Formula) -> Verdict:
    """Quantify over valuations of the letters occurring in the formula; first failure wins"""
    for node in modal_nodes(formula):
        if node not in SIGNATURE_MODALITIES[frame.kind]:
            raise SignatureError(f'modality {node!r} is not in the {frame.kind.value} signature')
    names = sorted(letters(formula))
    for valuation in valuations(frame.base, names):
        denotation = truth_set(Model(frame, tuple(valuation.items())), formula)
        if denotation != frame.full:
            return Verdict(False, valuation, next(iter_bits(frame.full & ~denotation)))
    return Verdict(True)


# Functor actions and morphisms

def t_values(kind, poset: Poset) -> List:
    """All elements of T(poset); cin enumerates single families, the components range independently"""
    kind = get_kind(kind)
    if kind == Kind.BOX:
        return list(upset_masks(poset))
    if kind == Kind.SI:
        return list(all_masks(poset))
    members = list(upset_masks(poset)) if kind == Kind.IM else list(all_masks(poset))
    guard('family scan 2^members', 1 << len(members), get_limits().max_subset_scan)
    families = []
    for selector in range(1 << len(members)):
        family = frozenset(members[i] for i in iter_bits(selector))
        if kind == Kind.IM and up_family(poset, family) != family:
            continue
        families.append(family)
    return families


def functor_action(kind, f: PosetMap, value):
    """T f applied to a T-value over f.dom"""
    kind = get_kind(kind)
    if kind in (Kind.BOX, Kind.SI):
        return f.image(value)
    if kind == Kind.IM:
        return frozenset(a for a in upset_masks(f.cod) if f.preimage(a) in value)
    return tuple(frozenset(a for a in all_masks(f.cod) if f.preimage(a) in component) for component in value)


def _kind_witness(f: PosetMap, source: Frame, target: Frame) -> Optional[Tuple[str, Tuple]]:
    kind = source.kind
    if kind in (Kind.BOX, Kind.SI):
        name = 'R' if kind == Kind.BOX else 'R_s'
        for x in range(source.size):
            for y in iter_bits(source.structure[x]):
                if not target.structure[f(x)] >> f(y) & 1:
                    return f'forth: x {name} y requires f(x) {name} f(y)', (x, y)
            for z in iter_bits(target.structure[f(x)] & ~f.image(source.structure[x])):
                return f'back: f(x) {name} z needs a {name}-successor of x mapped to z', (x, z)
        return None
    if kind == Kind.IM:
        for x in range(source.size):
            for a in upset_masks(target.base):
                if (f.preimage(a) in source.structure[x]) != (a in target.structure[f(x)]):
                    return 'f^-1(a) in N(x) iff a in N\'(f(x))', (x, a)
        return None
    for x in range(source.size):
        for component, name in ((0, 'N_box'), (1, 'N_dia')):
            for a in all_masks(target.base):
                if (f.preimage(a) in source.structure[x][component]) != (a in target.structure[f(x)][component]):
                    return f"f^-1(a) in {name}(x) iff a in {name}'(f(x))", (x, a)
    return None


def check_frame_morphism(f: PosetMap, source: Frame, target: Frame) -> Optional[Tuple[str, Tuple]]:
    """
    None when f is a frame morphism, otherwise (condition, witness).

    The elementwise kind conditions and the dialgebra square T f o gamma = gamma' o f
    are computed independently; CoherenceError if they disagree.
    """
    if source.kind != target.kind:
        raise KindMismatch(f'{source.kind.value} frame mapped to {target.kind.value} frame')
    if f.dom != source.base or f.cod != target.base:
        raise KindMismatch('map does not match the frame carriers')
    if not is_p_morphism(f):
        return 'p-morphism of the underlying posets', _p_morphism_witness(f)
    witness = _kind_witness(f, source, target)
    square = all(functor_action(source.kind, f, source.structure[x]) == target.structure[f(x)]
                 for x in range(source.size))
    if square != (witness is None):
        raise CoherenceError('morphism conditions disagree with the dialgebra square', witness)
    return witness


def _p_morphism_witness(f: PosetMap) -> Tuple:
    for x in range(f.dom.size):
        for y in iter_bits(f.dom.up[x]):
            if not f.cod.le(f(x), f(y)):
                return (x, y)
        missing = f.cod.up[f(x)] & ~f.image(f.dom.up[x])
        if missing:
            return (x, next(iter_bits(missing)))
    return ()


def is_frame_morphism(f: PosetMap, source: Frame, target: Frame) -> bool:
    return check_frame_morphism(f, source, target) is None


def is_frame_isomorphism(f: PosetMap, source: Frame, target: Frame) -> bool:
    return source.size == target.size and f.is_surjective() and is_frame_morphism(f, source, target)


def pullback_valuation(f: PosetMap, valuation: Valuation) -> Valuation:
    """V = f^-1 o V'"""
    return {name: f.preimage(mask) for name, mask in valuation.items()}


def upward_valuation(f: PosetMap, valuation: Valuation) -> Valuation:
    """Push a valuation forward along f and close upwards in the codomain"""
    return {name: f.cod.up_closure(f.image(mask)) for name, mask in valuation.items()}


def lifting_naturality(kind, f: PosetMap) -> Optional[Tuple]:
    """
    None when every lifting commutes with f: lambda(v, f^-1 a) == lambda(T f(v), a)
    for all v in T(dom f) and upsets a of cod f. Otherwise the failing (modality, v, args).
    """
    kind = get_kind(kind)
    cod_upsets = upset_masks(f.cod)
    values = t_values(kind, f.dom)
    if kind == Kind.CIN:
        values = [(w, w) for w in values]
    for modality, liftings in PREDICATE_LIFTINGS[kind].items():
        arity = 2 if modality == 'sto' else 1
        for value in values:
            image = functor_action(kind, f, value)
            for args in product(cod_upsets, repeat=arity):
                pulled = tuple(f.preimage(a) for a in args)
                if liftings(f.dom, value, *pulled) != liftings(f.cod, image, *args):
                    return modality, value, args
    return None


# Constructions

def disjoint_union(frames: Sequence[Frame]) -> Tuple[Frame, List[PosetMap]]:
    if not frames:
        raise FormatError('$', 'disjoint union of an empty list')
    kind = frames[0].kind
    for frame in frames[1:]:
        if frame.kind != kind:
            raise KindMismatch(f'cannot join {kind.value} and {frame.kind.value} frames')
    base, injections = poset_coproduct([frame.base for frame in frames])
    structure = []
    if kind in (Kind.BOX, Kind.SI):
        for frame, inj in zip(frames, injections):
            structure.extend(inj.image(r) for r in frame.structure)
    else:
        # a belongs to N(x_k) iff its trace on the k-th block belongs to N_k(x_k)
        members = list(upset_masks(base)) if kind == Kind.IM else list(all_masks(base))
        for frame, inj in zip(frames, injections):
            offset = inj(0) if frame.size else 0
            block = frame.full << offset

            def traced(family: Family) -> Family:
                return frozenset(a for a in members if (a & block) >> offset in family)

            for value in frame.structure:
                structure.append(traced(value) if kind == Kind.IM else (traced(value[0]), traced(value[1])))
    union = make_frame(kind, base, structure)
    return union, [PosetMap(frame.base, base, inj.graph) for frame, inj in zip(frames, injections)]


def restrict_frame(frame: Frame, subset: int) -> Tuple[Frame, PosetMap]:
    """Induced relation on a subset of a box or si frame, renumbered in ascending order, with its inclusion map"""
    keep = list(iter_bits(subset))
    position = {x: k for k, x in enumerate(keep)}
    base = Poset(frame.base.leq[keep][:, keep])

    def local(mask: int) -> int:
        return mask_of(position[x] for x in iter_bits(mask & subset))

    structure = [local(frame.structure[x]) for x in keep]
    return Frame(frame.kind, base, structure), PosetMap(base, frame.base, tuple(keep))


def generate_subframe(frame: Frame, seeds: int) -> Tuple[Frame, PosetMap]:
    """Smallest subset containing the seeds closed under <= and the relation"""
    if frame.kind not in (Kind.BOX, Kind.SI):
        raise KindMismatch(f'generated subframes are computed for box and si frames, not {frame.kind.value}')
    closed, frontier = 0, seeds & frame.full
    while frontier:
        closed |= frontier
        reached = 0
        for x in iter_bits(frontier):
            reached |= frame.base.up[x] | frame.structure[x]
        frontier = reached & ~closed
    sub, inclusion = restrict_frame(frame, closed)
    return check_frame_conditions(sub), inclusion


def generated_subframe_check(f: PosetMap, sub: Frame, frame: Frame) -> bool:
    return f.is_embedding() and is_frame_morphism(f, sub, frame)


def p_morphic_image_check(f: PosetMap, frame: Frame, image: Frame) -> bool:
    return f.is_surjective() and is_frame_morphism(f, frame, image)


def find_p_morphic_images(frame: Frame, candidates: Sequence[Frame]) -> List[Tuple[Frame, PosetMap]]:
    """Every (candidate, surjective morphism) pair, candidates in order, maps lexicographic"""
    found = []
    for candidate in candidates:
        if candidate.kind != frame.kind or candidate.size > frame.size or candidate.size == 0:
            continue
        for graph in poset_morphisms(frame.base, candidate.base, surjective=True):
            f = PosetMap(frame.base, candidate.base, graph)
            if is_frame_morphism(f, frame, candidate):
                found.append((candidate, f))
    return found


def visible_value(poset: Poset, value: Tuple[Family, Family]) -> Tuple[Family, Family]:
    """The cin neighbourhoods the semantics can see: upsets in N_box, complements of upsets in N_dia"""
    boxes, dias = value
    return (frozenset(a for a in boxes if poset.is_upset(a)),
            frozenset(c for c in dias if poset.is_upset(poset.full & ~c)))


def upset_reduct(frame: Frame) -> Frame:
    """For cin frames, keep only the visible neighbourhoods. Other kinds are returned as is."""
    if frame.kind != Kind.CIN:
        return frame
    return make_frame(Kind.CIN, frame.base, [visible_value(frame.base, value) for value in frame.structure])


# Isomorphism

def _encode(kind: Kind, value, perm: Sequence[int]):
    if kind in (Kind.BOX, Kind.SI):
        return permute_mask(value, perm)
    if kind == Kind.IM:
        return tuple(sorted(permute_mask(a, perm) for a in minimal_members(value)))
    return tuple(tuple(sorted(permute_mask(a, perm) for a in family)) for family in value)


def relabel_frame(frame: Frame, perm: Sequence[int]) -> Frame:
    """Frame with state x renamed perm[x]"""
    structure = [None] * frame.size
    for x in range(frame.size):
        value = frame.structure[x]
        if frame.kind in (Kind.BOX, Kind.SI):
            moved = permute_mask(value, perm)
        elif frame.kind == Kind.IM:
            moved = frozenset(permute_mask(a, perm) for a in value)
        else:
            moved = tuple(frozenset(permute_mask(a, perm) for a in family) for family in value)
        structure[perm[x]] = moved
    return Frame(frame.kind, relabel(frame.base, perm), structure)


def frame_certificate(frame: Frame) -> Tuple:
    """Equal certificates iff the frames are isomorphic"""
    code, perms = canonizing_perms(frame.base)
    best = None
    for perm in perms:
        encoded = [None] * frame.size
        for x in range(frame.size):
            encoded[perm[x]] = _encode(frame.kind, frame.structure[x], perm)
        encoded = tuple(encoded)
        if best is None or encoded < best:
            best = encoded
    return frame.kind.value, frame.size, code, best or ()


def are_isomorphic(first: Frame, second: Frame) -> bool:
    return first.kind == second.kind and frame_certificate(first) == frame_certificate(second)

"""
JSON codecs for frames, valuations, algebras and maps.

Every writer here produces output its reader accepts. Frame JSON:

    {"kind": "box|im|cin|si", "size": n, "leq": [[i, j], ...],
     "rel": [[i, j], ...]                   box, si
     "nbhd": [[[...], ...], ...]            im, minimal upsets per state
     "nbox": [...], "ndia": [...]}          cin, every member per state
"""
import json
import logging
from typing import Dict, List

from main.constants.signatures import SIGNATURE_MODALITIES, Kind, get_kind
from main.errors import FormatError, KindError, UsageError
from main.services.algebras import BINARY_OPS, ModalAlgebra
from main.services.frames import Frame, Model, make_model, minimal_members, validate_frame
from main.services.heyting import FinHA
from main.services.posets import Poset, PosetMap, iter_bits, mask_of


def load_json(path: str):
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except FileNotFoundError:
        raise UsageError(f'file not found: {path}')
    except json.JSONDecodeError as e:
        raise FormatError('$', f'{path} is not valid JSON: {e.msg} (line {e.lineno})')


def dump_json(data) -> str:
    return json.dumps(data, sort_keys=True, indent=2)


def states(mask: int) -> List[int]:
    return list(iter_bits(mask))


# Frames

def read_frame(path: str) -> Frame:
    frame = validate_frame(load_json(path))
    logging.info(f"Loaded {frame!r} from {path}")
    return frame


def frame_to_json(frame: Frame) -> Dict:
    data = {
        'kind': frame.kind.value,
        'size': frame.size,
        'leq': [list(pair) for pair in frame.base.covers()],
    }
    if frame.kind in (Kind.BOX, Kind.SI):
        data['rel'] = [list(pair) for pair in frame.relation_pairs()]
    elif frame.kind == Kind.IM:
        data['nbhd'] = [[states(a) for a in minimal_members(family)] for family in frame.structure]
    else:
        data['nbox'] = [[states(a) for a in sorted(boxes)] for boxes, _ in frame.structure]
        data['ndia'] = [[states(a) for a in sorted(dias)] for _, dias in frame.structure]
    return data


# Valuations

def valuation_from_json(raw, frame: Frame) -> Model:
    """``{"p": [0, 2], ...}``; each list must be an upset of the frame"""
    if not isinstance(raw, dict):
        raise FormatError('$', 'a valuation is a JSON object from letters to state lists')
    assignment = {}
    for name, members in sorted(raw.items()):
        if not isinstance(members, list):
            raise FormatError(f'$.{name}', 'expected a list of state indices')
        for k, x in enumerate(members):
            if not isinstance(x, int) or isinstance(x, bool) or not 0 <= x < frame.size:
                raise FormatError(f'$.{name}[{k}]', f'state index out of range for size {frame.size}: {x!r}')
        assignment[name] = mask_of(members)
    return make_model(frame, assignment)


def valuation_to_json(valuation: Dict[str, int]) -> Dict[str, List[int]]:
    return {name: states(mask) for name, mask in sorted(valuation.items())}


# Algebras

def _label_to_json(label):
    if isinstance(label, tuple):
        return [_label_to_json(part) for part in label]
    return label


def _label_from_json(label):
    if isinstance(label, list):
        return tuple(_label_from_json(part) for part in label)
    return label


def algebra_to_json(algebra: ModalAlgebra) -> Dict:
    """
    Operation tables indexed by element. For complex algebras the labels are
    the upsets as bitmasks and ``upsets`` lists their states.
    """
    base = algebra.base
    data = {
        'kind': algebra.kind.value,
        'size': base.size,
        'top': base.top,
        'bottom': base.bottom,
        'meet': base.meet_table.tolist(),
        'join': base.join_table.tolist(),
        'imp': base.imp_table.tolist(),
        'ops': {name: table.tolist() for name, table in sorted(algebra.ops.items())},
        'labels': [_label_to_json(label) for label in base.labels],
    }
    if all(isinstance(label, int) for label in base.labels) and base.labels != tuple(range(base.size)):
        data['upsets'] = [states(label) for label in base.labels]
    return data


def _square_table(raw: dict, key: str, size: int) -> List[List[int]]:
    table = raw.get(key)
    if not (isinstance(table, list) and len(table) == size
            and all(isinstance(row, list) and len(row) == size for row in table)):
        raise FormatError(f'$.{key}', f'expected a {size}x{size} table')
    for i, row in enumerate(table):
        for j, v in enumerate(row):
            if not isinstance(v, int) or isinstance(v, bool) or not 0 <= v < size:
                raise FormatError(f'$.{key}[{i}][{j}]', f'element index out of range: {v!r}')
    return table


def algebra_from_json(raw) -> ModalAlgebra:
    if not isinstance(raw, dict):
        raise FormatError('$', 'an algebra is a JSON object')
    try:
        kind = get_kind(raw.get('kind'))
    except KindError as e:
        raise FormatError('$.kind', str(e))
    size = raw.get('size')
    if not isinstance(size, int) or isinstance(size, bool) or size < 1:
        raise FormatError('$.size', f'expected a positive integer, got {size!r}')
    labels = raw.get('labels')
    if labels is not None:
        if not isinstance(labels, list) or len(labels) != size:
            raise FormatError('$.labels', f'expected {size} labels')
        labels = [_label_from_json(label) for label in labels]
    base = FinHA(_square_table(raw, 'meet', size), _square_table(raw, 'join', size),
                 _square_table(raw, 'imp', size), labels=labels)
    for key in ('top', 'bottom'):
        if key in raw and raw[key] != getattr(base, key):
            raise FormatError(f'$.{key}', f'tables put {key} at {getattr(base, key)}, file says {raw[key]!r}')
    ops = raw.get('ops')
    if not isinstance(ops, dict):
        raise FormatError('$.ops', 'expected an object of operator tables')
    decoded = {}
    for name in sorted(SIGNATURE_MODALITIES[kind]):
        if name not in ops:
            raise FormatError(f'$.ops.{name}', f'missing operator for the {kind.value} signature')
        if name in BINARY_OPS:
            decoded[name] = _square_table(ops, name, size)
        else:
            table = ops[name]
            if not (isinstance(table, list) and len(table) == size):
                raise FormatError(f'$.ops.{name}', f'expected {size} entries')
            decoded[name] = table
    return ModalAlgebra(kind, base, decoded)


# Maps

def map_from_json(raw, dom: Poset, cod: Poset) -> PosetMap:
    """A map is ``[f(0), f(1), ...]`` or ``{"map": [...]}``"""
    graph = raw.get('map') if isinstance(raw, dict) else raw
    path = '$.map' if isinstance(raw, dict) else '$'
    if not isinstance(graph, list) or len(graph) != dom.size:
        raise FormatError(path, f'expected {dom.size} target states')
    for k, y in enumerate(graph):
        if not isinstance(y, int) or isinstance(y, bool) or not 0 <= y < cod.size:
            raise FormatError(f'{path}[{k}]', f'target state out of range for size {cod.size}: {y!r}')
    return PosetMap(dom, cod, tuple(graph))


def map_to_json(f: PosetMap) -> List[int]:
    return list(f.graph)

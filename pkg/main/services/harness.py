"""
Frame universes, Fr(axioms) and the closure audits behind the
Goldblatt-Thomason characterisation, plus the shared test corpus.
"""
import json
import logging
import math
from dataclasses import dataclass, field
from itertools import combinations_with_replacement, product
from multiprocessing import Pool
from typing import Callable, Dict, Iterator, List, NamedTuple, Optional, Sequence, Set, Tuple, Union

import numpy as np
import pandas as pd
from tqdm import tqdm

from main.config import activate_limits, get_limits, warn_memory
from main.constants.signatures import Kind, get_kind
from main.errors import SizeGuard, guard
from main.services.duality import prime_filter_extension
from main.services.frames import (Frame, Valuation, disjoint_union, find_p_morphic_images, frame_certificate,
                                  frame_validates, is_frame_isomorphism, is_frame_morphism, make_frame,
                                  restrict_frame, t_values, upset_reduct, valuations)
from main.services.posets import Poset, PosetMap, enumerate_posets, iter_bits, poset_morphisms
from main.services.syntax import AxiomPair, Formula, enumerate_formulas, sample_formulas

Axiom = Union[Formula, AxiomPair]


def _as_formula(axiom: Axiom) -> Formula:
    return axiom.as_formula() if isinstance(axiom, AxiomPair) else axiom


@dataclass
class Universe:
    """
    One frame per isomorphism class, sizes 1..max_size, in enumeration order.

    A sampled universe holds seeded random structures for the posets whose
    structure count exceeds the cap, so it may miss isomorphism classes.
    """
    kind: Kind
    max_size: int
    frames: List[Frame]
    certificates: Dict[Tuple, int] = field(default_factory=dict)
    sampled: bool = False

    def __post_init__(self):
        if not self.certificates:
            self.certificates = {frame_certificate(frame): i for i, frame in enumerate(self.frames)}

    def __len__(self) -> int:
        return len(self.frames)

    def index_of(self, frame: Frame) -> Optional[int]:
        """Index of the isomorphic universe member, if any"""
        return self.certificates.get(frame_certificate(frame))


# Universe enumeration

def _monotone_assignments(poset: Poset, values: Sequence, fits: Callable) -> Iterator[Tuple[int, ...]]:
    """
    Index tuples choosing a value per state with fits(value(x), value(y)) whenever x <= y.
    States are numbered along a linear extension, so only earlier states constrain later ones.
    """
    n = poset.size
    chosen: List[int] = []
    below = [[i for i in range(x) if poset.le(i, x)] for x in range(n)]

    def extend(x: int) -> Iterator[Tuple[int, ...]]:
        if x == n:
            yield tuple(chosen)
            return
        for k, value in enumerate(values):
            if all(fits(values[chosen[i]], value) for i in below[x]):
                chosen.append(k)
                yield from extend(x + 1)
                chosen.pop()

    yield from extend(0)


def _random_assignment(poset: Poset, values: Sequence, fits: Callable, rng: np.random.Generator) -> Tuple[int, ...]:
    """One assignment as in _monotone_assignments, each state drawn uniformly from what still fits"""
    chosen: List[int] = []
    for x in range(poset.size):
        below = [i for i in range(x) if poset.le(i, x)]
        allowed = [k for k, value in enumerate(values) if all(fits(values[chosen[i]], value) for i in below)]
        chosen.append(int(rng.choice(allowed)))
    return tuple(chosen)


def _components(kind: Kind, poset: Poset) -> List[Tuple[List, Callable]]:
    """Candidate values per state and the order constraint between comparable states, per component of T"""
    if kind in (Kind.BOX, Kind.SI):
        # x <= y requires R[y] inside R[x]
        return [(t_values(kind, poset), lambda lo, hi: hi & ~lo == 0)]
    families = t_values(kind, poset)
    if kind == Kind.IM:
        return [(families, lambda lo, hi: lo <= hi)]
    # N_box grows along <=, N_dia shrinks
    return [(families, lambda lo, hi: lo <= hi), (families, lambda lo, hi: hi <= lo)]


def _structure_count(poset: Poset, components: List[Tuple[List, Callable]]) -> int:
    return math.prod(len(values) for values, _ in components) ** poset.size


def _all_structures(poset: Poset, components: List[Tuple[List, Callable]]) -> Iterator[List]:
    if len(components) == 1:
        values, fits = components[0]
        for choice in _monotone_assignments(poset, values, fits):
            yield [values[k] for k in choice]
        return
    (boxes, box_fits), (dias, dia_fits) = components
    pairs = list(product(boxes, dias))
    for choice in _monotone_assignments(poset, pairs,
                                        lambda lo, hi: box_fits(lo[0], hi[0]) and dia_fits(lo[1], hi[1])):
        yield [pairs[k] for k in choice]


def _sampled_structures(poset: Poset, components: List[Tuple[List, Callable]], count: int,
                        rng: np.random.Generator) -> Iterator[List]:
    # the constraint splits per component, so components are drawn independently
    for _ in range(count):
        parts = [[values[k] for k in _random_assignment(poset, values, fits, rng)] for values, fits in components]
        yield parts[0] if len(parts) == 1 else list(zip(*parts))


def build_universe(kind, n: int, sample: Optional[int] = None, seed: int = 0) -> Universe:
    """
    Frames of the given kind on 1..n points up to isomorphism.

    Posets whose raw structure count exceeds ``max_universe`` raise SizeGuard,
    unless ``sample`` is given: then ``sample`` seeded random structures are
    drawn for each such poset and the universe is marked as sampled.
    """
    kind = get_kind(kind)
    limits = get_limits()
    guard(f'{kind.value} universe size', n, limits.universe_caps[kind.value])
    rng = np.random.default_rng(seed)
    frames: List[Frame] = []
    seen: Dict[Tuple, int] = {}
    sampled = False
    posets = [poset for size in range(1, n + 1) for poset in enumerate_posets(size)]
    logging.info(f"Building {kind.value} universe up to size {n} over {len(posets)} posets")
    for poset in tqdm(posets, desc=f"{kind.value} universe", disable=not limits.show_progress):
        components = _components(kind, poset)
        count = _structure_count(poset, components)
        if count > limits.max_universe and sample is not None:
            logging.info(f"{kind.value} structures on a {poset.size}-element poset: "
                         f"{count} exceed the cap, drawing {sample}")
            structures = _sampled_structures(poset, components, sample, rng)
            sampled = True
        else:
            guard(f'{kind.value} structures on a {poset.size}-element poset', count, limits.max_universe)
            structures = _all_structures(poset, components)
        for structure in structures:
            frame = make_frame(kind, poset, structure, validate=False)
            certificate = frame_certificate(frame)
            if certificate in seen:
                continue
            seen[certificate] = len(frames)
            frames.append(frame)
    warn_memory('universe', len(frames) * 512)
    logging.info(f"{kind.value} universe up to size {n}: {len(frames)} frames{' (sampled)' if sampled else ''}")
    return Universe(kind, n, frames, seen, sampled)


def sample_frames(universe: Union[Universe, Sequence[Frame]], limit: Optional[int], seed: int = 0) -> List[int]:
    """Deterministic sample of indices into a universe or frame list, in ascending order"""
    if limit is None or limit >= len(universe):
        return list(range(len(universe)))
    rng = np.random.default_rng(seed)
    return sorted(rng.choice(len(universe), size=limit, replace=False).tolist())


# Fr(axioms)

def validates_all(frame: Frame, axioms: Sequence[Axiom]) -> bool:
    return all(frame_validates(frame, _as_formula(axiom)).valid for axiom in axioms)


def _validity_row(job) -> List[bool]:
    limits, frame, formulas = job
    with activate_limits(limits):
        return [frame_validates(frame, formula).valid for formula in formulas]


def validity_table(axioms: Sequence[Axiom], universe: Universe, indices: Optional[Sequence[int]] = None) -> List[List[bool]]:
    """Row per frame, column per axiom; rows in index order regardless of worker count"""
    limits = get_limits()
    formulas = [_as_formula(axiom) for axiom in axioms]
    indices = range(len(universe)) if indices is None else indices
    jobs = [(limits, universe.frames[i], formulas) for i in indices]
    progress = dict(total=len(jobs), desc='Fr', disable=not limits.show_progress)
    if limits.workers > 1:
        with Pool(limits.workers) as pool:
            return list(tqdm(pool.imap(_validity_row, jobs), **progress))
    return [_validity_row(job) for job in tqdm(jobs, **progress)]


def fr_class(axioms: Sequence[Axiom], universe: Universe, indices: Optional[Sequence[int]] = None) -> List[int]:
    """Indices of the universe frames (all, or the given ones) validating every axiom"""
    indices = list(range(len(universe))) if indices is None else list(indices)
    rows = validity_table(axioms, universe, indices)
    members = [i for i, row in zip(indices, rows) if all(row)]
    logging.info(f"Fr: {len(members)} of {len(indices)} {universe.kind.value} frames")
    return members


def fr_dataframe(axioms: Sequence[Axiom], universe: Universe, indices: Optional[Sequence[int]] = None) -> pd.DataFrame:
    indices = list(range(len(universe))) if indices is None else list(indices)
    rows = validity_table(axioms, universe, indices)
    records = []
    for i, row in zip(indices, rows):
        record = {'frame': i, 'size': universe.frames[i].size}
        record.update({str(axiom): ok for axiom, ok in zip(axioms, row)})
        record['in_class'] = all(row)
        records.append(record)
    return pd.DataFrame(records, columns=['frame', 'size'] + [str(a) for a in axioms] + ['in_class'])


# Closure audit

CHECKS = ('disjoint_unions', 'generated_subframes', 'p_morphic_images', 'pfe_closure', 'pfe_reflection', 'duality')


@dataclass
class CheckResult:
    examined: int = 0
    failures: List[Dict] = field(default_factory=list)
    partial: bool = False

    @property
    def passed(self) -> bool:
        return not self.failures


@dataclass
class AuditReport:
    kind: Kind
    universe_size: int
    max_size: int
    members: List[int]
    variant: str = 'tau'
    sampled: bool = False
    checks: Dict[str, CheckResult] = field(default_factory=lambda: {name: CheckResult() for name in CHECKS})

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks.values())

    @property
    def partial(self) -> bool:
        return any(check.partial for check in self.checks.values())

    def to_dict(self) -> Dict:
        return {
            'kind': self.kind.value,
            'max_size': self.max_size,
            'universe_size': self.universe_size,
            'class_size': len(self.members),
            'members': list(self.members),
            'variant': self.variant,
            'sampled': self.sampled,
            'passed': self.passed,
            'partial': self.partial,
            'checks': {name: {'examined': check.examined, 'passed': check.passed, 'partial': check.partial,
                              'failures': check.failures}
                       for name, check in self.checks.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def to_dataframe(self) -> pd.DataFrame:
        return pd.DataFrame([{'check': name, 'examined': check.examined, 'failures': len(check.failures),
                              'passed': check.passed, 'partial': check.partial}
                             for name, check in self.checks.items()])


class _Membership:
    """Decides 'in K up to iso': certificates inside the universe, axioms beyond it or where a sampled universe has gaps"""

    def __init__(self, universe: Universe, members: Sequence[int], axioms: Optional[Sequence[Axiom]]):
        self.universe = universe
        self.members: Set[int] = set(members)
        self.axioms = axioms

    def __call__(self, frame: Frame) -> bool:
        if frame.size <= self.universe.max_size:
            index = self.universe.index_of(frame)
            if index is not None or not self.universe.sampled:
                return index in self.members
        if self.axioms is not None:
            return validates_all(frame, self.axioms)
        return False


class _Budget:
    def __init__(self, limit: Optional[int]):
        self.remaining = limit

    def spend(self, amount: int = 1) -> bool:
        if self.remaining is None:
            return True
        self.remaining -= amount
        return self.remaining >= 0


def _audit_unions(report, universe, members, in_k, check_size):
    check = report.checks['disjoint_unions']
    for i, j in combinations_with_replacement(sorted(members), 2):
        first, second = universe.frames[i], universe.frames[j]
        if first.size + second.size > check_size:
            continue
        union, _ = disjoint_union([first, second])
        check.examined += 1
        if not in_k(union):
            check.failures.append({'frames': [i, j], 'size': union.size})


def _closed_subsets(frame: Frame) -> List[int]:
    """Nonempty subsets closed under <= and the relation"""
    found = []
    for mask in range(1, 1 << frame.size):
        if all((frame.base.up[x] | frame.structure[x]) & ~mask == 0 for x in iter_bits(mask)):
            found.append(mask)
    return found


def _audit_subframes(report, universe, members, in_k, budget):
    check = report.checks['generated_subframes']
    for i in sorted(members):
        frame = universe.frames[i]
        if frame.kind in (Kind.BOX, Kind.SI):
            for mask in _closed_subsets(frame):
                sub, _ = restrict_frame(frame, mask)
                check.examined += 1
                if not in_k(sub):
                    check.failures.append({'frame': i, 'states': list(iter_bits(mask))})
            continue
        # im and cin: scan embeddings of smaller universe frames
        for j, candidate in enumerate(universe.frames):
            if candidate.size > frame.size:
                continue
            for graph in poset_morphisms(candidate.base, frame.base):
                if not budget.spend():
                    check.partial = True
                    return
                f = PosetMap(candidate.base, frame.base, graph)
                if not f.is_embedding() or not is_frame_morphism(f, candidate, frame):
                    continue
                check.examined += 1
                if j not in members:
                    check.failures.append({'frame': i, 'subframe': j, 'map': list(graph)})


def _audit_images(report, universe, members, budget):
    check = report.checks['p_morphic_images']
    for i in sorted(members):
        frame = universe.frames[i]
        if not budget.spend(len(universe)):
            check.partial = True
            return
        for image, f in find_p_morphic_images(frame, universe.frames):
            check.examined += 1
            j = universe.index_of(image)
            if j not in members:
                check.failures.append({'frame': i, 'image': j, 'map': list(f.graph)})


def _audit_extensions(report, universe, members, in_k, variant):
    closure, reflection, duality = (report.checks[name] for name in ('pfe_closure', 'pfe_reflection', 'duality'))
    for i, frame in enumerate(universe.frames):
        extension, unit = prime_filter_extension(frame, variant)
        duality.examined += 1
        if not is_frame_isomorphism(unit, upset_reduct(frame), extension):
            duality.failures.append({'frame': i})
        inside, extension_inside = i in members, in_k(extension)
        if inside:
            closure.examined += 1
            if not extension_inside:
                closure.failures.append({'frame': i})
        if extension_inside:
            reflection.examined += 1
            if not inside:
                reflection.failures.append({'frame': i})


def audit_closure(members: Sequence[int], universe: Universe, axioms: Optional[Sequence[Axiom]] = None,
                  check_size: Optional[int] = None, variant: str = 'tau',
                  budget: Optional[int] = None) -> AuditReport:
    """
    Closure of K (universe indices) under disjoint unions, generated subframes,
    p-morphic images and prime filter extensions, and reflection of the latter.

    Unions larger than the universe are decided by the axioms when given.
    A SizeGuard raised mid-audit carries the partial report.
    """
    members = sorted(set(members))
    report = AuditReport(universe.kind, len(universe), universe.max_size, members, variant, universe.sampled)
    in_k = _Membership(universe, members, axioms)
    spend = _Budget(budget)
    check_size = universe.max_size if check_size is None else check_size
    logging.info(f"Auditing a class of {len(members)} {universe.kind.value} frames")
    steps = [
        ('disjoint unions', lambda: _audit_unions(report, universe, members, in_k, check_size)),
        ('generated subframes', lambda: _audit_subframes(report, universe, members, in_k, spend)),
        ('p-morphic images', lambda: _audit_images(report, universe, members, spend)),
        ('prime filter extensions', lambda: _audit_extensions(report, universe, members, in_k, variant)),
    ]
    for name, step in steps:
        try:
            step()
        except SizeGuard as e:
            raise SizeGuard(f'audit ({name}): {e.what}', e.required, e.cap, partial=report)
        logging.debug(f"audit step {name} done")
    logging.info(f"Audit {'passed' if report.passed else 'failed'}")
    return report


# Corpus

class Corpus(NamedTuple):
    frames: List[Frame]
    formulas: List[Formula]
    letters: Tuple[str, ...]

    def valuations(self, frame: Frame) -> Iterator[Valuation]:
        return valuations(frame.base, self.letters)


def corpus(kind, seed: int = 0, max_size: int = 3, depth: int = 2, letter_names: Sequence[str] = ('p', 'q'),
           formula_limit: Optional[int] = None, universe_sample: Optional[int] = None) -> Corpus:
    """Universe frames plus a seeded sample of the formulas up to the given depth"""
    universe = build_universe(kind, max_size, sample=universe_sample, seed=seed)
    formulas = sample_formulas(enumerate_formulas(kind, depth, letter_names), formula_limit, seed)
    return Corpus(universe.frames, formulas, tuple(letter_names))

"""
Duality between modal algebras and frames.

A prime filter Q of L A is represented by its generator trace, the set of
elements a whose generator (box a, tri a, dia a) lies in Q:

    box  a filter of A
    im   an upset of A
    cin  a pair (S_box, S_dia) of arbitrary subsets of A

FreeDLOracle builds L A explicitly at small sizes and confirms that these
traces are exactly its prime filters.
"""
import logging
from dataclasses import dataclass
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from main.config import get_limits
from main.constants.signatures import DUAL_KINDS, Kind, get_kind
from main.errors import AlgebraConditionError, CoherenceError, KindError, guard
from main.services.algebras import ModalAlgebra, check_modal_homomorphism, complex_algebra, homomorphism_witness
from main.services.frames import (Frame, Model, functor_action, is_frame_isomorphism, make_frame, modal_operator,
                                  upset_reduct, visible_value)
from main.services.heyting import FinDL, FinHA, eta, is_closed_upset, is_open_upset, prime_filters, up_algebra
from main.services.posets import Poset, PosetMap, iter_bits, mask_of, upset_masks


@dataclass(frozen=True)
class LDualPoint:
    kind: Kind
    trace: Tuple[int, ...]

    def __le__(self, other: 'LDualPoint') -> bool:
        return all(mine & ~theirs == 0 for mine, theirs in zip(self.trace, other.trace))

    def members(self, component: int = 0) -> List[int]:
        return list(iter_bits(self.trace[component]))


def _element_poset(base: FinDL) -> Poset:
    return Poset(base.leq)


def _dual_kind(kind) -> Kind:
    kind = get_kind(kind)
    if kind not in DUAL_KINDS:
        raise KindError(f'{kind.value} algebras have no dual frame construction')
    return kind


def l_dual_points(kind, base: FinDL) -> Tuple[Poset, List[LDualPoint]]:
    """Traces of the prime filters of L A in canonical order, with their inclusion order"""
    kind = _dual_kind(kind)
    n = base.size
    if kind == Kind.BOX:
        traces = sorted((mask_of(np.flatnonzero(base.leq[a])),) for a in range(n))
    elif kind == Kind.IM:
        traces = [(mask,) for mask in upset_masks(_element_poset(base))]
    else:
        guard('cin dual points 4^|A|', 4 ** n, get_limits().max_subset_scan)
        traces = list(product(range(1 << n), repeat=2))
    points = [LDualPoint(kind, trace) for trace in traces]
    leq = np.array([[p <= q for q in points] for p in points], dtype=bool).reshape(len(points), len(points))
    return Poset(leq), points


class FreeDLOracle:
    """
    L A as the sublattice of 2^V generated by the generator vectors, V the
    admissible two-valued valuations of the generators.
    """

    def __init__(self, kind, base: FinDL):
        self.kind = _dual_kind(kind)
        self.base = base
        guard(f'{self.kind.value} oracle algebra size', base.size, get_limits().oracle_caps[self.kind.value])
        components = 2 if self.kind == Kind.CIN else 1
        self.generators = [(c, a) for c in range(components) for a in range(base.size)]
        self.valuations = self._admissible()
        self.vectors = [mask_of(v for v, traces in enumerate(self.valuations) if traces[c] >> a & 1)
                        for c, a in self.generators]
        self.elements = self._close()
        index = {x: i for i, x in enumerate(self.elements)}
        meet = [[index[x & y] for y in self.elements] for x in self.elements]
        join = [[index[x | y] for y in self.elements] for x in self.elements]
        self.lattice = FinDL(meet, join, labels=self.elements)
        logging.debug(f"free DL oracle ({self.kind.value}, |A|={base.size}): "
                      f"{len(self.valuations)} valuations, {len(self.elements)} elements")

    def _admissible(self) -> List[Tuple[int, ...]]:
        """Two-valued valuations of the generators that respect the rank-1 relations"""
        base, n = self.base, self.base.size
        if self.kind == Kind.CIN:
            return list(product(range(1 << n), repeat=2))
        found = []
        for chosen in range(1 << n):
            holds = [bool(chosen >> a & 1) for a in range(n)]
            if self.kind == Kind.BOX:
                # box T = T, box a & box b = box (a & b)
                ok = holds[base.top] and all((holds[a] and holds[b]) == holds[base.meet(a, b)]
                                             for a in range(n) for b in range(n))
            else:
                # tri (a & b) & tri a = tri (a & b)
                ok = all(holds[a] or not holds[base.meet(a, b)] for a in range(n) for b in range(n))
            if ok:
                found.append((chosen,))
        return found

    def _close(self) -> List[int]:
        full = (1 << len(self.valuations)) - 1
        elements = {0, full, *self.vectors}
        frontier = set(elements)
        while frontier:
            fresh = set()
            for x in frontier:
                for y in list(elements):
                    for z in (x & y, x | y):
                        if z not in elements:
                            fresh.add(z)
            elements |= fresh
            frontier = fresh
        return sorted(elements)

    def traces(self) -> Tuple[Poset, List[LDualPoint]]:
        """Generator traces of the prime filters of the explicit lattice"""
        poset, filters = prime_filters(self.lattice)
        index = {x: i for i, x in enumerate(self.elements)}
        components = 2 if self.kind == Kind.CIN else 1
        points = []
        for p in filters:
            trace = [0] * components
            for (c, a), vector in zip(self.generators, self.vectors):
                if index[vector] in p:
                    trace[c] |= 1 << a
            points.append(LDualPoint(self.kind, tuple(trace)))
        return poset, points

    def agrees_with_points(self) -> bool:
        """The prime filters of L A are the dual points, with the same order"""
        oracle_poset, oracle_points = self.traces()
        poset, points = l_dual_points(self.kind, self.base)
        if sorted(p.trace for p in oracle_points) != sorted(p.trace for p in points):
            return False
        position = {p.trace: k for k, p in enumerate(points)}
        return all(oracle_poset.le(i, j) == poset.le(position[p.trace], position[q.trace])
                   for i, p in enumerate(oracle_points) for j, q in enumerate(oracle_points))


# rho-flat, tau and sigma

def rho_flat(kind, base: FinHA, value, dia_reading: str = 'w2') -> LDualPoint:
    """
    Generator trace read off a T-value over the prime filters of the base.

    For cin, ``dia_reading='w1'`` evaluates the dia component against the
    box family instead of the dia family.
    """
    kind = _dual_kind(kind)
    spectrum = base.spectrum
    theta, full = spectrum.theta, spectrum.poset.full
    if kind == Kind.BOX:
        return LDualPoint(kind, (mask_of(a for a in range(base.size) if value & ~theta[a] == 0),))
    if kind == Kind.IM:
        return LDualPoint(kind, (mask_of(a for a in range(base.size) if theta[a] in value),))
    boxes, dias = value
    dia_family = boxes if dia_reading == 'w1' else dias
    return LDualPoint(kind, (mask_of(a for a in range(base.size) if theta[a] in boxes),
                             mask_of(a for a in range(base.size) if (full & ~theta[a]) not in dia_family)))


def _box_tau(base: FinHA, filter_mask: int) -> int:
    spectrum = base.spectrum
    successors = spectrum.poset.full
    for a in iter_bits(filter_mask):
        successors &= spectrum.theta[a]
    return successors


def _tri_tau(base: FinHA, generated: int) -> frozenset:
    """Clauses in order: theta-image, closed, general; overlapping clauses must agree"""
    spectrum = base.spectrum
    theta = spectrum.theta
    in_g = [bool(generated >> a & 1) for a in range(base.size)]

    def closed_clause(d: int) -> bool:
        return all(in_g[a] for a in range(base.size) if d & ~theta[a] == 0)

    decided: Dict[int, bool] = {}
    upsets = upset_masks(spectrum.poset)
    closed = [d for d in upsets if is_closed_upset(d, base)]
    for d in closed:
        if d in spectrum.theta_index:
            member = in_g[spectrum.theta_index[d]]
            if member != closed_clause(d):
                raise CoherenceError('tau: theta-image and closed clauses disagree', (generated, d))
        else:
            member = closed_clause(d)
        decided[d] = member
    family = set()
    for d in upsets:
        general = any(decided[c] for c in closed if c & ~d == 0)
        if d in decided and decided[d] != general:
            raise CoherenceError('tau: closed and general clauses disagree', (generated, d))
        if general:
            family.add(d)
    return frozenset(family)


def _cin_tau(base: FinHA, boxes: int, dias: int) -> Tuple[frozenset, frozenset]:
    spectrum = base.spectrum
    theta, full = spectrum.theta, spectrum.poset.full
    return (frozenset(theta[a] for a in iter_bits(boxes)),
            frozenset(full & ~theta[a] for a in range(base.size) if not dias >> a & 1))


def tau(kind, base: FinHA, point: LDualPoint):
    kind = _dual_kind(kind)
    if kind == Kind.BOX:
        return _box_tau(base, point.trace[0])
    if kind == Kind.IM:
        return _tri_tau(base, point.trace[0])
    return _cin_tau(base, *point.trace)


def sigma(base: FinHA, point: LDualPoint) -> frozenset:
    """Open upsets need a generating theta(a) below them; the rest need all open supersets"""
    spectrum = base.spectrum
    generated = point.trace[0]
    upsets = upset_masks(spectrum.poset)
    opened = [d for d in upsets if is_open_upset(d, base)]
    family = {d for d in opened
              if any(generated >> a & 1 and spectrum.theta[a] & ~d == 0 for a in range(base.size))}
    for d in upsets:
        if d in opened:
            continue
        if all(e in family for e in opened if d & ~e == 0):
            family.add(d)
    return frozenset(family)


def _trace_of_filter(algebra: ModalAlgebra, members: int) -> LDualPoint:
    """Which generators a prime filter of the base contains"""
    def holding(name: str) -> int:
        return mask_of(a for a in range(algebra.size) if members >> algebra.apply(name, a) & 1)

    if algebra.kind == Kind.BOX:
        return LDualPoint(Kind.BOX, (holding('box'),))
    if algebra.kind == Kind.IM:
        return LDualPoint(Kind.IM, (holding('tri'),))
    return LDualPoint(Kind.CIN, (holding('box'), holding('dia')))


def dual_frame(algebra: ModalAlgebra, variant: str = 'tau') -> Frame:
    """The frame of prime filters, each carrying tau (or sigma) of its generator trace"""
    kind = _dual_kind(algebra.kind)
    if variant == 'sigma' and kind != Kind.IM:
        raise KindError('the sigma variant exists for im algebras only')
    base = algebra.base
    spectrum = base.spectrum
    structure = []
    for p in spectrum.filters:
        point = _trace_of_filter(algebra, p.members)
        structure.append(sigma(base, point) if variant == 'sigma' else tau(kind, base, point))
    return make_frame(kind, spectrum.poset, structure)


# Prime filter extensions

def _si_extension(frame: Frame, base: FinHA) -> Frame:
    """p R_s q iff a ~> b in p and a in q imply b in q"""
    spectrum = base.spectrum
    labels = base.labels
    sto = [[base.index_of(modal_operator(frame, 'sto', a, b)) for b in labels] for a in labels]
    structure = []
    for p in spectrum.filters:
        pairs = [(a, b) for a in range(base.size) for b in range(base.size) if sto[a][b] in p]
        structure.append(mask_of(k for k, q in enumerate(spectrum.filters)
                                 if all(b in q for a, b in pairs if a in q)))
    return make_frame(Kind.SI, spectrum.poset, structure)


def _extension(frame: Frame, variant: str) -> Tuple[Frame, FinHA]:
    if variant not in ('tau', 'sigma') or (variant == 'sigma' and frame.kind != Kind.IM):
        raise KindError(f'no {variant} extension for {frame.kind.value} frames')
    algebra = complex_algebra(frame)
    if frame.kind == Kind.SI:
        return _si_extension(frame, algebra.base), algebra.base
    return dual_frame(algebra, variant), algebra.base


def prime_filter_extension(frame: Frame, variant: str = 'tau') -> Tuple[Frame, PosetMap]:
    """pe X with the unit eta: X -> pe X"""
    extension, base = _extension(frame, variant)
    return extension, eta(frame.base, base)


def pfe(frame: Frame, variant: str = 'tau') -> Frame:
    return _extension(frame, variant)[0]


def pfe_model(model: Model, variant: str = 'tau') -> Model:
    """V^pe(p) = {q | V(p) in q}"""
    extension, base = _extension(model.frame, variant)
    theta = base.spectrum.theta
    valuation = tuple((name, theta[base.index_of(mask)]) for name, mask in model.valuation)
    return Model(extension, valuation)


def direct_pfe(frame: Frame, variant: str = 'tau') -> Frame:
    """The extension from the frame-level formulas, without building operator tables"""
    kind = frame.kind
    if variant == 'sigma' and kind != Kind.IM:
        raise KindError(f'no sigma extension for {kind.value} frames')
    base = up_algebra(frame.base)
    if kind == Kind.SI:
        return _si_extension(frame, base)
    spectrum = base.spectrum
    labels = base.labels

    def holding(name: str, p) -> int:
        return mask_of(a for a, label in enumerate(labels) if base.index_of(modal_operator(frame, name, label)) in p)

    structure = []
    for p in spectrum.filters:
        if kind == Kind.BOX:
            successors = mask_of(k for k, q in enumerate(spectrum.filters)
                                 if all(a in q for a in iter_bits(holding('box', p))))
            structure.append(successors)
        elif kind == Kind.IM:
            point = LDualPoint(kind, (holding('tri', p),))
            structure.append(sigma(base, point) if variant == 'sigma' else _tri_tau(base, point.trace[0]))
        else:
            full, theta = spectrum.poset.full, spectrum.theta
            boxes = frozenset(theta[a] for a in iter_bits(holding('box', p)))
            dias = frozenset(full & ~theta[a] for a in range(base.size) if not holding('dia', p) >> a & 1)
            structure.append((boxes, dias))
    return make_frame(kind, spectrum.poset, structure)


def duality_unit_is_isomorphism(frame: Frame, variant: str = 'tau') -> bool:
    """eta: X -> pe X is a frame isomorphism (for cin, from the upset reduct)"""
    extension, unit = prime_filter_extension(frame, variant)
    return is_frame_isomorphism(unit, upset_reduct(frame), extension)


# Executable lemmas

def theta_prime_witness(algebra: ModalAlgebra) -> Optional[Tuple]:
    """None iff theta' is a modal homomorphism A -> (A_tau)^+"""
    target = complex_algebra(dual_frame(algebra))
    h = [target.base.index_of(mask) for mask in algebra.base.spectrum.theta]
    return homomorphism_witness(h, algebra, target)


def check_theta_prime_morphism(algebra: ModalAlgebra) -> bool:
    return theta_prime_witness(algebra) is None


def inverse_image_map(h: Sequence[int], source: FinHA, target: FinHA) -> PosetMap:
    """pf' h = h^-1 from the prime filters of the target to those of the source"""
    source_spectrum, target_spectrum = source.spectrum, target.spectrum
    graph = []
    for q in target_spectrum.filters:
        members = mask_of(a for a in range(source.size) if h[a] in q)
        graph.append(source_spectrum.index_of_members(members))
    return PosetMap(target_spectrum.poset, source_spectrum.poset, tuple(graph))


def pull_point(h: Sequence[int], point: LDualPoint) -> LDualPoint:
    """pf(L h): a lies in the pulled trace iff h(a) lies in the trace"""
    return LDualPoint(point.kind, tuple(mask_of(a for a in range(len(h)) if component >> h[a] & 1)
                                        for component in point.trace))


def tau_naturality_witness(h: Sequence[int], source: ModalAlgebra, target: ModalAlgebra,
                           visible_only: bool = True) -> Optional[LDualPoint]:
    """
    First dual point of the target where T(pf' h) o tau_B and tau_A o pf(L h) differ.

    For cin, T(pf' h) ranges over all subsets, so a non-injective h adds
    neighbourhoods that are neither upsets nor upset complements. With
    ``visible_only`` those are dropped before comparing, as in upset_reduct.
    """
    kind = _dual_kind(source.kind)
    f = inverse_image_map(h, source.base, target.base)
    _, points = l_dual_points(kind, target.base)
    for point in points:
        left = functor_action(kind, f, tau(kind, target.base, point))
        if kind == Kind.CIN and visible_only:
            left = visible_value(f.cod, left)
        right = tau(kind, source.base, pull_point(h, point))
        if left != right:
            return point
    return None


def check_tau_naturality(h: Sequence[int], source: ModalAlgebra, target: ModalAlgebra,
                         visible_only: bool = True) -> bool:
    if not check_modal_homomorphism(h, source, target):
        raise AlgebraConditionError('not a modal homomorphism', homomorphism_witness(h, source, target))
    return tau_naturality_witness(h, source, target, visible_only) is None


def right_inverse_witness(kind, base: FinHA, variant: str = 'tau',
                          dia_reading: str = 'w2') -> Optional[LDualPoint]:
    """First dual point q with rho_flat(tau(q)) != q"""
    kind = _dual_kind(kind)
    _, points = l_dual_points(kind, base)
    for point in points:
        value = sigma(base, point) if variant == 'sigma' else tau(kind, base, point)
        if rho_flat(kind, base, value, dia_reading=dia_reading) != point:
            return point
    return None


def tau_sigma_disagreement(base: FinHA) -> Optional[LDualPoint]:
    _, points = l_dual_points(Kind.IM, base)
    for point in points:
        if tau(Kind.IM, base, point) != sigma(base, point):
            return point
    return None

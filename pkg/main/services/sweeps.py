"""
Property sweeps over a frame corpus and the complex algebras of its frames.

Every sweep returns a DataFrame with one row per examined case and a boolean
``ok`` column. run_sweep() dispatches by name and logs the failure count.
"""
import logging
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from tqdm import tqdm

from main.config import get_limits
from main.constants.signatures import DUAL_KINDS, Kind, get_kind
from main.errors import KindError, UsageError
from main.services.algebras import (ModalAlgebra, algebra_validates, complex_algebra, is_homomorphic_image,
                                    modal_homomorphisms, product, subalgebras)
from main.services.duality import (FreeDLOracle, check_tau_naturality, check_theta_prime_morphism, direct_pfe,
                                   duality_unit_is_isomorphism, pfe, pfe_model, right_inverse_witness,
                                   tau_sigma_disagreement)
from main.services.frames import (Frame, disjoint_union, find_p_morphic_images, frame_validates, generate_subframe,
                                  make_model, pullback_valuation, truth_set, valuations)
from main.services.harness import corpus, sample_frames
from main.services.heyting import up_algebra
from main.services.posets import PosetMap, enumerate_posets
from main.services.syntax import Formula, to_text


@dataclass(frozen=True)
class SweepScope:
    """Which frames, formulas and algebras a sweep examines"""
    kind: Kind
    max_size: int = 3
    depth: int = 2
    letters: Tuple[str, ...] = ('p', 'q')
    formula_limit: Optional[int] = 25
    frame_limit: Optional[int] = 150
    universe_sample: Optional[int] = None
    seed: int = 0
    # largest complex algebra for the algebra-level sweeps
    algebra_limit: int = 8
    # largest disjoint union examined
    union_size: int = 4
    # algebra pairs drawn for images, products and naturality
    pair_limit: int = 200


def _progress(items: Sequence, desc: str):
    return tqdm(items, desc=desc, disable=not get_limits().show_progress)


def _material(scope: SweepScope) -> Tuple[List[Tuple[int, Frame]], List[Formula]]:
    data = corpus(scope.kind, scope.seed, scope.max_size, scope.depth, scope.letters, scope.formula_limit,
                  scope.universe_sample)
    indices = sample_frames(data.frames, scope.frame_limit, scope.seed)
    logging.info(f"Sweep material: {len(indices)} of {len(data.frames)} {scope.kind.value} frames, "
                 f"{len(data.formulas)} formulas over {','.join(scope.letters)}")
    return [(i, data.frames[i]) for i in indices], data.formulas


def _algebras(frames: Iterable[Tuple[int, Frame]], limit: int) -> List[Tuple[int, ModalAlgebra]]:
    """Complex algebras up to the size limit, one per distinct algebra"""
    seen = set()
    found = []
    for i, frame in frames:
        algebra = complex_algebra(frame)
        if algebra.size > limit or algebra in seen:
            continue
        seen.add(algebra)
        found.append((i, algebra))
    return found


def _pairs(items: Sequence, fits: Callable, limit: int, seed: int) -> List[Tuple]:
    """Seeded sample of the ordered pairs satisfying fits, in index order"""
    pairs = [(a, b) for a in items for b in items if fits(a, b)]
    if len(pairs) <= limit:
        return pairs
    rng = np.random.default_rng(seed)
    return [pairs[k] for k in sorted(rng.choice(len(pairs), size=limit, replace=False).tolist())]


def _table(records: List[Dict], columns: List[str]) -> pd.DataFrame:
    return pd.DataFrame(records, columns=columns + ['ok'])


# Frame-level sweeps

def complex_algebra_sweep(scope: SweepScope) -> pd.DataFrame:
    """A frame and its complex algebra validate the same formulas"""
    frames, formulas = _material(scope)
    records = []
    for i, frame in _progress(frames, 'complex algebras'):
        algebra = complex_algebra(frame)
        for formula in formulas:
            on_frame = frame_validates(frame, formula).valid
            on_algebra = algebra_validates(algebra, formula).valid
            records.append({'frame': i, 'size': frame.size, 'formula': to_text(formula),
                            'frame_valid': on_frame, 'algebra_valid': on_algebra, 'ok': on_frame == on_algebra})
    return _table(records, ['frame', 'size', 'formula', 'frame_valid', 'algebra_valid'])


def truth_lemma_sweep(scope: SweepScope) -> pd.DataFrame:
    """In the extended model a formula holds exactly at the prime filters containing its truth set"""
    frames, formulas = _material(scope)
    variants = ('tau', 'sigma') if scope.kind == Kind.IM else ('tau',)
    records = []
    for i, frame in _progress(frames, 'truth lemma'):
        base = complex_algebra(frame).base
        theta = base.spectrum.theta
        for variant in variants:
            holds = {formula: True for formula in formulas}
            count = 0
            for valuation in valuations(frame.base, scope.letters):
                count += 1
                model = make_model(frame, valuation)
                extended = pfe_model(model, variant)
                memo, extended_memo = {}, {}
                for formula in formulas:
                    expected = theta[base.index_of(truth_set(model, formula, memo))]
                    if truth_set(extended, formula, extended_memo) != expected:
                        holds[formula] = False
            records.extend({'frame': i, 'size': frame.size, 'variant': variant, 'formula': to_text(formula),
                            'valuations': count, 'ok': ok} for formula, ok in holds.items())
    return _table(records, ['frame', 'size', 'variant', 'formula', 'valuations'])


def duality_sweep(scope: SweepScope) -> pd.DataFrame:
    """eta is an isomorphism onto the extension, and both extension routes agree"""
    frames, _ = _material(scope)
    variants = ('tau', 'sigma') if scope.kind == Kind.IM else ('tau',)
    records = []
    for i, frame in _progress(frames, 'duality'):
        agree = True
        if frame.kind == Kind.IM:
            agree = tau_sigma_disagreement(complex_algebra(frame).base) is None
        for variant in variants:
            unit_iso = duality_unit_is_isomorphism(frame, variant)
            direct = direct_pfe(frame, variant) == pfe(frame, variant)
            records.append({'frame': i, 'size': frame.size, 'variant': variant, 'unit_iso': unit_iso,
                            'direct_matches': direct, 'tau_sigma_agree': agree,
                            'ok': unit_iso and direct and agree})
    return _table(records, ['frame', 'size', 'variant', 'unit_iso', 'direct_matches', 'tau_sigma_agree'])


def _fits_dual_points(kind: Kind, size: int) -> bool:
    return kind != Kind.CIN or 4 ** size <= get_limits().max_subset_scan


def right_inverse_sweep(scope: SweepScope) -> pd.DataFrame:
    """rho-flat undoes tau (and sigma for im) on every dual point"""
    frames, _ = _material(scope)
    variants = ('tau', 'sigma') if scope.kind == Kind.IM else ('tau',)
    records = []
    for i, algebra in _progress(_algebras(frames, scope.algebra_limit), 'right inverse'):
        if not _fits_dual_points(scope.kind, algebra.size):
            continue
        for variant in variants:
            witness = right_inverse_witness(scope.kind, algebra.base, variant=variant)
            records.append({'frame': i, 'algebra_size': algebra.size, 'variant': variant,
                            'witness': None if witness is None else list(witness.trace), 'ok': witness is None})
    return _table(records, ['frame', 'algebra_size', 'variant', 'witness'])


def theta_prime_sweep(scope: SweepScope) -> pd.DataFrame:
    """theta' is a modal homomorphism into the complex algebra of the dual frame"""
    frames, _ = _material(scope)
    records = [{'frame': i, 'algebra_size': algebra.size, 'ok': check_theta_prime_morphism(algebra)}
               for i, algebra in _progress(_algebras(frames, scope.algebra_limit), 'theta prime')]
    return _table(records, ['frame', 'algebra_size'])


def _truth_along(f: PosetMap, source: Frame, target: Frame, formula: Formula, letters: Sequence[str]) -> bool:
    """Truth in the source under pulled back valuations is the preimage of truth in the target"""
    for valuation in valuations(target.base, letters):
        upstairs = make_model(source, pullback_valuation(f, valuation))
        downstairs = make_model(target, valuation)
        if truth_set(upstairs, formula) != f.preimage(truth_set(downstairs, formula)):
            return False
    return True


def preservation_sweep(scope: SweepScope) -> pd.DataFrame:
    """Validity and truth under disjoint unions, generated subframes and p-morphic images"""
    frames, formulas = _material(scope)
    columns = ['construction', 'frame', 'other', 'formula']
    records = []
    pairs = list(zip(frames, frames[1:] + frames[:1]))
    for (i, first), (j, second) in _progress(pairs, 'disjoint unions'):
        if first.size + second.size > scope.union_size:
            continue
        union, injections = disjoint_union([first, second])
        for formula in formulas:
            both = frame_validates(first, formula).valid and frame_validates(second, formula).valid
            records.append({'construction': 'disjoint-union', 'frame': i, 'other': j, 'formula': to_text(formula),
                            'ok': frame_validates(union, formula).valid == both})
            # each summand is a generated subframe of the union
            for component, f in zip((first, second), injections):
                records.append({'construction': 'generated-subframe', 'frame': i, 'other': j,
                                'formula': to_text(formula),
                                'ok': _truth_along(f, component, union, formula, scope.letters)})
    if scope.kind in (Kind.BOX, Kind.SI):
        for i, frame in _progress(frames, 'generated subframes'):
            for x in range(frame.size):
                sub, inclusion = generate_subframe(frame, 1 << x)
                for formula in formulas:
                    records.append({'construction': 'generated-subframe', 'frame': i, 'other': x,
                                    'formula': to_text(formula),
                                    'ok': _truth_along(inclusion, sub, frame, formula, scope.letters)})
    candidates = [frame for _, frame in frames]
    index = {id(frame): i for i, frame in frames}
    for i, frame in _progress(frames, 'p-morphic images'):
        for image, f in find_p_morphic_images(frame, candidates):
            for formula in formulas:
                reflected = not frame_validates(frame, formula).valid or frame_validates(image, formula).valid
                records.append({'construction': 'p-morphic-image', 'frame': i, 'other': index[id(image)],
                                'formula': to_text(formula),
                                'ok': reflected and _truth_along(f, frame, image, formula, scope.letters)})
    return _table(records, columns)


# Algebra-level sweeps

def hsp_sweep(scope: SweepScope) -> pd.DataFrame:
    """Validity passes to subalgebras, homomorphic images and products"""
    frames, formulas = _material(scope)
    algebras = _algebras(frames, min(scope.algebra_limit, get_limits().subalgebra_scan))
    columns = ['construction', 'frame', 'other', 'formula']
    records = []
    valid = {i: {formula: algebra_validates(algebra, formula).valid for formula in formulas} for i, algebra in algebras}
    for i, algebra in _progress(algebras, 'subalgebras'):
        for sub, members in subalgebras(algebra):
            for formula in formulas:
                records.append({'construction': 'subalgebra', 'frame': i, 'other': list(members),
                                'formula': to_text(formula),
                                'ok': not valid[i][formula] or algebra_validates(sub, formula).valid})
    images = _pairs(algebras, lambda a, b: b[1].size <= min(a[1].size, 4) and a[0] != b[0],
                    scope.pair_limit, scope.seed)
    for (i, source), (j, target) in _progress(images, 'homomorphic images'):
        found, _ = is_homomorphic_image(source, target)
        if not found:
            continue
        for formula in formulas:
            records.append({'construction': 'homomorphic-image', 'frame': i, 'other': j, 'formula': to_text(formula),
                            'ok': not valid[i][formula] or valid[j][formula]})
    products = _pairs(algebras, lambda a, b: a[1].size * b[1].size <= 16, scope.pair_limit, scope.seed)
    for (i, first), (j, second) in _progress(products, 'products'):
        square = product(first, second)
        for formula in formulas:
            both = valid[i][formula] and valid[j][formula]
            records.append({'construction': 'product', 'frame': i, 'other': j, 'formula': to_text(formula),
                            'ok': algebra_validates(square, formula).valid == both})
    return _table(records, columns)


def naturality_sweep(scope: SweepScope) -> pd.DataFrame:
    """tau commutes with every modal homomorphism between small algebras, product projections included"""
    frames, _ = _material(scope)
    algebras = [(str(i), algebra) for i, algebra in _algebras(frames, 4)]
    small = [(i, algebra) for i, algebra in algebras if algebra.size == 2]
    for (i, first), (j, second) in _pairs(small, lambda a, b: True, 10, scope.seed):
        algebras.append((f'{i}x{j}', product(first, second)))
    records = []
    maps = _pairs(algebras, lambda a, b: True, scope.pair_limit, scope.seed)
    for (i, source), (j, target) in _progress(maps, 'naturality'):
        for h in modal_homomorphisms(source, target):
            records.append({'source': i, 'target': j, 'map': list(h),
                            'ok': check_tau_naturality(h, source, target)})
    return _table(records, ['source', 'target', 'map'])


def oracle_sweep(scope: SweepScope) -> pd.DataFrame:
    """The explicit free distributive lattice has the dual points as its prime filters"""
    cap = get_limits().oracle_caps[scope.kind.value]
    records = []
    for n in range(1, scope.max_size + 1):
        for poset in enumerate_posets(n):
            base = up_algebra(poset)
            if base.size > cap:
                continue
            records.append({'poset_size': n, 'algebra_size': base.size,
                            'ok': FreeDLOracle(scope.kind, base).agrees_with_points()})
    return _table(records, ['poset_size', 'algebra_size'])


SWEEPS: Dict[str, Tuple[Callable[[SweepScope], pd.DataFrame], Tuple[Kind, ...]]] = {
    'complex-algebra': (complex_algebra_sweep, tuple(Kind)),
    'truth-lemma': (truth_lemma_sweep, tuple(Kind)),
    'duality': (duality_sweep, tuple(Kind)),
    'right-inverse': (right_inverse_sweep, DUAL_KINDS),
    'theta-prime': (theta_prime_sweep, DUAL_KINDS),
    'preservation': (preservation_sweep, tuple(Kind)),
    'hsp': (hsp_sweep, tuple(Kind)),
    'naturality': (naturality_sweep, DUAL_KINDS),
    'oracle': (oracle_sweep, DUAL_KINDS),
}


def run_sweep(name: str, scope: SweepScope) -> pd.DataFrame:
    if name not in SWEEPS:
        raise UsageError(f"unknown sweep {name!r}; choose from {', '.join(SWEEPS)}")
    sweep, kinds = SWEEPS[name]
    if scope.kind not in kinds:
        raise KindError(f"the {name} sweep does not apply to {scope.kind.value} frames")
    logging.info(f"Running the {name} sweep on {scope.kind.value} frames up to size {scope.max_size}")
    table = sweep(scope)
    failures = int((~table['ok'].astype(bool)).sum()) if len(table) else 0
    logging.info(f"{name} sweep: {len(table)} cases, {failures} failures")
    return table


def make_scope(kind, **settings) -> SweepScope:
    """A scope with the given settings, None meaning the default"""
    return SweepScope(get_kind(kind), **{key: value for key, value in settings.items() if value is not None})

"""
The workbench commands, shared by the argparse CLI and the HTTP blueprints.

Every command takes decoded JSON / plain values and returns a CommandResult;
input errors propagate as WorkbenchError subclasses for the caller to map.
"""
import json
import logging
from typing import List, NamedTuple, Optional, Sequence

import pandas as pd

from main.constants.axioms import get_axiom_set
from main.constants.exit_codes import EXIT_OK, EXIT_PROPERTY_FAILURE
from main.constants.signatures import get_kind
from main.errors import FormatError, KindMismatch, UsageError
from main.services import sweeps
from main.services.algebras import complex_algebra
from main.services.dot_export import frame_to_dot
from main.services.duality import prime_filter_extension
from main.services.frame_io import (algebra_to_json, dump_json, frame_to_json, map_from_json,
                                    map_to_json, states, valuation_from_json, valuation_to_json)
from main.services.frames import (check_frame_morphism, disjoint_union, frame_validates, generate_subframe,
                                  is_frame_isomorphism, truth_set, validate_frame)
from main.services.harness import audit_closure, build_universe, fr_dataframe, sample_frames
from main.services.posets import mask_of
from main.services.syntax import AxiomPair, is_rank1, is_rank1_axiom, parse, parse_any, to_ast, to_text


class CommandResult(NamedTuple):
    exit_code: int
    output: str
    table: Optional[pd.DataFrame] = None


def _ok(output: str, table: Optional[pd.DataFrame] = None) -> CommandResult:
    return CommandResult(EXIT_OK, output, table)


# Axiom sources

def read_axiom_lines(path: str) -> List[str]:
    """One formula per line; blank lines and '#' comments are skipped"""
    try:
        with open(path, 'r', encoding='utf-8') as f:
            lines = f.read().splitlines()
    except FileNotFoundError:
        raise UsageError(f'file not found: {path}')
    return [line.strip() for line in lines if line.strip() and not line.strip().startswith('#')]


def resolve_axioms(kind, source, allow_files: bool = True) -> List[str]:
    """A stock set name, a list of formula texts, or (when allowed) a path to an axiom file"""
    kind = get_kind(kind)
    if isinstance(source, list):
        return source
    if not isinstance(source, str):
        raise UsageError('axioms must be a stock set name or a list of formulas')
    named = get_axiom_set(source)
    if named is not None:
        named_kind, texts = named
        if named_kind != kind:
            raise KindMismatch(f'axiom set {source!r} is for {named_kind.value} frames, not {kind.value}')
        return list(texts)
    if not allow_files:
        raise UsageError(f'unknown axiom set {source!r}; send a stock set name or a list of formulas')
    return read_axiom_lines(source)


def parse_axioms(kind, texts: Sequence[str]):
    if not texts:
        raise UsageError('no axioms given')
    return [parse_any(text, kind) for text in texts]


# Single-frame commands

def run_parse(sig, text: str) -> CommandResult:
    parsed = parse_any(text, sig)
    if isinstance(parsed, AxiomPair):
        lines = [f'axiom: {parsed}',
                 f'lhs: {to_ast(parsed.lhs)}',
                 f'rhs: {to_ast(parsed.rhs)}',
                 f'rank1: {str(is_rank1_axiom(parsed)).lower()}']
    else:
        lines = [f'formula: {to_text(parsed)}',
                 f'ast: {to_ast(parsed)}',
                 f'rank1: {str(is_rank1(parsed)).lower()}']
    return _ok('\n'.join(lines))


def run_check_frame(raw_frame) -> CommandResult:
    frame = validate_frame(raw_frame)
    return _ok(f'ok: {frame.kind.value} frame with {frame.size} states')


def run_mc(raw_frame, raw_valuation, text: str) -> CommandResult:
    frame = validate_frame(raw_frame)
    model = valuation_from_json(raw_valuation, frame)
    formula = parse(text, frame.kind)
    return _ok(dump_json({'formula': to_text(formula), 'truth_set': states(truth_set(model, formula))}))


def run_valid(raw_frame, text: str) -> CommandResult:
    frame = validate_frame(raw_frame)
    verdict = frame_validates(frame, parse(text, frame.kind))
    if verdict.valid:
        return _ok('valid')
    counterexample = dump_json({'state': verdict.state, 'valuation': valuation_to_json(verdict.counterexample)})
    return CommandResult(EXIT_PROPERTY_FAILURE, f'invalid\n{counterexample}')


def run_ca(raw_frame) -> CommandResult:
    return _ok(dump_json(algebra_to_json(complex_algebra(validate_frame(raw_frame)))))


def run_pe(raw_frame, variant: str = 'tau') -> CommandResult:
    frame = validate_frame(raw_frame)
    extension, unit = prime_filter_extension(frame, variant)
    return _ok(dump_json({
        'frame': frame_to_json(extension),
        'eta': [[x, unit(x)] for x in range(frame.size)],
        'variant': variant,
    }))


def run_du(raw_frames: Sequence) -> CommandResult:
    if len(raw_frames) < 1:
        raise UsageError('du needs at least one frame')
    union, injections = disjoint_union([validate_frame(raw) for raw in raw_frames])
    return _ok(dump_json({'frame': frame_to_json(union), 'injections': [map_to_json(f) for f in injections]}))


def run_gensub(raw_frame, seed_states: Sequence[int]) -> CommandResult:
    frame = validate_frame(raw_frame)
    for k, x in enumerate(seed_states):
        if not 0 <= x < frame.size:
            raise FormatError(f'$.seed_states[{k}]', f'state index out of range for size {frame.size}: {x}')
    sub, inclusion = generate_subframe(frame, mask_of(seed_states))
    return _ok(dump_json({'frame': frame_to_json(sub), 'inclusion': map_to_json(inclusion)}))


def run_morph(raw_map, raw_source, raw_target) -> CommandResult:
    source, target = validate_frame(raw_source), validate_frame(raw_target)
    f = map_from_json(raw_map, source.base, target.base)
    failure = check_frame_morphism(f, source, target)
    if failure is not None:
        condition, witness = failure
        return CommandResult(EXIT_PROPERTY_FAILURE, f'not a morphism: {condition} (witness {list(witness)})')
    properties = {
        'morphism': True,
        'embedding': f.is_embedding(),
        'surjective': f.is_surjective(),
        'isomorphism': is_frame_isomorphism(f, source, target),
    }
    return _ok(dump_json(properties))


def run_dot(raw_frame) -> CommandResult:
    return _ok(frame_to_dot(validate_frame(raw_frame)).rstrip('\n'))


# Universe commands

def run_enum(kind, n: int) -> CommandResult:
    universe = build_universe(kind, n)
    table = pd.DataFrame([{'frame': i, 'size': frame.size} for i, frame in enumerate(universe.frames)],
                         columns=['frame', 'size'])
    return _ok(dump_json({
        'kind': universe.kind.value,
        'max_size': n,
        'count': len(universe),
        'frames': [frame_to_json(frame) for frame in universe.frames],
    }), table)


def run_fr(kind, n: int, axiom_source, sample: Optional[int] = None, seed: int = 0,
           universe_sample: Optional[int] = None, allow_files: bool = True) -> CommandResult:
    kind = get_kind(kind)
    texts = resolve_axioms(kind, axiom_source, allow_files)
    axioms = parse_axioms(kind, texts)
    universe = build_universe(kind, n, sample=universe_sample, seed=seed)
    indices = sample_frames(universe, sample, seed)
    table = fr_dataframe(axioms, universe, indices)
    members = [int(i) for i in table.loc[table['in_class'], 'frame']]
    return _ok(dump_json({
        'kind': kind.value,
        'max_size': n,
        'axioms': [str(axiom) for axiom in axioms],
        'examined': len(indices),
        'universe_size': len(universe),
        'universe_sampled': universe.sampled,
        'members': members,
        'count': len(members),
    }), table)


def run_audit(kind, n: int, axiom_source, variant: str = 'tau', budget: Optional[int] = None,
              check_size: Optional[int] = None, universe_sample: Optional[int] = None, seed: int = 0,
              allow_files: bool = True) -> CommandResult:
    kind = get_kind(kind)
    axioms = parse_axioms(kind, resolve_axioms(kind, axiom_source, allow_files))
    universe = build_universe(kind, n, sample=universe_sample, seed=seed)
    table = fr_dataframe(axioms, universe)
    members = [int(i) for i in table.loc[table['in_class'], 'frame']]
    report = audit_closure(members, universe, axioms=axioms, check_size=check_size, variant=variant, budget=budget)
    if not report.passed:
        logging.warning(f"Audit found failures in {[name for name, c in report.checks.items() if not c.passed]}")
    exit_code = EXIT_OK if report.passed else EXIT_PROPERTY_FAILURE
    return CommandResult(exit_code, report.to_json(), report.to_dataframe())


def run_sweep(name: str, kind, n: int = 3, depth: int = 2, letter_names: Sequence[str] = ('p', 'q'),
              formulas: Optional[int] = None, frames: Optional[int] = None, universe_sample: Optional[int] = None,
              seed: int = 0, algebra_limit: Optional[int] = None) -> CommandResult:
    scope = sweeps.make_scope(kind, max_size=n, depth=depth, letters=tuple(letter_names), formula_limit=formulas,
                       frame_limit=frames, universe_sample=universe_sample, seed=seed, algebra_limit=algebra_limit)
    table = sweeps.run_sweep(name, scope)
    failed = table.loc[~table['ok'].astype(bool)] if len(table) else table
    exit_code = EXIT_OK if failed.empty else EXIT_PROPERTY_FAILURE
    return CommandResult(exit_code, dump_json({
        'sweep': name,
        'kind': scope.kind.value,
        'max_size': scope.max_size,
        'depth': scope.depth,
        'letters': list(scope.letters),
        'examined': len(table),
        'failures': len(failed),
        'passed': failed.empty,
        'first_failures': json.loads(failed.head(10).to_json(orient='records')),
    }), table)

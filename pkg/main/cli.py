import argparse
import logging
import sys
from typing import List, Optional, Tuple

from main.config import override_limits
from main.constants.exit_codes import EXIT_USAGE
from main.errors import SizeGuard, UsageError, WorkbenchError
from main.services import commands
from main.services.frame_io import load_json
from main.services.sweeps import SWEEPS

KINDS = ['box', 'im', 'cin', 'si']

# --max-* flag -> Limits field
LIMIT_FLAGS = {
    'max_poset_size': 'largest poset accepted from input',
    'max_enum_size': 'largest poset size enumerated up to isomorphism',
    'max_subset_scan': 'largest subset or family scan',
    'max_algebra_size': 'largest complex algebra',
    'max_valuations': 'largest valuation sweep',
    'max_maps': 'largest monotone map enumeration',
    'max_universe': 'largest per-poset structure search',
}


def _seed_states(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f'expected comma separated state indices, got {text!r}')


def _letters(text: str) -> Tuple[str, ...]:
    names = tuple(part.strip() for part in text.split(',') if part.strip())
    if not names or not all(name.isidentifier() for name in names):
        raise argparse.ArgumentTypeError(f'expected comma separated letters, got {text!r}')
    return names


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--seed', type=int, default=0, help='seed for every sampled choice (default 0)')
    common.add_argument('-v', '--verbose', action='store_true', help='debug logging on stderr')
    common.add_argument('--progress', action='store_true', help='show progress bars')
    common.add_argument('--workers', type=int, default=None, help='worker processes for validity scans')
    common.add_argument('--csv', default=None, help='also write the result table to this CSV file')
    for name, text in LIMIT_FLAGS.items():
        common.add_argument(f"--{name.replace('_', '-')}", dest=name, type=int, default=None, help=text)

    parser = argparse.ArgumentParser(prog='gtw', description='Dialgebraic intuitionistic modal logic workbench')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('parse', parents=[common], help='print the AST and rank-1 status of a formula')
    p.add_argument('--sig', choices=KINDS, required=True)
    p.add_argument('--formula', required=True)

    p = sub.add_parser('check-frame', parents=[common], help='validate a frame file')
    p.add_argument('--frame', required=True)

    p = sub.add_parser('mc', parents=[common], help='truth set of a formula in a model')
    p.add_argument('--frame', required=True)
    p.add_argument('--valuation', required=True)
    p.add_argument('--formula', required=True)

    p = sub.add_parser('valid', parents=[common], help='frame validity with a counterexample')
    p.add_argument('--frame', required=True)
    p.add_argument('--formula', required=True)

    p = sub.add_parser('ca', parents=[common], help='complex algebra as JSON')
    p.add_argument('--frame', required=True)

    p = sub.add_parser('pe', parents=[common], help='prime filter extension and the eta map')
    p.add_argument('--frame', required=True)
    p.add_argument('--variant', choices=['tau', 'sigma'], default='tau')

    p = sub.add_parser('du', parents=[common], help='disjoint union of frames')
    p.add_argument('--frames', nargs='+', required=True)

    p = sub.add_parser('gensub', parents=[common], help='subframe generated by some states')
    p.add_argument('--frame', required=True)
    p.add_argument('--seed-states', type=_seed_states, required=True)

    p = sub.add_parser('morph', parents=[common], help='check a map between frames')
    p.add_argument('--map', required=True)
    p.add_argument('--from', dest='source', required=True)
    p.add_argument('--to', dest='target', required=True)

    p = sub.add_parser('enum', parents=[common], help='enumerate a frame universe')
    p.add_argument('--kind', choices=KINDS, required=True)
    p.add_argument('--n', type=int, required=True)

    p = sub.add_parser('fr', parents=[common], help='frames of a universe validating some axioms')
    p.add_argument('--kind', choices=KINDS, required=True)
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--axioms', required=True, help='axiom file, one formula per line, or a stock set name')
    p.add_argument('--sample', type=int, default=None, help='check a seeded sample of this many frames')
    p.add_argument('--universe-sample', type=int, default=None,
                   help='draw this many seeded structures per poset whose structure count exceeds --max-universe')

    p = sub.add_parser('audit', parents=[common], help='closure audit of Fr(axioms)')
    p.add_argument('--kind', choices=KINDS, required=True)
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--axioms', required=True, help='axiom file, one formula per line, or a stock set name')
    p.add_argument('--variant', choices=['tau', 'sigma'], default='tau')
    p.add_argument('--budget', type=int, default=None, help='map budget for the subframe and image scans')
    p.add_argument('--check-size', type=int, default=None, help='largest disjoint union examined')
    p.add_argument('--universe-sample', type=int, default=None,
                   help='draw this many seeded structures per poset whose structure count exceeds --max-universe')

    p = sub.add_parser('sweep', parents=[common], help='run a property sweep over a frame corpus')
    p.add_argument('--name', choices=list(SWEEPS), required=True)
    p.add_argument('--kind', choices=KINDS, required=True)
    p.add_argument('--n', type=int, default=3, help='largest frame size (default 3)')
    p.add_argument('--depth', type=int, default=2, help='formula depth (default 2)')
    p.add_argument('--letters', type=_letters, default=('p', 'q'), help='comma separated letters (default p,q)')
    p.add_argument('--formulas', type=int, default=None, help='seeded sample of this many formulas (default 25)')
    p.add_argument('--frames', type=int, default=None, help='seeded sample of this many frames (default 150)')
    p.add_argument('--algebra-limit', type=int, default=None, help='largest complex algebra examined (default 8)')
    p.add_argument('--universe-sample', type=int, default=None,
                   help='draw this many seeded structures per poset whose structure count exceeds --max-universe')

    p = sub.add_parser('dot', parents=[common], help='Graphviz rendering of a frame')
    p.add_argument('--frame', required=True)
    return parser


def dispatch(args: argparse.Namespace) -> commands.CommandResult:
    command = args.command
    if command == 'parse':
        return commands.run_parse(args.sig, args.formula)
    if command == 'check-frame':
        return commands.run_check_frame(load_json(args.frame))
    if command == 'mc':
        return commands.run_mc(load_json(args.frame), load_json(args.valuation), args.formula)
    if command == 'valid':
        return commands.run_valid(load_json(args.frame), args.formula)
    if command == 'ca':
        return commands.run_ca(load_json(args.frame))
    if command == 'pe':
        return commands.run_pe(load_json(args.frame), args.variant)
    if command == 'du':
        return commands.run_du([load_json(path) for path in args.frames])
    if command == 'gensub':
        return commands.run_gensub(load_json(args.frame), args.seed_states)
    if command == 'morph':
        return commands.run_morph(load_json(args.map), load_json(args.source), load_json(args.target))
    if command == 'enum':
        return commands.run_enum(args.kind, args.n)
    if command == 'fr':
        return commands.run_fr(args.kind, args.n, args.axioms, sample=args.sample, seed=args.seed,
                               universe_sample=args.universe_sample)
    if command == 'audit':
        return commands.run_audit(args.kind, args.n, args.axioms, variant=args.variant, budget=args.budget,
                                  check_size=args.check_size, universe_sample=args.universe_sample, seed=args.seed)
    if command == 'sweep':
        return commands.run_sweep(args.name, args.kind, args.n, depth=args.depth, letter_names=args.letters,
                                  formulas=args.formulas, frames=args.frames, universe_sample=args.universe_sample,
                                  seed=args.seed, algebra_limit=args.algebra_limit)
    if command == 'dot':
        return commands.run_dot(load_json(args.frame))
    raise UsageError(f'unknown command {command!r}')


def run(argv: Optional[List[str]] = None) -> int:
    """Run one command; returns the exit code (0 ok, 1 property failure, 2 usage, 3 size guard)"""
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else 0

    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format='%(levelname)s:%(message)s', force=True)
    caps = {name: getattr(args, name) for name in LIMIT_FLAGS}
    caps['workers'] = args.workers
    caps['show_progress'] = True if args.progress else None

    try:
        with override_limits(**caps):
            result = dispatch(args)
    except SizeGuard as e:
        print(f'error: {e}', file=sys.stderr)
        if e.partial is not None:
            print(e.partial.to_json())
        return e.exit_code
    except WorkbenchError as e:
        print(f'error: {e}', file=sys.stderr)
        return e.exit_code

    print(result.output)
    if args.csv and result.table is not None:
        result.table.to_csv(args.csv, index=False)
        logging.info(f"Saved {len(result.table)} rows to {args.csv}")
    return result.exit_code


def main() -> None:
    sys.exit(run())

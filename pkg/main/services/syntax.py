"""
Formulas of the modal intuitionistic languages.

Grammar (ASCII), loosest binding first:

    formula := chain ('<->' chain)?          sugar for (a -> b) & (b -> a)
    chain   := disj (('->' | '~>') chain)?   right associative, no mixing
    disj    := conj ('|' conj)*
    conj    := unary ('&' unary)*
    unary   := ('box' | 'dia' | 'tri') unary | atom
    atom    := 'T' | 'F' | identifier | '(' formula ')'
"""
import re
from dataclasses import dataclass
from itertools import product
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from main.constants.signatures import SIGNATURE_MODALITIES, Kind, get_kind
from main.errors import ParseError, SignatureError


class Formula:
    """Base of the AST; nodes are frozen dataclasses and hash structurally"""
    node = ''

    def children(self) -> Tuple['Formula', ...]:
        return ()

    def rebuild(self, children: Sequence['Formula']) -> 'Formula':
        return self

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Top(Formula):
    node = 'top'


@dataclass(frozen=True)
class Bot(Formula):
    node = 'bot'


@dataclass(frozen=True)
class Letter(Formula):
    name: str
    node = 'letter'


@dataclass(frozen=True)
class _Binary(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)

    def rebuild(self, children):
        return type(self)(*children)


@dataclass(frozen=True)
class _Unary(Formula):
    body: Formula

    def children(self):
        return (self.body,)

    def rebuild(self, children):
        return type(self)(*children)


@dataclass(frozen=True)
class And(_Binary):
    node = 'and'


@dataclass(frozen=True)
class Or(_Binary):
    node = 'or'


@dataclass(frozen=True)
class Imp(_Binary):
    node = 'imp'


@dataclass(frozen=True)
class Sto(_Binary):
    """Strict implication left ~> right"""
    node = 'sto'


@dataclass(frozen=True)
class Box(_Unary):
    node = 'box'


@dataclass(frozen=True)
class Dia(_Unary):
    node = 'dia'


@dataclass(frozen=True)
class Tri(_Unary):
    node = 'tri'


MODAL_NODES = {'box': Box, 'dia': Dia, 'tri': Tri, 'sto': Sto}
BINARY_SYMBOLS = {'and': '&', 'or': '|', 'imp': '->', 'sto': '~>'}


@dataclass(frozen=True)
class AxiomPair:
    """lhs <-> rhs"""
    lhs: Formula
    rhs: Formula

    def as_formula(self) -> Formula:
        return And(Imp(self.lhs, self.rhs), Imp(self.rhs, self.lhs))

    def __str__(self) -> str:
        return f'{to_text(self.lhs)} <-> {to_text(self.rhs)}'


@dataclass(frozen=True)
class Signature:
    kind: Kind

    @property
    def modalities(self) -> FrozenSet[str]:
        return SIGNATURE_MODALITIES[self.kind]

    def admits(self, formula: Formula) -> bool:
        return all(node in self.modalities for node in modal_nodes(formula))


def signature(kind) -> Signature:
    return Signature(get_kind(kind))


# Tokenizer

_TOKEN = re.compile(r'\s*(?:(<->|->|~>|[&|()])|([A-Za-z_][A-Za-z0-9_]*))')
_PREFIX = {'box', 'dia', 'tri'}


def tokenize(text: str) -> List[Tuple[str, int]]:
    if not text.isascii():
        raise ParseError('only ASCII input is supported', next(i for i, c in enumerate(text) if not c.isascii()))
    tokens = []
    position = 0
    while True:
        while position < len(text) and text[position].isspace():
            position += 1
        if position >= len(text):
            break
        match = _TOKEN.match(text, position)
        if not match:
            raise ParseError(f'unexpected character {text[position]!r}', position)
        start = match.start(1) if match.group(1) else match.start(2)
        tokens.append((match.group(1) or match.group(2), start))
        position = match.end()
    tokens.append(('<end>', len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, sig: Signature):
        self.tokens = tokenize(text)
        self.index = 0
        self.sig = sig

    def peek(self) -> Tuple[str, int]:
        return self.tokens[self.index]

    def advance(self) -> Tuple[str, int]:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def expect(self, value: str) -> None:
        token, position = self.advance()
        if token != value:
            raise ParseError(f'expected {value!r}, found {token!r}', position)

    def top(self) -> Union[Formula, AxiomPair]:
        left = self.chain()
        result: Union[Formula, AxiomPair] = left
        if self.peek()[0] == '<->':
            self.advance()
            result = AxiomPair(left, self.chain())
        token, position = self.peek()
        if token != '<end>':
            raise ParseError(f'unexpected {token!r}', position)
        return result

    def chain(self, operator: Optional[str] = None) -> Formula:
        left = self.disj()
        token, position = self.peek()
        if token not in ('->', '~>'):
            return left
        if operator is not None and token != operator:
            raise ParseError(f'mixing {operator!r} and {token!r} needs parentheses', position)
        self.advance()
        if token == '~>':
            self._check_modality('sto', position)
        right = self.chain(token)
        return Imp(left, right) if token == '->' else Sto(left, right)

    def disj(self) -> Formula:
        left = self.conj()
        while self.peek()[0] == '|':
            self.advance()
            left = Or(left, self.conj())
        return left

    def conj(self) -> Formula:
        left = self.unary()
        while self.peek()[0] == '&':
            self.advance()
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        token, position = self.peek()
        if token in _PREFIX:
            self.advance()
            self._check_modality(token, position)
            return MODAL_NODES[token](self.unary())
        return self.atom()

    def atom(self) -> Formula:
        token, position = self.advance()
        if token == '(':
            inner = self.chain()
            if self.peek()[0] == '<->':
                raise ParseError("'<->' is only allowed at the top level", self.peek()[1])
            self.expect(')')
            return inner
        if token == 'T':
            return Top()
        if token == 'F':
            return Bot()
        if re.fullmatch(r'[A-Za-z_][A-Za-z0-9_]*', token):
            return Letter(token)
        raise ParseError(f'unexpected {token!r}', position)

    def _check_modality(self, node: str, position: int) -> None:
        if node not in self.sig.modalities:
            raise SignatureError(f"modality {node!r} at position {position} is not in the {self.sig.kind.value} signature")


def parse_any(text: str, sig) -> Union[Formula, AxiomPair]:
    """Formula, or AxiomPair when the text has a top-level <->"""
    if not isinstance(sig, Signature):
        sig = signature(sig)
    return _Parser(text, sig).top()


def parse(text: str, sig) -> Formula:
    result = parse_any(text, sig)
    return result.as_formula() if isinstance(result, AxiomPair) else result


def parse_axiom(text: str, sig) -> AxiomPair:
    result = parse_any(text, sig)
    if not isinstance(result, AxiomPair):
        raise ParseError("an axiom needs a top-level '<->'", len(text))
    return result


# Printer

_LEVEL = {'imp': 1, 'sto': 1, 'or': 2, 'and': 3}


def _level(formula: Formula) -> int:
    return _LEVEL.get(formula.node, 4)


def to_text(formula: Formula) -> str:
    node = formula.node
    if node == 'top':
        return 'T'
    if node == 'bot':
        return 'F'
    if node == 'letter':
        return formula.name
    if node in ('box', 'dia', 'tri'):
        body = formula.body
        inner = to_text(body)
        return f'{node} {inner}' if _level(body) == 4 else f'{node} ({inner})'
    level = _LEVEL[node]
    left, right = formula.left, formula.right
    if level == 1:
        wrap_left = _level(left) <= 1
        wrap_right = _level(right) < 1 or (_level(right) == 1 and right.node != node)
    else:
        wrap_left = _level(left) < level
        wrap_right = _level(right) <= level
    left_text = f'({to_text(left)})' if wrap_left else to_text(left)
    right_text = f'({to_text(right)})' if wrap_right else to_text(right)
    return f'{left_text} {BINARY_SYMBOLS[node]} {right_text}'


def to_ast(formula: Formula) -> str:
    """Constructor-style rendering, e.g. Box(Letter('p'))"""
    if formula.node == 'letter':
        return f"Letter({formula.name!r})"
    name = type(formula).__name__
    return f"{name}({', '.join(to_ast(child) for child in formula.children())})"


# Structural queries

def walk(formula: Formula) -> Iterator[Formula]:
    yield formula
    for child in formula.children():
        yield from walk(child)


def modal_nodes(formula: Formula) -> List[str]:
    return [sub.node for sub in walk(formula) if sub.node in MODAL_NODES]


def letters(formula: Union[Formula, AxiomPair]) -> FrozenSet[str]:
    if isinstance(formula, AxiomPair):
        return letters(formula.lhs) | letters(formula.rhs)
    return frozenset(sub.name for sub in walk(formula) if sub.node == 'letter')


def is_rank1(formula: Formula) -> bool:
    """No implication, and every letter sits under exactly one modality"""

    def ok(sub: Formula, under: int) -> bool:
        if sub.node == 'imp':
            return False
        if sub.node == 'letter':
            return under == 1
        inner = under + 1 if sub.node in MODAL_NODES else under
        return all(ok(child, inner) for child in sub.children())

    return ok(formula, 0)


def is_rank1_axiom(axiom: AxiomPair) -> bool:
    return is_rank1(axiom.lhs) and is_rank1(axiom.rhs)


def substitute(formula: Formula, mapping: Dict[str, Formula]) -> Formula:
    """Simultaneous replacement of letters"""
    if formula.node == 'letter':
        return mapping.get(formula.name, formula)
    children = formula.children()
    if not children:
        return formula
    return formula.rebuild([substitute(child, mapping) for child in children])


def rename_letters(formula: Formula, renaming: Dict[str, str]) -> Formula:
    return substitute(formula, {old: Letter(new) for old, new in renaming.items()})


def depth(formula: Formula) -> int:
    children = formula.children()
    return 1 + max(depth(child) for child in children) if children else 0


# Corpus

def enumerate_formulas(sig, max_depth: int, letter_names: Sequence[str]) -> List[Formula]:
    """All formulas of the signature up to the given depth, by depth then production"""
    if not isinstance(sig, Signature):
        sig = signature(sig)
    layers: List[List[Formula]] = [[Top(), Bot()] + [Letter(name) for name in letter_names]]
    unary = [MODAL_NODES[m] for m in ('box', 'dia', 'tri') if m in sig.modalities]
    binary = [And, Or, Imp] + ([Sto] if 'sto' in sig.modalities else [])
    for level in range(1, max_depth + 1):
        previous = layers[-1]
        below = [f for layer in layers for f in layer]
        fresh = []
        for op in binary:
            for left, right in product(below, repeat=2):
                if depth(left) == level - 1 or depth(right) == level - 1:
                    fresh.append(op(left, right))
        for op in unary:
            fresh.extend(op(f) for f in previous)
        layers.append(fresh)
    return [f for layer in layers for f in layer]


def sample_formulas(formulas: Sequence[Formula], limit: Optional[int], seed: int = 0) -> List[Formula]:
    """Deterministic sample preserving corpus order"""
    if limit is None or limit >= len(formulas):
        return list(formulas)
    rng = np.random.default_rng(seed)
    chosen = sorted(rng.choice(len(formulas), size=limit, replace=False).tolist())
    return [formulas[i] for i in chosen]

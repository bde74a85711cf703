"""Signatures, trees, contexts and one-layer functor values.

Two functors are supported: the polynomial functor of a ranked alphabet
(``F X = sum over symbols of X^arity``) and the finite powerset functor,
optionally bounded by a maximal branching.  Trees over the powerset functor
are unordered: children of a :class:`SetNode` are kept sorted and
deduplicated, so structural equality already is equality modulo the
permutation/duplication equations.

All values here are immutable.  Trees carry a precomputed hash, size and
hole count, and a total order (size first, then lexicographic) used
everywhere a set of trees needs a deterministic iteration order.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, Union

from .errors import (
    CarrierTooLarge,
    DuplicateName,
    EmptyOutputSet,
    MalformedTree,
    NameClash,
    ParseError,
    SignatureError,
)

HOLE_NAME = "_"
DEFAULT_CAP = 10**6


# --------------------------------------------------------------------------
# signatures


@dataclass(frozen=True)
class RankedAlphabet:
    symbols: tuple[tuple[str, int], ...]

    @classmethod
    def of(cls, *symbols: tuple[str, int]) -> "RankedAlphabet":
        return cls(tuple((str(n), int(a)) for n, a in symbols))

    @classmethod
    def parse(cls, text: str) -> "RankedAlphabet":
        """Build from ``"f/2 g/1 c/0"``."""
        out = []
        for item in text.split():
            name, sep, arity = item.rpartition("/")
            if not sep or not name or not arity.isdigit():
                raise SignatureError(f"bad symbol declaration {item!r}")
            out.append((name, int(arity)))
        return cls(tuple(out))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.symbols)

    def arity(self, name: str) -> int:
        for n, a in self.symbols:
            if n == name:
                return a
        raise KeyError(name)

    def __contains__(self, name: object) -> bool:
        return any(n == name for n, _ in self.symbols)

    def __str__(self) -> str:
        return " ".join(f"{n}/{a}" for n, a in self.symbols)


@dataclass(frozen=True)
class Polynomial:
    alphabet: RankedAlphabet

    def __str__(self) -> str:
        return "polynomial"


@dataclass(frozen=True)
class FinitePowerset:
    max_branch: int | None = None

    def __str__(self) -> str:
        if self.max_branch is None:
            return "powerset"
        return f"powerset max {self.max_branch}"


Functor = Union[Polynomial, FinitePowerset]


@dataclass(frozen=True)
class Signature:
    """Functor, input (leaf) symbols and output values of an automaton."""

    functor: Functor
    leaves: tuple[str, ...]
    outputs: tuple[str, ...] = ("0", "1")

    def validate(self) -> None:
        """Raise the first invariant violation found, if any."""
        _unique(self.leaves, "leaf")
        if not self.outputs:
            raise EmptyOutputSet("output set must not be empty")
        _unique(self.outputs, "output value")
        for name in self.leaves:
            _check_identifier(name, "leaf")
        for value in self.outputs:
            _check_identifier(value, "output value")
        if HOLE_NAME in self.leaves:
            raise NameClash(f"leaf name {HOLE_NAME!r} is reserved for the hole")
        if isinstance(self.functor, Polynomial):
            names = self.functor.alphabet.names
            _unique(names, "symbol")
            for name, arity in self.functor.alphabet.symbols:
                _check_identifier(name, "symbol")
                if arity < 0:
                    raise SignatureError(f"negative arity for symbol {name!r}")
            if HOLE_NAME in names:
                raise NameClash(f"symbol name {HOLE_NAME!r} is reserved for the hole")
            clash = set(names) & set(self.leaves)
            if clash:
                raise NameClash(f"name {sorted(clash)[0]!r} is both a symbol and a leaf")
        elif isinstance(self.functor, FinitePowerset):
            k = self.functor.max_branch
            if k is not None and k < 1:
                raise SignatureError("max branch must be a positive integer")
        else:
            raise SignatureError(f"unknown functor {self.functor!r}")

    @property
    def alphabet(self) -> RankedAlphabet | None:
        if isinstance(self.functor, Polynomial):
            return self.functor.alphabet
        return None


def validate(sig: Signature) -> None:
    sig.validate()


_IDENT = re.compile(r"[^\s(){},#]+")


def _check_identifier(name: str, what: str) -> None:
    if not isinstance(name, str) or not _IDENT.fullmatch(name) or "->" in name:
        raise SignatureError(f"invalid {what} name {name!r}")


def _unique(names: Sequence[str], what: str) -> None:
    seen = set()
    for n in names:
        if n in seen:
            raise DuplicateName(f"duplicate {what} name {n!r}")
        seen.add(n)


# --------------------------------------------------------------------------
# trees


class Tree:
    """Base class of Leaf, Node and SetNode.  Contexts are trees with holes."""

    __slots__ = ("size", "holes", "key", "_hash")

    size: int
    holes: int
    key: tuple

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, Tree):
            return NotImplemented
        return self._hash == other._hash and self.key == other.key

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: "Tree") -> bool:
        return self.key < other.key

    def __le__(self, other: "Tree") -> bool:
        return self.key <= other.key

    def __gt__(self, other: "Tree") -> bool:
        return self.key > other.key

    def __ge__(self, other: "Tree") -> bool:
        return self.key >= other.key

    def __str__(self) -> str:
        return to_literal(self)

    def __repr__(self) -> str:
        return f"<tree {to_literal(self)}>"

    @property
    def is_context(self) -> bool:
        return self.holes > 0


class Leaf(Tree):
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name
        self.size = 1
        self.holes = 1 if name == HOLE_NAME else 0
        self.key = (1, (0, name))
        self._hash = hash((0, name))


class Node(Tree):
    """Polynomial node: a symbol applied to an ordered tuple of subtrees."""

    __slots__ = ("symbol", "children")

    def __init__(self, symbol: str, children: Iterable[Tree] = ()):
        self.symbol = symbol
        self.children = tuple(children)
        self.size = 1 + sum(c.size for c in self.children)
        self.holes = sum(c.holes for c in self.children)
        self.key = (self.size, (1, symbol, tuple(c.key for c in self.children)))
        self._hash = hash((1, symbol, tuple(c._hash for c in self.children)))


class SetNode(Tree):
    """Powerset node.  Children are canonical: sorted and duplicate-free."""

    __slots__ = ("children",)

    def __init__(self, children: Iterable[Tree] = ()):
        self.children = tuple(sorted(set(children), key=_tree_key))
        self.size = 1 + sum(c.size for c in self.children)
        self.holes = sum(c.holes for c in self.children)
        self.key = (self.size, (2, "", tuple(c.key for c in self.children)))
        self._hash = hash((2, tuple(c._hash for c in self.children)))


def _tree_key(t: Tree) -> tuple:
    return t.key


HOLE = Leaf(HOLE_NAME)
Context = Tree


def canonical(t: Tree) -> Tree:
    """Rebuild ``t`` with every powerset layer re-canonicalized."""
    if isinstance(t, Leaf):
        return t
    if isinstance(t, Node):
        return Node(t.symbol, (canonical(c) for c in t.children))
    return SetNode(canonical(c) for c in t.children)


def hole_count(t: Tree) -> int:
    return t.holes


def plug(c: Tree, t: Tree) -> Tree:
    """Replace every hole of ``c`` by ``t``."""
    if c.holes == 0:
        return c
    if isinstance(c, Leaf):
        return t
    if isinstance(c, Node):
        return Node(c.symbol, tuple(plug(x, t) for x in c.children))
    return SetNode(plug(x, t) for x in c.children)


def compose_contexts(outer: Tree, inner: Tree) -> Tree:
    """Substitute ``inner`` for every hole of ``outer``."""
    return plug(outer, inner)


def subterms(t: Tree) -> Iterable[Tree]:
    yield t
    if not isinstance(t, Leaf):
        for c in t.children:
            yield from subterms(c)


def subtree_closure(t: Tree) -> list[Tree]:
    """All subtrees of ``t`` (including itself), in tree order."""
    return sorted(set(subterms(t)), key=_tree_key)


def is_subtree_closed(trees: Iterable[Tree]) -> bool:
    ts = set(trees)
    return all(
        c in ts for t in ts if not isinstance(t, Leaf) for c in t.children
    )


# --------------------------------------------------------------------------
# one-layer values F(X)


@dataclass(frozen=True)
class SymLayer:
    symbol: str
    args: tuple

    def __str__(self) -> str:
        if not self.args:
            return self.symbol
        return f"{self.symbol}({','.join(_show(a) for a in self.args)})"


@dataclass(frozen=True)
class SetLayer:
    items: tuple

    def __str__(self) -> str:
        return "{" + ",".join(_show(a) for a in self.items) + "}"


Layer = Union[SymLayer, SetLayer]


def _show(x) -> str:
    if isinstance(x, Tree):
        return to_literal(x)
    if isinstance(x, tuple):
        return "(" + ",".join(_show(y) for y in x) + ")"
    return str(x)


def order_key(x):
    return x.key if isinstance(x, Tree) else x


def set_layer(items: Iterable) -> SetLayer:
    return SetLayer(tuple(sorted(set(items), key=order_key)))


def layer_items(layer: Layer) -> tuple:
    return layer.args if isinstance(layer, SymLayer) else layer.items


def map_layer(f: Callable, layer: Layer) -> Layer:
    if isinstance(layer, SymLayer):
        return SymLayer(layer.symbol, tuple(f(x) for x in layer.args))
    return set_layer(f(x) for x in layer.items)


def flatten_layer(layer: Layer) -> Tree:
    """Wrap a layer of trees as a single tree node."""
    if isinstance(layer, SymLayer):
        return Node(layer.symbol, layer.args)
    return SetNode(layer.items)


def root_layer(t: Tree) -> Layer:
    """Inverse of :func:`flatten_layer` on non-leaf trees."""
    if isinstance(t, Node):
        return SymLayer(t.symbol, t.children)
    if isinstance(t, SetNode):
        return SetLayer(t.children)
    raise ValueError("a leaf has no root layer")


def count_layers(functor: Functor, n: int) -> int:
    if isinstance(functor, Polynomial):
        return sum(n**a for _, a in functor.alphabet.symbols)
    k = n if functor.max_branch is None else min(n, functor.max_branch)
    return sum(math.comb(n, i) for i in range(k + 1))


def enumerate_layer(functor: Functor, carrier: Sequence, cap: int = DEFAULT_CAP) -> list[Layer]:
    """Every element of F(carrier), in a fixed order.

    Polynomial layers come in alphabet order, then lexicographically by
    argument tuple (w.r.t. carrier order).  Powerset layers come by size,
    then lexicographically, starting with the empty set.
    """
    carrier = list(carrier)
    total = count_layers(functor, len(carrier))
    if total > cap:
        raise CarrierTooLarge(f"|F(X)| = {total} exceeds the cap {cap}")
    if isinstance(functor, Polynomial):
        return [
            SymLayer(name, args)
            for name, arity in functor.alphabet.symbols
            for args in itertools.product(carrier, repeat=arity)
        ]
    k = len(carrier) if functor.max_branch is None else min(len(carrier), functor.max_branch)
    return [set_layer(c) for size in range(k + 1) for c in itertools.combinations(carrier, size)]


def one_level_contexts(functor: Functor, labels: Sequence[Tree], cap: int = DEFAULT_CAP) -> list[Layer]:
    """F(labels + hole).  For the powerset functor only layers holding the hole."""
    layers = enumerate_layer(functor, list(labels) + [HOLE], cap)
    if isinstance(functor, FinitePowerset):
        layers = [x for x in layers if HOLE in x.items]
    return layers


def layer_has_hole(layer: Layer) -> bool:
    return any(isinstance(x, Tree) and x.holes for x in layer_items(layer))


# --------------------------------------------------------------------------
# well-formedness


def check_tree(sig: Signature, t: Tree, allow_hole: bool = False) -> None:
    """Raise MalformedTree unless ``t`` is a tree over ``sig``."""
    functor = sig.functor
    leaves = set(sig.leaves)
    for sub in subterms(t):
        if isinstance(sub, Leaf):
            if sub.name == HOLE_NAME:
                if not allow_hole:
                    raise MalformedTree("hole not allowed here")
            elif sub.name not in leaves:
                raise MalformedTree(f"unknown leaf {sub.name!r}")
        elif isinstance(sub, Node):
            if not isinstance(functor, Polynomial):
                raise MalformedTree("symbol node in a powerset tree")
            if sub.symbol not in functor.alphabet:
                raise MalformedTree(f"unknown symbol {sub.symbol!r}")
            arity = functor.alphabet.arity(sub.symbol)
            if arity != len(sub.children):
                raise MalformedTree(
                    f"symbol {sub.symbol!r} has arity {arity}, got {len(sub.children)} children"
                )
        else:
            if not isinstance(functor, FinitePowerset):
                raise MalformedTree("set node in a polynomial tree")
            k = functor.max_branch
            if k is not None and len(sub.children) > k:
                raise MalformedTree(f"set node with {len(sub.children)} children exceeds max {k}")


# --------------------------------------------------------------------------
# literals
#
#   tree    := '_' | leaf | sym | sym '(' tree (',' tree)* ')' | '{' [tree (',' tree)*] '}'


def to_literal(t: Tree) -> str:
    if isinstance(t, Leaf):
        return t.name
    if isinstance(t, Node):
        if not t.children:
            return t.symbol
        return f"{t.symbol}({','.join(to_literal(c) for c in t.children)})"
    return "{" + ",".join(to_literal(c) for c in t.children) + "}"


_TOKEN = re.compile(r"\s*(?:([(){},])|([^\s(){},]+))")


def _tokenize(text: str) -> list[str]:
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character at offset {pos} in {text!r}")
        out.append(m.group(1) or m.group(2))
        pos = m.end()
    return out


def parse_tree(
    text: str,
    alphabet: RankedAlphabet | None = None,
    leaves: Iterable[str] | None = None,
    allow_hole: bool = True,
) -> Tree:
    """Parse a tree or context literal.

    With ``alphabet`` given, bare identifiers naming nullary symbols become
    nodes and arities are checked.  With ``leaves`` given, any other bare
    identifier must be one of them.
    """
    tokens = _tokenize(text)
    leafset = None if leaves is None else set(leaves)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def expect(tok):
        nonlocal pos
        if peek() != tok:
            raise ParseError(f"expected {tok!r} but found {peek()!r} in {text!r}")
        pos += 1

    def tree() -> Tree:
        nonlocal pos
        tok = peek()
        if tok is None:
            raise ParseError(f"unexpected end of input in {text!r}")
        if tok == "{":
            pos += 1
            kids = []
            if peek() != "}":
                kids.append(tree())
                while peek() == ",":
                    pos += 1
                    kids.append(tree())
            expect("}")
            return SetNode(kids)
        if tok in "(),}":
            raise ParseError(f"unexpected {tok!r} in {text!r}")
        pos += 1
        if peek() == "(":
            pos += 1
            kids = [tree()]
            while peek() == ",":
                pos += 1
                kids.append(tree())
            expect(")")
            return _node(tok, kids)
        if tok == HOLE_NAME:
            if not allow_hole:
                raise ParseError(f"hole not allowed in {text!r}")
            return HOLE
        if alphabet is not None and tok in alphabet:
            return _node(tok, [])
        if leafset is not None and tok not in leafset:
            raise ParseError(f"unknown leaf {tok!r} in {text!r}")
        return Leaf(tok)

    def _node(sym: str, kids: list[Tree]) -> Tree:
        if alphabet is not None:
            if sym not in alphabet:
                raise ParseError(f"unknown symbol {sym!r} in {text!r}")
            if alphabet.arity(sym) != len(kids):
                raise ParseError(
                    f"symbol {sym!r} expects {alphabet.arity(sym)} arguments, got {len(kids)}"
                )
        return Node(sym, kids)

    result = tree()
    if pos != len(tokens):
        raise ParseError(f"trailing input {tokens[pos]!r} in {text!r}")
    return result


def parse_signature_tree(sig: Signature, text: str, allow_hole: bool = False) -> Tree:
    """Parse a literal and check it against ``sig``."""
    t = parse_tree(text, sig.alphabet, sig.leaves, allow_hole=allow_hole)
    try:
        check_tree(sig, t, allow_hole=allow_hole)
    except MalformedTree as exc:
        raise ParseError(str(exc)) from None
    return t

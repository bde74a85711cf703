"""Deterministic bottom-up automata over a supported functor.

An automaton is a finite algebra ``delta: F Q -> Q`` together with a leaf
initialisation ``I -> Q`` and an output map ``Q -> O``.  Evaluation runs
bottom-up; reachability, minimisation and equivalence all work on the
explicit transition table.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterator, Mapping

from .errors import AutomatonError, MissingTransition, SignatureMismatch
from .functor import (
    DEFAULT_CAP,
    Layer,
    Leaf,
    Polynomial,
    Signature,
    SymLayer,
    Tree,
    check_tree,
    enumerate_layer,
    flatten_layer,
    map_layer,
    root_layer,
    set_layer,
)


@dataclass(frozen=True)
class Automaton:
    signature: Signature
    states: tuple[str, ...]
    leaf_init: Mapping[str, str]
    trans: Mapping[Layer, str]
    output: Mapping[str, str]
    default: str | None = None
    cap: int = field(default=DEFAULT_CAP, compare=False)

    @property
    def functor(self):
        return self.signature.functor

    def delta(self, layer: Layer) -> str:
        q = self.trans.get(layer, self.default)
        if q is None:
            raise MissingTransition(f"no transition for {layer}")
        return q

    def validate(self) -> None:
        """Check the signature, references and totality of every map."""
        self.signature.validate()
        states = set(self.states)
        if len(states) != len(self.states):
            raise AutomatonError("duplicate state name")
        if not self.states:
            raise AutomatonError("automaton has no states")
        for x in self.signature.leaves:
            if x not in self.leaf_init:
                raise AutomatonError(f"leaf {x!r} has no initial state")
        for x, q in self.leaf_init.items():
            if x not in self.signature.leaves:
                raise AutomatonError(f"unknown leaf {x!r}")
            if q not in states:
                raise AutomatonError(f"unknown state {q!r}")
        for q in self.states:
            if q not in self.output:
                raise AutomatonError(f"state {q!r} has no output")
        for q, o in self.output.items():
            if q not in states:
                raise AutomatonError(f"unknown state {q!r}")
            if o not in self.signature.outputs:
                raise AutomatonError(f"unknown output value {o!r}")
        if self.default is not None and self.default not in states:
            raise AutomatonError(f"unknown default state {self.default!r}")
        legal = set(enumerate_layer(self.functor, self.states, self.cap))
        for layer, q in self.trans.items():
            if layer not in legal:
                raise AutomatonError(f"transition source {layer} is not a layer over the states")
            if q not in states:
                raise AutomatonError(f"unknown state {q!r}")
        if self.default is None:
            for layer in sorted(legal - set(self.trans), key=str):
                raise MissingTransition(f"no transition for {layer}")

    def total_trans(self) -> dict[Layer, str]:
        """The transition table with the default clause expanded."""
        return {
            layer: self.delta(layer)
            for layer in enumerate_layer(self.functor, self.states, self.cap)
        }

    def __len__(self) -> int:
        return len(self.states)


# --------------------------------------------------------------------------
# evaluation


def _run(aut: Automaton, t: Tree, hole: str | None, memo: dict) -> str:
    q = memo.get(t)
    if q is not None:
        return q
    if isinstance(t, Leaf):
        if t.holes:
            if hole is None:
                raise AutomatonError("cannot evaluate a context without a hole state")
            q = hole
        else:
            try:
                q = aut.leaf_init[t.name]
            except KeyError:
                raise MissingTransition(f"no initial state for leaf {t.name!r}") from None
    else:
        q = aut.delta(map_layer(lambda c: _run(aut, c, hole, memo), root_layer(t)))
    memo[t] = q
    return q


def eval_tree(aut: Automaton, t: Tree) -> str:
    return _run(aut, t, None, {})


def language_of(aut: Automaton, t: Tree) -> str:
    return aut.output[eval_tree(aut, t)]


def eval_context(aut: Automaton, c: Tree, q: str) -> str:
    """Output after evaluating ``c`` with every hole read as state ``q``."""
    return aut.output[_run(aut, c, q, {})]


# --------------------------------------------------------------------------
# exploration with minimal access trees


def _layers_with(functor, done: list, new) -> Iterator[Layer]:
    """Layers over ``done`` (which ends with ``new``) that mention ``new``."""
    if isinstance(functor, Polynomial):
        for name, arity in functor.alphabet.symbols:
            for args in itertools.product(done, repeat=arity):
                if new in args:
                    yield SymLayer(name, args)
        return
    others = done[:-1]
    k = len(done) if functor.max_branch is None else functor.max_branch
    for size in range(min(k - 1, len(others)) + 1):
        for combo in itertools.combinations(others, size):
            yield set_layer(combo + (new,))


def explore(
    sig: Signature,
    init: Callable[[str], Hashable],
    step: Callable[[Layer], Hashable],
    cap: int = DEFAULT_CAP,
) -> Iterator[tuple[Hashable, Tree]]:
    """Yield every reachable state with its least access tree.

    States are yielded in increasing order of their access tree (size,
    then lexicographic).  This is a Knuth-style generalisation of
    Dijkstra: building a node from smaller children always produces a
    larger tree, so the first time a state is popped its tree is minimal.
    """
    heap: list = []
    best: dict = {}
    done: dict = {}
    tie = itertools.count()

    def offer(state, tree):
        cur = best.get(state)
        if state in done or (cur is not None and cur.key <= tree.key):
            return
        best[state] = tree
        heapq.heappush(heap, (tree.key, next(tie), state, tree))

    for x in sig.leaves:
        offer(init(x), Leaf(x))
    for layer in enumerate_layer(sig.functor, [], cap):
        offer(step(layer), flatten_layer(layer))

    order: list = []
    while heap:
        _, _, state, tree = heapq.heappop(heap)
        if state in done:
            continue
        done[state] = tree
        order.append(state)
        yield state, tree
        for layer in _layers_with(sig.functor, order, state):
            target = step(layer)
            if target not in done:
                offer(target, flatten_layer(map_layer(done.__getitem__, layer)))


def reachable(aut: Automaton) -> tuple[list[str], dict[str, Tree]]:
    """Reachable states (ordered by access tree) and their least access trees."""
    access = dict(explore(aut.signature, aut.leaf_init.__getitem__, aut.delta, aut.cap))
    return list(access), access


# --------------------------------------------------------------------------
# minimisation


def _one_hole_plugs(functor, states: list[str]) -> list[Callable[[str], Layer]]:
    """Single-hole one-level contexts over ``states``, as plugging functions.

    Every other position ranges over all states (not only block
    representatives), which makes the refinement fixpoint a congruence.
    """
    plugs: list[Callable[[str], Layer]] = []
    if isinstance(functor, Polynomial):
        for name, arity in functor.alphabet.symbols:
            for pos in range(arity):
                for rest in itertools.product(states, repeat=arity - 1):
                    plugs.append(
                        lambda q, name=name, pos=pos, rest=rest: SymLayer(
                            name, rest[:pos] + (q,) + rest[pos:]
                        )
                    )
        return plugs
    k = len(states) + 1 if functor.max_branch is None else functor.max_branch
    for size in range(min(k - 1, len(states)) + 1):
        for combo in itertools.combinations(states, size):
            plugs.append(lambda q, combo=combo: set_layer(combo + (q,)))
    return plugs


def minimize(aut: Automaton) -> Automaton:
    """Reachable part followed by Moore-style partition refinement."""
    states, _ = reachable(aut)
    block = {q: aut.output[q] for q in states}
    plugs = _one_hole_plugs(aut.functor, states)
    n_blocks = len(set(block.values()))
    while True:
        sig_of = {
            q: (block[q], tuple(block[aut.delta(p(q))] for p in plugs)) for q in states
        }
        ids: dict = {}
        new_block = {q: ids.setdefault(sig_of[q], len(ids)) for q in states}
        if len(ids) == n_blocks:
            break
        block, n_blocks = new_block, len(ids)
    rep: dict = {}
    for q in states:
        rep.setdefault(block[q], q)
    name = {q: rep[block[q]] for q in states}
    new_states = tuple(rep.values())
    trans = {
        layer: name[aut.delta(layer)]
        for layer in enumerate_layer(aut.functor, new_states, aut.cap)
    }
    return Automaton(
        signature=aut.signature,
        states=new_states,
        leaf_init={x: name[aut.leaf_init[x]] for x in aut.signature.leaves},
        trans=trans,
        output={q: aut.output[q] for q in new_states},
        cap=aut.cap,
    )


# --------------------------------------------------------------------------
# equivalence


def _require_same_signature(a: Automaton, b: Automaton) -> None:
    if a.signature != b.signature:
        raise SignatureMismatch("automata have different signatures")


def counterexample(a: Automaton, b: Automaton) -> Tree | None:
    """Least tree on which the two languages differ, or None if they agree.

    Explores the reachable part of the product, so at most |Qa|*|Qb|
    state pairs are discovered.
    """
    _require_same_signature(a, b)

    def fst(p):
        return p[0]

    def snd(p):
        return p[1]

    def init(x):
        return (a.leaf_init[x], b.leaf_init[x])

    def step(layer):
        return (a.delta(map_layer(fst, layer)), b.delta(map_layer(snd, layer)))

    for (p, q), tree in explore(a.signature, init, step, min(a.cap, b.cap)):
        if a.output[p] != b.output[q]:
            return tree
    return None


def equivalent(a: Automaton, b: Automaton) -> bool:
    return counterexample(a, b) is None


def is_isomorphic(a: Automaton, b: Automaton) -> bool:
    """State-renaming isomorphism of two fully reachable automata.

    Returns False when either automaton has unreachable states.
    """
    if a.signature != b.signature:
        return False
    qa, acc_a = reachable(a)
    qb, acc_b = reachable(b)
    if len(qa) != len(qb) or len(qa) != len(a.states) or len(qb) != len(b.states):
        return False
    rename = {}
    for q in qa:
        rename[q] = eval_tree(b, acc_a[q])
    if len(set(rename.values())) != len(qa):
        return False
    if any(a.output[q] != b.output[rename[q]] for q in qa):
        return False
    if any(rename[a.leaf_init[x]] != b.leaf_init[x] for x in a.signature.leaves):
        return False
    return all(
        rename[a.delta(layer)] == b.delta(map_layer(rename.__getitem__, layer))
        for layer in enumerate_layer(a.functor, a.states, a.cap)
    )


"""Observation tables with tree row labels and context columns.

Rows are indexed by a subtree-closed set ``S`` of trees and columns by a
set ``E`` of contexts.  The cell for ``(s, e)`` is the membership of ``e``
with ``s`` plugged into every hole.  The lower part of the table holds the
leaf rows and the rows of all one-step extensions ``F(S)``.
"""

from __future__ import annotations

import bisect
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Union

from .automata import Automaton, reachable
from .errors import InvariantBreach, NotClosedOrConsistent, WellDefinednessBreach
from .functor import (
    DEFAULT_CAP,
    HOLE,
    Layer,
    Leaf,
    Tree,
    compose_contexts,
    enumerate_layer,
    flatten_layer,
    is_subtree_closed,
    layer_has_hole,
    map_layer,
    one_level_contexts,
    plug,
    subtree_closure,
    to_literal,
)
from .teacher import Teacher

Row = tuple


@dataclass(frozen=True)
class NotClosedLeaf:
    leaf: str


@dataclass(frozen=True)
class NotClosedLayer:
    layer: Layer


@dataclass(frozen=True)
class NotConsistent:
    """Two labels with equal rows told apart by a one-level extension.

    ``layer`` is None when the labels already differ in output; otherwise
    ``layer`` (a one-level context over S and the hole) and ``column`` are
    the witness.
    """

    s1: Tree
    s2: Tree
    layer: Layer | None = None
    column: Tree | None = None


Defect = Union[NotClosedLeaf, NotClosedLayer, NotConsistent]


def _key(t: Tree) -> tuple:
    return t.key


class ObservationTable:
    def __init__(
        self,
        teacher: Teacher,
        labels: Iterable[Tree] = (),
        contexts: Iterable[Tree] = (HOLE,),
        cap: int = DEFAULT_CAP,
    ):
        self.teacher = teacher
        self.signature = teacher.signature
        self.functor = self.signature.functor
        self.cap = cap
        self._labels: list[Tree] = []
        self._label_set: set[Tree] = set()
        self.E: list[Tree] = []
        self._cells: dict[Tree, list[str]] = {}
        for c in contexts:
            if c not in self.E:
                self.E.append(c)
        for t in labels:
            self._add_closure(t)

    # -- contents ----------------------------------------------------------

    @property
    def S(self) -> tuple[Tree, ...]:
        return tuple(self._labels)

    def __contains__(self, t: Tree) -> bool:
        return t in self._label_set

    def _add_label(self, t: Tree) -> bool:
        if t in self._label_set:
            return False
        bisect.insort(self._labels, t, key=_key)
        self._label_set.add(t)
        return True

    def _add_closure(self, t: Tree) -> list[Tree]:
        return [u for u in subtree_closure(t) if self._add_label(u)]

    def membership(self, t: Tree) -> str:
        return self.teacher.membership(t)

    def row_of(self, t: Tree) -> Row:
        """Row of an arbitrary tree under the current columns."""
        cells = self._cells.setdefault(t, [])
        for e in self.E[len(cells):]:
            cells.append(self.teacher.membership(plug(e, t)))
        return tuple(cells)

    def row(self, s: Tree) -> Row:
        if s not in self._label_set:
            raise KeyError(f"{to_literal(s)} is not a row label")
        return self.row_of(s)

    def leaf_row(self, x: str) -> Row:
        return self.row_of(Leaf(x))

    def succ_row(self, layer: Layer) -> Row:
        return self.row_of(flatten_layer(layer))

    def top_rows(self) -> dict[Row, Tree]:
        """Distinct top rows, each with its first label (its representative)."""
        reps: dict[Row, Tree] = {}
        for s in self._labels:
            reps.setdefault(self.row_of(s), s)
        return reps

    def distinct_rows(self) -> int:
        return len(self.top_rows())

    def snapshot(self) -> dict[Tree, Row]:
        return {s: self.row_of(s) for s in self._labels}

    def successor_layers(self) -> list[Layer]:
        return enumerate_layer(self.functor, self._labels, self.cap)

    # -- closedness --------------------------------------------------------

    def check_closed(self) -> list[Defect]:
        tops = self.top_rows()
        defects: list[Defect] = [
            NotClosedLeaf(x) for x in self.signature.leaves if self.leaf_row(x) not in tops
        ]
        defects.extend(
            NotClosedLayer(f) for f in self.successor_layers() if self.succ_row(f) not in tops
        )
        return defects

    def _defect_tree(self, d: Defect) -> Tree:
        if isinstance(d, NotClosedLeaf):
            return Leaf(d.leaf)
        if isinstance(d, NotClosedLayer):
            return flatten_layer(d.layer)
        raise TypeError(f"not a closedness defect: {d!r}")

    def fix_closed(self, defects: Iterable[Defect]) -> list[Tree]:
        """Add one label per missing row; returns the labels added."""
        tops = self.top_rows()
        added = []
        for d in defects:
            t = self._defect_tree(d)
            r = self.row_of(t)
            if r in tops:
                continue
            if any(c not in self._label_set for c in getattr(t, "children", ())):
                raise InvariantBreach(f"{to_literal(t)} would break subtree-closedness")
            self._add_label(t)
            tops[r] = t
            added.append(t)
        return added

    # -- consistency -------------------------------------------------------

    def check_consistent(self) -> list[Defect]:
        """One defect per distinct repairing context, in label order."""
        groups: dict[Row, list[Tree]] = defaultdict(list)
        for s in self._labels:
            groups[self.row_of(s)].append(s)
        extensions = None
        defects: list[Defect] = []
        seen: set[Tree] = set()
        for labels in groups.values():
            for i, s in enumerate(labels):
                for t in labels[i + 1:]:
                    if self.membership(s) != self.membership(t):
                        if HOLE not in seen:
                            seen.add(HOLE)
                            defects.append(NotConsistent(s, t))
                        continue
                    if extensions is None:
                        extensions = [
                            (x, flatten_layer(x))
                            for x in one_level_contexts(self.functor, self._labels, self.cap)
                            if layer_has_hole(x)
                        ]
                    for x, cx in extensions:
                        rs = self.row_of(plug(cx, s))
                        rt = self.row_of(plug(cx, t))
                        if rs == rt:
                            continue
                        col = next(i for i, (a, b) in enumerate(zip(rs, rt)) if a != b)
                        new = compose_contexts(self.E[col], cx)
                        if new not in seen:
                            seen.add(new)
                            defects.append(NotConsistent(s, t, x, self.E[col]))
                        break
        return defects

    def fix_consistent(self, defects: Iterable[Defect]) -> list[Tree]:
        """Add the separating contexts named by the defects; returns them."""
        added = []
        if HOLE not in self.E:
            self.E.append(HOLE)
            added.append(HOLE)
        for d in defects:
            if not isinstance(d, NotConsistent):
                raise TypeError(f"not a consistency defect: {d!r}")
            if d.layer is None:
                continue
            c = compose_contexts(d.column, flatten_layer(d.layer))
            if c not in self.E:
                self.E.append(c)
                added.append(c)
        return added

    # -- counterexamples ---------------------------------------------------

    def add_counterexample(self, t: Tree) -> list[Tree]:
        """Add ``t`` and all its subtrees to S; returns the new labels."""
        return self._add_closure(t)

    # -- hypothesis --------------------------------------------------------

    def representatives(self) -> dict[str, Tree]:
        return {f"q{i}": s for i, s in enumerate(self.top_rows().values())}

    def build_hypothesis(self, audit: bool = False, check: bool = True) -> Automaton:
        """Automaton whose states are the distinct top rows."""
        if check and (self.check_closed() or self.check_consistent()):
            raise NotClosedOrConsistent("table must be closed and consistent")
        reps = self.top_rows()
        name = {r: f"q{i}" for i, r in enumerate(reps)}
        rep_of = {name[r]: s for r, s in reps.items()}
        states = tuple(rep_of)
        try:
            leaf_init = {x: name[self.leaf_row(x)] for x in self.signature.leaves}
            trans = {
                layer: name[self.succ_row(map_layer(rep_of.__getitem__, layer))]
                for layer in enumerate_layer(self.functor, states, self.cap)
            }
        except KeyError as exc:
            raise NotClosedOrConsistent(f"row {exc} missing from the top part") from None
        output = {q: self.membership(s) for q, s in rep_of.items()}
        hyp = Automaton(self.signature, states, leaf_init, trans, output, cap=self.cap)
        if audit:
            self._audit_hypothesis(hyp, name)
        return hyp

    def _audit_hypothesis(self, hyp: Automaton, name: dict[Row, str]) -> None:
        hyp.validate()
        state_of = {s: name[self.row_of(s)] for s in self._labels}
        for s in self._labels:
            if hyp.output[state_of[s]] != self.membership(s):
                raise WellDefinednessBreach(f"output of {to_literal(s)} depends on the representative")
        for f in self.successor_layers():
            want = name.get(self.succ_row(f))
            got = hyp.delta(map_layer(state_of.__getitem__, f))
            if want != got:
                raise WellDefinednessBreach(f"transition on {f} depends on the representatives")
        seen, _ = reachable(hyp)
        if len(seen) != len(hyp.states):
            raise InvariantBreach("hypothesis has unreachable states")
        if not is_subtree_closed(self._labels):
            raise InvariantBreach("row labels are not subtree-closed")

    # -- rendering ---------------------------------------------------------

    def dump(self) -> str:
        """Text rendering: header, top rows, ``---``, rows not already on top."""

        def line(t: Tree) -> str:
            cells = " ".join(self.row_of(t))
            return f"{to_literal(t)} :{' ' + cells if cells else ''}"

        out = ["E: " + " | ".join(to_literal(e) for e in self.E) if self.E else "E:"]
        out.extend(line(s) for s in self._labels)
        out.append("---")
        for x in self.signature.leaves:
            if Leaf(x) not in self._label_set:
                out.append(line(Leaf(x)))
        for f in self.successor_layers():
            t = flatten_layer(f)
            if t not in self._label_set:
                out.append(line(t))
        return "\n".join(out) + "\n"

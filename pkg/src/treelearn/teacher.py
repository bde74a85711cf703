"""Membership/equivalence oracles."""

from __future__ import annotations

import threading
from dataclasses import asdict, dataclass
from typing import Protocol

from .automata import Automaton, counterexample, language_of
from .errors import SignatureMismatch
from .functor import Signature, Tree


class Teacher(Protocol):
    signature: Signature

    def membership(self, t: Tree) -> str: ...

    def equivalence(self, hypothesis: Automaton) -> Tree | None:
        """None when the hypothesis is correct, otherwise a counterexample."""
        ...


@dataclass
class QueryStats:
    membership_raw: int = 0
    membership_unique: int = 0
    equivalence_count: int = 0

    def snapshot(self) -> "QueryStats":
        return QueryStats(**asdict(self))


class AutomatonTeacher:
    """Answers queries from a known target automaton."""

    def __init__(self, target: Automaton):
        target.validate()
        self.target = target
        self.signature = target.signature

    @property
    def size_hint(self) -> int:
        return len(self.target.states)

    def membership(self, t: Tree) -> str:
        return language_of(self.target, t)

    def equivalence(self, hypothesis: Automaton) -> Tree | None:
        if hypothesis.signature != self.signature:
            raise SignatureMismatch("hypothesis signature differs from the target's")
        return counterexample(hypothesis, self.target)


class CachingTeacher:
    """Memoizes membership answers and counts queries."""

    def __init__(self, inner: Teacher):
        self.inner = inner
        self.signature = inner.signature
        self.stats = QueryStats()
        self._cache: dict[Tree, str] = {}
        self._lock = threading.Lock()

    @property
    def size_hint(self) -> int | None:
        return getattr(self.inner, "size_hint", None)

    def membership(self, t: Tree) -> str:
        with self._lock:
            self.stats.membership_raw += 1
            hit = self._cache.get(t)
            if hit is not None:
                return hit
        answer = self.inner.membership(t)
        with self._lock:
            if t not in self._cache:
                self._cache[t] = answer
                self.stats.membership_unique += 1
        return answer

    def equivalence(self, hypothesis: Automaton) -> Tree | None:
        with self._lock:
            self.stats.equivalence_count += 1
        return self.inner.equivalence(hypothesis)


def automaton_teacher(target: Automaton) -> AutomatonTeacher:
    return AutomatonTeacher(target)


def caching_teacher(inner: Teacher) -> CachingTeacher:
    return CachingTeacher(inner)

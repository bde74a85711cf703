import random

import pytest

from conftest import EVEN_G, load, word
from oracles import naive_lang, random_polynomial_automaton, random_tree
from treelearn.automata import language_of
from treelearn.errors import SignatureMismatch
from treelearn.teacher import AutomatonTeacher, CachingTeacher, QueryStats


def test_membership(unary_target):
    assert AutomatonTeacher(unary_target).membership(word(1)) == "0"


def test_equivalence_first_hypothesis(unary_target):
    teacher = AutomatonTeacher(unary_target)
    assert teacher.equivalence(load("even-length")) == word(3)


def test_equivalence_correct_hypothesis(unary_target):
    assert AutomatonTeacher(unary_target).equivalence(load("unary-ne1")) is None


def test_signature_mismatch(unary_target, even_g):
    with pytest.raises(SignatureMismatch):
        AutomatonTeacher(unary_target).equivalence(even_g)


def test_counterexamples_are_valid_and_deterministic():
    rng = random.Random(40)
    for _ in range(100):
        target = random_polynomial_automaton(rng)
        hyp = random_polynomial_automaton(random.Random(rng.random()))
        hyp = type(hyp)(target.signature, target.states, {x: rng.choice(target.states) for x in target.signature.leaves},
                        {k: rng.choice(target.states) for k in target.trans}, {q: rng.choice("01") for q in target.states})
        teacher = AutomatonTeacher(target)
        cex = teacher.equivalence(hyp)
        assert cex == teacher.equivalence(hyp)
        if cex is not None:
            assert teacher.membership(cex) != language_of(hyp, cex)


class TestCaching:
    def test_duplicate_calls(self, even_g):
        teacher = CachingTeacher(AutomatonTeacher(even_g))
        t = random_tree(random.Random(0), EVEN_G, 3)
        teacher.membership(t)
        teacher.membership(t)
        assert teacher.stats == QueryStats(membership_raw=2, membership_unique=1)

    def test_distinct_calls(self, even_g):
        teacher = CachingTeacher(AutomatonTeacher(even_g))
        for n in range(5):
            teacher.membership(random_tree(random.Random(n), EVEN_G, 0) if n == 0 else _g_chain(n))
        assert teacher.stats.membership_raw == teacher.stats.membership_unique == 5

    def test_differential_against_uncached(self, even_g):
        inner = AutomatonTeacher(even_g)
        cached = CachingTeacher(inner)
        rng = random.Random(99)
        trees = [random_tree(rng, EVEN_G, 4) for _ in range(1000)]
        for t in trees:
            assert cached.membership(t) == inner.membership(t) == naive_lang(even_g, t)
        stats = cached.stats
        assert stats.membership_unique == len(set(trees)) <= stats.membership_raw == 1000

    def test_forwards_equivalence(self, unary_target):
        teacher = CachingTeacher(AutomatonTeacher(unary_target))
        assert teacher.equivalence(load("even-length")) == word(3)
        assert teacher.stats.equivalence_count == 1

    def test_thread_safety(self, even_g):
        from concurrent.futures import ThreadPoolExecutor

        teacher = CachingTeacher(AutomatonTeacher(even_g))
        trees = [_g_chain(n % 17) for n in range(2000)]
        with ThreadPoolExecutor(8) as pool:
            answers = list(pool.map(teacher.membership, trees))
        assert answers == [("1" if (n % 17) % 2 == 0 else "0") for n in range(2000)]
        assert teacher.stats.membership_raw == 2000
        assert teacher.stats.membership_unique == 17


def _g_chain(n):
    from treelearn.functor import Leaf, Node

    t = Leaf("c")
    for _ in range(n):
        t = Node("g", (t,))
    return t

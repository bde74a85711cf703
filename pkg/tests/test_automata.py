import random

import pytest

from conftest import EVEN_G, load, word
from oracles import (
    brute_reachable,
    brute_state_classes,
    naive_eval,
    naive_lang,
    random_context,
    random_polynomial_automaton,
    random_powerset_automaton,
    random_tree,
    smallest_difference,
    table_filling_classes,
    trees_up_to,
)
from treelearn.automata import (
    Automaton,
    counterexample,
    equivalent,
    eval_context,
    eval_tree,
    is_isomorphic,
    language_of,
    minimize,
    reachable,
)
from treelearn.errors import AutomatonError, MissingTransition, SignatureMismatch
from treelearn.functor import HOLE, Leaf, SetNode, SymLayer, map_layer, parse_tree, plug, root_layer


def random_automata(n, seed=0, powerset=False):
    rng = random.Random(seed)
    gen = random_powerset_automaton if powerset else random_polynomial_automaton
    return [gen(rng) for _ in range(n)]


class TestEval:
    def test_unary_accepts_aa(self, unary_target):
        q = eval_tree(unary_target, word(2))
        assert unary_target.output[q] == "1"

    def test_initial_state(self, unary_target):
        assert eval_tree(unary_target, word(0)) == unary_target.leaf_init["*"]
        assert language_of(unary_target, word(0)) == "1"

    def test_unary_language(self, unary_target):
        assert language_of(unary_target, word(1)) == "0"
        assert language_of(unary_target, word(3)) == "1"

    def test_even_g_parity(self, even_g):
        rng = random.Random(2)
        for _ in range(200):
            t = random_tree(rng, EVEN_G, 5)
            g_count = str(t).count("g(")
            assert (eval_tree(even_g, t) == "even") == (g_count % 2 == 0)
        assert eval_tree(even_g, parse_tree("g(g(c))")) == "even"

    def test_homomorphism(self):
        for aut in random_automata(30, seed=4) + random_automata(30, seed=4, powerset=True):
            rng = random.Random(1)
            for _ in range(20):
                t = random_tree(rng, aut.signature, 4)
                if isinstance(t, Leaf):
                    continue
                kids = map_layer(lambda k: eval_tree(aut, k), root_layer(t))
                assert eval_tree(aut, t) == aut.delta(kids) == naive_eval(aut, t)

    def test_missing_transition(self, even_g):
        broken = Automaton(
            even_g.signature, even_g.states, even_g.leaf_init, {}, even_g.output
        )
        with pytest.raises(MissingTransition):
            eval_tree(broken, parse_tree("g(c)"))
        with pytest.raises(MissingTransition):
            broken.validate()


class TestEvalContext:
    def test_hole(self, even_g):
        for q in even_g.states:
            assert eval_context(even_g, HOLE, q) == even_g.output[q]

    def test_unary_column(self, unary_target):
        assert eval_context(unary_target, parse_tree("a(_)"), unary_target.leaf_init["*"]) == "0"

    def test_no_hole_is_constant(self, even_g):
        ctx = parse_tree("f(c,g(c))")
        assert len({eval_context(even_g, ctx, q) for q in even_g.states}) == 1

    def test_matches_plugged_access_tree(self):
        for aut in random_automata(25, seed=8) + random_automata(25, seed=8, powerset=True):
            _, access = reachable(aut)
            rng = random.Random(3)
            for _ in range(20):
                ctx = random_context(rng, aut.signature, 3)
                for q, t in access.items():
                    assert eval_context(aut, ctx, q) == language_of(aut, plug(ctx, t))


class TestReachable:
    def test_unary_all(self, unary_target):
        states, access = reachable(unary_target)
        assert set(states) == {"e", "one", "many"}
        assert access == {"e": word(0), "one": word(1), "many": word(2)}

    def test_junk_state_absent(self, even_g):
        junk = Automaton(
            even_g.signature,
            even_g.states + ("junk",),
            even_g.leaf_init,
            dict(even_g.trans),
            {**even_g.output, "junk": "1"},
            default="junk",
        )
        assert set(reachable(junk)[0]) == {"even", "odd"}

    def test_even_g_access(self, even_g):
        states, access = reachable(even_g)
        assert states == ["even", "odd"]
        assert access == {"even": Leaf("c"), "odd": parse_tree("g(c)")}

    def test_against_saturation(self):
        for aut in random_automata(40, seed=5) + random_automata(40, seed=5, powerset=True):
            states, access = reachable(aut)
            assert set(states) == brute_reachable(aut)
            for q, t in access.items():
                assert eval_tree(aut, t) == q
                # subtrees of least access trees are least access trees
                for sub in getattr(t, "children", ()):
                    assert access[eval_tree(aut, sub)] == sub
            # least access trees: nothing smaller reaches the state
            small = trees_up_to(aut.signature, 5)
            for t in small:
                q = eval_tree(aut, t)
                assert access[q] <= t


class TestMinimize:
    def test_unary_already_minimal(self, unary_target):
        m = minimize(unary_target)
        assert len(m.states) == 3
        assert is_isomorphic(m, unary_target)

    def test_merges_output_identical_sinks(self):
        aut = load("unary-ne1")
        two_sinks = Automaton(
            aut.signature,
            ("e", "one", "many", "many2"),
            aut.leaf_init,
            {
                SymLayer("a", ("e",)): "one",
                SymLayer("a", ("one",)): "many",
                SymLayer("a", ("many",)): "many2",
                SymLayer("a", ("many2",)): "many",
            },
            {"e": "1", "one": "0", "many": "1", "many2": "1"},
        )
        two_sinks.validate()
        assert len(minimize(two_sinks).states) == 3

    def test_redundant_even_g(self):
        aut = load("even-g-redundant")
        m = minimize(aut)
        assert len(m.states) == 2
        # oracle: pairwise distinguishability over contexts of depth <= 3
        assert brute_state_classes(aut, context_size=5) == 2
        assert equivalent(m, aut)

    def test_random_against_table_filling(self):
        for aut in random_automata(100, seed=21) + random_automata(60, seed=21, powerset=True):
            m = minimize(aut)
            m.validate()
            assert len(m.states) == table_filling_classes(aut)
            assert len(m.states) <= len(reachable(aut)[0])
            assert equivalent(aut, m)
            assert is_isomorphic(minimize(m), m)


class TestEquivalence:
    def test_self(self, even_g):
        assert counterexample(even_g, even_g) is None
        assert equivalent(even_g, even_g)

    def test_first_hypothesis(self, unary_target):
        first = load("even-length")
        assert counterexample(first, unary_target) == word(3)

    def test_even_vs_odd(self, even_g):
        odd = load("odd-g")
        assert counterexample(even_g, odd) == smallest_difference(even_g, odd) == Leaf("c")

    def test_signature_mismatch(self, even_g, unary_target):
        with pytest.raises(SignatureMismatch):
            counterexample(even_g, unary_target)

    @pytest.mark.parametrize("powerset", [False, True])
    def test_minimal_witness_against_enumeration(self, powerset):
        rng = random.Random(31 if powerset else 30)
        gen = random_powerset_automaton if powerset else random_polynomial_automaton
        checked = 0
        for _ in range(300):
            a = gen(rng)
            b = Automaton(
                a.signature,
                a.states,
                {x: rng.choice(a.states) for x in a.signature.leaves},
                {k: (rng.choice(a.states) if rng.random() < 0.2 else v) for k, v in a.trans.items()},
                {q: rng.choice(a.signature.outputs) for q in a.states},
            )
            got = counterexample(a, b)
            back = counterexample(b, a)
            assert (got is None) == (back is None)
            if got is None:
                continue
            assert naive_lang(a, got) != naive_lang(b, got)
            assert got == back
            if got.size <= 6:
                assert got == smallest_difference(a, b, max_size=got.size)
                checked += 1
        assert checked > 50

    def test_unordered_invariance(self):
        aut = load("unordered-depth")
        t1 = parse_tree("{x,{x,x},{x},x}")
        t2 = parse_tree("{{x},x}")
        assert t1 == t2
        assert language_of(aut, t1) == language_of(aut, t2) == "1"
        assert language_of(aut, SetNode([Leaf("x")])) == "0"


class TestValidation:
    def test_unknown_output(self, even_g):
        bad = Automaton(even_g.signature, even_g.states, even_g.leaf_init, even_g.trans, {"even": "2", "odd": "0"})
        with pytest.raises(AutomatonError):
            bad.validate()

    def test_bad_layer(self, even_g):
        trans = dict(even_g.trans)
        trans[SymLayer("g", ("nowhere",))] = "even"
        bad = Automaton(even_g.signature, even_g.states, even_g.leaf_init, trans, even_g.output)
        with pytest.raises(AutomatonError):
            bad.validate()

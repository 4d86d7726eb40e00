import random

import pytest

from ltw import Tree, evaluate, expand, load_ltw, parse_ltw, parse_tree
from ltw import words as W
from ltw.oracle import (BruteQp, EnumerationBudget, brute_equiv,
                        brute_quasi_periodic, enumerate_all_trees,
                        enumerate_trees, evaluate_explicit,
                        string_primitive_root)

from _support import mutate, random_layered

from conftest import FIXTURES


def ex(name):
    return load_ltw(FIXTURES / f"{name}.ltw")


# -- enumeration ---------------------------------------------------------


def test_enumerate_ex3_domain():
    M = ex("ex3")
    trees = enumerate_trees(M, budget=EnumerationBudget(max_depth=5))
    texts = [str(t) for t in trees]
    assert texts == ["f(f(g))", "f(f(f(g)))", "f(f(f(f(g))))"]


def test_enumerate_depth_major_unary():
    trees = enumerate_all_trees([("u", 1), ("n", 0)],
                                EnumerationBudget(max_depth=4))
    assert [str(t) for t in trees] == ["n", "u(n)", "u(u(n))", "u(u(u(n)))"]


def test_enumerate_binary_counts():
    # level sizes for one binary and one nullary symbol follow the
    # "all children shallower, at least one of maximal depth" recurrence
    budget = EnumerationBudget(max_depth=4, max_trees=10 ** 6)
    trees = enumerate_all_trees([("b", 2), ("n", 0)], budget)
    by_depth = {}
    for t in trees:
        by_depth[t.depth] = by_depth.get(t.depth, 0) + 1
    assert by_depth[1] == 1
    assert by_depth[2] == 1            # b(n,n)
    assert by_depth[3] == 2 * 2 - 1    # pairs over {n, b(n,n)} minus shallow
    c3 = 1 + 1 + 3
    assert by_depth[4] == c3 * c3 - 2 * 2
    # no duplicates
    assert len(set(map(str, trees))) == len(trees)


def test_enumerate_budget_prefix_stable():
    big = enumerate_all_trees([("b", 2), ("n", 0)],
                              EnumerationBudget(max_depth=5, max_trees=500))
    small = enumerate_all_trees([("b", 2), ("n", 0)],
                                EnumerationBudget(max_depth=5, max_trees=40))
    assert [str(t) for t in small] == [str(t) for t in big[:40]]
    assert len(small) == 40


def test_enumerate_trees_respects_domain():
    M = ex("ex7")
    trees = enumerate_trees(M, budget=EnumerationBudget(max_depth=4))
    for t in trees:
        evaluate(M, t)  # must not raise


# -- explicit evaluation -------------------------------------------------


def test_evaluate_explicit_matches_compressed():
    rng = random.Random(5)
    for _ in range(20):
        M = random_layered(rng, 3)
        for t in enumerate_trees(M, budget=EnumerationBudget(max_depth=4,
                                                             max_trees=100)):
            assert evaluate_explicit(M, t) == expand(evaluate(M, t))


def test_evaluate_explicit_none_when_undefined():
    M = ex("ex3")
    assert evaluate_explicit(M, parse_tree("g", M.alphabet)) is None


def test_evaluate_explicit_cap_is_loud():
    M = ex("stress_doubling")
    t = parse_tree("f(g)", M.alphabet)
    with pytest.raises(W.CapExceeded):
        evaluate_explicit(M, t, cap=10 ** 6)


# -- brute-force equivalence ----------------------------------------------


def test_brute_equiv_equivalent_pair():
    v = brute_equiv(ex("ex5a"), ex("ex5b"),
                    EnumerationBudget(max_depth=4))
    assert v.equivalent and v.witness is None
    assert v.trees_checked > 0


def test_brute_equiv_finds_output_difference():
    M = ex("ex3")
    rules = dict(M.rules)
    r = rules[("q2", "g")]
    from ltw import Rule
    rules[("q2", "g")] = Rule("q2", "g", (M.pool.literal("abx"),), ())
    N = M.with_(rules=rules)
    v = brute_equiv(M, N, EnumerationBudget(max_depth=5))
    assert not v.equivalent and v.reason == "output"
    o1 = evaluate_explicit(M, v.witness)
    o2 = evaluate_explicit(N, v.witness)
    assert o1 is not None and o2 is not None and o1 != o2


def test_brute_equiv_finds_definedness_difference():
    M = ex("ex3")
    rules = dict(M.rules)
    del rules[("q2", "g")]  # N accepts nothing at all
    N = M.with_(rules=rules)
    v = brute_equiv(M, N, EnumerationBudget(max_depth=5))
    assert not v.equivalent and v.reason == "definedness"
    assert (evaluate_explicit(M, v.witness) is None) != \
           (evaluate_explicit(N, v.witness) is None)


def test_brute_equiv_arity_conflict():
    A = parse_ltw('input f:1 g:0\naxiom = q(x)\nrule q f(x1) = q(x1)\n'
                  'rule q g = ""\n')
    B = parse_ltw('input f:2 g:0\naxiom = q(x)\n'
                  'rule q f(x1,x2) = q(x1) q(x2)\nrule q g = ""\n')
    with pytest.raises(ValueError):
        brute_equiv(A, B)


def test_brute_equiv_budget_hit_reported():
    v = brute_equiv(ex("ex5a"), ex("ex5a"),
                    EnumerationBudget(max_depth=6, max_trees=50))
    assert v.equivalent and v.budget_hit == "trees"


# -- string helpers -------------------------------------------------------


def test_string_primitive_root():
    assert string_primitive_root("") == ""
    assert string_primitive_root("a") == "a"
    assert string_primitive_root("abab") == "ab"
    assert string_primitive_root("aba") == "aba"
    assert string_primitive_root("aaaaaa") == "a"


def test_primitive_root_cross_check():
    rng = random.Random(9)
    pool = W.SlpPool()
    for _ in range(300):
        base = "".join(rng.choice("ab") for _ in range(rng.randrange(1, 6)))
        s = base * rng.randrange(1, 5)
        assert expand(W.primitive_root(pool.literal(s))) == \
            string_primitive_root(s)


def test_brute_quasi_periodic_on_ex3_outputs():
    M = ex("ex3")
    outs = [evaluate_explicit(M, t)
            for t in enumerate_trees(M, budget=EnumerationBudget(max_depth=7))]
    v = brute_quasi_periodic(outs, "left")
    assert v is not None
    assert v.handle == "aaaabcabc" and v.period == "abc"
    rv = brute_quasi_periodic(outs, "right")
    assert rv is None  # the stripped tails are not right-periodic


def test_brute_quasi_periodic_rejects_mixed():
    assert brute_quasi_periodic(["ab", "ba", "abab"], "left") is None

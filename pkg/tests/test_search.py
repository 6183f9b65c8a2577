import itertools
import json

import pytest
from hypothesis import given, strategies as st

from names import B1, B2, NAMES
from strategies import terms

from ncnat.arithmetic import multiply, multiply_classes, oplus
from ncnat.congruence import are_equal, class_of, close_stratum
from ncnat.errors import ParseError
from ncnat.qinv import ELL, ELL_A, eval_morphism
from ncnat.search import (
    NonCancelWitness,
    RewriteChain,
    find_collisions,
    flanked_candidates,
    flanked_term,
    parse_chain,
    read_chain,
    search_noncancel,
    verify_chain,
)
from ncnat.terms import RewriteSite, apply_rewrite, parse, rewrite_sites

N = NAMES


def test_collision_examples():
    assert find_collisions(ELL_A, 5) == []
    assert (class_of(N["4_1"]), class_of(N["4_3"])) in find_collisions(ELL, 4)
    assert (class_of(B1), class_of(B2)) in find_collisions(ELL_A, 8)


def test_collisions_are_sorted_distinct_and_equal_valued():
    pairs = find_collisions(ELL, 6)
    assert pairs == sorted(pairs)
    for a, b in pairs:
        assert a < b
        assert eval_morphism(ELL, a.rep) == eval_morphism(ELL, b.rep)


def test_collisions_brute_force_at_eight():
    classes = close_stratum(8).classes()
    brute = [
        (a, b)
        for a, b in itertools.combinations(classes, 2)
        if eval_morphism(ELL_A, a.rep) == eval_morphism(ELL_A, b.rep)
    ]
    assert find_collisions(ELL_A, 8) == brute


def test_flanked_candidates_small():
    assert flanked_candidates(1) == []


def test_flanked_candidates_three_matches_fixture(fixtures_dir):
    expected = json.loads((fixtures_dir / "flanked_candidates_3.json").read_text())
    got = [[str(class_of(a).rep), str(class_of(b).rep)] for a, b in flanked_candidates(3)]
    assert got == expected


def test_flanked_candidates_find_the_noncancel_pair():
    pairs = flanked_candidates(4)
    hits = [(a, b) for a, b in pairs if {class_of(a), class_of(b)} == {class_of(B1), class_of(B2)}]
    assert len(hits) == 1
    s = eval_morphism(ELL_A, N["2"]) + eval_morphism(ELL_A, N["4_1"])
    assert s == eval_morphism(ELL_A, N["3_1"]) + eval_morphism(ELL_A, N["3_2"])


def test_flanked_candidates_against_brute_force():
    reps = [c.rep for m in range(1, 5) for c in close_stratum(m).classes()]
    expected = set()
    for a1, a2, b1, b2 in itertools.product(reps, repeat=4):
        s, t = flanked_term(a1, a2), flanked_term(b1, b2)
        if eval_morphism(ELL_A, s) == eval_morphism(ELL_A, t) and not are_equal(s, t):
            expected.add(frozenset((class_of(s), class_of(t))))
    got = {frozenset((class_of(a), class_of(b))) for a, b in flanked_candidates(4)}
    assert got == expected


def test_search_noncancel_small_is_empty():
    assert search_noncancel(5, 2) == []


def test_search_noncancel_finds_witness():
    found = search_noncancel(8, 2)
    assert found
    first = found[0]
    assert first == NonCancelWitness(
        class_of(N["2"]), class_of(B1), class_of(B2), class_of(multiply(N["2"], B1))
    )
    for w in found:
        assert w.b1 != w.b2
        assert are_equal(multiply(w.a.rep, w.b1.rep), multiply(w.a.rep, w.b2.rep))
        assert multiply_classes(w.a, w.b1) == w.product == multiply_classes(w.a, w.b2)
        assert not are_equal(w.b1.rep, w.b2.rep)


def test_no_ell_a_collisions_hence_no_witnesses_through_seven():
    for n in range(2, 8):
        assert find_collisions(ELL_A, n) == []
    assert search_noncancel(7, 2) == []


def test_only_nontrivial_rewrite_of_each_cofactor():
    for term, image in [
        (B1, oplus(oplus(N["1"], N["4_1"]), oplus(N["2"], N["1"]))),
        (B2, oplus(oplus(N["1"], N["3_2"]), oplus(N["3_1"], N["1"]))),
    ]:
        images = {apply_rewrite(term, s) for s in rewrite_sites(term)} - {term}
        assert images == {image}
        stratum = close_stratum(8)
        assert set(stratum.members(stratum.class_number(term))) == {term, image}
    assert not are_equal(B1, B2)


def test_chain_fixture_is_valid(fixtures_dir):
    chain = read_chain(fixtures_dir / "noncancel_chain.txt")
    assert len(chain) == 12
    assert chain.steps[0] == multiply(N["2"], B1)
    assert chain.steps[-1] == multiply(N["2"], B2)
    verdict = verify_chain(chain)
    assert verdict.valid
    assert verdict.first_failure is None
    assert all(s.site is not None for s in verdict.steps)
    assert len(verdict.steps) == 11


def test_merged_chain_is_flagged(fixtures_dir):
    verdict = verify_chain(read_chain(fixtures_dir / "noncancel_chain_as_printed.txt"))
    assert not verdict.valid
    assert verdict.first_failure == 6
    assert [s.index for s in verdict.steps if not s.valid] == [6]


def test_chain_trivial_cases():
    t = N["4_1"]
    assert verify_chain(RewriteChain((t, t))).valid
    t = parse("((1 (1 1)) (1 1))")
    assert not verify_chain(RewriteChain((t, t))).valid
    verdict = verify_chain(RewriteChain((N["3_1"], N["3_2"])))
    assert not verdict.valid and verdict.first_failure == 0
    assert not verify_chain(RewriteChain((N["3_1"], N["4_1"]))).valid
    with pytest.raises(ValueError):
        verify_chain(RewriteChain((t,)))


@given(terms(min_magnitude=4, max_magnitude=12), st.lists(st.integers(0, 1000), max_size=8))
def test_valid_chains_are_sound(start, choices):
    steps = [start]
    for c in choices:
        sites = rewrite_sites(steps[-1])
        if not sites:
            break
        steps.append(apply_rewrite(steps[-1], sites[c % len(sites)]))
    if len(steps) < 2:
        return
    verdict = verify_chain(RewriteChain(tuple(steps)))
    assert verdict.valid
    assert are_equal(steps[0], steps[-1])


def test_parse_chain_format():
    chain = parse_chain("# header\n\n(1 1)  # two\n   \n((1 1) 1)\n")
    assert chain.steps == (N["2"], N["3_2"])
    with pytest.raises(ParseError) as err:
        parse_chain("1\n# c\n(1 x)\n")
    assert err.value.offset == len("1\n# c\n") + 3


def test_site_str():
    assert str(RewriteSite("")) == "root"
    assert str(RewriteSite("RL")) == "RL"

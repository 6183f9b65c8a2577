import itertools
import json
import random

import pytest
import sympy
from hypothesis import given, strategies as st

from names import NAMES
from oracles import all_trees
from strategies import terms

from ncnat.arithmetic import multiply
from ncnat.congruence import are_equal, class_of, close_stratum
from ncnat.errors import ParseError
from ncnat.qinv import (
    ELL,
    ELL_A,
    DeformationSpec,
    Polynomial,
    eval_morphism,
    invariant_table,
    magnitude_via_ell,
    parse_polynomial,
    parse_spec,
    poly_add,
    poly_eval,
    poly_mul,
)
from ncnat.search import flanked_term
from ncnat.terms import apply_rewrite, enumerate_stratum, rewrite_sites

N = NAMES
P = parse_polynomial
q = sympy.Symbol("q")

polys = st.lists(st.integers(-50, 50), max_size=6).map(lambda c: Polynomial(tuple(c)))


def to_sympy(p: Polynomial):
    return sum((c * q**k for k, c in enumerate(p.coeffs)), sympy.Integer(0))


def test_poly_examples():
    assert poly_add(P("1 + q"), P("1 - q")) == Polynomial((2,))
    assert poly_mul(P("1 + q"), P("1 + q")) == P("1 + 2q + q^2")
    assert poly_eval(P("1 + 2q + q^2"), 1) == 4


def test_canonical_form():
    assert Polynomial((1, 2, 0, 0)).coeffs == (1, 2)
    assert Polynomial((0, 0)).coeffs == ()
    assert Polynomial().degree == -1
    assert P("q - q") == Polynomial()


@given(polys, polys, polys)
def test_ring_laws_against_sympy(a, b, c):
    assert to_sympy(a + b) == sympy.expand(to_sympy(a) + to_sympy(b))
    assert to_sympy(a * b) == sympy.expand(to_sympy(a) * to_sympy(b))
    assert to_sympy(a - b) == sympy.expand(to_sympy(a) - to_sympy(b))
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a


@given(polys, st.integers(-5, 5))
def test_eval_against_sympy(a, x):
    assert a(x) == to_sympy(a).subs(q, x)


def test_big_coefficients_do_not_overflow():
    p = Polynomial((10**30, -(10**30)))
    assert (p * p).coeffs == (10**60, -2 * 10**60, 10**60)


@pytest.mark.parametrize(
    "poly, text",
    [
        ((5, -2, 1), "5 - 2q + q^2"),
        ((), "0"),
        ((0, 1), "q"),
        ((0, -1), "-q"),
        ((-3, 0, -1), "-3 - q^2"),
        ((0, 0, 2), "2q^2"),
        ((5, 6, 4, 1), "5 + 6q + 4q^2 + q^3"),
    ],
)
def test_text_form(poly, text):
    assert str(Polynomial(poly)) == text
    assert P(text) == Polynomial(poly)


def test_parser_accepts_any_order():
    assert P("q^2 + 5 - 2q") == P("5 - 2q + q^2")
    assert P("2*q**2 - 1") == Polynomial((-1, 0, 2))


@given(polys)
def test_text_round_trip(p):
    assert P(str(p)) == p


@pytest.mark.parametrize("text", ["", "q +", "5 5", "x", "2q^", "+"])
def test_parser_errors(text):
    with pytest.raises(ParseError):
        P(text)


@given(polys, polys, polys, polys, polys, polys)
def test_any_linear_deformation_is_medial(alpha, beta, w, x, y, z):
    spec = DeformationSpec(alpha, beta)
    op = spec.combine
    assert op(op(w, x), op(y, z)) == op(op(w, y), op(x, z))


def test_eval_morphism_examples():
    assert eval_morphism(ELL, multiply(N["2"], N["2"])) == P("1 + 2q + q^2")
    assert eval_morphism(ELL, N["4_3"]) == P("1 + 2q + q^2")
    assert eval_morphism(ELL_A, N["3_1"]) == P("3 - q")
    assert eval_morphism(ELL_A, N["4_2"]) == P("4 - 3q + q^2")


def test_magnitude_via_ell_examples():
    from names import B1

    assert magnitude_via_ell(N["3_1"]) == 3
    assert magnitude_via_ell(N["1"]) == 1
    assert magnitude_via_ell(multiply(N["2"], B1)) == 16


@pytest.mark.parametrize("n", range(1, 11))
def test_ell_at_one_is_magnitude(n):
    assert all(magnitude_via_ell(t) == n for t in enumerate_stratum(n))


def test_invariant_table_four():
    table = {str(c.rep): str(v) for c, v in invariant_table(ELL_A, 4).items()}
    expected = {
        N["4_1"]: "4",
        N["4_2"]: "4 - 3q + q^2",
        N["4_3"]: "4 + q - q^2",
        N["4_4"]: "4 - q - q^2",
        N["4_5"]: "4 + 3q + q^2",
    }
    assert table == {str(t): v for t, v in expected.items()}


def test_invariant_table_five_distinct_and_ell_two():
    values = list(invariant_table(ELL_A, 5).values())
    assert len(values) == 13 == len(set(values))
    assert eval_morphism(ELL_A, N["5_11"]) == P("5 + 6q + 4q^2 + q^3")
    (value,) = invariant_table(ELL, 2).values()
    assert value == P("1 + q")


@pytest.mark.parametrize("n", range(1, 9))
def test_invariant_constant_on_classes(n):
    stratum = close_stratum(n)
    for spec in (ELL, ELL_A):
        table = invariant_table(spec, n)
        for t in stratum.terms:
            assert eval_morphism(spec, t) == table[class_of(t)]


def test_ell_is_not_complete():
    assert eval_morphism(ELL, N["4_1"]) == eval_morphism(ELL, N["4_3"])
    assert not are_equal(N["4_1"], N["4_3"])


def test_ell_a_injectivity_holds_to_seven_and_fails_at_eight():
    for n in range(1, 8):
        values = list(invariant_table(ELL_A, n).values())
        assert len(values) == len(set(values)), n
    values = list(invariant_table(ELL_A, 8).values())
    assert len(values) > len(set(values))


def test_parse_spec():
    assert parse_spec("ell") is ELL
    assert parse_spec("ell-a") is ELL_A
    spec = parse_spec("custom:2:1 - q")
    assert spec.alpha == P("2") and spec.beta == P("1 - q")
    with pytest.raises(ParseError):
        parse_spec("custom:1")
    with pytest.raises(ParseError):
        parse_spec("nope")


def random_specs(count, seed):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        alpha = Polynomial(tuple(rng.randint(-4, 4) for _ in range(rng.randint(1, 3))))
        beta = Polynomial(tuple(rng.randint(-4, 4) for _ in range(rng.randint(1, 3))))
        out.append(DeformationSpec(alpha, beta))
    return out


@pytest.mark.parametrize("spec", [ELL, ELL_A] + random_specs(3, seed=11), ids=str)
def test_rewrite_invariance_exhaustive(spec):
    for n in range(1, 9):
        for t in enumerate_stratum(n):
            value = eval_morphism(spec, t)
            for s in rewrite_sites(t):
                assert eval_morphism(spec, apply_rewrite(t, s)) == value


@pytest.mark.parametrize("spec", [ELL, ELL_A], ids=str)
def test_multiplicativity_exhaustive(spec):
    small = [t for n in range(1, 5) for t in enumerate_stratum(n)]
    for a, b in itertools.product(small, repeat=2):
        assert eval_morphism(spec, multiply(a, b)) == eval_morphism(spec, a) * eval_morphism(spec, b)


@given(terms(max_magnitude=7), terms(max_magnitude=7))
def test_multiplicativity_random(a, b):
    for spec in (ELL, ELL_A):
        assert eval_morphism(spec, multiply(a, b)) == eval_morphism(spec, a) * eval_morphism(spec, b)


def test_flanked_expansion_fixture(fixtures_dir):
    rows = json.loads((fixtures_dir / "flanked_expansion.json").read_text())
    assert len(rows) == 16
    for row in rows:
        s = P(row["inner_sum"])
        value = P(row["value"])
        # brute-force value is (2 + S) + (2 - S) q^2
        assert value == (2 + s) + (2 - s) * P("q^2")
        assert value == eval_morphism(ELL_A, flanked_term(_t(row["a1"]), _t(row["a2"])))
    # the form 2 + S - (2 + S) q^2 disagrees with brute force, e.g. for a1 = a2 = 1
    s = P("2")
    assert (2 + s) - (2 + s) * P("q^2") != P(rows[0]["value"])


def _t(text):
    from ncnat.terms import parse

    return parse(text)


def test_flanked_biconditional_exhaustive():
    inner = [t for m in (1, 2, 3) for t in all_trees(m)]
    value = {t: eval_morphism(ELL_A, t) for t in inner}
    checked = 0
    for a1, a2, b1, b2 in itertools.product(inner, repeat=4):
        lhs = eval_morphism(ELL_A, flanked_term(a1, a2)) == eval_morphism(ELL_A, flanked_term(b1, b2))
        rhs = value[a1] + value[a2] == value[b1] + value[b2]
        assert lhs == rhs
        checked += 1
    assert checked == 4**4

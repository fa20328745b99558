from __future__ import annotations

from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import datum_of
from mpqsa import linalg
from mpqsa.cartan import build_datum, generic_matrix
from mpqsa.realization import build_realization
from mpqsa.scalars import ToralScalar
from mpqsa.superalg_engine import (
    DegreeExceeded,
    InconclusiveDegree,
    QuantumAlgebra,
    ideal_member,
    q_supercommutator,
    relation_set,
    straighten,
)

q = ToralScalar.qpow

# hand audit of the higher relations beyond the Serre and commuting families
SPECIAL_FAMILIES = {
    "A2": {},
    "A3": {"grey_triple": 2},
    "B2(I)": {},
    "B3(II)": {"black_end": 2},
    "C3": {"c_tail3": 2, "grey_triple": 2},
    "D4(I)": {},
    "D4(II)": {"fork": 2, "grey_triple": 4},
    "F4": {},
    "G3": {},
}


def _setting(label: str):
    d = datum_of(label)
    P = generic_matrix(d)
    rk = linalg.rank(linalg.mod_atoms(P.symmetric_part.rows()))
    R = build_realization(P, d, "straight_split", max(2 * d.rank, 3 * d.rank - rk))
    return d, P, R


def _algebra(label: str) -> QuantumAlgebra:
    return QuantumAlgebra(*_setting(label))


def _expected_counts(d, t: int) -> dict:
    n = d.rank
    white = sum(1 for c in d.colours if c == "white")
    grey = sum(1 for c in d.colours if c == "grey")
    commuting = sum(1 for i in range(n) for j in range(i + 1, n) if d.a(i, j) == 0 and d.a(j, i) == 0)
    out = {"cartan_toral": 2 * t * n, "e_f": n * n}
    if white and n > 1:
        out["serre"] = 2 * white * (n - 1)
    if commuting + grey:
        out["isotropic_commute"] = 2 * (commuting + grey)
    return out


@pytest.mark.parametrize("label", list(SPECIAL_FAMILIES))
def test_relation_manifest_counts(label):
    d, P, R = _setting(label)
    expected = _expected_counts(d, R.rank)
    expected.update(SPECIAL_FAMILIES[label])
    assert relation_set(d, P, R).counts() == expected


def test_a2_relation_families():
    d, P, R = _setting("A2")
    rels = relation_set(d, P, R)
    assert set(rels.counts()) == {"cartan_toral", "e_f", "serre"}
    assert sorted(r.name for r in rels if r.family == "serre") == ["serre_e(1,2)", "serre_e(2,1)", "serre_f(1,2)", "serre_f(2,1)"]


def test_grey_pair_commutes_with_k():
    d = build_datum("A", 4, "+-+-+")
    P = generic_matrix(d)
    R = build_realization(P, d, "straight_split", 8)
    rels = relation_set(d, P, R)
    alg = rels.algebra
    assert rels.by_name("isotropic_commute_e(1,3)").element == q_supercommutator(alg.E(0), alg.E(2), alg.k(0, 2))


@pytest.mark.parametrize("variant", ["covariant", "typeset"])
def test_black_end_relation(variant):
    d, P, R = _setting("B3(II)")
    rels = relation_set(d, P, R, variant=variant)
    alg = rels.algebra
    a, b = alg.E(1), alg.E(2)
    k, nu = alg.k(1, 2), alg.nu(2)
    want = q_supercommutator(q_supercommutator(q_supercommutator(a, b, nu * k), b, k), b, nu.inverse() * k)
    assert rels.by_name("black_end_e(3)").element == want


def test_serre_as_iterated_bracket():
    d, P, R = _setting("A2")
    rels = relation_set(d, P, R, variant="typeset")
    alg = rels.algebra
    e1, e2 = alg.E(0), alg.E(1)
    want = q_supercommutator(e1, q_supercommutator(e1, e2, alg.q_ij(0, 1)), alg.q_ij(0, 0) * alg.q_ij(0, 1))
    assert rels.by_name("serre_e(1,2)").element == want


def test_grouplike_commutes_past_e():
    alg = _algebra("A2")
    for i, j in product(range(2), repeat=2):
        lhs = alg.K(i) * alg.E(j)
        rhs = (alg.E(j) * alg.K(i)).scale(alg.q_ij(i, j))
        assert lhs == rhs


def test_unit_laws():
    alg = _algebra("G3")
    one = alg.one()
    for x in (alg.H(0), alg.E(1), alg.F(2), alg.K(0)):
        assert x * one == x
        assert one * x == x


def test_odd_self_bracket():
    alg = _algebra("A3")
    x = alg.E(0)
    assert x.parity() == 1
    assert q_supercommutator(x, x) == (x * x).scale(2)


def test_straighten_e_f():
    alg = _algebra("A3")
    for i, j in product(range(3), repeat=2):
        sign = -1 if alg.parity_of_letter(i + 1) and alg.parity_of_letter(j + 1) else 1
        got = straighten(alg.E(i) * alg.F(j))
        want = (alg.F(j) * alg.E(i)).scale(sign)
        if i == j:
            want = want + alg.ef_rhs(i)
        assert got == want


def test_e_f_relation_has_zero_right_side_off_diagonal():
    d, P, R = _setting("A2")
    rels = relation_set(d, P, R)
    alg = rels.algebra
    x = q_supercommutator(alg.E(0), alg.F(1))
    assert straighten(x).is_zero()


def test_ideal_member_trivial_cases():
    d, P, R = _setting("A2")
    rels = relation_set(d, P, R)
    alg = rels.algebra
    serre = rels.by_name("serre_e(1,2)").element
    assert ideal_member(serre, rels, 3)
    assert ideal_member(alg.E(0) * serre, rels, 4)


def test_not_a_relation_is_inconclusive():
    d, P, R = _setting("A2")
    rels = relation_set(d, P, R)
    alg = rels.algebra
    # the positive part has no relations of degree two at A2: E1E2 and E2E1 are independent
    e_rels = [r for r in rels.homogeneous() if all(x > 0 for key in r.element.terms for x in key[2])]
    assert min(r.element.degree() for r in e_rels) == 3
    x = alg.E(0) * alg.E(1) - (alg.E(1) * alg.E(0)).scale(alg.q_ij(0, 1))
    with pytest.raises(InconclusiveDegree):
        ideal_member(x, rels, 4)


def test_degree_bound_enforced():
    alg = _algebra("A2")
    with pytest.raises(DegreeExceeded):
        straighten(alg.word((1, 2, -1)), degree_bound=2)


def _letters(n: int):
    return st.sampled_from([x for i in range(1, n + 1) for x in (i, -i)])


@given(st.lists(_letters(2), max_size=2), st.lists(_letters(2), max_size=2), st.lists(_letters(2), max_size=2))
def test_associativity_rank_two(u, v, w):
    alg = _algebra("A2")
    a, b, c = alg.word(u) + alg.H(0), alg.word(v) * alg.K(1), alg.word(w) + alg.Lminus(0)
    assert (a * b) * c == a * (b * c)


@given(st.sampled_from(["A3", "C3", "G3", "F4"]), st.data())
def test_associativity_higher_rank(label, data):
    alg = _algebra(label)
    n = alg.n
    words = [data.draw(st.lists(_letters(n), max_size=2)) for _ in range(3)]
    a = alg.word(words[0]) * alg.H(data.draw(st.integers(0, alg.t - 1)))
    b = alg.K(data.draw(st.integers(0, n - 1))) * alg.word(words[1])
    c = alg.word(words[2])
    assert (a * b) * c == a * (b * c)


def test_associativity_exhaustive_rank_two():
    alg = _algebra("A2")
    letters = (1, 2, -1, -2)
    pieces = [alg.word(w) for k in range(0, 2) for w in product(letters, repeat=k)] + [alg.H(0), alg.K(0), alg.Lminus(1)]
    for a, b, c in product(pieces, repeat=3):
        assert (a * b) * c == a * (b * c)


@given(st.sampled_from(["A3", "D4(II)", "G3"]), st.data())
def test_parity_and_weight_are_multiplicative(label, data):
    alg = _algebra(label)
    n = alg.n
    u = tuple(data.draw(st.lists(_letters(n), min_size=1, max_size=3)))
    v = tuple(data.draw(st.lists(_letters(n), min_size=1, max_size=3)))
    x, y = alg.word(u), alg.word(v)
    prod_ = x * y
    assert prod_.parity() == (x.parity() + y.parity()) % 2
    for (_, _, w) in prod_.terms:
        assert alg.weight(w) == tuple(a + b for a, b in zip(alg.weight(u), alg.weight(v)))


@given(st.sampled_from(["A2", "B2(I)", "A3"]), st.data())
def test_grouplike_scalar_is_weight_pairing(label, data):
    alg = _algebra(label)
    n = alg.n
    u = tuple(data.draw(st.lists(_letters(n), min_size=1, max_size=3)))
    i = data.draw(st.integers(0, n - 1))
    lam = alg.K_lambda(i)
    got = alg.K(i) * alg.word(u)
    want = (alg.word(u) * alg.K(i)).scale(q(alg.pair(alg.weight(u), lam)))
    assert got == want


@given(st.sampled_from(["A2", "A3", "B3(II)"]), st.data())
def test_straighten_respects_products(label, data):
    alg = _algebra(label)
    n = alg.n
    u = tuple(data.draw(st.lists(_letters(n), max_size=2)))
    v = tuple(data.draw(st.lists(_letters(n), max_size=2)))
    x, y = alg.word(u), alg.word(v)
    assert straighten(x * y) == straighten(straighten(x) * straighten(y))
    assert straighten(straighten(x * y)) == straighten(x * y)

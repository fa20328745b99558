from __future__ import annotations

from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import datum_of
from mpqsa import linalg
from mpqsa.cartan import generic_matrix, standard_matrix
from mpqsa.deform_data import NotAltS, admissible_cocycle, cocycle_deform, symbolic_antisymmetric
from mpqsa.hopf import HopfStructure
from mpqsa.lie_semiclassical import (
    DegreeMismatch,
    LieTensor,
    MpLSbAData,
    commute_check,
    cocycle_bracket,
    lie_checks,
    reduce_mod_hbar,
    scalar_jet,
    semiclassical_limit,
    super_ops,
    tables_equal,
    toral_tensor,
    twist_cobracket,
)
from mpqsa.realization import build_realization
from mpqsa.scalars import ExponentPoly, ToralScalar
from mpqsa.superalg_engine import QuantumAlgebra

E = ExponentPoly


def _straight(label: str):
    d = datum_of(label)
    P = generic_matrix(d)
    rk = linalg.rank(linalg.mod_atoms(P.symmetric_part.rows()))
    return d, P, build_realization(P, d, "straight_split", max(2 * d.rank, 3 * d.rank - rk))


def _data(label: str) -> MpLSbAData:
    return MpLSbAData(*_straight(label))


def _cocycle_setting(label: str, standard: bool = True):
    d = datum_of(label)
    P = standard_matrix(d) if standard else generic_matrix(d)
    return d, P, build_realization(P, d, "split_minimal", 2 * d.rank)


def _vec(sym) -> LieTensor:
    return LieTensor.vector({sym: 1})


def _tensors(data: MpLSbAData, arity: int):
    gens = data.generators()
    key = st.tuples(*[st.sampled_from(gens)] * arity)
    return st.dictionaries(key, st.integers(-3, 3).filter(bool), max_size=4).map(
        lambda d: LieTensor(arity, {k: E.const(v) for k, v in d.items()})
    )


# super tensor operators

A3 = _data("A3")


@given(_tensors(A3, 2))
def test_braiding_is_an_involution(t):
    assert super_ops("braiding", A3, super_ops("braiding", A3, t)) == t


@given(_tensors(A3, 2))
def test_alt2_image_is_antisymmetric(t):
    a = super_ops("alt2", A3, t)
    assert a + super_ops("braiding", A3, a) == LieTensor.zero(2)


@given(_tensors(A3, 3))
def test_alt3_factors_through_cyclic_sum(t):
    s = super_ops("symA3", A3, t)
    want = s - super_ops("perm", A3, s, (1, 0, 2))
    assert super_ops("alt3", A3, t) == want


@given(st.sampled_from(A3.generators()), _tensors(A3, 2))
def test_adjoint_is_a_super_derivation(x, t):
    want = LieTensor.zero(2)
    for (a, b), c in t.terms.items():
        sign = -1 if A3.parity(x) and A3.parity(a) else 1
        want = want + A3.bracket_vec(_vec(x), _vec(a)).tensor(_vec(b)).scale(c)
        want = want + _vec(a).tensor(A3.bracket_vec(_vec(x), _vec(b))).scale(c * sign)
    assert super_ops("adjoint", A3, x, t) == want


def test_operator_arity_checked():
    with pytest.raises(DegreeMismatch):
        super_ops("braiding", A3, _vec(("E", 0)))
    with pytest.raises(DegreeMismatch):
        super_ops("symA3", A3, _vec(("E", 0)).tensor(_vec(("F", 0))))


def test_odd_braiding_sign():
    e = _vec(("E", 0))
    assert A3.parity(("E", 0)) == 1
    assert super_ops("braiding", A3, e.tensor(e)) == e.tensor(e).scale(-1)


# base tables


def test_base_bracket_values():
    data = _data("B2(I)")
    for i, g in product(range(data.n), range(data.t)):
        a = data.alpha(i, g)
        assert data.bracket(("H", g), ("E", i)) == _vec(("E", i)).scale(a)
        assert data.bracket(("H", g), ("F", i)) == _vec(("F", i)).scale(-a)
    for i in range(data.n):
        d = data.datum.d[i]
        assert data.bracket(("E", i), ("F", i)) == (data.plus(i) + data.minus(i)).scale(Fraction(1, 2) / d)


def test_lie_checks_pass(datum):
    P = generic_matrix(datum)
    rk = linalg.rank(linalg.mod_atoms(P.symmetric_part.rows()))
    R = build_realization(P, datum, "straight_split", max(2 * datum.rank, 3 * datum.rank - rk))
    report = lie_checks(MpLSbAData(datum, P, R))
    assert report.ok, [c.name for c in report.failures()]


def test_lie_checks_detect_bad_cobracket():
    data = _data("A2").copy()
    e, h = _vec(("E", 0)), _vec(("H", 0))
    data.cobracket_overrides[("E", 0)] = e.tensor(h)
    report = lie_checks(data)
    assert not report.ok
    assert any(c.name.startswith("antisymmetric_image[E") for c in report.failures())


# toral twists


def test_zero_twist_leaves_cobracket():
    data = _data("A3")
    new = twist_cobracket(linalg.zeros(data.t, data.t), data)
    assert tables_equal(new, data) == (True, "")


def test_twisted_cobracket_by_hand():
    data = _data("A2")
    theta = symbolic_antisymmetric(data.t, "th")
    new = twist_cobracket(theta, data)
    for i in range(data.n):
        # ad_E(sum theta_gk H_g (x) H_k) with [E, H_g] = -alpha_i(g) E
        e = _vec(("E", i))
        ad = LieTensor.zero(2)
        for g, k in product(range(data.t), repeat=2):
            c = theta[g][k]
            if not c:
                continue
            ad = ad - e.tensor(_vec(("H", k))).scale(c * data.alpha(i, g))
            ad = ad - _vec(("H", g)).tensor(e).scale(c * data.alpha(i, k))
        assert new.cobracket(("E", i)) == data.cobracket(("E", i)) - ad
    assert new.bracket_table() == data.bracket_table()


def test_twisted_tables_stay_bialgebra():
    data = _data("D4(II)")
    new = twist_cobracket(symbolic_antisymmetric(data.t, "th"), data)
    assert lie_checks(new).ok


def test_toral_tensor_rejects_symmetric():
    data = _data("A2")
    m = linalg.zeros(data.t, data.t)
    m[0][0] = E.const(1)
    with pytest.raises(ValueError):
        toral_tensor(data, m)


# toral cocycles


def test_zero_cocycle_leaves_bracket():
    d, P, R = _cocycle_setting("A3")
    data = MpLSbAData(d, P, R)
    assert tables_equal(cocycle_bracket(linalg.zeros(R.rank, R.rank), data), data) == (True, "")


def test_cocycle_bracket_on_toral_and_root_vectors():
    d, P, R = _cocycle_setting("C3", standard=False)
    data = MpLSbAData(d, P, R)
    gamma = admissible_cocycle(R, "ga")
    new = cocycle_bracket(gamma, data)
    _, R_g = cocycle_deform(P, R, gamma)
    roots = R_g.root_rows()
    for g, k in product(range(data.t), repeat=2):
        assert new.bracket(("H", g), ("H", k)).is_zero()
    for g, i in product(range(data.t), range(data.n)):
        assert new.bracket(("H", g), ("F", i)) == _vec(("F", i)).scale(-roots[i][g])
        assert new.bracket(("H", g), ("E", i)) == _vec(("E", i)).scale(roots[i][g])
    assert new.cobracket_table() == data.cobracket_table()


def test_cocycle_bracket_rejects_non_admissible():
    d, P, R = _cocycle_setting("A2")
    data = MpLSbAData(d, P, R)
    bad = linalg.zeros(R.rank, R.rank)
    bad[0][1], bad[1][0] = E.const(1), E.const(-1)
    with pytest.raises(NotAltS):
        cocycle_bracket(bad, data)


# jets


def test_scalar_jets():
    assert scalar_jet(ToralScalar.qpow(E.atom("x")), 2) == {0: E.const(1), 1: E.atom("x"), 2: E.atom("x") ** 2 * Fraction(1, 2)}
    qq = ToralScalar.qpow(1) - ToralScalar.qpow(-1)
    assert scalar_jet(qq, 1) == {1: E.const(2)}
    # 1 / (2 sinh h) = 1/(2h) - h/12 + ...
    assert scalar_jet(qq.inverse(), 1) == {-1: E.const(Fraction(1, 2)), 1: E.const(Fraction(-1, 12))}


def test_semiclassical_limit_matches_closed_tables(datum):
    P = generic_matrix(datum)
    rk = linalg.rank(linalg.mod_atoms(P.symmetric_part.rows()))
    R = build_realization(P, datum, "straight_split", max(2 * datum.rank, 3 * datum.rank - rk))
    lim = semiclassical_limit(HopfStructure(QuantumAlgebra(datum, P, R)))
    data = MpLSbAData(datum, P, R)
    for i in range(datum.rank):
        e, f = _vec(("E", i)), _vec(("F", i))
        assert lim.cobracket(("E", i)) == data.plus(i).tensor(e) - e.tensor(data.plus(i))
        assert lim.cobracket(("F", i)) == data.minus(i).tensor(f) - f.tensor(data.minus(i))
    for g in range(R.rank):
        assert lim.cobracket(("H", g)).is_zero()
    assert tables_equal(lim, data) == (True, "")


# reduction and commutation


def test_reduce_mod_hbar():
    m = [[E.atom("a") + 1, E.const(0)], [E.const(2), E.atom("b")]]
    assert reduce_mod_hbar(m) == m
    assert reduce_mod_hbar(m, kill_atoms=True) == [[E.const(1), E.const(0)], [E.const(2), E.const(0)]]


@pytest.mark.parametrize("kill", [False, True])
def test_commute_twist(kill):
    d, P, R = _straight("A2")
    for phi in (linalg.zeros(R.rank, R.rank), symbolic_antisymmetric(R.rank, "f")):
        report = commute_check("twist", phi, d, P, R, kill_atoms=kill)
        assert report.ok, [c.name for c in report.failures()]


@pytest.mark.parametrize("kill", [False, True])
def test_commute_cocycle(kill):
    d, P, R = _cocycle_setting("B3(II)")
    report = commute_check("cocycle", admissible_cocycle(R), d, P, R, kill_atoms=kill)
    assert report.ok, [c.name for c in report.failures()]
    assert any(c.name == "cocycle_bracket_table_matches_deformed_data" for c in report.checks)

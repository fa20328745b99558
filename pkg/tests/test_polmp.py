from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import datum_of
from mpqsa import linalg
from mpqsa.cartan import NotCartanType, build_datum, generic_matrix
from mpqsa.deform_data import NotAntisymmetric, SymmetricPartMismatch
from mpqsa.polmp import (
    Gamma0Violation,
    NotSpecialized,
    PolyError,
    PolyMultiparam,
    build_poly,
    compose_multiparam,
    compose_via_cocycle,
    confluence_check,
    corrector_closure,
    domain_check,
    embedding_check,
    gamma_cocycle,
    hopf_table_check,
    integrality_check,
    lattice_condition,
    ring_contains,
    ring_relation_residues,
    solve_qhat,
    twist_multiparam,
)
from mpqsa.scalars import ExponentPoly, ToralScalar
from mpqsa.superalg_engine import straighten

E = ExponentPoly
q = ToralScalar.qpow


def _phi(n2: int, entries: dict) -> list:
    m = [[Fraction(0)] * n2 for _ in range(n2)]
    for (g, k), v in entries.items():
        m[g][k], m[k][g] = Fraction(v), -Fraction(v)
    return m


def _antisym(n: int, values) -> list:
    m = linalg.zeros(n, n)
    it = iter(values)
    for i in range(n):
        for j in range(i + 1, n):
            v = next(it)
            m[i][j], m[j][i] = E.const(v), E.const(-v)
    return m


# multiparameters and the ring


def test_ring_relation_holds_by_construction(datum):
    qm = PolyMultiparam.generic(datum)
    assert all(not v for v in ring_relation_residues(qm).values())


def test_standard_has_trivial_k(datum):
    qm = PolyMultiparam.standard(datum)
    n = datum.rank
    for i in range(n):
        for j in range(n):
            assert qm.k(i, j) == ToralScalar.one()
            assert qm.q(i, j) == q(E.const(datum.d[i] * datum.a(i, j)))


def test_generic_k_is_half_ratio():
    d = build_datum("A", 2)
    qm = PolyMultiparam.generic(d)
    x = generic_matrix(d)[0, 1]
    # q_12 = q^x, q_21 = q^{-2-x}
    assert qm.k(0, 1) == q(x + 1)


def test_not_cartan_type_rejected():
    d = build_datum("A", 2)
    with pytest.raises(NotCartanType):
        PolyMultiparam.from_rows(d, [[2, 0], [0, 2]])


def test_ring_membership():
    d = build_datum("A", 2)
    qm = PolyMultiparam.generic(d)
    x = generic_matrix(d)[0, 1]
    assert ring_contains(q(Fraction(1, 2)), qm)
    assert ring_contains(q(x * Fraction(1, 2) + 3), qm)
    assert ring_contains((q(1) - q(-1)).inverse(), qm)
    assert not ring_contains(q(Fraction(1, 3)), qm)
    assert not ring_contains(q(x * Fraction(1, 4)), qm)
    assert not ring_contains(q(E.atom("stranger")), qm)


def test_domain_check(datum):
    ok, witness = domain_check(PolyMultiparam.generic(datum), samples=10)
    assert ok, witness


def test_specialize_and_json():
    d = datum_of("C3")
    qm = PolyMultiparam.generic(d)
    sp = qm.specialize({a: 1 for a in qm.atoms()})
    assert not sp.atoms()
    assert PolyMultiparam.from_json(d, sp.to_json()) == sp
    with pytest.raises(PolyError):
        qm.specialize({}, not_root_of_unity=False)


# the K/L presentation


@pytest.mark.parametrize("label", ["A2", "A3", "B2(I)", "G3"])
def test_generator_tables(label):
    pa = build_poly(datum_of(label))
    report = hopf_table_check(pa)
    assert report.ok, [c.name for c in report.failures()]
    assert any(c.name == "counit_table[K1^1]" for c in report.checks)


@pytest.mark.parametrize("label", ["A2", "C3"])
def test_presentation_embeds(label):
    pa = build_poly(datum_of(label))
    report = embedding_check(pa)
    assert report.ok, [c.name for c in report.failures()]


def test_e_f_relation_by_hand():
    d = build_datum("A", 2)
    pa = build_poly(d)
    qi = pa.q.q_i(0)
    el = pa.E(0) * pa.F(0) - pa.F(0) * pa.E(0) - (pa.K(0) - pa.L(0)).scale((qi - qi.inverse()).inverse())
    assert straighten(el).is_zero()


def test_k_conjugation_scalars():
    pa = build_poly(build_datum("A", 3, "+-+"))
    for i in range(3):
        for j in range(3):
            assert straighten(pa.K(i) * pa.E(j)) == straighten(pa.E(j) * pa.K(i)).scale(pa.q.q(i, j))
            assert straighten(pa.L(i) * pa.F(j)) == straighten(pa.F(j) * pa.L(i)).scale(pa.q.q(j, i))


def test_confluence_small():
    pa = build_poly(build_datum("A", 2))
    ok, witness, count = confluence_check(pa, max_length=4, exhaustive_length=2, samples=10, seed=3)
    assert ok, witness
    assert count == 16 + 10


def test_datum_mismatch():
    with pytest.raises(NotCartanType):
        build_poly(build_datum("A", 2), PolyMultiparam.generic(build_datum("A", 3)))


# integrality of toral twists


def test_zero_twist_is_integral(datum):
    n = datum.rank
    qm = PolyMultiparam.standard(datum)
    assert integrality_check(linalg.zeros(2 * n, 2 * n), qm)
    assert lattice_condition(linalg.zeros(2 * n, 2 * n), qm)


@pytest.mark.parametrize("x,ok", [(1, True), (-3, True), (Fraction(1, 2), False), (Fraction(3, 2), False)])
def test_rank_one_mixed_block(x, ok):
    # P = (2): the condition on the +- block is 2x even
    d = build_datum("A", 1, "+")
    qm = PolyMultiparam.standard(d)
    phi = _phi(2, {(0, 1): x})
    res = integrality_check(phi, qm)
    assert res.ok is ok
    if not ok:
        assert res.witness["block"] == "P^T*Phi_+^-"
    assert corrector_closure(build_poly(d, qm), phi).ok is ok


def test_rank_one_block_form():
    # P = (2), Phi_+^+ = (1): P^T Phi_+^+ = (2) is even
    d = build_datum("A", 1, "+")
    qm = PolyMultiparam.standard(d)
    assert integrality_check({"++": [[1]]}, qm)
    res = integrality_check({"+-": [[Fraction(1, 4)]]}, qm)
    assert not res and res.witness["value"] == "1/2"


def test_isotropic_rank_one_is_always_integral():
    d = build_datum("A", 1, "+-")
    qm = PolyMultiparam.standard(d)
    for x in (Fraction(1, 2), Fraction(1, 7), 3):
        phi = _phi(2, {(0, 1): x})
        assert integrality_check(phi, qm)
        assert corrector_closure(build_poly(d, qm), phi)


def test_a2_witness():
    # (P^T Phi_++)_11 = 2*0 + (-1)(-1/2) = 1/2
    d = build_datum("A", 2)
    qm = PolyMultiparam.standard(d)
    res = integrality_check(_phi(4, {(0, 1): Fraction(1, 2)}), qm)
    assert not res
    assert res.witness == {"block": "P^T*Phi_+^+", "entry": [1, 1], "value": "1/2"}


@given(st.lists(st.integers(-2, 2), min_size=6, max_size=6))
def test_four_block_condition_implies_closure(values):
    d = build_datum("A", 2)
    qm = PolyMultiparam.standard(d)
    entries = {}
    it = iter(values)
    for g in range(4):
        for k in range(g + 1, 4):
            entries[(g, k)] = Fraction(next(it), 2)
    phi = _phi(4, entries)
    if integrality_check(phi, qm):
        assert corrector_closure(build_poly(d, qm), phi)
        assert lattice_condition(phi, qm)


def test_integrality_needs_rational_p():
    d = build_datum("A", 2)
    with pytest.raises(NotSpecialized):
        integrality_check(_phi(4, {}), PolyMultiparam.generic(d))


def test_twist_multiparam():
    d = build_datum("A", 2)
    qm = PolyMultiparam.standard(d)
    phi = _phi(4, {(0, 2): 2, (1, 3): -2})
    q2 = twist_multiparam(qm, phi)
    assert q2.matrix().symmetric_part == qm.matrix().symmetric_part
    with pytest.raises(PolyError):
        twist_multiparam(qm, _phi(4, {(0, 1): Fraction(1, 2)}))
    with pytest.raises(NotAntisymmetric):
        corrector_closure(build_poly(d, qm), [[Fraction(1)] + [Fraction(0)] * 3] + [[Fraction(0)] * 4] * 3)


# composition with toral 2-cocycles


def test_compose_zero_and_solve(datum):
    n = datum.rank
    generic, standard = PolyMultiparam.generic(datum), PolyMultiparam.standard(datum)
    assert compose_multiparam(generic, linalg.zeros(n, n)).matrix() == generic.matrix()
    qhat = solve_qhat(standard, generic)
    assert compose_multiparam(standard, qhat).matrix() == generic.matrix()
    assert compose_via_cocycle(standard, qhat) == generic.matrix()


@given(st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=4), min_size=3, max_size=3))
def test_compose_routes_agree(values):
    d = build_datum("A", 3, "+-+")
    qm = PolyMultiparam.generic(d)
    qhat = _antisym(3, values)
    direct = compose_multiparam(qm, qhat)
    assert direct.matrix().symmetric_part == qm.matrix().symmetric_part
    assert compose_via_cocycle(qm, qhat) == direct.matrix()
    assert compose_multiparam(qm, gamma_cocycle(qhat, 3)) == direct


def test_compose_rejections():
    d = build_datum("A", 2)
    qm = PolyMultiparam.generic(d)
    with pytest.raises(NotAntisymmetric):
        compose_multiparam(qm, [[1, 0], [0, 0]])
    bad = linalg.zeros(4, 4)
    bad[0][1], bad[1][0] = E.const(1), E.const(-1)
    with pytest.raises(Gamma0Violation):
        compose_multiparam(qm, bad)
    with pytest.raises(SymmetricPartMismatch):
        solve_qhat(qm, PolyMultiparam.standard(build_datum("A", 2, "+-")))

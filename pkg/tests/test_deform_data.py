from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mpqsa import linalg
from mpqsa.cartan import build_datum, generic_matrix, standard_matrix
from mpqsa.deform_data import (
    CocycleData,
    NotAltS,
    NotAntisymmetric,
    SizeMismatch,
    SymmetricPartMismatch,
    TwistData,
    admissible_cocycle,
    cocycle_deform,
    solve_cocycle,
    solve_twist,
    symbolic_antisymmetric,
    twist_deform,
)
from mpqsa.realization import build_realization, classify
from mpqsa.scalars import ExponentPoly

E = ExponentPoly


def _straight(datum, P):
    rk = linalg.rank(linalg.mod_atoms(P.symmetric_part.rows()))
    return build_realization(P, datum, "straight_split", max(2 * datum.rank, 3 * datum.rank - rk))


def _split_minimal(datum, P):
    return build_realization(P, datum, "split_minimal", 2 * datum.rank)


def _lam_a2():
    d = build_datum("A", 2)
    lam = E.atom("lam")
    return d, standard_matrix(d), standard_matrix(d) + [[0, lam], [-lam, 0]]


def _rational_antisymmetric(t: int, values) -> list:
    m = linalg.zeros(t, t)
    it = iter(values)
    for g in range(t):
        for k in range(g + 1, t):
            v = next(it)
            m[g][k], m[k][g] = E.const(v), E.const(-v)
    return m


def test_zero_twist_is_identity(datum):
    P = generic_matrix(datum)
    R = _straight(datum, P)
    assert twist_deform(P, R, TwistData.zero(R.rank)) == (P, R)


def test_zero_cocycle_is_identity(datum):
    P = generic_matrix(datum)
    R = _split_minimal(datum, P)
    assert cocycle_deform(P, R, CocycleData.zero(R.rank)) == (P, R)


def test_twisted_pairings_a2_by_hand():
    d = build_datum("A", 2)
    P = standard_matrix(d)
    R = build_realization(P, d, "straight_split", 4)
    phi = symbolic_antisymmetric(4, "f")
    P_phi, R_phi = twist_deform(P, R, phi)
    A = R.root_rows()
    for i in range(2):
        for j in range(2):
            shift = sum((A[i][g] * phi[g][k] * A[j][k] for g in range(4) for k in range(4)), E.const(0))
            assert P_phi[i, j] == P[i, j] - shift
            pairing = sum((R_phi.plus_rows()[i][g] * A[j][g] for g in range(4)), E.const(0))
            assert pairing == P_phi[i, j]
    assert R_phi.realizes(P_phi)


def test_twist_invariants(datum):
    P = generic_matrix(datum)
    R = _straight(datum, P)
    P_phi, R_phi = twist_deform(P, R, symbolic_antisymmetric(R.rank, "f"))
    assert P_phi.symmetric_part == P.symmetric_part
    assert linalg.equal(R_phi.s_rows(), R.s_rows())
    assert R_phi.root_rows() == R.root_rows()
    assert R_phi.realizes(P_phi)


def test_cocycle_invariants(datum):
    P = generic_matrix(datum)
    R = _split_minimal(datum, P)
    chi = admissible_cocycle(R)
    P_chi, R_chi = cocycle_deform(P, R, chi)
    assert P_chi.symmetric_part == P.symmetric_part
    assert R_chi.plus_rows() == R.plus_rows()
    assert R_chi.minus_rows() == R.minus_rows()
    assert R_chi.realizes(P_chi)
    assert {"split", "minimal"} <= classify(R_chi)


def test_twist_additivity_symbolic(datum):
    P = generic_matrix(datum)
    R = _straight(datum, P)
    f, g = symbolic_antisymmetric(R.rank, "f"), symbolic_antisymmetric(R.rank, "g")
    P1, R1 = twist_deform(P, R, f)
    assert twist_deform(P1, R1, g) == twist_deform(P, R, linalg.add(f, g))


def test_cocycle_additivity_symbolic(datum):
    P = generic_matrix(datum)
    R = _split_minimal(datum, P)
    chi = admissible_cocycle(R, "x")
    P1, R1 = cocycle_deform(P, R, chi)
    chi2 = admissible_cocycle(R1, "y")
    assert cocycle_deform(P1, R1, chi2) == cocycle_deform(P, R, chi + chi2)


@given(st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=4), min_size=6, max_size=6),
       st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=4), min_size=6, max_size=6))
def test_twist_additivity_rational(u, v):
    d = build_datum("A", 2)
    P = generic_matrix(d)
    R = build_realization(P, d, "straight_split", 4)
    f, g = _rational_antisymmetric(4, u), _rational_antisymmetric(4, v)
    P1, R1 = twist_deform(P, R, f)
    assert twist_deform(P1, R1, g) == twist_deform(P, R, linalg.add(f, g))


def test_solve_twist_identity_and_round_trip():
    d, P, Pl = _lam_a2()
    R = build_realization(P, d, "straight_split", 4)
    sol = solve_twist(P, P, R)
    assert linalg.is_zero(linalg.matmul(linalg.matmul(R.root_rows(), sol.rows()), linalg.transpose(R.root_rows())))
    sol = solve_twist(P, Pl, R)
    assert twist_deform(P, R, sol)[0] == Pl


def test_solve_twist_symmetric_mismatch():
    d, P, _ = _lam_a2()
    R = build_realization(P, d, "straight_split", 4)
    with pytest.raises(SymmetricPartMismatch):
        solve_twist(P, P + [[1, 0], [0, 0]], R)


def test_solve_cocycle_identity_and_round_trip():
    d, P, Pl = _lam_a2()
    R = build_realization(P, d, "split_minimal", 4)
    assert linalg.is_zero(solve_cocycle(P, P, R).rows())
    chi = solve_cocycle(P, Pl, R)
    assert linalg.is_zero(linalg.matmul(R.s_rows(), chi.rows()))
    assert cocycle_deform(P, R, chi)[0] == Pl


def test_solvers_round_trip_generic(datum):
    P = generic_matrix(datum)
    R = _straight(datum, P)
    target = twist_deform(P, R, symbolic_antisymmetric(R.rank, "f"))[0]
    assert twist_deform(P, R, solve_twist(P, target, R))[0] == target
    Rc = _split_minimal(datum, P)
    target = cocycle_deform(P, Rc, admissible_cocycle(Rc))[0]
    assert cocycle_deform(P, Rc, solve_cocycle(P, target, Rc))[0] == target


def test_rejections():
    d, P, _ = _lam_a2()
    R = build_realization(P, d, "straight_split", 4)
    bad = linalg.zeros(4, 4)
    bad[0][1] = E.const(1)
    with pytest.raises(NotAntisymmetric):
        twist_deform(P, R, bad)
    with pytest.raises(SizeMismatch):
        twist_deform(P, R, linalg.zeros(3, 3))
    Rc = build_realization(P, d, "split_minimal", 4)
    alt = _rational_antisymmetric(4, [1, 0, 0, 0, 0, 0])
    with pytest.raises(NotAltS):
        cocycle_deform(P, Rc, alt)


def test_twist_data_json_round_trip():
    phi = TwistData.make(symbolic_antisymmetric(3, "f"))
    assert TwistData.from_json(phi.to_json()) == phi

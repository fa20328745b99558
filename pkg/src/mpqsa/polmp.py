"""Polynomial multiparameters and the K/L presentation inside the formal engine.

A multiparameter ``q = (q_ij)`` of Cartan type is stored through exponents,
``q_ij = q^{p_ij}``, with ``p_ij + p_ji = 2 d_i a_ij``.  Only the ``p_ij`` with
``i < j`` are free; ``q_ji`` is always rewritten as ``q_ii^{a_ij} q_ij^{-1}``,
so the defining relation of the coefficient ring holds by construction.

The algebra itself lives in a formal engine over the minimal realization
``T_i^+ = H_i``, ``T_i^- = H_{n+i}`` with ``K_i = exp(hbar T_i^+)`` and
``L_i = exp(-hbar T_i^-)``.  Polynomial elements are those whose torals are
integer points of this K/L lattice and whose coefficients lie in the ring.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from . import linalg
from .cartan import (
    CartanSuperDatum,
    MultiparamMatrix,
    NotCartanType,
    check_cartan_type,
    generic_matrix,
    standard_matrix,
)
from .deform_data import CocycleData, NotAntisymmetric, SymmetricPartMismatch, cocycle_deform, twist_deform
from .hopf import HopfStructure, HopfTwist, TensorElement, hopf_axioms
from .realization import Realization, build_realization
from .reporting import Report
from .scalars import ExponentPoly, ToralScalar
from .superalg_engine import AlgebraElement, QuantumAlgebra, q_supercommutator, relation_set, straighten

__all__ = [
    "PolyError",
    "NotMinimalBasis",
    "Gamma0Violation",
    "NotSpecialized",
    "PolyMultiparam",
    "PolyAlgebra",
    "IntegralityResult",
    "poly_realization",
    "build_poly",
    "ring_contains",
    "ring_relation_residues",
    "domain_check",
    "integrality_check",
    "lattice_condition",
    "corrector_closure",
    "twist_multiparam",
    "compose_multiparam",
    "solve_qhat",
    "compose_via_cocycle",
    "confluence_check",
    "poly_suite",
]


class PolyError(ValueError):
    pass


class NotMinimalBasis(PolyError):
    pass


class Gamma0Violation(PolyError):
    pass


class NotSpecialized(PolyError):
    pass


def _frac_gcd(values) -> Fraction:
    vals = [Fraction(v) for v in values if v]
    if not vals:
        return Fraction(0)
    den = 1
    for v in vals:
        den = den * v.denominator // gcd(den, v.denominator)
    g = 0
    for v in vals:
        g = gcd(g, abs(int(v * den)))
    return Fraction(g, den)


def _in_lattice(c: Fraction, step: Fraction) -> bool:
    if not c:
        return True
    if not step:
        return False
    return (Fraction(c) / step).denominator == 1


# multiparameters


@dataclass(frozen=True)
class PolyMultiparam:
    """Exponent matrix of a multiparameter of Cartan type, plus an optional specialization."""

    datum: CartanSuperDatum
    exponents: MultiparamMatrix
    specialization: dict = field(default_factory=dict)
    not_root_of_unity: bool = True

    def __post_init__(self):
        if not check_cartan_type(self.exponents, self.datum):
            raise NotCartanType("q_ij q_ji != q_ii^{a_ij}")

    @classmethod
    def generic(cls, datum: CartanSuperDatum) -> "PolyMultiparam":
        return cls(datum, generic_matrix(datum))

    @classmethod
    def standard(cls, datum: CartanSuperDatum) -> "PolyMultiparam":
        """q_ij = q^{d_i a_ij}."""
        return cls(datum, standard_matrix(datum))

    @classmethod
    def from_rows(cls, datum: CartanSuperDatum, rows) -> "PolyMultiparam":
        return cls(datum, MultiparamMatrix.from_rows(rows))

    @property
    def n(self) -> int:
        return self.datum.rank

    def matrix(self) -> MultiparamMatrix:
        """Exponent matrix with the specialization applied."""
        if self.specialization:
            return self.exponents.subs(self.specialization)
        return self.exponents

    def q(self, i: int, j: int) -> ToralScalar:
        return ToralScalar.qpow(self.matrix()[i, j])

    def q_half(self, i: int, j: int) -> ToralScalar:
        return ToralScalar.qpow(self.matrix()[i, j] * Fraction(1, 2))

    def q_i(self, i: int) -> ToralScalar:
        return ToralScalar.qpow(ExponentPoly.const(self.datum.d[i]))

    def k(self, i: int, j: int) -> ToralScalar:
        return self.q_half(i, j) / self.q_half(j, i)

    def specialize(self, values: dict, not_root_of_unity: bool = True) -> "PolyMultiparam":
        if not not_root_of_unity:
            raise PolyError("specializations at roots of unity are not supported")
        merged = dict(self.specialization)
        merged.update({k: Fraction(v) for k, v in values.items()})
        return PolyMultiparam(self.datum, self.exponents, merged, True)

    def atoms(self) -> set:
        return self.matrix().atoms()

    def to_json(self) -> dict:
        out: dict = {"exponents": self.exponents.to_json()}
        if self.specialization:
            out["specialization"] = {k: str(v) for k, v in sorted(self.specialization.items())}
        return out

    @classmethod
    def from_json(cls, datum: CartanSuperDatum, data: dict) -> "PolyMultiparam":
        spec = {k: Fraction(v) for k, v in (data.get("specialization") or {}).items()}
        return cls(datum, MultiparamMatrix.from_json(data["exponents"]), spec)


# the coefficient ring


def _ring_generators(q: PolyMultiparam) -> tuple:
    """(atom -> defining entry, constant lattice step)."""
    P = q.matrix()
    n = q.n
    atom_entries: dict = {}
    consts = [Fraction(1, 2)] + [Fraction(d) for d in q.datum.d]
    for i in range(n):
        for j in range(n):
            e = P[i, j]
            if e.is_constant():
                consts.append(e.constant_term() / 2)
            elif i < j:
                for a in e.atoms():
                    atom_entries.setdefault(a, e)
    return atom_entries, _frac_gcd(consts)


def _exponent_in_ring(x: ExponentPoly, atom_entries: dict, step: Fraction) -> bool:
    if x.degree() > 1:
        return False
    rest = x
    for a in sorted(x.atoms()):
        entry = atom_entries.get(a)
        if entry is None:
            return False
        m = rest.coefficient(a)
        if not m.is_constant() or (2 * m.constant_term()).denominator != 1:
            return False
        unit = entry.coefficient(a).constant_term()
        rest = rest - entry * (m.constant_term() / unit)
    return rest.is_constant() and _in_lattice(rest.constant_term(), step)


def ring_contains(s: ToralScalar, q: PolyMultiparam) -> bool:
    """Membership of a scalar in the square-root ring with the (q_i - q_i^-1)^-1 adjoined.

    Numerator exponents must lie in the lattice spanned by q^{1/2} and the
    q_ij^{1/2}; denominators are accepted when their exponents lie in the
    constant part of that lattice.
    """
    atom_entries, step = _ring_generators(q)
    for x, c in s.num.items():
        if not c.is_constant():
            return False
        if not _exponent_in_ring(x, atom_entries, step):
            return False
    if s.has_denominator():
        for e in s.den:
            if not _in_lattice(Fraction(e), step):
                return False
    return True


def ring_relation_residues(q: PolyMultiparam) -> dict:
    """q_ij q_ji - q_i^{2 a_ij} for all pairs; every value vanishes in normal form.

    Off isotropic nodes q_i^2 = q_ii, so this is q_ij q_ji = q_ii^{a_ij}; on an
    isotropic node q_ii = 1 and only the q_i form is meaningful.
    """
    out = {}
    for i in range(q.n):
        for j in range(q.n):
            a = q.datum.a(i, j)
            out[(i, j)] = q.q(i, j) * q.q(j, i) - ToralScalar.qpow(ExponentPoly.const(2 * q.datum.d[i] * a))
    return out


def _random_ring_element(q: PolyMultiparam, rng: random.Random) -> ToralScalar:
    P = q.matrix()
    n = q.n
    out = ToralScalar.zero()
    for _ in range(rng.randint(1, 3)):
        x = ExponentPoly.const(Fraction(rng.randint(-4, 4), 2))
        for i in range(n):
            for j in range(i + 1, n):
                x = x + P[i, j] * Fraction(rng.randint(-2, 2), 2)
        out = out + ToralScalar.qpow(x, rng.choice([-2, -1, 1, 2, 3]))
    return out


def domain_check(q: PolyMultiparam, samples: int = 20, seed: int = 0) -> tuple:
    """Products of nonzero random ring elements stay nonzero, symbolically and after specialization."""
    rng = random.Random(seed)
    atoms = sorted(q.atoms())
    for s in range(samples):
        a, b = _random_ring_element(q, rng), _random_ring_element(q, rng)
        if not a or not b:
            continue
        if not (a * b):
            return False, f"sample {s}: ({a}) * ({b}) vanished"
        point = {x: Fraction(rng.randint(-7, 7), rng.randint(1, 5)) for x in atoms}
        sa, sb = a.subs(point), b.subs(point)
        if sa and sb and not (sa * sb):
            return False, f"sample {s}: specialized product vanished at {point}"
    return True, None


# the K/L presentation


def poly_realization(P) -> Realization:
    """Minimal realization with basis T_1^+..T_n^+, T_1^-..T_n^-."""
    P = P if isinstance(P, MultiparamMatrix) else MultiparamMatrix.from_rows(P)
    return build_realization(P, None, "split_minimal", 2 * P.n)


def is_minimal_basis(R: Realization) -> bool:
    n = R.n
    if R.rank != 2 * n:
        return False
    eye, zero = linalg.identity(n), linalg.zeros(n, n)
    return linalg.equal(R.plus_rows(), linalg.hstack(eye, zero)) and linalg.equal(R.minus_rows(), linalg.hstack(zero, eye))


class PolyAlgebra:
    """Generators E_i, F_i, K_i^{+-1}, L_i^{+-1} realized in the formal engine."""

    def __init__(self, datum: CartanSuperDatum, q: PolyMultiparam):
        self.datum = datum
        self.q = q
        self.n = datum.rank
        P = q.matrix()
        self.R = poly_realization(P)
        self.engine = QuantumAlgebra(datum, P, self.R)
        self.hopf = HopfStructure(self.engine)
        self._atoms = _ring_generators(q)

    def E(self, i: int) -> AlgebraElement:
        return self.engine.E(i)

    def F(self, i: int) -> AlgebraElement:
        return self.engine.F(i)

    def grouplike(self, a, b) -> AlgebraElement:
        """K^a L^b for integer vectors a, b."""
        lam = [Fraction(x) for x in a] + [-Fraction(x) for x in b]
        return self.engine.grouplike(lam)

    def K(self, i: int, e: int = 1) -> AlgebraElement:
        return self.grouplike([e if k == i else 0 for k in range(self.n)], [0] * self.n)

    def L(self, i: int, e: int = 1) -> AlgebraElement:
        return self.grouplike([0] * self.n, [e if k == i else 0 for k in range(self.n)])

    def lattice_point(self, lam) -> tuple | None:
        """(a, b) with K^a L^b = exp(hbar lam), or None off the lattice."""
        if any(not x.is_constant() for x in lam):
            return None
        vals = [x.constant_term() for x in lam]
        if any(v.denominator != 1 for v in vals):
            return None
        return tuple(int(v) for v in vals[: self.n]), tuple(-int(v) for v in vals[self.n:])

    def key_in_span(self, key) -> bool:
        h, lam, _ = key
        return not any(h) and self.lattice_point(lam) is not None

    def contains(self, x: AlgebraElement) -> bool:
        entries, step = self._atoms
        for key, c in x.terms.items():
            if not self.key_in_span(key):
                return False
            if not ring_contains(c, self.q):
                return False
        return True

    def tensor_contains(self, t: TensorElement) -> bool:
        for keys, c in t.terms.items():
            if not all(self.key_in_span(k) for k in keys) or not ring_contains(c, self.q):
                return False
        return True

    def generators(self) -> list:
        out = []
        for i in range(self.n):
            out += [
                (f"E{i + 1}", self.E(i)),
                (f"F{i + 1}", self.F(i)),
                (f"K{i + 1}", self.K(i)),
                (f"K{i + 1}^-1", self.K(i, -1)),
                (f"L{i + 1}", self.L(i)),
                (f"L{i + 1}^-1", self.L(i, -1)),
            ]
        return out

    def presentation(self) -> list:
        """(name, element) for every defining relation, written with the multiparameter's own scalars."""
        q = self.q
        one = self.engine.one()
        rels = []
        n = self.n
        for i in range(n):
            rels.append((f"K_inverse({i + 1})", self.K(i) * self.K(i, -1) - one))
            rels.append((f"L_inverse({i + 1})", self.L(i) * self.L(i, -1) - one))
            for j in range(n):
                rels.append((f"K_L_commute({i + 1},{j + 1})", self.K(i) * self.L(j) - self.L(j) * self.K(i)))
                rels.append((f"K_conj_E({i + 1},{j + 1})", self.K(i) * self.E(j) * self.K(i, -1) - self.E(j).scale(q.q(i, j))))
                rels.append((f"L_conj_E({i + 1},{j + 1})", self.L(i) * self.E(j) * self.L(i, -1) - self.E(j).scale(q.q(j, i).inverse())))
                rels.append((f"K_conj_F({i + 1},{j + 1})", self.K(i) * self.F(j) * self.K(i, -1) - self.F(j).scale(q.q(i, j).inverse())))
                rels.append((f"L_conj_F({i + 1},{j + 1})", self.L(i) * self.F(j) * self.L(i, -1) - self.F(j).scale(q.q(j, i))))
                el = q_supercommutator(self.E(i), self.F(j))
                if i == j:
                    denom = q.q_i(i) - q.q_i(i).inverse()
                    el = el - (self.K(i) - self.L(i)).scale(denom.inverse())
                rels.append((f"e_f({i + 1},{j + 1})", el))
        for r in relation_set(self.datum, self.engine.P, self.R, algebra=self.engine).homogeneous():
            rels.append((r.name, r.element))
        return rels


def build_poly(datum: CartanSuperDatum, q: PolyMultiparam | None = None) -> PolyAlgebra:
    q = q or PolyMultiparam.generic(datum)
    if q.datum != datum:
        raise NotCartanType("multiparameter built for a different datum")
    return PolyAlgebra(datum, q)


def hopf_table_check(pa: PolyAlgebra, report: Report | None = None) -> Report:
    """Coproduct, counit and antipode of the generators against the closed K/L tables."""
    report = report or Report("poly_hopf")
    hs = pa.hopf
    one = pa.engine.one()
    pure = TensorElement.pure
    for i in range(pa.n):
        tables = {
            f"E{i + 1}": (pa.E(i), pure(pa.E(i), one) + pure(pa.K(i), pa.E(i)), -(pa.K(i, -1) * pa.E(i)), 0),
            f"F{i + 1}": (pa.F(i), pure(pa.F(i), pa.L(i)) + pure(one, pa.F(i)), -(pa.F(i) * pa.L(i, -1)), 0),
        }
        for e in (1, -1):
            for name, g in ((f"K{i + 1}^{e}", pa.K(i, e)), (f"L{i + 1}^{e}", pa.L(i, e))):
                inv = pa.K(i, -e) if name.startswith("K") else pa.L(i, -e)
                tables[name] = (g, pure(g, g), inv, 1)
        for name, (x, delta, anti, eps) in tables.items():
            with report.timed(f"coproduct_table[{name}]") as rec:
                res = hs.coproduct(x) - delta
                rec(res.is_zero(), res)
            with report.timed(f"antipode_table[{name}]") as rec:
                res = hs.antipode(x) - anti
                rec(res.is_zero(), res)
            with report.timed(f"counit_table[{name}]") as rec:
                v = hs.counit(x)
                rec(v == ToralScalar.const(eps), v)
            with report.timed(f"closure[{name}]") as rec:
                rec(pa.tensor_contains(hs.coproduct(x)) and pa.contains(hs.antipode(x)))
    return report


def embedding_check(pa: PolyAlgebra, report: Report | None = None) -> Report:
    """Every relation of the K/L presentation lies in the polynomial span and vanishes in the engine."""
    report = report or Report("poly_embedding")
    homogeneous = {r.name for r in relation_set(pa.datum, pa.engine.P, pa.R, algebra=pa.engine).homogeneous()}
    for name, el in pa.presentation():
        with report.timed(f"in_span[{name}]") as rec:
            rec(pa.contains(el), el)
        if name in homogeneous:
            continue
        with report.timed(f"vanishes[{name}]") as rec:
            res = straighten(el)
            rec(res.is_zero(), res)
    return report


# twists: integrality


@dataclass
class IntegralityResult:
    ok: bool
    witness: dict | None = None

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        return {"ok": self.ok, "witness": self.witness}


def _constant_matrix(m, what: str) -> list:
    rows = linalg.to_poly_matrix(m)
    if not linalg.is_constant(rows):
        raise NotSpecialized(f"{what} must have rational entries")
    return linalg.constant_matrix(rows)


def _blocks(phi, n: int) -> dict:
    if isinstance(phi, dict):
        out = {}
        for key in ("++", "+-", "-+", "--"):
            out[key] = _constant_matrix(phi.get(key, linalg.zeros(n, n)), f"block {key}")
        return out
    rows = _constant_matrix(phi, "Phi")
    if len(rows) != 2 * n or any(len(r) != 2 * n for r in rows):
        raise NotMinimalBasis(f"Phi must be {2 * n} x {2 * n} in the coroot basis")
    return {
        "++": [r[:n] for r in rows[:n]],
        "+-": [r[n:] for r in rows[:n]],
        "-+": [r[:n] for r in rows[n:]],
        "--": [r[n:] for r in rows[n:]],
    }


def _qmul(a, b) -> list:
    return [[sum((a[i][k] * b[k][j] for k in range(len(b))), Fraction(0)) for j in range(len(b[0]))] for i in range(len(a))]


def integrality_check(phi, P, R: Realization | None = None) -> IntegralityResult:
    """P^T Phi_+^eta and P Phi_-^eta must have even integer entries for eta = +, -."""
    P = P.matrix() if isinstance(P, PolyMultiparam) else P
    Pm = _constant_matrix(P.rows() if isinstance(P, MultiparamMatrix) else P, "P")
    n = len(Pm)
    if R is not None and not is_minimal_basis(R):
        raise NotMinimalBasis("the realization basis is not the set of coroots")
    blocks = _blocks(phi, n)
    Pt = [list(r) for r in zip(*Pm)]
    for eps, left, label in (("+", Pt, "P^T"), ("-", Pm, "P")):
        for eta in ("+", "-"):
            prod = _qmul(left, blocks[eps + eta])
            for i, row in enumerate(prod):
                for j, v in enumerate(row):
                    if (v / 2).denominator != 1:
                        return IntegralityResult(False, {
                            "block": f"{label}*Phi_{eps}^{eta}",
                            "entry": [i + 1, j + 1],
                            "value": str(v),
                        })
    return IntegralityResult(True, None)


def lattice_condition(phi, P) -> IntegralityResult:
    """Direct form: (1/2) alpha_l(H_g) phi_gk must give integer K/L coordinates."""
    P = P.matrix() if isinstance(P, PolyMultiparam) else P
    P = P if isinstance(P, MultiparamMatrix) else MultiparamMatrix.from_rows(P)
    R = poly_realization(P)
    rows = linalg.to_poly_matrix(phi)
    half = linalg.scale(linalg.matmul(R.root_rows(), rows), Fraction(1, 2))
    for l, row in enumerate(half):
        for k, v in enumerate(row):
            if not v.is_constant():
                raise NotSpecialized("corrector coordinates must be rational")
            if v.constant_term().denominator != 1:
                return IntegralityResult(False, {"root": l + 1, "coordinate": k + 1, "value": str(v.constant_term())})
    return IntegralityResult(True, None)


def corrector_closure(pa: PolyAlgebra, phi) -> IntegralityResult:
    """Twisted coproducts and antipodes of all generators stay in the polynomial span."""
    if not linalg.is_antisymmetric(linalg.to_poly_matrix(phi)):
        raise NotAntisymmetric("Phi must be antisymmetric")
    hs = HopfTwist(pa.engine, phi).structure()
    for name, x in pa.generators():
        if not pa.tensor_contains(hs.coproduct(x)):
            return IntegralityResult(False, {"generator": name, "map": "coproduct"})
        if not pa.contains(hs.antipode(x)):
            return IntegralityResult(False, {"generator": name, "map": "antipode"})
    return IntegralityResult(True, None)


def twist_multiparam(q: PolyMultiparam, phi) -> PolyMultiparam:
    """Multiparameter of the twist-transported algebra; requires the four-block condition."""
    res = integrality_check(phi, q)
    if not res:
        raise PolyError(f"twist fails the integrality conditions at {res.witness}")
    P_new, _ = twist_deform(q.matrix(), poly_realization(q.matrix()), phi)
    return PolyMultiparam(q.datum, P_new)


# toral 2-cocycles


def _qhat_block(qhat, n: int) -> list:
    """The K-K block of a Gamma-cocycle given as n x n or as 2n x 2n over (K, L)."""
    rows = linalg.to_poly_matrix(qhat)
    if len(rows) == 2 * n and all(len(r) == 2 * n for r in rows):
        for i in range(n):
            v = [ExponentPoly.const(0)] * (2 * n)
            v[i], v[n + i] = ExponentPoly.const(1), ExponentPoly.const(-1)
            right = linalg.matmul(rows, linalg.transpose([v]))
            left = linalg.matmul([v], rows)
            if not (linalg.is_zero(right) and linalg.is_zero(left)):
                raise Gamma0Violation(f"qhat does not vanish on K_{i + 1} L_{i + 1}^-1")
        rows = [r[:n] for r in rows[:n]]
    elif len(rows) != n or any(len(r) != n for r in rows):
        raise PolyError(f"qhat must be {n} x {n} or {2 * n} x {2 * n}")
    if not linalg.is_antisymmetric(rows):
        raise NotAntisymmetric("qhat must be antisymmetric")
    return rows


def compose_multiparam(q: PolyMultiparam, qhat) -> PolyMultiparam:
    """q * qhat: exponents add on the K-generators."""
    block = _qhat_block(qhat, q.n)
    return PolyMultiparam(q.datum, MultiparamMatrix.from_rows(linalg.add(q.matrix().rows(), block)))


def solve_qhat(q_from: PolyMultiparam, q_to: PolyMultiparam) -> list:
    """The qhat with q_from * qhat = q_to."""
    a, b = q_from.matrix(), q_to.matrix()
    if not linalg.equal(a.symmetric_part.rows(), b.symmetric_part.rows()):
        raise SymmetricPartMismatch("multiparameters with different symmetric parts")
    return linalg.sub(b.rows(), a.rows())


def gamma_cocycle(qhat, n: int) -> list:
    """The 2n x 2n form over (K, L) that restricts to qhat and vanishes on Gamma_0."""
    Y = _qhat_block(qhat, n)
    return linalg.vstack(linalg.hstack(Y, Y), linalg.hstack(Y, Y))


def compose_via_cocycle(q: PolyMultiparam, qhat) -> MultiparamMatrix:
    """Same composition through the formal toral cocycle on the minimal realization."""
    n = q.n
    X = gamma_cocycle(qhat, n)
    D = linalg.identity(2 * n)
    for i in range(n, 2 * n):
        D[i][i] = ExponentPoly.const(-1)
    chi = linalg.matmul(linalg.matmul(D, X), D)
    P_new, _ = cocycle_deform(q.matrix(), poly_realization(q.matrix()), CocycleData.make(chi))
    return P_new


# straightening confluence


STRATEGIES = (("first", 0), ("last", 0), ("random", 1), ("random", 2), ("random", 3))


def _word_element(pa: PolyAlgebra, word: tuple) -> AlgebraElement:
    out = pa.engine.one()
    for kind, i, e in word:
        if kind == "E":
            out = out * pa.E(i)
        elif kind == "F":
            out = out * pa.F(i)
        elif kind == "K":
            out = out * pa.K(i, e)
        else:
            out = out * pa.L(i, e)
    return out


def confluence_check(pa: PolyAlgebra, max_length: int = 6, exhaustive_length: int = 3, samples: int = 150, seed: int = 0) -> tuple:
    """All straightening orders agree on E/F words up to ``exhaustive_length`` and on random longer mixed words."""
    letters = [("E", i, 1) for i in range(pa.n)] + [("F", i, 1) for i in range(pa.n)]
    torals = [(k, i, e) for k in ("K", "L") for i in range(pa.n) for e in (1, -1)]
    words = [w for m in range(2, exhaustive_length + 1) for w in itertools.product(letters, repeat=m)]
    rng = random.Random(seed)
    for _ in range(samples):
        m = rng.randint(exhaustive_length + 1, max_length)
        words.append(tuple(rng.choice(letters + torals if rng.random() < 0.3 else letters) for _ in range(m)))
    checked = 0
    for w in words:
        x = _word_element(pa, w)
        ref = straighten(x)
        for strategy, s in STRATEGIES[1:]:
            other = straighten(x, strategy=strategy, seed=s)
            if not (other - ref).is_zero():
                return False, {"word": _word_str(w), "strategy": strategy, "seed": s}, checked
        checked += 1
    return True, None, checked


def _word_str(w: tuple) -> str:
    return " ".join(f"{k}{i + 1}" + ("" if e == 1 else f"^{e}") for k, i, e in w)


# suite


def _admissible_phi(P: list, n: int) -> list:
    """An antisymmetric integer Phi meeting the four-block condition."""
    den = 1
    for r in P:
        for v in r:
            den = den * v.denominator // gcd(den, v.denominator)
    c = 2 * den
    phi = [[Fraction(0)] * (2 * n) for _ in range(2 * n)]
    for g in range(2 * n):
        for k in range(g + 1, 2 * n):
            v = c * ((g + 2 * k) % 3 - 1)
            phi[g][k], phi[k][g] = Fraction(v), Fraction(-v)
    return phi


def poly_suite(datum: CartanSuperDatum, seed: int = 0, *, confluence_length: int = 6, confluence_samples: int = 150) -> Report:
    report = Report("poly")
    n = datum.rank
    generic = PolyMultiparam.generic(datum)
    standard = PolyMultiparam.standard(datum)
    with report.timed("ring_relation_invisible") as rec:
        bad = {k: v for k, v in ring_relation_residues(generic).items() if v}
        rec(not bad, bad)
    with report.timed("ring_domain") as rec:
        ok, witness = domain_check(generic, seed=seed)
        rec(ok, witness)
    with report.timed("standard_k_trivial") as rec:
        bad = [(i, j) for i in range(n) for j in range(n) if standard.k(i, j) != ToralScalar.one()]
        rec(not bad, bad)
    pa = build_poly(datum, generic)
    hopf_table_check(pa, report)
    hopf_axioms(pa.hopf, report, "poly_", generators=pa.generators())
    embedding_check(pa, report)
    Pstd = linalg.constant_matrix(standard.matrix().rows())
    with report.timed("integrality_zero") as rec:
        res = integrality_check(linalg.zeros(2 * n, 2 * n), standard)
        rec(res.ok, res.witness)
    good = _admissible_phi(Pstd, n)
    pa_std = build_poly(datum, standard)
    with report.timed("integrality_positive") as rec:
        a = integrality_check(good, standard, pa_std.R)
        b = lattice_condition(good, standard)
        c = corrector_closure(pa_std, good)
        rec(a.ok and b.ok and c.ok, f"{a.witness} {b.witness} {c.witness}")
    with report.timed("integrality_negative") as rec:
        bad = [[Fraction(0)] * (2 * n) for _ in range(2 * n)]
        bad[0][1], bad[1][0] = Fraction(1, 2 * max(1, Pstd[0][0].numerator)), -Fraction(1, 2 * max(1, Pstd[0][0].numerator))
        a = integrality_check(bad, standard)
        c = corrector_closure(pa_std, bad)
        if all(v == 0 for row in Pstd for v in row):
            # P = 0 (a single isotropic node): every Phi is integral
            rec(a.ok and c.ok, f"{a.witness} {c.witness}", "P = 0 admits no negative witness")
        else:
            rec(not a.ok and a.witness is not None and not c.ok, f"{a.witness} {c.witness}")
    with report.timed("twist_multiparam_symmetric_part") as rec:
        q2 = twist_multiparam(standard, good)
        rec(linalg.equal(q2.matrix().symmetric_part.rows(), standard.matrix().symmetric_part.rows()))
    with report.timed("compose_zero") as rec:
        rec(compose_multiparam(generic, linalg.zeros(n, n)).matrix() == generic.matrix())
    with report.timed("compose_solves_standard_to_generic") as rec:
        qhat = solve_qhat(standard, generic)
        direct = compose_multiparam(standard, qhat).matrix()
        via = compose_via_cocycle(standard, qhat)
        rec(direct == generic.matrix() and via == generic.matrix(), f"{direct.rows()} | {via.rows()}")
    with report.timed("compose_gamma0_form") as rec:
        qhat = solve_qhat(standard, generic)
        rec(compose_multiparam(standard, gamma_cocycle(qhat, n)).matrix() == generic.matrix())
    if n <= 3:
        with report.timed(f"straightening_confluence[length<={confluence_length}]") as rec:
            ok, witness, count = confluence_check(pa, confluence_length, samples=confluence_samples, seed=seed)
            rec(ok, witness, f"{count} words")
    return report

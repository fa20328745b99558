"""Term model of the formal multiparameter quantum enveloping superalgebra.

A term is ``coefficient * H^h * exp(hbar * lambda.H) * word`` with the toral
part on the left.  ``h`` is a tuple of exponents of the primitive symbols
``H_1..H_t``, ``lambda`` a tuple of exponent polynomials, and the word a tuple
over letters ``+i`` (``E_i``) and ``-i`` (``F_i``), 1-based.

Moving torals left past a word ``w`` of weight ``beta``::

    w * exp(hbar lambda.H) = q^(-beta(lambda)) exp(hbar lambda.H) * w
    w * f(H)               = f(H - beta(H)) * w
"""

from __future__ import annotations

import itertools
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Callable, Iterable, Mapping

from .cartan import CartanSuperDatum, MultiparamMatrix, check_cartan_type, NotCartanType
from .realization import Realization
from .scalars import ExponentPoly, ToralScalar, ZERO_EXP, q_binomial

__all__ = [
    "EngineError",
    "DatumMismatch",
    "NonHomogeneous",
    "DegreeExceeded",
    "InconclusiveDegree",
    "QuantumAlgebra",
    "AlgebraElement",
    "Relation",
    "RelationSet",
    "FreePoly",
    "multiply",
    "q_supercommutator",
    "relation_set",
    "straighten",
    "ideal_member",
    "tensor_ideal_member",
]


class EngineError(ValueError):
    pass


class DatumMismatch(EngineError):
    pass


class NonHomogeneous(EngineError):
    pass


class DegreeExceeded(EngineError):
    pass


class InconclusiveDegree(EngineError):
    pass


ONE = ToralScalar.one()


def _vec_add(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def _vec_neg(a: tuple) -> tuple:
    return tuple(-x for x in a)


class QuantumAlgebra:
    """Structure constants for one (datum, P, realization)."""

    def __init__(self, datum: CartanSuperDatum, P, R: Realization, *, check: bool = True):
        P = P if isinstance(P, MultiparamMatrix) else MultiparamMatrix.from_rows(P)
        if P.n != datum.rank or R.n != datum.rank:
            raise DatumMismatch("datum, matrix and realization ranks differ")
        if check:
            if not check_cartan_type(P, datum):
                raise NotCartanType("P + P^T != 2DA")
            if not R.realizes(P):
                raise DatumMismatch("the realization does not realize P")
        self.datum = datum
        self.P = P
        self.R = R
        self.n = datum.rank
        self.t = R.rank
        self.root = [list(r) for r in R.root]
        self.plus = tuple(tuple(r) for r in R.coroot_plus)
        self.minus = tuple(tuple(r) for r in R.coroot_minus)
        self.zero_lambda = tuple([ZERO_EXP] * self.t)
        self.zero_h = (0,) * self.t
        self._mul_cache: dict = {}
        self._weight_cache: dict = {}

    # letters
    def parity_of_letter(self, letter: int) -> int:
        return self.datum.parity[abs(letter) - 1]

    def parity_of_word(self, word: tuple) -> int:
        return sum(self.parity_of_letter(x) for x in word) % 2

    def weight(self, word: tuple) -> tuple:
        """Root-lattice weight of a word as a vector over H (beta_g = beta(H_g))."""
        w = self._weight_cache.get(word)
        if w is None:
            w = self.zero_lambda
            for x in word:
                row = self.root[abs(x) - 1]
                w = _vec_add(w, tuple(row) if x > 0 else _vec_neg(tuple(row)))
            self._weight_cache[word] = w
        return w

    def pair(self, weight: tuple, lam: tuple) -> ExponentPoly:
        acc = ZERO_EXP
        for a, b in zip(weight, lam):
            if a and b:
                acc = acc + a * b
        return acc

    def root_value(self, j: int, vec) -> ExponentPoly:
        """alpha_j applied to a coordinate vector (0-based j)."""
        return self.pair(tuple(self.root[j]), tuple(vec))

    def d(self, i: int) -> Fraction:
        return self.datum.d[i]

    # derived q-numbers (0-based indices)
    def k(self, i: int, j: int) -> ToralScalar:
        return ToralScalar.qpow((self.P[i, j] - self.P[j, i]) * Fraction(1, 2))

    def q_ij(self, i: int, j: int) -> ToralScalar:
        return ToralScalar.qpow(self.P[i, j])

    def q_i(self, i: int) -> ToralScalar:
        return ToralScalar.qpow(ExponentPoly.const(self.d(i)))

    def nu(self, i: int) -> ToralScalar:
        return ToralScalar.qpow(ExponentPoly.const(self.datum.epsilon[i]))

    def K_lambda(self, i: int) -> tuple:
        """exp(+hbar T_i^+)."""
        return self.plus[i]

    def Lminus_lambda(self, i: int) -> tuple:
        """exp(-hbar T_i^-)."""
        return _vec_neg(self.minus[i])

    # term product
    def mul_keys(self, a: tuple, b: tuple) -> dict:
        cached = self._mul_cache.get((a, b))
        if cached is not None:
            return cached
        h1, l1, w1 = a
        h2, l2, w2 = b
        lam = _vec_add(l1, l2)
        word = w1 + w2
        if not w1 or (not any(h2) and not any(l2)):
            out = {(tuple(x + y for x, y in zip(h1, h2)), lam, word): ONE}
            self._mul_cache[(a, b)] = out
            return out
        beta = self.weight(w1)
        base = ToralScalar.qpow(-self.pair(beta, l2)) if any(l2) else ONE
        out: dict = {}
        if not any(h2):
            out[(h1, lam, word)] = base
        else:
            # expand prod_g (H_g - beta_g)^{e_g}
            ranges = [range(e + 1) for e in h2]
            for ks in itertools.product(*ranges):
                coeff = ExponentPoly.const(1)
                for g, (e, kk) in enumerate(zip(h2, ks)):
                    if e - kk:
                        coeff = coeff * ((-beta[g]) ** (e - kk)) * comb(e, kk)
                if not coeff:
                    continue
                key = (tuple(x + y for x, y in zip(h1, ks)), lam, word)
                val = base * ToralScalar.const(coeff)
                prev = out.get(key)
                out[key] = val if prev is None else prev + val
            out = {k: v for k, v in out.items() if v}
        self._mul_cache[(a, b)] = out
        return out

    # element constructors
    def element(self, terms: Mapping | None = None) -> "AlgebraElement":
        return AlgebraElement(self, dict(terms or {}))

    def one(self) -> "AlgebraElement":
        return self.element({(self.zero_h, self.zero_lambda, ()): ONE})

    def zero(self) -> "AlgebraElement":
        return self.element({})

    def scalar(self, c) -> "AlgebraElement":
        c = ToralScalar.coerce(c)
        return self.element({(self.zero_h, self.zero_lambda, ()): c} if c else {})

    def word(self, letters: Iterable[int], coeff=ONE) -> "AlgebraElement":
        coeff = ToralScalar.coerce(coeff)
        return self.element({(self.zero_h, self.zero_lambda, tuple(letters)): coeff} if coeff else {})

    def E(self, i: int) -> "AlgebraElement":
        """E_i with 0-based index."""
        return self.word((i + 1,))

    def F(self, i: int) -> "AlgebraElement":
        return self.word((-(i + 1),))

    def H(self, g: int) -> "AlgebraElement":
        h = tuple(int(k == g) for k in range(self.t))
        return self.element({(h, self.zero_lambda, ()): ONE})

    def toral(self, vec) -> "AlgebraElement":
        """The primitive element sum_g vec_g H_g."""
        out = self.zero()
        for g, c in enumerate(vec):
            c = ExponentPoly.coerce(c)
            if c:
                out = out + self.H(g) * ToralScalar.const(c)
        return out

    def grouplike(self, lam) -> "AlgebraElement":
        lam = tuple(ExponentPoly.coerce(x) for x in lam)
        return self.element({(self.zero_h, lam, ()): ONE})

    def K(self, i: int) -> "AlgebraElement":
        return self.grouplike(self.K_lambda(i))

    def Lminus(self, i: int) -> "AlgebraElement":
        return self.grouplike(self.Lminus_lambda(i))

    def ef_rhs(self, i: int) -> "AlgebraElement":
        """(exp(hbar T_i^+) - exp(-hbar T_i^-)) / (q_i - q_i^-1)."""
        denom = self.q_i(i) - self.q_i(i).inverse()
        return (self.K(i) - self.Lminus(i)) * denom.inverse()

    def same(self, other: "QuantumAlgebra") -> bool:
        return self is other or (
            self.datum == other.datum and self.P == other.P and self.R == other.R
        )


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    algebra: QuantumAlgebra
    terms: dict = field(default_factory=dict)

    def _check(self, other: "AlgebraElement") -> None:
        if not self.algebra.same(other.algebra):
            raise DatumMismatch("elements of different algebras")

    def __add__(self, other):
        if isinstance(other, (int, Fraction, ToralScalar)):
            other = self.algebra.scalar(other)
        self._check(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            prev = out.get(k)
            if prev is None:
                out[k] = v
            else:
                s = prev + v
                if s:
                    out[k] = s
                else:
                    del out[k]
        return AlgebraElement(self.algebra, out)

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElement(self.algebra, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, ToralScalar)):
            other = self.algebra.scalar(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "AlgebraElement":
        c = ToralScalar.coerce(c)
        if not c:
            return self.algebra.zero()
        return AlgebraElement(self.algebra, {k: v * c for k, v in self.terms.items() if v * c})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, ToralScalar, ExponentPoly)):
            return self.scale(other)
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return multiply(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, ToralScalar, ExponentPoly)):
            return self.scale(other)
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, AlgebraElement):
            return (self - other).is_zero()
        if isinstance(other, (int, Fraction)) and other == 0:
            return self.is_zero()
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def parity(self) -> int:
        ps = {self.algebra.parity_of_word(k[2]) for k in self.terms}
        if len(ps) > 1:
            raise NonHomogeneous("element is not parity homogeneous")
        return ps.pop() if ps else 0

    def degree(self) -> int:
        return max((len(k[2]) for k in self.terms), default=0)

    def subs(self, assignment) -> "AlgebraElement":
        out: dict = {}
        for (h, lam, w), c in self.terms.items():
            key = (h, tuple(x.subs(assignment) for x in lam), w)
            val = c.subs(assignment)
            prev = out.get(key)
            val = val if prev is None else prev + val
            if val:
                out[key] = val
            else:
                out.pop(key, None)
        return AlgebraElement(self.algebra, out)

    def atoms(self) -> set:
        out = set()
        for (h, lam, w), c in self.terms.items():
            out |= c.atoms()
            for x in lam:
                out |= x.atoms()
        return out

    def sorted_terms(self) -> list:
        def key(item):
            (h, lam, w), c = item
            return (len(w), w, h, tuple(x.sort_key() for x in lam))

        return sorted(self.terms.items(), key=key)

    def __repr__(self):
        return f"AlgebraElement({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (h, lam, w), c in self.sorted_terms():
            bits = []
            for g, e in enumerate(h):
                if e:
                    bits.append(f"H{g + 1}" + (f"^{e}" if e > 1 else ""))
            if any(lam):
                bits.append("exp(" + ",".join(str(x) for x in lam) + ")")
            for x in w:
                bits.append(f"E{x}" if x > 0 else f"F{-x}")
            parts.append(f"({c})*" + "*".join(bits) if bits else f"({c})")
        return " + ".join(parts)

    def to_json(self) -> list:
        return [
            {"coeff": c.to_json(), "h": list(h), "lambda": [x.to_json() for x in lam], "word": list(w)}
            for (h, lam, w), c in self.sorted_terms()
        ]

    @classmethod
    def from_json(cls, algebra: QuantumAlgebra, data) -> "AlgebraElement":
        terms: dict = {}
        for entry in data:
            h = tuple(int(x) for x in entry["h"])
            lam = tuple(ExponentPoly.from_json(x) for x in entry["lambda"])
            w = tuple(int(x) for x in entry["word"])
            if len(h) != algebra.t or len(lam) != algebra.t:
                raise ValueError("term toral data has the wrong length")
            if any(x == 0 or abs(x) > algebra.n for x in w):
                raise ValueError("word letter out of range")
            terms[(h, lam, w)] = ToralScalar.from_json(entry["coeff"])
        return algebra.element(terms)


def multiply(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    a._check(b)
    alg = a.algebra
    out: dict = {}
    for ka, ca in a.terms.items():
        for kb, cb in b.terms.items():
            c = ca * cb
            for k, s in alg.mul_keys(ka, kb).items():
                v = c * s
                prev = out.get(k)
                if prev is None:
                    out[k] = v
                else:
                    v = prev + v
                    if v:
                        out[k] = v
                    else:
                        del out[k]
    return AlgebraElement(alg, {k: v for k, v in out.items() if v})


def q_supercommutator(x: AlgebraElement, y: AlgebraElement, c=ONE) -> AlgebraElement:
    """[x, y]_c = xy - c (-1)^{|x||y|} yx."""
    c = ToralScalar.coerce(c)
    sign = -1 if (x.parity() and y.parity()) else 1
    return x * y - (y * x).scale(c * sign)


# straightening


def _first_inversion(word: tuple, strategy: str, rng) -> int | None:
    spots = [p for p in range(len(word) - 1) if word[p] > 0 and word[p + 1] < 0]
    if not spots:
        return None
    if strategy == "first":
        return spots[0]
    if strategy == "last":
        return spots[-1]
    return rng.choice(spots)


def straighten(x: AlgebraElement, degree_bound: int | None = None, strategy: str = "first", seed: int = 0) -> AlgebraElement:
    """Rewrite every E_i F_j into F-left order using the E-F relation only."""
    alg = x.algebra
    if degree_bound is not None and x.degree() > degree_bound:
        raise DegreeExceeded(f"word of length {x.degree()} exceeds bound {degree_bound}")
    rng = random.Random(seed)
    done: dict = {}
    work = dict(x.terms)
    while work:
        key, c = work.popitem()
        h, lam, w = key
        p = _first_inversion(w, strategy, rng)
        if p is None:
            prev = done.get(key)
            v = c if prev is None else prev + c
            if v:
                done[key] = v
            else:
                done.pop(key, None)
            continue
        i, j = w[p], -w[p + 1]
        sign = -1 if (alg.parity_of_letter(i) and alg.parity_of_letter(j)) else 1
        updates = {(h, lam, w[:p] + (-j, i) + w[p + 2:]): c * sign}
        if i == j:
            coef = c * (alg.q_i(i - 1) - alg.q_i(i - 1).inverse()).inverse()
            left = (h, lam, w[:p])
            for lam_mid, s in ((alg.K_lambda(i - 1), ONE), (alg.Lminus_lambda(i - 1), -ONE)):
                mid = (alg.zero_h, lam_mid, w[p + 2:])
                for k, v in alg.mul_keys(left, mid).items():
                    updates[k] = updates.get(k, ToralScalar.zero()) + coef * s * v
        for k, v in updates.items():
            if not v:
                continue
            prev = work.get(k)
            v2 = v if prev is None else prev + v
            if v2:
                work[k] = v2
            else:
                work.pop(k, None)
    return AlgebraElement(alg, done)


# free noncommutative templates


class FreePoly(dict):
    """Word -> ToralScalar, insertion ordered (the first word is the leading one)."""

    def add_term(self, word: tuple, c: ToralScalar) -> None:
        if not c:
            return
        prev = self.get(word)
        v = c if prev is None else prev + c
        if v:
            self[word] = v
        else:
            self.pop(word, None)

    @classmethod
    def letter(cls, x: int) -> "FreePoly":
        return cls({(x,): ONE})

    def mul(self, other: "FreePoly") -> "FreePoly":
        out = FreePoly()
        for w1, c1 in self.items():
            for w2, c2 in other.items():
                out.add_term(w1 + w2, c1 * c2)
        return out

    def lin(self, other: "FreePoly", c: ToralScalar) -> "FreePoly":
        out = FreePoly(self)
        for w, v in other.items():
            out.add_term(w, v * c)
        return out

    def scaled(self, c: ToralScalar) -> "FreePoly":
        out = FreePoly()
        for w, v in self.items():
            out.add_term(w, v * c)
        return out


def free_bracket(x: FreePoly, y: FreePoly, c: ToralScalar, parity: Callable[[tuple], int]) -> FreePoly:
    px = {parity(w) for w in x}
    py = {parity(w) for w in y}
    if len(px) > 1 or len(py) > 1:
        raise NonHomogeneous("bracket of non-homogeneous polynomials")
    sign = -1 if (px.pop() and py.pop()) else 1
    return x.mul(y).lin(y.mul(x), -(c * sign))


@dataclass
class Relation:
    name: str
    family: str
    indices: tuple
    element: AlgebraElement
    template: FreePoly | None = None
    flags: tuple = ()

    def __repr__(self):
        return f"Relation({self.name})"


@dataclass
class RelationSet:
    algebra: QuantumAlgebra
    relations: list
    variant: str = "covariant"
    notes: list = field(default_factory=list)

    def __iter__(self):
        return iter(self.relations)

    def __len__(self):
        return len(self.relations)

    def by_name(self, name: str) -> Relation:
        for r in self.relations:
            if r.name == name:
                return r
        raise KeyError(name)

    def names(self) -> list:
        return [r.name for r in self.relations]

    def counts(self) -> dict:
        return dict(Counter(r.family for r in self.relations))

    def homogeneous(self) -> list:
        return [r for r in self.relations if r.family not in ("cartan_toral", "e_f")]


VARIANTS = ("covariant", "typeset")


def _decoration(alg: QuantumAlgebra, word: tuple, negative: bool) -> ToralScalar:
    """prod_{r<s} k_{w_s w_r}^{1/2} for E words, k_{w_r w_s}^{1/2} for F words."""
    x = ZERO_EXP
    for r in range(len(word)):
        for s in range(r + 1, len(word)):
            a, b = abs(word[r]) - 1, abs(word[s]) - 1
            if a == b:
                continue
            if negative:
                x = x + (alg.P[a, b] - alg.P[b, a])
            else:
                x = x + (alg.P[b, a] - alg.P[a, b])
    return ToralScalar.qpow(x * Fraction(1, 4))


class _TemplateBuilder:
    """Builds relation templates with a pluggable k_ij."""

    def __init__(self, alg: QuantumAlgebra, sign: int, k_fn):
        self.alg = alg
        self.sign = sign
        self.k = k_fn

    def X(self, i: int) -> FreePoly:
        return FreePoly.letter(self.sign * (i + 1))

    def parity(self, word: tuple) -> int:
        return self.alg.parity_of_word(word)

    def br(self, x: FreePoly, y: FreePoly, c: ToralScalar) -> FreePoly:
        return free_bracket(x, y, c, self.parity)

    def nu(self, i: int) -> ToralScalar:
        return self.alg.nu(i)

    def serre(self, i: int, j: int) -> FreePoly:
        alg = self.alg
        m = 1 - alg.datum.a(i, j)
        out = FreePoly()
        for kk in range(m + 1):
            coeff = q_binomial(m, kk, alg.d(i)) * (self.k(i, j) ** kk) * (-1 if kk % 2 else 1)
            out.add_term(tuple([self.sign * (i + 1)] * (m - kk) + [self.sign * (j + 1)] + [self.sign * (i + 1)] * kk), coeff)
        return out

    def isotropic(self, i: int, j: int) -> FreePoly:
        return self.br(self.X(i), self.X(j), self.k(i, j))

    def grey_triple(self, i: int, j: int, k: int) -> FreePoly:
        K, nu = self.k, self.nu
        inner = self.br(self.X(i), self.X(j), nu(j) * K(i, j))
        mid = self.br(inner, self.X(k), nu(k) * K(i, k) * K(j, k))
        return self.br(mid, self.X(j), K(i, j) * K(k, j))

    def black_end(self, n: int) -> FreePoly:
        K, nu = self.k, self.nu
        a, b = n - 2, n - 1
        kk = K(a, b)
        x = self.br(self.X(a), self.X(b), nu(b) * kk)
        x = self.br(x, self.X(b), kk)
        return self.br(x, self.X(b), nu(b).inverse() * kk)

    def fork(self, n: int) -> FreePoly:
        K, nu = self.k, self.nu
        a, b, c = n - 3, n - 2, n - 1
        first = self.br(self.br(self.X(a), self.X(b), nu(b) * K(a, b)), self.X(c), nu(c) * K(a, c) * K(b, c))
        second = self.br(self.br(self.X(a), self.X(c), nu(b) * K(a, c)), self.X(b), nu(c) * K(a, b) * K(c, b))
        return first.lin(second, -ONE)

    def c_tail3(self, n: int) -> FreePoly:
        K, nu = self.k, self.nu
        a, b, c = n - 3, n - 2, n - 1
        inner = self.br(self.X(a), self.X(b), nu(b) * K(a, b))
        x = self.br(inner, self.X(c), nu(c) * K(a, b) * K(b, c))
        x = self.br(x, inner, ONE)
        return self.br(x, self.X(b), nu(b) * K(a, b))

    def c_tail4(self, n: int, factor_two: bool) -> FreePoly:
        K, nu = self.k, self.nu
        z, a, b, c = n - 4, n - 3, n - 2, n - 1
        two = ToralScalar.const(2) if factor_two else ONE
        y = self.br(self.X(z), self.X(a), nu(a) * K(z, a))
        y = self.br(y, self.X(b), nu(b) * K(z, b) * K(a, b))
        y = self.br(y, self.X(c), two * nu(c) * K(z, c) * K(a, c) * K(b, c))
        y = self.br(y, self.X(b), nu(c) * K(z, b) * K(a, b) * K(c, b))
        y = self.br(y, self.X(a), nu(b) * K(z, a) * (K(b, a) ** 2) * K(c, a))
        return self.br(y, self.X(b), K(z, b) * (K(a, b) ** 2) * K(c, b))


def _covariantize(alg: QuantumAlgebra, sym: FreePoly, negative: bool) -> FreePoly:
    if not sym:
        return sym
    lead = next(iter(sym))
    norm = _decoration(alg, lead, negative).inverse()
    out = FreePoly()
    for w, c in sym.items():
        out.add_term(w, c * _decoration(alg, w, negative) * norm)
    return out


def template_to_element(alg: QuantumAlgebra, tpl: FreePoly) -> AlgebraElement:
    return alg.element({(alg.zero_h, alg.zero_lambda, w): c for w, c in tpl.items() if c})


def relation_manifest(datum: CartanSuperDatum) -> list:
    """List of (family, indices, flags) for the higher relations of a datum (0-based)."""
    n = datum.rank
    col = datum.colours
    out = []
    for i in range(n):
        for j in range(n):
            if i != j and col[i] == "white":
                out.append(("serre", (i, j), ()))
    for i in range(n):
        for j in range(i, n):
            if datum.a(i, j) == 0 and datum.a(j, i) == 0 and (i != j or col[i] == "grey"):
                out.append(("isotropic_commute", (i, j), ()))
    for j in range(n):
        if col[j] != "grey":
            continue
        nb = datum.neighbours(j)
        if len(nb) != 2:
            continue
        a, b = nb
        ma, mb = datum.edge_multiplicity(a, j), datum.edge_multiplicity(b, j)
        if ma > 2 or mb > 2 or (ma == 2 and mb == 2):
            continue
        flags = ()
        if ma == 2:
            i, k = b, a
        elif mb == 2:
            i, k = a, b
        else:
            pos = {lab - 1: p for p, lab in enumerate(datum.order)}
            i, k = sorted((a, b), key=lambda v: pos.get(v, v))
        if datum.type_tag == "D2" and j >= n - 2:
            flags = ("fork_ambiguity",)
        if datum.edge_multiplicity(i, j) != 1:
            continue
        out.append(("grey_triple", (i, j, k), flags))
    if datum.type_tag == "B2":
        out.append(("black_end", (n,), ()))
    if datum.type_tag == "D2":
        out.append(("fork", (n,), ()))
    if datum.type_tag == "C" and n >= 3 and col[n - 3] == "grey" and col[n - 2] == "grey" and col[n - 1] == "white":
        out.append(("c_tail3", (n,), ()))
        if n >= 4:
            out.append(("c_tail4", (n,), ()))
    return out


def relation_set(
    datum: CartanSuperDatum,
    P,
    R: Realization,
    *,
    variant: str = "covariant",
    factor_two: bool = True,
    algebra: QuantumAlgebra | None = None,
) -> RelationSet:
    """All defining relations of the presentation for the given data."""
    if variant not in VARIANTS:
        raise EngineError(f"unknown variant {variant!r}")
    alg = algebra or QuantumAlgebra(datum, P, R)
    rels: list = []
    n, t = alg.n, alg.t
    for g in range(t):
        Hg = alg.H(g)
        for j in range(n):
            for X, sgn in ((alg.E(j), 1), (alg.F(j), -1)):
                coeff = ToralScalar.const(alg.root[j][g] * sgn)
                el = Hg * X - X * Hg - X.scale(coeff)
                name = f"cartan_toral_{'E' if sgn > 0 else 'F'}(H{g + 1},{j + 1})"
                rels.append(Relation(name, "cartan_toral", (g, j), el))
    for i in range(n):
        for j in range(n):
            el = q_supercommutator(alg.E(i), alg.F(j))
            if i == j:
                el = el - alg.ef_rhs(i)
            rels.append(Relation(f"e_f({i + 1},{j + 1})", "e_f", (i, j), el))
    notes = []
    for family, idx, flags in relation_manifest(datum):
        for negative in (False, True):
            side = "f" if negative else "e"
            sign = -1 if negative else 1
            literal = _TemplateBuilder(alg, sign, alg.k)
            if variant == "typeset":
                tpl = _build(literal, family, idx, factor_two)
            else:
                sym = _TemplateBuilder(alg, sign, lambda i, j: ONE)
                tpl = _covariantize(alg, _build(sym, family, idx, factor_two), negative)
            label = ",".join(str(v + 1) if family not in ("black_end", "fork", "c_tail3", "c_tail4") else str(v) for v in idx)
            name = f"{family}_{side}({label})"
            rels.append(Relation(name, family, idx, template_to_element(alg, tpl), tpl, flags))
            if flags:
                notes.append(f"{name}: {','.join(flags)}")
    return RelationSet(alg, rels, variant, notes)


def _build(b: _TemplateBuilder, family: str, idx: tuple, factor_two: bool) -> FreePoly:
    if family == "serre":
        return b.serre(*idx)
    if family == "isotropic_commute":
        return b.isotropic(*idx)
    if family == "grey_triple":
        return b.grey_triple(*idx)
    if family == "black_end":
        return b.black_end(*idx)
    if family == "fork":
        return b.fork(*idx)
    if family == "c_tail3":
        return b.c_tail3(*idx)
    if family == "c_tail4":
        return b.c_tail4(idx[0], factor_two)
    raise EngineError(f"unknown family {family}")


def evaluate_template(tpl: FreePoly, letter_map: Mapping[int, AlgebraElement], product=None) -> AlgebraElement:
    """Substitute letters by elements; ``product`` defaults to the algebra product."""
    product = product or multiply
    cache: dict = {}
    alg = next(iter(letter_map.values())).algebra

    def word_value(word: tuple) -> AlgebraElement:
        if word in cache:
            return cache[word]
        if len(word) == 1:
            val = letter_map[word[0]]
        else:
            val = product(word_value(word[:-1]), letter_map[word[-1]])
        cache[word] = val
        return val

    out = alg.zero()
    for w, c in tpl.items():
        out = out + word_value(w).scale(c)
    return out


# bounded-degree ideal membership


def _letter_multiset(word: tuple) -> tuple:
    return tuple(sorted(Counter(word).items()))


def _arrangements(multiset: Counter) -> list:
    letters = sorted(multiset.elements())
    return sorted(set(itertools.permutations(letters)))


def _generators(alg: QuantumAlgebra, rels: Iterable[Relation], targets: set, degree_bound: int) -> list:
    """Straightened elements tau * w1 * r * w2 matching the target (toral key, letter multiset) pairs."""
    gens = []
    seen = set()
    multisets = {m for (_, m) in targets}
    toral_keys = {tk for (tk, _) in targets}
    for r in rels:
        if r.element.is_zero():
            continue
        r_words = {k[2] for k in r.element.terms}
        r_ms = Counter(next(iter(r_words)))
        for ms in multisets:
            need = Counter(dict(ms))
            need.subtract(r_ms)
            if any(v < 0 for v in need.values()):
                continue
            need = +need
            if sum(need.values()) + sum(r_ms.values()) > degree_bound:
                continue
            for arr in _arrangements(need):
                for cut in range(len(arr) + 1):
                    w1, w2 = arr[:cut], arr[cut:]
                    key = (r.name, w1, w2)
                    if key in seen:
                        continue
                    seen.add(key)
                    g = alg.word(w1) * r.element * alg.word(w2) if (w1 or w2) else r.element
                    g = straighten(g)
                    if g.is_zero():
                        continue
                    g_keys = {(k[0], k[1]) for k in g.terms}
                    taus = set()
                    for (th, tl) in toral_keys:
                        for (gh, gl) in g_keys:
                            dh = tuple(a - b for a, b in zip(th, gh))
                            if min(dh, default=0) < 0:
                                continue
                            taus.add((dh, tuple(a - b for a, b in zip(tl, gl))))
                    for tau in sorted(taus, key=repr):
                        gens.append(alg.element({(tau[0], tau[1], ()): ONE}) * g)
    return gens


def _random_assignment(atoms: set, rng: random.Random) -> dict:
    out = {}
    for a in sorted(atoms):
        num = rng.randint(-9, 9)
        den = rng.randint(1, 5)
        out[a] = Fraction(num, den)
    return out


class _Reducer:
    """Row-reduced span of vectors keyed by term keys, over unit-line scalars."""

    def __init__(self):
        self.rows: list = []  # (pivot key, dict)

    @staticmethod
    def _order(key):
        return repr(key)

    def reduce(self, vec: dict) -> dict:
        v = dict(vec)
        for pk, row in self.rows:
            c = v.get(pk)
            if c:
                for k, x in row.items():
                    nv = v.get(k, ToralScalar.zero()) - c * x
                    if nv:
                        v[k] = nv
                    else:
                        v.pop(k, None)
        return v

    def add(self, vec: dict) -> None:
        v = self.reduce(vec)
        if not v:
            return
        pk = min(v, key=self._order)
        inv = v[pk].inverse()
        row = {k: x * inv for k, x in v.items()}
        # keep rows fully reduced against the new pivot
        new_rows = []
        for qk, other in self.rows:
            c = other.get(pk)
            if c:
                other = dict(other)
                for k, x in row.items():
                    nv = other.get(k, ToralScalar.zero()) - c * x
                    if nv:
                        other[k] = nv
                    else:
                        other.pop(k, None)
            new_rows.append((qk, other))
        new_rows.append((pk, row))
        self.rows = new_rows


def _targets(x: AlgebraElement) -> set:
    return {((k[0], k[1]), _letter_multiset(k[2])) for k in x.terms}


def _homogeneous(rels) -> list:
    rels = list(rels.homogeneous() if isinstance(rels, RelationSet) else rels)
    return [r for r in rels if r.family not in ("cartan_toral", "e_f")]


def ideal_member(
    x: AlgebraElement,
    rels,
    degree_bound: int,
    specializations: int = 3,
    seed: int = 0,
) -> bool:
    """Semi-decide membership of ``x`` in the two-sided ideal of ``rels`` at a degree bound."""
    x = straighten(x, degree_bound)
    if x.is_zero():
        return True
    alg = x.algebra
    gens = _generators(alg, _homogeneous(rels), _targets(x), degree_bound)
    atoms = set(x.atoms())
    for g in gens:
        atoms |= g.atoms()
    for s in range(specializations):
        rng = random.Random(seed * 1000003 + s)
        assign = _random_assignment(atoms, rng)
        red = _Reducer()
        for g in gens:
            red.add(g.subs(assign).terms)
        if red.reduce(x.subs(assign).terms):
            raise InconclusiveDegree(f"membership fails at degree bound {degree_bound}")
    return True


def tensor_ideal_member(
    tensor: dict,
    alg: QuantumAlgebra,
    rels,
    degree_bound: int,
    specializations: int = 3,
    seed: int = 0,
) -> bool:
    """Membership of a 2-tensor (dict (key1, key2) -> scalar) in I (x) U + U (x) I.

    Each slot is reduced to a normal form modulo the bounded-degree ideal,
    slot one first and then slot two; the tensor lies in the sum iff nothing
    survives.
    """
    if not tensor:
        return True
    hom = _homogeneous(rels)
    slot1 = {((k1[0], k1[1]), _letter_multiset(k1[2])) for (k1, k2) in tensor}
    slot2 = {((k2[0], k2[1]), _letter_multiset(k2[2])) for (k1, k2) in tensor}
    gens1 = _generators(alg, hom, slot1, degree_bound)
    gens2 = _generators(alg, hom, slot2, degree_bound)
    atoms = set()
    for (k1, k2), c in tensor.items():
        atoms |= c.atoms()
        for x in k1[1] + k2[1]:
            atoms |= x.atoms()
    for g in gens1 + gens2:
        atoms |= g.atoms()
    for s in range(specializations):
        rng = random.Random(seed * 1000003 + s)
        assign = _random_assignment(atoms, rng)

        def spec_key(k):
            return (k[0], tuple(x.subs(assign) for x in k[1]), k[2])

        spec = {}
        for (k1, k2), c in tensor.items():
            key = (spec_key(k1), spec_key(k2))
            spec[key] = spec.get(key, ToralScalar.zero()) + c.subs(assign)
        red1, red2 = _Reducer(), _Reducer()
        for g in gens1:
            red1.add(g.subs(assign).terms)
        for g in gens2:
            red2.add(g.subs(assign).terms)
        by2: dict = {}
        for (k1, k2), c in spec.items():
            by2.setdefault(k2, {})
            by2[k2][k1] = by2[k2].get(k1, ToralScalar.zero()) + c
        stage: dict = {}
        for k2, vec in by2.items():
            for k1, c in red1.reduce({k: v for k, v in vec.items() if v}).items():
                stage.setdefault(k1, {})
                stage[k1][k2] = stage[k1].get(k2, ToralScalar.zero()) + c
        for k1, vec in stage.items():
            if red2.reduce({k: v for k, v in vec.items() if v}):
                raise InconclusiveDegree(f"tensor membership fails at degree bound {degree_bound}")
    return True

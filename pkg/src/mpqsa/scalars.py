"""Exact ground ring: exponent polynomials, formal exponentials q^x and q-combinatorics.

An :class:`ExponentPoly` is a commutative polynomial with rational coefficients
in named atoms.  The constant monomial plays the role of ``unit``: the exponent
``2`` means ``q^2`` with ``q = exp(hbar)``.

A :class:`ToralScalar` is a fraction ``num / den`` where ``num`` is a finite sum
of ``c * q^x`` (``c`` a coefficient polynomial, ``x`` an exponent polynomial)
and ``den`` is a Laurent polynomial in ``q`` with rational exponents.  Coefficient
slot and exponent slot are algebraically independent.
"""

from __future__ import annotations

import ast
from fractions import Fraction
from functools import reduce
from math import lcm
from typing import Iterable, Mapping, Union

__all__ = [
    "ScalarError",
    "DivisionByNonUnit",
    "DivisionByZero",
    "UnboundAtom",
    "OutOfRange",
    "ExponentPoly",
    "ToralScalar",
    "Rational",
    "as_fraction",
    "scalar_arith",
    "q_binomial",
    "q_integer",
    "specialize",
    "q_power",
    "q_i",
    "q_ij",
    "k_ij",
    "nu",
    "kappa",
    "k_phi",
]

Rational = Union[int, Fraction]
Monomial = tuple  # tuple[tuple[str, int], ...], sorted by atom name


class ScalarError(ValueError):
    """Base class for scalar ring errors."""


class DivisionByNonUnit(ScalarError):
    pass


class DivisionByZero(ScalarError, ZeroDivisionError):
    pass


class UnboundAtom(ScalarError, KeyError):
    pass


class OutOfRange(ScalarError):
    pass


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise TypeError(f"not a rational: {value!r}")


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    out = dict(a)
    for atom, power in b:
        out[atom] = out.get(atom, 0) + power
    return tuple(sorted(out.items()))


def _mono_key(m: Monomial):
    return (sum(p for _, p in m), m)


class ExponentPoly:
    """Sparse rational polynomial over named atoms, kept in canonical form."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Rational] | None = None):
        clean = {}
        if terms:
            for mono, c in terms.items():
                c = as_fraction(c)
                if c:
                    clean[mono] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "ExponentPoly":
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    # construction helpers
    @classmethod
    def atom(cls, name: str) -> "ExponentPoly":
        if not name or not isinstance(name, str):
            raise ValueError("atom names are non-empty strings")
        return cls._raw({((name, 1),): Fraction(1)})

    @classmethod
    def const(cls, value: Rational) -> "ExponentPoly":
        value = as_fraction(value)
        return cls._raw({(): value} if value else {})

    @classmethod
    def coerce(cls, value) -> "ExponentPoly":
        if isinstance(value, ExponentPoly):
            return value
        if isinstance(value, str) and not _looks_rational(value):
            return cls.atom(value)
        return cls.const(as_fraction(value))

    # inspection
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items(), key=lambda kv: _mono_key(kv[0]))

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not m for m in self._terms)

    def constant_term(self) -> Fraction:
        return self._terms.get((), Fraction(0))

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.constant_term()

    def atoms(self) -> set:
        return {a for m in self._terms for a, _ in m}

    def degree(self) -> int:
        return max((sum(p for _, p in m) for m in self._terms), default=0)

    def split_unit(self) -> tuple:
        """Return (constant part, non-constant part)."""
        c = self._terms.get((), Fraction(0))
        if not c:
            return c, self
        rest = {m: v for m, v in self._terms.items() if m}
        return c, ExponentPoly._raw(rest)

    def coefficient(self, atom: str) -> "ExponentPoly":
        """Coefficient of ``atom`` for a polynomial of degree <= 1 in that atom."""
        out = {}
        for m, c in self._terms.items():
            d = dict(m)
            p = d.pop(atom, 0)
            if p == 1:
                out[tuple(sorted(d.items()))] = c
            elif p > 1:
                raise ValueError(f"{atom} appears non-linearly in {self}")
        return ExponentPoly._raw(out)

    # arithmetic
    def __add__(self, other):
        other = _ep(other)
        if other is NotImplemented:
            return other
        if not other._terms:
            return self
        if not self._terms:
            return other
        out = dict(self._terms)
        for m, c in other._terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return ExponentPoly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return ExponentPoly._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = _ep(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = _ep(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            if not other:
                return ExponentPoly._raw({})
            return ExponentPoly._raw({m: c * other for m, c in self._terms.items()})
        other = _ep(other)
        if other is NotImplemented:
            return other
        out: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = _mono_mul(m1, m2)
                v = out.get(m, 0) + c1 * c2
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return ExponentPoly._raw(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = as_fraction(other)
        if not other:
            raise DivisionByZero("division of an exponent polynomial by zero")
        return self * (1 / other)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of an exponent polynomial")
        out = ExponentPoly.const(1)
        for _ in range(n):
            out = out * self
        return out

    def subs(self, assignment: Mapping[str, object], strict: bool = False) -> "ExponentPoly":
        """Substitute atoms by rationals or exponent polynomials."""
        if not self._terms:
            return self
        vals = {k: _ep(v) for k, v in assignment.items()}
        out = ExponentPoly._raw({})
        for m, c in self._terms.items():
            term = ExponentPoly._raw({(): c})
            rest = []
            for atom, p in m:
                if atom in vals:
                    term = term * (vals[atom] ** p)
                elif strict:
                    raise UnboundAtom(atom)
                else:
                    rest.append((atom, p))
            if rest:
                term = term * ExponentPoly._raw({tuple(rest): Fraction(1)})
            out = out + term
        return out

    # comparison / hashing
    def __eq__(self, other):
        if isinstance(other, ExponentPoly):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == ({(): Fraction(other)} if other else {})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    def sort_key(self):
        return tuple((_mono_key(m), c) for m, c in self.items())

    def __repr__(self):
        return f"ExponentPoly({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for m, c in self.items():
            mono = "*".join(a if p == 1 else f"{a}^{p}" for a, p in m)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    # serialization
    def to_json(self) -> list:
        return [[[[a, p] for a, p in m], str(c)] for m, c in self.items()]

    @classmethod
    def parse(cls, text: str) -> "ExponentPoly":
        """Parse expressions such as ``"1/2*p1_2 - p2_3^2 + 3"``."""
        try:
            tree = ast.parse(text.replace("^", "**"), mode="eval")
        except SyntaxError as exc:
            raise ValueError(f"cannot parse exponent polynomial {text!r}") from exc
        return _eval_poly(tree.body, text)

    @classmethod
    def from_json(cls, data) -> "ExponentPoly":
        if isinstance(data, str):
            return cls.parse(data)
        if isinstance(data, int) and not isinstance(data, bool):
            return cls.const(data)
        if not isinstance(data, list):
            raise ValueError(f"malformed exponent polynomial: {data!r}")
        terms: dict = {}
        for entry in data:
            if not (isinstance(entry, list) and len(entry) == 2 and isinstance(entry[0], list)):
                raise ValueError(f"malformed monomial entry: {entry!r}")
            mono = []
            for pair in entry[0]:
                if not (isinstance(pair, list) and len(pair) == 2):
                    raise ValueError(f"malformed atom power: {pair!r}")
                a, p = pair
                if not isinstance(a, str) or not isinstance(p, int) or p < 1:
                    raise ValueError(f"malformed atom power: {pair!r}")
                mono.append((a, p))
            key = tuple(sorted(mono))
            terms[key] = terms.get(key, 0) + as_fraction(entry[1])
        return cls(terms)


def _eval_poly(node, text: str) -> ExponentPoly:
    if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
        return ExponentPoly.const(node.value)
    if isinstance(node, ast.Name):
        return ExponentPoly.atom(node.id)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        inner = _eval_poly(node.operand, text)
        return -inner if isinstance(node.op, ast.USub) else inner
    if isinstance(node, ast.BinOp):
        left = _eval_poly(node.left, text)
        if isinstance(node.op, ast.Pow):
            if not (isinstance(node.right, ast.Constant) and isinstance(node.right.value, int) and node.right.value >= 0):
                raise ValueError(f"exponents must be non-negative integers in {text!r}")
            out = ExponentPoly.const(1)
            for _ in range(node.right.value):
                out = out * left
            return out
        right = _eval_poly(node.right, text)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            return left * right
        if isinstance(node.op, ast.Div):
            if not right.is_constant() or not right.constant_term():
                raise ValueError(f"division by a non-constant or zero in {text!r}")
            return left * (1 / right.constant_term())
    raise ValueError(f"unsupported syntax in exponent polynomial {text!r}")


def _looks_rational(s: str) -> bool:
    try:
        Fraction(s)
        return True
    except (ValueError, ZeroDivisionError):
        return False


def _ep(value):
    if isinstance(value, ExponentPoly):
        return value
    if isinstance(value, bool):
        return NotImplemented
    if isinstance(value, (int, Fraction)):
        return ExponentPoly.const(value)
    return NotImplemented


ZERO_EXP = ExponentPoly.const(0)
ONE_EXP = ExponentPoly.const(1)


# univariate Laurent polynomials in z = q^(1/N): dict int -> Fraction


def _u_trim(p: dict) -> dict:
    return {e: c for e, c in p.items() if c}


def _u_shift_to_zero(p: dict) -> tuple:
    lo = min(p)
    return {e - lo: c for e, c in p.items()}, lo


def _u_divmod(a: dict, b: dict) -> tuple:
    a = dict(a)
    db = max(b)
    lb = b[db]
    quo: dict = {}
    while a and max(a) >= db:
        da = max(a)
        c = a[da] / lb
        shift = da - db
        quo[shift] = c
        for e, v in b.items():
            k = e + shift
            nv = a.get(k, 0) - c * v
            if nv:
                a[k] = nv
            else:
                a.pop(k, None)
    return quo, a


def _u_gcd(a: dict, b: dict) -> dict:
    a, _ = _u_shift_to_zero(a)
    b, _ = _u_shift_to_zero(b)
    while b:
        _, r = _u_divmod(a, b)
        a, b = b, (_u_shift_to_zero(r)[0] if r else {})
    lead = a[max(a)]
    return {e: c / lead for e, c in a.items()}


class ToralScalar:
    """Element ``num/den`` of the localized exponential group ring."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: Mapping | None = None, den: Mapping | None = None, *, _canonical=False):
        if _canonical:
            self.num = num
            self.den = den
            self._hash = None
            return
        n: dict = {}
        for x, c in (num or {}).items():
            x = ExponentPoly.coerce(x)
            c = ExponentPoly.coerce(c)
            if c:
                v = n.get(x)
                v = c if v is None else v + c
                if v:
                    n[x] = v
                else:
                    n.pop(x, None)
        d = {as_fraction(e): as_fraction(c) for e, c in (den or {Fraction(0): Fraction(1)}).items()}
        d = {e: c for e, c in d.items() if c}
        if not d:
            raise DivisionByZero("zero denominator")
        self.num, self.den = _canonicalize(n, d)
        self._hash = None

    # constructors
    @classmethod
    def zero(cls) -> "ToralScalar":
        return _ZERO

    @classmethod
    def one(cls) -> "ToralScalar":
        return _ONE

    @classmethod
    def const(cls, c) -> "ToralScalar":
        c = ExponentPoly.coerce(c) if not isinstance(c, (int, Fraction)) else ExponentPoly.const(c)
        if not c:
            return _ZERO
        return cls({ZERO_EXP: c}, _canonical=False)

    @classmethod
    def qpow(cls, x, c=1) -> "ToralScalar":
        x = ExponentPoly.coerce(x)
        c = ExponentPoly.coerce(c) if not isinstance(c, (int, Fraction)) else ExponentPoly.const(c)
        if not c:
            return _ZERO
        return cls({x: c}, _UNIT_DEN, _canonical=True)

    @classmethod
    def coerce(cls, value) -> "ToralScalar":
        if isinstance(value, ToralScalar):
            return value
        if isinstance(value, (int, Fraction, ExponentPoly)):
            return cls.const(value)
        raise TypeError(f"cannot coerce {value!r} to ToralScalar")

    # inspection
    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self):
        return bool(self.num)

    def has_denominator(self) -> bool:
        return self.den is not _UNIT_DEN and self.den != _UNIT_DEN

    def is_monomial(self) -> bool:
        return len(self.num) == 1 and not self.has_denominator()

    def monomial(self) -> tuple:
        """(coefficient polynomial, exponent) of a monomial scalar."""
        if not self.is_monomial():
            raise ValueError(f"{self} is not a monomial")
        (x, c), = self.num.items()
        return c, x

    def atoms(self) -> set:
        out = set()
        for x, c in self.num.items():
            out |= x.atoms() | c.atoms()
        return out

    def is_unit_line(self) -> bool:
        return all(x.is_constant() and c.is_constant() for x, c in self.num.items())

    # arithmetic
    def __add__(self, other):
        other = _ts(other)
        if other is NotImplemented:
            return other
        if not other.num:
            return self
        if not self.num:
            return other
        if self.den == other.den:
            return _make(_num_add(self.num, other.num), self.den)
        n = _num_add(_num_mul_den(self.num, other.den), _num_mul_den(other.num, self.den))
        return _make(n, _den_mul(self.den, other.den))

    __radd__ = __add__

    def __neg__(self):
        return ToralScalar({x: -c for x, c in self.num.items()}, self.den, _canonical=True)

    def __sub__(self, other):
        other = _ts(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = _ts(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = _ts(other)
        if other is NotImplemented:
            return other
        if not self.num or not other.num:
            return _ZERO
        n = _num_mul(self.num, other.num)
        if self.den is _UNIT_DEN and other.den is _UNIT_DEN:
            return ToralScalar(n, _UNIT_DEN, _canonical=True) if n else _ZERO
        return _make(n, _den_mul(self.den, other.den))

    __rmul__ = __mul__

    def inverse(self) -> "ToralScalar":
        if not self.num:
            raise DivisionByZero("inverse of zero")
        if len(self.num) == 1:
            (x, c), = self.num.items()
            if c.is_constant():
                cv = c.constant_value()
                n = {(-x) + e: ExponentPoly.const(v / cv) for e, v in self.den.items()}
                return _make(n, _UNIT_DEN)
        if not self.is_unit_line():
            raise DivisionByNonUnit(f"cannot invert {self}")
        new_den: dict = {}
        for x, c in self.num.items():
            e = x.constant_value()
            new_den[e] = new_den.get(e, 0) + c.constant_value()
        new_den = {e: v for e, v in new_den.items() if v}
        n = {ExponentPoly.const(e): ExponentPoly.const(v) for e, v in self.den.items()}
        return _make(n, new_den)

    def __truediv__(self, other):
        other = _ts(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _ts(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        if self.is_monomial():
            c, x = self.monomial()
            return ToralScalar.qpow(x * n, c ** n)
        out = _ONE
        for _ in range(n):
            out = out * self
        return out

    def qpow_root(self, r: Rational) -> "ToralScalar":
        """Rational power of a pure exponential ``q^x`` (coefficient 1)."""
        c, x = self.monomial()
        if c != ONE_EXP:
            raise DivisionByNonUnit(f"rational power of non-exponential {self}")
        return ToralScalar.qpow(x * as_fraction(r))

    def subs(self, assignment: Mapping[str, object]) -> "ToralScalar":
        n = {}
        for x, c in self.num.items():
            x2 = x.subs(assignment)
            c2 = c.subs(assignment)
            if c2:
                v = n.get(x2)
                v = c2 if v is None else v + c2
                if v:
                    n[x2] = v
                else:
                    n.pop(x2, None)
        return _make(n, self.den)

    # comparison
    def __eq__(self, other):
        other = _ts(other)
        if other is NotImplemented:
            return False
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((frozenset(self.num.items()), frozenset(self.den.items())))
        return self._hash

    def sort_key(self):
        return (
            tuple(sorted((x.sort_key(), c.sort_key()) for x, c in self.num.items())),
            tuple(sorted(self.den.items())),
        )

    def __repr__(self):
        return f"ToralScalar({self})"

    def __str__(self):
        if not self.num:
            return "0"
        parts = []
        for x, c in sorted(self.num.items(), key=lambda kv: (kv[0].sort_key(), kv[1].sort_key())):
            if x.is_zero():
                parts.append(f"({c})" if len(c.terms) > 1 else str(c))
            else:
                base = f"q^({x})"
                if c == ONE_EXP:
                    parts.append(base)
                elif c == -ONE_EXP:
                    parts.append("-" + base)
                else:
                    parts.append(f"({c})*{base}")
        num = " + ".join(parts).replace("+ -", "- ")
        if self.den == _UNIT_DEN:
            return num
        den = " + ".join(f"{c}*q^({e})" for e, c in sorted(self.den.items()))
        return f"({num})/({den})"

    def to_json(self) -> dict:
        num = sorted(
            ([c.to_json(), x.to_json()] for x, c in self.num.items()),
            key=lambda e: repr(e),
        )
        den = [[ExponentPoly.const(c).to_json(), ExponentPoly.const(e).to_json()] for e, c in sorted(self.den.items())]
        return {"num": num, "den": den}

    @classmethod
    def from_json(cls, data) -> "ToralScalar":
        if not isinstance(data, dict) or "num" not in data:
            raise ValueError(f"malformed scalar: {data!r}")
        num: dict = {}
        for entry in data["num"]:
            if not (isinstance(entry, list) and len(entry) == 2):
                raise ValueError(f"malformed scalar term: {entry!r}")
            c = ExponentPoly.from_json(entry[0])
            x = ExponentPoly.from_json(entry[1])
            num[x] = num.get(x, ZERO_EXP) + c
        den: dict = {}
        for entry in data.get("den") or [[[[[], "1"]], []]]:
            if not (isinstance(entry, list) and len(entry) == 2):
                raise ValueError(f"malformed denominator term: {entry!r}")
            c = ExponentPoly.from_json(entry[0])
            x = ExponentPoly.from_json(entry[1])
            if not (c.is_constant() and x.is_constant()):
                raise ValueError("denominator terms must lie on the unit line")
            e = x.constant_term()
            den[e] = den.get(e, 0) + c.constant_term()
        return cls(num, den)


def _ts(value):
    if isinstance(value, ToralScalar):
        return value
    if isinstance(value, bool):
        return NotImplemented
    if isinstance(value, (int, Fraction, ExponentPoly)):
        return ToralScalar.const(value)
    return NotImplemented


_UNIT_DEN = {Fraction(0): Fraction(1)}


def _num_add(a: dict, b: dict) -> dict:
    out = dict(a)
    for x, c in b.items():
        v = out.get(x)
        if v is None:
            out[x] = c
        else:
            v = v + c
            if v:
                out[x] = v
            else:
                del out[x]
    return out


def _num_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for x1, c1 in a.items():
        for x2, c2 in b.items():
            x = x1 + x2
            c = c1 * c2
            v = out.get(x)
            if v is None:
                out[x] = c
            else:
                v = v + c
                if v:
                    out[x] = v
                else:
                    del out[x]
    return out


def _num_mul_den(num: dict, den: dict) -> dict:
    out: dict = {}
    for e, v in den.items():
        shift = ExponentPoly.const(e)
        for x, c in num.items():
            key = x + shift
            val = out.get(key)
            val = c * v if val is None else val + c * v
            if val:
                out[key] = val
            else:
                out.pop(key, None)
    return out


def _den_mul(a: dict, b: dict) -> dict:
    if a == _UNIT_DEN:
        return b
    if b == _UNIT_DEN:
        return a
    out: dict = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
    return {e: c for e, c in out.items() if c}


def _make(num: dict, den: dict) -> "ToralScalar":
    if not num:
        return _ZERO
    if den is _UNIT_DEN or den == _UNIT_DEN:
        return ToralScalar(num, _UNIT_DEN, _canonical=True)
    n, d = _canonicalize(num, den)
    return ToralScalar(n, d, _canonical=True)


def _canonicalize(num: dict, den: dict) -> tuple:
    if not num:
        return {}, _UNIT_DEN
    if den == _UNIT_DEN:
        return num, _UNIT_DEN
    # common grid z = q^(1/N)
    exps = list(den)
    comps: dict = {}
    for x, c in num.items():
        e, rest = x.split_unit()
        exps.append(e)
        for mono, cv in c.terms.items():
            comps.setdefault((rest, mono), {})[e] = cv
    big_n = reduce(lcm, (e.denominator for e in exps), 1)

    def to_z(p: dict) -> dict:
        return {int(e * big_n): c for e, c in p.items()}

    zden = to_z(den)
    g = zden
    zcomps = {k: to_z(v) for k, v in comps.items()}
    if len(g) > 1:
        for p in zcomps.values():
            g = _u_gcd(g, p)
            if len(g) == 1:
                break
    if len(g) > 1:
        g, _ = _u_shift_to_zero(g)
        zden0, dlo = _u_shift_to_zero(zden)
        zden, r = _u_divmod(zden0, g)
        assert not r
        zden = {e + dlo: c for e, c in zden.items()}
        for k, p in zcomps.items():
            p0, plo = _u_shift_to_zero(p)
            qz, r = _u_divmod(p0, g)
            assert not r
            zcomps[k] = {e + plo: c for e, c in qz.items()}
    # normalize: lowest exponent 0, leading coefficient 1
    zden, lo = _u_shift_to_zero(_u_trim(zden))
    lead = zden[max(zden)]
    new_den = {Fraction(e, big_n): c / lead for e, c in zden.items()}
    new_num: dict = {}
    for (rest, mono), p in zcomps.items():
        for e, cv in p.items():
            if not cv:
                continue
            x = rest + ExponentPoly.const(Fraction(e - lo, big_n))
            c = ExponentPoly._raw({mono: cv / lead})
            v = new_num.get(x)
            v = c if v is None else v + c
            if v:
                new_num[x] = v
            else:
                new_num.pop(x, None)
    if new_den == _UNIT_DEN:
        new_den = _UNIT_DEN
    return new_num, new_den


_ZERO = ToralScalar({}, _UNIT_DEN, _canonical=True)
_ONE = ToralScalar({ZERO_EXP: ONE_EXP}, _UNIT_DEN, _canonical=True)


def scalar_arith(a: ToralScalar, b: ToralScalar | None, op: str) -> ToralScalar:
    """Dispatch ``add``, ``mul``, ``div``, ``neg`` or ``inv``."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "neg":
        return -a
    if op == "inv":
        return a.inverse()
    raise ValueError(f"unknown scalar operation {op!r}")


def q_power(x, c=1) -> ToralScalar:
    return ToralScalar.qpow(x, c)


def _laurent_to_scalar(p: dict, d: Fraction) -> ToralScalar:
    return ToralScalar({ExponentPoly.const(e * d): c for e, c in p.items()})


def _qint_laurent(n: int) -> dict:
    """Symmetric q-integer [n]_v as a Laurent polynomial in v."""
    return {n - 1 - 2 * r: Fraction(1) for r in range(n)}


def _laurent_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
    return {e: c for e, c in out.items() if c}


def q_integer(n: int, d: Rational = 1) -> ToralScalar:
    """Symmetric q-integer [n]_{q^d}."""
    if n < 0:
        raise OutOfRange("negative q-integer")
    return _laurent_to_scalar(_qint_laurent(n), as_fraction(d))


def q_binomial(n: int, k: int, d: Rational = 1) -> ToralScalar:
    """Symmetric Gaussian binomial [n k]_{q^d} as a Laurent polynomial."""
    if n < 0 or k < 0:
        raise OutOfRange("negative argument to q_binomial")
    if k > n:
        raise OutOfRange(f"k={k} exceeds n={n}")
    top = {0: Fraction(1)}
    bot = {0: Fraction(1)}
    for r in range(1, n + 1):
        top = _laurent_mul(top, _qint_laurent(r))
    for r in list(range(1, k + 1)) + list(range(1, n - k + 1)):
        bot = _laurent_mul(bot, _qint_laurent(r))
    t, lo_t = _u_shift_to_zero(top)
    b, lo_b = _u_shift_to_zero(bot)
    quo, rem = _u_divmod(t, b)
    if rem:
        raise ArithmeticError("Gaussian binomial division left a remainder")
    shift = lo_t - lo_b
    return _laurent_to_scalar({e + shift: c for e, c in quo.items()}, as_fraction(d))


def specialize(s: ToralScalar, assignment: Mapping[str, Rational]) -> ToralScalar:
    """Substitute every non-unit atom by a rational; unbound atoms raise."""
    missing = s.atoms() - set(assignment)
    if missing:
        raise UnboundAtom(sorted(missing)[0])
    return s.subs({k: as_fraction(v) for k, v in assignment.items()})


# derived q-number accessors


def _entry(mat, i, j) -> ExponentPoly:
    rows = mat.rows() if hasattr(mat, "rows") else mat
    return ExponentPoly.coerce(rows[i][j])


def q_i(d_i: Rational) -> ToralScalar:
    return ToralScalar.qpow(ExponentPoly.const(d_i))


def q_ij(P, i: int, j: int) -> ToralScalar:
    return ToralScalar.qpow(_entry(P, i, j))


def k_ij(P, i: int, j: int) -> ToralScalar:
    return ToralScalar.qpow((_entry(P, i, j) - _entry(P, j, i)) * Fraction(1, 2))


def nu(epsilon_i: Rational) -> ToralScalar:
    return ToralScalar.qpow(ExponentPoly.const(epsilon_i))


def kappa(chi_ring, i: int, j: int) -> ToralScalar:
    return ToralScalar.qpow(_entry(chi_ring, i, j))


def k_phi(root_matrix, phi, i: int, j: int) -> ToralScalar:
    """k^Phi_ij = q^{(A Phi A^T)_ji} for root matrix A and twist matrix Phi."""
    t = len(phi)
    x = ZERO_EXP
    for g in range(t):
        for k in range(t):
            f = _entry(phi, g, k)
            if f:
                x = x + _entry(root_matrix, j, g) * f * _entry(root_matrix, i, k)
    return ToralScalar.qpow(x)


def sum_scalars(values: Iterable[ToralScalar]) -> ToralScalar:
    out = _ZERO
    for v in values:
        out = out + v
    return out

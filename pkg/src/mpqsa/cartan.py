"""Dynkin catalogue of Cartan super-data and multiparameter matrices of Cartan type.

Each diagram is produced from its simple roots written in an orthogonal basis
``(e_a, e_b) = delta_ab * eps_a`` with ``eps_a = +-1``.  The Gram matrix ``B``
of the roots equals ``DA``; the Cartan matrix is read off row by row:
``a_i = 2 B_i / B_ii`` on non-isotropic rows and ``a_i = B_i / g_i`` on
isotropic ones, where ``g_i`` is the gcd of the row.  Isotropic (grey)
vertices and the black end of ``B2`` are odd, everything else is even.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Sequence

from . import linalg
from .scalars import ExponentPoly

__all__ = [
    "CartanError",
    "InvalidRank",
    "InvalidEpsilon",
    "RankMismatch",
    "NotCartanType",
    "TYPE_TAGS",
    "CartanSuperDatum",
    "MultiparamMatrix",
    "build_datum",
    "standard_matrix",
    "generic_matrix",
    "check_cartan_type",
    "parse_epsilon",
    "param_atom",
]

TYPE_TAGS = ("A", "B1", "B2", "C", "D1", "D2", "F4", "G3")
_MIN_RANK = {"A": 1, "B1": 2, "B2": 2, "C": 2, "D1": 3, "D2": 3}


class CartanError(ValueError):
    pass


class InvalidRank(CartanError):
    pass


class InvalidEpsilon(CartanError):
    pass


class RankMismatch(CartanError):
    pass


class NotCartanType(CartanError):
    pass


@dataclass(frozen=True)
class CartanSuperDatum:
    type_tag: str
    rank: int
    cartan: tuple  # tuple[tuple[int, ...], ...]
    parity: tuple  # 0 even, 1 odd
    d: tuple  # tuple[Fraction, ...]
    epsilon: tuple  # tuple[int, ...], nu_i = q^epsilon_i
    colours: tuple  # "white" | "grey" | "black"
    order: tuple = field(default=())  # node labels in drawing order, 1-based

    @property
    def n(self) -> int:
        return self.rank

    def a(self, i: int, j: int) -> int:
        """Cartan entry with 0-based indices."""
        return self.cartan[i][j]

    def symmetrized(self) -> list:
        """The rational matrix DA."""
        return [[self.d[i] * self.cartan[i][j] for j in range(self.rank)] for i in range(self.rank)]

    def is_odd(self, i: int) -> bool:
        return bool(self.parity[i])

    def neighbours(self, i: int) -> list:
        return [j for j in range(self.rank) if j != i and (self.cartan[i][j] or self.cartan[j][i])]

    def edge_multiplicity(self, i: int, j: int) -> int:
        if i == j or not (self.cartan[i][j] or self.cartan[j][i]):
            return 0
        return max(abs(self.cartan[i][j]), abs(self.cartan[j][i]))

    def label(self) -> str:
        return f"{self.type_tag}{self.rank}"

    def to_json(self) -> dict:
        return {
            "type": self.type_tag,
            "rank": self.rank,
            "cartan": [list(r) for r in self.cartan],
            "parity": list(self.parity),
            "d": [str(x) for x in self.d],
            "epsilon": list(self.epsilon),
            "colours": list(self.colours),
            "order": list(self.order),
        }

    @classmethod
    def from_json(cls, data: dict) -> "CartanSuperDatum":
        try:
            n = int(data["rank"])
            cartan = tuple(tuple(int(x) for x in row) for row in data["cartan"])
            parity = tuple(int(x) for x in data["parity"])
            d = tuple(Fraction(x) for x in data["d"])
            eps = tuple(int(x) for x in data["epsilon"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed datum: {exc}") from exc
        if len(cartan) != n or any(len(r) != n for r in cartan) or len(parity) != n or len(d) != n:
            raise ValueError("datum fields do not match the rank")
        colours = tuple(data.get("colours") or ("grey" if p else "white" for p in parity))
        order = tuple(data.get("order") or range(1, n + 1))
        datum = cls(str(data["type"]), n, cartan, parity, d, eps, colours, order)
        dA = datum.symmetrized()
        if any(dA[i][j] != dA[j][i] for i in range(n) for j in range(n)):
            raise ValueError("DA is not symmetric")
        return datum


def parse_epsilon(choice, length: int) -> tuple:
    """Accept None, "default", an int, a sign string like "+-+", or a sequence of +-1."""
    if choice is None or choice == "default":
        return (1,) * length
    if isinstance(choice, int):
        if choice not in (1, -1):
            raise InvalidEpsilon(f"epsilon must be +-1, got {choice}")
        return (choice,) * length
    if isinstance(choice, str):
        s = choice.strip()
        if s in ("+1", "1", "-1"):
            return (int(s),) * length
        vals = []
        for ch in s.replace(",", ""):
            if ch == "+":
                vals.append(1)
            elif ch == "-":
                vals.append(-1)
            else:
                raise InvalidEpsilon(f"bad sign character {ch!r}")
        return tuple(vals)
    vals = tuple(int(x) for x in choice)
    if any(v not in (1, -1) for v in vals):
        raise InvalidEpsilon("epsilon entries must be +-1")
    return vals


def _gram(roots: Sequence[Sequence[Fraction]], form: Sequence[int]) -> list:
    return [[sum(Fraction(x) * y * f for x, y, f in zip(a, b, form)) for b in roots] for a in roots]


def _unit(m: int, k: int) -> list:
    return [int(k == j) for j in range(m)]


def _classical_roots(tag: str, n: int, eps: tuple) -> tuple:
    """Simple roots and form for the classical families."""
    if tag == "A":
        if len(eps) == n:
            eps = eps + (eps[-1],)
        if len(eps) != n + 1:
            raise InvalidEpsilon(f"A{n} needs {n} or {n + 1} signs")
        m = n + 1
        roots = [[a - b for a, b in zip(_unit(m, i), _unit(m, i + 1))] for i in range(n)]
        return roots, eps
    if len(eps) != n:
        raise InvalidEpsilon(f"{tag}{n} needs {n} signs")
    m = n
    roots = [[a - b for a, b in zip(_unit(m, i), _unit(m, i + 1))] for i in range(n - 1)]
    if tag in ("B1", "B2"):
        roots.append(_unit(m, n - 1))
    elif tag == "C":
        roots.append([2 * x for x in _unit(m, n - 1)])
    elif tag in ("D1", "D2"):
        if tag == "D1" and eps[n - 1] != eps[n - 2]:
            raise InvalidEpsilon("type D1 needs eps_n = +eps_(n-1)")
        if tag == "D2" and eps[n - 1] != -eps[n - 2]:
            raise InvalidEpsilon("type D2 needs eps_n = -eps_(n-1)")
        roots.append([a + b for a, b in zip(_unit(m, n - 2), _unit(m, n - 1))])
    return roots, eps


_F4_GRAM = [[4, 0, 0, -2], [0, 0, -1, 0], [0, -1, 2, -2], [-2, 0, -2, 4]]
_G3_GRAM = [[0, 0, -1], [0, 6, -3], [-1, -3, 2]]


def _cartan_from_gram(b: list) -> tuple:
    n = len(b)
    d0 = []
    for i in range(n):
        if b[i][i]:
            d0.append(Fraction(b[i][i], 2))
        else:
            g = reduce(gcd, (abs(int(x)) for j, x in enumerate(b[i]) if j != i and x), 0)
            d0.append(Fraction(g or 1))
    cartan = tuple(tuple(int(Fraction(b[i][j]) / d0[i]) for j in range(n)) for i in range(n))
    for i in range(n):
        for j in range(n):
            if Fraction(b[i][j]) / d0[i] != cartan[i][j]:
                raise CartanError("Gram matrix does not give an integral Cartan matrix")
    d = tuple(d0)
    return cartan, d


def build_datum(type_tag: str, n: int | None = None, epsilon_choice=None) -> CartanSuperDatum:
    """Build the catalogue datum for ``type_tag`` at rank ``n``."""
    tag = str(type_tag).upper()
    if tag not in TYPE_TAGS:
        raise CartanError(f"unknown type tag {type_tag!r}")
    if tag in ("F4", "G3"):
        forced = int(tag[1])
        if n is None:
            n = forced
        if n != forced:
            raise InvalidRank(f"{tag} has rank {forced}")
        if epsilon_choice not in (None, "default"):
            raise InvalidEpsilon(f"{tag} has a fixed epsilon")
        gram = _F4_GRAM if tag == "F4" else _G3_GRAM
        eps = (6, -2, -2, -2) if tag == "F4" else (-2, 2, 6)
        order = (1, 4, 3, 2) if tag == "F4" else (1, 3, 2)
        cartan, d = _cartan_from_gram(gram)
        colours = tuple("grey" if gram[i][i] == 0 else "white" for i in range(n))
        parity = tuple(int(c != "white") for c in colours)
        return CartanSuperDatum(tag, n, cartan, parity, d, eps, colours, order)
    if n is None or not isinstance(n, int) or n < _MIN_RANK[tag]:
        raise InvalidRank(f"{tag} needs rank >= {_MIN_RANK[tag]}, got {n}")
    signs = parse_epsilon(epsilon_choice, n)
    if tag in ("D1", "D2") and epsilon_choice in (None, "default"):
        signs = signs[:-1] + ((signs[-2] if tag == "D1" else -signs[-2]),)
    roots, form = _classical_roots(tag, n, signs)
    gram = _gram(roots, form)
    cartan, d = _cartan_from_gram(gram)
    colours = []
    for i in range(n):
        if gram[i][i] == 0:
            colours.append("grey")
        elif tag == "B2" and i == n - 1:
            colours.append("black")
        else:
            colours.append("white")
    parity = tuple(int(c != "white") for c in colours)
    return CartanSuperDatum(tag, n, cartan, parity, d, tuple(form[:n]), tuple(colours), tuple(range(1, n + 1)))


# multiparameter matrices


def param_atom(i: int, j: int) -> str:
    """Atom name of p_ij for 0-based ``i < j``."""
    return f"p{i + 1}_{j + 1}"


@dataclass(frozen=True)
class MultiparamMatrix:
    entries: tuple  # tuple[tuple[ExponentPoly, ...], ...]

    @classmethod
    def from_rows(cls, rows) -> "MultiparamMatrix":
        m = linalg.to_poly_matrix(rows)
        if len({len(r) for r in m}) > 1 or (m and len(m) != len(m[0])):
            raise RankMismatch("multiparameter matrix must be square")
        return cls(tuple(tuple(r) for r in m))

    @property
    def n(self) -> int:
        return len(self.entries)

    def rows(self) -> list:
        return [list(r) for r in self.entries]

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def transpose(self) -> "MultiparamMatrix":
        return MultiparamMatrix(tuple(tuple(r) for r in linalg.transpose(self.rows())))

    @property
    def symmetric_part(self) -> "MultiparamMatrix":
        n = self.n
        return MultiparamMatrix(tuple(tuple((self[i, j] + self[j, i]) * Fraction(1, 2) for j in range(n)) for i in range(n)))

    @property
    def antisymmetric_part(self) -> "MultiparamMatrix":
        n = self.n
        return MultiparamMatrix(tuple(tuple((self[i, j] - self[j, i]) * Fraction(1, 2) for j in range(n)) for i in range(n)))

    def __add__(self, other) -> "MultiparamMatrix":
        other = other if isinstance(other, MultiparamMatrix) else MultiparamMatrix.from_rows(other)
        return MultiparamMatrix(tuple(tuple(r) for r in linalg.add(self.rows(), other.rows())))

    def __sub__(self, other) -> "MultiparamMatrix":
        other = other if isinstance(other, MultiparamMatrix) else MultiparamMatrix.from_rows(other)
        return MultiparamMatrix(tuple(tuple(r) for r in linalg.sub(self.rows(), other.rows())))

    def atoms(self) -> set:
        return linalg.atoms(self.rows())

    def subs(self, assignment) -> "MultiparamMatrix":
        return MultiparamMatrix(tuple(tuple(r) for r in linalg.substitute(self.rows(), assignment)))

    def to_json(self) -> list:
        return linalg.matrix_to_json(self.rows())

    @classmethod
    def from_json(cls, data) -> "MultiparamMatrix":
        return cls.from_rows(linalg.matrix_from_json(data))


def standard_matrix(datum: CartanSuperDatum) -> MultiparamMatrix:
    """P = DA."""
    return MultiparamMatrix.from_rows(datum.symmetrized())


def generic_matrix(datum: CartanSuperDatum) -> MultiparamMatrix:
    """Generic Cartan-type matrix: p_ij atoms above the diagonal, the rest eliminated."""
    n = datum.rank
    dA = datum.symmetrized()
    rows = [[ExponentPoly.const(0)] * n for _ in range(n)]
    for i in range(n):
        rows[i][i] = ExponentPoly.const(dA[i][i])
        for j in range(i + 1, n):
            p = ExponentPoly.atom(param_atom(i, j))
            rows[i][j] = p
            rows[j][i] = ExponentPoly.const(2 * dA[i][j]) - p
    return MultiparamMatrix.from_rows(rows)


def check_cartan_type(P, datum: CartanSuperDatum) -> bool:
    """True iff P + P^T = 2DA identically."""
    P = P if isinstance(P, MultiparamMatrix) else MultiparamMatrix.from_rows(P)
    n = datum.rank
    if P.n != n:
        raise RankMismatch(f"matrix of size {P.n} for a rank {n} datum")
    dA = datum.symmetrized()
    return all(P[i, j] + P[j, i] == ExponentPoly.const(2 * dA[i][j]) for i in range(n) for j in range(n))

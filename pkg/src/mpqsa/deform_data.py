"""Twist and 2-cocycle deformations of multiparameter matrices and realizations.

A twist ``Phi`` (antisymmetric t x t) keeps the roots and moves the coroots::

    P_Phi = P - A Phi A^T,   T^+_Phi = T^+ - (A Phi)_i,   T^-_Phi = T^- + (A Phi)_i

A cocycle ``X`` (antisymmetric t x t, killing every S_i) keeps the coroots
and moves the roots::

    P_(X) = P + C+ X C+^T,   alpha^(X)_i = alpha_i - (C+ X)_i
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .cartan import MultiparamMatrix
from .realization import Realization, classify
from .scalars import ExponentPoly

__all__ = [
    "DeformError",
    "SizeMismatch",
    "NotAntisymmetric",
    "NotAltS",
    "SymmetricPartMismatch",
    "NotStraight",
    "NotSplit",
    "TwistData",
    "CocycleData",
    "symbolic_antisymmetric",
    "twist_deform",
    "cocycle_deform",
    "solve_twist",
    "solve_cocycle",
    "admissible_cocycle",
]


class DeformError(ValueError):
    pass


class SizeMismatch(DeformError):
    pass


class NotAntisymmetric(DeformError):
    pass


class NotAltS(DeformError):
    pass


class SymmetricPartMismatch(DeformError):
    pass


class NotStraight(DeformError):
    pass


class NotSplit(DeformError):
    pass


def _square(m) -> list:
    rows = linalg.to_poly_matrix(m)
    if any(len(r) != len(rows) for r in rows):
        raise SizeMismatch("deformation matrix must be square")
    return rows


@dataclass(frozen=True)
class TwistData:
    phi: tuple

    @classmethod
    def make(cls, m) -> "TwistData":
        rows = _square(m)
        if not linalg.is_antisymmetric(rows):
            raise NotAntisymmetric("twist matrix must be antisymmetric")
        return cls(tuple(tuple(r) for r in rows))

    @classmethod
    def zero(cls, t: int) -> "TwistData":
        return cls.make(linalg.zeros(t, t))

    @property
    def size(self) -> int:
        return len(self.phi)

    def rows(self) -> list:
        return [list(r) for r in self.phi]

    def __add__(self, other: "TwistData") -> "TwistData":
        return TwistData.make(linalg.add(self.rows(), other.rows()))

    def to_json(self) -> dict:
        return {"phi": linalg.matrix_to_json(self.rows())}

    @classmethod
    def from_json(cls, data) -> "TwistData":
        return cls.make(linalg.matrix_from_json(data["phi"]))


@dataclass(frozen=True)
class CocycleData:
    chi: tuple

    @classmethod
    def make(cls, m) -> "CocycleData":
        rows = _square(m)
        if not linalg.is_antisymmetric(rows):
            raise NotAntisymmetric("cocycle matrix must be antisymmetric")
        return cls(tuple(tuple(r) for r in rows))

    @classmethod
    def zero(cls, t: int) -> "CocycleData":
        return cls.make(linalg.zeros(t, t))

    @property
    def size(self) -> int:
        return len(self.chi)

    def rows(self) -> list:
        return [list(r) for r in self.chi]

    def __add__(self, other: "CocycleData") -> "CocycleData":
        return CocycleData.make(linalg.add(self.rows(), other.rows()))

    def ring(self, R: Realization) -> list:
        """The matrix chi(T_i^+, T_j^+)."""
        return linalg.matmul(linalg.matmul(R.plus_rows(), self.rows()), linalg.transpose(R.plus_rows()))

    def pair(self, u, v) -> ExponentPoly:
        """chi(u, v) for coordinate row vectors."""
        return linalg.matmul(linalg.matmul([list(u)], self.rows()), linalg.transpose([list(v)]))[0][0]

    def is_alt_s(self, R: Realization) -> bool:
        return linalg.is_zero(linalg.matmul(R.s_rows(), self.rows()))

    def to_json(self) -> dict:
        return {"chi": linalg.matrix_to_json(self.rows())}

    @classmethod
    def from_json(cls, data) -> "CocycleData":
        return cls.make(linalg.matrix_from_json(data["chi"]))


def symbolic_antisymmetric(t: int, prefix: str) -> list:
    """Fully symbolic antisymmetric matrix with atoms ``{prefix}{g}_{k}`` above the diagonal."""
    m = linalg.zeros(t, t)
    for g in range(t):
        for k in range(g + 1, t):
            a = ExponentPoly.atom(f"{prefix}{g + 1}_{k + 1}")
            m[g][k] = a
            m[k][g] = -a
    return m


def _as_matrix(P) -> MultiparamMatrix:
    return P if isinstance(P, MultiparamMatrix) else MultiparamMatrix.from_rows(P)


def _twist(phi) -> TwistData:
    return phi if isinstance(phi, TwistData) else TwistData.make(phi)


def _cocycle(chi) -> CocycleData:
    return chi if isinstance(chi, CocycleData) else CocycleData.make(chi)


def twist_deform(P, R: Realization, phi) -> tuple:
    """Return (P_Phi, R_Phi)."""
    P = _as_matrix(P)
    phi = _twist(phi)
    if phi.size != R.rank:
        raise SizeMismatch(f"twist of size {phi.size} for a rank {R.rank} realization")
    a_phi = linalg.matmul(R.root_rows(), phi.rows())
    shift = linalg.matmul(a_phi, linalg.transpose(R.root_rows()))
    p_new = MultiparamMatrix.from_rows(linalg.sub(P.rows(), shift))
    r_new = Realization.make(R.root_rows(), linalg.sub(R.plus_rows(), a_phi), linalg.add(R.minus_rows(), a_phi))
    return p_new, r_new


def cocycle_deform(P, R: Realization, chi) -> tuple:
    """Return (P_(chi), R_(chi))."""
    P = _as_matrix(P)
    chi = _cocycle(chi)
    if chi.size != R.rank:
        raise SizeMismatch(f"cocycle of size {chi.size} for a rank {R.rank} realization")
    if not chi.is_alt_s(R):
        raise NotAltS("chi(S_i, -) does not vanish")
    p_new = MultiparamMatrix.from_rows(linalg.add(P.rows(), chi.ring(R)))
    plus_x = linalg.matmul(R.plus_rows(), chi.rows())
    minus_x = linalg.matmul(R.minus_rows(), chi.rows())
    new_root = linalg.sub(R.root_rows(), plus_x)
    if not linalg.equal(new_root, linalg.add(R.root_rows(), minus_x)):
        raise NotAltS("chi(-, T^+) and -chi(-, T^-) disagree")
    return p_new, Realization.make(new_root, R.plus_rows(), R.minus_rows())


def _check_symmetric_parts(P, P2) -> None:
    if not linalg.equal(P.symmetric_part.rows(), P2.symmetric_part.rows()):
        raise SymmetricPartMismatch("the two matrices have different symmetric parts")


def solve_twist(P, P_target, R: Realization) -> TwistData:
    """Antisymmetric Phi with P_Phi = P_target, via a right inverse of the root matrix."""
    P, P_target = _as_matrix(P), _as_matrix(P_target)
    _check_symmetric_parts(P, P_target)
    if "straight" not in classify(R):
        raise NotStraight("solve_twist needs a straight realization")
    if not linalg.is_constant(R.root_rows()):
        raise NotStraight("solve_twist needs a constant root matrix")
    b = linalg.as_poly(linalg.right_inverse(linalg.constant_matrix(R.root_rows())))
    diff = linalg.sub(P.rows(), P_target.rows())
    return TwistData.make(linalg.matmul(linalg.matmul(b, diff), linalg.transpose(b)))


def solve_cocycle(P, P_target, R: Realization) -> CocycleData:
    """Cocycle with P_(chi) = P_target, extended by zero on a complement of the coroot span."""
    P, P_target = _as_matrix(P), _as_matrix(P_target)
    _check_symmetric_parts(P, P_target)
    if "split" not in classify(R):
        raise NotSplit("solve_cocycle needs a split realization")
    if not (linalg.is_constant(R.plus_rows()) and linalg.is_constant(R.minus_rows())):
        raise NotSplit("solve_cocycle needs constant coroots")
    n, t = R.n, R.rank
    coroots = linalg.constant_matrix(R.plus_rows()) + linalg.constant_matrix(R.minus_rows())
    basis = coroots + linalg.complete_basis(coroots)
    delta = linalg.sub(P_target.rows(), P.rows())
    gram = linalg.zeros(t, t)
    for i in range(n):
        for j in range(n):
            v = delta[i][j]
            gram[i][j] = v
            gram[i][n + j] = -v
            gram[n + i][j] = -v
            gram[n + i][n + j] = v
    inv = linalg.as_poly(linalg.inverse(basis))
    x = linalg.matmul(linalg.matmul(inv, gram), linalg.transpose(inv))
    return CocycleData.make(x)


def admissible_cocycle(R: Realization, prefix: str = "x") -> CocycleData:
    """Generic symbolic cocycle killing every S_i.

    Built in the basis (S, Lambda, complement): chi vanishes on the S_i, is a
    symbolic antisymmetric form on the rest.
    """
    if not linalg.is_constant(R.s_rows()):
        raise NotAltS("symbolic cocycles need constant S_i")
    s_rows = linalg.constant_matrix(R.s_rows())
    keep = linalg.independent_row_indices(s_rows)
    s_basis = [s_rows[i] for i in keep]
    rest = linalg.complete_basis(s_basis)
    basis = s_basis + rest
    k = len(s_basis)
    t = R.rank
    free = symbolic_antisymmetric(t - k, prefix)
    gram = linalg.zeros(t, t)
    for a in range(t - k):
        for b in range(t - k):
            gram[k + a][k + b] = free[a][b]
    inv = linalg.as_poly(linalg.inverse(basis))
    x = linalg.matmul(linalg.matmul(inv, gram), linalg.transpose(inv))
    chi = CocycleData.make(x)
    if not chi.is_alt_s(R):
        raise NotAltS("constructed cocycle does not kill the S_i")
    return chi


def scaled(m, c) -> list:
    return linalg.scale(linalg.to_poly_matrix(m), Fraction(c))

"""Realizations of multiparameter matrices, their flags, constructors and morphisms.

A realization of rank ``t`` is stored by coordinates in a fixed basis
``H_1..H_t`` of the Cartan space: ``root[i][g] = alpha_i(H_g)`` and
``T_i^+- = sum_g coroot_pm[i][g] H_g``.  The defining identities are
``coroot_plus @ root^T = P`` and ``coroot_minus @ root^T = P^T``.

Every "mod hbar" independence test kills all non-unit atoms and takes the
exact rank over the rationals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .cartan import CartanSuperDatum, MultiparamMatrix
from .scalars import ExponentPoly

__all__ = [
    "FLAVORS",
    "RealizationError",
    "RankTooSmall",
    "SmallObstruction",
    "NotAMorphism",
    "NotStraight",
    "InvariantViolation",
    "Realization",
    "RealizationMorphism",
    "classify",
    "build_realization",
    "lift",
    "morphism_kernel",
    "symmetrized_realization",
    "quotient_by_central",
]

FLAGS = ("straight", "split", "small", "minimal")


class RealizationError(ValueError):
    pass


class RankTooSmall(RealizationError):
    pass


class SmallObstruction(RealizationError):
    pass


class NotAMorphism(RealizationError):
    pass


class NotStraight(RealizationError):
    pass


class InvariantViolation(RealizationError):
    pass


def _freeze(m) -> tuple:
    return tuple(tuple(ExponentPoly.coerce(x) for x in row) for row in m)


@dataclass(frozen=True)
class Realization:
    rank: int
    root: tuple  # n x t
    coroot_plus: tuple  # n x t
    coroot_minus: tuple  # n x t

    @classmethod
    def make(cls, root, plus, minus) -> "Realization":
        root, plus, minus = _freeze(root), _freeze(plus), _freeze(minus)
        t = len(root[0]) if root else 0
        for m in (root, plus, minus):
            if len(m) != len(root) or any(len(r) != t for r in m):
                raise RealizationError("root and coroot matrices must all be n x t")
        return cls(t, root, plus, minus)

    @property
    def n(self) -> int:
        return len(self.root)

    def root_rows(self) -> list:
        return [list(r) for r in self.root]

    def plus_rows(self) -> list:
        return [list(r) for r in self.coroot_plus]

    def minus_rows(self) -> list:
        return [list(r) for r in self.coroot_minus]

    def s_rows(self) -> list:
        return linalg.scale(linalg.add(self.plus_rows(), self.minus_rows()), Fraction(1, 2))

    def lambda_rows(self) -> list:
        return linalg.scale(linalg.sub(self.plus_rows(), self.minus_rows()), Fraction(1, 2))

    def matrix(self) -> MultiparamMatrix:
        """The matrix P realized: alpha_j(T_i^+)."""
        return MultiparamMatrix.from_rows(linalg.matmul(self.plus_rows(), linalg.transpose(self.root_rows())))

    def realizes(self, P) -> bool:
        P = P if isinstance(P, MultiparamMatrix) else MultiparamMatrix.from_rows(P)
        at = linalg.transpose(self.root_rows())
        return linalg.equal(linalg.matmul(self.plus_rows(), at), P.rows()) and linalg.equal(
            linalg.matmul(self.minus_rows(), at), P.transpose().rows()
        )

    def validate(self, P) -> None:
        if not self.realizes(P):
            raise InvariantViolation("coroot/root pairings do not reproduce P")
        if linalg.rank(linalg.mod_atoms(self.s_rows())) < self.n:
            raise InvariantViolation("the S_i are dependent modulo hbar")

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "root_matrix": linalg.matrix_to_json(self.root_rows()),
            "coroot_plus": linalg.matrix_to_json(self.plus_rows()),
            "coroot_minus": linalg.matrix_to_json(self.minus_rows()),
        }

    @classmethod
    def from_json(cls, data: dict, P=None) -> "Realization":
        try:
            r = cls.make(
                linalg.matrix_from_json(data["root_matrix"]),
                linalg.matrix_from_json(data["coroot_plus"]),
                linalg.matrix_from_json(data["coroot_minus"]),
            )
        except KeyError as exc:
            raise RealizationError(f"missing field {exc}") from exc
        if "rank" in data and int(data["rank"]) != r.rank:
            raise RealizationError("declared rank does not match the matrices")
        if P is not None:
            r.validate(P)
        return r


@dataclass(frozen=True)
class RealizationMorphism:
    """Linear map ``phi`` (target_rank x source_rank, acting on coordinate columns)."""

    source: Realization
    target: Realization
    matrix: tuple
    permutation: tuple

    def image(self, row) -> list:
        return [sum((ExponentPoly.coerce(self.matrix[a][b]) * row[b] for b in range(len(row))), ExponentPoly.const(0))
                for a in range(len(self.matrix))]

    def is_valid(self) -> bool:
        src, tgt = self.source, self.target
        n = src.n
        if tgt.n != n or sorted(self.permutation) != list(range(n)):
            return False
        phi = [[ExponentPoly.coerce(x) for x in row] for row in self.matrix]
        if linalg.shape(phi) != (tgt.rank, src.rank):
            return False
        for i in range(n):
            s = self.permutation[i]
            if self.image(src.coroot_plus[i]) != list(tgt.coroot_plus[s]):
                return False
            if self.image(src.coroot_minus[i]) != list(tgt.coroot_minus[s]):
                return False
            pulled = linalg.matmul([list(tgt.root[s])], phi)[0]
            if pulled != list(src.root[i]):
                return False
        return True


def _flags(R: Realization) -> dict:
    n, t = R.n, R.rank
    roots = linalg.mod_atoms(R.root_rows())
    plus = linalg.mod_atoms(R.plus_rows())
    minus = linalg.mod_atoms(R.minus_rows())
    s_rows = linalg.mod_atoms(R.s_rows())
    coroot_rank = linalg.rank(plus + minus)
    return {
        "straight": linalg.rank(roots) == n,
        "split": coroot_rank == 2 * n,
        "small": coroot_rank == linalg.rank(s_rows),
        "minimal": coroot_rank == t,
    }


def classify(R: Realization) -> set:
    """Set of flags among straight, split, small, minimal."""
    return {k for k, v in _flags(R).items() if v}


def _as_matrix(P) -> MultiparamMatrix:
    return P if isinstance(P, MultiparamMatrix) else MultiparamMatrix.from_rows(P)


def _fresh_completion(rows_mod: list, width: int) -> list:
    """For each row in order, a fresh unit column index if it depends on the earlier rows."""
    aug: list = []
    out = []
    fresh = 0
    for row in rows_mod:
        cand = list(row) + [Fraction(0)] * fresh
        if linalg.rank(aug + [cand]) > len(aug):
            out.append(None)
            aug.append(cand)
        else:
            aug = [r + [Fraction(0)] for r in aug]
            aug.append(cand + [Fraction(1)])
            out.append(fresh)
            fresh += 1
    return out


FLAVORS = ("straight_split", "straight_small", "split_minimal")


def build_realization(P, datum: CartanSuperDatum | None, flavor: str, rank: int) -> Realization:
    """Deterministic constructor of a realization with the requested flags."""
    P = _as_matrix(P)
    n = P.n
    t = rank
    ps_rank = linalg.rank(linalg.mod_atoms(P.symmetric_part.rows()))
    root = [[ExponentPoly.const(int(i == g)) for g in range(t)] for i in range(n)]
    if flavor == "straight_split":
        if t < 3 * n - ps_rank:
            raise RankTooSmall(f"straight split needs rank >= {3 * n - ps_rank}")
        stacked = P.rows() + P.transpose().rows()
        fresh = _fresh_completion(linalg.mod_atoms(stacked), n)
        extra = [[ExponentPoly.const(0)] * (t - n) for _ in range(2 * n)]
        for k, col in enumerate(fresh):
            if col is not None:
                extra[k][col] = ExponentPoly.const(1)
        plus = linalg.hstack(P.rows(), extra[:n])
        minus = linalg.hstack(P.transpose().rows(), extra[n:])
        return Realization.make(root, plus, minus)
    if flavor == "straight_small":
        if t < 2 * n - ps_rank:
            raise RankTooSmall(f"straight small needs rank >= {2 * n - ps_rank}")
        ps = linalg.mod_atoms(P.symmetric_part.rows())
        if not P.symmetric_part.rows() or not linalg.is_constant(P.symmetric_part.rows()):
            raise SmallObstruction("symmetric part must be constant")
        pa = P.antisymmetric_part.rows()
        try:
            # M P_s = P_a, solved through the transposed system
            mt = linalg.solve_constant(linalg.transpose(ps), linalg.transpose(pa))
        except ValueError as exc:
            raise SmallObstruction("rk(P_s | P_a) != rk(P_s)") from exc
        m = linalg.transpose(mt)
        if not linalg.equal(linalg.matmul(m, linalg.as_poly(ps)), pa):
            raise SmallObstruction("rk(P_s | P_a) != rk(P_s)")
        fresh = _fresh_completion(ps, n)
        z = [[ExponentPoly.const(0)] * (t - n) for _ in range(n)]
        for k, col in enumerate(fresh):
            if col is not None:
                z[k][col] = ExponentPoly.const(1)
        mz = linalg.matmul(m, z)
        plus = linalg.hstack(P.rows(), linalg.add(z, mz))
        minus = linalg.hstack(P.transpose().rows(), linalg.sub(z, mz))
        return Realization.make(root, plus, minus)
    if flavor == "split_minimal":
        if t != 2 * n:
            raise RankTooSmall("split minimal realizations here have rank exactly 2n")
        # coroots are the basis; roots solve C^+ A^T = P, C^- A^T = P^T
        plus = [[ExponentPoly.const(int(g == i)) for g in range(t)] for i in range(n)]
        minus = [[ExponentPoly.const(int(g == n + i)) for g in range(t)] for i in range(n)]
        root_t = linalg.vstack(P.rows(), P.transpose().rows())  # t x n
        return Realization.make(linalg.transpose(root_t), plus, minus)
    raise RealizationError(f"unknown flavor {flavor!r}")


def _pad(rows, width: int) -> list:
    return [list(r) + [ExponentPoly.const(0)] * (width - len(r)) for r in rows]


def lift(R: Realization, mode: str) -> tuple:
    """Lift to a split or straight realization of the same matrix.

    ``split``: adjoin fresh coordinates to the dependent coroots; the morphism is
    the projection back onto the original coordinates (an epimorphism).
    ``straight``: adjoin ``n`` coordinates on which the roots become the dual
    basis; the morphism returned is the inclusion of the original space.
    """
    n, t = R.n, R.rank
    if mode == "split":
        stacked = linalg.mod_atoms(R.plus_rows() + R.minus_rows())
        fresh = _fresh_completion(stacked, t)
        m = sum(1 for x in fresh if x is not None)
        extra = [[ExponentPoly.const(0)] * m for _ in range(2 * n)]
        for k, col in enumerate(fresh):
            if col is not None:
                extra[k][col] = ExponentPoly.const(1)
        plus = linalg.hstack(R.plus_rows(), extra[:n])
        minus = linalg.hstack(R.minus_rows(), extra[n:])
        root = _pad(R.root_rows(), t + m)
        lifted = Realization.make(root, plus, minus)
        proj = tuple(tuple(Fraction(int(a == b)) for b in range(t + m)) for a in range(t))
        return lifted, RealizationMorphism(lifted, R, proj, tuple(range(n)))
    if mode == "straight":
        if "straight" in classify(R):
            ident = tuple(tuple(Fraction(int(a == b)) for b in range(t)) for a in range(t))
            return R, RealizationMorphism(R, R, ident, tuple(range(n)))
        root = linalg.hstack(R.root_rows(), [[ExponentPoly.const(int(i == j)) for j in range(n)] for i in range(n)])
        lifted = Realization.make(root, _pad(R.plus_rows(), t + n), _pad(R.minus_rows(), t + n))
        incl = tuple(tuple(Fraction(int(a == b)) for b in range(t)) for a in range(t + n))
        return lifted, RealizationMorphism(R, lifted, incl, tuple(range(n)))
    raise RealizationError(f"unknown lift mode {mode!r}")


def straight_lift_projection(R: Realization) -> RealizationMorphism:
    """The coordinate projection from the straight lift back onto ``R``.

    It does not satisfy the root condition when ``R`` is not straight, so
    :func:`morphism_kernel` rejects it.
    """
    lifted, _ = lift(R, "straight")
    t = R.rank
    proj = tuple(tuple(Fraction(int(a == b)) for b in range(lifted.rank)) for a in range(t))
    return RealizationMorphism(lifted, R, proj, tuple(range(R.n)))


def quotient_by_central(R: Realization, coords) -> tuple:
    """Drop coordinates on which every root and coroot vanishes."""
    coords = sorted(set(coords))
    for g in coords:
        for rows in (R.root_rows(), R.plus_rows(), R.minus_rows()):
            if any(row[g] for row in rows):
                raise RealizationError(f"coordinate {g} is not central")
    keep = [g for g in range(R.rank) if g not in coords]
    sel = lambda rows: [[row[g] for g in keep] for row in rows]  # noqa: E731
    target = Realization.make(sel(R.root_rows()), sel(R.plus_rows()), sel(R.minus_rows()))
    proj = tuple(tuple(Fraction(int(keep[a] == b)) for b in range(R.rank)) for a in range(len(keep)))
    return target, RealizationMorphism(R, target, proj, tuple(range(R.n)))


def morphism_kernel(phi: RealizationMorphism) -> list:
    """Kernel basis of a morphism; every vector is checked to kill all source roots."""
    if not phi.is_valid():
        raise NotAMorphism("structural conditions of a morphism fail")
    mat = [[ExponentPoly.coerce(x) for x in row] for row in phi.matrix]
    if not linalg.is_constant(mat):
        raise NotAMorphism("symbolic morphism matrices are not supported")
    if not mat:
        return [[Fraction(int(i == j)) for i in range(phi.source.rank)] for j in range(phi.source.rank)]
    basis = linalg.nullspace(linalg.constant_matrix(mat))
    for v in basis:
        for row in phi.source.root:
            if sum((x * c for x, c in zip(row, v)), ExponentPoly.const(0)):
                raise NotAMorphism("kernel vector pairs nontrivially with a root")
    return basis


def symmetrized_realization(R: Realization) -> Realization:
    """Realization of P_s with both coroot sets replaced by the S_i."""
    if "straight" not in classify(R):
        raise NotStraight("symmetrization needs a straight realization")
    s = R.s_rows()
    return Realization.make(R.root_rows(), s, s)

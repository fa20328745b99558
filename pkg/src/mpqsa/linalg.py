"""Small exact linear algebra over Fraction and over exponent polynomials.

Coefficient matrices are always rational here; right-hand sides may be
symbolic (entries of :class:`ExponentPoly`), which is all the realization and
deformation solvers need.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .scalars import ExponentPoly, ZERO_EXP

Matrix = list  # list[list[ExponentPoly]]


def ep(x) -> ExponentPoly:
    return ExponentPoly.coerce(x)


def to_poly_matrix(rows) -> Matrix:
    return [[ep(x) for x in row] for row in rows]


def zeros(r: int, c: int) -> Matrix:
    return [[ZERO_EXP] * c for _ in range(r)]


def identity(n: int) -> Matrix:
    return [[ExponentPoly.const(1 if i == j else 0) for j in range(n)] for i in range(n)]


def transpose(m: Matrix) -> Matrix:
    if not m:
        return []
    return [list(col) for col in zip(*m)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    if any(len(row) != inner for row in a):
        raise ValueError("matrix shapes do not align")
    out = []
    for row in a:
        new = []
        for j in range(cols):
            acc = ZERO_EXP
            for k in range(inner):
                x = row[k]
                if x:
                    y = b[k][j]
                    if y:
                        acc = acc + x * y
            new.append(acc)
        out.append(new)
    return out


def add(a: Matrix, b: Matrix) -> Matrix:
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def sub(a: Matrix, b: Matrix) -> Matrix:
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def scale(a: Matrix, c) -> Matrix:
    return [[x * c for x in row] for row in a]


def neg(a: Matrix) -> Matrix:
    return [[-x for x in row] for row in a]


def hstack(a: Matrix, b: Matrix) -> Matrix:
    return [list(ra) + list(rb) for ra, rb in zip(a, b)]


def vstack(a: Matrix, b: Matrix) -> Matrix:
    return [list(r) for r in a] + [list(r) for r in b]


def shape(a: Matrix) -> tuple:
    return (len(a), len(a[0]) if a else 0)


def equal(a: Matrix, b: Matrix) -> bool:
    return shape(a) == shape(b) and all(x == y for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def is_zero(a: Matrix) -> bool:
    return all(not x for row in a for x in row)


def is_antisymmetric(a: Matrix) -> bool:
    n = len(a)
    if any(len(row) != n for row in a):
        return False
    return all(a[i][j] == -a[j][i] for i in range(n) for j in range(n))


def is_constant(a: Matrix) -> bool:
    return all(x.is_constant() for row in a for x in row)


def constant_matrix(a: Matrix) -> list:
    """Rational matrix of a constant exponent-polynomial matrix."""
    return [[x.constant_value() for x in row] for row in a]


def mod_atoms(a: Matrix) -> list:
    """Reduce modulo every non-unit atom: keep the constant part only."""
    return [[x.constant_term() for x in row] for row in a]


def atoms(a: Matrix) -> set:
    out = set()
    for row in a:
        for x in row:
            out |= x.atoms()
    return out


def substitute(a: Matrix, assignment) -> Matrix:
    return [[x.subs(assignment) for x in row] for row in a]


# rational linear algebra


def rref(m: Sequence[Sequence[Fraction]]) -> tuple:
    """Reduced row echelon form; returns (matrix, pivot columns)."""
    a = [[Fraction(x) for x in row] for row in m]
    rows = len(a)
    cols = len(a[0]) if a else 0
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a, pivots


def rank(m) -> int:
    if not m or not m[0]:
        return 0
    return len(rref(m)[1])


def independent_row_indices(m) -> list:
    """Greedy maximal set of independent rows, scanning in order."""
    chosen: list = []
    basis: list = []
    for idx, row in enumerate(m):
        trial = basis + [list(row)]
        if rank(trial) > len(basis):
            basis.append(list(row))
            chosen.append(idx)
    return chosen


def nullspace(m) -> list:
    """Basis of column vectors v with m v = 0."""
    cols = len(m[0]) if m else 0
    if not m:
        return [[Fraction(int(i == j)) for i in range(cols)] for j in range(cols)]
    r, pivots = rref(m)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -r[i][f]
        basis.append(v)
    return basis


def inverse(m) -> list:
    n = len(m)
    aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    r, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in r]


def complete_basis(rows) -> list:
    """Unit vectors (in index order) that complete independent rows to a basis."""
    width = len(rows[0]) if rows else 0
    basis = [list(r) for r in rows]
    extra = []
    for k in range(width):
        e = [Fraction(int(k == j)) for j in range(width)]
        if rank(basis + [e]) > len(basis):
            basis.append(e)
            extra.append(e)
    return extra


def solve_constant(a, b: Matrix) -> Matrix:
    """Solve ``a @ x = b`` with ``a`` rational and ``b`` symbolic.

    Free variables are set to zero.  Raises ``ValueError`` when inconsistent.
    """
    rows = len(a)
    cols = len(a[0]) if a else 0
    aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(rows)] for i, row in enumerate(a)]
    red, pivots = rref([row for row in aug])
    pivots = [p for p in pivots if p < cols]
    transform = [row[cols:] for row in red]
    tb = matmul([[ExponentPoly.const(x) for x in row] for row in transform], b)
    width = len(b[0]) if b else 0
    x = zeros(cols, width)
    for i, p in enumerate(pivots):
        x[p] = tb[i]
    for i in range(len(pivots), rows):
        if any(tb[i]):
            raise ValueError("inconsistent linear system")
    return x


def right_inverse(a) -> list:
    """Rational ``b`` with ``a @ b = I`` for ``a`` of full row rank (leftmost pivots)."""
    n = len(a)
    r, pivots = rref(a)
    if len(pivots) < n:
        raise ValueError("matrix does not have full row rank")
    sol = solve_constant(a, [[ExponentPoly.const(int(i == j)) for j in range(n)] for i in range(n)])
    return constant_matrix(sol)


def as_poly(m) -> Matrix:
    return [[ExponentPoly.const(x) for x in row] for row in m]


def matrix_to_json(m: Matrix) -> list:
    return [[x.to_json() for x in row] for row in m]


def matrix_from_json(data) -> Matrix:
    if not isinstance(data, list) or not all(isinstance(r, list) for r in data):
        raise ValueError("matrix must be a list of rows")
    widths = {len(r) for r in data}
    if len(widths) > 1:
        raise ValueError("ragged matrix rows")
    return [[ExponentPoly.from_json(x) for x in row] for row in data]

"""Exact linear algebra over Q(i) and rank over the rational-function field Q(i)(s).

Matrices are lists of rows.  Elimination is done on sparse dict rows, which
is what keeps the block-Toeplitz systems of the jet complexes cheap.
"""

from __future__ import annotations

from typing import Sequence

from .scalars import ONE, ZERO, GaussianRational, gaussian

__all__ = [
    "EchelonBasis",
    "LinearSolver",
    "rank",
    "nullspace",
    "solve",
    "matvec",
    "poly_trim",
    "poly_mul",
    "poly_sub",
    "poly_divexact",
    "poly_eval",
    "generic_rank",
    "rank_at",
]

Row = dict  # column -> nonzero scalar


def _to_row(vec) -> Row:
    items = vec.items() if isinstance(vec, dict) else enumerate(vec)
    return {c: v if isinstance(v, GaussianRational) else gaussian(v) for c, v in items if v}


def _axpy(target: Row, factor, source: Row) -> None:
    """``target -= factor * source`` in place."""
    for c, v in source.items():
        w = target.get(c)
        if w is None:
            target[c] = -(factor * v)
        else:
            w = w - factor * v
            if w:
                target[c] = w
            else:
                del target[c]


class EchelonBasis:
    """Reduced row-echelon basis of a growing subspace of ``K^n``."""

    def __init__(self, n: int):
        self.n = n
        self._rows: list[Row] = []
        self._pivots: list[int] = []

    @property
    def rank(self) -> int:
        return len(self._rows)

    def _reduce_row(self, row: Row) -> Row:
        for piv, r in zip(self._pivots, self._rows):
            f = row.get(piv)
            if f:
                _axpy(row, f, r)
        return row

    def reduce(self, vec: Sequence) -> list:
        row = self._reduce_row(_to_row(vec))
        return [row.get(c, ZERO) for c in range(self.n)]

    def contains(self, vec: Sequence) -> bool:
        return not self._reduce_row(_to_row(vec))

    def add(self, vec: Sequence) -> bool:
        row = self._reduce_row(_to_row(vec))
        if not row:
            return False
        piv = min(row)
        inv = row[piv].inverse()
        row = {c: v * inv for c, v in row.items()}
        for r in self._rows:
            f = r.get(piv)
            if f:
                _axpy(r, f, row)
        pos = 0
        while pos < len(self._pivots) and self._pivots[pos] < piv:
            pos += 1
        self._rows.insert(pos, row)
        self._pivots.insert(pos, piv)
        return True

    def rows(self) -> list[list]:
        return [[r.get(c, ZERO) for c in range(self.n)] for r in self._rows]

    @property
    def pivots(self) -> list[int]:
        return list(self._pivots)


class LinearSolver:
    """Factor ``A`` once (``L·A = RREF``) and answer ``A x = b`` for many ``b``.

    Solutions are the basic ones: free variables are set to zero, so results
    are deterministic given the column order.  Rows may be dense sequences or
    sparse ``{column: value}`` dicts.
    """

    def __init__(self, matrix: Sequence[Sequence], ncols: int | None = None):
        m = len(matrix)
        self.m = m
        self.n = ncols if ncols is not None else (len(matrix[0]) if m else 0)
        rows = [_to_row(r) for r in matrix]
        ops = [{i: ONE} for i in range(m)]
        pivots: list[int] = []
        r = 0
        for c in range(self.n):
            if r == m:
                break
            p = next((i for i in range(r, m) if c in rows[i]), None)
            if p is None:
                continue
            rows[r], rows[p] = rows[p], rows[r]
            ops[r], ops[p] = ops[p], ops[r]
            inv = rows[r][c].inverse()
            rows[r] = {k: v * inv for k, v in rows[r].items()}
            ops[r] = {k: v * inv for k, v in ops[r].items()}
            for i in range(m):
                if i != r:
                    f = rows[i].get(c)
                    if f:
                        _axpy(rows[i], f, rows[r])
                        _axpy(ops[i], f, ops[r])
            pivots.append(c)
            r += 1
        self.rank = r
        self.pivots = pivots
        self._rref = rows
        self._ops = ops

    def _apply_ops(self, b: Sequence) -> list:
        bvec = _to_row(b)
        out = []
        for op in self._ops:
            acc = ZERO
            for k, v in op.items():
                w = bvec.get(k)
                if w:
                    acc = acc + v * w
            out.append(acc)
        return out

    def solve(self, b: Sequence):
        """Basic solution of ``A x = b`` or ``None`` if inconsistent."""
        y = self._apply_ops(b)
        if any(y[self.rank :]):
            return None
        x = [ZERO] * self.n
        for r, c in enumerate(self.pivots):
            x[c] = y[r]
        return x

    def consistent(self, b: Sequence) -> bool:
        return not any(self._apply_ops(b)[self.rank :])

    def nullspace(self) -> list[list]:
        pivset = set(self.pivots)
        basis = []
        for f in range(self.n):
            if f in pivset:
                continue
            vec = [ZERO] * self.n
            vec[f] = ONE
            for r, c in enumerate(self.pivots):
                v = self._rref[r].get(f)
                if v:
                    vec[c] = -v
            basis.append(vec)
        return basis


def rank(matrix: Sequence[Sequence], ncols: int | None = None) -> int:
    return LinearSolver(matrix, ncols).rank


def nullspace(matrix: Sequence[Sequence], ncols: int | None = None) -> list[list]:
    return LinearSolver(matrix, ncols).nullspace()


def solve(matrix: Sequence[Sequence], b: Sequence, ncols: int | None = None):
    return LinearSolver(matrix, ncols).solve(b)


def matvec(matrix: Sequence[Sequence], vec: Sequence) -> list:
    out = []
    for row in matrix:
        acc = ZERO
        for a, x in zip(row, vec):
            if a and x:
                acc = acc + a * x
        out.append(acc)
    return out


def transpose(matrix: Sequence[Sequence], nrows_if_empty: int = 0) -> list[list]:
    if not matrix:
        return [[] for _ in range(nrows_if_empty)]
    return [list(col) for col in zip(*matrix)]


# univariate polynomials: tuples of coefficients, lowest degree first -------

Poly = tuple


def poly_trim(p: Sequence) -> Poly:
    p = [gaussian(c) for c in p]
    while p and not p[-1]:
        p.pop()
    return tuple(p)


def poly_mul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return ()
    out = [ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = out[i + j] + x * y
    return poly_trim(out)


def poly_sub(a: Poly, b: Poly) -> Poly:
    n = max(len(a), len(b))
    return poly_trim(
        [(a[k] if k < len(a) else ZERO) - (b[k] if k < len(b) else ZERO) for k in range(n)]
    )


def poly_divexact(a: Poly, b: Poly) -> Poly:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    if len(a) < len(b):
        if any(a):
            raise ArithmeticError("inexact polynomial division")
        return ()
    lead_inv = b[-1].inverse()
    q = [ZERO] * (len(a) - len(b) + 1)
    for k in range(len(q) - 1, -1, -1):
        coef = a[k + len(b) - 1] * lead_inv
        q[k] = coef
        if coef:
            for j, y in enumerate(b):
                a[k + j] = a[k + j] - coef * y
    if any(a):
        raise ArithmeticError("inexact polynomial division")
    return poly_trim(q)


def poly_eval(p: Poly, x) -> GaussianRational:
    x = gaussian(x)
    acc = ZERO
    for c in reversed(p):
        acc = acc * x + c
    return acc


def generic_rank(matrix: Sequence[Sequence[Sequence]]) -> int:
    """Rank over ``Q(i)(s)`` of a matrix of polynomials in ``s``.

    Entries are coefficient sequences (lowest degree first).  Bareiss
    fraction-free elimination: every division is exact, so no rational
    functions are ever formed.
    """
    M = [[poly_trim(e) for e in row] for row in matrix]
    m = len(M)
    n = len(M[0]) if m else 0
    prev: Poly = (ONE,)
    r = 0
    for c in range(n):
        if r == m:
            break
        p = next((i for i in range(r, m) if M[i][c]), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        piv = M[r][c]
        for i in range(r + 1, m):
            lead = M[i][c]
            for j in range(c + 1, n):
                num = poly_sub(poly_mul(piv, M[i][j]), poly_mul(lead, M[r][j]))
                M[i][j] = poly_divexact(num, prev)
            M[i][c] = ()
        prev = piv
        r += 1
    return r


def rank_at(matrix: Sequence[Sequence[Sequence]], value) -> int:
    """Rank of the scalar matrix obtained by evaluating each entry at ``s = value``."""
    return rank([[poly_eval(poly_trim(e), value) for e in row] for row in matrix], len(matrix[0]) if matrix else 0)

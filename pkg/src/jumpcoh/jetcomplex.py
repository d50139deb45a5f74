"""Finite complexes of free modules over a one-parameter base, and their obstructions.

A :class:`JetModuleComplex` stores ``d^q : R^{P_q} -> R^{P_{q+1}}`` with
entries polynomial in ``s``, known modulo ``s^{M+1}``.  Tensoring with
``A_n = O/m^n = Q(i)[s]/(s^n)`` gives finite-dimensional complexes whose
differentials are block lower-triangular Toeplitz matrices; everything below
is exact linear algebra on those blocks.

Vectors in ``E^q ⊗ A_n`` are flattened power by power: the coefficient of
``s^0`` (``P_q`` entries), then ``s^1``, and so on.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .cohomology import FiniteCohomology
from .errors import ComplexError, DegreeRangeError, InvalidInputError, NotACocycleError, ParseError
from .expr import parse_jet
from .linalg import EchelonBasis, LinearSolver, generic_rank, matvec, poly_trim, rank, transpose
from .scalars import CURVE, ONE, ZERO, GaussianRational, Jet, gaussian

__all__ = [
    "JetModuleComplex",
    "TruncatedClass",
    "TruncatedCohomology",
    "OracleResult",
    "SecondClassWitness",
    "JumpAccount",
    "truncated_cohomology",
    "obstruction_o",
    "rho",
    "obstruction_oni",
    "is_trivial",
    "extend_oracle",
    "extend_fixing",
    "second_class_detect",
    "second_class_via_rho",
    "reduce_obstruction_order",
    "extendable_subspace",
    "second_class_subspace",
    "jump_accounting",
    "random_complex",
    "parse_complex",
    "render_complex",
]


@dataclass(frozen=True)
class TruncatedClass:
    """Representative of a class in ``H^q(E ⊗ A_n)``: ``coeffs[k]`` is the ``s^k`` part."""

    degree: int
    order: int
    coeffs: tuple[tuple[GaussianRational, ...], ...]

    @classmethod
    def from_vector(cls, degree: int, order: int, flat: Sequence, rank_q: int) -> "TruncatedClass":
        flat = [gaussian(v) for v in flat]
        return cls(degree, order, tuple(tuple(flat[k * rank_q : (k + 1) * rank_q]) for k in range(order)))

    @classmethod
    def fiber(cls, degree: int, vector: Sequence) -> "TruncatedClass":
        return cls(degree, 1, (tuple(gaussian(v) for v in vector),))

    def vector(self) -> list[GaussianRational]:
        return [v for block in self.coeffs for v in block]

    def is_zero_representative(self) -> bool:
        return not any(self.vector())

    def polynomials(self) -> list[Jet]:
        """Entry-wise polynomials in ``s`` (truncated at ``order - 1``)."""
        width = len(self.coeffs[0]) if self.coeffs else 0
        return [
            Jet(CURVE, max(self.order - 1, 0), {(k,): self.coeffs[k][r] for k in range(self.order)})
            for r in range(width)
        ]

    def __str__(self):
        return "[" + ", ".join(str(p) for p in self.polynomials()) + "]"


class JetModuleComplex:
    """``0 -> R^{P_0} -> ... -> R^{P_N} -> 0`` with polynomial differentials mod ``s^{M+1}``."""

    def __init__(self, ranks: Sequence[int], blocks: Sequence[Sequence[Sequence[Sequence]]], truncation: int):
        self.ranks = tuple(int(p) for p in ranks)
        if not self.ranks or any(p < 0 for p in self.ranks):
            raise ComplexError(f"invalid ranks {ranks}")
        self.truncation = int(truncation)
        if self.truncation < 0:
            raise ComplexError("truncation order must be non-negative")
        M = self.truncation
        if len(blocks) != len(self.ranks) - 1:
            raise ComplexError(f"expected {len(self.ranks) - 1} differentials, got {len(blocks)}")
        self._blocks: list[list[list[list[GaussianRational]]]] = []
        for q, per_power in enumerate(blocks):
            rows, cols = self.ranks[q + 1], self.ranks[q]
            mats = []
            for k in range(M + 1):
                mat = per_power[k] if k < len(per_power) else None
                if mat is None:
                    mats.append([[ZERO] * cols for _ in range(rows)])
                    continue
                if len(mat) != rows or any(len(r) != cols for r in mat):
                    raise ComplexError(f"d^{q} coefficient of s^{k} has the wrong shape")
                mats.append([[gaussian(v) for v in r] for r in mat])
            self._blocks.append(mats)
        self._cache: dict = {}
        self._check_square_zero()

    # construction -------------------------------------------------------
    @classmethod
    def from_polynomials(cls, ranks: Sequence[int], differentials: Sequence[Sequence[Sequence]], truncation: int) -> "JetModuleComplex":
        """``differentials[q][r][c]`` is a coefficient sequence or a jet in ``s``."""
        blocks = []
        for q, mat in enumerate(differentials):
            rows, cols = ranks[q + 1], ranks[q]
            per_power = [[[ZERO] * cols for _ in range(rows)] for _ in range(truncation + 1)]
            for r in range(rows):
                for c in range(cols):
                    entry = mat[r][c]
                    coeffs = _coefficients(entry)
                    for k, v in enumerate(coeffs):
                        if k <= truncation and v:
                            per_power[k][r][c] = gaussian(v)
            blocks.append(per_power)
        return cls(ranks, blocks, truncation)

    def _check_square_zero(self) -> None:
        M = self.truncation
        for q in range(self.length - 1):
            a_blocks, b_blocks = self._blocks[q], self._blocks[q + 1]
            for k in range(M + 1):
                total = None
                for a in range(k + 1):
                    prod = _matmul(b_blocks[k - a], a_blocks[a])
                    total = prod if total is None else _matadd(total, prod)
                if total and any(v for row in total for v in row):
                    raise ComplexError(f"d^{q + 1}∘d^{q} has a nonzero s^{k} coefficient")

    # shape --------------------------------------------------------------
    @property
    def length(self) -> int:
        return len(self.ranks) - 1

    def rank_of(self, q: int) -> int:
        return self.ranks[q] if 0 <= q < len(self.ranks) else 0

    def coefficient(self, q: int, k: int) -> list[list[GaussianRational]]:
        """Coefficient of ``s^k`` in ``d^q`` (zero outside the stored range)."""
        rows, cols = self.rank_of(q + 1), self.rank_of(q)
        if 0 <= q < self.length and 0 <= k <= self.truncation:
            return self._blocks[q][k]
        return [[ZERO] * cols for _ in range(rows)]

    def polynomial_matrix(self, q: int) -> list[list[tuple]]:
        rows, cols = self.rank_of(q + 1), self.rank_of(q)
        return [
            [poly_trim([self.coefficient(q, k)[r][c] for k in range(self.truncation + 1)]) for c in range(cols)]
            for r in range(rows)
        ]

    def toeplitz(self, q: int, n: int) -> list[list[GaussianRational]]:
        """Matrix of ``d^q ⊗ A_n`` (``n·P_{q+1} × n·P_q``)."""
        key = ("T", q, n)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        if n - 1 > self.truncation:
            raise DegreeRangeError(f"order {n} needs coefficients beyond s^{self.truncation}")
        rows, cols = self.rank_of(q + 1), self.rank_of(q)
        mat = [[ZERO] * (n * cols) for _ in range(n * rows)]
        for a in range(n):  # output power
            for b in range(a + 1):  # input power
                blk = self.coefficient(q, a - b)
                for r in range(rows):
                    src = blk[r]
                    dst = mat[a * rows + r]
                    for c in range(cols):
                        if src[c]:
                            dst[b * cols + c] = src[c]
        self._cache[key] = mat
        return mat

    def top_coefficient_map(self, q: int, n: int) -> list[list[GaussianRational]]:
        """``α ↦`` coefficient of ``s^n`` in ``d^q(α)`` for ``α`` of degree < ``n`` in ``s``."""
        if n > self.truncation:
            raise DegreeRangeError(f"coefficient s^{n} is beyond the truncation s^{self.truncation}")
        rows, cols = self.rank_of(q + 1), self.rank_of(q)
        mat = [[ZERO] * (n * cols) for _ in range(rows)]
        for b in range(n):
            blk = self.coefficient(q, n - b)
            for r in range(rows):
                for c in range(cols):
                    if blk[r][c]:
                        mat[r][b * cols + c] = blk[r][c]
        return mat

    def apply(self, q: int, cls: TruncatedClass, upto: int) -> list[list[GaussianRational]]:
        """Coefficients ``s^0..s^upto`` of ``d^q`` applied to a representative."""
        out = []
        for a in range(upto + 1):
            acc = [ZERO] * self.rank_of(q + 1)
            for b in range(min(a, cls.order - 1) + 1):
                blk = self.coefficient(q, a - b)
                vec = cls.coeffs[b]
                for r, v in enumerate(matvec(blk, vec)):
                    if v:
                        acc[r] = acc[r] + v
            out.append(acc)
        return out

    def image_basis(self, q: int, n: int) -> EchelonBasis:
        """Echelon basis of ``im(d^{q-1} ⊗ A_n)`` inside ``E^q ⊗ A_n``."""
        key = ("im", q, n)
        cached = self._cache.get(key)
        if cached is None:
            cached = EchelonBasis(n * self.rank_of(q))
            if q - 1 >= 0 and self.rank_of(q - 1):
                for col in transpose(self.toeplitz(q - 1, n)):
                    cached.add(col)
            self._cache[key] = cached
        return cached

    def fiber_cohomology(self, q: int) -> FiniteCohomology:
        key = ("H0", q)
        cached = self._cache.get(key)
        if cached is None:
            cached = _truncated_linear(self, q, 1)
            self._cache[key] = cached
        return cached

    def fiber_coordinates(self, q: int, vector: Sequence) -> list[GaussianRational]:
        return self.fiber_cohomology(q).reduce(list(vector))[0]

    def generic_h(self, q: int) -> int:
        """Dimension of ``H^q`` over the rational-function field (nearby fibres)."""
        out = generic_rank(self.polynomial_matrix(q)) if q < self.length and self.rank_of(q + 1) and self.rank_of(q) else 0
        inc = generic_rank(self.polynomial_matrix(q - 1)) if q >= 1 and self.rank_of(q - 1) and self.rank_of(q) else 0
        return self.rank_of(q) - out - inc

    def fiber_h(self, q: int) -> int:
        return self.fiber_cohomology(q).dimension

    def __repr__(self):
        return f"JetModuleComplex(ranks={self.ranks}, truncation={self.truncation})"


def _coefficients(entry) -> list:
    if isinstance(entry, Jet):
        if entry.params.count != 1:
            raise ComplexError("complex entries must be jets in one parameter")
        return [entry.coefficient((k,)) for k in range(entry.order + 1)]
    if isinstance(entry, (list, tuple)):
        return list(entry)
    return [entry]


def _matmul(a, b):
    if not a or not b or not b[0]:
        return [[ZERO] * (len(b[0]) if b else 0) for _ in a]
    bt = transpose(b)
    return [[sum((x * y for x, y in zip(row, col) if x and y), ZERO) for col in bt] for row in a]


def _matadd(a, b):
    return [[x + y for x, y in zip(r1, r2)] for r1, r2 in zip(a, b)]


def _truncated_linear(C: JetModuleComplex, q: int, n: int) -> FiniteCohomology:
    dim = n * C.rank_of(q)
    incoming = C.toeplitz(q - 1, n) if q >= 1 and C.rank_of(q - 1) and dim else None
    outgoing = C.toeplitz(q, n) if q < C.length and C.rank_of(q + 1) and dim else None
    return FiniteCohomology(dim, incoming, outgoing)


def _check_degree(C: JetModuleComplex, q: int) -> None:
    if q < 0 or q > C.length:
        raise DegreeRangeError(f"degree {q} outside 0..{C.length}")


@dataclass
class TruncatedCohomology:
    degree: int
    order: int
    dimension: int
    classes: list[TruncatedClass]
    minimal_generators: int


def truncated_cohomology(C: JetModuleComplex, q: int, n: int) -> TruncatedCohomology:
    """``H^q(E ⊗ O/m^n)`` as a Q(i)-vector space, with its number of ``A_n``-generators."""
    _check_degree(C, q)
    if n < 1 or n > C.truncation + 1:
        raise DegreeRangeError(f"order {n} outside 1..{C.truncation + 1}")
    lin = _truncated_linear(C, q, n)
    P = C.rank_of(q)
    classes = [TruncatedClass.from_vector(q, n, v, P) for v in lin.representatives]
    # dim H/sH = dim Z - dim(sZ + B)
    span = EchelonBasis(n * P)
    for row in lin.image.rows():
        span.add(row)
    for z in lin.kernel:
        span.add([ZERO] * P + list(z[: (n - 1) * P]))
    return TruncatedCohomology(q, n, lin.dimension, classes, len(lin.kernel) - span.rank)


def _as_class(C: JetModuleComplex, q: int, value, order: int | None = None) -> TruncatedClass:
    if isinstance(value, TruncatedClass):
        return value
    vec = [gaussian(v) for v in value]
    P = C.rank_of(q)
    if order is None:
        order = len(vec) // P if P else 1
    return TruncatedClass.from_vector(q, order, vec, P)


def is_trivial(C: JetModuleComplex, cls: TruncatedClass) -> bool:
    """Whether the representative is a coboundary in ``E^q ⊗ A_n``."""
    return C.image_basis(cls.degree, cls.order).contains(cls.vector())


def _require_cocycle(C: JetModuleComplex, cls: TruncatedClass) -> None:
    if cls.degree < C.length and C.rank_of(cls.degree + 1):
        image = matvec(C.toeplitz(cls.degree, cls.order), cls.vector())
        if any(image):
            raise NotACocycleError(f"representative is not a cocycle modulo s^{cls.order}", image)


def obstruction_o(C: JetModuleComplex, q: int, n: int, alpha) -> TruncatedClass:
    """``o^q_n``: the ``s^n`` coefficient of ``d^q(α_{n-1})``, a class in ``H^{q+1}(E_0)``."""
    _check_degree(C, q)
    alpha = _as_class(C, q, alpha, n)
    if alpha.order != n:
        raise InvalidInputError(f"class has order {alpha.order}, expected {n}")
    _require_cocycle(C, alpha)
    if q >= C.length:
        return TruncatedClass.fiber(q + 1, [])
    top = matvec(C.top_coefficient_map(q, n), alpha.vector())
    return TruncatedClass.fiber(q + 1, top)


def rho(C: JetModuleComplex, q: int, i: int, sigma) -> TruncatedClass:
    """``ρ^q_i``: the class of ``s^i σ`` in ``H^q(E ⊗ A_{i+1})``."""
    if i < 0:
        raise DegreeRangeError("ρ needs i >= 0")
    sigma = _as_class(C, q, sigma, 1)
    zero = tuple(ZERO for _ in range(C.rank_of(q)))
    return TruncatedClass(q, i + 1, (zero,) * i + (sigma.coeffs[0],))


def obstruction_oni(C: JetModuleComplex, q: int, n: int, i: int, alpha) -> TruncatedClass:
    """``o^q_{n,i} = ρ^{q+1}_i ∘ o^q_n``."""
    if i > n:
        raise DegreeRangeError(f"o_(n,i) needs i <= n (got n={n}, i={i})")
    return rho(C, q + 1, i, obstruction_o(C, q, n, alpha))


@dataclass
class OracleResult:
    """Outcome of the brute-force extension search."""

    achieved: int
    extension: TruncatedClass
    failed_at: int | None
    obstruction: TruncatedClass | None

    @property
    def obstructed(self) -> bool:
        return self.failed_at is not None


def _solve_extension(C: JetModuleComplex, q: int, known: TruncatedClass, free_from: int, target_order: int):
    """Find ``x_j`` (``free_from <= j < target_order``) so that ``known`` with those
    powers replaced/added is a cocycle mod ``s^{target_order}``."""
    P = C.rank_of(q)
    fixed = [list(known.coeffs[j]) if j < known.order and j < free_from else [ZERO] * P for j in range(target_order)]
    if q >= C.length or not C.rank_of(q + 1):
        coeffs = tuple(tuple(v) for v in fixed)
        return TruncatedClass(q, target_order, coeffs)
    T = C.toeplitz(q, target_order)
    fixed_flat = [v for block in fixed for v in block]
    rhs = [-v for v in matvec(T, fixed_flat)]
    cols = list(range(free_from * P, target_order * P))
    key = ("ext", q, target_order, free_from)
    solver = C._cache.get(key)
    if solver is None:
        sub = [[row[c] for c in cols] for row in T]
        solver = LinearSolver(sub, len(cols))
        C._cache[key] = solver
    x = solver.solve(rhs)
    if x is None:
        return None
    flat = list(fixed_flat)
    for c, v in zip(cols, x):
        flat[c] = v
    return TruncatedClass.from_vector(q, target_order, flat, P)


def extend_oracle(C: JetModuleComplex, q: int, alpha, max_order: int) -> OracleResult:
    """Largest ``k <= max_order`` such that ``α + s x_1 + ... + s^k x_k`` is a cocycle mod ``s^{k+1}``.

    Each order is one linear system in all of ``x_1..x_k`` at once, so a bad
    early choice can never hide an extension.
    """
    _check_degree(C, q)
    if max_order > C.truncation:
        raise DegreeRangeError(f"max order {max_order} exceeds truncation {C.truncation}")
    base = _as_class(C, q, alpha, 1)
    _require_cocycle(C, base)
    current = base
    for k in range(1, max_order + 1):
        nxt = _solve_extension(C, q, base, 1, k + 1)
        if nxt is None:
            return OracleResult(k - 1, current, k, obstruction_o(C, q, k, current))
        current = nxt
    return OracleResult(max_order, current, None, None)


def extend_fixing(C: JetModuleComplex, q: int, alpha_prev: TruncatedClass, i: int):
    """Brute force for the order-``n`` step: ``α_n`` with ``α_n − α_{n−1} ∈ s^i E``.

    ``alpha_prev`` has order ``n`` (an ``(n−1)``-th order extension).  Returns
    ``α_n`` (order ``n+1``) or ``None``.
    """
    n = alpha_prev.order
    if not 0 < i <= n:
        raise DegreeRangeError(f"need 0 < i <= n, got i={i}, n={n}")
    return _solve_extension(C, q, alpha_prev, i, n + 1)


@dataclass
class SecondClassWitness:
    order: int
    alpha: TruncatedClass
    correction: list[GaussianRational]


def second_class_detect(C: JetModuleComplex, q1: int, beta, max_order: int) -> SecondClassWitness | None:
    """Smallest ``n`` and ``α_{n−1} ∈ H^{q1−1}(E ⊗ A_n)`` with ``o_n(α_{n−1}) = [β]``."""
    _check_degree(C, q1)
    beta_vec = list(_as_class(C, q1, beta, 1).coeffs[0])
    fib = C.fiber_cohomology(q1)
    if not fib.is_cocycle(beta_vec):
        raise NotACocycleError("β is not a fibre cocycle")
    if fib.is_coboundary(beta_vec):
        raise InvalidInputError("β is trivial in the fibre cohomology")
    q = q1 - 1
    if q < 0 or not C.rank_of(q):
        return None
    P, Pn = C.rank_of(q), C.rank_of(q1)
    for n in range(1, min(max_order, C.truncation) + 1):
        T = C.toeplitz(q, n)
        top = C.top_coefficient_map(q, n)
        d0 = C.coefficient(q, 0)
        ncols = n * P + P
        rows = [list(r) + [ZERO] * P for r in T]
        rows += [list(top[r]) + [-v for v in d0[r]] for r in range(Pn)]
        rhs = [ZERO] * (n * Pn) + beta_vec
        x = LinearSolver(rows, ncols).solve(rhs)
        if x is not None:
            alpha = TruncatedClass.from_vector(q, n, x[: n * P], P)
            return SecondClassWitness(n, alpha, x[n * P :])
    return None


def _solve_oni_equals_rho(C: JetModuleComplex, q: int, n: int, beta_vec: list):
    """``α`` (order ``n``, degree ``q``) with ``o^q_{n,n−1}(α) = ρ^{q+1}_{n−1}(β)``."""
    P, Pn = C.rank_of(q), C.rank_of(q + 1)
    T = C.toeplitz(q, n)
    top = C.top_coefficient_map(q, n)
    # unknowns: α (n·P) then γ (n·P);  T α = 0  and  s^{n-1}(top α − β) = T γ
    ncols = 2 * n * P
    rows = [list(r) + [ZERO] * (n * P) for r in T]
    rhs = [ZERO] * (n * Pn)
    for a in range(n):
        for r in range(Pn):
            left = list(top[r]) if a == n - 1 else [ZERO] * (n * P)
            rows.append(left + [-v for v in T[a * Pn + r]])
            rhs.append(beta_vec[r] if a == n - 1 else ZERO)
    x = LinearSolver(rows, ncols).solve(rhs)
    if x is None:
        return None
    return TruncatedClass.from_vector(q, n, x[: n * P], P)


def second_class_via_rho(C: JetModuleComplex, q1: int, beta, max_order: int):
    """Second-class test through ``o_{n,n−1}(α) = ρ_{n−1}(β)``; returns ``(n, α)`` or ``None``."""
    beta_vec = list(_as_class(C, q1, beta, 1).coeffs[0])
    q = q1 - 1
    if q < 0 or not C.rank_of(q):
        return None
    for n in range(1, min(max_order, C.truncation) + 1):
        alpha = _solve_oni_equals_rho(C, q, n, beta_vec)
        if alpha is not None:
            return n, alpha
    return None


def reduce_obstruction_order(C: JetModuleComplex, q: int, n: int, alpha):
    """For ``o^q_n(α) ≠ 0`` find ``n' <= n`` and ``α'`` with
    ``ρ_{n'−1}(o^q_n(α)) = o^q_{n',n'−1}(α') ≠ 0``."""
    beta = obstruction_o(C, q, n, alpha)
    beta_vec = list(beta.coeffs[0])
    for n2 in range(1, n + 1):
        if is_trivial(C, rho(C, q + 1, n2 - 1, beta)):
            continue
        alpha2 = _solve_oni_equals_rho(C, q, n2, beta_vec)
        if alpha2 is not None:
            return n2, alpha2
    return None


def _coordinate_span(C: JetModuleComplex, q: int, vectors) -> EchelonBasis:
    h = C.fiber_h(q)
    span = EchelonBasis(h)
    for v in vectors:
        span.add(C.fiber_coordinates(q, v))
    return span


def extendable_subspace(C: JetModuleComplex, q: int, order: int) -> EchelonBasis:
    """Fibre classes (coordinates in ``H^q(E_0)``) that extend to order ``order``."""
    P = C.rank_of(q)
    if q >= C.length or not C.rank_of(q + 1):
        return _coordinate_span(C, q, C.fiber_cohomology(q).kernel)
    kernel = LinearSolver(C.toeplitz(q, order + 1), (order + 1) * P).nullspace()
    return _coordinate_span(C, q, [v[:P] for v in kernel])


def second_class_subspace(C: JetModuleComplex, q: int, order: int) -> EchelonBasis:
    """Image of ``o^{q−1}_n`` in ``H^q(E_0)`` (coordinates); nested increasing in ``n``."""
    if q < 1 or not C.rank_of(q - 1):
        return EchelonBasis(C.fiber_h(q))
    P = C.rank_of(q - 1)
    top = C.top_coefficient_map(q - 1, order)
    if q - 1 < C.length and C.rank_of(q):
        kernel = LinearSolver(C.toeplitz(q - 1, order), order * P).nullspace()
    else:
        kernel = [[ONE if j == k else ZERO for j in range(order * P)] for k in range(order * P)]
    return _coordinate_span(C, q, [matvec(top, v) for v in kernel])


@dataclass
class JumpAccount:
    degree: int
    h_fiber: int
    h_generic: int
    first_class_dim: int
    second_class_dim: int
    extendable: EchelonBasis
    second_class: EchelonBasis
    stable: bool

    @property
    def jump(self) -> int:
        return self.h_fiber - self.h_generic

    @property
    def balanced(self) -> bool:
        return self.jump == self.first_class_dim + self.second_class_dim


def stabilized(C: JetModuleComplex, q: int) -> bool:
    """All Smith valuations of ``d^q`` are below ``M``: rank T_M − rank T_{M−1} equals the generic rank."""
    M = C.truncation
    if q >= C.length or not C.rank_of(q) or not C.rank_of(q + 1) or M < 1:
        return True
    counted = rank(C.toeplitz(q, M), M * C.rank_of(q)) - rank(C.toeplitz(q, M - 1), (M - 1) * C.rank_of(q))
    return counted == generic_rank(C.polynomial_matrix(q))


def jump_accounting(C: JetModuleComplex, q: int, max_order: int | None = None) -> JumpAccount:
    """Compare ``h^q(0) − h^q(generic)`` with first- plus second-class dimensions."""
    _check_degree(C, q)
    top = C.truncation if max_order is None else max_order
    if top < 2 or top > C.truncation:
        raise DegreeRangeError(f"max order must be in 2..{C.truncation}")
    ext_hi = extendable_subspace(C, q, top)
    ext_lo = extendable_subspace(C, q, top - 1)
    sec_hi = second_class_subspace(C, q, top)
    sec_lo = second_class_subspace(C, q, top - 1)
    stable = ext_hi.rank == ext_lo.rank and sec_hi.rank == sec_lo.rank
    h0 = C.fiber_h(q)
    return JumpAccount(
        degree=q,
        h_fiber=h0,
        h_generic=C.generic_h(q),
        first_class_dim=h0 - ext_hi.rank,
        second_class_dim=sec_hi.rank,
        extendable=ext_hi,
        second_class=sec_hi,
        stable=stable,
    )


# random corpus ---------------------------------------------------------

def _random_scalar(rng: random.Random, lo: int = -2, hi: int = 2, gaussian_prob: float = 0.1) -> GaussianRational:
    re = rng.randint(lo, hi)
    im = rng.randint(lo, hi) if rng.random() < gaussian_prob else 0
    return GaussianRational(re, im)


def _random_invertible(rng: random.Random, n: int):
    while True:
        mat = [[_random_scalar(rng, -1, 1) for _ in range(n)] for _ in range(n)]
        for k in range(n):
            mat[k][k] = mat[k][k] + 1
        solver = LinearSolver(mat, n)
        if solver.rank == n:
            inv_cols = [solver.solve([ONE if r == k else ZERO for r in range(n)]) for k in range(n)]
            return mat, transpose(inv_cols)


def _poly_matmul(a, b):
    """Product of matrices whose entries are coefficient lists."""
    rows, inner = len(a), len(b)
    cols = len(b[0]) if b else 0
    out = [[[] for _ in range(cols)] for _ in range(rows)]
    for r in range(rows):
        for c in range(cols):
            acc: list = []
            for k in range(inner):
                x, y = a[r][k], b[k][c]
                if not x or not y:
                    continue
                for i, u in enumerate(x):
                    for j, v in enumerate(y):
                        while len(acc) <= i + j:
                            acc.append(ZERO)
                        acc[i + j] = acc[i + j] + u * v
            out[r][c] = acc
    return out


def random_complex(rng: random.Random, max_rank: int = 4, max_length: int = 3, max_entry_degree: int = 2, truncation: int = 5) -> JetModuleComplex:
    """A random complex with d∘d = 0 exactly and Smith valuations below the truncation.

    Length-1 complexes are arbitrary polynomial matrices (retried until their
    valuations are visible below ``truncation``); longer ones are
    elementary ``unit·s^k`` pieces conjugated by constant invertible matrices.
    """
    length = rng.randint(1, max_length)
    ranks = [rng.randint(1, max_rank) for _ in range(length + 1)]
    if length == 1 and rng.random() < 0.5:
        while True:
            mat = []
            for _ in range(ranks[1]):
                row = []
                for _ in range(ranks[0]):
                    if rng.random() < 0.35:
                        row.append([])
                    else:
                        row.append([_random_scalar(rng) for _ in range(max_entry_degree + 1)])
                mat.append(row)
            C = JetModuleComplex.from_polynomials(ranks, [mat], truncation)
            if stabilized(C, 0):
                return C
    free = [list(range(p)) for p in ranks]
    for f in free:
        rng.shuffle(f)
    diag = []
    for q in range(length):
        rows, cols = ranks[q + 1], ranks[q]
        mat = [[[] for _ in range(cols)] for _ in range(rows)]
        pieces = rng.randint(0, min(len(free[q]), len(free[q + 1])))
        for _ in range(pieces):
            src, tgt = free[q].pop(), free[q + 1].pop()
            k = rng.randint(0, min(2, max_entry_degree))
            c = _random_scalar(rng, 1, 2)
            if k == 0:
                entry = [c, _random_scalar(rng), _random_scalar(rng)][: max_entry_degree + 1]
            elif k == 1:
                entry = [ZERO, c, _random_scalar(rng)][: max_entry_degree + 1]
            else:
                entry = [ZERO, ZERO, c]
            mat[tgt][src] = entry
        diag.append(mat)
    changes = [_random_invertible(rng, p) for p in ranks]
    diffs = []
    for q in range(length):
        g_next = [[[v] if v else [] for v in row] for row in changes[q + 1][0]]
        g_inv = [[[v] if v else [] for v in row] for row in changes[q][1]]
        diffs.append(_poly_matmul(_poly_matmul(g_next, diag[q]), g_inv))
    return JetModuleComplex.from_polynomials(ranks, diffs, truncation)


# file format -----------------------------------------------------------

def parse_complex(text: str, truncation: int | None = None) -> JetModuleComplex:
    """Parse ``ranks P0 .. PN`` / ``truncation M`` / ``d q r c : <poly in s>`` lines (1-based r, c)."""
    ranks = None
    M = truncation
    entries: list[tuple[int, int, int, str, int]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        if head == "ranks":
            if ranks is not None:
                raise ParseError("duplicate ranks line", lineno)
            try:
                ranks = [int(x) for x in rest]
            except ValueError:
                raise ParseError("ranks must be integers", lineno) from None
        elif head == "truncation":
            if truncation is None:
                try:
                    M = int(rest[0])
                except (ValueError, IndexError):
                    raise ParseError("truncation needs one integer", lineno) from None
        elif head == "d":
            body = line[1:]
            if ":" not in body:
                raise ParseError("expected 'd q r c : <polynomial>'", lineno)
            idx, poly = body.split(":", 1)
            try:
                q, r, c = (int(x) for x in idx.split())
            except ValueError:
                raise ParseError("expected three integer indices", lineno) from None
            entries.append((q, r, c, poly.strip(), lineno))
        else:
            raise ParseError(f"unknown directive {head!r}", lineno)
    if ranks is None:
        raise ParseError("missing ranks line")
    if M is None:
        M = 5
    mats = [[[[] for _ in range(ranks[q])] for _ in range(ranks[q + 1])] for q in range(len(ranks) - 1)]
    for q, r, c, poly, lineno in entries:
        if not (0 <= q < len(ranks) - 1 and 1 <= r <= ranks[q + 1] and 1 <= c <= ranks[q]):
            raise ParseError(f"entry d {q} {r} {c} is out of range", lineno)
        jet = parse_jet(poly, CURVE, max(M, 0) + 64)
        if jet.degree() > M:
            raise ParseError(f"entry has degree {jet.degree()} above truncation {M}", lineno)
        mats[q][r - 1][c - 1] = [jet.coefficient((k,)) for k in range(M + 1)]
    return JetModuleComplex.from_polynomials(ranks, mats, M)


def render_complex(C: JetModuleComplex) -> str:
    lines = ["ranks " + " ".join(str(p) for p in C.ranks), f"truncation {C.truncation}"]
    for q in range(C.length):
        for r, row in enumerate(C.polynomial_matrix(q), 1):
            for c, poly in enumerate(row, 1):
                if poly:
                    jet = Jet(CURVE, C.truncation, {(k,): v for k, v in enumerate(poly)})
                    lines.append(f"d {q} {r} {c} : {jet}")
    return "\n".join(lines) + "\n"

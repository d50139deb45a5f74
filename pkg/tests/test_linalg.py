import random
from itertools import product

from hypothesis import given, settings
from hypothesis import strategies as st

from jumpcoh.linalg import EchelonBasis, LinearSolver, generic_rank, matvec, nullspace, rank, rank_at
from jumpcoh.scalars import GaussianRational, ZERO

from conftest import gaussians


@st.composite
def matrices(draw, max_rows=5, max_cols=5):
    m = draw(st.integers(1, max_rows))
    n = draw(st.integers(1, max_cols))
    sparse = draw(st.booleans())
    rows = []
    for _ in range(m):
        rows.append([draw(gaussians()) if not sparse or draw(st.booleans()) else ZERO for _ in range(n)])
    return rows


def _det(mat):
    """Leibniz-formula determinant: an oracle independent of elimination."""
    from itertools import permutations

    n = len(mat)
    total = ZERO
    for perm in permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        term = GaussianRational(sign)
        for i, j in enumerate(perm):
            term = term * mat[i][j]
        total = total + term
    return total


def _rank_by_minors(mat):
    from itertools import combinations

    m, n = len(mat), len(mat[0])
    for k in range(min(m, n), 0, -1):
        for rows in combinations(range(m), k):
            for cols in combinations(range(n), k):
                if _det([[mat[r][c] for c in cols] for r in rows]):
                    return k
    return 0


@settings(max_examples=120)
@given(matrices(4, 4))
def test_rank_matches_minor_oracle(mat):
    assert rank(mat) == _rank_by_minors(mat)


@settings(max_examples=120)
@given(matrices())
def test_nullspace_and_solve(mat):
    n = len(mat[0])
    kernel = nullspace(mat)
    assert len(kernel) == n - rank(mat)
    for v in kernel:
        assert not any(matvec(mat, v))
    x = [GaussianRational(k + 1, k) for k in range(n)]
    b = matvec(mat, x)
    sol = LinearSolver(mat).solve(b)
    assert sol is not None and matvec(mat, sol) == b


def test_inconsistent_system():
    assert LinearSolver([[1, 1], [2, 2]]).solve([1, 3]) is None


def test_echelon_basis():
    e = EchelonBasis(3)
    assert e.add([1, 2, 3]) and e.add([0, 1, 1]) and not e.add([1, 3, 4])
    assert e.contains([2, 5, 7]) and not e.contains([0, 0, 1])


def test_generic_rank_examples():
    assert generic_rank([[(0, 1)]]) == 1
    assert rank_at([[(0, 1)]], 0) == 0
    assert generic_rank([[(), ()], [(), ()]]) == 0
    # rank of [[s, s^2],[1, s]] is 1 everywhere
    assert generic_rank([[(0, 1), (0, 0, 1)], [(1,), (0, 1)]]) == 1


def test_generic_rank_against_random_evaluation():
    rng = random.Random(7)
    for _ in range(150):
        m, n = rng.randint(1, 4), rng.randint(1, 4)
        mat = [[tuple(GaussianRational(rng.randint(-2, 2)) for _ in range(rng.randint(0, 3))) for _ in range(n)] for _ in range(m)]
        sampled = max(rank_at(mat, GaussianRational(p, q)) for p, q in product(range(-3, 4), range(0, 2)))
        assert generic_rank(mat) == sampled
        assert generic_rank(mat) >= rank_at(mat, 0)

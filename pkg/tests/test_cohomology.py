from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jumpcoh.cohomology import complex_cohomology, reduce_class
from jumpcoh.errors import NotACocycleError
from jumpcoh.forms import LieModel, TVForm, dbar
from jumpcoh.linalg import rank

from conftest import gaussians

IWASAWA = LieModel.from_triples(3, [(1, 2, 3, 1)], "iwasawa")
FILIFORM = LieModel.from_triples(4, [(1, 2, 3, 1), (1, 3, 4, 1)], "filiform4")


def test_iwasawa_dimensions_and_h1_span():
    spaces = complex_cohomology(IWASAWA)
    assert [s.dimension for s in spaces] == [3, 6, 6, 3]
    g = IWASAWA.generator
    expected = [g(i, (lam,)) for i in (1, 2, 3) for lam in (1, 2)]
    assert spaces[1].representatives == expected


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_abelian_dimensions(n):
    spaces = complex_cohomology(LieModel.abelian(n))
    assert [s.dimension for s in spaces] == [n * comb(n, q) for q in range(n + 1)]


@pytest.mark.parametrize("model", [IWASAWA, FILIFORM], ids=lambda m: m.name)
def test_dimensions_from_ranks_and_euler_characteristic(model):
    spaces = complex_cohomology(model)
    sizes = [len(model.basis(q)) for q in range(model.dim + 1)]
    ranks = [rank(model.dbar_matrix(q), sizes[q]) if sizes[q + 1] else 0 for q in range(model.dim)] + [0]
    for q, s in enumerate(spaces):
        assert s.dimension == sizes[q] - ranks[q] - (ranks[q - 1] if q else 0)
    assert sum((-1) ** q * s.dimension for q, s in enumerate(spaces)) == sum((-1) ** q * p for q, p in enumerate(sizes))


def test_reduce_examples():
    spaces = complex_cohomology(IWASAWA)
    g = IWASAWA.generator
    coords, witness = reduce_class(spaces[1], spaces[1].representatives[2])
    assert [c.constant_term() for c in coords] == [0, 0, 1, 0, 0, 0] and not witness
    coords, witness = reduce_class(spaces[2], dbar(g(3, (3,))))
    assert not any(coords) and witness == g(3, (3,))
    coords, _ = reduce_class(spaces[1], g(3, (1,)))
    assert any(coords)


def test_reduce_rejects_non_cocycles():
    spaces = complex_cohomology(IWASAWA)
    with pytest.raises(NotACocycleError) as info:
        reduce_class(spaces[1], IWASAWA.generator(3, (3,)))
    assert info.value.defect == -IWASAWA.generator(3, (1, 2))


@st.composite
def cocycles(draw):
    model = draw(st.sampled_from([IWASAWA, FILIFORM]))
    q = draw(st.integers(0, model.dim))
    space = complex_cohomology(model)[q]
    coords = [draw(gaussians()) for _ in range(space.dimension)]
    form = TVForm.zero(model, q)
    for c, rep in zip(coords, space.representatives):
        form = form + rep.scale(c)
    if q:
        basis = model.basis(q - 1)
        prim = TVForm(model, q - 1, {basis[draw(st.integers(0, len(basis) - 1))]: draw(gaussians()) for _ in range(2)})
        form = form + dbar(prim)
    return space, coords, form


@settings(max_examples=100)
@given(cocycles())
def test_reduce_reconstructs_random_cocycles(data):
    space, coords, form = data
    got, witness = reduce_class(space, form)
    assert [c.constant_term() for c in got] == coords
    assert space.combination(got) + dbar(witness) == form

import random

import pytest

from jumpcoh.errors import ComplexError, DegreeRangeError, InvalidInputError, NotACocycleError, ParseError
from jumpcoh.jetcomplex import (
    TruncatedClass,
    extend_oracle,
    is_trivial,
    jump_accounting,
    obstruction_o,
    obstruction_oni,
    parse_complex,
    random_complex,
    render_complex,
    rho,
    second_class_detect,
    truncated_cohomology,
)
from jumpcoh.linalg import matvec

from corpus import check_accounting, check_second_class, check_extension_criterion, check_order_reduction, corpus

S = parse_complex("ranks 1 1\nd 0 1 1 : s\n")
S2 = parse_complex("ranks 1 1\nd 0 1 1 : s^2\n")
ZERO_D = parse_complex("ranks 2 3\n")


def test_truncated_cohomology_examples():
    assert truncated_cohomology(S, 0, 1).dimension == 1
    assert truncated_cohomology(S, 1, 1).dimension == 1
    for n in range(1, 4):
        assert truncated_cohomology(ZERO_D, 0, n).dimension == 2 * n
        assert truncated_cohomology(ZERO_D, 1, n).dimension == 3 * n
    # H^1(A_3) for d = s^2 is A_3/(s^2): two-dimensional, one generator
    res = truncated_cohomology(S2, 1, 3)
    assert (res.dimension, res.minimal_generators) == (2, 1)
    with pytest.raises(DegreeRangeError):
        truncated_cohomology(S, 2, 1)
    with pytest.raises(DegreeRangeError):
        truncated_cohomology(S, 0, 7)


def test_obstruction_examples():
    one = TruncatedClass.fiber(0, [1])
    assert not is_trivial(S, obstruction_o(S, 0, 1, one))
    assert is_trivial(S2, obstruction_o(S2, 0, 1, one))
    assert is_trivial(S, obstruction_o(S, 0, 1, TruncatedClass.fiber(0, [0])))
    with pytest.raises(NotACocycleError):
        obstruction_o(S, 0, 2, TruncatedClass(0, 2, ((1,), (0,))))


def test_rho_examples():
    sigma = TruncatedClass.fiber(1, [1])
    assert rho(S, 1, 0, sigma) == sigma
    # d(1) = s, so s·σ is already a coboundary modulo s^2
    lifted = rho(S, 1, 1, sigma)
    assert lifted.order == 2 and is_trivial(S, lifted)
    # for d = s^2 nothing of valuation 1 is hit
    assert not is_trivial(S2, rho(S2, 1, 1, sigma))
    assert is_trivial(S, rho(S, 1, 1, TruncatedClass.fiber(1, [0])))


def test_oni_examples():
    one = TruncatedClass.fiber(0, [1])
    assert not is_trivial(S, obstruction_oni(S, 0, 1, 0, one))
    assert is_trivial(S2, obstruction_oni(S2, 0, 1, 0, one))
    assert is_trivial(S, obstruction_oni(S, 0, 1, 0, TruncatedClass.fiber(0, [0])))


def test_extend_oracle_examples():
    res = extend_oracle(S, 0, [1], 3)
    assert res.achieved == 0 and res.failed_at == 1
    res = extend_oracle(S2, 0, [1], 3)
    assert res.achieved == 1 and res.failed_at == 2
    res = extend_oracle(ZERO_D, 0, [1, 2], 4)
    assert res.achieved == 4 and not res.obstructed


def test_second_class_examples():
    w = second_class_detect(S, 1, [1], 4)
    assert w.order == 1 and w.alpha.coeffs == ((1,),)
    w = second_class_detect(S2, 1, [1], 4)
    assert w.order == 2 and w.alpha.vector() == [1, 0]
    assert second_class_detect(ZERO_D, 1, [1, 0, 0], 4) is None
    with pytest.raises(InvalidInputError):
        second_class_detect(S, 1, [0], 4)


def test_square_zero_is_enforced():
    with pytest.raises(ComplexError):
        parse_complex("ranks 1 1 1\nd 0 1 1 : 1\nd 1 1 1 : s\n")


def test_complex_file_errors_carry_lines():
    with pytest.raises(ParseError, match="line 2"):
        parse_complex("ranks 1 1\nd 0 2 1 : s\n")
    with pytest.raises(ParseError, match="line 1"):
        parse_complex("rank 1 1\n")


def test_render_round_trip():
    rng = random.Random(11)
    for _ in range(30):
        C = random_complex(rng)
        D = parse_complex(render_complex(C))
        assert D.ranks == C.ranks and D.truncation == C.truncation
        for q in range(C.length):
            assert D.polynomial_matrix(q) == C.polynomial_matrix(q)


def test_random_complexes_are_complexes():
    rng = random.Random(3)
    for _ in range(50):
        C = random_complex(rng)
        assert C.length <= 3 and max(C.ranks) <= 4 and C.truncation == 5
        for q in range(C.length - 1):
            n = C.truncation + 1
            prod = [matvec(C.toeplitz(q + 1, n), col) for col in zip(*C.toeplitz(q, n))]
            assert not any(v for col in prod for v in col)


def test_accounting_minimal_examples():
    a0, a1 = jump_accounting(S2, 0), jump_accounting(S2, 1)
    assert (a0.jump, a0.first_class_dim, a0.second_class_dim) == (1, 1, 0)
    assert (a1.jump, a1.first_class_dim, a1.second_class_dim) == (1, 0, 1)


SMALL = corpus(99, 40)


@pytest.mark.parametrize("index", range(len(SMALL)))
def test_obstruction_theory_on_small_corpus(index):
    C = SMALL[index]
    rng = random.Random(index)
    check_extension_criterion(C, rng)
    check_order_reduction(C, rng)
    check_second_class(C, rng)
    check_accounting(C)

import random

import pytest

from jumpcoh.cohomology import complex_cohomology
from jumpcoh.deformation import (
    NORMALIZATION,
    DeformationMC,
    ExtensionState,
    ObstructionCertificate,
    bracket_obstruction,
    export_twisted_complex,
    extend_class,
    first_order_matrix,
    jump_report,
    kodaira_spencer,
    mc_check,
    obstruction_step,
)
from jumpcoh.errors import InconsistentDeformationError, InvalidDeformationError, StaleExtensionError
from jumpcoh.forms import LieModel, TVForm, bracket, dbar
from jumpcoh.jetcomplex import extend_oracle
from jumpcoh.scalars import GaussianRational, Jet, ParamSet

from conftest import CLASS_I, CLASS_II, CLASS_III

P = ParamSet(("t11", "t12", "t21", "t22", "t31", "t32"))


def t(name, order=2):
    return Jet.variable(P, order, name)


def test_mc_check_examples(iwasawa):
    model, d = iwasawa
    assert mc_check(model, DeformationMC.zero(model, P), 4).passed
    for order in range(1, 6):
        assert mc_check(model, d, order).passed
    alone = TVForm(model, 1, {(1, (1,)): t("t11", 1)}, P, 1)
    assert mc_check(model, alone, 3).passed
    with pytest.raises(InvalidDeformationError):
        mc_check(model, TVForm(model, 2, {(1, (1, 2)): t("t11", 1)}, P, 1), 2)


def test_both_sides_of_mc_equation(iwasawa):
    model, d = iwasawa
    psi = d.psi_at(2)
    det = t("t11") * t("t22") - t("t12") * t("t21")
    expected = TVForm(model, 2, {(3, (1, 2)): det}, P, 2)
    assert dbar(psi) == expected
    assert bracket(psi, psi).scale(GaussianRational(1, 0) / 2) == expected


def test_mc_failure_is_reported(iwasawa):
    model, _ = iwasawa
    # θ1φ̄1 and θ2φ̄2 with independent parameters: ½[ψ,ψ] has no ∂̄ partner
    psi = TVForm(model, 1, {(1, (1,)): t("t11", 1), (2, (2,)): t("t22", 1)}, P, 1)
    report = mc_check(model, psi, 2)
    assert not report.passed and report.defect
    with pytest.raises(InconsistentDeformationError):
        kodaira_spencer(DeformationMC(model, psi), 2)


def test_deformation_validation(iwasawa):
    model, _ = iwasawa
    with pytest.raises(InvalidDeformationError):
        DeformationMC(model, TVForm(model, 1, {(1, (1,)): Jet.constant(P, 1, 1)}, P, 1))


def test_kodaira_spencer(iwasawa):
    model, d = iwasawa
    k1 = kodaira_spencer(d, 1)
    expected = TVForm(model, 1, {(i, (lam,)): t(f"t{i}{lam}", 1) for i in (1, 2, 3) for lam in (1, 2)}, P, 1)
    assert k1.form == expected
    assert [c for c in k1.coordinates] == [t(f"t{i}{lam}", 1) for i in (1, 2, 3) for lam in (1, 2)]
    k2 = kodaira_spencer(d, 2)
    det = t("t11") * t("t22") - t("t12") * t("t21")
    assert k2.form == TVForm(model, 1, {(3, (3,)): -det}, P, 2)
    zero = DeformationMC.zero(model, P)
    for n in (1, 2, 3):
        assert not kodaira_spencer(zero, n).form


def _state(d, form):
    return ExtensionState(d, form, [])


def test_first_order_obstructions(iwasawa):
    model, d = iwasawa
    g = model.generator
    assert obstruction_step(d, _state(d, g(3))).is_zero
    o2 = obstruction_step(d, _state(d, g(2)))
    assert o2.render("cli") == "t11*theta3⊗phibar1 + t12*theta3⊗phibar2"
    o1 = obstruction_step(d, _state(d, g(1)))
    assert o1.reduced == TVForm(model, 1, {(3, (1,)): -t("t21", 1), (3, (2,)): -t("t22", 1)}, P, 1)


def test_combined_obstruction_vanishes_on_the_degenerate_locus(iwasawa):
    model, d = iwasawa
    curve = d.on_curve((1, 1, 1, 1, 0, 0))
    # t11 = t21 = s: the class is s(θ1 + θ2), i.e. θ1 + θ2 up to the scalar s
    alpha = model.generator(1) + model.generator(2)
    assert obstruction_step(curve, _state(curve, alpha)).is_zero


def test_stale_states_are_rejected(iwasawa):
    model, d = iwasawa
    with pytest.raises(StaleExtensionError):
        obstruction_step(d, _state(d, model.generator(3, (3,))))
    bogus = ExtensionState(d, model.generator(2), [TVForm.zero(model, 0, P, 1)])
    with pytest.raises(StaleExtensionError):
        obstruction_step(d, bogus)


def test_extend_class_examples(iwasawa):
    model, d = iwasawa
    for direction in (CLASS_I, CLASS_II, CLASS_III):
        state = extend_class(d, model.generator(3), 4, direction)
        assert isinstance(state, ExtensionState) and state.achieved == 4
        assert not any(state.corrections)
    cert = extend_class(d, model.generator(2), 4, CLASS_II)
    assert isinstance(cert, ObstructionCertificate) and cert.failed_at == 1
    assert cert.obstruction.leading() == model.generator(3, (1,))
    zero = DeformationMC.zero(model, P)
    for q, space in enumerate(complex_cohomology(model)):
        for rep in space.representatives:
            state = extend_class(zero, rep, 3)
            assert isinstance(state, ExtensionState) and state.achieved == 3


def test_symbolic_extension_of_theta3(iwasawa):
    model, d = iwasawa
    state = extend_class(d, model.generator(3), 3)
    assert state.achieved == 3
    state.check()


def test_first_order_matrix(iwasawa):
    model, d = iwasawa
    m0 = first_order_matrix(d, 0)
    point = [1, 0, 0, 1, 0, 0]
    assert m0.rank_at(point) == 2
    kernel = m0.kernel_at(point)
    assert len(kernel) == 1 and kernel[0][:2] == [0, 0] and kernel[0][2]
    m1 = first_order_matrix(d, 1)
    assert all(not e for row in m1.entries for e in row)
    m2 = first_order_matrix(d, 2)
    assert m2.rank_at(point) == 1
    assert len(m2.kernel_at(point)) == 5
    assert first_order_matrix(d, 0).rank_at([0, 0, 0, 0, 1, 0]) == 0


def test_export_of_trivial_deformation(iwasawa):
    model, _ = iwasawa
    C = export_twisted_complex(DeformationMC.zero(model, P), CLASS_III, 4)
    for q in range(model.dim):
        assert C.coefficient(q, 0) == model.dbar_matrix(q)
        for k in range(1, 5):
            assert not any(v for row in C.coefficient(q, k) for v in row)


def test_export_generic_dimensions(iwasawa):
    _, d = iwasawa
    assert [export_twisted_complex(d, CLASS_III).generic_h(q) for q in range(4)] == [1, 4, 5, 2]
    assert [export_twisted_complex(d, CLASS_I).generic_h(q) for q in range(4)] == [3, 6, 6, 3]
    C = export_twisted_complex(d, CLASS_II)
    assert [C.fiber_h(q) for q in range(4)] == [3, 6, 6, 3]


def test_jump_report_examples(iwasawa):
    model, d = iwasawa
    rep = jump_report(d, CLASS_II)
    assert rep.h_generic == [2, 5, 5, 2]
    (cls, n, witness), = rep.degrees[1].second_class
    assert cls == model.generator(3, (1,)) and n == 1 and witness == model.generator(2)
    assert rep.normalization == NORMALIZATION == -1
    rep = jump_report(d, CLASS_III)
    assert rep.h_generic == [1, 4, 5, 2]
    lost = rep.degrees[1]
    assert lost.jump == 2 and not lost.first_class and len(lost.second_class) == 2
    assert {c for c, _, _ in lost.second_class} == {model.generator(3, (1,)), model.generator(3, (2,))}
    rep = jump_report(DeformationMC.zero(model, P), CLASS_III)
    assert rep.h_generic == rep.h_fiber == [3, 6, 6, 3]
    assert not any(r.first_class or r.second_class for r in rep.degrees)


@pytest.mark.parametrize("direction", [CLASS_I, CLASS_II, CLASS_III], ids=["i", "ii", "iii"])
def test_extend_class_agrees_with_oracle(iwasawa, direction):
    model, d = iwasawa
    C = export_twisted_complex(d, direction, 5)
    for q, space in enumerate(complex_cohomology(model)):
        for rep in space.representatives:
            ours = extend_class(d, rep, 4, direction)
            oracle = extend_oracle(C, q, rep.to_vector(), 4)
            assert ours.achieved == oracle.achieved, (q, rep.render("cli"))
            if isinstance(ours, ObstructionCertificate):
                assert oracle.obstructed and oracle.failed_at == ours.failed_at


def test_extension_soundness(iwasawa):
    model, d = iwasawa
    rng = random.Random(5)
    for _ in range(6):
        direction = [GaussianRational(rng.randint(-3, 3), rng.randint(-1, 1)) for _ in range(6)]
        curve = d.on_curve(direction)
        for q, space in enumerate(complex_cohomology(model)):
            for rep in space.representatives:
                out = extend_class(d, rep, 3, direction)
                state = out if isinstance(out, ExtensionState) else out.state
                k = state.achieved
                assert not curve.D(state.total(k), k)


def test_recursion_matches_bracket_symbolic(iwasawa):
    model, d = iwasawa
    for q, space in enumerate(complex_cohomology(model)[:3]):
        for rep in space.representatives:
            state = _state(d, rep)
            step = obstruction_step(d, state)
            assert step.coordinates == bracket_obstruction(d, state).coordinates


def _single_direction_deformations(model, rng, count):
    """ψ = θ_i ⊗ (Σ t_j ω_j) with ∂̄-closed ω_j: both sides of MC vanish."""
    closed = [k for k in range(1, model.dim + 1) if not model.dbar_phibar(k)]
    params = ParamSet(("a", "b"))
    out = []
    for _ in range(count):
        i = rng.randint(1, model.dim)
        terms = {}
        for name in params.names:
            for lam in closed:
                c = GaussianRational(rng.randint(-2, 2))
                if c:
                    terms[(i, (lam,))] = terms.get((i, (lam,)), Jet.zero(params, 1)) + Jet.variable(params, 1, name) * c
        out.append(DeformationMC(model, TVForm(model, 1, terms, params, 1), f"rand{i}"))
    return out


@pytest.mark.parametrize(
    "model",
    [
        LieModel.from_triples(3, [(1, 2, 3, 1)], "iwasawa"),
        LieModel.from_triples(4, [(1, 2, 3, 1), (1, 3, 4, 1)], "filiform4"),
        LieModel.from_triples(4, [(1, 2, 3, 1)], "heisenberg_x_c"),
    ],
    ids=lambda m: m.name,
)
def test_accounting_on_random_deformations(model):
    rng = random.Random(model.dim * 31 + len(model.bracket_triples()))
    for d in _single_direction_deformations(model, rng, 6):
        assert mc_check(model, d, 3).passed
        direction = (GaussianRational(rng.randint(-2, 2)), GaussianRational(rng.randint(1, 2)))
        rep = jump_report(d, direction, 3)
        assert rep.h_fiber == [s.dimension for s in complex_cohomology(model)]
        for deg in rep.degrees:
            assert deg.jump == len(deg.first_class) + len(deg.second_class)
            assert deg.h_generic <= deg.h_fiber

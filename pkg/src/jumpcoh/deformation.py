"""Maurer–Cartan deformations of invariant models and their obstruction calculus.

Conventions: the twisted differential is ``D = ∂̄ − [ψ, ·]`` and ψ solves
``∂̄ψ = ½[ψ, ψ]``.  For a class ``α`` extended to order ``n−1`` the order-``n``
obstruction is the degree-``n`` part of ``[ψ, α_{n−1}]`` (equivalently minus
the degree-``n`` part of ``D α_{n−1}``), reduced in ``H^{q+1}``.

The exported one-parameter complex uses ``d = D`` along ``t = s·v``; its
obstruction map is therefore ``−1`` times the bracket obstruction.  Reports
state this constant as ``normalization``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .cohomology import CohomologySpace, complex_cohomology, reduce_class
from .errors import (
    ComplexError,
    DegreeRangeError,
    InconsistentDeformationError,
    InternalConsistencyError,
    InvalidDeformationError,
    StabilizationError,
    StaleExtensionError,
)
from .forms import EMPTY, LieModel, TVForm, bracket, dbar
from .jetcomplex import (
    JetModuleComplex,
    jump_accounting,
    second_class_detect,
)
from .linalg import EchelonBasis, LinearSolver, rank
from .scalars import CURVE, ONE, ZERO, GaussianRational, Jet, ParamSet, gaussian, monomials

__all__ = [
    "NORMALIZATION",
    "DeformationMC",
    "MCReport",
    "KSClass",
    "ExtensionState",
    "ObstructionClass",
    "ObstructionCertificate",
    "FirstOrderMatrix",
    "DegreeReport",
    "JumpReport",
    "mc_check",
    "kodaira_spencer",
    "twisted_d",
    "obstruction_step",
    "bracket_obstruction",
    "extend_class",
    "first_order_matrix",
    "export_twisted_complex",
    "jump_report",
]

NORMALIZATION = -1  # exported-complex obstruction = NORMALIZATION · bracket obstruction


class DeformationMC:
    """A Maurer–Cartan element ``ψ`` on an invariant model.

    ``psi`` is an exact polynomial (jet coefficients whose terms are all
    kept), so it can be re-homed at any truncation order.
    """

    def __init__(self, model: LieModel, psi: TVForm, name: str = "deformation"):
        if psi.model != model:
            raise InvalidDeformationError("ψ lives on a different model")
        if psi.degree != 1 and psi:
            raise InvalidDeformationError(f"ψ must have form degree 1, got {psi.degree}")
        for key, c in psi.items():
            if c.constant_term():
                raise InvalidDeformationError(f"ψ has a nonzero constant part at θ{key[0]}⊗φ̄{key[1]}")
        self.model = model
        self.name = name
        self.params = psi.params
        self.psi = psi if psi.degree == 1 else TVForm.zero(model, 1, psi.params, psi.order)
        self.degree = max((c.degree() for _, c in self.psi.items()), default=0)

    @classmethod
    def zero(cls, model: LieModel, params: ParamSet = EMPTY, name: str = "trivial") -> "DeformationMC":
        return cls(model, TVForm.zero(model, 1, params, 1), name)

    @property
    def validity_order(self) -> int:
        """Orders up to which MC has to be checked: past ``2·deg ψ`` every term vanishes identically."""
        return max(2 * self.degree, 1)

    def psi_at(self, order: int) -> TVForm:
        return self.psi.lift(self.params, order)

    def part(self, k: int, order: int) -> TVForm:
        """``ψ^{(k)}``, the degree-``k`` homogeneous part, at jet order ``order``."""
        if k > order:
            return TVForm.zero(self.model, 1, self.params, order)
        return self.psi_at(order).homogeneous_part(k)

    def on_curve(self, direction: Sequence) -> "DeformationMC":
        """Restriction to ``t = s·direction``."""
        direction = [gaussian(v) for v in direction]
        return DeformationMC(self.model, self.psi.substitute_curve(direction), f"{self.name}|curve")

    def D(self, form: TVForm, order: int) -> TVForm:
        return twisted_d(self, form, order)

    def __eq__(self, other):
        return isinstance(other, DeformationMC) and self.model == other.model and self.psi == other.psi

    def __hash__(self):
        return hash((self.model, self.psi))

    def __repr__(self):
        return f"DeformationMC({self.name!r}, params={self.params.names})"


def twisted_d(deformation: DeformationMC, form: TVForm, order: int) -> TVForm:
    """``D(form) = ∂̄form − [ψ, form]`` with coefficients truncated at ``order``."""
    form = form.lift(deformation.params, order) if form.params.count == 0 or form.order != order else form
    return dbar(form) - bracket(deformation.psi_at(order), form)


@dataclass
class MCReport:
    order: int
    defect: TVForm
    dd_defects: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.defect and not self.dd_defects

    def lines(self) -> list[str]:
        out = [f"mc_defect = {self.defect.render('cli')}"]
        out.append(f"dd_failures = {len(self.dd_defects)}")
        out.append(f"order = {self.order}")
        out.append(f"status = {'pass' if self.passed else 'fail'}")
        return out


def mc_check(model: LieModel, psi, order: int) -> MCReport:
    """``∂̄ψ − ½[ψ,ψ]`` modulo ``m^{order+1}``, together with ``D∘D`` on every generator."""
    if isinstance(psi, DeformationMC):
        deformation = psi
    else:
        if psi.degree != 1 and psi:
            raise InvalidDeformationError(f"ψ must have form degree 1, got {psi.degree}")
        deformation = DeformationMC(model, psi)
    p = deformation.psi_at(order)
    defect = dbar(p) - bracket(p, p).scale(GaussianRational(1, 0) / 2)
    dd = {}
    for q in range(model.dim):
        for key in model.basis(q):
            g = model.generator(key[0], key[1], deformation.params, order)
            twice = twisted_d(deformation, twisted_d(deformation, g, order), order)
            if twice:
                dd[(q, key)] = twice
    report = MCReport(order, defect, dd)
    if not defect and dd:
        raise InternalConsistencyError("Maurer–Cartan holds but D∘D ≠ 0")
    return report


@dataclass
class KSClass:
    """``κ_n``: the homogeneous degree-``n`` part of ψ.

    For ``n = 1`` ``coordinates`` holds the class in ``H^1`` (jets linear in
    the parameters); for higher ``n`` it is ``None``.
    """

    order: int
    form: TVForm
    coordinates: list | None = None

    def render(self, style: str = "cli") -> str:
        return self.form.render(style)


def kodaira_spencer(deformation: DeformationMC, n: int) -> KSClass:
    if n < 1:
        raise DegreeRangeError(f"Kodaira–Spencer order must be >= 1, got {n}")
    part = lambda k: deformation.part(k, n)  # noqa: E731
    defect = dbar(part(n))
    half = GaussianRational(1) / 2
    for j in range(1, n):
        defect = defect - bracket(part(j), part(n - j)).scale(half)
    if defect:
        raise InconsistentDeformationError(f"Maurer–Cartan fails at order {n}: {defect.render('cli')}", defect)
    coords = None
    if n == 1:
        coords, _ = reduce_class(complex_cohomology(deformation.model)[1], part(1))
    return KSClass(n, part(n), coords)


@dataclass
class ExtensionState:
    """``α_k = α + α^{(1)} + ... + α^{(k)}`` with ``D α_k ≡ 0 mod m^{k+1}``."""

    deformation: DeformationMC
    base: TVForm
    corrections: list[TVForm]

    @property
    def achieved(self) -> int:
        return len(self.corrections)

    @property
    def degree(self) -> int:
        return self.base.degree

    def total(self, order: int | None = None) -> TVForm:
        order = self.achieved if order is None else order
        acc = self.base.lift(self.deformation.params, order)
        for corr in self.corrections:
            acc = acc + corr.lift(self.deformation.params, order)
        return acc

    def defect(self) -> TVForm:
        k = self.achieved
        return twisted_d(self.deformation, self.total(k), k)

    def check(self) -> None:
        if not all(c.is_constant() for _, c in self.base.items()):
            raise StaleExtensionError("base class must have constant coefficients")
        if dbar(self.base):
            raise StaleExtensionError("base form is not ∂̄-closed")
        for j, corr in enumerate(self.corrections, 1):
            if corr and any(c.degree() != j or c.valuation() != j for _, c in corr.items()):
                raise StaleExtensionError(f"correction {j} is not homogeneous of degree {j}")
        if self.defect():
            raise StaleExtensionError(f"D α_{self.achieved} is not zero modulo m^{self.achieved + 1}")


@dataclass
class ObstructionClass:
    """Order-``n`` obstruction: ``form = Σ coordinates_k · rep_k + ∂̄ witness``."""

    order: int
    form: TVForm
    coordinates: list[Jet]
    reduced: TVForm
    witness: TVForm

    @property
    def is_zero(self) -> bool:
        return not any(self.coordinates)

    def leading(self) -> TVForm:
        """On a curve, the ``s^n`` coefficient of the reduced class (a fibre class)."""
        if self.reduced.params != CURVE:
            return self.reduced
        n = self.order
        return self.reduced.map_coefficients(lambda c: Jet.constant(EMPTY, 0, c.coefficient((n,))))

    def render(self, style: str = "cli") -> str:
        return self.reduced.render(style)


def _cohomology(model: LieModel, q: int) -> CohomologySpace:
    spaces = complex_cohomology(model)
    if not 0 <= q < len(spaces):
        raise DegreeRangeError(f"degree {q} outside 0..{model.dim}")
    return spaces[q]


def _reduce_obstruction(model: LieModel, q1: int, n: int, form: TVForm) -> ObstructionClass:
    if q1 > model.dim:
        zero = TVForm.zero(model, q1, form.params, form.order)
        return ObstructionClass(n, zero, [], zero, TVForm.zero(model, q1 - 1, form.params, form.order))
    space = _cohomology(model, q1)
    coords, witness = reduce_class(space, form)
    reduced = TVForm.zero(model, q1, form.params, form.order)
    for k, c in enumerate(coords):
        if c:
            reduced = reduced + space.representative(k, form.params, form.order).scale(c)
    return ObstructionClass(n, form, coords, reduced, witness.homogeneous_part(n) if witness else witness)


def bracket_obstruction(deformation: DeformationMC, state: ExtensionState) -> ObstructionClass:
    """Reduction of the degree-``n`` part of ``[κ, α_{n−1}]`` with κ = ψ truncated at order ``n``."""
    n = state.achieved + 1
    kappa = deformation.psi_at(n)
    form = bracket(kappa, state.total(n)).homogeneous_part(n)
    return _reduce_obstruction(deformation.model, state.degree + 1, n, form)


def obstruction_step(deformation: DeformationMC, state: ExtensionState) -> ObstructionClass:
    """Obstruction to extending ``state`` by one order, computed from ``D α_{n−1}``."""
    if state.deformation is not deformation and state.deformation != deformation:
        raise StaleExtensionError("state belongs to a different deformation")
    state.check()
    n = state.achieved + 1
    form = -twisted_d(deformation, state.total(n), n).homogeneous_part(n)
    result = _reduce_obstruction(deformation.model, state.degree + 1, n, form)
    cross = bracket_obstruction(deformation, state)
    if cross.coordinates != result.coordinates:
        raise InternalConsistencyError(f"order-{n} obstruction disagrees with the bracket formula")
    return result


@dataclass
class ObstructionCertificate:
    """First-class obstruction: ``state`` reaches ``failed_at − 1`` and no extension reaches ``failed_at``."""

    state: ExtensionState
    failed_at: int
    obstruction: ObstructionClass

    @property
    def achieved(self) -> int:
        return self.failed_at - 1

    @property
    def obstructed(self) -> bool:
        return True


def _joint_corrections(deformation: DeformationMC, base: TVForm, n: int) -> list[TVForm] | None:
    """All ``α^{(1..n)}`` at once with ``D(α + Σ α^{(j)}) ≡ 0 mod m^{n+1}``, or ``None``."""
    model, params = deformation.model, deformation.params
    q = base.degree
    src = model.basis(q)
    unknowns = [(key, exp) for j in range(1, n + 1) for exp in monomials(params.count, j) for key in src]
    rows: dict = {}

    def eq_index(exp, key):
        return rows.setdefault((exp, key), len(rows))

    columns = []
    for key, exp in unknowns:
        mono = Jet(params, n, {exp: ONE})
        image = twisted_d(deformation, model.generator(key[0], key[1], params, n, mono), n)
        columns.append({eq_index(e, k): c for k, jet in image.items() for e, c in jet.items()})
    rhs_form = -twisted_d(deformation, base.lift(params, n), n)
    rhs_entries = {eq_index(e, k): c for k, jet in rhs_form.items() for e, c in jet.items()}
    matrix = [dict() for _ in range(len(rows))]
    for col, entries in enumerate(columns):
        for r, v in entries.items():
            matrix[r][col] = v
    rhs = [rhs_entries.get(r, ZERO) for r in range(len(rows))]
    if not rows:
        x = [ZERO] * len(unknowns)
    else:
        x = LinearSolver(matrix, len(unknowns)).solve(rhs)
    if x is None:
        return None
    per_degree: list[dict] = [dict() for _ in range(n)]
    for (key, exp), v in zip(unknowns, x):
        if v:
            per_degree[sum(exp) - 1].setdefault(key, {})[exp] = v
    return [
        TVForm(model, q, {key: Jet(params, n, t) for key, t in terms.items()}, params, n)
        for terms in per_degree
    ]


def extend_class(deformation: DeformationMC, alpha: TVForm, max_order: int, direction: Sequence | None = None):
    """Extend a fibre class order by order up to ``max_order``.

    Returns an :class:`ExtensionState` on success, otherwise an
    :class:`ObstructionCertificate`.  Each correction is the ``reduce_class``
    witness of the current obstruction; when that obstruction is nonzero all
    corrections are re-solved jointly, so a certificate means no extension at
    all exists at that order.
    """
    if direction is not None:
        deformation = deformation.on_curve(direction)
    params = deformation.params
    if alpha.params.count:
        if not all(c.is_constant() for _, c in alpha.items()):
            raise StaleExtensionError("the class to extend must have constant coefficients")
        alpha = alpha.map_coefficients(lambda c: Jet.constant(EMPTY, 0, c.constant_term()))
    state = ExtensionState(deformation, alpha, [])
    state.check()
    for n in range(1, max_order + 1):
        step = obstruction_step(deformation, state)
        if step.is_zero:
            corr = step.witness if step.witness else TVForm.zero(deformation.model, alpha.degree, params, n)
            state = ExtensionState(deformation, alpha, state.corrections + [corr])
            continue
        joint = _joint_corrections(deformation, alpha, n)
        if joint is None:
            return ObstructionCertificate(state, n, step)
        state = ExtensionState(deformation, alpha, joint)
    state.check()
    return state


@dataclass
class FirstOrderMatrix:
    """``[κ_1, ·] : H^q → H^{q+1}`` in the representative bases."""

    degree: int
    entries: list[list[Jet]]

    def at(self, point: Sequence) -> list[list[GaussianRational]]:
        return [[e.evaluate(point) for e in row] for row in self.entries]

    def rank_at(self, point: Sequence) -> int:
        mat = self.at(point)
        return rank(mat, len(mat[0]) if mat else 0)

    def kernel_at(self, point: Sequence) -> list[list[GaussianRational]]:
        mat = self.at(point)
        ncols = len(self.entries[0]) if self.entries else 0
        if not mat:
            return [[ONE if i == j else ZERO for i in range(ncols)] for j in range(ncols)]
        return LinearSolver(mat, ncols).nullspace()


def first_order_matrix(deformation: DeformationMC, q: int) -> FirstOrderMatrix:
    model = deformation.model
    if not 0 <= q < model.dim:
        raise DegreeRangeError(f"first-order matrix needs 0 <= q < {model.dim}")
    src, tgt = _cohomology(model, q), _cohomology(model, q + 1)
    kappa = deformation.part(1, 1)
    params = deformation.params
    cols = []
    for k in range(src.dimension):
        image = bracket(kappa, src.representative(k, params, 1))
        coords, _ = reduce_class(tgt, image)
        cols.append(coords)
    entries = [[cols[k][r] for k in range(src.dimension)] for r in range(tgt.dimension)]
    return FirstOrderMatrix(q, entries)


_EXPORT_CACHE: dict = {}


def export_twisted_complex(deformation: DeformationMC, direction: Sequence, truncation: int = 5) -> JetModuleComplex:
    """The complex ``(Λ^{0,•} ⊗ g, D)`` along ``t = s·direction`` as a one-parameter jet complex."""
    direction = tuple(gaussian(v) for v in direction)
    key = (deformation, direction, truncation)
    cached = _EXPORT_CACHE.get(key)
    if cached is not None:
        return cached
    curve = deformation.on_curve(direction)
    model = curve.model
    report = mc_check(model, curve, truncation)
    if not report.passed:
        raise InconsistentDeformationError(
            f"Maurer–Cartan fails along the curve: {report.defect.render('cli')}", report.defect
        )
    ranks = [len(model.basis(q)) for q in range(model.dim + 1)]
    blocks = []
    for q in range(model.dim):
        per_power = [model.dbar_matrix(q)]
        rows_idx = {k: r for r, k in enumerate(model.basis(q + 1))}
        for k in range(1, truncation + 1):
            piece = curve.part(k, truncation)
            mat = [[ZERO] * ranks[q] for _ in range(ranks[q + 1])]
            if piece:
                for c, gen in enumerate(model.basis(q)):
                    image = bracket(piece, model.generator(gen[0], gen[1], CURVE, truncation))
                    for tgt, jet in image.items():
                        v = jet.coefficient((k,))
                        if v:
                            mat[rows_idx[tgt]][c] = -v
            per_power.append(mat)
        blocks.append(per_power)
    try:
        C = JetModuleComplex(ranks, blocks, truncation)
    except ComplexError as exc:
        raise InconsistentDeformationError(str(exc)) from exc
    _EXPORT_CACHE[key] = C
    return C


@dataclass
class DegreeReport:
    degree: int
    h_fiber: int
    h_generic: int
    first_class: list[TVForm]
    second_class: list[tuple[TVForm, int, TVForm]]  # (class, order n, witness α_{n−1} in bracket normalization)

    @property
    def jump(self) -> int:
        return self.h_fiber - self.h_generic


@dataclass
class JumpReport:
    deformation: str
    direction: tuple
    max_order: int
    degrees: list[DegreeReport]
    normalization: int = NORMALIZATION

    @property
    def h_fiber(self) -> list[int]:
        return [d.h_fiber for d in self.degrees]

    @property
    def h_generic(self) -> list[int]:
        return [d.h_generic for d in self.degrees]

    def table(self) -> str:
        lines = [
            f"deformation {self.deformation}  direction {','.join(str(v) for v in self.direction)}  max order {self.max_order}",
            "q  h(0)  h(generic)  jump  first  second",
        ]
        for d in self.degrees:
            lines.append(f"{d.degree}  {d.h_fiber:>4}  {d.h_generic:>10}  {d.jump:>4}  {len(d.first_class):>5}  {len(d.second_class):>6}")
        lines.append("h(T): " + " ".join(str(v) for v in self.h_fiber))
        lines.append("h(generic): " + " ".join(str(v) for v in self.h_generic))
        lines.append("first-class obstructed:")
        for d in self.degrees:
            if d.first_class:
                lines.append(f"  q={d.degree}: " + ", ".join(f.render("cli") for f in d.first_class))
        lines.append("second-class obstructed:")
        for d in self.degrees:
            for cls, n, witness in d.second_class:
                lines.append(f"  q={d.degree}: {cls.render('cli')}  [n={n}, witness {witness.render('cli')}]")
        lines.append(f"normalization: {self.normalization}")
        return "\n".join(lines)

    def records(self) -> str:
        lines = [
            f"deformation={self.deformation}",
            "direction=" + ",".join(str(v) for v in self.direction),
            f"max_order={self.max_order}",
            f"normalization={self.normalization}",
            "h_fiber=" + " ".join(str(v) for v in self.h_fiber),
            "h_generic=" + " ".join(str(v) for v in self.h_generic),
        ]
        for d in self.degrees:
            q = d.degree
            lines += [
                f"degree.{q}.h_fiber={d.h_fiber}",
                f"degree.{q}.h_generic={d.h_generic}",
                f"degree.{q}.jump={d.jump}",
                f"degree.{q}.first_class_dim={len(d.first_class)}",
                f"degree.{q}.second_class_dim={len(d.second_class)}",
            ]
            for k, f in enumerate(d.first_class):
                lines.append(f"degree.{q}.first_class.{k}={f.render('cli')}")
            for k, (cls, n, witness) in enumerate(d.second_class):
                lines.append(f"degree.{q}.second_class.{k}={cls.render('cli')}")
                lines.append(f"degree.{q}.second_class.{k}.order={n}")
                lines.append(f"degree.{q}.second_class.{k}.witness={witness.render('cli')}")
        return "\n".join(lines)


def _fiber_form(model: LieModel, q: int, coords: Sequence) -> TVForm:
    space = _cohomology(model, q)
    total = TVForm.zero(model, q)
    for k, c in enumerate(coords):
        if c:
            total = total + space.representative(k).scale(c)
    return total


def _curve_form(model: LieModel, q: int, coeffs: Sequence[Sequence], scale: int = 1) -> TVForm:
    """Form with coefficients ``Σ_k s^k coeffs[k]``; constant forms when only ``s^0`` appears."""
    order = len(coeffs) - 1
    if all(not any(block) for block in coeffs[1:]):
        return TVForm.from_vector(model, q, [v * scale for v in coeffs[0]])
    terms = {}
    for pos, key in enumerate(model.basis(q)):
        jet = Jet(CURVE, order, {(k,): coeffs[k][pos] * scale for k in range(len(coeffs))})
        if jet:
            terms[key] = jet
    return TVForm(model, q, terms, CURVE, order)


def jump_report(deformation: DeformationMC, direction: Sequence, max_order: int = 4) -> JumpReport:
    """Per-degree jump of ``h^q`` along ``direction``, split into first- and second-class parts."""
    if max_order < 2:
        raise DegreeRangeError("jump reports need max order >= 2 to check stabilization")
    direction = tuple(gaussian(v) for v in direction)
    model = deformation.model
    C = export_twisted_complex(deformation, direction, max_order + 1)
    degrees = []
    for q in range(model.dim + 1):
        acct = jump_accounting(C, q, max_order)
        if not acct.stable:
            raise StabilizationError(f"degree {q}: obstruction subspaces still moving at order {max_order}")
        if not acct.balanced:
            raise InternalConsistencyError(
                f"degree {q}: jump {acct.jump} != first {acct.first_class_dim} + second {acct.second_class_dim}"
            )
        h = acct.h_fiber
        # first class: coordinate classes independent modulo the extendable subspace
        span = EchelonBasis(h)
        for row in acct.extendable.rows():
            span.add(row)
        for row in acct.extendable.rows():
            ext = extend_class(deformation, _fiber_form(model, q, row), max_order, direction)
            if isinstance(ext, ObstructionCertificate):
                raise InternalConsistencyError(f"degree {q}: an extendable class fails at order {ext.failed_at}")
        first = []
        for k in range(h):
            unit = [ONE if j == k else ZERO for j in range(h)]
            if span.add(unit):
                form = _fiber_form(model, q, unit)
                ext = extend_class(deformation, form, max_order, direction)
                if not isinstance(ext, ObstructionCertificate):
                    raise InternalConsistencyError(f"degree {q}: class {form.render('cli')} extends to order {max_order}")
                first.append(form)
        second = []
        space = C.fiber_cohomology(q)
        for row in acct.second_class.rows():
            beta = [ZERO] * C.rank_of(q)
            for coeff, rep in zip(row, space.representatives):
                if coeff:
                    beta = [b + coeff * r for b, r in zip(beta, rep)]
            witness = second_class_detect(C, q, beta, max_order)
            if witness is None:
                raise InternalConsistencyError(f"degree {q}: second-class basis vector has no witness")
            alpha = _curve_form(model, q - 1, witness.alpha.coeffs, NORMALIZATION)
            second.append((_fiber_form(model, q, row), witness.order, alpha))
        degrees.append(DegreeReport(q, h, acct.h_generic, first, second))
    return JumpReport(deformation.name, direction, max_order, degrees)
